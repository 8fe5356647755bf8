#pragma once

// CSV input/output. Numbers are printed with 17 significant digits so a
// round trip through text is lossless for doubles; headers are exact strings
// and validated on read.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypxray/numerics.hpp"

namespace hypxray {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Row-major table writer; the header line is emitted verbatim.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw CsvError("cannot open for writing: " + path);
        out_ << header << "\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ",";
            out_ << format_double(values[i]);
        }
        out_ << "\n";
    }

    void close() { out_.close(); }

private:
    std::ofstream out_;
};

struct CsvTable {
    std::string header;
    std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open: " + path);
    CsvTable table;
    if (!std::getline(in, table.header)) throw CsvError("empty file: " + path);
    if (!table.header.empty() && table.header.back() == '\r') table.header.pop_back();
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                double v = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                throw CsvError(path + ": line " + std::to_string(lineno) +
                               ": not a number: '" + cell + "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

// Scattered field samples, schema "x,y,value_re,value_im"; (x, y) must lie
// strictly inside the unit disk and all values must be finite.
struct FieldSample {
    double x = 0.0, y = 0.0;
    Complex value{};
};

inline const char* field_csv_header() { return "x,y,value_re,value_im"; }

inline void write_field_csv(const std::string& path, const std::vector<FieldSample>& samples) {
    CsvWriter w(path, field_csv_header());
    for (const auto& s : samples) w.row({s.x, s.y, s.value.real(), s.value.imag()});
}

inline std::vector<FieldSample> read_field_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    if (t.header != field_csv_header())
        throw CsvError(path + ": expected header '" + field_csv_header() + "', got '" +
                       t.header + "'");
    std::vector<FieldSample> samples;
    samples.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        std::string where = path + ": row " + std::to_string(i + 1);
        if (r.size() != 4) throw CsvError(where + ": expected 4 columns");
        for (double v : r)
            if (!std::isfinite(v)) throw CsvError(where + ": non-finite value");
        if (r[0] * r[0] + r[1] * r[1] >= 1.0)
            throw CsvError(where + ": point (x, y) outside the unit disk");
        samples.push_back({r[0], r[1], Complex(r[2], r[3])});
    }
    return samples;
}

}  // namespace hypxray
