#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "hypxray/cli.hpp"

using namespace hypxray;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() {
        std::remove(path.c_str());
        std::remove((path + ".gp").c_str());
    }
};

}  // namespace

TEST_CASE("field csv round trip and validation") {
    TempFile tmp("t_field.csv");
    std::vector<FieldSample> samples = {{0.25, -0.125, Complex(1.0 / 3.0, 2.0)},
                                        {0.0, 0.5, Complex(-0.7, 1e-17)}};
    write_field_csv(tmp.path, samples);
    auto back = read_field_csv(tmp.path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].x == samples[0].x);
    CHECK(back[0].value == samples[0].value);  // 17 digits round-trip exactly
    CHECK(back[1].value == samples[1].value);

    std::ofstream bad(tmp.path);
    bad << field_csv_header() << "\n1.5,0.0,1.0,0.0\n";
    bad.close();
    CHECK_THROWS_AS(read_field_csv(tmp.path), CsvError);

    std::ofstream bad2(tmp.path);
    bad2 << "x,y,value\n0.1,0.1,1.0\n";
    bad2.close();
    CHECK_THROWS_AS(read_field_csv(tmp.path), CsvError);

    std::ofstream bad3(tmp.path);
    bad3 << field_csv_header() << "\n0.1,0.1,oops,0\n";
    bad3.close();
    CHECK_THROWS_AS(read_field_csv(tmp.path), CsvError);
}

TEST_CASE("transform table: schema, residuals, determinism, empty grid") {
    TempFile tmp("t_transform.csv");
    RunConfig cfg;
    cfg.command = Command::transform_table;
    cfg.z_re = 1.0;
    cfg.output = tmp.path;
    REQUIRE(run_command(cfg) == kExitOk);

    CsvTable t = read_csv(tmp.path);
    CHECK(t.header ==
          "lambda,tau_quad_re,tau_quad_im,tau_closed_re,tau_closed_im,sigma_closed_re,"
          "sigma_closed_im,product_re,product_im,target_re,target_im,residual");
    REQUIRE(t.rows.size() == 11);  // lambda = 0, 0.5, ..., 5
    for (const auto& r : t.rows) {
        REQUIRE(r.size() == 12);
        CHECK(r[11] < 1e-6);
    }

    std::string first = slurp(tmp.path);
    REQUIRE(run_command(cfg) == kExitOk);
    CHECK(slurp(tmp.path) == first);  // byte-identical rerun

    cfg.lambda_max = -1.0;
    REQUIRE(run_command(cfg) == kExitOk);
    CsvTable empty = read_csv(tmp.path);
    CHECK(empty.rows.empty());
}

TEST_CASE("kernel table identities") {
    TempFile tmp("t_kernel.csv");
    RunConfig cfg;
    cfg.command = Command::kernel_table;
    cfg.z_re = 0.8;
    cfg.output = tmp.path;
    REQUIRE(run_command(cfg) == kExitOk);
    CsvTable t = read_csv(tmp.path);
    CHECK(t.header == "r,tau_re,tau_im,sigma_re,sigma_im,sigma_identity_residual,shift_residual");
    REQUIRE(!t.rows.empty());
    for (const auto& r : t.rows) {
        CHECK(r[5] < 1e-12);
        CHECK(r[6] < 1e-15);
    }
}

TEST_CASE("disk reconstruction run: default bump") {
    TempFile tmp("t_disk.csv");
    RunConfig cfg;
    cfg.command = Command::disk_recon;
    cfg.grid_n = 3;
    cfg.grid_extent = 0.3;
    cfg.output = tmp.path;
    REQUIRE(run_command(cfg) == kExitOk);
    CsvTable t = read_csv(tmp.path);
    CHECK(t.header == "x,y,f_true_re,f_true_im,f_rec_re,f_rec_im,abs_error");
    REQUIRE(t.rows.size() == 9);
    for (const auto& r : t.rows) {
        REQUIRE(r.size() == 7);
        if (std::abs(r[2]) > 1e-3) CHECK(r[6] / std::abs(r[2]) < 1e-2);
    }
    CHECK(slurp(tmp.path + ".gp").find(tmp.path) != std::string::npos);
}

TEST_CASE("disk reconstruction run: constant field with --allow-noncompact") {
    TempFile tmp("t_disk_const.csv");
    RunConfig cfg;
    cfg.command = Command::disk_recon;
    cfg.allow_noncompact = true;
    cfg.grid_n = 2;
    cfg.grid_extent = 0.25;
    cfg.output = tmp.path;
    REQUIRE(run_command(cfg) == kExitOk);
    CsvTable t = read_csv(tmp.path);
    for (const auto& r : t.rows) {
        CHECK(std::abs(r[2] - 1.0) < 1e-15);  // f_true = 1
        CHECK(r[6] < 1e-6);                   // reconstruction error
    }
}

TEST_CASE("disk reconstruction run: zero input field gives zero columns") {
    TempFile in("t_zero_in.csv");
    TempFile tmp("t_zero_out.csv");
    std::vector<FieldSample> samples;
    for (int i = -3; i <= 3; ++i)
        for (int j = -3; j <= 3; ++j)
            samples.push_back({0.08 * i, 0.08 * j, Complex(0.0, 0.0)});
    write_field_csv(in.path, samples);

    RunConfig cfg;
    cfg.command = Command::disk_recon;
    cfg.input = in.path;
    cfg.grid_n = 2;
    cfg.grid_extent = 0.2;
    cfg.output = tmp.path;
    REQUIRE(run_command(cfg) == kExitOk);
    CsvTable t = read_csv(tmp.path);
    for (const auto& r : t.rows) {
        CHECK(r[2] == 0.0);
        CHECK(std::abs(r[4]) < 1e-9);
        CHECK(r[6] < 1e-9);
    }
}

TEST_CASE("exit codes are exhaustive and disjoint") {
    RunConfig cfg;
    cfg.command = Command::transform_table;
    cfg.z_re = -1.0;  // usage error
    CHECK(run_command(cfg) == kExitUsage);

    RunConfig cfg2;
    cfg2.command = Command::disk_recon;
    cfg2.input = "no_such_file_.csv";  // input error
    CHECK(run_command(cfg2) == kExitInput);

    RunConfig cfg3;
    cfg3.command = Command::limit_study;
    cfg3.z_list = {0.4, 0.2};  // too few attenuations
    CHECK(run_command(cfg3) == kExitUsage);

    RunConfig cfg4;
    cfg4.command = Command::none;
    CHECK(run_command(cfg4) == kExitUsage);

    RunConfig cfg5;
    cfg5.command = Command::kernel_table;
    cfg5.output = "/no_such_dir_/t.csv";  // file-system error
    CHECK(run_command(cfg5) == kExitInput);
}

TEST_CASE("selftest passes and the fault injection is caught") {
    RunConfig cfg;
    cfg.command = Command::selftest;
    std::ostringstream out;
    CHECK(run_selftest(cfg, out) == kExitOk);
    CHECK(out.str().find("gamma-int identity") != std::string::npos);
    CHECK(out.str().find("FAIL") == std::string::npos);

    // Same verdicts under a different seed.
    RunConfig cfg_seed = cfg;
    cfg_seed.seed = 987654;
    std::ostringstream out2;
    CHECK(run_selftest(cfg_seed, out2) == kExitOk);

    RunConfig bad = cfg;
    bad.inject_fault = true;
    std::ostringstream out3;
    CHECK(run_selftest(bad, out3) == kExitTestFailure);
    CHECK(out3.str().find("FAIL") != std::string::npos);
}

TEST_CASE("surface reconstruction and limit study runs (trimmed cutoffs)") {
    TempFile tmp("t_surface.csv");
    RunConfig cfg;
    cfg.command = Command::surface_recon;
    cfg.grid_n = 2;
    cfg.grid_extent = 0.25;
    cfg.chi_start = 8.0;
    cfg.chi_end = 10.0;
    cfg.output = tmp.path;
    REQUIRE(run_command(cfg) == kExitOk);
    CsvTable t = read_csv(tmp.path);
    CHECK(t.header == "x,y,f_true_re,f_true_im,f_rec_re,f_rec_im,abs_error,lift_x,lift_y");
    REQUIRE(t.rows.size() == 4);
    for (const auto& r : t.rows)
        if (std::abs(r[2]) > 0.1) CHECK(r[6] / std::abs(r[2]) < 2e-2);

    // Rescaled-curvature leg.
    RunConfig cfg4 = cfg;
    cfg4.K = -4.0;
    REQUIRE(run_command(cfg4) == kExitOk);
    CsvTable t4 = read_csv(tmp.path);
    for (const auto& r : t4.rows)
        if (std::abs(r[2]) > 0.1) CHECK(r[6] / std::abs(r[2]) < 2e-2);

    TempFile tmp2("t_limit.csv");
    RunConfig lcfg;
    lcfg.command = Command::limit_study;
    lcfg.grid_n = 1;
    lcfg.chi_start = 8.0;
    lcfg.chi_end = 10.0;
    lcfg.z_list = {0.4, 0.2, 0.1};
    lcfg.output = tmp2.path;
    REQUIRE(run_command(lcfg) == kExitOk);
    CsvTable lt = read_csv(tmp2.path);
    CHECK(lt.header ==
          "x,y,f_true_re,f_true_im,z1,rec1_re,rec1_im,z2,rec2_re,rec2_im,z3,rec3_re,rec3_im,"
          "extrap_re,extrap_im,error_indicator,abs_error");
    REQUIRE(lt.rows.size() == 1);
    const auto& r = lt.rows[0];
    CHECK(std::abs(r[13] - r[2]) < 5e-2 * std::abs(r[2]) + 1e-3);
}
