#pragma once

// Command-line front end: self-tests, identity tables, reconstruction runs.
// Exit codes: 0 success, 1 self-test failure, 2 usage error, 3 input-data or
// processing error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hypxray/csv.hpp"
#include "hypxray/spherical.hpp"
#include "hypxray/surface.hpp"
#include "hypxray/surface_data.hpp"
#include "hypxray/synthesis.hpp"
#include "hypxray/xray_disk.hpp"

namespace hypxray {

enum class Command { none, selftest, disk_recon, surface_recon, transform_table, kernel_table, limit_study };

constexpr int kExitOk = 0;
constexpr int kExitTestFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Command command = Command::none;
    double z_re = 0.5;
    double z_im = 0.0;
    double K = -1.0;

    int n_theta = 64;
    int n_r = 600;
    double radius = 0.0;  // 0: truncation radius from the field bound
    double fd_step = 1e-3;

    int grid_n = 0;  // 0: per-command default
    double grid_extent = 0.0;

    std::string input;
    std::string output = "out.csv";
    unsigned seed = 12345;

    bool allow_noncompact = false;
    bool inject_fault = false;

    double bump_radius = 1.0;
    double lambda_max = 5.0;
    double lambda_step = 0.5;
    std::vector<double> z_list = {0.4, 0.2, 0.1, 0.05};
    double chi_start = 10.0;  // surface data synthesis cutoffs
    double chi_end = 12.5;
};

inline Complex config_z(const RunConfig& cfg) { return Complex(cfg.z_re, cfg.z_im); }

inline int run_transform_table(const RunConfig& cfg);

namespace detail {

inline void validate_common(const RunConfig& cfg) {
    if (!(cfg.n_theta >= 8)) throw UsageError("--n-theta must be >= 8");
    if (!(cfg.n_r >= 16)) throw UsageError("--n-r must be >= 16");
    if (!(cfg.radius >= 0.0)) throw UsageError("--radius must be >= 0");
    if (!(cfg.fd_step > 0.0 && cfg.fd_step <= 1e-1)) throw UsageError("--fd-step out of range");
    if (!(cfg.K < 0.0)) throw UsageError("--K must be negative");
    if (cfg.grid_n < 0) throw UsageError("--grid-n must be positive");
    if (cfg.grid_extent < 0.0 || cfg.grid_extent > 0.9)
        throw UsageError("--grid-extent must lie in (0, 0.9]");
    if (!(cfg.chi_start > 4.0 && cfg.chi_end > cfg.chi_start))
        throw UsageError("--chi-start/--chi-end out of range");
}

inline OperatorResolution resolution_of(const RunConfig& cfg) {
    OperatorResolution res;
    res.n_theta = cfg.n_theta;
    res.n_r = cfg.n_r;
    res.R = cfg.radius;
    res.h = cfg.fd_step;
    return res;
}

// Scattered samples -> raster -> bilinear field, zero outside the data box.
inline ScalarField field_from_samples(const std::vector<FieldSample>& samples, int raster_n = 64) {
    if (samples.empty()) throw CsvError("input field: no samples");
    double xmin = 1.0, xmax = -1.0, ymin = 1.0, ymax = -1.0, vmax = 0.0;
    for (const auto& s : samples) {
        xmin = std::min(xmin, s.x);
        xmax = std::max(xmax, s.x);
        ymin = std::min(ymin, s.y);
        ymax = std::max(ymax, s.y);
        vmax = std::max(vmax, std::abs(s.value));
    }
    double dx = std::max(xmax - xmin, 1e-6), dy = std::max(ymax - ymin, 1e-6);

    auto grid = std::make_shared<std::vector<Complex>>(
        static_cast<std::size_t>(raster_n) * raster_n);
    std::vector<int> counts(static_cast<std::size_t>(raster_n) * raster_n, 0);
    for (const auto& s : samples) {
        int i = std::min(raster_n - 1,
                         static_cast<int>(std::floor((s.x - xmin) / dx * (raster_n - 1) + 0.5)));
        int j = std::min(raster_n - 1,
                         static_cast<int>(std::floor((s.y - ymin) / dy * (raster_n - 1) + 0.5)));
        (*grid)[static_cast<std::size_t>(j) * raster_n + i] += s.value;
        ++counts[static_cast<std::size_t>(j) * raster_n + i];
    }
    for (std::size_t k = 0; k < grid->size(); ++k)
        if (counts[k] > 1) (*grid)[k] /= static_cast<double>(counts[k]);

    double support = 0.0;
    for (double cx : {xmin, xmax})
        for (double cy : {ymin, ymax})
            if (cx * cx + cy * cy < 1.0)
                support = std::max(support, distance_to_origin(DiskPoint(cx, cy)));

    auto eval = [grid, raster_n, xmin, ymin, dx, dy](const DiskPoint& p) -> Complex {
        double u = (p.coord.real() - xmin) / dx * (raster_n - 1);
        double v = (p.coord.imag() - ymin) / dy * (raster_n - 1);
        if (u < 0.0 || v < 0.0 || u > raster_n - 1 || v > raster_n - 1)
            return Complex(0.0, 0.0);
        int i = std::min(static_cast<int>(u), raster_n - 2);
        int j = std::min(static_cast<int>(v), raster_n - 2);
        double a = u - i, b = v - j;
        auto at = [&](int ii, int jj) {
            return (*grid)[static_cast<std::size_t>(jj) * raster_n + ii];
        };
        return (1.0 - a) * (1.0 - b) * at(i, j) + a * (1.0 - b) * at(i + 1, j) +
               (1.0 - a) * b * at(i, j + 1) + a * b * at(i + 1, j + 1);
    };
    return ScalarField{eval, vmax * 1.1 + 1e-12, support + 1e-9};
}

// Pi_0^(z) data of a general compact field, tabulated on a polar grid. Used
// for CSV inputs; radial inputs go through the 1-D profile route instead.
inline ScalarField synthesize_disk_data_field(const ScalarField& f, Complex z,
                                              const OperatorResolution& res) {
    double C = std::max(f.bound, 1e-12);
    double r_pad = std::min(f.support_radius + std::log(4.0 * kPi * C / (1e-8 * z.real())) /
                                                   z.real(),
                            26.0);
    OperatorResolution inner;
    inner.n_theta = std::max(res.n_theta, 256);
    inner.n_r = 240;
    auto grid = std::make_shared<PolarGridInterpolant>(PolarGridInterpolant::build(
        64, 48, r_pad, [&](double r, double theta) {
            DiskPoint y(std::polar(std::tanh(0.5 * r), theta));
            return normal_op_attenuated(f, AttenuationParam(z), y, inner);
        }));
    double bound = grid->sup() * (1.0 + 1e-6) + 1e-12;
    return ScalarField{[grid](const DiskPoint& p) { return grid->eval(p); }, bound, r_pad};
}

inline void write_plot_script(const std::string& csv_path, const std::string& title) {
    std::ofstream out(csv_path + ".gp");
    out << "# gnuplot script for " << csv_path << "\n"
        << "set datafile separator ','\n"
        << "set title '" << title << "'\n"
        << "set xlabel 'x'\nset ylabel 'y'\n"
        << "set dgrid3d 40,40\nset view map\nset pm3d interpolate 2,2\n"
        << "splot '" << csv_path << "' every ::1 using 1:2:7 with pm3d title 'abs error'\n";
}

inline std::vector<double> grid_coords(int n, double extent) {
    std::vector<double> xs;
    if (n <= 1) {
        xs.push_back(0.0);
        return xs;
    }
    for (int i = 0; i < n; ++i) xs.push_back(-extent + 2.0 * extent * i / (n - 1));
    return xs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// selftest

namespace detail {

struct CheckRow {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass() const { return residual <= tolerance; }
};

inline std::vector<CheckRow> selftest_rows(const RunConfig& cfg) {
    std::vector<CheckRow> rows;
    std::mt19937 rng(cfg.seed);
    auto uni = [&rng](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };
    auto push = [&rows](const std::string& name, double residual, double tol) {
        rows.push_back({name, residual, tol});
    };

    // numerics
    {
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            int n = 2 + static_cast<int>(rng() % 8);
            int deg = static_cast<int>(rng() % (2 * n));
            std::vector<double> c(static_cast<std::size_t>(deg) + 1);
            for (auto& ck : c) ck = uni(-2.0, 2.0);
            double a = uni(-2.0, 0.0), b = uni(0.5, 2.5);
            auto rule = gauss_legendre(n, a, b);
            double got = rule.integrate([&](double x) {
                double p = 0.0;
                for (std::size_t k = c.size(); k-- > 0;) p = p * x + c[k];
                return p;
            });
            double want = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k)
                want += c[k] / (static_cast<double>(k) + 1.0) *
                        (std::pow(b, static_cast<double>(k) + 1.0) -
                         std::pow(a, static_cast<double>(k) + 1.0));
            worst = std::max(worst, std::abs(got - want) / (1.0 + std::abs(want)));
        }
        push("gauss-legendre polynomial exactness", worst, 1e-10);
    }
    {
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            Complex w(uni(0.25, 5.0), uni(-5.0, 5.0));
            Complex lhs = gamma_complex(w + 1.0), rhs = w * gamma_complex(w);
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
        }
        push("gamma recursion Gamma(w+1) = w Gamma(w)", worst, 1e-11);
    }
    {
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            Complex w(uni(0.25, 8.0), uni(-8.0, 8.0));
            Complex a = gamma_complex(std::conj(w)), b = std::conj(gamma_complex(w));
            worst = std::max(worst, std::abs(a - b) / std::abs(b));
        }
        push("gamma conjugation symmetry", worst, 1e-12);
    }
    {
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            int n = 3 + static_cast<int>(rng() % 4);
            std::vector<Complex> c(static_cast<std::size_t>(n));
            for (auto& ck : c) ck = Complex(uni(-1.0, 1.0), uni(-1.0, 1.0));
            std::vector<std::pair<double, Complex>> samples;
            for (int i = 0; i < n; ++i) {
                double zz = 0.5 / (i + 1.0);
                Complex p{};
                for (std::size_t k = c.size(); k-- > 0;) p = p * zz + c[k];
                samples.emplace_back(zz, p);
            }
            worst = std::max(worst, std::abs(extrapolate_to_zero(samples).value - c[0]));
        }
        push("neville extrapolation polynomial reproduction", worst, 1e-9);
    }

    // geometry
    auto random_point = [&](double m) {
        return DiskPoint(std::polar(uni(0.0, m), uni(0.0, 2.0 * kPi)));
    };
    auto random_isom = [&]() {
        return IsometryElement::rotation(uni(0.0, 2.0 * kPi))
            .compose(IsometryElement::translation(uni(-2.0, 2.0), uni(0.0, 2.0 * kPi)))
            .compose(IsometryElement::rotation(uni(0.0, 2.0 * kPi)));
    };
    {
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            DiskPoint p = random_point(0.85), q = random_point(0.85);
            IsometryElement g = random_isom();
            worst = std::max(worst, std::abs(distance(apply_isometry(g, p), apply_isometry(g, q)) -
                                             distance(p, q)));
        }
        push("isometry invariance of the distance", worst, 1e-10);
    }
    {
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            UnitTangent x(random_point(0.85), uni(0.0, 2.0 * kPi));
            double tt = uni(0.0, 5.0);
            worst = std::max(worst, std::abs(distance(x.base, geodesic_point(x, tt)) - tt));
        }
        push("geodesic unit speed", worst, 1e-9);
    }
    {
        double worst = 0.0;
        for (int t = 0; t < 100; ++t)
            worst = std::max(worst,
                             std::abs(random_isom().compose(random_isom()).det_defect()));
        push("SU(1,1) closure after renormalization", worst, 1e-9);
    }
    {
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            UnitTangent x(random_point(0.6), uni(0.0, 2.0 * kPi));
            double t1 = uni(0.1, 2.0), t2 = uni(0.1, 2.0);
            worst = std::max(worst, distance(geodesic_point(x, t1 + t2),
                                             geodesic_point(geodesic_flow(x, t1), t2)));
        }
        push("geodesic flow property", worst, 1e-9);
    }

    // spherical
    {
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            double l = uni(0.0, 4.0), r = uni(0.05, 6.0);
            worst = std::max(worst, std::abs(phi_lambda(SpectralParam(l), r) -
                                             phi_lambda(SpectralParam(-l), r)));
        }
        push("phi symmetry in lambda", worst, 1e-9);
    }
    {
        double worst = 0.0;
        for (double lam : {0.0, 1.0, 2.0}) {
            for (double r : {0.3, 1.0, 2.0, 3.0}) {
                auto F = [&](double s) { return phi_lambda(SpectralParam(lam), s, 2048); };
                Complex ratio = radial_laplacian_fd(F, r) / phi_lambda(SpectralParam(lam), r, 2048);
                worst = std::max(worst, std::abs(ratio + Complex(lam * lam + 0.25, 0.0)) /
                                            (lam * lam + 0.25));
            }
        }
        push("phi eigenvalue -(lambda^2 + 1/4)", worst, 1e-5);
    }
    {
        double worst = 0.0;
        for (double zz : {0.5, 1.0}) {
            for (double lam : {0.0, 1.0, 5.0}) {
                Complex closed = tau_tilde_closed(Complex(zz, 0.0), SpectralParam(lam));
                Complex quad = tau_tilde_quadrature(Complex(zz, 0.0), SpectralParam(lam), 40.0 / zz);
                worst = std::max(worst, std::abs(quad - closed) / std::abs(closed));
            }
        }
        push("gamma-int identity (quadrature vs closed form)", worst, 1e-6);
    }
    {
        double worst = 0.0;
        for (double zz : {0.25, 0.5, 1.0, 2.0}) {
            for (double lam : {0.0, 0.5, 1.0, 2.0, 5.0}) {
                SpectralParam l(lam);
                Complex prod = tau_tilde_closed(Complex(zz, 0.0), l) *
                               sigma_tilde_closed(Complex(zz, 0.0), l);
                Complex target = 4.0 * kPi * kPi /
                                 ((Complex(zz, 0.0) + 0.5) * (Complex(zz, 0.0) + 0.5) + lam * lam);
                worst = std::max(worst, std::abs(prod - target) / std::abs(target));
            }
        }
        push("kernel product identity tau~ * sigma~", worst, 1e-12);
    }
    {
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            Complex zz(uni(0.2, 2.0), uni(-0.5, 0.5));
            SpectralParam l(uni(0.0, 4.0));
            Complex sig = sigma_tilde_closed(zz, l), shift = tau_tilde_closed(zz + 1.0, l);
            worst = std::max(worst, std::abs(sig - shift) / std::abs(sig));
        }
        push("sigma~ = tau~(z+1) shift identity", worst, 1e-12);
    }
    {
        // Multiplicativity of the spherical transform on a radial convolution.
        RadialFunction f1 = radial_bump(0.8), f2 = radial_bump(1.0);
        ScalarField f1f = radial_field([](double r) { return bump_profile(r, 0.8); }, 1.0, 0.8);
        OperatorResolution cres;
        cres.n_theta = 64;
        RadialFunction conv{[&](double r) {
                                DiskPoint x(std::tanh(0.5 * r), 0.0);
                                return convolve_radial(f1f, f2, x, cres);
                            },
                            1.8};
        double worst = 0.0;
        for (double lam : {0.0, 1.0}) {
            SpectralParam l(lam);
            Complex lhs = spherical_transform(conv, l, 1.8, 160, 128);
            Complex rhs = spherical_transform(f1, l, 0.8, 160, 128) *
                          spherical_transform(f2, l, 1.0, 160, 128);
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
        }
        push("spherical transform multiplicativity on convolution", worst, 1e-3);
    }

    // xray_disk
    {
        OperatorResolution res;
        res.n_r = 600;
        double worst = 0.0;
        for (Complex zz : {Complex(1.0, 0.0), Complex(0.5, 0.0)}) {
            res.R = 40.0 / zz.real();
            Complex got = normal_op_attenuated(constant_field(Complex(1.0, 0.0)),
                                               AttenuationParam(zz), DiskPoint(0.1, 0.0), res);
            worst = std::max(worst, std::abs(got - 4.0 * kPi / zz) / std::abs(4.0 * kPi / zz));
        }
        push("constant-field exactness Pi_0 1 = 4 pi / z", worst, 1e-10);
    }
    {
        OperatorResolution res;
        res.R = 40.0;
        Complex s1 = s_op(constant_field(Complex(1.0, 0.0)),
                          AttenuationParam(Complex(1.0, 0.0), -1.0), DiskPoint(), res);
        push("S_K constant value 2 pi / (z + sqrt(-K))", std::abs(s1 - Complex(kPi, 0.0)) / kPi,
             1e-9);
    }
    {
        ScalarField bump = bump_field(DiskPoint(), 1.0);
        OperatorResolution res;
        res.n_theta = 256;
        res.n_r = 480;
        AttenuationParam p(Complex(0.7, 0.0));
        Complex ray0 = normal_op_attenuated(bump, p, DiskPoint(), res);
        Complex conv0 = 2.0 * convolve_radial(bump, kernel_tau(p.z), DiskPoint(), res);
        push("two-path agreement (ray vs convolution) at 0",
             std::abs(ray0 - conv0) / std::abs(ray0), 1e-6);
        DiskPoint x(0.3, -0.15);
        Complex ray1 = normal_op_attenuated(bump, p, x, res);
        Complex conv1 = 2.0 * convolve_radial(bump, kernel_tau(p.z), x, res);
        push("two-path agreement (ray vs convolution) off-center",
             std::abs(ray1 - conv1) / std::abs(ray1), 1e-5);
    }
    {
        OperatorResolution res;
        res.n_theta = 128;
        res.n_r = 400;
        AttenuationParam p(Complex(0.9, 0.0));
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            double C = uni(0.2, 3.0), k1 = uni(0.5, 6.0), k2 = uni(0.5, 6.0), ph = uni(0.0, 6.28);
            ScalarField f{[=](const DiskPoint& w) {
                              return Complex(
                                  C * std::sin(k1 * w.coord.real() + k2 * w.coord.imag() + ph),
                                  0.0);
                          },
                          C, kInfiniteSupport};
            Complex v = normal_op_attenuated(f, p, random_point(0.5), res);
            worst = std::max(worst, std::abs(v) / (4.0 * kPi / p.z.real() * C) - 1.0);
        }
        push("lemma bound (a): |Pi_0 f| <= 4 pi C / Re z", std::max(worst, 0.0), 1e-6);
    }
    {
        OperatorResolution res;
        res.n_theta = 1024;
        res.n_r = 400;
        AttenuationParam p(Complex(0.8, 0.0));
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            double Rv = uni(0.8, 2.5), C = uni(0.5, 2.0);
            DiskPoint x = random_point(0.2);
            DiskPoint c = geodesic_point(UnitTangent(x, uni(0.0, 6.28)), Rv + 0.5);
            ScalarField f = bump_field(c, 0.5, C);
            Complex v = normal_op_attenuated(f, p, x, res);
            double bound = 4.0 * kPi / p.z.real() * C * std::exp(-Rv * p.z.real());
            worst = std::max(worst, std::abs(v) / bound - 1.0);
        }
        push("lemma bound (b): vanishing-ball decay", std::max(worst, 0.0), 1e-6);
    }
    {
        ScalarField f = bump_field(DiskPoint(0.25, 0.1), 0.8);
        AttenuationParam p(Complex(0.8, 0.0));
        OperatorResolution res;
        res.n_theta = 256;
        res.n_r = 320;
        ScalarField pi_f{[&](const DiskPoint& y) { return normal_op_attenuated(f, p, y, res); },
                         4.0 * kPi / p.z.real() * f.bound, kInfiniteSupport};
        ScalarField f_nat{[&](const DiskPoint& y) { return radial_symmetrize(f, y, 64); },
                          f.bound, f.support_radius};
        double worst = 0.0;
        for (int t = 0; t < 3; ++t) {
            DiskPoint x = random_point(0.45);
            Complex lhs = radial_symmetrize(pi_f, x, 64);
            Complex rhs = normal_op_attenuated(f_nat, p, x, res);
            worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
        }
        push("symmetrization commutes with Pi_0", worst, 1e-6);
    }

    // surface
    const FuchsianGroup& G = [] {
        static FuchsianGroup g = octagon_group();
        return g;
    }();
    {
        static const int order[8] = {0, 5, 2, 7, 4, 1, 6, 3};
        IsometryElement P = IsometryElement::identity();
        for (int idx : order) P = P.compose(G.generators[static_cast<std::size_t>(idx)]);
        double dev = std::min(std::abs(P.a - Complex(1.0, 0.0)) + std::abs(P.b),
                              std::abs(P.a + Complex(1.0, 0.0)) + std::abs(P.b));
        if (cfg.inject_fault) dev += 1.0;
        push("octagon relator = identity", dev, 1e-7);
    }
    {
        SurfaceField one{[](const DiskPoint&) { return Complex(1.0, 0.0); }, 1.0, 0.0};
        auto [integral, area] = surface_integral(one, G);
        push("octagon area = 4 pi (Gauss-Bonnet)", std::abs(area - 4.0 * kPi) / (4.0 * kPi),
             1e-3);
    }
    {
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            DiskPoint q = random_point(0.7);
            std::size_t k = rng() % G.generators.size();
            DiskPoint moved = apply_isometry(G.generators[k], q);
            worst = std::max(worst, distance(reduce_to_fundamental(moved, G).first,
                                             reduce_to_fundamental(q, G).first));
        }
        push("fundamental-domain reduction Gamma-invariance", worst, 1e-8);
    }
    {
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            DiskPoint q = random_point(0.7);
            DiskPoint r1 = reduce_to_fundamental(q, G).first;
            DiskPoint r2 = reduce_to_fundamental(r1, G).first;
            worst = std::max(worst, std::abs(r2.coord - r1.coord));
        }
        push("fundamental-domain reduction idempotence", worst, 0.0);
    }
    {
        SurfaceField fb = surface_bump_field(G, DiskPoint(0.12, 0.07), 1.0);
        AttenuationParam p(Complex(0.5, 0.0), -1.0);
        OperatorResolution res;
        res.n_theta = 64;
        res.R = 14.0;
        double worst = 0.0;
        for (int t = 0; t < 2; ++t) {
            DiskPoint q = random_point(0.6);
            Complex base = surface_normal_op(fb, p, q, G, res);
            std::size_t k = rng() % G.generators.size();
            Complex other = surface_normal_op(fb, p, apply_isometry(G.generators[k], q), G, res);
            worst = std::max(worst, std::abs(base - other) / (1.0 + std::abs(base)));
        }
        push("covering commutation: lift independence", worst, 1e-6);
    }
    {
        OperatorResolution res;
        res.R = 40.0;
        double worst = 0.0;
        for (auto [zz, KK] : {std::pair{1.0, -1.0}, {0.5, -1.0}, {1.0, -4.0}}) {
            AttenuationParam p(Complex(zz, 0.0), KK);
            Complex data = 4.0 * kPi / p.z;
            SurfaceField g{[data](const DiskPoint&) { return data; }, std::abs(data) + 1.0, 0.0};
            Complex rec = reconstruct_surface(g, p, DiskPoint(0.2, 0.1), G, res);
            worst = std::max(worst, std::abs(rec - Complex(1.0, 0.0)));
        }
        push("theorem-3 chain on constants (incl. K = -4)", worst, 1e-6);
    }

    // cli
    {
        std::string tmp = "selftest_roundtrip.csv";
        std::vector<FieldSample> samples = {{0.1, 0.2, Complex(1.5, -0.25)},
                                            {-0.3, 0.05, Complex(0.125, 3.0)}};
        write_field_csv(tmp, samples);
        auto back = read_field_csv(tmp);
        double worst = back.size() == samples.size() ? 0.0 : 1.0;
        for (std::size_t i = 0; i < back.size() && worst == 0.0; ++i)
            worst = std::max({worst, std::abs(back[i].x - samples[i].x),
                              std::abs(back[i].value - samples[i].value)});
        std::remove(tmp.c_str());
        push("field CSV round trip is lossless", worst, 0.0);
    }
    {
        // Identical reruns produce byte-identical output.
        auto emit = [&](const std::string& path) {
            CsvWriter w(path, "lambda,value");
            for (double lam = 0.0; lam <= 2.0; lam += 0.5)
                w.row({lam, tau_tilde_closed(Complex(1.0, 0.0), SpectralParam(lam)).real()});
        };
        std::string p1 = "selftest_det1.csv", p2 = "selftest_det2.csv";
        emit(p1);
        emit(p2);
        std::ifstream f1(p1), f2(p2);
        std::stringstream s1, s2;
        s1 << f1.rdbuf();
        s2 << f2.rdbuf();
        double worst = (s1.str() == s2.str() && !s1.str().empty()) ? 0.0 : 1.0;
        std::remove(p1.c_str());
        std::remove(p2.c_str());
        push("CSV output determinism", worst, 0.0);
    }
    {
        // Error classes behind the exit codes stay disjoint: flag-range
        // violations raise UsageError (2), data problems raise CsvError (3).
        double worst = 1.0;
        try {
            RunConfig bad = cfg;
            bad.z_re = -1.0;
            run_transform_table(bad);
        } catch (const UsageError&) {
            try {
                read_field_csv("selftest_no_such_file_.csv");
            } catch (const CsvError&) {
                worst = 0.0;
            } catch (...) {
            }
        } catch (...) {
        }
        push("exit-code classification (usage vs input)", worst, 0.0);
    }

    return rows;
}

}  // namespace detail

inline int run_selftest(const RunConfig& cfg, std::ostream& out = std::cout) {
    detail::validate_common(cfg);
    auto rows = detail::selftest_rows(cfg);
    int failures = 0;
    out << "self-test (seed " << cfg.seed << ")\n";
    char buf[160];
    for (const auto& r : rows) {
        bool ok = r.pass();
        if (!ok) ++failures;
        std::snprintf(buf, sizeof(buf), "  %-52s %11.3e  (tol %8.1e)  %s\n", r.name.c_str(),
                      r.residual, r.tolerance, ok ? "pass" : "FAIL");
        out << buf;
    }
    out << (failures == 0 ? "all checks passed\n"
                          : std::to_string(failures) + " check(s) FAILED\n");
    return failures == 0 ? kExitOk : kExitTestFailure;
}

// ---------------------------------------------------------------------------
// tables

inline int run_transform_table(const RunConfig& cfg) {
    detail::validate_common(cfg);
    Complex z = config_z(cfg);
    if (!(z.real() > 0.0)) throw UsageError("transform-table requires Re z > 0");
    if (!(cfg.lambda_step > 0.0)) throw UsageError("--lambda-step must be > 0");

    CsvWriter w(cfg.output,
                "lambda,tau_quad_re,tau_quad_im,tau_closed_re,tau_closed_im,sigma_closed_re,"
                "sigma_closed_im,product_re,product_im,target_re,target_im,residual");
    double R = 40.0 / z.real();
    double max_residual = 0.0;
    int n_rows = 0;
    for (double lam = 0.0; lam <= cfg.lambda_max + 1e-12; lam += cfg.lambda_step) {
        SpectralParam l(lam);
        Complex tq = tau_tilde_quadrature(z, l, R);
        Complex tc = tau_tilde_closed(z, l);
        Complex sc = sigma_tilde_closed(z, l);
        Complex product = tc * sc;
        Complex target = 4.0 * kPi * kPi / ((z + 0.5) * (z + 0.5) + l.lambda * l.lambda);
        double residual = std::max(std::abs(tq - tc) / std::abs(tc),
                                   std::abs(product - target) / std::abs(target));
        max_residual = std::max(max_residual, residual);
        w.row({lam, tq.real(), tq.imag(), tc.real(), tc.imag(), sc.real(), sc.imag(),
               product.real(), product.imag(), target.real(), target.imag(), residual});
        ++n_rows;
    }
    std::printf("transform-table: %d rows -> %s (max residual %.3e)\n", n_rows,
                cfg.output.c_str(), max_residual);
    return kExitOk;
}

inline int run_kernel_table(const RunConfig& cfg) {
    detail::validate_common(cfg);
    Complex z = config_z(cfg);
    if (!(z.real() > 0.0)) throw UsageError("kernel-table requires Re z > 0");

    CsvWriter w(cfg.output, "r,tau_re,tau_im,sigma_re,sigma_im,sigma_identity_residual,"
                            "shift_residual");
    RadialFunction tau = kernel_tau(z);
    RadialFunction sigma = kernel_sigma(z);
    RadialFunction tau_shift = kernel_tau(z + 1.0);
    int n = cfg.grid_n > 0 ? cfg.grid_n : 40;
    for (int i = 1; i <= n; ++i) {
        double r = 4.0 * i / n;
        Complex tv = tau(r), sv = sigma(r);
        Complex closed = std::exp(-z * r) * (1.0 / std::tanh(r) - 1.0);
        double id_res = std::abs(sv - closed);
        double shift_res = std::abs(sv - tau_shift(r));
        w.row({r, tv.real(), tv.imag(), sv.real(), sv.imag(), id_res, shift_res});
    }
    std::printf("kernel-table: %d rows -> %s\n", n, cfg.output.c_str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// reconstructions

inline int run_disk_recon(const RunConfig& cfg) {
    detail::validate_common(cfg);
    Complex z = config_z(cfg);
    if (!(z.real() > 0.0)) throw UsageError("disk-recon requires Re z > 0");
    if (!(cfg.bump_radius > 0.0 && cfg.bump_radius < 8.0))
        throw UsageError("--bump-radius out of range");
    int n = cfg.grid_n > 0 ? cfg.grid_n : 21;
    double extent = cfg.grid_extent > 0.0 ? cfg.grid_extent : 0.6;
    OperatorResolution res = detail::resolution_of(cfg);
    AttenuationParam p(z, -1.0);

    ScalarField f_true = constant_field(Complex(0.0, 0.0));
    ScalarField g = f_true;
    if (!cfg.input.empty()) {
        f_true = detail::field_from_samples(read_field_csv(cfg.input));
        g = detail::synthesize_disk_data_field(f_true, z, res);
    } else if (cfg.allow_noncompact) {
        f_true = constant_field(Complex(1.0, 0.0));
        g = constant_field(4.0 * kPi / z);
    } else {
        f_true = bump_field(DiskPoint(), cfg.bump_radius);
        auto profile = std::make_shared<RadialDataProfile>(
            disk_normal_data_profile(radial_bump(cfg.bump_radius), z, 22.0));
        g = disk_data_field(profile);
    }

    CsvWriter w(cfg.output, "x,y,f_true_re,f_true_im,f_rec_re,f_rec_im,abs_error");
    auto xs = detail::grid_coords(n, extent);
    double max_abs = 0.0, f_sup = 0.0;
    for (double y : xs) {
        for (double x : xs) {
            DiskPoint q(x, y);
            Complex ft = f_true(q);
            Complex fr = reconstruct_disk(g, p, q, res);
            double err = std::abs(fr - ft);
            max_abs = std::max(max_abs, err);
            f_sup = std::max(f_sup, std::abs(ft));
            w.row({x, y, ft.real(), ft.imag(), fr.real(), fr.imag(), err});
        }
    }
    w.close();
    detail::write_plot_script(cfg.output, "disk reconstruction error");
    std::printf("disk-recon: %d x %d grid -> %s (max abs err %.3e, rel to sup|f| %.3e)\n", n, n,
                cfg.output.c_str(), max_abs, f_sup > 0.0 ? max_abs / f_sup : 0.0);
    return kExitOk;
}

inline int run_surface_recon(const RunConfig& cfg) {
    detail::validate_common(cfg);
    Complex z = config_z(cfg);
    if (!(z.real() > 0.0)) throw UsageError("surface-recon requires Re z > 0");
    int n = cfg.grid_n > 0 ? cfg.grid_n : 9;
    double extent = cfg.grid_extent > 0.0 ? cfg.grid_extent : 0.5;
    OperatorResolution res = detail::resolution_of(cfg);

    FuchsianGroup G = octagon_group();
    DiskPoint center(0.12, 0.07);
    if (!(cfg.bump_radius > 0.0 &&
          distance_to_origin(center) + cfg.bump_radius + 0.2 < G.edge_midpoint_radius))
        throw UsageError("--bump-radius leaves too little smooth margin in the octagon");

    AttenuationParam p(z, cfg.K);
    CurvatureScaling scal = rescale_to_unit_curvature(p);
    SurfaceSynthesisConfig scfg;
    scfg.chi_start = cfg.chi_start;
    scfg.chi_end = cfg.chi_end;
    scfg.build_field_grids = false;
    SurfaceData data = synthesize_surface_data(G, center, radial_bump(cfg.bump_radius),
                                               {scal.unit.z}, false, scfg);

    CsvWriter w(cfg.output,
                "x,y,f_true_re,f_true_im,f_rec_re,f_rec_im,abs_error,lift_x,lift_y");
    auto xs = detail::grid_coords(n, extent);
    double max_abs = 0.0, f_sup = 0.0;
    for (double y : xs) {
        for (double x : xs) {
            DiskPoint q(x, y);
            DiskPoint lift = reduce_to_fundamental(q, G).first;
            double ft = bump_profile(distance(center, lift), cfg.bump_radius);
            Complex fr = reconstruct_surface(data, 0, p, q, G, res);
            double err = std::abs(fr - Complex(ft, 0.0));
            max_abs = std::max(max_abs, err);
            f_sup = std::max(f_sup, ft);
            w.row({x, y, ft, 0.0, fr.real(), fr.imag(), err, lift.coord.real(),
                   lift.coord.imag()});
        }
    }
    w.close();
    detail::write_plot_script(cfg.output, "surface reconstruction error");
    std::printf(
        "surface-recon: %d x %d grid, K = %g -> %s (max abs err %.3e, rel to sup|f| %.3e)\n",
        n, n, cfg.K, cfg.output.c_str(), max_abs, f_sup > 0.0 ? max_abs / f_sup : 0.0);
    return kExitOk;
}

inline int run_limit_study(const RunConfig& cfg) {
    detail::validate_common(cfg);
    if (cfg.z_list.size() < 3) throw UsageError("--z-list needs at least 3 values");
    for (double zz : cfg.z_list)
        if (!(zz > 0.0 && zz <= 0.5))
            throw UsageError("--z-list values must lie in (0, 0.5]");
    int n = cfg.grid_n > 0 ? cfg.grid_n : 3;
    double extent = cfg.grid_extent > 0.0 ? cfg.grid_extent : 0.3;
    OperatorResolution res = detail::resolution_of(cfg);

    FuchsianGroup G = octagon_group();
    DiskPoint center(0.12, 0.07);
    double scale = std::sqrt(-cfg.K);
    std::vector<Complex> zts;
    for (double zz : cfg.z_list) zts.push_back(Complex(zz / scale, 0.0));

    SurfaceSynthesisConfig scfg;
    scfg.chi_start = cfg.chi_start;
    scfg.chi_end = cfg.chi_end;
    scfg.build_field_grids = false;
    SurfaceData data =
        synthesize_surface_data(G, center, radial_bump(cfg.bump_radius), zts, true, scfg);

    std::string header = "x,y,f_true_re,f_true_im";
    for (std::size_t i = 0; i < cfg.z_list.size(); ++i) {
        std::string k = std::to_string(i + 1);
        header += ",z" + k + ",rec" + k + "_re,rec" + k + "_im";
    }
    header += ",extrap_re,extrap_im,error_indicator,abs_error";
    CsvWriter w(cfg.output, header);

    auto xs = detail::grid_coords(n, extent);
    double max_abs = 0.0;
    for (double y : xs) {
        for (double x : xs) {
            DiskPoint q(x, y);
            DiskPoint lift = reduce_to_fundamental(q, G).first;
            double ft = bump_profile(distance(center, lift), cfg.bump_radius) - data.mean_f;
            LimitStudyResult lr = reconstruct_surface_limit(data, cfg.K, q, G, res);
            double err = std::abs(lr.value - Complex(ft, 0.0));
            max_abs = std::max(max_abs, err);
            std::vector<double> row = {x, y, ft, 0.0};
            for (const auto& [zz, rec] : lr.per_z) {
                row.push_back(zz);
                row.push_back(rec.real());
                row.push_back(rec.imag());
            }
            row.insert(row.end(),
                       {lr.value.real(), lr.value.imag(), lr.error_indicator, err});
            w.row(row);
        }
    }
    w.close();
    std::printf("limit-study: %d x %d grid, %zu attenuations -> %s (max abs err %.3e)\n", n, n,
                cfg.z_list.size(), cfg.output.c_str(), max_abs);
    return kExitOk;
}

// ---------------------------------------------------------------------------

inline int run_command(const RunConfig& cfg, std::ostream& out = std::cout) {
    try {
        switch (cfg.command) {
            case Command::selftest:
                return run_selftest(cfg, out);
            case Command::transform_table:
                return run_transform_table(cfg);
            case Command::kernel_table:
                return run_kernel_table(cfg);
            case Command::disk_recon:
                return run_disk_recon(cfg);
            case Command::surface_recon:
                return run_surface_recon(cfg);
            case Command::limit_study:
                return run_limit_study(cfg);
            case Command::none:
                break;
        }
        throw UsageError("no command given (see --help)");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CsvError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

}  // namespace hypxray
