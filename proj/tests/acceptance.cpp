// Acceptance suite: one check per criterion, each printed as a pass/fail
// line with the measured residual, its tolerance, and the runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "hypxray/spherical.hpp"
#include "hypxray/surface.hpp"
#include "hypxray/surface_data.hpp"
#include "hypxray/synthesis.hpp"
#include "hypxray/xray_disk.hpp"

using namespace hypxray;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int index, const char* name, double residual, double tolerance,
            Clock::time_point t0, bool extra_ok = true) {
    double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    bool ok = residual <= tolerance && extra_ok;
    if (!ok) ++g_failures;
    std::printf("%2d. %-46s residual %11.3e  tol %8.1e  %6.1fs  %s\n", index, name, residual,
                tolerance, dt, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
}

// 1. Gamma-integral identity: quadrature vs closed form on the 4 x 5 grid.
void criterion_gamma_integral() {
    auto t0 = Clock::now();
    double worst = 0.0;
    for (double z : {0.25, 0.5, 1.0, 2.0}) {
        for (double lam : {0.0, 0.5, 1.0, 2.0, 5.0}) {
            Complex closed = tau_tilde_closed(Complex(z, 0.0), SpectralParam(lam));
            Complex quad = tau_tilde_quadrature(Complex(z, 0.0), SpectralParam(lam), 40.0 / z);
            worst = std::max(worst, std::abs(quad - closed) / std::abs(closed));
        }
    }
    report(1, "gamma-integral identity (eq. gamma-int)", worst, 1e-6, t0);
}

// 2. Kernel-transform product identity, pure Gamma arithmetic.
void criterion_product_identity() {
    auto t0 = Clock::now();
    double worst = 0.0;
    for (double z : {0.25, 0.5, 1.0, 2.0}) {
        for (double lam : {0.0, 0.5, 1.0, 2.0, 5.0}) {
            SpectralParam l(lam);
            Complex prod =
                tau_tilde_closed(Complex(z, 0.0), l) * sigma_tilde_closed(Complex(z, 0.0), l);
            Complex target =
                4.0 * kPi * kPi / ((Complex(z, 0.0) + 0.5) * (Complex(z, 0.0) + 0.5) + lam * lam);
            worst = std::max(worst, std::abs(prod - target) / std::abs(target));
        }
    }
    report(2, "kernel product tau~ sigma~ = 4pi^2/((z+1/2)^2+l^2)", worst, 1e-12, t0);
}

// 3. Spherical-function eigenvalue property by radial finite differences.
void criterion_eigenvalue() {
    auto t0 = Clock::now();
    double worst = 0.0;
    for (double lam : {0.0, 0.5, 1.0, 2.0}) {
        SpectralParam l(lam);
        double want = -(lam * lam + 0.25);
        for (double r = 0.2; r <= 3.0 + 1e-9; r += 0.2) {
            auto F = [&](double s) { return phi_lambda(l, s, 2048); };
            Complex ratio = radial_laplacian_fd(F, r) / phi_lambda(l, r, 2048);
            worst = std::max(worst, std::abs(ratio - Complex(want, 0.0)) / std::abs(want));
        }
    }
    report(3, "spherical eigenvalue -(lambda^2 + 1/4)", worst, 1e-5, t0);
}

// 4. Constant-field operator chain, including the K = -4 rescaled path.
void criterion_constant_chain() {
    auto t0 = Clock::now();
    FuchsianGroup G = octagon_group();
    double worst = 0.0;
    OperatorResolution res;
    res.n_r = 600;
    for (auto [z, K] : {std::pair{1.0, -1.0}, {0.5, -1.0}, {1.0, -4.0}}) {
        AttenuationParam p(Complex(z, 0.0), K);
        res.R = 40.0;

        SurfaceField one{[](const DiskPoint&) { return Complex(1.0, 0.0); }, 1.0, 0.0};
        Complex pi_val = surface_normal_op(one, p, DiskPoint(0.2, 0.1), G, res);
        worst = std::max(worst, std::abs(pi_val - 4.0 * kPi / p.z) / std::abs(4.0 * kPi / p.z));

        double s = p.curvature_scale();
        Complex s_val = s_op(constant_field(Complex(1.0, 0.0)), p, DiskPoint(0.1, 0.0), res);
        Complex s_want = 2.0 * kPi / (p.z + s);
        worst = std::max(worst, std::abs(s_val - s_want) / std::abs(s_want));

        Complex data = 4.0 * kPi / p.z;
        SurfaceField g{[data](const DiskPoint&) { return data; }, std::abs(data) + 1.0, 0.0};
        Complex rec = reconstruct_surface(g, p, DiskPoint(0.15, -0.1), G, res);
        worst = std::max(worst, std::abs(rec - Complex(1.0, 0.0)));
    }
    report(4, "constant-field chain (Pi_0, S_K, theorem 3)", worst, 1e-6, t0);
}

// 5. Theorem 2 end-to-end on the disk: radial bump, z = 0.5, 9 points.
void criterion_disk_end_to_end() {
    auto t0 = Clock::now();
    AttenuationParam p(Complex(0.5, 0.0), -1.0);
    auto profile = std::make_shared<RadialDataProfile>(
        disk_normal_data_profile(radial_bump(1.0), p.z, 22.0));
    ScalarField g = disk_data_field(profile);

    std::vector<DiskPoint> points = {DiskPoint()};
    for (int k = 0; k < 8; ++k) {
        double radius = (k % 2 == 0) ? 0.25 : 0.4;
        points.emplace_back(std::polar(radius, 0.25 * kPi * k + 0.1));
    }
    double worst = 0.0;
    for (const auto& q : points) {
        double f_true = bump_profile(distance_to_origin(q), 1.0);
        Complex rec = reconstruct_disk(g, p, q);
        worst = std::max(worst, std::abs(rec - Complex(f_true, 0.0)) / f_true);
    }
    report(5, "theorem 2 end-to-end (disk, z = 0.5)", worst, 1e-2, t0);
}

// 6. Theorem 3 end-to-end on the octagon surface, K = -1 and K = -4.
void criterion_surface_end_to_end() {
    auto t0 = Clock::now();
    FuchsianGroup G = octagon_group();
    DiskPoint center(0.12, 0.07);
    RadialFunction bump = radial_bump(1.0);
    SurfaceSynthesisConfig cfg;
    cfg.build_field_grids = false;

    std::vector<DiskPoint> points = {center, DiskPoint(0.2, 0.12), DiskPoint(0.05, 0.0),
                                     DiskPoint(0.28, -0.05), DiskPoint(0.02, 0.2)};
    double worst = 0.0;
    for (double K : {-1.0, -4.0}) {
        AttenuationParam p(Complex(0.5, 0.0), K);
        CurvatureScaling scal = rescale_to_unit_curvature(p);
        SurfaceData data = synthesize_surface_data(G, center, bump, {scal.unit.z}, false, cfg);
        for (const auto& q : points) {
            double f_true = bump_profile(distance(center, q), 1.0);
            Complex rec = reconstruct_surface(data, 0, p, q, G);
            worst = std::max(worst, std::abs(rec - Complex(f_true, 0.0)) / f_true);
        }
    }
    report(6, "theorem 3 end-to-end (octagon, K = -1, -4)", worst, 2e-2, t0);
}

// 7. Theorem 1 via z -> 0: mean-zero bump, Neville extrapolation.
void criterion_limit_study() {
    auto t0 = Clock::now();
    FuchsianGroup G = octagon_group();
    DiskPoint center(0.12, 0.07);
    SurfaceSynthesisConfig cfg;
    cfg.build_field_grids = false;
    SurfaceData data = synthesize_surface_data(
        G, center, radial_bump(1.0),
        {Complex(0.4, 0.0), Complex(0.2, 0.0), Complex(0.1, 0.0), Complex(0.05, 0.0)}, true,
        cfg);

    LimitStudyResult res = reconstruct_surface_limit(data, -1.0, center, G);
    double f_true = bump_profile(0.0, 1.0) - data.mean_f;
    double err = std::abs(res.value - Complex(f_true, 0.0)) / std::abs(f_true);
    bool monotone = true;
    for (std::size_t k = 2; k < res.diagonal.size(); ++k)
        monotone = monotone && std::abs(res.diagonal[k] - res.diagonal[k - 1]) <
                                   std::abs(res.diagonal[k - 1] - res.diagonal[k - 2]);
    report(7, "theorem 1 via z -> 0 (indicator monotone)", err, 5e-2, t0, monotone);
}

// 8. Lemma eps bounds (a) and (b) on 50 randomized fields each.
void criterion_lemma_bounds() {
    auto t0 = Clock::now();
    std::mt19937 rng(2718);
    auto uni = [&rng](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };
    AttenuationParam p(Complex(0.9, 0.0));
    OperatorResolution res;
    res.n_theta = 128;
    res.n_r = 400;
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        double C = uni(0.2, 3.0), k1 = uni(0.5, 6.0), k2 = uni(0.5, 6.0), ph = uni(0.0, 6.28);
        ScalarField f{[=](const DiskPoint& w) {
                          return Complex(C * std::sin(k1 * w.coord.real() +
                                                      k2 * w.coord.imag() + ph),
                                         0.0);
                      },
                      C, kInfiniteSupport};
        DiskPoint x(std::polar(uni(0.0, 0.5), uni(0.0, 2.0 * kPi)));
        Complex v = normal_op_attenuated(f, p, x, res);
        worst = std::max(worst, std::abs(v) / (4.0 * kPi / p.z.real() * C) - 1.0);
    }
    AttenuationParam pb(Complex(0.8, 0.0));
    OperatorResolution resb;
    resb.n_theta = 1024;
    resb.n_r = 400;
    for (int t = 0; t < 50; ++t) {
        double R = uni(0.8, 2.5), C = uni(0.5, 2.0);
        DiskPoint x(std::polar(uni(0.0, 0.2), uni(0.0, 2.0 * kPi)));
        DiskPoint c = geodesic_point(UnitTangent(x, uni(0.0, 2.0 * kPi)), R + 0.5);
        ScalarField f = bump_field(c, 0.5, C);
        Complex v = normal_op_attenuated(f, pb, x, resb);
        double bound = 4.0 * kPi / pb.z.real() * C * std::exp(-R * pb.z.real());
        worst = std::max(worst, std::abs(v) / bound - 1.0);
    }
    report(8, "lemma bounds (a), (b) on random fields", std::max(worst, 0.0), 1e-6, t0);
}

// 9. Covering commutation: lift independence across 3 lifts of 5 points.
void criterion_lift_independence() {
    auto t0 = Clock::now();
    FuchsianGroup G = octagon_group();
    SurfaceField fb = surface_bump_field(G, DiskPoint(0.12, 0.07), 1.0);
    AttenuationParam p(Complex(0.5, 0.0), -1.0);
    OperatorResolution res;
    res.n_theta = 64;
    res.R = 16.0;
    std::mt19937 rng(99);
    auto uni = [&rng](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        DiskPoint q(std::polar(uni(0.0, 0.7), uni(0.0, 2.0 * kPi)));
        Complex base = surface_normal_op(fb, p, q, G, res);
        for (int lift = 0; lift < 3; ++lift) {
            IsometryElement w = IsometryElement::identity();
            for (int k = 0; k <= lift; ++k)
                w = G.generators[rng() % G.generators.size()].compose(w);
            Complex v = surface_normal_op(fb, p, apply_isometry(w, q), G, res);
            worst = std::max(worst, std::abs(v - base) / (1.0 + std::abs(base)));
        }
    }
    report(9, "covering commutation: lift independence", worst, 1e-6, t0);
}

// 10. Symmetrization commutes with Pi_0^(z) at 10 points.
void criterion_symmetrization() {
    auto t0 = Clock::now();
    ScalarField f = bump_field(DiskPoint(0.25, 0.1), 0.8);
    AttenuationParam p(Complex(0.8, 0.0));
    OperatorResolution res;
    res.n_theta = 256;
    res.n_r = 320;
    ScalarField pi_f{[&](const DiskPoint& y) { return normal_op_attenuated(f, p, y, res); },
                     4.0 * kPi / p.z.real() * f.bound, kInfiniteSupport};
    ScalarField f_nat{[&](const DiskPoint& y) { return radial_symmetrize(f, y, 64); }, f.bound,
                      f.support_radius};
    std::mt19937 rng(5);
    auto uni = [&rng](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        DiskPoint x(std::polar(uni(0.0, 0.45), uni(0.0, 2.0 * kPi)));
        Complex lhs = radial_symmetrize(pi_f, x, 64);
        Complex rhs = normal_op_attenuated(f_nat, p, x, res);
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
    report(10, "symmetrization commutes with Pi_0^(z)", worst, 1e-6, t0);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_gamma_integral();
    criterion_product_identity();
    criterion_eigenvalue();
    criterion_constant_chain();
    criterion_disk_end_to_end();
    criterion_surface_end_to_end();
    criterion_limit_study();
    criterion_lemma_bounds();
    criterion_lift_independence();
    criterion_symmetrization();
    if (g_failures == 0) {
        std::printf("acceptance: all criteria PASS\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return 1;
}
