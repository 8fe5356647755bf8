#pragma once

// Closed hyperbolic surfaces as Fuchsian quotients of the disk: the genus-2
// regular-octagon group, Dirichlet-domain reduction, pullbacks, surface
// operators evaluated by lifting (covering maps commute with Pi_0^(z)),
// curvature rescaling, and the Theorem-3 / z->0 reconstruction drivers.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hypxray/fields.hpp"
#include "hypxray/geometry.hpp"
#include "hypxray/numerics.hpp"
#include "hypxray/xray_disk.hpp"

namespace hypxray {

// Cocompact surface group given by side pairings of a regular octagon
// centered at the origin (opposite sides identified; genus 2).
struct FuchsianGroup {
    std::vector<IsometryElement> generators;  // 4 pairings followed by their inverses
    double vertex_radius = 0.0;
    double edge_midpoint_radius = 0.0;

    DiskPoint vertex(int j) const {
        return DiskPoint(std::polar(std::tanh(0.5 * vertex_radius), (2 * j + 1) * kPi / 8.0));
    }

    // Hyperbolic radius of the octagon boundary in direction theta.
    double boundary_radius(double theta) const {
        double t = std::remainder(theta, kPi / 4.0);
        return std::atanh(std::tanh(edge_midpoint_radius) / std::cos(t));
    }
};

// Regular-octagon group: vertices at arccosh(cot^2(pi/8)), opposite-side
// pairing translations through the edge midpoints. Construction verifies the
// side pairings, hyperbolicity, and the surface-group relator, and refuses to
// return a group that fails any check.
inline FuchsianGroup octagon_group() {
    FuchsianGroup G;
    G.edge_midpoint_radius = std::acosh(1.0 / std::tan(kPi / 8.0));
    G.vertex_radius = std::acosh(std::pow(1.0 / std::tan(kPi / 8.0), 2));

    std::vector<IsometryElement> pair;
    for (int k = 0; k < 4; ++k)
        pair.push_back(IsometryElement::rotation(k * kPi / 4.0)
                           .compose(IsometryElement::translation(2.0 * G.edge_midpoint_radius))
                           .compose(IsometryElement::rotation(-k * kPi / 4.0)));
    G.generators = pair;
    for (int k = 0; k < 4; ++k) G.generators.push_back(pair[static_cast<std::size_t>(k)].inverse());

    for (const auto& g : G.generators)
        if (!(std::abs(2.0 * g.a.real()) > 2.0))
            throw std::runtime_error("octagon_group: generator not hyperbolic");

    // Pairing g_k carries side k+4 onto side k (endpoints swap orientation).
    for (int k = 0; k < 4; ++k) {
        DiskPoint a = apply_isometry(pair[static_cast<std::size_t>(k)], G.vertex(k + 3));
        DiskPoint b = apply_isometry(pair[static_cast<std::size_t>(k)], G.vertex(k + 4));
        double err = std::abs(a.coord - G.vertex(k).coord) +
                     std::abs(b.coord - G.vertex((k + 7) % 8).coord);
        if (err > 1e-9) throw std::runtime_error("octagon_group: side pairing check failed");
    }

    // Relator g0 g1^-1 g2 g3^-1 g0^-1 g1 g2^-1 g3 = +-identity.
    static const int order[8] = {0, 5, 2, 7, 4, 1, 6, 3};
    IsometryElement P = IsometryElement::identity();
    for (int idx : order) P = P.compose(G.generators[static_cast<std::size_t>(idx)]);
    double d1 = std::abs(P.a - Complex(1.0, 0.0)) + std::abs(P.b);
    double d2 = std::abs(P.a + Complex(1.0, 0.0)) + std::abs(P.b);
    if (std::min(d1, d2) > 1e-7)
        throw std::runtime_error("octagon_group: relator check failed");
    return G;
}

// Greedy Dirichlet-domain reduction: repeatedly apply whichever generator
// most decreases |.| until none does. Returns the reduced point and the
// group element realizing it.
inline std::pair<DiskPoint, IsometryElement> reduce_to_fundamental(const DiskPoint& p,
                                                                   const FuchsianGroup& G) {
    DiskPoint cur = p;
    IsometryElement acc = IsometryElement::identity();
    for (int step = 0; step < 10000; ++step) {
        double best = std::norm(cur.coord) - 1e-16;
        int best_idx = -1;
        Complex best_coord{};
        for (std::size_t i = 0; i < G.generators.size(); ++i) {
            const auto& g = G.generators[i];
            Complex w = (g.a * cur.coord + g.b) / (std::conj(g.b) * cur.coord + std::conj(g.a));
            double n = std::norm(w);
            if (n < best) {
                best = n;
                best_idx = static_cast<int>(i);
                best_coord = w;
            }
        }
        if (best_idx < 0) return {cur, acc};
        acc = G.generators[static_cast<std::size_t>(best_idx)].compose(acc);
        cur = DiskPoint(best_coord);
    }
    throw std::runtime_error("reduce_to_fundamental: no convergence (invalid group?)");
}

// Same reduction applied to a unit tangent (direction transported along).
inline UnitTangent reduce_tangent(const UnitTangent& u, const FuchsianGroup& G) {
    auto [q, g] = reduce_to_fundamental(u.base, G);
    double angle = u.angle + isometry_angle_shift(g, u.base);
    return UnitTangent(q, angle);
}

// Function on the quotient surface, given on the fundamental domain.
struct SurfaceField {
    std::function<Complex(const DiskPoint&)> eval_on_domain;
    double bound = kInfiniteSupport;
    double smooth_margin = 0.0;

    Complex operator()(const DiskPoint& reduced) const { return eval_on_domain(reduced); }
};

// pi^* f: the Gamma-periodic lift, evaluated by reducing the argument.
inline ScalarField pullback_field(const SurfaceField& f, const FuchsianGroup& G) {
    return ScalarField{[f, G](const DiskPoint& p) {
                           return f(reduce_to_fundamental(p, G).first);
                       },
                       f.bound, kInfiniteSupport};
}

// Attenuated ray functional on the quotient,
//   2 * Int_{fiber} Int_0^R e^{-z t} u(gamma(t)) dt,
// walked in short panels with the running tangent reduced into the domain
// after every panel. Points handed to u are always reduced. Stable for ray
// horizons far beyond what disk coordinates can represent from a fixed chart.
inline Complex quotient_ray_integral(const std::function<Complex(const DiskPoint&)>& u,
                                     const FuchsianGroup& G, Complex z, const DiskPoint& x,
                                     int n_theta, double R, double panel_len = 0.5,
                                     int nodes_per_panel = 8) {
    QuadratureRule base = gauss_legendre(nodes_per_panel, 0.0, 1.0);
    // Fibers start at a canonical angle at the reduced point, so Gamma-
    // equivalent base points produce identical node sets (lift independence
    // holds to reduction rounding, not just to quadrature error).
    DiskPoint x0 = reduce_to_fundamental(x, G).first;
    Complex fiber_sum{};
    const double w_theta = 2.0 * kPi / n_theta;
    for (int j = 0; j < n_theta; ++j) {
        UnitTangent cur(x0, w_theta * j);
        Complex ray{};
        double t0 = 0.0;
        while (t0 < R - 1e-12) {
            double dt = std::min(panel_len, R - t0);
            for (std::size_t i = 0; i < base.nodes.size(); ++i) {
                double s = dt * base.nodes[i];
                DiskPoint y = reduce_to_fundamental(geodesic_point(cur, s), G).first;
                ray += dt * base.weights[i] * std::exp(-z * (t0 + s)) * u(y);
            }
            cur = reduce_tangent(geodesic_flow(cur, dt), G);
            t0 += dt;
        }
        fiber_sum += w_theta * ray;
    }
    return 2.0 * fiber_sum;
}

// Pi_0^(z) on the surface, evaluated through the covering: the integrand is
// the pullback, the base point its own reduced lift.
inline Complex surface_normal_op(const SurfaceField& f, const AttenuationParam& p,
                                 const DiskPoint& q, const FuchsianGroup& G,
                                 const OperatorResolution& res = {}) {
    if (!(p.z.real() > 0.0)) throw std::invalid_argument("surface_normal_op: need Re z > 0");
    double scale = p.curvature_scale();
    Complex zt = p.z / scale;
    double R = res.R > 0.0 ? res.R
                           : std::min(truncation_radius(zt, std::max(f.bound, 1.0),
                                                        1e-10 * std::max(f.bound, 1.0)),
                                      40.0);
    Complex val = quotient_ray_integral(f.eval_on_domain, G, zt, q, res.n_theta, R);
    return val / scale;
}

// Lemma-norm rescaling to curvature -1: z~ = z / sqrt(-K) together with the
// operator prefactors Pi_0^(z) = pi_factor * Pi~, S_K = s_factor * S~,
// L_K = l_factor * L~.
struct CurvatureScaling {
    AttenuationParam unit;  // z~ with K = -1
    double pi_factor = 1.0;
    double s_factor = 1.0;
    double l_factor = 1.0;
};

inline CurvatureScaling rescale_to_unit_curvature(const AttenuationParam& p) {
    if (!(p.K < 0.0)) throw std::invalid_argument("rescale_to_unit_curvature: need K < 0");
    double s = p.curvature_scale();
    CurvatureScaling c;
    c.unit = AttenuationParam(p.z / s, -1.0);
    c.pi_factor = 1.0 / s;
    c.s_factor = 1.0 / s;
    c.l_factor = -p.K;
    return c;
}

// Integral of f over the octagon (and the domain area) by polar quadrature
// with the exact boundary radius per sector.
inline std::pair<Complex, double> surface_integral(const SurfaceField& f, const FuchsianGroup& G,
                                                   int n_theta_per_sector = 24,
                                                   int n_r = 32) {
    Complex integral{};
    double area = 0.0;
    for (int k = 0; k < 8; ++k) {
        double th_lo = k * kPi / 4.0 - kPi / 8.0;
        QuadratureRule th_rule = gauss_legendre(n_theta_per_sector, th_lo, th_lo + kPi / 4.0);
        for (std::size_t jt = 0; jt < th_rule.nodes.size(); ++jt) {
            double th = th_rule.nodes[jt];
            double redge = G.boundary_radius(th);
            QuadratureRule r_rule = gauss_legendre(n_r, 0.0, redge);
            Complex acc{};
            double acc_area = 0.0;
            for (std::size_t ir = 0; ir < r_rule.nodes.size(); ++ir) {
                double r = r_rule.nodes[ir];
                double jac = std::sinh(r);
                DiskPoint pt(std::polar(std::tanh(0.5 * r), th));
                acc += r_rule.weights[ir] * jac * f(pt);
                acc_area += r_rule.weights[ir] * jac;
            }
            integral += th_rule.weights[jt] * acc;
            area += th_rule.weights[jt] * acc_area;
        }
    }
    return {integral, area};
}

inline Complex surface_mean(const SurfaceField& f, const FuchsianGroup& G,
                            int n_theta_per_sector = 24, int n_r = 32) {
    auto [integral, area] = surface_integral(f, G, n_theta_per_sector, n_r);
    return integral / area;
}

// Theorem-3 reconstruction: given surface data g = Pi_0^(z) f, returns
//   -(8 pi^2)^{-1} L_K^(z) S_K^(z) g (q).
// For K != -1 everything is computed on the unit-curvature model via the
// Lemma-norm prefactors, which collapse to an overall factor sqrt(-K).
inline Complex reconstruct_surface(const SurfaceField& g, const AttenuationParam& p,
                                   const DiskPoint& q, const FuchsianGroup& G,
                                   const OperatorResolution& res = {}) {
    if (!(p.z.real() > 0.0)) throw std::invalid_argument("reconstruct_surface: need Re z > 0");
    double scale = p.curvature_scale();
    Complex zt = p.z / scale;
    Complex z_s = zt + 1.0;  // attenuation inside S~ on the unit-curvature disk

    double C = std::max(g.bound, 1.0);
    double R = res.R > 0.0 ? res.R : std::min(truncation_radius(z_s, C, 1e-9 * C), 40.0);

    auto cache = std::make_shared<std::map<std::pair<double, double>, Complex>>();
    auto Sg = [&g, &G, z_s, R, res, cache](const DiskPoint& y) {
        auto key = std::make_pair(y.coord.real(), y.coord.imag());
        auto it = cache->find(key);
        if (it != cache->end()) return it->second;
        Complex v = 0.5 * quotient_ray_integral(g.eval_on_domain, G, z_s, y, res.n_theta, R);
        cache->emplace(key, v);
        return v;
    };

    DiskPoint q0 = reduce_to_fundamental(q, G).first;
    double h = res.h;
    const Complex c = q0.coord;
    Complex lap_sum = Sg(DiskPoint(c + h)) + Sg(DiskPoint(c - h)) +
                      Sg(DiskPoint(c + Complex(0.0, h))) + Sg(DiskPoint(c - Complex(0.0, h))) -
                      4.0 * Sg(q0);
    double conf = 1.0 - std::norm(c);
    Complex lap = 0.25 * conf * conf * lap_sum / (h * h);
    Complex Lval = lap - zt * (zt + 1.0) * Sg(q0);
    return -scale * Lval / (8.0 * kPi * kPi);
}

// z -> 0 limit of the attenuated reconstruction (Theorem 1): evaluate the
// Theorem-3 pipeline for each z in z_list and extrapolate the samples to 0.
// The data provider must supply Pi_0^(z) data of a mean-zero function.
struct LimitStudyResult {
    Complex value{};
    double error_indicator = 0.0;
    std::vector<Complex> diagonal;
    std::vector<std::pair<double, Complex>> per_z;
};

inline LimitStudyResult reconstruct_surface_limit(
    const std::function<SurfaceField(double)>& data_provider, double K, const DiskPoint& q,
    const FuchsianGroup& G, const std::vector<double>& z_list,
    const OperatorResolution& res = {}) {
    if (z_list.size() < 3)
        throw std::invalid_argument("reconstruct_surface_limit: need >= 3 z values");
    LimitStudyResult out;
    for (double z : z_list) {
        if (!(z > 0.0 && z <= 0.5))
            throw std::invalid_argument("reconstruct_surface_limit: z_list must lie in (0, 0.5]");
        SurfaceField g = data_provider(z);
        Complex rec = reconstruct_surface(g, AttenuationParam(Complex(z, 0.0), K), q, G, res);
        out.per_z.emplace_back(z, rec);
    }
    ExtrapolationResult ex = extrapolate_to_zero(out.per_z);
    out.value = ex.value;
    out.error_indicator = ex.error_indicator;
    out.diagonal = ex.diagonal;
    return out;
}

}  // namespace hypxray
