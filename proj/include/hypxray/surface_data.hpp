#pragma once

// Synthesis of surface normal-operator data. The data of a periodized bump is
// the orbit sum of the single-bump disk profile,
//   Pi_0^(z)(pi^* f)(y) = Sum_{gamma} G0(d(y, gamma c)),
// truncated with a smooth radial cutoff. The cutoff's mean over the surface
// is removed and replaced by the exact constant contribution, which keeps the
// truncation error at the equidistribution-fluctuation level uniformly in z
// (the plain tail would decay only like e^{-z R}). Values are tabulated on a
// polar Fourier x Chebyshev grid and evaluated spectrally.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <memory>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "hypxray/surface.hpp"
#include "hypxray/synthesis.hpp"

namespace hypxray {

// Orbit of a base point under the group, sorted by distance from the origin.
struct OrbitPoints {
    std::vector<double> px, py;   // disk coordinates of gamma * c
    std::vector<double> inv;      // 1 / (1 - |p|^2)
    std::vector<double> rho;      // d(0, p), ascending
};

// Breadth-first enumeration of all gamma with d(0, gamma 0) <= R_word,
// recording gamma * c. Deduplication keys on the quantized coordinates of
// gamma 0; orbit points are separated by at least the systole, far above the
// quantum. The count is checked against the hyperbolic volume-growth estimate.
inline OrbitPoints enumerate_orbit(const FuchsianGroup& G, const DiskPoint& c, double R_word,
                                   double keep_rho_max) {
    auto key_of = [](Complex w) -> std::uint64_t {
        auto xi = static_cast<std::int64_t>(std::llround(w.real() * 1e8));
        auto yi = static_cast<std::int64_t>(std::llround(w.imag() * 1e8));
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(xi)) << 32) |
               static_cast<std::uint64_t>(static_cast<std::uint32_t>(yi));
    };
    const double max_abs = std::tanh(0.5 * R_word);

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(1u << 22);
    std::deque<IsometryElement> queue;
    std::vector<IsometryElement> kept;
    kept.reserve(1u << 20);

    IsometryElement id = IsometryElement::identity();
    seen.insert(key_of(Complex(0.0, 0.0)));
    queue.push_back(id);
    kept.push_back(id);

    while (!queue.empty()) {
        IsometryElement g = queue.front();
        queue.pop_front();
        for (const auto& a : G.generators) {
            IsometryElement h = a.compose(g);
            Complex h0 = h.b / std::conj(h.a);
            if (std::abs(h0) > max_abs) continue;
            if (!seen.insert(key_of(h0)).second) continue;
            queue.push_back(h);
            kept.push_back(h);
        }
    }
    seen.clear();

    double expected = std::pow(std::sinh(0.5 * R_word), 2);
    double ratio = static_cast<double>(kept.size()) / expected;
    if (ratio < 0.9 || ratio > 1.1)
        throw std::runtime_error("enumerate_orbit: count deviates from volume growth");

    std::vector<std::size_t> idx;
    std::vector<double> cx, cy, crho;
    cx.reserve(kept.size());
    cy.reserve(kept.size());
    crho.reserve(kept.size());
    for (const auto& g : kept) {
        DiskPoint p = apply_isometry(g, c);
        double rho = distance_to_origin(p);
        if (rho > keep_rho_max) continue;
        cx.push_back(p.coord.real());
        cy.push_back(p.coord.imag());
        crho.push_back(rho);
    }
    idx.resize(cx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return crho[i] < crho[j]; });

    OrbitPoints orbit;
    orbit.px.reserve(idx.size());
    orbit.py.reserve(idx.size());
    orbit.inv.reserve(idx.size());
    orbit.rho.reserve(idx.size());
    for (std::size_t i : idx) {
        orbit.px.push_back(cx[i]);
        orbit.py.push_back(cy[i]);
        orbit.inv.push_back(1.0 / (1.0 - (cx[i] * cx[i] + cy[i] * cy[i])));
        orbit.rho.push_back(crho[i]);
    }
    return orbit;
}

// C-infinity cutoff: 1 below start, 0 above end. Full smoothness matters:
// the interpolated far field inherits every kink of this weight along circles
// around each orbit point, and the reconstruction differentiates the result.
inline double lattice_cutoff(double d, double start, double end) {
    if (d <= start) return 1.0;
    if (d >= end) return 0.0;
    double s = (d - start) / (end - start);
    double a = std::exp(-1.0 / s);
    double b = std::exp(-1.0 / (1.0 - s));
    return b / (a + b);
}

// Truncated orbit sum of the radial data profile at one point.
inline Complex lattice_sum_at(const OrbitPoints& orbit, const RadialDataProfile& profile,
                              double chi_start, double chi_end, const DiskPoint& y) {
    const double yx = y.coord.real(), yy = y.coord.imag();
    const double inv_y = 1.0 / (1.0 - (yx * yx + yy * yy));
    const double r_y = distance_to_origin(y);
    const double cosh_cut = std::cosh(chi_end);

    auto hi = std::upper_bound(orbit.rho.begin(), orbit.rho.end(), chi_end + r_y + 1e-9);
    const std::size_t n = static_cast<std::size_t>(hi - orbit.rho.begin());

    Complex acc{};
    for (std::size_t i = 0; i < n; ++i) {
        double dx = yx - orbit.px[i];
        double dy = yy - orbit.py[i];
        double u = 1.0 + 2.0 * (dx * dx + dy * dy) * inv_y * orbit.inv[i];
        if (u > cosh_cut) continue;
        double d = std::acosh(std::max(1.0, u));
        double w = lattice_cutoff(d, chi_start, chi_end);
        if (w > 0.0) acc += w * profile(d);
    }
    return acc;
}

// Surface mean of the cutoff orbit sum: (2 pi / covol) Int G0 chi sinh, with
// covol = 4 pi for genus 2.
inline Complex lattice_sum_mean(const RadialDataProfile& profile, double chi_start,
                                double chi_end) {
    QuadratureRule rule = composite_gauss_legendre(10, 0.0, chi_end, 0.25);
    Complex integral{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double s = rule.nodes[i];
        integral += rule.weights[i] * profile(s) * lattice_cutoff(s, chi_start, chi_end) *
                    std::sinh(s);
    }
    return 0.5 * integral;
}

using SurfaceDataGrid = PolarGridInterpolant;

struct SurfaceSynthesisConfig {
    double chi_start = 10.0;  // smooth truncation of the orbit sum
    double chi_end = 12.5;
    double split_start = 3.0;  // orbit copies closer than this are summed exactly
    double split_end = 4.0;
    int grid_theta = 128;  // far-field interpolation grid
    int grid_r = 64;
    double r_pad = 2.9;  // interpolation radius; must exceed the vertex radius
    bool build_field_grids = true;  // skip when only the reconstruction is needed
};

// Data of one attenuation: the far field (interpolated) plus the exact sum
// over nearby orbit copies. The split keeps the interpolated part free of the
// sharp angular features that copies close to a sampling circle produce.
struct SurfaceDataField {
    std::shared_ptr<const OrbitPoints> orbit;
    std::shared_ptr<const RadialDataProfile> profile;
    std::shared_ptr<const SurfaceDataGrid> far_grid;
    double split_start = 0.0, split_end = 0.0;
    double bound = 0.0;

    Complex near_sum(const DiskPoint& y) const {
        const double yx = y.coord.real(), yy = y.coord.imag();
        const double inv_y = 1.0 / (1.0 - (yx * yx + yy * yy));
        const double r_y = distance_to_origin(y);
        const double cosh_cut = std::cosh(split_end);
        auto hi = std::upper_bound(orbit->rho.begin(), orbit->rho.end(),
                                   split_end + r_y + 1e-9);
        const std::size_t n = static_cast<std::size_t>(hi - orbit->rho.begin());
        Complex acc{};
        for (std::size_t i = 0; i < n; ++i) {
            double dx = yx - orbit->px[i];
            double dy = yy - orbit->py[i];
            double u = 1.0 + 2.0 * (dx * dx + dy * dy) * inv_y * orbit->inv[i];
            if (u > cosh_cut) continue;
            double d = std::acosh(std::max(1.0, u));
            double w = lattice_cutoff(d, split_start, split_end);
            if (w > 0.0) acc += w * (*profile)(d);
        }
        return acc;
    }

    Complex operator()(const DiskPoint& y) const { return near_sum(y) + far_grid->eval(y); }
};

struct SurfaceData {
    std::shared_ptr<const OrbitPoints> orbit;
    std::vector<Complex> z_values;  // unit-curvature attenuations z~

    // Per z: single-copy data profile G0 and the constant offset B, so the
    // exact data value is Sum_p chi(d) G0(d(y,p)) + B.
    std::vector<std::shared_ptr<const RadialDataProfile>> profiles;
    std::vector<Complex> offsets;

    // Per z: everything needed to evaluate S^(z~) g as a lattice sum.
    // s_profile holds Pi_0^{(z~+1)}[chi G0] (so S of one data copy is half of
    // it), s_const collects the exactly smoothed constant modes:
    //   S g (x) = 0.5 * [ Sum_p s_profile(d(x,p)) chi2(d) - mu2 ] + s_const.
    std::vector<std::shared_ptr<const RadialDataProfile>> s_profiles;
    std::vector<Complex> s_mu2;
    std::vector<Complex> s_consts;
    double chi_start = 0.0, chi_end = 0.0;

    // Interpolated data fields (near/far split); built unless skipped.
    std::vector<SurfaceDataField> fields;

    bool mean_zero = false;  // data of (f - mean f) rather than of f
    double mean_f = 0.0;     // surface mean of the periodized bump
    std::size_t orbit_count = 0;

    // Exact (uninterpolated) data value; the reference the fields are built from.
    Complex data_value(std::size_t zi, const DiskPoint& y) const {
        return lattice_sum_at(*orbit, *profiles[zi], chi_start, chi_end, y) + offsets[zi];
    }
};

inline SurfaceField surface_field_from_data(const SurfaceDataField& f) {
    return SurfaceField{[f](const DiskPoint& p) { return f(p); }, f.bound, 0.0};
}

// S^(z~) applied to the synthesized data, with the smoothing integral
// exchanged against the orbit sum: every term is an explicit smooth radial
// profile, so the result is free of ray-quadrature noise and safe to
// differentiate. Exact for the constant modes.
inline Complex s_of_surface_data(const SurfaceData& data, std::size_t zi, const DiskPoint& x) {
    const OrbitPoints& orbit = *data.orbit;
    const RadialDataProfile& sp = *data.s_profiles[zi];

    const double yx = x.coord.real(), yy = x.coord.imag();
    const double inv_y = 1.0 / (1.0 - (yx * yx + yy * yy));
    const double r_y = distance_to_origin(x);
    const double cosh_cut = std::cosh(data.chi_end);
    auto hi = std::upper_bound(orbit.rho.begin(), orbit.rho.end(), data.chi_end + r_y + 1e-9);
    const std::size_t n = static_cast<std::size_t>(hi - orbit.rho.begin());

    Complex acc{};
    for (std::size_t i = 0; i < n; ++i) {
        double dx = yx - orbit.px[i];
        double dy = yy - orbit.py[i];
        double u = 1.0 + 2.0 * (dx * dx + dy * dy) * inv_y * orbit.inv[i];
        if (u > cosh_cut) continue;
        double d = std::acosh(std::max(1.0, u));
        double w = lattice_cutoff(d, data.chi_start, data.chi_end);
        if (w > 0.0) acc += w * sp(d);
    }
    return 0.5 * (acc - data.s_mu2[zi]) + data.s_consts[zi];
}

// Theorem-3 reconstruction from synthesized data, K-rescaled per Lemma norm.
// S is applied through s_of_surface_data; the Laplacian stencil then acts on
// an explicit smooth function.
inline Complex reconstruct_surface(const SurfaceData& data, std::size_t zi,
                                   const AttenuationParam& p, const DiskPoint& q,
                                   const FuchsianGroup& G, const OperatorResolution& res = {}) {
    double scale = p.curvature_scale();
    Complex zt = p.z / scale;
    if (std::abs(zt - data.z_values[zi]) > 1e-12)
        throw std::invalid_argument("reconstruct_surface: attenuation mismatch with data");
    double pi_factor = rescale_to_unit_curvature(p).pi_factor;

    auto S = [&](const DiskPoint& y) { return pi_factor * s_of_surface_data(data, zi, y); };
    DiskPoint q0 = reduce_to_fundamental(q, G).first;
    const double h = res.h;
    const Complex c = q0.coord;
    Complex lap_sum = S(DiskPoint(c + h)) + S(DiskPoint(c - h)) +
                      S(DiskPoint(c + Complex(0.0, h))) + S(DiskPoint(c - Complex(0.0, h))) -
                      4.0 * S(q0);
    double conf = 1.0 - std::norm(c);
    Complex lap = 0.25 * conf * conf * lap_sum / (h * h);
    Complex Lval = lap - zt * (zt + 1.0) * S(q0);
    return -scale * Lval / (8.0 * kPi * kPi);
}

// Data of Pi_0^(z) applied to the periodization of a radial bump about
// `center`, at unit curvature, for each z. The orbit sum is truncated with a
// smooth cutoff whose surface mean is removed and replaced by the exact
// constant mode: with mean_zero set the result is the data of (f - mean f),
// otherwise the constant contribution mean_f * 4 pi / z is added back.
inline SurfaceData synthesize_surface_data(const FuchsianGroup& G, const DiskPoint& center,
                                           const RadialFunction& bump,
                                           const std::vector<Complex>& zs, bool mean_zero,
                                           const SurfaceSynthesisConfig& cfg = {}) {
    if (!(bump.support_radius < kInfiniteSupport))
        throw std::invalid_argument("synthesize_surface_data: bump must have compact support");
    for (Complex z : zs)
        if (!(z.real() > 0.0))
            throw std::invalid_argument("synthesize_surface_data: need Re z > 0");

    const double r_c = distance_to_origin(center);
    const double R_word = cfg.chi_end + cfg.r_pad + r_c + 0.2;
    auto orbit = std::make_shared<OrbitPoints>(
        enumerate_orbit(G, center, R_word, cfg.chi_end + cfg.r_pad + 0.1));

    SurfaceData out;
    out.orbit = orbit;
    out.z_values = zs;
    out.mean_zero = mean_zero;
    out.orbit_count = orbit->rho.size();

    // Surface mean of the periodized bump: bump mass / covolume (= 4 pi).
    QuadratureRule mass_rule = composite_gauss_legendre(12, 0.0, bump.support_radius, 0.2);
    Complex mass{};
    for (std::size_t i = 0; i < mass_rule.nodes.size(); ++i)
        mass += mass_rule.weights[i] * bump(mass_rule.nodes[i]) *
                std::sinh(mass_rule.nodes[i]);
    mass *= 2.0 * kPi;
    out.mean_f = (mass / (4.0 * kPi)).real();

    out.chi_start = cfg.chi_start;
    out.chi_end = cfg.chi_end;

    for (Complex z : zs) {
        auto prof = std::make_shared<RadialDataProfile>(
            disk_normal_data_profile(bump, z, cfg.chi_end + 0.3));
        Complex mu = lattice_sum_mean(*prof, cfg.chi_start, cfg.chi_end);
        Complex off = -mu;
        if (!mean_zero) off += mass / (4.0 * kPi) * (4.0 * kPi / z);
        out.profiles.push_back(prof);
        out.offsets.push_back(off);

        // S-smoothed single-copy profile Pi_0^{(z+1)}[chi G0] and the exactly
        // smoothed constant modes of the data.
        RadialFunction W = weighted_profile_function(
            prof, [s = cfg.chi_start, e = cfg.chi_end](double d) { return lattice_cutoff(d, s, e); },
            cfg.chi_end);
        auto sprof = std::make_shared<RadialDataProfile>(
            disk_normal_data_profile(W, z + 1.0, cfg.chi_end + 0.3));
        out.s_profiles.push_back(std::move(sprof));
        out.s_mu2.push_back(lattice_sum_mean(*out.s_profiles.back(), cfg.chi_start, cfg.chi_end));
        out.s_consts.push_back((mu + off) * 2.0 * kPi / (z + 1.0));
    }
    if (!cfg.build_field_grids) return out;

    const auto& profiles = out.profiles;
    const auto& offsets = out.offsets;

    // One distance pass per grid node, shared by all z; far weights only.
    const double cosh_cut = std::cosh(cfg.chi_end);
    const int n_theta = cfg.grid_theta, n_r = cfg.grid_r;
    std::vector<std::vector<Complex>> values(zs.size());
    for (auto& v : values) v.assign(static_cast<std::size_t>(n_theta) * n_r, Complex{});
    std::vector<double> near_sup(zs.size(), 0.0);

    for (int j = 0; j < n_theta; ++j) {
        double theta = SurfaceDataGrid::node_theta(j, n_theta);
        for (int i = 0; i < n_r; ++i) {
            double r = SurfaceDataGrid::node_r(i, n_r, cfg.r_pad);
            DiskPoint y(std::polar(std::tanh(0.5 * r), theta));
            const double yx = y.coord.real(), yy = y.coord.imag();
            const double inv_y = 1.0 / (1.0 - (yx * yx + yy * yy));

            auto hi = std::upper_bound(orbit->rho.begin(), orbit->rho.end(),
                                       cfg.chi_end + r + 1e-9);
            const std::size_t n_cand = static_cast<std::size_t>(hi - orbit->rho.begin());

            std::vector<Complex> near_acc(zs.size());
            for (std::size_t t = 0; t < n_cand; ++t) {
                double dx = yx - orbit->px[t];
                double dy = yy - orbit->py[t];
                double u = 1.0 + 2.0 * (dx * dx + dy * dy) * inv_y * orbit->inv[t];
                if (u > cosh_cut) continue;
                double d = std::acosh(std::max(1.0, u));
                double w_far = lattice_cutoff(d, cfg.chi_start, cfg.chi_end) -
                               lattice_cutoff(d, cfg.split_start, cfg.split_end);
                double w_near = lattice_cutoff(d, cfg.split_start, cfg.split_end);
                for (std::size_t zi = 0; zi < zs.size(); ++zi) {
                    Complex gv = (*profiles[zi])(d);
                    if (w_far != 0.0)
                        values[zi][static_cast<std::size_t>(j) * n_r + i] += w_far * gv;
                    if (w_near != 0.0) near_acc[zi] += w_near * gv;
                }
            }
            for (std::size_t zi = 0; zi < zs.size(); ++zi) {
                values[zi][static_cast<std::size_t>(j) * n_r + i] += offsets[zi];
                near_sup[zi] = std::max(near_sup[zi], std::abs(near_acc[zi]));
            }
        }
    }

    for (std::size_t zi = 0; zi < zs.size(); ++zi) {
        SurfaceDataField f;
        f.orbit = orbit;
        f.profile = profiles[zi];
        f.far_grid = std::make_shared<SurfaceDataGrid>(
            SurfaceDataGrid::build_from_values(n_theta, n_r, cfg.r_pad, values[zi]));
        f.split_start = cfg.split_start;
        f.split_end = cfg.split_end;
        f.bound = (f.far_grid->sup() + near_sup[zi]) * 1.5 + 1e-9;
        out.fields.push_back(std::move(f));
    }
    return out;
}

// Radial bump about a center inside the fundamental domain, as a surface
// field (optionally shifted by a constant, for mean-zero inputs).
// z -> 0 limit from synthesized mean-zero data: reconstruct at every stored
// attenuation and extrapolate to zero. The divergent constant mode of
// Pi_0^(z) is absent from mean-zero data, which is what makes the limit
// finite; non-mean-zero data is rejected.
inline LimitStudyResult reconstruct_surface_limit(const SurfaceData& data, double K,
                                                  const DiskPoint& q, const FuchsianGroup& G,
                                                  const OperatorResolution& res = {}) {
    if (!data.mean_zero)
        throw std::invalid_argument(
            "reconstruct_surface_limit: data must be synthesized for a mean-zero input");
    if (data.z_values.size() < 3)
        throw std::invalid_argument("reconstruct_surface_limit: need >= 3 attenuations");
    double scale = std::sqrt(-K);
    LimitStudyResult out;
    for (std::size_t i = 0; i < data.z_values.size(); ++i) {
        Complex z = data.z_values[i] * scale;
        Complex rec = reconstruct_surface(data, i, AttenuationParam(z, K), q, G, res);
        out.per_z.emplace_back(z.real(), rec);
    }
    ExtrapolationResult ex = extrapolate_to_zero(out.per_z);
    out.value = ex.value;
    out.error_indicator = ex.error_indicator;
    out.diagonal = ex.diagonal;
    return out;
}

// Radial bump about a center inside the fundamental domain, as a surface
// field (optionally shifted by a constant, for mean-zero inputs).
inline SurfaceField surface_bump_field(const FuchsianGroup& G, const DiskPoint& center,
                                       double radius, double amp = 1.0, double shift = 0.0) {
    double margin = G.edge_midpoint_radius - distance_to_origin(center) - radius;
    Complex cc = center.coord;
    return SurfaceField{[cc, radius, amp, shift](const DiskPoint& p) {
                            return Complex(bump_profile(distance(DiskPoint(cc), p), radius, amp) -
                                               shift,
                                           0.0);
                        },
                        amp + std::abs(shift), margin};
}

}  // namespace hypxray
