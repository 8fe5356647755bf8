#pragma once

// Poincare disk model: points, SU(1,1) isometries acting by Mobius maps,
// hyperbolic distance, geodesics via conjugation to the origin, and uniform
// quadrature nodes on unit-tangent fibers.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hypxray/numerics.hpp"

namespace hypxray {

// Point of the open unit disk. Construction rejects |w| >= 1 - 1e-12: the
// conformal factor blows up there and downstream quadratures lose accuracy.
struct DiskPoint {
    Complex coord;

    DiskPoint() : coord(0.0, 0.0) {}
    explicit DiskPoint(Complex w) : coord(w) {
        if (!(std::abs(w) < 1.0 - 1e-12))
            throw std::invalid_argument("DiskPoint: |w| too close to 1");
    }
    DiskPoint(double x, double y) : DiskPoint(Complex(x, y)) {}
};

// Element (a, b) of SU(1,1) acting by w -> (a w + b) / (conj(b) w + conj(a)).
// Kept normalized to |a|^2 - |b|^2 = 1; compose() renormalizes to control
// drift in long words.
struct IsometryElement {
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};

    static IsometryElement identity() { return {}; }

    // Translation by hyperbolic distance s along the direction angle theta.
    static IsometryElement translation(double s, double theta = 0.0) {
        Complex u = std::polar(1.0, theta);
        return IsometryElement{Complex(std::cosh(0.5 * s), 0.0), u * std::sinh(0.5 * s)};
    }

    static IsometryElement rotation(double alpha) {
        return IsometryElement{std::polar(1.0, 0.5 * alpha), Complex(0.0, 0.0)};
    }

    double det_defect() const {
        return std::norm(a) - std::norm(b) - 1.0;
    }

    IsometryElement inverse() const { return IsometryElement{std::conj(a), -b}; }

    IsometryElement compose(const IsometryElement& g) const {
        // Matrix product [[a,b],[conj b, conj a]] * [[g.a, g.b], ...].
        IsometryElement r;
        r.a = a * g.a + b * std::conj(g.b);
        r.b = a * g.b + b * std::conj(g.a);
        double n = std::norm(r.a) - std::norm(r.b);
        if (!(n > 0.0)) throw std::runtime_error("IsometryElement: degenerate composition");
        double s = 1.0 / std::sqrt(n);
        r.a *= s;
        r.b *= s;
        return r;
    }
};

inline DiskPoint apply_isometry(const IsometryElement& g, const DiskPoint& p) {
    Complex den = std::conj(g.b) * p.coord + std::conj(g.a);
    if (std::abs(den) < 1e-300)
        throw std::runtime_error("apply_isometry: vanishing denominator");
    return DiskPoint((g.a * p.coord + g.b) / den);
}

// Angle increment a Mobius map applies to tangent directions at p:
// arg g'(p) = -2 arg(conj(b) p + conj(a)) for a normalized element.
inline double isometry_angle_shift(const IsometryElement& g, const DiskPoint& p) {
    return -2.0 * std::arg(std::conj(g.b) * p.coord + std::conj(g.a));
}

inline double distance(const DiskPoint& p, const DiskPoint& q) {
    double num = 2.0 * std::norm(p.coord - q.coord);
    double den = (1.0 - std::norm(p.coord)) * (1.0 - std::norm(q.coord));
    double c = 1.0 + num / den;
    // Guard against rounding slightly below 1 when p == q.
    return std::acosh(std::max(1.0, c));
}

inline double distance_to_origin(const DiskPoint& p) {
    return 2.0 * std::atanh(std::abs(p.coord));
}

// Unit tangent vector: base point plus direction angle in [0, 2pi).
struct UnitTangent {
    DiskPoint base;
    double angle = 0.0;

    UnitTangent() = default;
    UnitTangent(DiskPoint p, double theta) : base(p) {
        angle = std::fmod(theta, 2.0 * kPi);
        if (angle < 0.0) angle += 2.0 * kPi;
    }
};

// Isometry carrying p to the origin: w -> (w - p) / (1 - conj(p) w).
inline IsometryElement translate_to_origin(const DiskPoint& p) {
    double s = 1.0 / std::sqrt(1.0 - std::norm(p.coord));
    IsometryElement g;
    g.a = Complex(s, 0.0);
    g.b = -p.coord * s;
    return g;
}

// Point at arc-length t along the geodesic with initial condition x.
// Conjugate to the origin, where geodesics are diameters tanh(t/2) e^{i theta}.
inline DiskPoint geodesic_point(const UnitTangent& x, double t) {
    IsometryElement to0 = translate_to_origin(x.base);
    double theta0 = x.angle + isometry_angle_shift(to0, x.base);
    DiskPoint q(std::polar(std::tanh(0.5 * t), theta0));
    return apply_isometry(to0.inverse(), q);
}

// Like geodesic_point but for integrand sampling: beyond the coordinate
// horizon (t ~ 28 the endpoint is within 1e-12 of the unit circle) the sample
// is pulled back onto the representable disk along the same ray. The callers
// weight tails by e^{-z t}, so bounded integrands cannot tell the difference.
inline DiskPoint geodesic_sample(const UnitTangent& x, double t) {
    IsometryElement to0 = translate_to_origin(x.base);
    double theta0 = x.angle + isometry_angle_shift(to0, x.base);
    Complex q = std::polar(std::tanh(0.5 * t), theta0);
    IsometryElement back = to0.inverse();
    Complex w = (back.a * q + back.b) / (std::conj(back.b) * q + std::conj(back.a));
    double aw = std::abs(w);
    const double rmax = 1.0 - 4e-12;
    if (aw >= rmax) w *= rmax / aw;
    return DiskPoint(w);
}

// Geodesic flow for time t: both the endpoint and the transported direction.
inline UnitTangent geodesic_flow(const UnitTangent& x, double t) {
    IsometryElement to0 = translate_to_origin(x.base);
    double theta0 = x.angle + isometry_angle_shift(to0, x.base);
    DiskPoint q(std::polar(std::tanh(0.5 * t), theta0));
    IsometryElement back = to0.inverse();
    DiskPoint end = apply_isometry(back, q);
    double angle = theta0 + isometry_angle_shift(back, q);
    return UnitTangent(end, angle);
}

// n equally spaced fiber directions with equal weights summing to 2*pi.
inline std::vector<std::pair<UnitTangent, double>> fiber_nodes(const DiskPoint& x, int n) {
    if (n < 4) throw std::invalid_argument("fiber_nodes: need n >= 4");
    std::vector<std::pair<UnitTangent, double>> nodes;
    nodes.reserve(static_cast<std::size_t>(n));
    const double w = 2.0 * kPi / n;
    for (int j = 0; j < n; ++j)
        nodes.emplace_back(UnitTangent(x, w * j), w);
    return nodes;
}

}  // namespace hypxray
