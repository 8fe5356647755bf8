#pragma once

// Field types shared by the transform and operator modules: radial functions
// of hyperbolic radius and complex-valued fields on the disk.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>

#include "hypxray/geometry.hpp"
#include "hypxray/numerics.hpp"

namespace hypxray {

inline constexpr double kInfiniteSupport = std::numeric_limits<double>::infinity();

// Function of hyperbolic radius r >= 0. support_radius marks where eval is
// exactly zero (or exponentially negligible for kernels).
struct RadialFunction {
    std::function<Complex(double)> eval;
    double support_radius = kInfiniteSupport;

    Complex operator()(double r) const { return eval(r); }
};

// Complex-valued field on the disk with a declared sup bound and a declared
// support radius (hyperbolic, about the origin). The bound is checked on
// sampled evaluations inside the operators.
struct ScalarField {
    std::function<Complex(const DiskPoint&)> eval;
    double bound = kInfiniteSupport;
    double support_radius = kInfiniteSupport;

    Complex operator()(const DiskPoint& p) const { return eval(p); }
};

inline ScalarField constant_field(Complex c) {
    return ScalarField{[c](const DiskPoint&) { return c; }, std::abs(c), kInfiniteSupport};
}

// C-infinity bump profile: amp * exp(1 - 1/(1 - (r/radius)^2)) for r < radius.
inline double bump_profile(double r, double radius, double amp = 1.0) {
    if (r >= radius) return 0.0;
    double s = r / radius;
    return amp * std::exp(1.0 - 1.0 / (1.0 - s * s));
}

inline RadialFunction radial_bump(double radius, double amp = 1.0) {
    return RadialFunction{[radius, amp](double r) { return Complex(bump_profile(r, radius, amp), 0.0); },
                          radius};
}

// Bump centered at c as a disk field; support declared about the origin.
inline ScalarField bump_field(const DiskPoint& c, double radius, double amp = 1.0) {
    Complex cc = c.coord;
    double support = distance_to_origin(c) + radius;
    return ScalarField{[cc, radius, amp](const DiskPoint& p) {
                           double r = distance(DiskPoint(cc), p);
                           return Complex(bump_profile(r, radius, amp), 0.0);
                       },
                       amp, support};
}

// Field given by a radial profile about the origin.
inline ScalarField radial_field(std::function<double(double)> profile, double bound,
                                double support_radius = kInfiniteSupport) {
    return ScalarField{[profile = std::move(profile)](const DiskPoint& p) {
                           return Complex(profile(distance_to_origin(p)), 0.0);
                       },
                       bound, support_radius};
}

}  // namespace hypxray
