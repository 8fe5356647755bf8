#pragma once

// Spherical functions phi_lambda on the disk, the spherical transform of
// radial functions, radial symmetrization, and the closed-form transforms of
// the smoothing kernels tau^(z), sigma^(z).

#include <cmath>
#include <complex>
#include <stdexcept>

#include "hypxray/fields.hpp"
#include "hypxray/geometry.hpp"
#include "hypxray/numerics.hpp"

namespace hypxray {

struct SpectralParam {
    Complex lambda{0.0, 0.0};

    SpectralParam() = default;
    explicit SpectralParam(Complex l) : lambda(l) {
        if (!is_finite(l)) throw std::invalid_argument("SpectralParam: non-finite lambda");
    }
    explicit SpectralParam(double l) : SpectralParam(Complex(l, 0.0)) {}
};

// phi_lambda(r) = (1/pi) * Int_0^pi (cosh r - sinh r cos t)^(-i lambda - 1/2) dt.
// The base is >= e^{-r} > 0, so the principal branch of the complex power is
// unambiguous; it is evaluated as e^{-r} + 2 sinh(r) sin^2(t/2), which is
// stable at large r where the naive difference cancels. The integrand has an
// O(e^{-r})-wide layer at t = 0, so the quadrature mesh grows geometrically
// from that scale. The -1/2 in the exponent is what makes phi_lambda the
// Laplace eigenfunction with eigenvalue -(lambda^2 + 1/4) and phi(0) = 1;
// both properties are pinned by tests.
inline Complex phi_lambda(const SpectralParam& lambda, double r, int n_theta = 256) {
    if (n_theta < 16) throw std::invalid_argument("phi_lambda: need n_theta >= 16");
    if (r < 1e-14) return Complex(1.0, 0.0);
    const double emr = std::exp(-r);
    const double sh2 = 2.0 * std::sinh(r);
    const Complex expo = Complex(-0.5, 0.0) - Complex(0.0, 1.0) * lambda.lambda;
    const int per_panel = std::max(6, n_theta / 16);
    const QuadratureRule unit = gauss_legendre(per_panel, 0.0, 1.0);

    Complex sum{};
    double lo = 0.0;
    double hi = std::min(emr, kPi);
    for (;;) {
        const double len = hi - lo;
        for (std::size_t i = 0; i < unit.nodes.size(); ++i) {
            double s = std::sin(0.5 * (lo + len * unit.nodes[i]));
            double base = emr + sh2 * s * s;
            sum += len * unit.weights[i] * std::exp(expo * std::log(base));
        }
        if (hi >= kPi) break;
        lo = hi;
        hi = std::min(kPi, 2.0 * hi);
    }
    return sum / kPi;
}

// Spherical transform of a radial function in polar coordinates:
//   f~(lambda) = 2*pi * Int_0^R F(r) phi_{-lambda}(r) sinh r dr.
// Detects violated decay by comparing the last radial panel against the total.
inline Complex spherical_transform(const RadialFunction& f, const SpectralParam& lambda,
                                   double R, int n_r = 512, int n_theta = 256) {
    if (!(R > 0.0)) throw std::invalid_argument("spherical_transform: need R > 0");
    SpectralParam neg(-lambda.lambda);
    int per_panel = 10;
    double panel = std::max(0.25, R / std::max(1, n_r / per_panel));
    QuadratureRule rule = composite_gauss_legendre(per_panel, 0.0, R, panel);

    Complex total{};
    Complex tail{};
    double tail_start = R - panel;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double r = rule.nodes[i];
        Complex term = rule.weights[i] * f(r) * phi_lambda(neg, r, n_theta) * std::sinh(r);
        total += term;
        if (r >= tail_start) tail += term;
    }
    if (f.support_radius > R && std::abs(tail) > 0.25 * std::abs(total) &&
        std::abs(total) > 1e-12)
        throw std::runtime_error("spherical_transform: integrand not decaying before R");
    return 2.0 * kPi * total;
}

// Closed form of the transform of tau^(z) (equivalently of the half-line
// Laplace integral of phi_{-lambda}):
//   pi * G(z/2+1/4+i l/2) G(z/2+1/4-i l/2) / (G(z/2+3/4+i l/2) G(z/2+3/4-i l/2)).
inline Complex tau_tilde_closed(Complex z, const SpectralParam& lambda) {
    if (!(z.real() > 0.0)) throw std::invalid_argument("tau_tilde_closed: need Re z > 0");
    Complex il2 = Complex(0.0, 0.5) * lambda.lambda;
    Complex n1 = gamma_complex(0.5 * z + 0.25 + il2);
    Complex n2 = gamma_complex(0.5 * z + 0.25 - il2);
    Complex d1 = gamma_complex(0.5 * z + 0.75 + il2);
    Complex d2 = gamma_complex(0.5 * z + 0.75 - il2);
    return kPi * (n1 * n2) / (d1 * d2);
}

// Transform of sigma^(z): the tau^(z+1) form rewritten with Gamma(w+1) = w Gamma(w),
// which cancels against tau_tilde in the product identity.
inline Complex sigma_tilde_closed(Complex z, const SpectralParam& lambda) {
    if (!(z.real() > 0.0)) throw std::invalid_argument("sigma_tilde_closed: need Re z > 0");
    Complex il2 = Complex(0.0, 0.5) * lambda.lambda;
    Complex w1 = 0.5 * z + 0.25 + il2;
    Complex w2 = 0.5 * z + 0.25 - il2;
    Complex n1 = gamma_complex(0.5 * z + 0.75 + il2);
    Complex n2 = gamma_complex(0.5 * z + 0.75 - il2);
    Complex d1 = gamma_complex(w1);
    Complex d2 = gamma_complex(w2);
    return kPi / (w1 * w2) * (n1 * n2) / (d1 * d2);
}

// Left side of the Gamma-integral identity:
//   2 pi Int_0^R e^{-z r} phi_{-lambda}(r) dr,
// the quadrature route that the closed Gamma form is checked against.
inline Complex tau_tilde_quadrature(Complex z, const SpectralParam& lambda, double R,
                                    int n_theta = 2048, int per_panel = 10) {
    if (!(z.real() > 0.0)) throw std::invalid_argument("tau_tilde_quadrature: need Re z > 0");
    SpectralParam neg(-lambda.lambda);
    QuadratureRule rule = composite_gauss_legendre(per_panel, 0.0, R, 0.5);
    Complex sum{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double r = rule.nodes[i];
        // Skip the analytically negligible tail: |phi| <= (1+r) e^{-r/2}.
        if ((z.real() + 0.5) * r - std::log1p(r) > 46.0) continue;
        sum += rule.weights[i] * std::exp(-z * r) * phi_lambda(neg, r, n_theta);
    }
    return 2.0 * kPi * sum;
}

// Average of f over the rotation orbit of x about the origin (Haar probability
// measure on the stabilizer of 0).
inline Complex radial_symmetrize(const ScalarField& f, const DiskPoint& x, int n = 64) {
    if (n < 8) throw std::invalid_argument("radial_symmetrize: need n >= 8");
    Complex sum{};
    for (int j = 0; j < n; ++j) {
        double alpha = 2.0 * kPi * j / n;
        DiskPoint xr(x.coord * std::polar(1.0, alpha));
        sum += f(xr);
    }
    return sum / static_cast<double>(n);
}

// Radial Laplace-Beltrami F'' + coth(r) F' by central differences; at r = 0
// the limit is 2 F''(0). Cross-check path for radial fields and the
// eigenfunction tests.
inline Complex radial_laplacian_fd(const std::function<Complex(double)>& F, double r,
                                   double h = 1e-3) {
    // Radial profiles are even in r; reflect so the stencil works across 0.
    auto Fe = [&F](double s) { return F(std::abs(s)); };
    Complex second = (Fe(r + h) - 2.0 * Fe(r) + Fe(r - h)) / (h * h);
    if (r < h) return 2.0 * second;
    Complex first = (Fe(r + h) - Fe(r - h)) / (2.0 * h);
    return second + first / std::tanh(r);
}

}  // namespace hypxray
