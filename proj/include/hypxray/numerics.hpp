#pragma once

// Shared numerical kernels: Gauss-Legendre quadrature, the complex Gamma
// function, Neville extrapolation to zero, and Chebyshev panel interpolation.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypxray {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline bool is_finite(Complex v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// A fixed quadrature rule on [a, b]: positive weights, >= 2 nodes.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double a = 0.0;
    double b = 0.0;

    template <class F>
    auto integrate(F&& f) const -> decltype(f(0.0)) {
        using R = decltype(f(0.0));
        R sum{};
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(nodes[i]);
        return sum;
    }
};

// Gauss-Legendre rule with n nodes on [a, b]; exact for degree <= 2n-1.
// Nodes found by Newton iteration on P_n with the usual three-term recurrence.
inline QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 2) throw std::invalid_argument("gauss_legendre: need n >= 2");
    if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");

    QuadratureRule rule;
    rule.a = a;
    rule.b = b;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));

    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th root of P_n.
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = mid - half * x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = mid + half * x;
        rule.weights[static_cast<std::size_t>(i)] = half * w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = half * w;
    }
    return rule;
}

// Composite Gauss-Legendre: [a, b] split into panels of length <= max_panel,
// nodes_per_panel-point rule on each. Node layout depends smoothly on (a, b).
inline QuadratureRule composite_gauss_legendre(int nodes_per_panel, double a, double b,
                                               double max_panel) {
    if (!(a < b)) throw std::invalid_argument("composite_gauss_legendre: need a < b");
    if (max_panel <= 0.0) throw std::invalid_argument("composite_gauss_legendre: bad panel size");
    int panels = static_cast<int>(std::ceil((b - a) / max_panel));
    if (panels < 1) panels = 1;
    QuadratureRule base = gauss_legendre(nodes_per_panel, 0.0, 1.0);
    QuadratureRule rule;
    rule.a = a;
    rule.b = b;
    const double h = (b - a) / panels;
    rule.nodes.reserve(static_cast<std::size_t>(panels * nodes_per_panel));
    rule.weights.reserve(static_cast<std::size_t>(panels * nodes_per_panel));
    for (int p = 0; p < panels; ++p) {
        double pa = a + p * h;
        for (std::size_t i = 0; i < base.nodes.size(); ++i) {
            rule.nodes.push_back(pa + h * base.nodes[i]);
            rule.weights.push_back(h * base.weights[i]);
        }
    }
    return rule;
}

// Complex Gamma via the Lanczos approximation (g = 7, 9 coefficients), with
// the reflection formula for Re w < 0.5. Relative error ~1e-13 on the strip
// used by the transform formulas.
inline Complex gamma_complex(Complex w) {
    static const double p[9] = {
        0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,  12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

    if (w.imag() == 0.0 && w.real() <= 0.0 && w.real() == std::floor(w.real()))
        throw std::domain_error("gamma_complex: pole at non-positive integer");

    if (w.real() < 0.5) {
        // Gamma(w) = pi / (sin(pi w) Gamma(1 - w))
        Complex s = std::sin(kPi * w);
        if (std::abs(s) == 0.0)
            throw std::domain_error("gamma_complex: pole at non-positive integer");
        return kPi / (s * gamma_complex(1.0 - w));
    }

    Complex z = w - 1.0;
    Complex x = p[0];
    for (int i = 1; i < 9; ++i) x += p[i] / (z + static_cast<double>(i));
    Complex t = z + 7.5;
    Complex r = std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
    if (!is_finite(r)) throw std::domain_error("gamma_complex: non-finite result");
    return r;
}

// Result of extrapolating samples (z_i, v_i), z_i > 0, to z = 0 with the
// Neville tableau. error_indicator is the difference between the last two
// nested-degree diagonal estimates.
struct ExtrapolationResult {
    Complex value{};
    double error_indicator = 0.0;
    std::vector<Complex> diagonal;  // degree-k estimate using the first k+1 samples
};

inline ExtrapolationResult extrapolate_to_zero(const std::vector<std::pair<double, Complex>>& samples) {
    const std::size_t n = samples.size();
    if (n < 3) throw std::invalid_argument("extrapolate_to_zero: need >= 3 samples");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(samples[i].first > 0.0))
            throw std::invalid_argument("extrapolate_to_zero: need z > 0");
        for (std::size_t j = i + 1; j < n; ++j)
            if (samples[i].first == samples[j].first)
                throw std::invalid_argument("extrapolate_to_zero: duplicate z values");
    }

    std::vector<double> z(n);
    std::vector<Complex> t(n);
    ExtrapolationResult res;
    res.diagonal.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = samples[i].first;
        t[i] = samples[i].second;
        // Update row i of the tableau in place; t[j] holds T_{i,j} evaluated at 0.
        for (std::size_t j = i; j > 0; --j)
            t[j - 1] = t[j] + z[i] * (t[j] - t[j - 1]) / (z[j - 1] - z[i]);
        res.diagonal.push_back(t[0]);
    }
    res.value = res.diagonal.back();
    res.error_indicator =
        n >= 2 ? std::abs(res.diagonal[n - 1] - res.diagonal[n - 2]) : 0.0;
    return res;
}

// Chebyshev interpolant of a smooth function on panels covering [a, b].
// Used to tabulate radial profiles once and evaluate them cheaply afterward.
class PanelChebyshev {
public:
    PanelChebyshev() = default;

    // Panel widths grow geometrically from first_panel by the given ratio.
    static PanelChebyshev build(const std::function<double(double)>& f, double a, double b,
                                int points_per_panel, double first_panel, double growth) {
        PanelChebyshev interp;
        interp.a_ = a;
        interp.b_ = b;
        interp.n_ = points_per_panel;
        double left = a;
        double w = first_panel;
        while (left < b - 1e-14) {
            double right = std::min(b, left + w);
            interp.edges_.push_back(left);
            std::vector<double> coef = fit_panel(f, left, right, points_per_panel);
            interp.coefs_.push_back(std::move(coef));
            left = right;
            w *= growth;
        }
        interp.edges_.push_back(b);
        return interp;
    }

    double operator()(double x) const {
        if (x <= a_) x = a_;
        if (x >= b_) x = b_;
        // Locate panel by binary search.
        std::size_t lo = 0, hi = edges_.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (edges_[mid] <= x)
                lo = mid;
            else
                hi = mid;
        }
        double pa = edges_[lo], pb = edges_[lo + 1];
        double u = 2.0 * (x - pa) / (pb - pa) - 1.0;
        return clenshaw(coefs_[lo], u);
    }

    double domain_end() const { return b_; }

private:
    static std::vector<double> fit_panel(const std::function<double(double)>& f, double pa,
                                         double pb, int n) {
        // Chebyshev-Gauss nodes and the standard DCT-style coefficient formula.
        std::vector<double> vals(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            double u = std::cos(kPi * (k + 0.5) / n);
            double x = 0.5 * (pa + pb) + 0.5 * (pb - pa) * u;
            vals[static_cast<std::size_t>(k)] = f(x);
        }
        std::vector<double> coef(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += vals[static_cast<std::size_t>(k)] * std::cos(kPi * j * (k + 0.5) / n);
            coef[static_cast<std::size_t>(j)] = 2.0 * s / n;
        }
        coef[0] *= 0.5;
        return coef;
    }

    static double clenshaw(const std::vector<double>& c, double u) {
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t j = c.size(); j-- > 1;) {
            double t = 2.0 * u * b1 - b2 + c[j];
            b2 = b1;
            b1 = t;
        }
        return u * b1 - b2 + c[0];
    }

    double a_ = 0.0, b_ = 0.0;
    int n_ = 0;
    std::vector<double> edges_;
    std::vector<std::vector<double>> coefs_;
};

}  // namespace hypxray
