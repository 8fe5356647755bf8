#pragma once

// Synthesis of normal-operator data fields for compactly supported radial
// inputs. Pi_0^(z) applied to a radial bump is radial; its profile is
// tabulated once on Chebyshev panels and backs a cheap smooth field, which is
// what the reconstruction pipelines consume as data.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "hypxray/fields.hpp"
#include "hypxray/xray_disk.hpp"

namespace hypxray {

// Radial profile d -> Pi_0^(z) f (point at distance d), complex-valued.
// Tabulated on two panel-Chebyshev segments meeting at the evaluation-branch
// switch, so the interpolant does not smear the (tiny) branch mismatch.
struct RadialDataProfile {
    PanelChebyshev re_near, im_near;
    PanelChebyshev re_far, im_far;
    double d_split = 0.0;
    double d_max = 0.0;
    double sup = 0.0;  // max sampled |value|

    Complex operator()(double d) const {
        if (d >= d_max) return Complex(0.0, 0.0);
        if (d <= d_split) return Complex(re_near(d), im_near(d));
        return Complex(re_far(d), im_far(d));
    }
};

// Radial function given by a tabulated profile times a smooth radial weight.
inline RadialFunction weighted_profile_function(std::shared_ptr<const RadialDataProfile> prof,
                                                std::function<double(double)> weight,
                                                double support) {
    return RadialFunction{[prof = std::move(prof), weight = std::move(weight)](double r) {
                              double w = weight(r);
                              return w == 0.0 ? Complex(0.0, 0.0) : w * (*prof)(r);
                          },
                          support};
}

// Tabulates the radial profile of Pi_0^(z) applied to a radial function with
// finite support. Near the support the ray-integral form is used (smooth
// integrand, wide fiber features); farther out the convolution form against
// e^{-z d}/sinh d is used (no singularity once the support is left).
inline RadialDataProfile disk_normal_data_profile(const RadialFunction& f, Complex z,
                                                  double d_max, int n_theta_near = 256,
                                                  int n_theta_far = 192) {
    if (!(z.real() > 0.0))
        throw std::invalid_argument("disk_normal_data_profile: need Re z > 0");
    if (!(f.support_radius < kInfiniteSupport))
        throw std::invalid_argument("disk_normal_data_profile: need compact support");

    const double rho = f.support_radius;
    const double d_switch = std::min(rho + 0.5, d_max);

    double fmax = 0.0;
    for (int i = 0; i <= 256; ++i)
        fmax = std::max(fmax, std::abs(f(rho * i / 256.0)));

    ScalarField f_field{[&f](const DiskPoint& p) { return f(distance_to_origin(p)); },
                        fmax * (1.0 + 1e-9) + 1e-300, rho};

    OperatorResolution near_res;
    near_res.n_theta = n_theta_near;
    near_res.n_r = 240;

    QuadratureRule far_radial = composite_gauss_legendre(16, 0.0, rho, rho / 6.0);

    auto cache = std::make_shared<std::map<double, Complex>>();
    auto sample = [&, cache](double d) -> Complex {
        auto it = cache->find(d);
        if (it != cache->end()) return it->second;
        DiskPoint xd(std::tanh(0.5 * d), 0.0);
        Complex val;
        if (d <= d_switch) {
            val = normal_op_attenuated(f_field, AttenuationParam(z), xd, near_res);
        } else {
            // 2 * Int_0^{2pi} Int_0^rho e^{-z d(x,y)} / sinh d(x,y) * F(r) sinh r dr dtheta
            Complex acc{};
            for (int j = 0; j < n_theta_far; ++j) {
                double th = 2.0 * kPi * j / n_theta_far;
                Complex ray{};
                for (std::size_t i = 0; i < far_radial.nodes.size(); ++i) {
                    double r = far_radial.nodes[i];
                    DiskPoint y(std::polar(std::tanh(0.5 * r), th));
                    double dxy = distance(xd, y);
                    ray += far_radial.weights[i] * std::exp(-z * dxy) / std::sinh(dxy) *
                           f(r) * std::sinh(r);
                }
                acc += ray * (2.0 * kPi / n_theta_far);
            }
            val = 2.0 * acc;
        }
        cache->emplace(d, val);
        return val;
    };

    RadialDataProfile profile;
    profile.d_split = d_switch;
    profile.d_max = d_max;
    // The first panels stay short: the reconstruction differentiates through
    // this profile, and the data has its sharpest radial structure at d ~ 0.
    profile.re_near = PanelChebyshev::build([&](double d) { return sample(d).real(); }, 0.0,
                                            d_switch, 13, 0.12, 1.25);
    profile.im_near = PanelChebyshev::build([&](double d) { return sample(d).imag(); }, 0.0,
                                            d_switch, 13, 0.12, 1.25);
    if (d_switch < d_max - 1e-9) {
        profile.re_far = PanelChebyshev::build([&](double d) { return sample(d).real(); },
                                               d_switch, d_max, 13, 0.45, 1.12);
        profile.im_far = PanelChebyshev::build([&](double d) { return sample(d).imag(); },
                                               d_switch, d_max, 13, 0.45, 1.12);
    } else {
        profile.d_split = d_max;
    }
    for (const auto& [d, v] : *cache) profile.sup = std::max(profile.sup, std::abs(v));
    return profile;
}

// Polar interpolant on {d(0, .) <= r_max}: trigonometric in the angle,
// Chebyshev in the hyperbolic radius.
class PolarGridInterpolant {
public:
    static double node_r(int i, int n_r, double r_max) {
        return 0.5 * r_max * (std::cos(kPi * (i + 0.5) / n_r) + 1.0);
    }
    static double node_theta(int j, int n_theta) { return 2.0 * kPi * j / n_theta; }

    // Evaluator called on the (node_r, node_theta) tensor grid.
    template <class F>
    static PolarGridInterpolant build(int n_theta, int n_r, double r_max, F&& values) {
        std::vector<Complex> V(static_cast<std::size_t>(n_theta) * n_r);
        for (int j = 0; j < n_theta; ++j)
            for (int i = 0; i < n_r; ++i)
                V[static_cast<std::size_t>(j) * n_r + i] =
                    values(node_r(i, n_r, r_max), node_theta(j, n_theta));
        return build_from_values(n_theta, n_r, r_max, V);
    }

    // Values laid out as V[j * n_r + i] on the same tensor grid.
    static PolarGridInterpolant build_from_values(int n_theta, int n_r, double r_max,
                                             const std::vector<Complex>& V) {
        PolarGridInterpolant g;
        g.n_theta_ = n_theta;
        g.n_r_ = n_r;
        g.r_max_ = r_max;
        for (const Complex& v : V) g.sup_ = std::max(g.sup_, std::abs(v));

        // Chebyshev coefficients per angle.
        std::vector<Complex> C(static_cast<std::size_t>(n_theta) * n_r);
        for (int j = 0; j < n_theta; ++j) {
            for (int k = 0; k < n_r; ++k) {
                Complex s{};
                for (int i = 0; i < n_r; ++i)
                    s += V[static_cast<std::size_t>(j) * n_r + i] *
                         std::cos(kPi * k * (i + 0.5) / n_r);
                C[static_cast<std::size_t>(j) * n_r + k] = s * (2.0 / n_r);
            }
            C[static_cast<std::size_t>(j) * n_r] *= 0.5;
        }

        // Centered Fourier modes of each Chebyshev coefficient.
        g.coef_.assign(static_cast<std::size_t>(n_theta) * n_r, Complex{});
        for (int mi = 0; mi < n_theta; ++mi) {
            int m = mi - n_theta / 2;
            for (int k = 0; k < n_r; ++k) {
                Complex s{};
                for (int j = 0; j < n_theta; ++j) {
                    double ang = -2.0 * kPi * m * j / n_theta;
                    s += C[static_cast<std::size_t>(j) * n_r + k] *
                         Complex(std::cos(ang), std::sin(ang));
                }
                g.coef_[static_cast<std::size_t>(mi) * n_r + k] = s / static_cast<double>(n_theta);
            }
        }
        return g;
    }

    Complex eval(const DiskPoint& p) const {
        double r = distance_to_origin(p);
        if (r > r_max_) r = r_max_;
        double theta = std::arg(p.coord);
        double u = 2.0 * r / r_max_ - 1.0;

        Complex ephase = std::polar(1.0, theta);
        Complex phase = std::polar(1.0, -(n_theta_ / 2) * theta);
        Complex acc{};
        for (int mi = 0; mi < n_theta_; ++mi) {
            const Complex* row = &coef_[static_cast<std::size_t>(mi) * n_r_];
            Complex b1{}, b2{};
            for (int k = n_r_ - 1; k >= 1; --k) {
                Complex t = 2.0 * u * b1 - b2 + row[k];
                b2 = b1;
                b1 = t;
            }
            acc += (u * b1 - b2 + row[0]) * phase;
            phase *= ephase;
        }
        return acc;
    }

    double sup() const { return sup_; }
    double r_max() const { return r_max_; }

private:
    int n_theta_ = 0, n_r_ = 0;
    double r_max_ = 0.0;
    double sup_ = 0.0;
    std::vector<Complex> coef_;
};

// Data field g(y) = G(d(0, y)) backed by a tabulated profile.
inline ScalarField disk_data_field(std::shared_ptr<const RadialDataProfile> profile) {
    double bound = profile->sup * (1.0 + 1e-6) + 1e-12;
    double support = profile->d_max;
    return ScalarField{[profile](const DiskPoint& p) {
                           return (*profile)(distance_to_origin(p));
                       },
                       bound, support};
}

}  // namespace hypxray
