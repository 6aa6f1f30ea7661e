#pragma once

// Scalar kernels and normalization constants shared by every module.
//
//   Riesz kernel      K_a(x)   = |x|^{a-d} / gamma_norm(d, a)
//   heat kernel       p_t(x)   = (4 pi t)^{-d/2} exp(-|x|^2 / 4t)
//   content gauge     omega(s) = pi^{s/2} / Gamma(s/2 + 1)

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "fracgrad/error.hpp"

namespace fracgrad {

struct KernelParams {
    int d = 2;
    double alpha = 0.5;

    void validate() const {
        require(d >= 1, "dimension must be >= 1, got " + std::to_string(d));
        require(alpha > 0.0 && alpha < d,
                "order alpha must lie in (0, d); got alpha=" + std::to_string(alpha) +
                    " with d=" + std::to_string(d));
    }
};

/// Normalizing constant of the Riesz potential,
/// pi^{d/2} 2^a Gamma(a/2) / Gamma(d/2 - a/2).
inline double gamma_norm(const KernelParams& p) {
    p.validate();
    const double d = p.d;
    const double a = p.alpha;
    return std::pow(std::numbers::pi, d / 2.0) * std::exp2(a) * std::tgamma(a / 2.0) /
           std::tgamma(d / 2.0 - a / 2.0);
}

inline double gamma_norm(int d, double alpha) { return gamma_norm(KernelParams{d, alpha}); }

/// Volume normalizer of the s-dimensional content gauge.
inline double omega(double s) {
    require(s > 0.0, "omega: dimension parameter must be positive, got " + std::to_string(s));
    return std::pow(std::numbers::pi, s / 2.0) / std::tgamma(s / 2.0 + 1.0);
}

namespace detail {
inline double squared_norm(std::span<const double> x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return r2;
}
} // namespace detail

/// Gaussian heat kernel in d = x.size() dimensions. Returns exactly 0.0 once
/// the exponent drops below -745 so callers never see denormals.
inline double heat_kernel(std::span<const double> x, double t) {
    require(t > 0.0, "heat_kernel: time must be positive");
    const double expo = -detail::squared_norm(x) / (4.0 * t);
    if (expo < -745.0) return 0.0;
    const double d = static_cast<double>(x.size());
    return std::pow(4.0 * std::numbers::pi * t, -d / 2.0) * std::exp(expo);
}

/// grad p_t(x) = -x / (2t) p_t(x).
inline std::vector<double> heat_kernel_gradient(std::span<const double> x, double t) {
    require(t > 0.0, "heat_kernel_gradient: time must be positive");
    const double p = heat_kernel(x, t);
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = -x[i] / (2.0 * t) * p;
    return g;
}

/// || t^{1/2} grad p_t ||_{L^1(R^d)} by radial quadrature. The value does not
/// depend on t; evaluating it at several t is a consistency check on the
/// kernel code rather than a different quantity.
inline double heat_gradient_l1_norm(int d, double t = 1.0) {
    require(d >= 1, "heat_gradient_l1_norm: dimension must be >= 1");
    require(t > 0.0, "heat_gradient_l1_norm: time must be positive");
    // Surface area of the unit sphere S^{d-1}.
    const double sphere = 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
    const double sqt = std::sqrt(t);
    auto radial = [&](double r) {
        const double p = std::pow(4.0 * std::numbers::pi * t, -d / 2.0) * std::exp(-r * r / (4.0 * t));
        return sqt * r / (2.0 * t) * p * sphere * std::pow(r, d - 1);
    };
    // Integrand is negligible beyond r = 24 sqrt(t); split into panels of
    // width sqrt(t) so every panel is resolved by the 20-point rule.
    using rule = boost::math::quadrature::gauss<double, 20>;
    double sum = 0.0;
    for (int k = 0; k < 24; ++k)
        sum += rule::integrate(radial, k * sqt, (k + 1) * sqt);
    return sum;
}

/// Explicit constant of the pointwise interpolation inequality
/// |I_a D chi_E| <= C M1^{1-a} M2^a:
///   C = 2 Gamma(a/2 + 1)^{-(1-a)} (1 / (Gamma(a/2) (1/2 - a/2)))^a.
inline double interpolation_constant(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "interpolation constant needs alpha in (0,1)");
    const double a = alpha;
    return 2.0 * std::pow(std::tgamma(a / 2.0 + 1.0), -(1.0 - a)) *
           std::pow(1.0 / (std::tgamma(a / 2.0) * (0.5 - a / 2.0)), a);
}

} // namespace fracgrad
