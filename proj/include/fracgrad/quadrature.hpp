#pragma once

// Quadrature building blocks: globally adaptive tensor Gauss-Legendre on
// axis-aligned boxes (dimension 1..2), and Gauss-Hermite rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "fracgrad/error.hpp"

namespace fracgrad::quad {

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t regions = 0;
    bool converged = true;
};

namespace detail {

using gl8 = boost::math::quadrature::gauss<double, 8>;

// Full (both-sided) node/weight table on [-1, 1] for the 8-point rule.
struct LegendreTable {
    std::array<double, 8> x{};
    std::array<double, 8> w{};
    LegendreTable() {
        const auto& a = gl8::abscissa();
        const auto& wt = gl8::weights();
        std::size_t k = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0.0) {
                x[k] = 0.0;
                w[k++] = wt[i];
                continue;
            }
            x[k] = a[i];
            w[k++] = wt[i];
            x[k] = -a[i];
            w[k++] = wt[i];
        }
    }
};

inline const LegendreTable& legendre() {
    static const LegendreTable t;
    return t;
}

template <int Dim>
struct Region {
    std::array<double, Dim> lo{};
    std::array<double, Dim> hi{};
    double value = 0.0;
    double error = 0.0;
    bool operator<(const Region& o) const { return error < o.error; }
};

template <int Dim, class F>
double tensor_rule(F& f, const std::array<double, Dim>& lo, const std::array<double, Dim>& hi) {
    const auto& t = legendre();
    std::array<double, Dim> half{}, mid{};
    double jac = 1.0;
    for (int k = 0; k < Dim; ++k) {
        half[k] = 0.5 * (hi[k] - lo[k]);
        mid[k] = 0.5 * (hi[k] + lo[k]);
        jac *= half[k];
    }
    double sum = 0.0;
    if constexpr (Dim == 1) {
        for (std::size_t i = 0; i < 8; ++i)
            sum += t.w[i] * f(std::array<double, 1>{mid[0] + half[0] * t.x[i]});
    } else {
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j)
                sum += t.w[i] * t.w[j] *
                       f(std::array<double, 2>{mid[0] + half[0] * t.x[i], mid[1] + half[1] * t.x[j]});
    }
    return sum * jac;
}

template <int Dim, class F>
Region<Dim> evaluate(F& f, const std::array<double, Dim>& lo, const std::array<double, Dim>& hi) {
    Region<Dim> r;
    r.lo = lo;
    r.hi = hi;
    const double coarse = tensor_rule<Dim>(f, lo, hi);
    double fine = 0.0;
    for (int c = 0; c < (1 << Dim); ++c) {
        std::array<double, Dim> clo{}, chi{};
        for (int k = 0; k < Dim; ++k) {
            const double m = 0.5 * (lo[k] + hi[k]);
            if (c & (1 << k)) {
                clo[k] = m;
                chi[k] = hi[k];
            } else {
                clo[k] = lo[k];
                chi[k] = m;
            }
        }
        fine += tensor_rule<Dim>(f, clo, chi);
    }
    r.value = fine;
    r.error = std::abs(fine - coarse);
    return r;
}

} // namespace detail

/// Globally adaptive integration of f over the box [lo, hi] (Dim = 1 or 2).
/// The region with the largest error estimate is bisected along every axis
/// until the summed error is below max(rel_tol |I|, abs_tol). Each region is
/// estimated by the 8-point tensor rule on the region and on its children.
template <int Dim, class F>
AdaptiveResult integrate_box(F&& f, std::array<double, Dim> lo, std::array<double, Dim> hi,
                             double rel_tol = 1e-10, double abs_tol = 0.0,
                             std::size_t max_regions = 20000) {
    static_assert(Dim == 1 || Dim == 2, "integrate_box supports 1 or 2 dimensions");
    for (int k = 0; k < Dim; ++k)
        if (!(hi[k] > lo[k])) return {};
    std::priority_queue<detail::Region<Dim>> heap;
    auto first = detail::evaluate<Dim>(f, lo, hi);
    double total = first.value;
    double err = first.error;
    heap.push(first);
    std::size_t regions = 1;
    while (err > std::max(rel_tol * std::abs(total), abs_tol)) {
        if (regions >= max_regions) return {total, err, regions, false};
        auto worst = heap.top();
        heap.pop();
        total -= worst.value;
        err -= worst.error;
        for (int c = 0; c < (1 << Dim); ++c) {
            std::array<double, Dim> clo{}, chi{};
            for (int k = 0; k < Dim; ++k) {
                const double m = 0.5 * (worst.lo[k] + worst.hi[k]);
                if (c & (1 << k)) {
                    clo[k] = m;
                    chi[k] = worst.hi[k];
                } else {
                    clo[k] = worst.lo[k];
                    chi[k] = m;
                }
            }
            auto child = detail::evaluate<Dim>(f, clo, chi);
            total += child.value;
            err += child.error;
            heap.push(child);
            ++regions;
        }
        // Guard against drift of the running sums.
        if (err < 0.0) err = 0.0;
    }
    return {total, err, regions, true};
}

/// Integrates over a box that contains a near-singular point `focus`
/// (possibly on the boundary). The box is split at the focus so the
/// singularity sits on sub-box corners, where bisection refines geometrically.
template <int Dim, class F>
AdaptiveResult integrate_box_split(F&& f, std::array<double, Dim> lo, std::array<double, Dim> hi,
                                   std::array<double, Dim> focus, double rel_tol = 1e-10,
                                   std::size_t max_regions = 20000) {
    std::vector<std::array<double, 2>> cuts[Dim];
    for (int k = 0; k < Dim; ++k) {
        if (focus[k] > lo[k] && focus[k] < hi[k]) {
            cuts[k].push_back({lo[k], focus[k]});
            cuts[k].push_back({focus[k], hi[k]});
        } else {
            cuts[k].push_back({lo[k], hi[k]});
        }
    }
    // Each piece meets rel_tol on its own value; callers integrate
    // sign-definite kernels, so the sum meets it too.
    std::vector<std::pair<std::array<double, Dim>, std::array<double, Dim>>> pieces;
    if constexpr (Dim == 1) {
        for (auto& a : cuts[0]) pieces.push_back({{a[0]}, {a[1]}});
    } else {
        for (auto& a : cuts[0])
            for (auto& b : cuts[1]) pieces.push_back({{a[0], b[0]}, {a[1], b[1]}});
    }
    AdaptiveResult out;
    for (auto& [plo, phi] : pieces) {
        auto r = integrate_box<Dim>(f, plo, phi, rel_tol, 0.0, max_regions);
        out.value += r.value;
        out.error += r.error;
        out.regions += r.regions;
        out.converged = out.converged && r.converged;
    }
    return out;
}

} // namespace fracgrad::quad
