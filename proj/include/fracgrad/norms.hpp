#pragma once

// Distribution functions, Lebesgue norms, Lorentz L^{p,1} quasi-norms and
// layer-cake content integrals on sampled fields.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fracgrad/error.hpp"
#include "fracgrad/fields.hpp"

namespace fracgrad {

/// Thresholds for layer-cake integrals between the smallest positive and
/// the largest value of |g|.
struct ThresholdSchedule {
    std::vector<double> t;

    void validate() const {
        require(t.size() >= 2, "threshold schedule needs at least 2 thresholds");
        require(t.front() > 0.0, "thresholds must be positive");
        for (std::size_t i = 1; i < t.size(); ++i) require(t[i] > t[i - 1], "thresholds must be strictly increasing");
    }

    static ThresholdSchedule log_spaced(double lo, double hi, int count) {
        require(lo > 0.0 && hi > lo, "threshold schedule: need 0 < lo < hi");
        require(count >= 2, "threshold schedule needs at least 2 thresholds");
        ThresholdSchedule s;
        const double a = std::log(lo), b = std::log(hi);
        for (int k = 0; k < count; ++k) s.t.push_back(std::exp(a + (b - a) * k / (count - 1)));
        s.t.front() = lo;
        s.t.back() = hi;
        return s;
    }

    /// Empty schedule when g vanishes identically.
    static ThresholdSchedule for_values(std::span<const double> g, int count = 200) {
        double lo = 0.0, hi = 0.0;
        for (double v : g) {
            const double a = std::abs(v);
            if (a > 0.0 && (lo == 0.0 || a < lo)) lo = a;
            hi = std::max(hi, a);
        }
        if (hi == 0.0) return {};
        return mixed(lo, std::max(hi, lo * (1.0 + 1e-9)), count);
    }

    /// Union of `count` log-spaced and `count` evenly spaced thresholds on
    /// [lo, hi]: the log nodes resolve small levels, the even nodes the
    /// top of the range where most of the layer-cake mass sits.
    static ThresholdSchedule mixed(double lo, double hi, int count) {
        ThresholdSchedule s = log_spaced(lo, hi, count);
        for (int k = 1; k + 1 < count; ++k) s.t.push_back(lo + (hi - lo) * k / (count - 1));
        std::sort(s.t.begin(), s.t.end());
        s.t.erase(std::unique(s.t.begin(), s.t.end()), s.t.end());
        return s;
    }

    static ThresholdSchedule for_field(const ScalarField& g, int count = 200) { return for_values(g.values, count); }

    /// Inserts the geometric midpoint of every interval.
    ThresholdSchedule refined() const {
        ThresholdSchedule r;
        for (std::size_t i = 0; i < t.size(); ++i) {
            r.t.push_back(t[i]);
            if (i + 1 < t.size()) r.t.push_back(std::sqrt(t[i] * t[i + 1]));
        }
        return r;
    }
};

/// Sorted |g| for repeated distribution queries.
class Distribution {
public:
    Distribution(std::span<const double> g, double cell_volume) : cell_(cell_volume) {
        abs_.reserve(g.size());
        for (double v : g) abs_.push_back(std::abs(v));
        std::sort(abs_.begin(), abs_.end());
    }

    explicit Distribution(const ScalarField& g) : Distribution(g.values, g.grid.cell_volume()) {}

    /// |{ |g| > t }|.
    double operator()(double t) const {
        require(t >= 0.0, "distribution: threshold must be nonnegative");
        const auto it = std::upper_bound(abs_.begin(), abs_.end(), t);
        return static_cast<double>(abs_.end() - it) * cell_;
    }

    double support() const { return (*this)(0.0); }
    double max() const { return abs_.empty() ? 0.0 : abs_.back(); }

private:
    double cell_;
    std::vector<double> abs_;
};

inline double distribution(const ScalarField& g, double t) { return Distribution(g)(t); }
inline double distribution(const VectorField& g, double t) { return Distribution(g.magnitude())(t); }

/// int_0^inf |{|g| > t}|^{1/p} dt: the head [0, t_0] is exact (the measure is
/// the support measure there), [t_0, t_K] uses the trapezoid rule, and the
/// integrand vanishes beyond max |g| <= t_K.
inline double lorentz_p1(const ScalarField& g, double p, const ThresholdSchedule& sched) {
    require(p > 1.0, "lorentz_p1: exponent p must exceed 1");
    const Distribution dist(g);
    if (dist.max() == 0.0) return 0.0;
    sched.validate();
    require(sched.t.back() >= dist.max(), "lorentz_p1: schedule must reach max |g|");
    const double q = 1.0 / p;
    double sum = sched.t.front() * std::pow(dist(0.0), q);
    double prev = std::pow(dist(sched.t.front()), q);
    for (std::size_t k = 1; k < sched.t.size(); ++k) {
        const double cur = std::pow(dist(sched.t[k]), q);
        sum += 0.5 * (sched.t[k] - sched.t[k - 1]) * (prev + cur);
        prev = cur;
    }
    return sum;
}

inline double lorentz_p1(const ScalarField& g, double p) {
    return lorentz_p1(g, p, ThresholdSchedule::for_field(g));
}

inline double lorentz_p1(const VectorField& g, double p) { return lorentz_p1(g.magnitude(), p); }

/// (sum |g|^p prod h)^{1/p}.
inline double lp_norm(const ScalarField& g, double p) {
    require(p >= 1.0, "lp_norm: exponent p must be >= 1");
    double s = 0.0;
    for (double v : g.values) s += std::pow(std::abs(v), p);
    return std::pow(s * g.grid.cell_volume(), 1.0 / p);
}

inline double lp_norm(const VectorField& g, double p) { return lp_norm(g.magnitude(), p); }

/// Superlevel set {|u| > t} as a voxel set.
inline VoxelSet superlevel(const ScalarField& u, double t) {
    VoxelSet e(u.grid);
    for (std::size_t i = 0; i < u.values.size(); ++i) e.mask[i] = std::abs(u.values[i]) > t;
    return e;
}

using ContentEstimator = std::function<double(const VoxelSet&)>;

/// int_0^inf C({|u| > t}) dt for a set gauge C (a content upper bound),
/// with the same head/trapezoid split as lorentz_p1.
inline double content_integral(const ScalarField& u, const ContentEstimator& estimate,
                               const ThresholdSchedule& sched) {
    double top = 0.0;
    for (double v : u.values) top = std::max(top, std::abs(v));
    if (top == 0.0) return 0.0;
    sched.validate();
    require(sched.t.back() >= top, "content_integral: schedule must reach max |u|");
    auto gauge = [&](double t) {
        const VoxelSet e = superlevel(u, t);
        return e.empty() ? 0.0 : estimate(e);
    };
    double sum = sched.t.front() * gauge(0.0);
    double prev = gauge(sched.t.front());
    for (std::size_t k = 1; k < sched.t.size(); ++k) {
        const double cur = gauge(sched.t[k]);
        sum += 0.5 * (sched.t[k] - sched.t[k - 1]) * (prev + cur);
        prev = cur;
    }
    return sum;
}

} // namespace fracgrad
