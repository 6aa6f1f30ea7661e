#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fracgrad/norms.hpp"

using namespace fracgrad;

namespace {

ScalarField gaussian(const Grid& g, double width) {
    return sample(g, [&](const Point& x) {
        double r2 = 0.0;
        for (int k = 0; k < g.dim(); ++k) r2 += x[k] * x[k];
        return std::exp(-r2 / (width * width));
    });
}

std::vector<VoxelSet> test_sets(const Grid& g) {
    return {indicator_cube(g, {0, 0, 0}, 1.0), indicator_ball(g, {0.1, -0.2, 0.0}, 0.7),
            set_union(indicator_cube(g, {-1.0, -1.0, -1.0}, 0.5), indicator_cube(g, {0.5, 0.5, 0.5}, 0.5))};
}

} // namespace

TEST(ThresholdSchedule, SpansPositiveRange) {
    const Grid g = Grid::cube(2, -2.0, 2.0, 64);
    const ScalarField u = gaussian(g, 1.0);
    const auto s = ThresholdSchedule::for_field(u);
    s.validate();
    EXPECT_GE(s.t.size(), 200u);
    double lo = 1e300;
    for (double v : u.values)
        if (v > 0) lo = std::min(lo, v);
    EXPECT_LE(s.t.front(), lo * (1 + 1e-6));
    EXPECT_GE(s.t.back(), u.max_abs());
    const auto c = ThresholdSchedule::for_field(ScalarField(g, 2.0));
    c.validate();
    EXPECT_TRUE(ThresholdSchedule::for_field(ScalarField(g)).t.empty());
    EXPECT_EQ(s.refined().t.size(), 2 * s.t.size() - 1);
}

TEST(Distribution, IndicatorAndMonotonicity) {
    const Grid g = Grid::cube(2, -1.0, 2.0, 48);
    const VoxelSet e = indicator_cube(g, {0, 0, 0}, 1.0);
    const ScalarField chi = e.indicator();
    EXPECT_DOUBLE_EQ(distribution(chi, 0.5), e.volume());
    EXPECT_DOUBLE_EQ(distribution(chi, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(distribution(chi, 7.0), 0.0);
    EXPECT_THROW(distribution(chi, -1.0), precondition_error);

    const ScalarField u = gaussian(g, 0.8);
    const Distribution d(u);
    double prev = d(0.0);
    for (double t = 0.0; t < 1.2; t += 0.01) {
        EXPECT_LE(d(t), prev);
        prev = d(t);
    }
    // Constant between consecutive attained values.
    std::vector<double> v(u.values);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (std::size_t k = 10; k + 1 < v.size(); k += 97) {
        const double a = v[k], b = v[k + 1];
        EXPECT_EQ(d(a), d(a + 0.5 * (b - a)));
        EXPECT_EQ(d(a), d(std::nextafter(b, 0.0)));
        EXPECT_GT(d(a), d(b));
    }
}

TEST(LorentzP1, IndicatorIsExactAndHomogeneous) {
    for (int dim : {2, 3}) {
        const Grid g = Grid::cube(dim, -1.5, 1.5, dim == 2 ? 96 : 24);
        for (const auto& e : test_sets(g)) {
            const ScalarField chi = e.indicator();
            for (double a : {0.3, 0.5, 0.7}) {
                const double p = dim / (dim - a);
                const double exact = std::pow(e.volume(), 1.0 / p);
                EXPECT_NEAR(lorentz_p1(chi, p) / exact, 1.0, 0.005);
                ScalarField two(g);
                for (std::size_t i = 0; i < g.size(); ++i) two.values[i] = -2.0 * chi.values[i];
                EXPECT_NEAR(lorentz_p1(two, p) / (2.0 * lorentz_p1(chi, p)), 1.0, 0.005);
            }
        }
    }
    const Grid g = Grid::cube(2, 0.0, 1.0, 8);
    EXPECT_THROW(lorentz_p1(ScalarField(g, 1.0), 1.0), precondition_error);
    EXPECT_EQ(lorentz_p1(ScalarField(g), 2.0), 0.0);
}

TEST(LorentzP1, RadialGaussianMatchesLayerCake) {
    // |{e^{-r^2} > t}| = pi ln(1/t), so the norm is pi^{1/p} Gamma(1 + 1/p).
    const Grid g = Grid::cube(2, -4.0, 4.0, 256);
    const ScalarField u = gaussian(g, 1.0);
    for (double p : {1.25, 2.0, 4.0}) {
        const double exact = std::pow(std::numbers::pi, 1.0 / p) * std::tgamma(1.0 + 1.0 / p);
        EXPECT_NEAR(lorentz_p1(u, p) / exact, 1.0, 0.01) << "p=" << p;
    }
}

TEST(LorentzP1, ScheduleRefinementChangesLittle) {
    const Grid g = Grid::cube(2, -2.0, 2.0, 96);
    std::vector<ScalarField> fields{gaussian(g, 0.7), smooth_bump(g, {0.2, 0, 0}, 1.2),
                                    indicator_ball(g, {0, 0, 0}, 1.0).indicator()};
    for (const auto& u : fields) {
        const auto s = ThresholdSchedule::for_field(u);
        for (double p : {4.0 / 3.0, 2.0}) {
            const double a = lorentz_p1(u, p, s), b = lorentz_p1(u, p, s.refined());
            EXPECT_NEAR(a / b, 1.0, 0.005);
        }
    }
}

TEST(LorentzP1, DominatesLebesgueNorm) {
    const Grid g = Grid::cube(2, -2.0, 2.0, 96);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    ScalarField noisy(g);
    for (auto& v : noisy.values) v = u01(rng) < 0.3 ? u01(rng) : 0.0;
    std::vector<ScalarField> fields{gaussian(g, 0.7), smooth_bump(g, {0.2, 0, 0}, 1.2), noisy,
                                    indicator_cube(g, {0, 0, 0}, 1.0).indicator()};
    for (const auto& u : fields)
        for (double p : {1.2, 2.0, 3.0}) EXPECT_LE(lp_norm(u, p), lorentz_p1(u, p) * (1.0 + 0.005));
}

TEST(LpNorm, IndicatorRefinementAndTriangle) {
    const Grid g = Grid::cube(3, -1.0, 1.0, 16);
    const VoxelSet e = indicator_cube(g, {-0.5, -0.5, -0.5}, 1.0);
    for (double p : {1.0, 1.5, 3.0}) EXPECT_NEAR(lp_norm(e.indicator(), p), std::pow(e.volume(), 1.0 / p), 1e-14);
    EXPECT_THROW(lp_norm(e.indicator(), 0.5), precondition_error);

    for (double p : {1.0, 2.0}) {
        const double a = lp_norm(smooth_bump(Grid::cube(2, -1.0, 1.0, 64), {0, 0, 0}, 0.8), p);
        const double b = lp_norm(smooth_bump(Grid::cube(2, -1.0, 1.0, 128), {0, 0, 0}, 0.8), p);
        EXPECT_NEAR(a / b, 1.0, 0.01);
    }

    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    const Grid h = Grid::cube(2, 0.0, 1.0, 16);
    for (int trial = 0; trial < 50; ++trial) {
        ScalarField a(h), b(h), s(h);
        for (std::size_t i = 0; i < h.size(); ++i) {
            a.values[i] = nd(rng);
            b.values[i] = nd(rng) * 3.0;
            s.values[i] = a.values[i] + b.values[i];
        }
        for (double p : {1.0, 1.7, 4.0}) EXPECT_LE(lp_norm(s, p), (lp_norm(a, p) + lp_norm(b, p)) * (1 + 1e-12));
    }
}

TEST(ContentIntegral, VolumeGaugeRecoversL1Norm) {
    // With the Lebesgue measure as gauge the layer cake is the L^1 norm.
    const Grid g = Grid::cube(2, -2.0, 2.0, 64);
    const ScalarField u = smooth_bump(g, {0, 0, 0}, 1.5);
    const ContentEstimator volume = [](const VoxelSet& e) { return e.volume(); };
    const double v = content_integral(u, volume, ThresholdSchedule::for_field(u));
    EXPECT_NEAR(v / lp_norm(u, 1.0), 1.0, 0.005);
    EXPECT_EQ(content_integral(ScalarField(g), volume, {}), 0.0);
}

TEST(ContentIntegral, MonotoneInPointwiseOrder) {
    const Grid g = Grid::cube(2, -2.0, 2.0, 48);
    const ScalarField u = smooth_bump(g, {0, 0, 0}, 1.0);
    ScalarField v = smooth_bump(g, {0.1, 0, 0}, 1.5);
    for (std::size_t i = 0; i < g.size(); ++i) v.values[i] = std::max(v.values[i], u.values[i]);
    const ContentEstimator diam = [](const VoxelSet& e) {
        // Smallest box side containing the set: monotone under inclusion.
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < e.grid.size(); ++i)
            if (e.mask[i]) {
                lo = std::min(lo, e.grid.center(i)[0]);
                hi = std::max(hi, e.grid.center(i)[0]);
            }
        return hi - lo + e.grid.h()[0];
    };
    // A shared schedule reaching both maxima.
    const auto s = ThresholdSchedule::for_field(v);
    EXPECT_LE(content_integral(u, diam, s), content_integral(v, diam, s) * (1 + 1e-12));
}
