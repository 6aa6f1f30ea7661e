#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "fracgrad/potentials.hpp"

using namespace fracgrad;

namespace {

double sup_rel(const std::vector<double>& a, const std::vector<double>& ref) {
    double e = 0.0, m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        e = std::max(e, std::abs(a[i] - ref[i]));
        m = std::max(m, std::abs(ref[i]));
    }
    return e / m;
}

double l2_rel(const std::vector<double>& a, const std::vector<double>& ref) {
    return l2_distance(a, ref) / l2_norm(ref);
}

double vector_l2_rel(const VectorField& a, const VectorField& ref, const std::vector<std::uint8_t>& keep) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < ref.components.size(); ++k)
        for (std::size_t i = 0; i < keep.size(); ++i) {
            if (!keep[i]) continue;
            const double r = ref.components[k][i];
            num += (a.components[k][i] - r) * (a.components[k][i] - r);
            den += r * r;
        }
    return std::sqrt(num / den);
}

ScalarField random_field(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField f(g);
    for (auto& v : f.values) v = u(rng);
    return f;
}

// Polar form of the cell integral of |y|^{a-2} over [-h/2, h/2]^2.
double self_cell_polar_2d(double alpha, double h) {
    auto f = [alpha](double th) { return std::pow(std::cos(th), -alpha); };
    const double ang = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, std::numbers::pi / 4,
                                                                                      15, 1e-14);
    return 8.0 / alpha * std::pow(0.5 * h, alpha) * ang;
}

// Pyramid decomposition of the unit-cube cell integral in d = 3.
double self_cell_pyramid_3d(double alpha) {
    using boost::math::quadrature::gauss_kronrod;
    auto inner = [alpha](double v) {
        auto g = [alpha, v](double u) { return std::pow(u * u + v * v + 0.25, 0.5 * (alpha - 3.0)); };
        return gauss_kronrod<double, 31>::integrate(g, -0.5, 0.5, 10, 1e-14);
    };
    const double face = gauss_kronrod<double, 31>::integrate(inner, -0.5, 0.5, 10, 1e-14);
    return 6.0 * 0.5 * face / alpha;
}

// Tensor Gauss-Legendre over a cell away from the origin.
double off_cell_tensor_2d(double alpha, const Point& h, long i, long j) {
    using boost::math::quadrature::gauss;
    auto f = [&](double x) {
        auto g = [&](double y) { return std::pow(x * x + y * y, 0.5 * (alpha - 2.0)); };
        return gauss<double, 40>::integrate(g, (j - 0.5) * h[1], (j + 0.5) * h[1]);
    };
    return gauss<double, 40>::integrate(f, (i - 0.5) * h[0], (i + 0.5) * h[0]);
}

Grid centred_grid_2d(std::size_t n, double half) {
    // Even n with a cell centre at the origin.
    const double h = 2.0 * half / static_cast<double>(n);
    const double o = -static_cast<double>(n / 2) * h - 0.5 * h;
    return Grid(2, {o, o, 0}, {2 * half, 2 * half, 0}, {n, n, 0});
}

std::size_t nearest_cell(const Grid& g, const Point& p) {
    std::size_t best = 0;
    double bd = 1e300;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point c = g.center(i);
        double r = 0.0;
        for (int k = 0; k < g.dim(); ++k) r += (c[k] - p[k]) * (c[k] - p[k]);
        if (r < bd) {
            bd = r;
            best = i;
        }
    }
    return best;
}

} // namespace

TEST(CellIntegral, SelfCellMatchesPolarAndPyramidForms) {
    for (double a : {0.1, 0.3, 0.5, 0.99, 1.5}) {
        for (double h : {1.0, 0.01}) {
            const double v = self_cell_integral(2, a, {h, h, 1.0});
            EXPECT_NEAR(v / self_cell_polar_2d(a, h), 1.0, 1e-10) << "alpha=" << a << " h=" << h;
        }
        EXPECT_NEAR(self_cell_integral(3, a, {1, 1, 1}) / self_cell_pyramid_3d(a), 1.0, 1e-10) << "alpha=" << a;
    }
    // Homogeneity of degree alpha in d = 3.
    EXPECT_NEAR(self_cell_integral(3, 0.7, {0.1, 0.1, 0.1}) / self_cell_integral(3, 0.7, {1, 1, 1}),
                std::pow(0.1, 0.7), 1e-12);
}

TEST(CellIntegral, OffDiagonalCellsMatchTensorQuadrature) {
    const Point h{0.3, 0.2, 1.0};
    for (double a : {0.3, 1.0, 1.7})
        for (long i : {0L, 1L, -2L, 4L})
            for (long j : {1L, 3L, -1L}) {
                const double v = cell_integral(2, a, h, {i, j, 0});
                EXPECT_NEAR(v / off_cell_tensor_2d(a, h, i, j), 1.0, 1e-10) << a << " " << i << " " << j;
            }
}

TEST(RieszKernel, NearFieldIsExactAndFarFieldIsSampled) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 20);
    const double a = 0.5;
    RieszKernel k(g, a);
    const double inv_gamma = 1.0 / gamma_norm(2, a);
    EXPECT_DOUBLE_EQ(k({0, 0, 0}), k.self_weight());
    EXPECT_NEAR(k({3, -2, 0}), cell_integral(2, a, g.h(), {3, 2, 0}) * inv_gamma, 1e-15);
    EXPECT_DOUBLE_EQ(k({3, -2, 0}), k({-3, 2, 0}));
    const double h = g.h()[0];
    EXPECT_DOUBLE_EQ(k({9, 0, 0}), std::pow(9.0 * h, a - 2.0) * h * h * inv_gamma);
    // Point samples converge to cell integrals away from the target.
    EXPECT_NEAR(k({5, 0, 0}) / (cell_integral(2, a, g.h(), {5, 0, 0}) * inv_gamma), 1.0, 5e-3);
}

TEST(RieszFft, MatchesDirectSumOnRandomFields) {
    for (double a : {0.3, 1.0, 1.7}) {
        const ScalarField f = random_field(Grid::cube(2, -1.0, 1.0, 32), 3);
        EXPECT_LT(sup_rel(riesz_fft(f, a).values, riesz_direct(f, a).values), 1e-6) << "alpha=" << a;
    }
    for (double a : {0.5, 2.5}) {
        const ScalarField f = random_field(Grid::cube(3, -1.0, 1.0, 16), 4);
        EXPECT_LT(sup_rel(riesz_fft(f, a).values, riesz_direct(f, a).values), 1e-6) << "alpha=" << a;
    }
    const ScalarField f = random_field(Grid::cube(2, 0.0, 1.0, 12), 5);
    const ScalarField all = riesz_direct(f, 0.4);
    for (std::size_t i : {0ul, 17ul, 143ul}) EXPECT_NEAR(riesz_direct_at(f, 0.4, i), all.values[i], 1e-13);
}

TEST(RieszFft, DiskCentreMatchesClosedForm) {
    const Grid g = centred_grid_2d(256, 1.5);
    const ScalarField chi = indicator_ball(g, {0, 0, 0}, 1.0).indicator();
    const std::size_t c = nearest_cell(g, {0, 0, 0});
    ASSERT_LT(std::hypot(g.center(c)[0], g.center(c)[1]), 1e-12);
    for (double a : {0.3, 0.5, 0.7}) {
        const double exact = 2.0 * std::numbers::pi / a / gamma_norm(2, a);
        EXPECT_NEAR(riesz_fft(chi, a).values[c] / exact, 1.0, 0.01) << "alpha=" << a;
    }
}

TEST(RieszFft, ZeroPositivityAndImpulseResponse) {
    const Grid g = Grid::cube(2, -1.0, 1.0, 24);
    EXPECT_EQ(riesz_fft(ScalarField(g), 0.5).max_abs(), 0.0);
    ScalarField f = random_field(g, 9);
    for (auto& v : f.values) v = std::abs(v);
    for (double a : {0.2, 1.0, 1.8}) {
        const ScalarField out = riesz_fft(f, a);
        for (double v : out.values) EXPECT_GT(v, 0.0);
    }
    ScalarField delta(g);
    const Index at{7, 15, 0};
    delta.values[g.linear(at)] = 1.0;
    const ScalarField out = riesz_fft(delta, 0.6);
    RieszKernel k(g, 0.6);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Index ii = g.multi(i);
        const fft::Offset o{static_cast<long>(ii[0]) - 7, static_cast<long>(ii[1]) - 15, 0};
        EXPECT_NEAR(out.values[i], k(o), 1e-14 * k.self_weight());
    }
    EXPECT_THROW(riesz_fft(ScalarField(Grid::cube(2, 0, 1, 3)), 0.5), precondition_error);
    EXPECT_THROW(riesz_fft(f, 2.0), precondition_error);
}

TEST(RieszFft, TranslationEquivariance) {
    const Grid g = Grid::cube(2, -1.0, 1.0, 40);
    const ScalarField f = smooth_bump(g, {-0.3, -0.2, 0}, 0.4);
    const ScalarField shifted = smooth_bump(g, {-0.3 + 5 * g.h()[0], -0.2 + 3 * g.h()[1], 0}, 0.4);
    const ScalarField a = riesz_fft(f, 0.7);
    const ScalarField b = riesz_fft(shifted, 0.7);
    double worst = 0.0;
    for (std::size_t i = 0; i + 5 < 40; ++i)
        for (std::size_t j = 0; j + 3 < 40; ++j)
            worst = std::max(worst, std::abs(b.values[g.linear({i + 5, j + 3, 0})] - a.values[g.linear({i, j, 0})]));
    EXPECT_LT(worst, 1e-12 * a.max_abs());
}

TEST(RieszFft, DilationScaling) {
    // f_l(x) = f(l x) sampled on the grid scaled by 1/l carries the same
    // array; I_a f_l(x) = l^{-a} I_a f(l x).
    const Grid g = Grid::cube(2, -1.0, 1.0, 32);
    const ScalarField f = smooth_bump(g, {0.1, 0, 0}, 0.6);
    for (double lam : {0.5, 2.0, 3.0}) {
        const ScalarField fl(g.scaled(1.0 / lam), f.values);
        for (double a : {0.4, 1.3}) {
            const ScalarField lhs = riesz_fft(fl, a);
            const ScalarField rhs = riesz_fft(f, a);
            std::vector<double> scaled(rhs.values);
            for (auto& v : scaled) v *= std::pow(lam, -a);
            EXPECT_LT(sup_rel(lhs.values, scaled), 1e-6) << "lambda=" << lam << " alpha=" << a;
        }
    }
}

TEST(RieszHeat, AgreesWithFftOnSmoothBump) {
    const Grid g = Grid::cube(2, -1.0, 1.0, 64);
    const ScalarField f = smooth_bump(g, {0, 0, 0}, 0.5);
    const ScalarField ref = riesz_fft(f, 0.5);
    const ScalarField heat = riesz_heat(f, 0.5, SemigroupQuadrature::for_grid(g));
    EXPECT_LT(l2_rel(heat.values, ref.values), 0.01);
    EXPECT_EQ(riesz_heat(ScalarField(g), 0.5, SemigroupQuadrature::for_grid(g)).max_abs(), 0.0);
}

TEST(RieszHeat, DoublingNodesConvergesMonotonically) {
    const Grid g = Grid::cube(2, -1.0, 1.0, 48);
    const ScalarField f = smooth_bump(g, {0.1, -0.1, 0}, 0.5);
    const ScalarField ref = riesz_heat(f, 0.5, SemigroupQuadrature::for_grid(g, 512));
    double prev = 1e300;
    for (int m : {8, 16, 32, 64, 128}) {
        const double e = l2_rel(riesz_heat(f, 0.5, SemigroupQuadrature::for_grid(g, m)).values, ref.values);
        EXPECT_LT(e, prev) << "m=" << m;
        prev = e;
    }
    EXPECT_LT(prev, 1e-4);
}

TEST(RieszHeat, RejectsQuadratureNotCoveringGridScales) {
    const Grid g = Grid::cube(2, -1.0, 1.0, 16);
    const ScalarField f = smooth_bump(g, {0, 0, 0}, 0.5);
    const double h = g.h()[0];
    EXPECT_THROW(riesz_heat(f, 0.5, {4 * h * h, 100.0, 32}), precondition_error);
    EXPECT_THROW(riesz_heat(f, 0.5, {1e-6, 1.0, 32}), precondition_error);
    EXPECT_THROW(riesz_heat(f, 0.5, {1e-6, 100.0, 4}), precondition_error);
    EXPECT_THROW(riesz_heat(f, 0.0, {1e-6, 100.0, 32}), precondition_error);
}

TEST(Semigroup, PaddedBumpWithinTwoPercent) {
    const Grid g = Grid::cube(2, -1.0, 1.0, 128);
    const ScalarField f = smooth_bump(g, {0, 0, 0}, 0.5);
    const Report r = semigroup_check(f, 0.4, 0.4, 4);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_LT(r.metrics["l2_relative_deviation"].get<double>(), 0.02);
    const Report zero = semigroup_check(ScalarField(g), 0.4, 0.4, 4);
    EXPECT_EQ(zero.metrics["l2_relative_deviation"].get<double>(), 0.0);
    EXPECT_THROW(semigroup_check(f, 1.2, 0.8), precondition_error);
}

TEST(FracGradient, NearOneApproachesGradient) {
    const Grid g = Grid::cube(2, -2.0, 2.0, 64);
    const ScalarField u = smooth_bump(g, {0, 0, 0}, 1.0);
    const VectorField grad = central_gradient(u);
    const auto keep = boundary_band(g, 2);
    std::vector<std::uint8_t> interior(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) interior[i] = keep[i] ? 0 : 1;
    EXPECT_LT(vector_l2_rel(frac_gradient(u, 0.99), grad, interior), 0.05);
}

TEST(FracGradient, Linearity) {
    const Grid g = Grid::cube(2, -1.0, 1.0, 32);
    const ScalarField u = smooth_bump(g, {0.2, 0, 0}, 0.5);
    const ScalarField v = random_field(g, 21);
    ScalarField w(g);
    for (std::size_t i = 0; i < g.size(); ++i) w.values[i] = 2.5 * u.values[i] - 0.75 * v.values[i];
    const VectorField du = frac_gradient(u, 0.4), dv = frac_gradient(v, 0.4), dw = frac_gradient(w, 0.4);
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < g.size(); ++i) {
            worst = std::max(worst, std::abs(dw.components[k][i] - 2.5 * du.components[k][i] +
                                             0.75 * dv.components[k][i]));
            scale = std::max(scale, std::abs(dw.components[k][i]));
        }
    EXPECT_LT(worst, 1e-12 * scale);
    EXPECT_THROW(frac_gradient(u, 1.0), precondition_error);
    EXPECT_THROW(frac_gradient(u, 0.0), precondition_error);
}

TEST(FracGradient, ConstantFieldHasNoGradientAtBoxCentre) {
    // A constant is only representable as a constant on the grid box, so the
    // symmetric centre is where its fractional gradient must vanish.
    const Grid g = Grid::cube(2, -1.0, 1.0, 33);
    const VectorField d = frac_gradient(ScalarField(g, 3.0), 0.5);
    const std::size_t mid = g.linear({16, 16, 0});
    const double edge = std::abs(d.components[0][g.linear({2, 16, 0})]);
    EXPECT_GT(edge, 0.0);
    EXPECT_LT(std::abs(d.components[0][mid]), 1e-12 * edge);
    EXPECT_LT(std::abs(d.components[1][mid]), 1e-12 * edge);
}

TEST(FracGradient, MollifiedCubeConsistencyWithFracLaplacian) {
    // D^a (-Delta)^{(1-a)/2} u = grad u for the mollified unit square.
    const Grid g = Grid::cube(2, -1.5, 2.5, 128);
    const ScalarField u = mollify(indicator_cube(g, {0, 0, 0}, 1.0).indicator(), 0.1);
    const VectorField grad = central_gradient(u);
    std::vector<std::uint8_t> inner(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point c = g.center(i);
        inner[i] = c[0] > -0.5 && c[0] < 1.5 && c[1] > -0.5 && c[1] < 1.5;
    }
    for (double a : {0.3, 0.5, 0.7})
        EXPECT_LT(vector_l2_rel(frac_gradient(frac_laplacian(u, 1.0 - a), a), grad, inner), 0.02) << "alpha=" << a;
}

TEST(RieszTransform, ZeroAndReflectionParity) {
    const Grid g = Grid::cube(2, -1.0, 1.0, 32);
    const VectorField z = riesz_transform(ScalarField(g));
    for (const auto& c : z.components)
        for (double v : c) EXPECT_EQ(v, 0.0);
    const ScalarField u = smooth_bump(g, {0.3, 0.1, 0}, 0.5);
    const ScalarField m = smooth_bump(g, {-0.3, 0.1, 0}, 0.5);  // u reflected in x0 = 0
    const VectorField ru = riesz_transform(u), rm = riesz_transform(m);
    for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t j = 0; j < 32; ++j) {
            const std::size_t a = g.linear({i, j, 0}), b = g.linear({31 - i, j, 0});
            EXPECT_NEAR(rm.components[0][b], -ru.components[0][a], 1e-12);
            EXPECT_NEAR(rm.components[1][b], ru.components[1][a], 1e-12);
        }
}

TEST(RieszTransform, MatchesSurfaceQuadratureOutsideMollifiedSquare) {
    const Grid g = Grid::cube(2, -1.5, 2.5, 256);
    const VoxelSet q = indicator_cube(g, {0, 0, 0}, 1.0);
    const SurfaceMeasure s = surface_measure(q, true);
    const VectorField r = riesz_transform(mollify(q.indicator(), 0.03));
    double worst = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < g.size(); i += 7) {
        const Point c = g.center(i);
        const double dist = std::max({-c[0], c[0] - 1.0, -c[1], c[1] - 1.0});
        if (dist < 0.25 || std::abs(c[0] - 0.5) > 1.0 || std::abs(c[1] - 0.5) > 1.0) continue;
        // riesz_surface carries the exterior normal: it equals -R chi_Q.
        const Point v = riesz_surface(s, 1.0, c);
        const double e = std::hypot(r.components[0][i] + v[0], r.components[1][i] + v[1]) / std::hypot(v[0], v[1]);
        worst = std::max(worst, e);
        ++count;
    }
    EXPECT_GT(count, 200);
    EXPECT_LT(worst, 0.02);
}

TEST(FracLaplacian, InversePairWithRieszPotential) {
    const Grid g = Grid::cube(2, -2.0, 2.0, 64);
    const ScalarField u = smooth_bump(g, {0, 0, 0}, 1.0);
    const ScalarField big = embed(u, 3);
    for (double s : {0.2, 0.5, 0.9}) {
        const ScalarField back = crop(frac_laplacian(riesz_fft(big, s), s), g);
        EXPECT_LT(l2_rel(back.values, u.values), 0.02) << "s=" << s;
        const ScalarField other = crop(riesz_fft(frac_laplacian(big, s), s), g);
        EXPECT_LT(l2_rel(other.values, u.values), 0.02) << "s=" << s;
    }
}

TEST(FracLaplacian, SmallOrderApproachesIdentity) {
    const Grid g = Grid::cube(2, -2.0, 2.0, 64);
    const ScalarField u = smooth_bump(g, {0, 0, 0}, 1.0);
    EXPECT_LT(l2_rel(frac_laplacian(u, 0.01).values, u.values), 0.03);
    EXPECT_EQ(frac_laplacian(ScalarField(g), 0.5).max_abs(), 0.0);
    EXPECT_THROW(frac_laplacian(u, 1.0), precondition_error);
    EXPECT_THROW(frac_laplacian(u, 0.0), precondition_error);
}

TEST(FracLaplacian, ZeroModeIsCellAverage) {
    // Mean of |xi| over [-1,1]^2 is (sqrt 2 + asinh 1) / 3.
    EXPECT_NEAR(mean_power_over_box(2, 1.0, {1, 1, 0}), (std::sqrt(2.0) + std::asinh(1.0)) / 3.0, 1e-12);
    // Mean of |xi|^s over a unit box in d = 3, tensor Gauss oracle.
    using boost::math::quadrature::gauss;
    const double s = 0.3;
    auto fx = [&](double x) {
        auto fy = [&](double y) {
            auto fz = [&](double z) { return std::pow(x * x + y * y + z * z, 0.5 * s); };
            return gauss<double, 30>::integrate(fz, 0.0, 0.5);
        };
        return gauss<double, 30>::integrate(fy, 0.0, 0.5);
    };
    const double oracle = gauss<double, 30>::integrate(fx, 0.0, 0.5) / 0.125;
    EXPECT_NEAR(mean_power_over_box(3, s, {0.5, 0.5, 0.5}) / oracle, 1.0, 1e-6);
}

TEST(RieszSurface, FarFieldBoundAndOnFaceRejection) {
    for (int d : {2, 3}) {
        const Grid g = Grid::cube(d, -0.5, 1.5, 8);
        const VoxelSet q = indicator_cube(g, {0, 0, 0}, 1.0);
        const SurfaceMeasure s = surface_measure(q);
        for (double a : {0.3, 1.0}) {
            Point x{0.5, 0.5, 0.5};
            x[0] += 100.0;
            const Point v = riesz_surface(s, a, x);
            double m = 0.0;
            for (int k = 0; k < d; ++k) m += v[k] * v[k];
            const double bound = q.perimeter() / gamma_norm(d, a) * std::pow(99.0, a - d) * 1.01;
            EXPECT_LE(std::sqrt(m), bound) << "d=" << d << " alpha=" << a;
        }
        Point on{0.5, 0.5, 0.5};
        on[d - 1] = 0.0;
        EXPECT_THROW(riesz_surface(s, 0.5, on), precondition_error);
    }
}

TEST(RieszSurface, LateralComponentsVanishBelowFaceCentre) {
    for (int d : {2, 3}) {
        const Grid g = Grid::cube(d, -0.5, 1.5, 8);
        const SurfaceMeasure s = surface_measure(indicator_cube(g, {0, 0, 0}, 1.0));
        for (double off : {1e-1, 1e-3, 1e-5}) {
            Point x{0.5, 0.5, 0.5};
            x[d - 1] = -off;
            const Point v = riesz_surface(s, 1.0, x);
            for (int k = 0; k + 1 < d; ++k) EXPECT_LT(std::abs(v[k]), 1e-10) << "d=" << d << " s=" << off;
            EXPECT_GT(std::abs(v[d - 1]), 0.1);
        }
    }
}

TEST(RieszSurface, MagnitudeIncreasesAsPlaneApproachesFace) {
    for (int d : {2, 3}) {
        const Grid g = Grid::cube(d, -0.5, 1.5, 8);
        const SurfaceMeasure s = surface_measure(indicator_cube(g, {0, 0, 0}, 1.0), true);
        double prev = 0.0;
        for (double off = 1e-1; off >= 1e-6 * 0.999; off /= std::sqrt(10.0)) {
            Point x{0.5, 0.5, 0.5};
            x[d - 1] = -off;
            const double v = std::abs(riesz_surface(s, 1.0, x)[d - 1]);
            EXPECT_GT(v, prev) << "d=" << d << " s=" << off;
            prev = v;
        }
    }
}

TEST(RieszSurface, MatchesCubeFaceIntegralsUpToNormalization) {
    for (int d : {2, 3}) {
        const Grid g = Grid::cube(d, -0.5, 1.5, 8);
        const SurfaceMeasure s = surface_measure(indicator_cube(g, {0, 0, 0}, 1.0), true);
        const std::vector<double> xp = d == 2 ? std::vector<double>{0.3} : std::vector<double>{0.3, 0.8};
        for (double off : {0.3, 1e-3}) {
            Point x{0, 0, 0};
            for (int k = 0; k + 1 < d; ++k) x[k] = xp[k];
            x[d - 1] = -off;
            const double surf = riesz_surface(s, 1.0, x, 1e-10)[d - 1] * gamma_norm(d, 1.0);
            EXPECT_NEAR(surf / face_integral_cube(d, xp, off), 1.0, 1e-7) << "d=" << d << " s=" << off;
        }
    }
}

TEST(FaceIntegralCube, FarFaceIsBoundedByUnitArea) {
    for (int d : {2, 3})
        for (double s : {1e-6, 1e-3, 0.1, 0.5, 5.0})
            for (double a : {0.0, 0.25, 0.5, 1.0}) {
                const std::vector<double> xp(static_cast<std::size_t>(d - 1), a);
                const auto fi = cube_face_integrals(d, xp, s);
                EXPECT_LE(fi.far, 1.0);
                EXPECT_GT(fi.far, 0.0);
            }
}

TEST(FaceIntegralCube, NearFaceMatchesArcsinhInPlane) {
    const std::vector<double> xp{0.5};
    for (double s : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        const double exact = 2.0 * std::asinh(1.0 / (2.0 * s));
        EXPECT_NEAR(cube_face_integrals(2, xp, s).near / exact, 1.0, 1e-8) << "s=" << s;
        EXPECT_NEAR(cube_face_integrals(2, xp, s).far, 2.0 * std::asinh(0.5 / (1.0 + s)), 1e-9);
    }
    const std::vector<double> off{0.2};
    const double s = 1e-4;
    EXPECT_NEAR(cube_face_integrals(2, off, s).near, std::asinh(0.8 / s) + std::asinh(0.2 / s), 1e-8);
}

TEST(FaceIntegralCube, LogarithmicGrowthPerDecade) {
    // Per decade the magnitude grows by C ln 10 with C = |S^{d-2}|: 2 in the
    // plane, 2 pi in space.
    for (int d : {2, 3}) {
        const double c = d == 2 ? 2.0 : 2.0 * std::numbers::pi;
        const std::vector<double> xp(static_cast<std::size_t>(d - 1), 0.5);
        for (double s : {1e-3, 1e-4, 1e-5}) {
            const double step = std::abs(face_integral_cube(d, xp, s / 10)) - std::abs(face_integral_cube(d, xp, s));
            EXPECT_NEAR(step / (c * std::log(10.0)), 1.0, 0.01) << "d=" << d << " s=" << s;
        }
        EXPECT_LT(face_integral_cube(d, xp, 1e-4), 0.0);
    }
    const std::vector<double> outside{2.0};
    EXPECT_NEAR(face_integral_cube(2, outside, 1e-6), face_integral_cube(2, outside, 1e-3), 0.01);
    EXPECT_THROW(face_integral_cube(2, outside, 0.0), precondition_error);
}
