#pragma once

// Riesz potentials I_a f = gamma(a)^{-1} |x|^{a-d} * f, fractional gradients,
// the Riesz transform and the fractional Laplacian on uniform grids, plus
// surface-measure potentials evaluated by adaptive face quadrature.
//
// Three independent routes compute I_a f on a grid:
//   riesz_direct  O(N^2) product-integration sum (reference)
//   riesz_fft     the same sum as a zero-padded FFT convolution
//   riesz_heat    the heat-semigroup representation
//                 I_a f = Gamma(a/2)^{-1} int_0^inf t^{a/2-1} p_t * f dt

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "fracgrad/error.hpp"
#include "fracgrad/fft.hpp"
#include "fracgrad/fields.hpp"
#include "fracgrad/kernels.hpp"
#include "fracgrad/quadrature.hpp"
#include "fracgrad/report.hpp"

namespace fracgrad {

/// Integral of |y|^{a-d} over the cell of widths h centred at o*h. Since
/// div(y |y|^{a-d}) = a |y|^{a-d}, it reduces to smooth integrals over the
/// 2d faces: (1/a) sum_faces (y.n) int_face |y|^{a-d} dA, with y.n constant
/// on each face. Valid for every cell, including the one holding 0.
inline double cell_integral(int d, double alpha, const Point& h, const fft::Offset& o) {
    KernelParams{d, alpha}.validate();
    require(d == 2 || d == 3, "cell_integral: d must be 2 or 3");
    const double expo = 0.5 * (alpha - d);
    double total = 0.0;
    for (int a = 0; a < d; ++a) {
        std::array<int, 2> tang{};
        int m = 0;
        for (int k = 0; k < d; ++k)
            if (k != a) tang[m++] = k;
        for (int side : {-1, 1}) {
            const double plane = (static_cast<double>(o[a]) + 0.5 * side) * h[a];
            const double flux = plane * side;  // y.n on this face
            if (plane == 0.0) continue;
            double face = 0.0;
            if (d == 2) {
                const int k = tang[0];
                const double c = static_cast<double>(o[k]) * h[k];
                auto f = [&](const std::array<double, 1>& u) { return std::pow(plane * plane + u[0] * u[0], expo); };
                face = quad::integrate_box<1>(f, {c - 0.5 * h[k]}, {c + 0.5 * h[k]}, 1e-13).value;
            } else {
                const int k0 = tang[0], k1 = tang[1];
                const double c0 = static_cast<double>(o[k0]) * h[k0], c1 = static_cast<double>(o[k1]) * h[k1];
                auto f = [&](const std::array<double, 2>& u) {
                    return std::pow(plane * plane + u[0] * u[0] + u[1] * u[1], expo);
                };
                face = quad::integrate_box<2>(f, {c0 - 0.5 * h[k0], c1 - 0.5 * h[k1]},
                                              {c0 + 0.5 * h[k0], c1 + 0.5 * h[k1]}, 1e-13)
                           .value;
            }
            total += flux * face / alpha;
        }
    }
    return total;
}

/// Integral of |y|^{a-d} over the cell [-h/2, h/2]^d.
inline double self_cell_integral(int d, double alpha, const Point& h) {
    return cell_integral(d, alpha, h, {0, 0, 0});
}

/// Discrete Riesz kernel on a grid: weight of a sample at cell offset o.
/// Within `near` cells (sup norm) of the target the weight is the exact
/// cell integral of |y|^{a-d} (product integration); beyond that it is the
/// point sample |o h|^{a-d} prod(h).
class RieszKernel {
public:
    static constexpr int default_near = 4;

    RieszKernel(const Grid& g, double alpha, int near = default_near)
        : d_(g.dim()), alpha_(alpha), h_(g.h()), near_(near) {
        KernelParams{d_, alpha}.validate();
        require(near >= 0, "RieszKernel: near-field radius must be >= 0");
        inv_gamma_ = 1.0 / gamma_norm(d_, alpha);
        vol_ = g.cell_volume();
        const int w = near_ + 1;
        near_table_.assign(static_cast<std::size_t>(d_ == 2 ? w * w : w * w * w), 0.0);
        for (int a = 0; a <= near_; ++a)
            for (int b = 0; b <= near_; ++b)
                for (int c = 0; c <= (d_ == 3 ? near_ : 0); ++c)
                    near_table_[slot({a, b, c})] = cell_integral(d_, alpha, h_, {a, b, c}) * inv_gamma_;
    }

    double operator()(const fft::Offset& o) const {
        fft::Offset a{std::abs(o[0]), std::abs(o[1]), std::abs(o[2])};
        if (a[0] <= near_ && a[1] <= near_ && a[2] <= near_) return near_table_[slot(a)];
        double r2 = 0.0;
        for (int k = 0; k < d_; ++k) {
            const double x = static_cast<double>(o[k]) * h_[k];
            r2 += x * x;
        }
        return std::pow(r2, 0.5 * (alpha_ - d_)) * vol_ * inv_gamma_;
    }

    double self_weight() const { return near_table_[0]; }
    int near() const { return near_; }

private:
    std::size_t slot(const fft::Offset& a) const {
        const auto w = static_cast<std::size_t>(near_ + 1);
        return (static_cast<std::size_t>(a[0]) * w + static_cast<std::size_t>(a[1])) * (d_ == 3 ? w : 1) +
               static_cast<std::size_t>(a[2]);
    }

    int d_;
    double alpha_;
    Point h_;
    int near_;
    double inv_gamma_ = 0.0;
    double vol_ = 0.0;
    std::vector<double> near_table_;
};

/// Reference O(N^2) evaluation of I_a f at one sample.
inline double riesz_direct_at(const ScalarField& f, double alpha, std::size_t target) {
    const Grid& g = f.grid;
    RieszKernel k(g, alpha);
    const Index ti = g.multi(target);
    double sum = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (f.values[j] == 0.0) continue;
        const Index jj = g.multi(j);
        fft::Offset o{};
        for (int a = 0; a < 3; ++a) o[a] = static_cast<long>(ti[a]) - static_cast<long>(jj[a]);
        sum += k(o) * f.values[j];
    }
    return sum;
}

/// Reference O(N^2) product-integration sum for I_a f on every sample.
inline ScalarField riesz_direct(const ScalarField& f, double alpha) {
    const Grid& g = f.grid;
    RieszKernel k(g, alpha);
    const int d = g.dim();
    // Tabulate the kernel over all offsets so the double loop is a lookup.
    std::array<long, 3> span{1, 1, 1};
    for (int a = 0; a < d; ++a) span[a] = 2 * static_cast<long>(g.n()[a]) - 1;
    std::vector<double> table(static_cast<std::size_t>(span[0] * span[1] * span[2]));
    for (long a = 0; a < span[0]; ++a)
        for (long b = 0; b < span[1]; ++b)
            for (long c = 0; c < span[2]; ++c) {
                fft::Offset o{a - (span[0] - 1) / 2, b - (span[1] - 1) / 2, c - (span[2] - 1) / 2};
                table[static_cast<std::size_t>((a * span[1] + b) * span[2] + c)] = k(o);
            }
    ScalarField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Index ii = g.multi(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double fj = f.values[j];
            if (fj == 0.0) continue;
            const Index jj = g.multi(j);
            long idx[3];
            for (int a = 0; a < 3; ++a)
                idx[a] = static_cast<long>(ii[a]) - static_cast<long>(jj[a]) + (span[a] - 1) / 2;
            sum += table[static_cast<std::size_t>((idx[0] * span[1] + idx[1]) * span[2] + idx[2])] * fj;
        }
        out.values[i] = sum;
    }
    return out;
}

/// I_a f by zero-padded FFT convolution with the same discrete kernel as
/// riesz_direct. `pad` >= 2 is the padding factor per axis.
inline ScalarField riesz_fft(const ScalarField& f, double alpha, int pad = 2) {
    const Grid& g = f.grid;
    for (int k = 0; k < g.dim(); ++k) require(g.n()[k] >= 4, "riesz_fft: grid too small to pad (n < 4)");
    RieszKernel k(g, alpha);
    return ScalarField(g, fft::convolve_linear(g, f.values, k, pad));
}

/// Mass of the 1-d heat kernel p_t over [a, b].
inline double heat_interval_mass(double a, double b, double t) {
    const double s = 2.0 * std::sqrt(t);
    // erfc differences keep precision in the far tails.
    if (a >= 0.0) return 0.5 * (std::erfc(a / s) - std::erfc(b / s));
    if (b <= 0.0) return 0.5 * (std::erfc(-b / s) - std::erfc(-a / s));
    return 0.5 * (std::erf(b / s) - std::erf(a / s));
}

/// 1-d heat kernel (4 pi t)^{-1/2} exp(-z^2 / 4t).
inline double heat_kernel_1d(double z, double t) {
    const double e = -z * z / (4.0 * t);
    if (e < -745.0) return 0.0;
    return std::exp(e) / std::sqrt(4.0 * std::numbers::pi * t);
}

/// Mass of the 1-d heat kernel over the cell of width h at offset o.
inline double heat_cell_mass_1d(long o, double h, double t) {
    const double c = static_cast<double>(o) * h;
    return heat_interval_mass(c - 0.5 * h, c + 0.5 * h, t);
}

/// Per-axis tables of cell masses over the offsets a padded convolution
/// visits, [-(n-1), P-n].
class HeatCellTables {
public:
    HeatCellTables(const Grid& g, double t, int pad) : d_(g.dim()) {
        const auto shape = fft::padded_shape(g, pad);
        for (int k = 0; k < d_; ++k) {
            const long n = static_cast<long>(g.n()[k]);
            lo_[k] = -(n - 1);
            const long hi = shape[static_cast<std::size_t>(k)] - n;
            auto& m = mass_[k];
            auto& dg = grad_[k];
            for (long o = lo_[k]; o <= hi; ++o) {
                m.push_back(heat_cell_mass_1d(o, g.h()[k], t));
                // Integral over the cell of d/dx p_t(x - y): the kernel's
                // values at the two cell walls.
                const double c = static_cast<double>(o) * g.h()[k];
                dg.push_back(heat_kernel_1d(c + 0.5 * g.h()[k], t) - heat_kernel_1d(c - 0.5 * g.h()[k], t));
            }
        }
    }

    double mass(int k, long o) const { return mass_[k][static_cast<std::size_t>(o - lo_[k])]; }
    double grad(int k, long o) const { return grad_[k][static_cast<std::size_t>(o - lo_[k])]; }
    int dim() const { return d_; }

private:
    int d_;
    std::array<long, 3> lo_{};
    std::array<std::vector<double>, 3> mass_;
    std::array<std::vector<double>, 3> grad_;
};

/// Cell-integrated heat kernel: weight of cell offset o for p_t * f.
struct HeatCellKernel {
    const HeatCellTables* tab;
    double operator()(const fft::Offset& o) const {
        double w = 1.0;
        for (int k = 0; k < tab->dim(); ++k) w *= tab->mass(k, o[k]);
        return w;
    }
};

/// Cell-integrated gradient of the heat kernel, component `axis`.
struct HeatCellGradKernel {
    const HeatCellTables* tab;
    int axis;
    double operator()(const fft::Offset& o) const {
        double w = 1.0;
        for (int k = 0; k < tab->dim(); ++k) w *= k == axis ? tab->grad(k, o[k]) : tab->mass(k, o[k]);
        return w;
    }
};

/// p_t * f with f piecewise constant on cells (exact cell integrals of p_t).
inline ScalarField gaussian_convolve(const ScalarField& f, double t, int pad = 2) {
    require(t > 0.0, "gaussian_convolve: time must be positive");
    const Grid& g = f.grid;
    const HeatCellTables tab(g, t, pad);
    return ScalarField(g, fft::convolve_linear(g, f.values, HeatCellKernel{&tab}, pad));
}

/// Convolution with the Gaussian mollifier of standard deviation `width`
/// (the heat kernel at t = width^2 / 2).
inline ScalarField mollify(const ScalarField& f, double width, int pad = 2) {
    require(width > 0.0, "mollify: width must be positive");
    return gaussian_convolve(f, 0.5 * width * width, pad);
}

/// Log-spaced trapezoid rule in tau = ln t for the semigroup integral.
struct SemigroupQuadrature {
    double t_min = 1e-4;
    double t_max = 1e2;
    int m = 64;

    void validate() const {
        require(t_min > 0.0 && t_min < t_max, "semigroup quadrature: need 0 < t_min < t_max");
        require(m >= 8, "semigroup quadrature: need at least 8 nodes");
    }

    /// Covers the resolved scales of g: [h^2/16, 4 diam^2].
    static SemigroupQuadrature for_grid(const Grid& g, int m = 64) {
        const double h = g.min_spacing();
        const double diam = g.diameter();
        return {h * h / 16.0, 4.0 * diam * diam, m};
    }

    std::vector<double> nodes() const {
        std::vector<double> t(static_cast<std::size_t>(m));
        const double l0 = std::log(t_min), l1 = std::log(t_max);
        for (int k = 0; k < m; ++k) t[static_cast<std::size_t>(k)] = std::exp(l0 + (l1 - l0) * k / (m - 1));
        return t;
    }
};

/// I_a f through the heat semigroup. Beyond the trapezoid sum over
/// [t_min, t_max] two closed-form end corrections are added: below t_min
/// p_t * f ~ f, above t_max p_t * f ~ (4 pi t)^{-d/2} int f.
inline ScalarField riesz_heat(const ScalarField& f, double alpha, const SemigroupQuadrature& q, int pad = 2) {
    const Grid& g = f.grid;
    const int d = g.dim();
    KernelParams{d, alpha}.validate();
    q.validate();
    const double h = g.min_spacing();
    const double diam = g.diameter();
    require(q.t_min <= h * h, "riesz_heat: t_min must not exceed h^2");
    require(q.t_max >= diam * diam, "riesz_heat: t_max must reach the squared box diameter");

    const double inv_gamma = 1.0 / std::tgamma(alpha / 2.0);
    const auto t = q.nodes();
    const double dtau = (std::log(q.t_max) - std::log(q.t_min)) / (q.m - 1);
    fft::Convolver conv(g, f.values, pad);
    std::vector<double> acc(g.size(), 0.0);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double w = dtau * ((k == 0 || k + 1 == t.size()) ? 0.5 : 1.0) * std::pow(t[k], alpha / 2.0);
        const HeatCellTables tab(g, t[k], pad);
        const auto pf = conv.apply(HeatCellKernel{&tab});
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * pf[i];
    }
    double mass = 0.0;
    for (double v : f.values) mass += v;
    mass *= g.cell_volume();
    const double head = std::pow(q.t_min, alpha / 2.0) / (alpha / 2.0);
    const double tail = std::pow(4.0 * std::numbers::pi, -d / 2.0) * mass *
                        std::pow(q.t_max, (alpha - d) / 2.0) / ((d - alpha) / 2.0);
    ScalarField out(g);
    for (std::size_t i = 0; i < acc.size(); ++i) out.values[i] = inv_gamma * (acc[i] + head * f.values[i] + tail);
    return out;
}

/// Central differences in the interior, one-sided differences on the
/// outermost cells.
inline VectorField central_gradient(const ScalarField& f) {
    const Grid& g = f.grid;
    const int d = g.dim();
    VectorField out(g);
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
        const Index i = g.multi(lin);
        for (int a = 0; a < d; ++a) {
            const std::size_t n = g.n()[a];
            Index lo = i, hi = i;
            double span = 2.0;
            if (i[a] == 0) {
                hi[a] = 1;
                span = 1.0;
            } else if (i[a] + 1 == n) {
                lo[a] = n - 2;
                span = 1.0;
            } else {
                lo[a] = i[a] - 1;
                hi[a] = i[a] + 1;
            }
            out.components[static_cast<std::size_t>(a)][lin] =
                (f.values[g.linear(hi)] - f.values[g.linear(lo)]) / (span * g.h()[a]);
        }
    }
    return out;
}

/// D^a u = grad I_{1-a} u. The outermost two cells carry one-sided or
/// truncated stencils; see boundary_band().
inline VectorField frac_gradient(const ScalarField& u, double alpha, int pad = 2) {
    require(alpha > 0.0 && alpha < 1.0, "frac_gradient: alpha must lie in (0,1)");
    return central_gradient(riesz_fft(u, 1.0 - alpha, pad));
}

/// Vector Riesz transform R u = grad I_1 u.
inline VectorField riesz_transform(const ScalarField& u, int pad = 2) {
    return central_gradient(riesz_fft(u, 1.0, pad));
}

/// Mean of |xi|^s over the box prod [-a_k, a_k] (d = 2 or 3), by the
/// divergence theorem: div(xi |xi|^s) = (d + s) |xi|^s.
inline double mean_power_over_box(int d, double s, const Point& a) {
    double total = 0.0;
    double vol = 1.0;
    for (int k = 0; k < d; ++k) vol *= 2.0 * a[k];
    for (int k = 0; k < d; ++k) {
        std::array<int, 2> tang{};
        int m = 0;
        for (int j = 0; j < d; ++j)
            if (j != k) tang[m++] = j;
        const double p2 = a[k] * a[k];
        double face = 0.0;
        if (d == 2) {
            auto f = [&](const std::array<double, 1>& u) { return std::pow(p2 + u[0] * u[0], 0.5 * s); };
            face = quad::integrate_box<1>(f, {-a[tang[0]]}, {a[tang[0]]}, 1e-13).value;
        } else {
            auto f = [&](const std::array<double, 2>& u) { return std::pow(p2 + u[0] * u[0] + u[1] * u[1], 0.5 * s); };
            face = quad::integrate_box<2>(f, {-a[tang[0]], -a[tang[1]]}, {a[tang[0]], a[tang[1]]}, 1e-13).value;
        }
        total += 2.0 * a[k] * face;
    }
    return total / ((d + s) * vol);
}

/// (-Delta)^{s/2} u through the multiplier |xi|^s on the padded box. The
/// zero mode takes the mean of |xi|^s over its frequency cell instead of
/// the point value 0, so the box average of the output is not discarded.
inline ScalarField frac_laplacian(const ScalarField& u, double s, int pad = 2) {
    require(s > 0.0 && s < 1.0, "frac_laplacian: order must lie in (0,1)");
    const Grid& g = u.grid;
    const auto shape = fft::padded_shape(g, pad);
    Point half{};
    for (int k = 0; k < g.dim(); ++k) half[k] = std::numbers::pi / (shape[static_cast<std::size_t>(k)] * g.h()[k]);
    const double zero_mode = mean_power_over_box(g.dim(), s, half);
    auto m = [s, zero_mode](double xi2) { return xi2 == 0.0 ? zero_mode : std::pow(xi2, 0.5 * s); };
    return ScalarField(g, fft::apply_multiplier(g, u.values, m, pad));
}

namespace detail {

/// Integral over face f of |x - y|^{a-d} dA(y), in displacement coordinates
/// so that near-singular evaluations keep full precision.
inline double face_kernel_integral(const Face& f, int d, double alpha, const Point& x, double rel_tol) {
    const double delta = f.center[f.axis] - x[f.axis];
    const double expo = 0.5 * (alpha - d);
    std::array<int, 2> tang{};
    int m = 0;
    for (int k = 0; k < d; ++k)
        if (k != f.axis) tang[m++] = k;
    if (d == 2) {
        const int k = tang[0];
        const double lo = f.center[k] - 0.5 * f.size[k] - x[k];
        const double hi = f.center[k] + 0.5 * f.size[k] - x[k];
        auto fn = [&](const std::array<double, 1>& u) { return std::pow(delta * delta + u[0] * u[0], expo); };
        return quad::integrate_box_split<1>(fn, {lo}, {hi}, {0.0}, rel_tol).value;
    }
    const int k0 = tang[0], k1 = tang[1];
    const std::array<double, 2> lo{f.center[k0] - 0.5 * f.size[k0] - x[k0], f.center[k1] - 0.5 * f.size[k1] - x[k1]};
    const std::array<double, 2> hi{f.center[k0] + 0.5 * f.size[k0] - x[k0], f.center[k1] + 0.5 * f.size[k1] - x[k1]};
    auto fn = [&](const std::array<double, 2>& u) {
        return std::pow(delta * delta + u[0] * u[0] + u[1] * u[1], expo);
    };
    return quad::integrate_box_split<2>(fn, lo, hi, {0.0, 0.0}, rel_tol).value;
}

inline bool on_face(const Face& f, int d, const Point& x, double eps) {
    if (std::abs(f.center[f.axis] - x[f.axis]) > eps) return false;
    for (int k = 0; k < d; ++k) {
        if (k == f.axis) continue;
        if (std::abs(x[k] - f.center[k]) > 0.5 * f.size[k] + eps) return false;
    }
    return true;
}

inline double surface_diameter(const SurfaceMeasure& s) {
    Point lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (const auto& f : s.faces)
        for (int k = 0; k < s.d; ++k) {
            lo[k] = std::min(lo[k], f.center[k] - 0.5 * f.size[k]);
            hi[k] = std::max(hi[k], f.center[k] + 0.5 * f.size[k]);
        }
    double r = 0.0;
    for (int k = 0; k < s.d; ++k) r += (hi[k] - lo[k]) * (hi[k] - lo[k]);
    return std::sqrt(r);
}

} // namespace detail

/// gamma(a)^{-1} int |x - y|^{a-d} nu(y) dH^{d-1}(y) over the faces of S,
/// with nu the exterior normal. This is -I_a D chi_E for S = surface of E.
/// Each face integral is adaptive to relative tolerance `rel_tol`.
inline Point riesz_surface(const SurfaceMeasure& s, double alpha, const Point& x, double rel_tol = 1e-8) {
    KernelParams{s.d, alpha}.validate();
    require(!s.faces.empty(), "riesz_surface: empty surface measure");
    const double eps = 1e-9 * detail::surface_diameter(s);
    const double inv_gamma = 1.0 / gamma_norm(s.d, alpha);
    Point out{};
    for (const auto& f : s.faces) {
        require(!detail::on_face(f, s.d, x, eps), "riesz_surface: evaluation point lies on a face");
        const double v = detail::face_kernel_integral(f, s.d, alpha, x, rel_tol);
        out[f.axis] += f.sign * v * inv_gamma;
    }
    return out;
}

struct CubeFaceIntegrals {
    double far = 0.0;   // over the face y_d = 1
    double near = 0.0;  // over the face y_d = 0
    double value() const { return far - near; }
};

/// Unnormalized d-th component of I_1 D chi_Q at (x', -s) for Q = [0,1]^d:
/// int_{Q'} ((1+s)^2 + |x'-y'|^2)^{-(d-1)/2} dy'
///   - int_{Q'} (s^2 + |x'-y'|^2)^{-(d-1)/2} dy'.
inline CubeFaceIntegrals cube_face_integrals(int d, std::span<const double> xprime, double s,
                                             double rel_tol = 1e-10) {
    require(d == 2 || d == 3, "face_integral_cube: d must be 2 or 3");
    require(xprime.size() == static_cast<std::size_t>(d - 1), "face_integral_cube: x' must have d-1 coordinates");
    require(s > 0.0, "face_integral_cube: offset s must be positive");
    const double expo = -0.5 * (d - 1);
    CubeFaceIntegrals out;
    const double far2 = (1.0 + s) * (1.0 + s);
    const double near2 = s * s;
    if (d == 2) {
        const std::array<double, 1> lo{-xprime[0]}, hi{1.0 - xprime[0]};
        auto nf = [&](const std::array<double, 1>& u) { return std::pow(near2 + u[0] * u[0], expo); };
        auto ff = [&](const std::array<double, 1>& u) { return std::pow(far2 + u[0] * u[0], expo); };
        out.near = quad::integrate_box_split<1>(nf, lo, hi, {0.0}, rel_tol, 200000).value;
        out.far = quad::integrate_box_split<1>(ff, lo, hi, {0.0}, rel_tol).value;
    } else {
        const std::array<double, 2> lo{-xprime[0], -xprime[1]}, hi{1.0 - xprime[0], 1.0 - xprime[1]};
        auto nf = [&](const std::array<double, 2>& u) { return std::pow(near2 + u[0] * u[0] + u[1] * u[1], expo); };
        auto ff = [&](const std::array<double, 2>& u) { return std::pow(far2 + u[0] * u[0] + u[1] * u[1], expo); };
        out.near = quad::integrate_box_split<2>(nf, lo, hi, {0.0, 0.0}, rel_tol, 200000).value;
        out.far = quad::integrate_box_split<2>(ff, lo, hi, {0.0, 0.0}, rel_tol).value;
    }
    return out;
}

inline double face_integral_cube(int d, std::span<const double> xprime, double s) {
    return cube_face_integrals(d, xprime, s).value();
}

/// Embeds f in a grid `factor` times larger per axis with the same spacing
/// and the same centre. (factor - 1) n must be even on every axis.
inline ScalarField embed(const ScalarField& f, int factor) {
    require(factor >= 1, "embed: factor must be >= 1");
    const Grid& g = f.grid;
    const int d = g.dim();
    Point origin = g.origin(), extent = g.extent();
    Index n = g.n();
    Index shift{0, 0, 0};
    for (int k = 0; k < d; ++k) {
        const std::size_t extra = (static_cast<std::size_t>(factor) - 1) * g.n()[k];
        require(extra % 2 == 0, "embed: (factor-1) n must be even");
        shift[k] = extra / 2;
        n[k] = g.n()[k] * static_cast<std::size_t>(factor);
        origin[k] -= static_cast<double>(shift[k]) * g.h()[k];
        extent[k] = static_cast<double>(n[k]) * g.h()[k];
    }
    ScalarField out(Grid(d, origin, extent, n));
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
        Index i = g.multi(lin);
        for (int k = 0; k < d; ++k) i[k] += shift[k];
        out.values[out.grid.linear(i)] = f.values[lin];
    }
    return out;
}

/// Restriction of a field produced by embed(.., factor) back to `inner`.
inline ScalarField crop(const ScalarField& big, const Grid& inner) {
    const int d = inner.dim();
    Index shift{0, 0, 0};
    for (int k = 0; k < d; ++k)
        shift[k] = static_cast<std::size_t>(std::llround((inner.origin()[k] - big.grid.origin()[k]) / inner.h()[k]));
    ScalarField out(inner);
    for (std::size_t lin = 0; lin < inner.size(); ++lin) {
        Index i = inner.multi(lin);
        for (int k = 0; k < d; ++k) i[k] += shift[k];
        out.values[lin] = big.values[big.grid.linear(i)];
    }
    return out;
}

inline double l2_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline double l2_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

/// Compares I_b(I_a f) with I_{a+b} f. Both sides are computed with
/// riesz_fft on f embedded in a box `extension` times larger, and compared
/// on the original grid, so the loss is the truncation of I_a f outside
/// the extended box.
inline Report semigroup_check(const ScalarField& f, double alpha, double beta, int extension = 4) {
    const int d = f.grid.dim();
    KernelParams{d, alpha}.validate();
    KernelParams{d, beta}.validate();
    KernelParams{d, alpha + beta}.validate();
    Report r;
    r.id = "semigroup";
    r.inputs = {{"alpha", alpha}, {"beta", beta}, {"d", d}, {"extension", extension}};
    const ScalarField big = embed(f, extension);
    const ScalarField lhs = crop(riesz_fft(riesz_fft(big, alpha), beta), f.grid);
    const ScalarField rhs = crop(riesz_fft(big, alpha + beta), f.grid);
    const double norm = l2_norm(rhs.values);
    const double dev = norm == 0.0 ? 0.0 : l2_distance(lhs.values, rhs.values) / norm;
    r.metrics["l2_relative_deviation"] = dev;
    r.check("semigroup_l2_relative_deviation", dev, "<", 0.02);
    r.finalize();
    return r;
}

} // namespace fracgrad
