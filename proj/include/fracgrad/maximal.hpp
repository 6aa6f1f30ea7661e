#pragma once

// Discrete heat maximal functions over a log-spaced time grid:
//   surface:  max_t |p_t * D chi_E|(x)            (direct sum over faces)
//   gradient: max_t |t^{1/2} (grad p_t) * chi_E|(x) (FFT, exact cell weights)

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "fracgrad/error.hpp"
#include "fracgrad/fft.hpp"
#include "fracgrad/fields.hpp"
#include "fracgrad/kernels.hpp"
#include "fracgrad/potentials.hpp"
#include "fracgrad/report.hpp"

namespace fracgrad {

struct TimeGrid {
    std::vector<double> t;

    void validate() const {
        require(t.size() >= 16, "time grid needs at least 16 nodes");
        require(t.front() > 0.0, "time grid must be positive");
        for (std::size_t i = 1; i < t.size(); ++i) require(t[i] > t[i - 1], "time grid must be strictly increasing");
    }

    static TimeGrid log_spaced(double lo, double hi, int count) {
        require(lo > 0.0 && lo < hi, "time grid: need 0 < lo < hi");
        require(count >= 16, "time grid needs at least 16 nodes");
        TimeGrid g;
        const double a = std::log(lo), b = std::log(hi);
        for (int k = 0; k < count; ++k) g.t.push_back(std::exp(a + (b - a) * k / (count - 1)));
        g.t.back() = hi;
        return g;
    }

    /// [h^2/4, 4 diam^2] for the given grid.
    static TimeGrid for_grid(const Grid& g, int count = 64) {
        const double h = g.min_spacing();
        const double diam = g.diameter();
        return log_spaced(0.25 * h * h, 4.0 * diam * diam, count);
    }

    /// Inserts the geometric midpoint of every interval; a superset of *this.
    TimeGrid refined() const {
        TimeGrid r;
        for (std::size_t i = 0; i < t.size(); ++i) {
            r.t.push_back(t[i]);
            if (i + 1 < t.size()) r.t.push_back(std::sqrt(t[i] * t[i + 1]));
        }
        return r;
    }

    double decades() const { return std::log10(t.back() / t.front()); }
};

namespace detail {

/// Coordinates of the cell centres of g along axis k.
inline std::vector<double> axis_centres(const Grid& g, int k) {
    std::vector<double> x(g.n()[k]);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = g.origin()[k] + (static_cast<double>(i) + 0.5) * g.h()[k];
    return x;
}

/// The vector field sum_faces nu * int_face p_t(x - y) dA(y) on the cells
/// of g (that is -p_t * D chi_E). Faces sharing a plane are summed in their
/// tangential factors first, so the cost per plane is one pass over g.
inline std::vector<std::vector<double>> surface_heat_flux(const SurfaceMeasure& s, const Grid& g, double t) {
    const int d = s.d;
    require(g.dim() == d, "heat_maximal_surface: grid and surface dimensions differ");
    std::array<std::vector<double>, 3> xs;
    for (int k = 0; k < d; ++k) xs[k] = axis_centres(g, k);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(d), std::vector<double>(g.size(), 0.0));

    for (int a = 0; a < d; ++a) {
        std::array<int, 2> tang{0, 0};
        int m = 0;
        for (int k = 0; k < d; ++k)
            if (k != a) tang[m++] = k;
        const std::size_t n0 = xs[tang[0]].size();
        const std::size_t n1 = d == 3 ? xs[tang[1]].size() : 1;
        // plane position -> summed tangential factor over (tang0, tang1)
        std::map<double, std::vector<double>> planes;
        std::vector<double> f0(n0), f1(n1, 1.0);
        for (const auto& f : s.faces) {
            if (f.axis != a) continue;
            auto& acc = planes[f.center[a]];
            if (acc.empty()) acc.assign(n0 * n1, 0.0);
            const int k0 = tang[0];
            for (std::size_t i = 0; i < n0; ++i)
                f0[i] = heat_interval_mass(f.center[k0] - 0.5 * f.size[k0] - xs[k0][i],
                                           f.center[k0] + 0.5 * f.size[k0] - xs[k0][i], t);
            if (d == 3) {
                const int k1 = tang[1];
                for (std::size_t j = 0; j < n1; ++j)
                    f1[j] = heat_interval_mass(f.center[k1] - 0.5 * f.size[k1] - xs[k1][j],
                                               f.center[k1] + 0.5 * f.size[k1] - xs[k1][j], t);
            }
            for (std::size_t i = 0; i < n0; ++i) {
                if (f0[i] == 0.0) continue;
                const double w = f.sign * f0[i];
                for (std::size_t j = 0; j < n1; ++j) acc[i * n1 + j] += w * f1[j];
            }
        }
        auto& comp = out[static_cast<std::size_t>(a)];
        for (const auto& [c, acc] : planes) {
            std::vector<double> normal(xs[a].size());
            for (std::size_t i = 0; i < normal.size(); ++i) normal[i] = heat_kernel_1d(xs[a][i] - c, t);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t lin = 0; lin < static_cast<std::ptrdiff_t>(g.size()); ++lin) {
                const Index ii = g.multi(static_cast<std::size_t>(lin));
                const double nv = normal[ii[a]];
                if (nv == 0.0) continue;
                const std::size_t j = d == 3 ? ii[tang[1]] : 0;
                comp[static_cast<std::size_t>(lin)] += nv * acc[ii[tang[0]] * n1 + j];
            }
        }
    }
    return out;
}

inline double norm_at(const std::vector<std::vector<double>>& v, std::size_t i) {
    double s = 0.0;
    for (const auto& c : v) s += c[i] * c[i];
    return std::sqrt(s);
}

} // namespace detail

/// |p_t * D chi_E| on the cells of g at a single time.
inline ScalarField heat_surface_at(const SurfaceMeasure& s, const Grid& g, double t) {
    require(t > 0.0, "heat_surface_at: time must be positive");
    require(!s.faces.empty(), "heat_maximal_surface: empty surface measure");
    const auto v = detail::surface_heat_flux(s, g, t);
    ScalarField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = detail::norm_at(v, i);
    return out;
}

/// max over tg of |p_t * D chi_E| on the cells of g.
inline ScalarField heat_maximal_surface(const SurfaceMeasure& s, const Grid& g, const TimeGrid& tg) {
    require(!s.faces.empty(), "heat_maximal_surface: empty surface measure");
    tg.validate();
    ScalarField out(g);
    for (double t : tg.t) {
        const auto v = detail::surface_heat_flux(s, g, t);
        for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = std::max(out.values[i], detail::norm_at(v, i));
    }
    return out;
}

/// |t^{1/2} (grad p_t) * chi_E| on E's grid at a single time, with the
/// gradient kernel integrated exactly over each cell.
inline ScalarField heat_grad_set_at(const VoxelSet& e, double t, int pad = 2) {
    require(!e.empty(), "heat_grad_maximal_set: empty set");
    require(t > 0.0, "heat_grad_set_at: time must be positive");
    const Grid& g = e.grid;
    const ScalarField chi = e.indicator();
    fft::Convolver conv(g, chi.values, pad);
    const HeatCellTables tab(g, t, pad);
    ScalarField out(g);
    const double st = std::sqrt(t);
    for (int a = 0; a < g.dim(); ++a) {
        const auto c = conv.apply(HeatCellGradKernel{&tab, a});
        for (std::size_t i = 0; i < g.size(); ++i) out.values[i] += st * st * c[i] * c[i];
    }
    for (auto& v : out.values) v = std::sqrt(v);
    return out;
}

/// max over tg of |t^{1/2} (grad p_t) * chi_E| on E's grid.
inline ScalarField heat_grad_maximal_set(const VoxelSet& e, const TimeGrid& tg, int pad = 2) {
    require(!e.empty(), "heat_grad_maximal_set: empty set");
    tg.validate();
    const Grid& g = e.grid;
    fft::Convolver conv(g, e.indicator().values, pad);
    ScalarField out(g);
    std::vector<double> sq(g.size());
    for (double t : tg.t) {
        const HeatCellTables tab(g, t, pad);
        std::fill(sq.begin(), sq.end(), 0.0);
        for (int a = 0; a < g.dim(); ++a) {
            const auto c = conv.apply(HeatCellGradKernel{&tab, a});
            for (std::size_t i = 0; i < g.size(); ++i) sq[i] += c[i] * c[i];
        }
        const double st = std::sqrt(t);
        for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = std::max(out.values[i], st * std::sqrt(sq[i]));
    }
    return out;
}

/// Weak-type surrogate over a family of sets: for each set and level l the
/// product l |{M_E > l}| / mass(S_E), with M_E the surface heat maximal
/// function. The largest product is the fitted constant; nothing is asserted.
inline Report weak_type_surrogate(const std::vector<std::pair<std::string, VoxelSet>>& family, const TimeGrid& tg,
                                  int levels = 40) {
    require(!family.empty(), "weak_type_surrogate: empty family");
    Report r;
    r.id = "maximal_weak_type";
    r.inputs = {{"sets", family.size()}, {"time_nodes", tg.t.size()}, {"levels", levels}};
    Table tab{"weak_type", {"set", "level", "measure", "mass", "ratio"}, {}};
    double fitted = 0.0;
    for (const auto& [name, e] : family) {
        const SurfaceMeasure s = surface_measure(e, true);
        const ScalarField m = heat_maximal_surface(s, e.grid, tg);
        const double top = m.max_abs();
        double low = top;
        for (double v : m.values)
            if (v > 0.0) low = std::min(low, v);
        for (int k = 0; k < levels; ++k) {
            const double l = low * std::pow(top / low, (k + 0.5) / levels);
            std::size_t count = 0;
            for (double v : m.values) count += v > l;
            const double meas = static_cast<double>(count) * e.grid.cell_volume();
            const double ratio = l * meas / s.mass();
            fitted = std::max(fitted, ratio);
            tab.add({name, l, meas, s.mass(), ratio});
        }
    }
    r.tables.push_back(std::move(tab));
    r.metrics["fitted_constant"] = fitted;
    r.notes.push_back("fitted constant is reported, not compared with a theoretical value");
    r.finalize();
    return r;
}

} // namespace fracgrad
