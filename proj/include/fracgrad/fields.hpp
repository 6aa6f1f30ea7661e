#pragma once

// Uniform cell-centred grids, sampled fields, voxel sets and their oriented
// boundary faces.
//
// Storage is row-major: the last axis varies fastest. Sample i along axis k
// sits at origin[k] + (i + 1/2) h[k].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fracgrad/error.hpp"

namespace fracgrad {

using Point = std::array<double, 3>;
using Index = std::array<std::size_t, 3>;

class Grid {
public:
    Grid() = default;

    Grid(int d, Point origin, Point extent, Index n) : d_(d), origin_(origin), extent_(extent), n_(n) {
        require(d == 2 || d == 3, "grid dimension must be 2 or 3, got " + std::to_string(d));
        for (int k = 0; k < d; ++k) {
            require(extent[k] > 0.0, "grid extent must be positive on every axis");
            require(n[k] >= 2, "grid needs at least 2 samples per axis");
            h_[k] = extent[k] / static_cast<double>(n[k]);
        }
        for (std::size_t k = static_cast<std::size_t>(d); k < 3; ++k) {
            origin_[k] = 0.0;
            extent_[k] = 1.0;
            n_[k] = 1;
            h_[k] = 1.0;
        }
    }

    /// Cube grid [lo, hi]^d with n samples per axis.
    static Grid cube(int d, double lo, double hi, std::size_t n) {
        return Grid(d, {lo, lo, lo}, {hi - lo, hi - lo, hi - lo}, {n, n, n});
    }

    int dim() const { return d_; }
    const Point& origin() const { return origin_; }
    const Point& extent() const { return extent_; }
    const Index& n() const { return n_; }
    const Point& h() const { return h_; }

    std::size_t size() const { return n_[0] * n_[1] * n_[2]; }

    double cell_volume() const {
        double v = 1.0;
        for (int k = 0; k < d_; ++k) v *= h_[k];
        return v;
    }

    double diameter() const {
        double s = 0.0;
        for (int k = 0; k < d_; ++k) s += extent_[k] * extent_[k];
        return std::sqrt(s);
    }

    double min_spacing() const {
        double m = h_[0];
        for (int k = 1; k < d_; ++k) m = std::min(m, h_[k]);
        return m;
    }

    std::size_t linear(const Index& i) const { return (i[0] * n_[1] + i[1]) * n_[2] + i[2]; }

    Index multi(std::size_t lin) const {
        Index i{};
        i[2] = lin % n_[2];
        lin /= n_[2];
        i[1] = lin % n_[1];
        i[0] = lin / n_[1];
        return i;
    }

    Point center(const Index& i) const {
        Point p{};
        for (int k = 0; k < d_; ++k) p[k] = origin_[k] + (static_cast<double>(i[k]) + 0.5) * h_[k];
        return p;
    }

    Point center(std::size_t lin) const { return center(multi(lin)); }

    /// Same sample layout on the box scaled by `factor` about the origin of
    /// coordinates.
    Grid scaled(double factor) const {
        Point o{}, e{};
        for (int k = 0; k < 3; ++k) {
            o[k] = origin_[k] * factor;
            e[k] = extent_[k] * factor;
        }
        return Grid(d_, o, e, n_);
    }

    bool same_layout(const Grid& o) const {
        return d_ == o.d_ && n_ == o.n_ && origin_ == o.origin_ && extent_ == o.extent_;
    }

private:
    int d_ = 2;
    Point origin_{};
    Point extent_{1.0, 1.0, 1.0};
    Index n_{2, 2, 1};
    Point h_{0.5, 0.5, 1.0};
};

inline std::span<const double> as_span(const Point& p, int d) {
    return {p.data(), static_cast<std::size_t>(d)};
}

struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    ScalarField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        require(values.size() == grid.size(), "field size does not match grid");
    }

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool finite() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

/// Samples `f(point)` at every cell centre.
template <class F>
ScalarField sample(const Grid& g, F&& f) {
    ScalarField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = f(g.center(i));
    return out;
}

/// C-infinity bump exp(-1 / (1 - |x-c|^2/r^2)) supported in B(c, r).
inline ScalarField smooth_bump(const Grid& g, const Point& center, double radius) {
    require(radius > 0.0, "smooth_bump: radius must be positive");
    return sample(g, [&](const Point& x) {
        double r2 = 0.0;
        for (int k = 0; k < g.dim(); ++k) r2 += (x[k] - center[k]) * (x[k] - center[k]);
        const double q = r2 / (radius * radius);
        return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
    });
}

struct VectorField {
    Grid grid;
    std::vector<std::vector<double>> components;

    VectorField() = default;
    explicit VectorField(const Grid& g)
        : grid(g), components(static_cast<std::size_t>(g.dim()), std::vector<double>(g.size(), 0.0)) {}

    ScalarField magnitude() const {
        ScalarField m(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double s = 0.0;
            for (const auto& c : components) s += c[i] * c[i];
            m.values[i] = std::sqrt(s);
        }
        return m;
    }
};

class VoxelSet {
public:
    Grid grid;
    std::vector<std::uint8_t> mask;

    VoxelSet() = default;
    explicit VoxelSet(const Grid& g) : grid(g), mask(g.size(), 0) {}

    bool contains(std::size_t lin) const { return mask[lin] != 0; }

    std::size_t count() const {
        return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto m) { return m != 0; }));
    }

    bool empty() const { return count() == 0; }

    double volume() const { return static_cast<double>(count()) * grid.cell_volume(); }

    /// Voxel (face-counting) perimeter: total area of faces separating a
    /// member cell from a non-member cell or from the outside of the grid.
    double perimeter() const {
        const int d = grid.dim();
        const auto& n = grid.n();
        std::array<std::size_t, 3> exposed{};
        for (std::size_t lin = 0; lin < grid.size(); ++lin) {
            if (!mask[lin]) continue;
            const Index i = grid.multi(lin);
            for (int a = 0; a < d; ++a) {
                for (int s : {-1, 1}) {
                    const bool boundary = (s < 0 && i[a] == 0) || (s > 0 && i[a] + 1 == n[a]);
                    if (boundary) {
                        ++exposed[a];
                        continue;
                    }
                    Index j = i;
                    j[a] = s < 0 ? i[a] - 1 : i[a] + 1;
                    if (!mask[grid.linear(j)]) ++exposed[a];
                }
            }
        }
        double per = 0.0;
        for (int a = 0; a < d; ++a) per += static_cast<double>(exposed[a]) * grid.cell_volume() / grid.h()[a];
        return per;
    }

    ScalarField indicator() const {
        ScalarField f(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) f.values[i] = mask[i] ? 1.0 : 0.0;
        return f;
    }
};

inline VoxelSet set_union(const VoxelSet& a, const VoxelSet& b) {
    require(a.grid.same_layout(b.grid), "set_union: sets live on different grids");
    VoxelSet u(a.grid);
    for (std::size_t i = 0; i < u.mask.size(); ++i) u.mask[i] = (a.mask[i] || b.mask[i]) ? 1 : 0;
    return u;
}

/// Cells whose centres lie strictly inside the ball. Throws when the ball
/// misses the grid box entirely; a ball that fits between cell centres gives
/// an empty set.
inline VoxelSet indicator_ball(const Grid& g, const Point& center, double radius) {
    require(radius > 0.0, "indicator_ball: radius must be positive");
    const int d = g.dim();
    double dist2 = 0.0;
    for (int k = 0; k < d; ++k) {
        const double lo = g.origin()[k];
        const double hi = lo + g.extent()[k];
        const double c = std::clamp(center[k], lo, hi);
        dist2 += (c - center[k]) * (c - center[k]);
    }
    require(dist2 < radius * radius, "indicator_ball: ball does not intersect the grid box");
    VoxelSet e(g);
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
        const Point p = g.center(lin);
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) r2 += (p[k] - center[k]) * (p[k] - center[k]);
        e.mask[lin] = r2 < radius * radius ? 1 : 0;
    }
    return e;
}

namespace detail {
inline long aligned_index(double value, double h, const char* what) {
    const double q = value / h;
    const double r = std::round(q);
    require(std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q)),
            std::string("indicator_cube: ") + what + " is not a multiple of the grid spacing");
    return static_cast<long>(r);
}
} // namespace detail

/// Exact voxelization of the axis-aligned cube corner + [0, side]^d. The cube
/// must be aligned with cell faces and lie inside the grid box.
inline VoxelSet indicator_cube(const Grid& g, const Point& corner, double side) {
    require(side > 0.0, "indicator_cube: side must be positive");
    const int d = g.dim();
    std::array<long, 3> lo{}, hi{};
    for (int k = 0; k < d; ++k) {
        lo[k] = detail::aligned_index(corner[k] - g.origin()[k], g.h()[k], "corner");
        hi[k] = lo[k] + detail::aligned_index(side, g.h()[k], "side");
        require(lo[k] >= 0 && hi[k] <= static_cast<long>(g.n()[k]),
                "indicator_cube: cube does not fit inside the grid box");
    }
    VoxelSet e(g);
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
        const Index i = g.multi(lin);
        bool in = true;
        for (int k = 0; k < d; ++k)
            in = in && static_cast<long>(i[k]) >= lo[k] && static_cast<long>(i[k]) < hi[k];
        e.mask[lin] = in ? 1 : 0;
    }
    return e;
}

/// E_t = { x : t x in E }: the same mask on the grid scaled by 1/t, so
/// volumes scale by t^{-d} and perimeters by t^{1-d} exactly.
inline VoxelSet dilate_set(const VoxelSet& e, double t) {
    require(t > 0.0, "dilate_set: factor must be positive");
    VoxelSet out(e.grid.scaled(1.0 / t));
    out.mask = e.mask;
    return out;
}

/// Axis-aligned face (or union of coplanar adjacent faces) with its
/// exterior unit normal +/- e_axis.
struct Face {
    Point center{};
    Point size{};  // side lengths; size[axis] == 0
    int axis = 0;
    int sign = 1;
    double area = 0.0;

    Point normal() const {
        Point n{};
        n[axis] = static_cast<double>(sign);
        return n;
    }
};

struct SurfaceMeasure {
    int d = 2;
    std::vector<Face> faces;

    double mass() const {
        double m = 0.0;
        for (const auto& f : faces) m += f.area;
        return m;
    }

    /// sum of area * normal; zero for the boundary of a closed set.
    Point flux() const {
        Point s{};
        for (const auto& f : faces) s[f.axis] += f.sign * f.area;
        return s;
    }
};

/// Boundary faces of E with exterior normals. With `coalesce`, runs of
/// adjacent coplanar faces along the first tangential axis are merged into
/// one rectangle (same measure, fewer records).
inline SurfaceMeasure surface_measure(const VoxelSet& e, bool coalesce = false) {
    require(!e.empty(), "surface_measure: set is empty");
    const Grid& g = e.grid;
    const int d = g.dim();
    const auto& n = g.n();
    const auto& h = g.h();
    SurfaceMeasure s;
    s.d = d;

    auto exposed = [&](const Index& i, int a, int sgn) {
        if (!e.mask[g.linear(i)]) return false;
        if (sgn < 0 && i[a] == 0) return true;
        if (sgn > 0 && i[a] + 1 == n[a]) return true;
        Index j = i;
        j[a] = sgn < 0 ? i[a] - 1 : i[a] + 1;
        return !e.mask[g.linear(j)];
    };

    for (int a = 0; a < d; ++a) {
        // Merge axis: first axis different from the normal axis.
        const int m = a == 0 ? 1 : 0;
        for (int sgn : {-1, 1}) {
            // Iterate over lines parallel to axis m.
            Index cnt = n;
            cnt[m] = 1;
            for (std::size_t i0 = 0; i0 < cnt[0]; ++i0)
                for (std::size_t i1 = 0; i1 < cnt[1]; ++i1)
                    for (std::size_t i2 = 0; i2 < cnt[2]; ++i2) {
                        Index base{i0, i1, i2};
                        std::size_t run_start = 0;
                        bool in_run = false;
                        auto flush = [&](std::size_t end) {
                            Index first = base;
                            first[m] = run_start;
                            Point c = g.center(first);
                            c[a] += 0.5 * sgn * h[a];
                            const double len = static_cast<double>(end - run_start) * h[m];
                            c[m] = g.origin()[m] + static_cast<double>(run_start) * h[m] + 0.5 * len;
                            Face f;
                            f.center = c;
                            f.axis = a;
                            f.sign = sgn;
                            f.area = 1.0;
                            for (int k = 0; k < d; ++k) {
                                if (k == a) continue;
                                f.size[k] = k == m ? len : h[k];
                                f.area *= f.size[k];
                            }
                            s.faces.push_back(f);
                        };
                        for (std::size_t im = 0; im < n[m]; ++im) {
                            Index i = base;
                            i[m] = im;
                            const bool x = exposed(i, a, sgn);
                            if (x && !in_run) {
                                in_run = true;
                                run_start = im;
                            } else if (!x && in_run) {
                                flush(im);
                                in_run = false;
                            }
                            if (x && !coalesce) {
                                flush(im + 1);
                                in_run = false;
                            }
                        }
                        if (in_run) flush(n[m]);
                    }
        }
    }
    return s;
}

/// Cells within `band` cells of the grid boundary.
inline std::vector<std::uint8_t> boundary_band(const Grid& g, std::size_t band = 2) {
    std::vector<std::uint8_t> out(g.size(), 0);
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
        const Index i = g.multi(lin);
        for (int k = 0; k < g.dim(); ++k)
            if (i[k] < band || i[k] + band >= g.n()[k]) out[lin] = 1;
    }
    return out;
}

} // namespace fracgrad
