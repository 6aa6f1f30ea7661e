#pragma once

// Hausdorff-content certificates on voxel sets:
//   upper bounds by explicit ball covers (dyadic search + greedy merging),
//   lower bounds by flat (d-1)-plane measures of known growth.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <tuple>
#include <vector>

#include "fracgrad/error.hpp"
#include "fracgrad/field_io.hpp"
#include "fracgrad/fields.hpp"
#include "fracgrad/kernels.hpp"
#include "fracgrad/potentials.hpp"
#include "fracgrad/report.hpp"

namespace fracgrad {

struct Ball {
    Point center{};
    double radius = 0.0;
};

struct BallCover {
    int d = 2;
    double beta = 1.0;
    std::vector<Ball> balls;
    double value = 0.0;
    bool certified = false;

    /// sum omega_{d-beta} r^{d-beta}
    double recompute() const {
        const double s = d - beta;
        const double w = omega(s);
        double v = 0.0;
        for (const auto& b : balls) v += w * std::pow(b.radius, s);
        return v;
    }

    void write_csv(std::ostream& os) const {
        static const char* names[] = {"x", "y", "z"};
        for (int k = 0; k < d; ++k) os << names[k] << ',';
        os << "radius\n";
        for (const auto& b : balls) {
            for (int k = 0; k < d; ++k) os << io::format_real(b.center[k]) << ',';
            os << io::format_real(b.radius) << '\n';
        }
    }

    Json summary() const {
        return {{"d", d}, {"beta", beta}, {"balls", balls.size()}, {"value", value}, {"certified", certified}};
    }
};

namespace detail {

inline double dist2(const Point& a, const Point& b, int d) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

inline Point cross(const Point& a, const Point& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

/// Smallest enclosing ball of points (2 or 3 dimensions), Welzl's algorithm
/// with a fixed-seed shuffle. The returned radius is re-measured against
/// every point, so the ball always contains them whatever the rounding.
class EnclosingBall {
public:
    explicit EnclosingBall(int d) : d_(d) {}

    Ball operator()(std::vector<Point> pts) {
        require(!pts.empty(), "enclosing ball of no points");
        std::mt19937_64 rng(0x5eed);
        std::shuffle(pts.begin(), pts.end(), rng);
        pts_ = std::move(pts);
        boundary_.clear();
        Ball b = solve(pts_.size());
        double r2 = 0.0;
        for (const auto& p : pts_) r2 = std::max(r2, dist2(p, b.center, d_));
        b.radius = std::sqrt(r2);
        return b;
    }

private:
    bool inside(const Ball& b, const Point& p) const {
        if (b.radius < 0.0) return false;
        const double r2 = b.radius * b.radius;
        return dist2(p, b.center, d_) <= r2 * (1.0 + 1e-12) + 1e-300;
    }

    Ball solve(std::size_t n) {
        Ball b = from_boundary();
        if (boundary_.size() == static_cast<std::size_t>(d_ + 1)) return b;
        for (std::size_t i = 0; i < n; ++i) {
            if (inside(b, pts_[i])) continue;
            boundary_.push_back(pts_[i]);
            b = solve(i);
            boundary_.pop_back();
        }
        return b;
    }

    static Ball two(const Point& a, const Point& b, int d) {
        Ball out;
        for (int k = 0; k < 3; ++k) out.center[k] = 0.5 * (a[k] + b[k]);
        out.radius = 0.5 * std::sqrt(dist2(a, b, d));
        return out;
    }

    // Circumball of a triangle; radius < 0 when it is (nearly) degenerate.
    static Ball three(const Point& p0, const Point& p1, const Point& p2) {
        const Point a = sub(p1, p0), b = sub(p2, p0);
        const Point axb = cross(a, b);
        const double den = 2.0 * dot(axb, axb);
        if (den <= 1e-24 * dot(a, a) * dot(b, b)) return {{}, -1.0};
        Point num{};
        for (int k = 0; k < 3; ++k) num[k] = dot(a, a) * b[k] - dot(b, b) * a[k];
        const Point off = cross(num, axb);
        Ball out;
        for (int k = 0; k < 3; ++k) out.center[k] = p0[k] + off[k] / den;
        out.radius = std::sqrt(dot(sub(out.center, p0), sub(out.center, p0)));
        return out;
    }

    // Circumsphere of a tetrahedron by Cramer's rule.
    static Ball four(const Point& p0, const Point& p1, const Point& p2, const Point& p3) {
        const Point a = sub(p1, p0), b = sub(p2, p0), c = sub(p3, p0);
        const double det = dot(a, cross(b, c));
        const double scale = std::sqrt(dot(a, a) * dot(b, b) * dot(c, c));
        if (std::abs(det) <= 1e-12 * scale) return {{}, -1.0};
        const double ra = 0.5 * dot(a, a), rb = 0.5 * dot(b, b), rc = 0.5 * dot(c, c);
        const Point bc = cross(b, c), ca = cross(c, a), ab = cross(a, b);
        Ball out;
        for (int k = 0; k < 3; ++k) out.center[k] = p0[k] + (ra * bc[k] + rb * ca[k] + rc * ab[k]) / det;
        out.radius = std::sqrt(dot(sub(out.center, p0), sub(out.center, p0)));
        return out;
    }

    // Smallest ball through the boundary points; on degenerate input the
    // smallest pair/triple ball that still contains all of them.
    Ball from_boundary() const {
        const auto& r = boundary_;
        if (r.empty()) return {{}, -1.0};
        if (r.size() == 1) return {r[0], 0.0};
        if (r.size() == 2) return two(r[0], r[1], d_);
        Ball b = r.size() == 3 ? three(r[0], r[1], r[2]) : four(r[0], r[1], r[2], r[3]);
        if (b.radius >= 0.0) return b;
        Ball best{{}, 1e300};
        auto consider = [&](const Ball& c) {
            if (c.radius < 0.0 || c.radius >= best.radius) return;
            for (const auto& p : r)
                if (!inside(c, p)) return;
            best = c;
        };
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = i + 1; j < r.size(); ++j) {
                consider(two(r[i], r[j], d_));
                for (std::size_t k = j + 1; k < r.size(); ++k) consider(three(r[i], r[j], r[k]));
            }
        return best;
    }

    int d_;
    std::vector<Point> pts_;
    std::vector<Point> boundary_;
};

/// Cells whose centres span the convex hull of `cells`: the extreme cells
/// of each grid line along axis 0. Any ball holding these holds them all.
inline std::vector<std::size_t> hull_cells(const Grid& g, const std::vector<std::size_t>& cells) {
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> lines;
    for (std::size_t c : cells) {
        const Index i = g.multi(c);
        const auto key = std::make_pair(i[1], i[2]);
        auto it = lines.find(key);
        if (it == lines.end())
            lines.emplace(key, std::make_pair(c, c));
        else {
            if (i[0] < g.multi(it->second.first)[0]) it->second.first = c;
            if (i[0] > g.multi(it->second.second)[0]) it->second.second = c;
        }
    }
    std::vector<std::size_t> out;
    for (const auto& [k, v] : lines) {
        out.push_back(v.first);
        if (v.second != v.first) out.push_back(v.second);
    }
    return out;
}

/// Cover search state for one target set.
class CoverSearch {
public:
    CoverSearch(const VoxelSet& k, double beta) : g_(k.grid), d_(k.grid.dim()), s_(k.grid.dim() - beta), meb_(d_) {
        double hd = 0.0;
        for (int a = 0; a < d_; ++a) hd += g_.h()[a] * g_.h()[a];
        half_diag_ = 0.5 * std::sqrt(hd);
        w_ = omega(s_);
    }

    struct Group {
        std::vector<std::size_t> hull;
        Ball ball;
        double cost = 0.0;
    };

    /// Ball covering every cell (not only the centre) listed in `hull`.
    Group make_group(std::vector<std::size_t> hull) {
        std::vector<Point> pts;
        pts.reserve(hull.size());
        for (std::size_t c : hull) pts.push_back(g_.center(c));
        Ball b = meb_(std::move(pts));
        b.radius = (b.radius + half_diag_) * (1.0 + 1e-12);
        return {std::move(hull), b, w_ * std::pow(b.radius, s_)};
    }

    /// Best cover over the dyadic hierarchy of index boxes: at every node
    /// either one ball or the best covers of the two halves.
    std::vector<Group> dyadic(const std::vector<std::size_t>& cells) {
        Index lo{~0ul, ~0ul, ~0ul}, hi{0, 0, 0};
        for (std::size_t c : cells) {
            const Index i = g_.multi(c);
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], i[a]);
                hi[a] = std::max(hi[a], i[a]);
            }
        }
        double cost = 0.0;
        return node(cells, lo, hi, cost);
    }

    /// Merges pairs of groups among near neighbours while the total cost
    /// drops. Each merge is re-evaluated with the exact enclosing ball.
    std::vector<Group> merge(std::vector<Group> groups, int neighbours = 8) {
        const std::size_t n = groups.size();
        std::vector<bool> alive(n, true);
        std::vector<int> version(n, 0);
        struct Cand {
            double gain;
            std::size_t a, b;
            int va, vb;
            bool operator<(const Cand& o) const {
                if (gain != o.gain) return gain < o.gain;
                return std::tie(a, b) > std::tie(o.a, o.b);
            }
        };
        std::priority_queue<Cand> heap;
        auto propose = [&](std::size_t a) {
            std::vector<std::pair<double, std::size_t>> near;
            for (std::size_t b = 0; b < n; ++b)
                if (b != a && alive[b]) {
                    const double gap = std::sqrt(dist2(groups[a].ball.center, groups[b].ball.center, d_)) -
                                       groups[a].ball.radius - groups[b].ball.radius;
                    near.push_back({gap, b});
                }
            const std::size_t m = std::min<std::size_t>(near.size(), static_cast<std::size_t>(neighbours));
            std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(m), near.end());
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t b = near[j].second;
                // The merged ball is at least as large as either part.
                const double floor = w_ * std::pow(std::max(groups[a].ball.radius, groups[b].ball.radius), s_);
                if (floor >= groups[a].cost + groups[b].cost) continue;
                const Group m2 = make_group(joined(groups[a].hull, groups[b].hull));
                const double gain = groups[a].cost + groups[b].cost - m2.cost;
                if (gain > 1e-14 * (groups[a].cost + groups[b].cost))
                    heap.push({gain, std::min(a, b), std::max(a, b), version[std::min(a, b)], version[std::max(a, b)]});
            }
        };
        for (std::size_t a = 0; a < n; ++a) propose(a);
        while (!heap.empty()) {
            const Cand c = heap.top();
            heap.pop();
            if (!alive[c.a] || !alive[c.b] || version[c.a] != c.va || version[c.b] != c.vb) continue;
            groups[c.a] = make_group(joined(groups[c.a].hull, groups[c.b].hull));
            alive[c.b] = false;
            ++version[c.a];
            propose(c.a);
        }
        std::vector<Group> out;
        for (std::size_t a = 0; a < n; ++a)
            if (alive[a]) out.push_back(std::move(groups[a]));
        return out;
    }

private:
    std::vector<std::size_t> joined(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
        std::vector<std::size_t> u(a);
        u.insert(u.end(), b.begin(), b.end());
        return hull_cells(g_, u);
    }

    std::vector<Group> node(const std::vector<std::size_t>& cells, const Index& lo, const Index& hi, double& cost) {
        // Index box [lo, hi] of the cells; bisected along its longest side.
        Group single = make_group(hull_cells(g_, cells));
        int axis = -1;
        std::size_t span = 0;
        for (int a = 0; a < d_; ++a)
            if (hi[a] - lo[a] > span) {
                span = hi[a] - lo[a];
                axis = a;
            }
        if (axis < 0 || cells.size() == 1) {
            cost = single.cost;
            return {std::move(single)};
        }
        const std::size_t mid = lo[static_cast<std::size_t>(axis)] + span / 2;
        std::vector<std::size_t> left, right;
        for (std::size_t c : cells) (g_.multi(c)[static_cast<std::size_t>(axis)] <= mid ? left : right).push_back(c);
        std::vector<Group> parts;
        double split = 0.0;
        for (auto* side : {&left, &right}) {
            if (side->empty()) continue;
            Index a{~0ul, ~0ul, ~0ul}, b{0, 0, 0};
            for (std::size_t c : *side) {
                const Index i = g_.multi(c);
                for (int k = 0; k < 3; ++k) {
                    a[k] = std::min(a[k], i[k]);
                    b[k] = std::max(b[k], i[k]);
                }
            }
            double c = 0.0;
            auto sub = node(*side, a, b, c);
            split += c;
            for (auto& gr : sub) parts.push_back(std::move(gr));
        }
        if (single.cost <= split) {
            cost = single.cost;
            return {std::move(single)};
        }
        cost = split;
        return parts;
    }

    const Grid& g_;
    int d_;
    double s_;
    double w_ = 1.0;
    double half_diag_ = 0.0;
    EnclosingBall meb_;
};

/// True when every cell of K lies entirely inside one ball of the cover.
inline bool certify(const VoxelSet& k, const std::vector<Ball>& balls) {
    const Grid& g = k.grid;
    const int d = g.dim();
    std::vector<std::uint8_t> done(g.size(), 0);
    for (const auto& b : balls) {
        Index lo{0, 0, 0}, hi{0, 0, 0};
        bool misses = false;
        for (int a = 0; a < d; ++a) {
            const double l = std::floor((b.center[a] - b.radius - g.origin()[a]) / g.h()[a]);
            const double u = std::floor((b.center[a] + b.radius - g.origin()[a]) / g.h()[a]);
            const double top = static_cast<double>(g.n()[a] - 1);
            misses = misses || u < 0.0 || l > top;
            lo[a] = static_cast<std::size_t>(std::clamp(l, 0.0, top));
            hi[a] = static_cast<std::size_t>(std::clamp(u, 0.0, top));
        }
        if (misses) continue;
        for (std::size_t i0 = lo[0]; i0 <= hi[0]; ++i0)
            for (std::size_t i1 = lo[1]; i1 <= hi[1]; ++i1)
                for (std::size_t i2 = lo[2]; i2 <= hi[2]; ++i2) {
                    const std::size_t lin = g.linear({i0, i1, i2});
                    if (!k.mask[lin] || done[lin]) continue;
                    const Point c = g.center(Index{i0, i1, i2});
                    double far = 0.0;  // farthest corner of the cell
                    for (int a = 0; a < d; ++a) {
                        const double e = std::abs(c[a] - b.center[a]) + 0.5 * g.h()[a];
                        far += e * e;
                    }
                    if (far <= b.radius * b.radius) done[lin] = 1;
                }
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        if (k.mask[i] && !done[i]) return false;
    return true;
}

/// Balls of `seed` that contain at least one whole cell of K.
inline std::vector<Ball> restrict_cover(const VoxelSet& k, const BallCover& seed) {
    const Grid& g = k.grid;
    std::vector<Ball> keep;
    for (const auto& b : seed.balls) {
        bool hit = false;
        for (std::size_t i = 0; i < g.size() && !hit; ++i) {
            if (!k.mask[i]) continue;
            const Point c = g.center(i);
            double far = 0.0;
            for (int a = 0; a < g.dim(); ++a) {
                const double e = std::abs(c[a] - b.center[a]) + 0.5 * g.h()[a];
                far += e * e;
            }
            hit = far <= b.radius * b.radius;
        }
        if (hit) keep.push_back(b);
    }
    return keep;
}

} // namespace detail

/// Certified upper bound for the (d - beta)-content of the closed cells of K.
/// `seed`, when given, is a cover of a superset of K; its balls that contain
/// cells of K compete with the search result.
inline BallCover content_upper(const VoxelSet& k, double beta, const BallCover* seed = nullptr) {
    require(!k.empty(), "content_upper: empty set");
    const int d = k.grid.dim();
    require(beta > 0.0 && beta < d, "content_upper: beta must lie in (0, d)");
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < k.grid.size(); ++i)
        if (k.mask[i]) cells.push_back(i);

    detail::CoverSearch search(k, beta);
    auto groups = search.dyadic(cells);
    if (groups.size() <= 2048) groups = search.merge(std::move(groups));

    BallCover out{d, beta, {}, 0.0, false};
    for (const auto& gr : groups) out.balls.push_back(gr.ball);
    out.value = out.recompute();

    if (seed != nullptr) {
        require(seed->d == d, "content_upper: seed cover has a different dimension");
        BallCover alt{d, beta, detail::restrict_cover(k, *seed), 0.0, false};
        alt.value = alt.recompute();
        if (!alt.balls.empty() && alt.value < out.value && detail::certify(k, alt.balls)) out = std::move(alt);
    }
    out.certified = detail::certify(k, out.balls);
    return out;
}

/// H^{d-1} restricted to Q'_s = [0,1]^{d-1} x {x_d = -s}: unit mass, growth
/// mu(B(x,r)) <= omega_{d-1} r^{d-1}.
struct SlabMeasure {
    int d = 2;
    double s = 0.5;

    void validate() const {
        require(d == 2 || d == 3, "slab measure: d must be 2 or 3");
        require(s > 0.0 && s < 1.0, "slab measure: offset s must lie in (0, 1)");
    }
    double mass() const { return 1.0; }
    double growth_constant() const { return omega(d - 1.0); }
};

/// mu_s(A) / C', a lower bound for the (d-1)-content of A. A is read on the
/// cell layer that contains the plane x_d = -s; each cell contributes the
/// area of its cross-section inside Q'.
inline double slab_lower_bound(const VoxelSet& a, const SlabMeasure& m) {
    m.validate();
    const Grid& g = a.grid;
    require(g.dim() == m.d, "slab_lower_bound: grid and slab dimensions differ");
    const int ax = m.d - 1;
    const double pos = (-m.s - g.origin()[ax]) / g.h()[ax];
    require(pos >= 0.0 && pos < static_cast<double>(g.n()[ax]), "slab_lower_bound: support plane outside grid");
    const auto layer = static_cast<std::size_t>(pos);
    double mass = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!a.mask[i]) continue;
        const Index ii = g.multi(i);
        if (ii[static_cast<std::size_t>(ax)] != layer) continue;
        double area = 1.0;
        for (int k = 0; k < ax; ++k) {
            const double lo = g.origin()[k] + static_cast<double>(ii[k]) * g.h()[k];
            area *= std::max(0.0, std::min(lo + g.h()[k], 1.0) - std::max(lo, 0.0));
        }
        mass += area;
    }
    return mass / m.growth_constant();
}

/// Same bound when the covered fraction of Q'_s is known by other means.
inline double slab_lower_bound(double covered_fraction, const SlabMeasure& m) {
    m.validate();
    require(covered_fraction >= 0.0 && covered_fraction <= 1.0, "slab_lower_bound: fraction must lie in [0, 1]");
    return covered_fraction * m.mass() / m.growth_constant();
}

/// Lower bound for the (d-1)-content of K: the largest axis projection of K
/// (area of projected cells), measured by the flat plane measure of growth
/// omega_{d-1}. Projections are 1-Lipschitz, so content only drops.
inline double plane_lower_bound(const VoxelSet& k) {
    const Grid& g = k.grid;
    const int d = g.dim();
    double best = 0.0;
    for (int a = 0; a < d; ++a) {
        std::vector<std::uint8_t> seen(g.size() / g.n()[a], 0);
        double face = 1.0;
        for (int b = 0; b < d; ++b)
            if (b != a) face *= g.h()[b];
        std::size_t count = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!k.mask[i]) continue;
            Index ii = g.multi(i);
            std::size_t key = 0;
            for (int b = 0; b < 3; ++b)
                if (b != a) key = key * g.n()[b] + ii[b];
            if (!seen[key]) {
                seen[key] = 1;
                ++count;
            }
        }
        best = std::max(best, static_cast<double>(count) * face);
    }
    return best / omega(d - 1.0);
}

/// Compares (lower bound on the (d-1)-content)^{(d-beta)/(d-1)} with the
/// certified (d-beta)-content upper bound. Crossing certificates fail.
inline Report subordination_check(const VoxelSet& k, double beta) {
    const int d = k.grid.dim();
    require(beta >= 1.0, "subordination_check: beta < 1 is outside the concavity range of s -> s^{(d-beta)/(d-1)}; "
                         "that regime is exploratory only");
    require(beta < d, "subordination_check: beta must be < d");
    require(!k.empty(), "subordination_check: empty set");
    const double theta = (d - beta) / (d - 1.0);
    const double lower = plane_lower_bound(k);
    const BallCover cover = content_upper(k, beta);
    Report r;
    r.id = "subordination";
    r.inputs = {{"d", d}, {"beta", beta}, {"cells", k.count()}};
    r.metrics["lower_content_d_minus_1"] = lower;
    r.metrics["exponent"] = theta;
    r.metrics["lower_side"] = std::pow(lower, theta);
    r.metrics["upper_side"] = cover.value;
    r.metrics["cover"] = cover.summary();
    Table t{"subordination", {"quantity", "value"}, {}};
    t.add({std::string("lower_content_d_minus_1"), lower});
    t.add({std::string("lower_side"), std::pow(lower, theta)});
    t.add({std::string("upper_side"), cover.value});
    t.add({std::string("balls"), static_cast<double>(cover.balls.size())});
    r.tables.push_back(std::move(t));
    r.check("cover_certified", cover.certified ? 1.0 : 0.0, ">=", 1.0);
    r.check("lower_side_minus_upper_side", std::pow(lower, theta) - cover.value, "<=", 0.0);
    // Gauge normalisation behind the comparison, informational.
    r.check("omega_ratio", std::pow(omega(d - 1.0), theta) / omega(d - beta), "<=", 1.0, false);
    r.finalize();
    return r;
}

struct SlabPotential {
    ScalarField field;
    double growth_ratio = 0.0;  // max mu(B(x,r)) / r^{d-alpha} over the samples
};

/// I_{1-alpha} mu_s at a point off the plane.
inline double potential_of_slab_at(const SlabMeasure& m, double alpha, const Point& x, double rel_tol = 1e-8) {
    m.validate();
    require(alpha > 0.0 && alpha < 1.0, "potential_of_slab: alpha must lie in (0, 1)");
    Face f;
    f.axis = m.d - 1;
    f.sign = 1;
    for (int k = 0; k < m.d - 1; ++k) {
        f.center[k] = 0.5;
        f.size[k] = 1.0;
    }
    f.center[f.axis] = -m.s;
    f.area = 1.0;
    require(!detail::on_face(f, m.d, x, 1e-12), "potential_of_slab: point lies on the slab");
    return detail::face_kernel_integral(f, m.d, 1.0 - alpha, x, rel_tol) / gamma_norm(m.d, 1.0 - alpha);
}

/// I_{1-alpha} mu_s on the cells of g, plus the empirical growth ratio of the
/// measure with that density: sampled on a fixed 5^d lattice of centres in
/// the grid box and radii box_width * {1/16, ..., 1/2}.
inline SlabPotential potential_of_slab(const SlabMeasure& m, double alpha, const Grid& g) {
    m.validate();
    require(alpha > 0.0 && alpha < 1.0, "potential_of_slab: alpha must lie in (0, 1)");
    require(g.dim() == m.d, "potential_of_slab: grid and slab dimensions differ");
    const int d = g.dim();
    SlabPotential out{ScalarField(g), 0.0};
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(g.size()); ++i)
        out.field.values[static_cast<std::size_t>(i)] =
            potential_of_slab_at(m, alpha, g.center(static_cast<std::size_t>(i)));

    double width = g.extent()[0];
    for (int k = 1; k < d; ++k) width = std::min(width, g.extent()[k]);
    std::vector<double> radii;
    for (double f = 1.0 / 16.0; f <= 0.5 + 1e-12; f *= 2.0) radii.push_back(f * width);
    const double cell = g.cell_volume();
    const int per_axis = 5;
    const std::size_t samples = static_cast<std::size_t>(std::pow(per_axis, d));
    std::vector<std::pair<double, double>> by_dist(g.size());
    for (std::size_t sidx = 0; sidx < samples; ++sidx) {
        Point x{};
        std::size_t rest = sidx;
        for (int k = 0; k < d; ++k) {
            const auto j = static_cast<double>(rest % per_axis);
            rest /= per_axis;
            x[k] = g.origin()[k] + g.extent()[k] * (j + 1.0) / (per_axis + 1.0);
        }
        for (std::size_t i = 0; i < g.size(); ++i)
            by_dist[i] = {std::sqrt(detail::dist2(g.center(i), x, d)), out.field.values[i] * cell};
        std::sort(by_dist.begin(), by_dist.end());
        double acc = 0.0;
        std::size_t j = 0;
        for (double r : radii) {
            while (j < by_dist.size() && by_dist[j].first <= r) acc += by_dist[j++].second;
            out.growth_ratio = std::max(out.growth_ratio, acc / std::pow(r, d - alpha));
        }
    }
    return out;
}

} // namespace fracgrad
