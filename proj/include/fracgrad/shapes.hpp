#pragma once

// Named test sets inside the unit box [0,1]^d, built from cell centres.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fracgrad/error.hpp"
#include "fracgrad/fields.hpp"

namespace fracgrad {

inline const std::vector<std::string>& shape_names() {
    static const std::vector<std::string> names{"cube", "ball", "rectangle", "two_cubes", "l_shape", "annulus"};
    return names;
}

inline VoxelSet make_shape(const std::string& name, const Grid& g) {
    const int d = g.dim();
    auto in_box = [d](const Point& x, double lo, double hi) {
        for (int k = 0; k < d; ++k)
            if (x[k] < lo || x[k] > hi) return false;
        return true;
    };
    auto radius = [d](const Point& x) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += (x[k] - 0.5) * (x[k] - 0.5);
        return std::sqrt(s);
    };
    std::function<bool(const Point&)> inside;
    if (name == "cube") {
        inside = [&](const Point& x) { return in_box(x, 0.0, 1.0); };
    } else if (name == "ball") {
        inside = [&](const Point& x) { return radius(x) <= 0.5; };
    } else if (name == "rectangle") {
        inside = [&](const Point& x) { return in_box(x, 0.0, 1.0) && x[1] <= 0.5; };
    } else if (name == "two_cubes") {
        inside = [&](const Point& x) { return in_box(x, 0.0, 0.375) || in_box(x, 0.625, 1.0); };
    } else if (name == "l_shape") {
        inside = [&](const Point& x) { return in_box(x, 0.0, 1.0) && !(x[0] > 0.5 && x[1] > 0.5); };
    } else if (name == "annulus") {
        inside = [&](const Point& x) {
            const double r = radius(x);
            return r <= 0.5 && r >= 0.25;
        };
    } else {
        throw precondition_error("unknown shape '" + name + "'");
    }
    VoxelSet e(g);
    for (std::size_t i = 0; i < g.size(); ++i) e.mask[i] = inside(g.center(i)) ? 1 : 0;
    require(!e.empty(), "shape '" + name + "' contains no cell centre on this grid");
    return e;
}

inline std::vector<std::pair<std::string, VoxelSet>> make_family(const std::vector<std::string>& names,
                                                                 const Grid& g) {
    std::vector<std::pair<std::string, VoxelSet>> out;
    for (const auto& n : names) out.emplace_back(n, make_shape(n, g));
    return out;
}

} // namespace fracgrad
