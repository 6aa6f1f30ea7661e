#pragma once

// Self-describing text container for fields:
//
//   # fracgrad field v1
//   dim 2
//   n 64 64
//   origin -1 -1
//   extent 2 2
//   kind scalar            (scalar | vector | mask)
//   values
//   <one CSV row per cell, row-major, last axis fastest>
//
// Reals are written in shortest round-trip form, so write -> read is
// bit-exact.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "fracgrad/error.hpp"
#include "fracgrad/fields.hpp"

namespace fracgrad::io {

inline std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    require(res.ec == std::errc() && res.ptr == s.data() + s.size(), "malformed number '" + std::string(s) + "'");
    return v;
}

enum class FieldKind { scalar, vector, mask };

struct FieldFile {
    Grid grid;
    FieldKind kind = FieldKind::scalar;
    // One vector per component (scalar/mask: one component).
    std::vector<std::vector<double>> components;
};

inline void write_header(std::ostream& os, const Grid& g, const char* kind) {
    const int d = g.dim();
    os << "# fracgrad field v1\n";
    os << "dim " << d << "\n";
    os << "n";
    for (int k = 0; k < d; ++k) os << ' ' << g.n()[k];
    os << "\norigin";
    for (int k = 0; k < d; ++k) os << ' ' << format_real(g.origin()[k]);
    os << "\nextent";
    for (int k = 0; k < d; ++k) os << ' ' << format_real(g.extent()[k]);
    os << "\nkind " << kind << "\nvalues\n";
}

inline void write_field(std::ostream& os, const ScalarField& f) {
    write_header(os, f.grid, "scalar");
    for (double v : f.values) os << format_real(v) << '\n';
}

inline void write_field(std::ostream& os, const VectorField& f) {
    write_header(os, f.grid, "vector");
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        for (std::size_t c = 0; c < f.components.size(); ++c) {
            if (c) os << ',';
            os << format_real(f.components[c][i]);
        }
        os << '\n';
    }
}

inline void write_field(std::ostream& os, const VoxelSet& e) {
    write_header(os, e.grid, "mask");
    for (auto m : e.mask) os << (m ? '1' : '0') << '\n';
}

template <class T>
void save(const std::string& path, const T& field) {
    std::ofstream os(path);
    require(static_cast<bool>(os), "cannot open '" + path + "' for writing");
    write_field(os, field);
}

inline FieldFile read_field(std::istream& is) {
    std::string line;
    int d = 0;
    Index n{1, 1, 1};
    Point origin{}, extent{1, 1, 1};
    std::string kind;
    auto read_tokens = [](std::istringstream& ls, int count, auto&& sink) {
        for (int k = 0; k < count; ++k) {
            std::string tok;
            require(static_cast<bool>(ls >> tok), "field header: too few values");
            sink(k, tok);
        }
    };
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "dim") {
            ls >> d;
        } else if (key == "n") {
            read_tokens(ls, d, [&](int k, const std::string& t) { n[k] = std::stoul(t); });
        } else if (key == "origin") {
            read_tokens(ls, d, [&](int k, const std::string& t) { origin[k] = parse_real(t); });
        } else if (key == "extent") {
            read_tokens(ls, d, [&](int k, const std::string& t) { extent[k] = parse_real(t); });
        } else if (key == "kind") {
            ls >> kind;
        } else if (key == "values") {
            break;
        } else {
            throw precondition_error("field header: unknown key '" + key + "'");
        }
    }
    require(d == 2 || d == 3, "field header: missing or invalid dim");
    FieldFile out;
    out.grid = Grid(d, origin, extent, n);
    std::size_t ncomp = 1;
    if (kind == "scalar") {
        out.kind = FieldKind::scalar;
    } else if (kind == "vector") {
        out.kind = FieldKind::vector;
        ncomp = static_cast<std::size_t>(d);
    } else if (kind == "mask") {
        out.kind = FieldKind::mask;
    } else {
        throw precondition_error("field header: unknown kind '" + kind + "'");
    }
    out.components.assign(ncomp, std::vector<double>(out.grid.size()));
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        require(static_cast<bool>(std::getline(is, line)), "field file: truncated value section");
        std::string_view row(line);
        for (std::size_t c = 0; c < ncomp; ++c) {
            const auto comma = row.find(',');
            require((comma == std::string_view::npos) == (c + 1 == ncomp), "field file: wrong column count");
            out.components[c][i] = parse_real(row.substr(0, comma));
            if (comma != std::string_view::npos) row.remove_prefix(comma + 1);
        }
    }
    return out;
}

inline FieldFile load(const std::string& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), "cannot open field file '" + path + "'");
    return read_field(is);
}

inline ScalarField to_scalar(const FieldFile& f) {
    require(f.kind != FieldKind::vector, "field file holds a vector field");
    return ScalarField(f.grid, f.components[0]);
}

inline VectorField to_vector(const FieldFile& f) {
    require(f.kind == FieldKind::vector, "field file does not hold a vector field");
    VectorField v(f.grid);
    v.components = f.components;
    return v;
}

inline VoxelSet to_set(const FieldFile& f) {
    require(f.kind == FieldKind::mask, "field file does not hold a mask");
    VoxelSet e(f.grid);
    for (std::size_t i = 0; i < e.mask.size(); ++i) e.mask[i] = f.components[0][i] != 0.0 ? 1 : 0;
    return e;
}

} // namespace fracgrad::io
