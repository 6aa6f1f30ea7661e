#pragma once

// Config sections -> Reports -> files on disk.
//
// Each run of a section yields one or more outcomes; an outcome is written as
//   <stem>.json            the Report (schema in README.md)
//   <stem>.<table>.csv     one file per table
//   <stem>.<series>.dat    two-column "x y" data with a '#' header line
//   <stem>.<field>.field   saved fields (potential only)
// and every file name is listed in the Report's "artifacts".

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "fracgrad/config.hpp"
#include "fracgrad/content.hpp"
#include "fracgrad/field_io.hpp"
#include "fracgrad/maximal.hpp"
#include "fracgrad/norms.hpp"
#include "fracgrad/potentials.hpp"
#include "fracgrad/report.hpp"
#include "fracgrad/shapes.hpp"
#include "fracgrad/verify.hpp"

namespace fracgrad {

inline constexpr const char* tool_version = "1.0.0";

struct Outcome {
    std::string stem;
    Report report;
    std::vector<std::pair<std::string, ScalarField>> fields;
};

namespace detail {

inline int config_dim(const Config& c, const std::string& s) {
    const long d = c.integer(s + ".d");
    require(d == 2 || d == 3, s + ".d must be 2 or 3");
    return static_cast<int>(d);
}

inline Grid config_grid(const Config& c, const std::string& s) {
    const long n = c.integer(s + ".n");
    require(n >= 4, s + ".n must be >= 4");
    const double lo = c.real(s + ".lo"), hi = c.real(s + ".hi");
    require(lo < hi, s + ": need lo < hi");
    return Grid::cube(config_dim(c, s), lo, hi, static_cast<std::size_t>(n));
}

inline Point centre_point() { return {0.0, 0.0, 0.0}; }

inline std::string label(double v) { return io::format_real(v); }

inline double relative_l2(const ScalarField& a, const ScalarField& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        num += (a.values[i] - ref.values[i]) * (a.values[i] - ref.values[i]);
        den += ref.values[i] * ref.values[i];
    }
    return std::sqrt(num / den);
}

inline double relative_sup(const ScalarField& a, const ScalarField& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        num = std::max(num, std::abs(a.values[i] - ref.values[i]));
        den = std::max(den, std::abs(ref.values[i]));
    }
    return num / den;
}

inline std::vector<Outcome> run_potential(const Config& c) {
    const Grid g = config_grid(c, "potential");
    const std::string shape = c.word("potential.shape");
    const double alpha = c.real("potential.alpha");
    const ScalarField f = make_shape(shape, g).indicator();
    Outcome o{"potential", {}, {}};
    Report& r = o.report;
    r.id = "potential";
    r.inputs = {{"d", g.dim()}, {"n", g.n()[0]}, {"shape", shape}, {"alpha", alpha}, {"paths", c.words("potential.paths")}};
    const ScalarField ref = riesz_fft(f, alpha);
    Table t{"paths", {"path", "l2_relative_vs_fft", "sup_relative_vs_fft", "max_value"}, {}};
    for (const auto& path : c.words("potential.paths")) {
        ScalarField v;
        if (path == "fft") {
            v = ref;
        } else if (path == "direct") {
            v = riesz_direct(f, alpha);
        } else if (path == "heat") {
            const auto q = SemigroupQuadrature::for_grid(g, static_cast<int>(c.integer("potential.time_nodes")));
            r.inputs["semigroup_quadrature"] = {{"t_min", q.t_min}, {"t_max", q.t_max}, {"nodes", q.m}};
            v = riesz_heat(f, alpha, q);
        } else {
            throw precondition_error("potential.paths: unknown path '" + path + "' (fft, direct, heat)");
        }
        const double l2 = relative_l2(v, ref), sup = relative_sup(v, ref);
        t.add({path, l2, sup, v.max_abs()});
        if (path == "direct") r.check("direct_vs_fft_sup_relative", sup, "<", 1e-6);
        if (path == "heat") r.check("heat_vs_fft_l2_relative", l2, "<=", 0.02);
        o.fields.emplace_back(path, std::move(v));
    }
    r.tables.push_back(std::move(t));
    r.notes.push_back("the three paths share one discretisation of the kernel (near-field cells integrated "
                      "exactly); fields are saved in the fracgrad field format");
    r.finalize();
    return {std::move(o)};
}

inline std::vector<Outcome> run_lorentz(const Config& c) {
    const Grid g = config_grid(c, "lorentz");
    const int d = g.dim();
    double p = c.real("lorentz.p");
    if (p == 0.0) p = d / (d - 1.0);
    require(p > 1.0, "lorentz.p must exceed 1 (0 selects d/(d-1))");
    Report r;
    r.id = "lorentz";
    r.inputs = {{"d", d}, {"n", g.n()[0]}, {"p", p}, {"radius", c.real("lorentz.radius")},
                {"family", c.words("lorentz.family")},
                {"threshold_schedule", "union of 200 log-spaced and 200 evenly spaced levels"}};
    Table t{"norms", {"field", "lebesgue", "lorentz", "lebesgue_over_lorentz", "expected_lorentz"}, {}};
    const ScalarField bump = smooth_bump(g, centre_point(), c.real("lorentz.radius"));
    double chain = lp_norm(bump, p) / lorentz_p1(bump, p);
    t.add({std::string("bump"), lp_norm(bump, p), lorentz_p1(bump, p), chain, std::string("")});
    double worst_indicator = 0.0;
    for (const auto& [name, e] : make_family(c.words("lorentz.family"), g)) {
        const ScalarField u = e.indicator();
        const double lp = lp_norm(u, p), lor = lorentz_p1(u, p), expect = std::pow(e.volume(), 1.0 / p);
        chain = std::max(chain, lp / lor);
        worst_indicator = std::max(worst_indicator, std::abs(lor / expect - 1.0));
        t.add({name, lp, lor, lp / lor, expect});
    }
    r.tables.push_back(std::move(t));
    r.metrics["max_lebesgue_over_lorentz"] = chain;
    r.metrics["max_indicator_relative_error"] = worst_indicator;
    r.check("lebesgue_over_lorentz", chain, "<=", 1.005);
    r.check("indicator_exactness", worst_indicator, "<=", 0.005);
    r.finalize();
    return {{"lorentz", std::move(r), {}}};
}

inline std::vector<Outcome> run_content(const Config& c) {
    const Grid g = config_grid(c, "content");
    const std::string shape = c.word("content.shape");
    const double beta = c.real("content.beta");
    const VoxelSet k = make_shape(shape, g);
    const BallCover cover = content_upper(k, beta);
    Report r;
    r.id = "content";
    r.inputs = {{"d", g.dim()}, {"n", g.n()[0]}, {"shape", shape}, {"beta", beta}};
    auto cols = coordinate_names(g.dim());
    cols.emplace_back("radius");
    Table balls{"balls", cols, {}};
    for (const auto& b : cover.balls) {
        auto row = point_cells(b.center, g.dim());
        row.emplace_back(b.radius);
        balls.add(std::move(row));
    }
    r.tables.push_back(std::move(balls));
    r.metrics["upper_bound"] = cover.value;
    r.metrics["balls"] = cover.balls.size();
    r.check("cover_certified", cover.certified ? 1.0 : 0.0, ">=", 1.0);
    r.notes.push_back("upper bound for the content of the union of closed cells; every cell lies inside a ball");
    r.finalize();
    std::vector<Outcome> out{{"content", std::move(r), {}}};
    if (beta >= 1.0 && beta < g.dim()) out.push_back({"subordination", subordination_check(k, beta), {}});
    return out;
}

inline std::vector<Outcome> run_lemma1(const Config& c) {
    const Grid g = config_grid(c, "lemma1");
    const TimeGrid tg = TimeGrid::for_grid(g, static_cast<int>(c.integer("lemma1.time_nodes")));
    std::vector<Outcome> out;
    for (const auto& name : c.words("lemma1.sets")) {
        const VoxelSet e = make_shape(name, g);
        for (double a : c.reals("lemma1.alpha")) {
            Report r = verify_lemma1(e, a, tg, static_cast<std::size_t>(c.integer("lemma1.stride")),
                                     c.real("lemma1.band_cells"));
            r.inputs["set"] = name;
            out.push_back({"lemma1_" + name + "_a" + label(a), std::move(r), {}});
        }
    }
    return out;
}

inline std::vector<Outcome> run_splitting(const Config& c) {
    const Grid g = config_grid(c, "splitting");
    const TimeGrid tg = TimeGrid::for_grid(g, static_cast<int>(c.integer("splitting.time_nodes")));
    const std::string name = c.word("splitting.shape");
    Report r = verify_splitting(make_shape(name, g), c.real("splitting.alpha"), tg,
                                static_cast<std::size_t>(c.integer("splitting.stride")), c.real("splitting.band_cells"));
    r.inputs["set"] = name;
    return {{"splitting", std::move(r), {}}};
}

inline std::vector<Outcome> run_lemma2(const Config& c) {
    const Grid g = config_grid(c, "lemma2");
    Report r = verify_lemma2(make_family(c.words("lemma2.family"), g), c.real("lemma2.alpha"),
                             c.reals("lemma2.dilations"), c.real("lemma2.margin"));
    r.inputs["d"] = g.dim();
    r.inputs["n"] = g.n()[0];
    return {{"lemma2", std::move(r), {}}};
}

inline std::vector<Outcome> run_sobolev(const Config& c) {
    const Grid g = config_grid(c, "sobolev");
    Report r = verify_sobolev(smooth_bump(g, centre_point(), c.real("sobolev.radius")), c.real("sobolev.alpha"),
                              static_cast<int>(c.integer("sobolev.extension")));
    r.inputs["radius"] = c.real("sobolev.radius");
    return {{"sobolev", std::move(r), {}}};
}

inline std::vector<Outcome> run_classical(const Config& c) {
    const Grid g = config_grid(c, "classical");
    Report r = classical_checks(smooth_bump(g, centre_point(), c.real("classical.radius")));
    r.inputs["radius"] = c.real("classical.radius");
    return {{"classical", std::move(r), {}}};
}

inline std::vector<Outcome> run_counterexample(const Config& c) {
    const auto seed = static_cast<unsigned long>(c.integer("run.seed"));
    return {{"counterexample",
             counterexample_profile(config_dim(c, "counterexample"), c.reals("counterexample.s"), seed,
                                    static_cast<int>(c.integer("counterexample.random_points"))),
             {}}};
}

inline std::vector<Outcome> run_weaktype(const Config& c) {
    const auto seed = static_cast<unsigned long>(c.integer("run.seed"));
    return {{"weaktype",
             weak_type_growth(config_dim(c, "weaktype"), c.real("weaktype.beta"), c.reals("weaktype.t"),
                              c.boolean("weaktype.exploratory"), seed, static_cast<int>(c.integer("weaktype.samples"))),
             {}}};
}

inline std::vector<Outcome> run_tracefail(const Config& c) {
    return {{"tracefail",
             verify_trace_failure(config_dim(c, "tracefail"), c.real("tracefail.alpha"), c.reals("tracefail.s"),
                                  static_cast<int>(c.integer("tracefail.n_mollify")),
                                  static_cast<std::size_t>(c.integer("tracefail.n"))),
             {}}};
}

} // namespace detail

/// Experiment sections in the order `all` runs them.
inline std::vector<std::string> experiment_names() {
    auto s = config_sections();
    s.erase(std::remove(s.begin(), s.end(), "run"), s.end());
    return s;
}

inline std::vector<Outcome> run_experiment(const std::string& name, const Config& c) {
    using F = std::vector<Outcome> (*)(const Config&);
    static const std::vector<std::pair<std::string, F>> table{
        {"potential", detail::run_potential},   {"lorentz", detail::run_lorentz},
        {"content", detail::run_content},       {"lemma1", detail::run_lemma1},
        {"splitting", detail::run_splitting},   {"lemma2", detail::run_lemma2},
        {"sobolev", detail::run_sobolev},       {"classical", detail::run_classical},
        {"counterexample", detail::run_counterexample}, {"weaktype", detail::run_weaktype},
        {"tracefail", detail::run_tracefail}};
    for (const auto& [n, f] : table)
        if (n == name) {
            auto out = f(c);
            for (auto& o : out) {
                o.report.inputs["config"] = c.section(name);
                o.report.inputs["seed"] = c.integer("run.seed");
            }
            return out;
        }
    throw precondition_error("unknown experiment '" + name + "'");
}

inline Json tool_info() {
    return {{"name", "fracgrad"}, {"version", tool_version}, {"compiler", __VERSION__}, {"fftw", std::string(fftw_version)}};
}

/// Writes all files of `o` under `dir` and returns the Report JSON.
inline Json write_outcome(Outcome& o, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const std::string& name) {
        std::ofstream f(dir / name);
        require(static_cast<bool>(f), "cannot write '" + (dir / name).string() + "'");
        o.report.artifacts.push_back(name);
        return f;
    };
    o.report.artifacts.clear();
    for (const auto& t : o.report.tables) {
        auto f = open(o.stem + "." + t.name + ".csv");
        t.write_csv(f);
    }
    for (const auto& s : o.report.series) {
        auto f = open(o.stem + "." + s.name + ".dat");
        f << "# " << s.x_label << ' ' << s.y_label << '\n';
        for (std::size_t i = 0; i < s.x.size(); ++i) f << io::format_real(s.x[i]) << ' ' << io::format_real(s.y[i]) << '\n';
    }
    for (const auto& [name, field] : o.fields) {
        auto f = open(o.stem + "." + name + ".field");
        io::write_field(f, field);
    }
    o.report.artifacts.push_back(o.stem + ".json");
    Json j = o.report.to_json();
    j["tool"] = tool_info();
    std::ofstream f(dir / (o.stem + ".json"));
    require(static_cast<bool>(f), "cannot write '" + (dir / (o.stem + ".json")).string() + "'");
    f << j.dump(2) << '\n';
    return j;
}

} // namespace fracgrad
