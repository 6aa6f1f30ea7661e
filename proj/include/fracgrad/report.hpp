#pragma once

// Structured experiment output. Every number a Report claims lives either in
// a table row or in a named check; the JSON form is documented in README.md.

#include <cmath>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracgrad/error.hpp"
#include "fracgrad/field_io.hpp"

namespace fracgrad {

using Json = nlohmann::ordered_json;

using Cell = std::variant<double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        require(row.size() == columns.size(), "table '" + name + "': row width mismatch");
        rows.push_back(std::move(row));
    }

    std::size_t column(const std::string& c) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == c) return i;
        throw precondition_error("table '" + name + "' has no column '" + c + "'");
    }

    std::vector<double> numbers(const std::string& c) const {
        const auto k = column(c);
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(std::get<double>(r[k]));
        return out;
    }

    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
        os << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) os << ',';
                if (const auto* v = std::get_if<double>(&r[i]))
                    os << io::format_real(*v);
                else
                    os << std::get<std::string>(r[i]);
            }
            os << '\n';
        }
    }
};

enum class Verdict { pass, fail, observe };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    default: return "OBSERVE";
    }
}

/// A quantitative claim: `value relation threshold`. Non-binding checks are
/// reported but never change the verdict.
struct Check {
    std::string name;
    double value = 0.0;
    std::string relation;  // "<=", ">=", "<", ">"
    double threshold = 0.0;
    bool pass = false;
    bool binding = true;
};

/// Two-column plot data with a gnuplot-style header comment.
struct Series {
    std::string name;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Report {
    std::string id;
    Json inputs = Json::object();
    Json metrics = Json::object();
    std::vector<Table> tables;
    std::vector<Series> series;
    std::vector<Check> checks;
    std::vector<std::string> notes;
    Verdict verdict = Verdict::observe;
    std::vector<std::string> artifacts;

    Check& check(std::string name, double value, std::string relation, double threshold, bool binding = true) {
        bool ok = false;
        if (relation == "<=") ok = value <= threshold;
        else if (relation == "<") ok = value < threshold;
        else if (relation == ">=") ok = value >= threshold;
        else if (relation == ">") ok = value > threshold;
        else throw precondition_error("unknown relation " + relation);
        if (!std::isfinite(value)) ok = false;
        checks.push_back({std::move(name), value, std::move(relation), threshold, ok, binding});
        return checks.back();
    }

    /// PASS when every binding check holds, FAIL otherwise, OBSERVE when
    /// there are no binding checks.
    Verdict finalize() {
        bool any = false;
        bool all = true;
        for (const auto& c : checks) {
            if (!c.binding) continue;
            any = true;
            all = all && c.pass;
        }
        verdict = !any ? Verdict::observe : (all ? Verdict::pass : Verdict::fail);
        return verdict;
    }

    const Table& table(const std::string& name) const {
        for (const auto& t : tables)
            if (t.name == name) return t;
        throw precondition_error("report '" + id + "' has no table '" + name + "'");
    }

    const Check& find_check(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return c;
        throw precondition_error("report '" + id + "' has no check '" + name + "'");
    }

    Json to_json() const {
        Json j;
        j["id"] = id;
        j["verdict"] = to_string(verdict);
        j["inputs"] = inputs;
        j["metrics"] = metrics;
        Json cs = Json::array();
        for (const auto& c : checks)
            cs.push_back({{"name", c.name},
                          {"value", c.value},
                          {"relation", c.relation},
                          {"threshold", c.threshold},
                          {"pass", c.pass},
                          {"binding", c.binding}});
        j["checks"] = cs;
        Json ts = Json::array();
        for (const auto& t : tables) ts.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows.size()}});
        j["tables"] = ts;
        Json ss = Json::array();
        for (const auto& v : series)
            ss.push_back({{"name", v.name}, {"x_label", v.x_label}, {"y_label", v.y_label}, {"points", v.x.size()}});
        j["series"] = ss;
        j["notes"] = notes;
        j["artifacts"] = artifacts;
        return j;
    }
};

} // namespace fracgrad
