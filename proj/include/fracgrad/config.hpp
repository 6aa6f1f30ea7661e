#pragma once

// Experiment configuration: INI text with [sections] and key = value lines.
// Every key must appear in the schema; values are layered as
//   schema default < file < overrides ("section.key=value").

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fracgrad/error.hpp"
#include "fracgrad/field_io.hpp"

namespace fracgrad {

enum class ValueKind { integer, real, reals, boolean, word, words };

struct ConfigKey {
    std::string section;
    std::string key;
    ValueKind kind;
    std::string value;  // default
};

// Section order is the order `all` runs in.
inline const std::vector<ConfigKey>& config_schema() {
    using K = ValueKind;
    static const std::vector<ConfigKey> schema{
        {"run", "seed", K::integer, "1"},
        {"run", "threads", K::integer, "0"},
        {"run", "out", K::word, ""},

        {"potential", "d", K::integer, "2"},
        {"potential", "n", K::integer, "64"},
        {"potential", "lo", K::real, "-1.5"},
        {"potential", "hi", K::real, "2.5"},
        {"potential", "shape", K::word, "ball"},
        {"potential", "alpha", K::real, "0.5"},
        {"potential", "paths", K::words, "fft,direct,heat"},
        {"potential", "time_nodes", K::integer, "96"},

        {"lorentz", "d", K::integer, "2"},
        {"lorentz", "n", K::integer, "128"},
        {"lorentz", "lo", K::real, "-2"},
        {"lorentz", "hi", K::real, "2"},
        {"lorentz", "radius", K::real, "0.8"},
        {"lorentz", "p", K::real, "0"},
        {"lorentz", "family", K::words, "cube,ball,rectangle,two_cubes,l_shape,annulus"},

        {"content", "d", K::integer, "2"},
        {"content", "n", K::integer, "128"},
        {"content", "lo", K::real, "-0.5"},
        {"content", "hi", K::real, "1.5"},
        {"content", "shape", K::word, "annulus"},
        {"content", "beta", K::real, "1.5"},

        {"lemma1", "d", K::integer, "2"},
        {"lemma1", "n", K::integer, "128"},
        {"lemma1", "lo", K::real, "-0.5"},
        {"lemma1", "hi", K::real, "1.5"},
        {"lemma1", "alpha", K::reals, "0.3,0.5,0.7"},
        {"lemma1", "sets", K::words, "cube,ball"},
        {"lemma1", "stride", K::integer, "1"},
        {"lemma1", "band_cells", K::real, "2"},
        {"lemma1", "time_nodes", K::integer, "64"},

        {"splitting", "d", K::integer, "2"},
        {"splitting", "n", K::integer, "96"},
        {"splitting", "lo", K::real, "-1.5"},
        {"splitting", "hi", K::real, "2.5"},
        {"splitting", "alpha", K::real, "0.5"},
        {"splitting", "shape", K::word, "cube"},
        {"splitting", "stride", K::integer, "1"},
        {"splitting", "band_cells", K::real, "2"},
        {"splitting", "time_nodes", K::integer, "64"},

        {"lemma2", "d", K::integer, "2"},
        {"lemma2", "n", K::integer, "96"},
        {"lemma2", "lo", K::real, "-1"},
        {"lemma2", "hi", K::real, "2"},
        {"lemma2", "alpha", K::real, "0.5"},
        {"lemma2", "family", K::words, "cube,ball,rectangle,two_cubes,l_shape,annulus"},
        {"lemma2", "dilations", K::reals, "0.5,1,2,4"},
        {"lemma2", "margin", K::real, "1"},

        {"sobolev", "d", K::integer, "2"},
        {"sobolev", "n", K::integer, "128"},
        {"sobolev", "lo", K::real, "-2"},
        {"sobolev", "hi", K::real, "2"},
        {"sobolev", "alpha", K::real, "0.5"},
        {"sobolev", "radius", K::real, "0.8"},
        {"sobolev", "extension", K::integer, "3"},

        {"classical", "d", K::integer, "2"},
        {"classical", "n", K::integer, "128"},
        {"classical", "lo", K::real, "-2"},
        {"classical", "hi", K::real, "2"},
        {"classical", "radius", K::real, "0.8"},

        {"counterexample", "d", K::integer, "2"},
        {"counterexample", "s", K::reals, "0.5,0.1,1e-2,1e-3,1e-4,1e-5,1e-6"},
        {"counterexample", "random_points", K::integer, "5"},

        {"weaktype", "d", K::integer, "2"},
        {"weaktype", "beta", K::real, "1"},
        {"weaktype", "t", K::reals, "5,10,20,40"},
        {"weaktype", "exploratory", K::boolean, "false"},
        {"weaktype", "samples", K::integer, "0"},

        {"tracefail", "d", K::integer, "2"},
        {"tracefail", "alpha", K::real, "0.5"},
        {"tracefail", "s", K::reals, "1e-1,1e-2,1e-3,1e-4"},
        {"tracefail", "n_mollify", K::integer, "16"},
        {"tracefail", "n", K::integer, "128"},
    };
    return schema;
}

inline std::vector<std::string> config_sections() {
    std::vector<std::string> out;
    for (const auto& k : config_schema())
        if (std::find(out.begin(), out.end(), k.section) == out.end()) out.push_back(k.section);
    return out;
}

class Config {
public:
    Config() {
        for (const auto& k : config_schema()) values_[k.section + "." + k.key] = k.value;
    }

    static Config from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        require(static_cast<bool>(in), "cannot open config file '" + path.string() + "'");
        Config c;
        c.merge_text(in, path.string());
        return c;
    }

    void merge_text(std::istream& in, const std::string& origin = "<config>") {
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::ini_parser::read_ini(in, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw precondition_error(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
        }
        for (const auto& [section, body] : tree) {
            if (body.empty()) {
                const auto known = config_sections();
                require(std::find(known.begin(), known.end(), section) != known.end(),
                        origin + ": key '" + section + "' is outside a [section]");
                continue;
            }
            for (const auto& [key, leaf] : body) set(section + "." + key, leaf.data(), origin);
        }
    }

    /// "section.key=value".
    void apply_override(const std::string& assignment) {
        const auto eq = assignment.find('=');
        require(eq != std::string::npos, "override '" + assignment + "' is not of the form section.key=value");
        set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "override");
    }

    void set(const std::string& name, const std::string& value, const std::string& origin = "override") {
        const ConfigKey& k = lookup(name, origin);
        check_value(k, value, origin);
        values_[name] = value;
        explicit_.insert(name);
    }

    bool has(const std::string& name) const { return values_.count(name) > 0; }
    bool set_explicitly(const std::string& name) const { return explicit_.count(name) > 0; }

    long integer(const std::string& name) const {
        const double v = io::parse_real(raw(name, ValueKind::integer));
        return static_cast<long>(v);
    }
    double real(const std::string& name) const { return io::parse_real(raw(name, ValueKind::real)); }
    bool boolean(const std::string& name) const { return raw(name, ValueKind::boolean) == "true"; }
    std::string word(const std::string& name) const { return raw(name, ValueKind::word); }
    std::vector<double> reals(const std::string& name) const {
        std::vector<double> out;
        for (const auto& w : split(raw(name, ValueKind::reals))) out.push_back(io::parse_real(w));
        return out;
    }
    std::vector<std::string> words(const std::string& name) const { return split(raw(name, ValueKind::words)); }

    /// The resolved values of one section, for echoing into reports.
    std::map<std::string, std::string> section(const std::string& s) const {
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : values_)
            if (k.rfind(s + ".", 0) == 0) out[k.substr(s.size() + 1)] = v;
        return out;
    }

    /// INI text of every value, in schema order.
    std::string dump() const {
        std::ostringstream os;
        std::string current;
        for (const auto& k : config_schema()) {
            if (k.section != current) {
                os << (current.empty() ? "" : "\n") << '[' << k.section << "]\n";
                current = k.section;
            }
            os << k.key << " = " << values_.at(k.section + "." + k.key) << '\n';
        }
        return os.str();
    }

private:
    std::map<std::string, std::string> values_;
    std::set<std::string> explicit_;

    static std::string trim(std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split(const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    static const ConfigKey& lookup(const std::string& name, const std::string& origin) {
        for (const auto& k : config_schema())
            if (k.section + "." + k.key == name) return k;
        throw precondition_error(origin + ": unknown config key '" + name + "'");
    }

    static void check_value(const ConfigKey& k, const std::string& v, const std::string& origin) {
        const std::string where = origin + ": " + k.section + "." + k.key + " = '" + v + "': ";
        auto number = [&](const std::string& w) {
            try {
                return io::parse_real(w);
            } catch (const precondition_error&) {
                throw precondition_error(where + "not a number");
            }
        };
        switch (k.kind) {
        case ValueKind::integer: {
            const double x = number(trim(v));
            require(x == std::floor(x), where + "not an integer");
            break;
        }
        case ValueKind::real: number(trim(v)); break;
        case ValueKind::reals:
            require(!split(v).empty(), where + "empty list");
            for (const auto& w : split(v)) number(w);
            break;
        case ValueKind::boolean: require(v == "true" || v == "false", where + "expected true or false"); break;
        case ValueKind::word: break;
        case ValueKind::words: require(!split(v).empty(), where + "empty list"); break;
        }
    }

    std::string raw(const std::string& name, ValueKind kind) const {
        const ConfigKey& k = lookup(name, "config");
        require(k.kind == kind, "config key '" + name + "' read with the wrong type");
        return trim(values_.at(name));
    }
};

} // namespace fracgrad
