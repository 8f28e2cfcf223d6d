#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "photoion/constants.hpp"

namespace photoion {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Experiment configuration: nested key-value text with units.
///
///   run = interference
///   [pulse.1]
///   transition = 5s-5p
///   detuning = 0.15 eV
///
/// Keys are addressed as "section.key" ("run" lives in the root section "").
/// Physical values carry a unit token (au, ev, fs, rad, deg); bare numbers
/// are atomic units / dimensionless. Everything is kept as text so a config
/// can be re-serialized byte-for-byte into the run manifest.
class ExperimentConfig {
public:
    ExperimentConfig() = default;

    static ExperimentConfig parse_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    static ExperimentConfig parse(const std::string& text)
    {
        ExperimentConfig cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']')
                    throw ConfigError("line " + std::to_string(lineno) +
                                      ": unterminated section header");
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            const std::string full = section.empty() ? key : section + "." + key;
            cfg.values_[full] = value;
            cfg.order_.push_back(full);
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const
    {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    void set(const std::string& key, const std::string& value)
    {
        if (!values_.count(key)) order_.push_back(key);
        values_[key] = value;
    }

    double get_number(const std::string& key) const
    {
        return parse_number(key, get_string(key));
    }
    double get_number(const std::string& key, double fallback) const
    {
        return has(key) ? get_number(key) : fallback;
    }

    /// Value converted to atomic units according to its unit token.
    /// `dimension` selects the conversion: "energy", "time" or "angle".
    double get_quantity(const std::string& key, const std::string& dimension) const
    {
        return parse_quantity(key, get_string(key), dimension);
    }
    double get_quantity(const std::string& key, const std::string& dimension,
                        double fallback_au) const
    {
        return has(key) ? get_quantity(key, dimension) : fallback_au;
    }

    long long get_int(const std::string& key) const
    {
        const double v = get_number(key);
        const auto i = static_cast<long long>(std::llround(v));
        if (std::abs(v - static_cast<double>(i)) > 1e-9)
            throw ConfigError("config key '" + key + "' must be an integer");
        return i;
    }
    long long get_int(const std::string& key, long long fallback) const
    {
        return has(key) ? get_int(key) : fallback;
    }

    bool get_bool(const std::string& key, bool fallback) const
    {
        if (!has(key)) return fallback;
        auto v = get_string(key);
        std::transform(v.begin(), v.end(), v.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
        if (v == "false" || v == "no" || v == "off" || v == "0") return false;
        throw ConfigError("config key '" + key + "' is not a boolean: " + v);
    }

    std::vector<std::string> get_list(const std::string& key) const
    {
        std::vector<std::string> out;
        std::string item;
        std::istringstream ss(get_string(key));
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    const std::vector<std::string>& keys() const { return order_; }

    /// Canonical text form, reparseable into an identical config.
    std::string serialize() const
    {
        std::string cur_section;
        std::ostringstream out;
        bool first = true;
        // root keys first, then grouped by section in first-appearance order
        for (const auto& key : order_) {
            const auto dot = key.rfind('.');
            const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
            const std::string leaf = dot == std::string::npos ? key : key.substr(dot + 1);
            if (section != cur_section) {
                if (!first) out << "\n";
                out << "[" << section << "]\n";
                cur_section = section;
            }
            first = false;
            out << leaf << " = " << values_.at(key) << "\n";
        }
        return out.str();
    }

    static double parse_number(const std::string& key, const std::string& text)
    {
        std::istringstream ss(text);
        double v = 0.0;
        if (!(ss >> v))
            throw ConfigError("config key '" + key + "' is not numeric: " + text);
        std::string rest;
        ss >> rest;
        if (!rest.empty() && rest != "au")
            throw ConfigError("config key '" + key + "' carries unexpected unit '" + rest +
                              "' (expected a bare number or 'au')");
        return v;
    }

    static double parse_quantity(const std::string& key, const std::string& text,
                                 const std::string& dimension)
    {
        std::istringstream ss(text);
        double v = 0.0;
        if (!(ss >> v))
            throw ConfigError("config key '" + key + "' is not numeric: " + text);
        std::string unit;
        ss >> unit;
        std::transform(unit.begin(), unit.end(), unit.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (unit.empty() || unit == "au") return v;
        if (dimension == "energy") {
            if (unit == "ev") return ev_to_au(v);
        } else if (dimension == "time") {
            if (unit == "fs") return fs_to_au(v);
        } else if (dimension == "angle") {
            if (unit == "deg") return deg_to_rad(v);
            if (unit == "rad") return v;
        }
        throw ConfigError("config key '" + key + "': unit '" + unit +
                          "' is not valid for dimension " + dimension);
    }

private:
    static std::string trim(const std::string& s)
    {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

inline const std::vector<std::string>& known_run_kinds()
{
    static const std::vector<std::string> kinds = {
        "bound", "continuum", "propagate", "pt", "interference",
        "pairs", "control", "stochastic"};
    return kinds;
}

/// Field-level validation per run kind, before any computation starts.
inline void validate_config(const ExperimentConfig& cfg)
{
    const auto run = cfg.get_string("run");
    if (std::find(known_run_kinds().begin(), known_run_kinds().end(), run) ==
        known_run_kinds().end())
        throw ConfigError("run kind '" + run + "' is not one of bound|continuum|propagate|"
                          "pt|interference|pairs|control|stochastic");
    if (!cfg.has("atom")) throw ConfigError("missing 'atom' (potential parameter file)");

    auto require = [&](const std::string& key) {
        if (!cfg.has(key)) throw ConfigError("run '" + run + "' requires config key '" +
                                             key + "'");
    };
    if (run == "continuum") {
        require("continuum.l");
        require("continuum.energies");
    }
    if (run == "propagate" || run == "pt") {
        require("pulse.1.cycles");
        require("pulse.2.cycles");
        if (cfg.get_number("pulse.1.amplitude", 0.007) < 0.0 ||
            cfg.get_number("pulse.2.amplitude", 0.05) < 0.0)
            throw ConfigError("pulse amplitudes must be nonnegative");
    }
    if (run == "propagate") {
        // an empty pulse set is a configuration error, not a silent no-op
        const bool any = cfg.get_number("pulse.1.amplitude", 0.007) > 0.0 ||
                         cfg.get_number("pulse.2.amplitude", 0.05) > 0.0;
        if (!any) throw ConfigError("run 'propagate' needs at least one nonzero pulse");
    }
    if (run == "pairs") require("pairs.list");
    if (run == "control") require("control.strengths");
    if (run == "stochastic") require("stochastic.n_samples");
}

} // namespace photoion
