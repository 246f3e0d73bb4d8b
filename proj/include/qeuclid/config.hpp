#pragma once

#include <qeuclid/errors.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

namespace qeuclid {

enum class ValueType { String, Real, Integer, Boolean };

struct KeySpec {
    std::string key;
    ValueType type;
    std::string default_value;
    std::string help;
    std::vector<std::string> choices;  ///< allowed values of a string key, empty for free text
};

/// Every key an experiment file may contain.
inline const std::vector<KeySpec>& config_schema() {
    using V = ValueType;
    static const std::vector<KeySpec> schema{
        {"experiment", V::String, "linear_sweep", "experiment to run",
         {"linear_sweep", "multiplier_bound", "nonlinear", "validation"}},
        {"seed", V::Integer, "1", "random seed", {}},
        {"threads", V::Integer, "1", "worker threads", {}},
        {"out", V::String, "out", "output directory", {}},

        {"theta.d", V::Integer, "2", "spatial dimension", {}},
        {"theta.theta0", V::Real, "1", "deformation scalar (0 selects the commutative path)", {}},

        {"grid.balanced", V::Boolean, "true", "tie the symbol grid to the representation (theta0 m h^2 = 2 pi)", {}},
        {"grid.m", V::Integer, "256", "representation points per block", {}},
        {"grid.n", V::Integer, "256", "symbol points per axis when the grid is not balanced", {}},
        {"grid.half_width", V::Real, "12", "symbol half-width when the grid is not balanced", {}},

        {"problem.kind", V::String, "heat", "linear equation", {"heat", "schrodinger", "wave"}},
        {"problem.alpha", V::Real, "1", "Caputo order", {}},
        {"problem.p", V::Real, "4/3", "source exponent", {}},
        {"problem.q", V::Real, "4", "target exponent", {}},

        {"sigma.lambda", V::Real, "2", "sigma = scale |xi|^lambda", {}},
        {"sigma.scale", V::Real, "1", "sigma = scale |xi|^lambda", {}},

        {"time.start", V::Real, "10", "first sample time", {}},
        {"time.end", V::Real, "1000", "last sample time", {}},
        {"time.count", V::Integer, "21", "number of sample times", {}},
        {"time.spacing", V::String, "log", "sample spacing", {"log", "linear"}},

        {"u0.family", V::String, "gaussian", "initial datum family", {}},
        {"u0.amplitude", V::Real, "1", "initial datum amplitude", {}},
        {"u0.width", V::Real, "1", "initial datum width", {}},
        {"u0.exponent", V::Real, "0", "initial datum exponent (power family)", {}},
        {"u0.radius", V::Real, "1", "initial datum radius (bump, smooth_indicator)", {}},
        {"u0.softness", V::Real, "0.1", "initial datum edge softness (smooth_indicator)", {}},
        {"u1.family", V::String, "none", "initial velocity family, none for zero", {}},
        {"u1.amplitude", V::Real, "1", "initial velocity amplitude", {}},
        {"u1.width", V::Real, "1", "initial velocity width", {}},

        {"multiplier.family", V::String, "gaussian", "multiplier symbol",
         {"gaussian", "ml_heat", "ml_schrodinger", "ml_wave"}},
        {"multiplier.alpha", V::Real, "0.5", "Caputo order of a propagator multiplier", {}},
        {"multiplier.t", V::Real, "1", "time of a propagator multiplier", {}},
        {"multiplier.samples", V::Integer, "50", "random inputs", {}},

        {"nonlinear.kind", V::String, "heat", "nonlinear equation", {"heat", "wave"}},
        {"nonlinear.p", V::Integer, "2", "power of the nonlinearity", {}},
        {"nonlinear.A", V::String, "identity", "multiplier A", {"identity", "zero", "gaussian"}},
        {"nonlinear.A_width", V::Real, "1", "width of the gaussian multiplier A", {}},
        {"nonlinear.T", V::Real, "1", "horizon (ignored when T_factor > 0)", {}},
        {"nonlinear.T_factor", V::Real, "0.5", "horizon as a multiple of the existence window, 0 to use T", {}},
        {"nonlinear.steps", V::Integer, "200", "time steps", {}},
        {"nonlinear.tolerance", V::Real, "1e-8", "Picard stopping tolerance", {}},
        {"nonlinear.max_iterations", V::Integer, "60", "Picard iteration cap", {}},
        {"nonlinear.override_window", V::Boolean, "false", "allow horizons beyond the existence window", {}},
        {"h.family", V::String, "constant", "time weight h", {"zero", "constant", "power_decay"}},
        {"h.value", V::Real, "0.05", "value of the constant weight", {}},
        {"h.exponent", V::Real, "2.5", "e in (1 + t)^(-e)", {}},
        {"constants.c", V::Real, "1.4142135623730951", "window constant c", {}},
        {"constants.c1", V::Real, "1.4142135623730951", "window constant c1", {}},
        {"constants.c2", V::Real, "1.4142135623730951", "small-data constant c2", {}},
        {"constants.delta", V::Real, "1", "window constant delta", {}},

        {"validation.only", V::String, "", "comma-separated criterion numbers, empty for all", {}},
        {"validation.ml_series_radius", V::Real, "1", "series/contour seam radius of the Mittag-Leffler evaluator", {}},
    };
    return schema;
}

namespace detail {

inline std::string trim(std::string s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline const KeySpec* find_key(const std::string& key) {
    for (const auto& k : config_schema())
        if (k.key == key) return &k;
    return nullptr;
}

inline bool parse_real(const std::string& s, double& out) {
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        double a = 0, b = 0;
        if (!parse_real(s.substr(0, slash), a) || !parse_real(s.substr(slash + 1), b) || b == 0.0) return false;
        out = a / b;
        return true;
    }
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto r = std::from_chars(first, last, out);
    return r.ec == std::errc() && r.ptr == last && first != last;
}

inline bool parse_integer(const std::string& s, long long& out) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size() && !s.empty();
}

inline bool parse_bool(const std::string& s, bool& out) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return out = true, true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return out = false, true;
    return false;
}

inline void check_value(const KeySpec& spec, const std::string& v) {
    double r;
    long long i;
    bool b;
    switch (spec.type) {
        case ValueType::Real:
            if (!parse_real(v, r)) throw ConfigError("key '" + spec.key + "' expects a number, got '" + v + "'");
            break;
        case ValueType::Integer:
            if (!parse_integer(v, i)) throw ConfigError("key '" + spec.key + "' expects an integer, got '" + v + "'");
            break;
        case ValueType::Boolean:
            if (!parse_bool(v, b)) throw ConfigError("key '" + spec.key + "' expects true or false, got '" + v + "'");
            break;
        case ValueType::String:
            if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
                std::string known;
                for (const auto& c : spec.choices) known += (known.empty() ? "" : ", ") + c;
                throw ConfigError("key '" + spec.key + "' must be one of " + known + ", got '" + v + "'");
            }
            break;
    }
}

}  // namespace detail

/// Resolved key/value configuration. Layers are applied in order:
/// schema defaults, file, environment, explicit overrides.
class Config {
public:
    Config() {
        for (const auto& k : config_schema()) values_[k.key] = k.default_value;
    }

    /// YAML mapping. Nested mappings become dotted keys, so `problem: {alpha: 0.5}`
    /// and `problem.alpha: 0.5` are equivalent. Every leaf must be a scalar.
    static Config parse(std::istream& in, const std::string& source = "<input>") {
        Config c;
        YAML::Node root;
        try {
            root = YAML::Load(in);
        } catch (const YAML::Exception& e) {
            throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
        }
        if (root.IsNull()) return c;
        if (!root.IsMap()) throw ConfigError(source + ": top level must be a mapping of keys to values");
        c.merge(root, "", source);
        return c;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file '" + path + "'");
        return parse(in, path);
    }

    void set(const std::string& key, const std::string& value) {
        const KeySpec* spec = detail::find_key(key);
        if (!spec) throw ConfigError("unknown key '" + key + "'");
        detail::check_value(*spec, value);
        values_[key] = value;
    }

    /// Applies PREFIX_SECTION__NAME=value variables: the rest of the name is
    /// lower-cased and double underscores become dots.
    void apply_environment(char** envp, const std::string& prefix = "QEUCLID_") {
        if (!envp) return;
        std::vector<std::pair<std::string, std::string>> found;
        for (char** e = envp; *e; ++e) {
            const std::string kv = *e;
            if (kv.rfind(prefix, 0) != 0) continue;
            const auto eq = kv.find('=');
            if (eq == std::string::npos) continue;
            std::string name = kv.substr(prefix.size(), eq - prefix.size());
            std::string key;
            for (std::size_t i = 0; i < name.size(); ++i) {
                if (name[i] == '_' && i + 1 < name.size() && name[i + 1] == '_') {
                    key += '.';
                    ++i;
                } else {
                    key += static_cast<char>(std::tolower(static_cast<unsigned char>(name[i])));
                }
            }
            found.emplace_back(key, kv.substr(eq + 1));
        }
        std::sort(found.begin(), found.end());
        for (const auto& [k, v] : found) {
            // Schema keys are lower case except a few; match case-insensitively.
            std::string match = k;
            for (const auto& s : config_schema()) {
                std::string low = s.key;
                for (auto& ch : low) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
                if (low == k) match = s.key;
            }
            try {
                set(match, v);
            } catch (const ConfigError& e) {
                throw ConfigError("environment override: " +
                                  std::string(e.what()).substr(std::string("config error: ").size()));
            }
        }
    }

    const std::string& get(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
        return it->second;
    }
    double real(const std::string& key) const {
        double v = 0;
        detail::parse_real(get(key), v);
        return v;
    }
    long long integer(const std::string& key) const {
        long long v = 0;
        detail::parse_integer(get(key), v);
        return v;
    }
    bool boolean(const std::string& key) const {
        bool v = false;
        detail::parse_bool(get(key), v);
        return v;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

    /// `# key = value` lines for every key, sorted by key.
    std::string echo() const {
        std::string s;
        for (const auto& [k, v] : values_) s += "# " + k + " = " + v + "\n";
        return s;
    }

private:
    void merge(const YAML::Node& node, const std::string& prefix, const std::string& source) {
        for (const auto& kv : node) {
            const std::string key = prefix + kv.first.as<std::string>();
            const YAML::Node& v = kv.second;
            const std::string where = source + ":" + std::to_string(kv.first.Mark().line + 1);
            if (v.IsMap()) {
                merge(v, key + ".", source);
                continue;
            }
            if (!v.IsScalar()) throw ConfigError(where + ": key '" + key + "' needs a scalar value");
            try {
                set(key, v.Scalar());
            } catch (const ConfigError& e) {
                throw ConfigError(where + ": " + std::string(e.what()).substr(std::string("config error: ").size()));
            }
        }
    }

    std::map<std::string, std::string> values_;
};

}  // namespace qeuclid
