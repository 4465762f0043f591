#pragma once

// Flat key=value run configuration. Every key has a default; files and command-line
// overrides may only set known keys.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "geofwd/csv.hpp"
#include "geofwd/error.hpp"

namespace geofwd::cli {

inline constexpr std::string_view kVersion = "0.1.0";

struct ParamSpec {
    std::string_view key;
    std::string_view fallback;
    std::string_view help;
};

inline constexpr std::array kParams = {
    ParamSpec{"seed", "1", "master 64-bit seed"},
    ParamSpec{"L_i", "10", "relay distance to the sink (same unit as r_c)"},
    ParamSpec{"r_c", "1", "communication radius"},
    ParamSpec{"T", "1", "wake period (seconds in end-to-end runs)"},
    ParamSpec{"K", "5", "forwarding-set size"},
    ParamSpec{"eta", "2", "delay/progress multiplier"},
    ParamSpec{"alpha", "0.5", "explicit progress threshold in [0,1]"},
    ParamSpec{"gamma", "0.5", "target mean one-hop progress in [0,1]"},
    ParamSpec{"policy", "sf", "ff|mf|sf|bf (one hop), ff|mf|sf|sf-hat (end to end); comma list in sweeps"},
    ParamSpec{"threshold_from", "eta", "how one-hop sf gets its threshold: eta|alpha|gamma"},
    ParamSpec{"trials", "100000", "one-hop Monte-Carlo trials"},
    ParamSpec{"transfers", "1000", "end-to-end packet transfers"},
    ParamSpec{"L", "10", "side of the deployment square"},
    ParamSpec{"lambda", "5", "node density"},
    ParamSpec{"t_I", "0.005", "beacon slot length (seconds)"},
    ParamSpec{"t_D", "0.03", "packet transmission time (seconds)"},
    ParamSpec{"n_grid", "1024", "progress-law grid points"},
    ParamSpec{"n_w", "100", "best-forward grid points in elapsed time"},
    ParamSpec{"n_b", "100", "best-forward grid points in best progress"},
    ParamSpec{"kind", "onehop", "sweep kind: onehop|e2e"},
    ParamSpec{"param", "", "swept parameter: eta|alpha (one hop, analytics), gamma (e2e)"},
    ParamSpec{"grid", "", "values: a,b,c or start:stop:step"},
    ParamSpec{"max_retries", "1000", "network regeneration attempts"},
    ParamSpec{"snapshot", "", "optional path for the network snapshot CSV"},
};

inline bool is_known_key(std::string_view key) {
    return std::any_of(kParams.begin(), kParams.end(), [&](const ParamSpec& p) { return p.key == key; });
}

/// "a,b,c" or "start:stop:step" (inclusive of stop up to rounding). Empty text is an empty grid.
inline std::vector<double> parse_grid(std::string_view text) {
    text = csv::trim(text);
    std::vector<double> out;
    if (text.empty()) return out;
    if (text.find(':') != std::string_view::npos) {
        const auto parts = csv::split(text, ':');
        if (parts.size() != 3) throw ConfigError("grid: expected start:stop:step");
        const double start = csv::parse<double>(parts[0]);
        const double stop = csv::parse<double>(parts[1]);
        const double step = csv::parse<double>(parts[2]);
        if (!(step > 0.0) || stop < start) throw ConfigError("grid: need step > 0 and stop >= start");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (n > 100000) throw ConfigError("grid: too many points");
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
        return out;
    }
    for (auto f : csv::split(text)) out.push_back(csv::parse<double>(f));
    return out;
}

class RunConfig {
public:
    RunConfig() {
        for (const auto& p : kParams) values_.emplace(std::string(p.key), std::string(p.fallback));
    }

    void set(std::string_view key, std::string_view value) {
        if (!is_known_key(key)) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
        values_[std::string(key)] = std::string(csv::trim(value));
        explicit_.push_back(std::string(key));
    }

    /// Reads `key = value` lines; '#' starts a comment.
    void load(std::istream& is) {
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            std::string_view t = line;
            if (auto hash = t.find('#'); hash != std::string_view::npos) t = t.substr(0, hash);
            t = csv::trim(t);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
            set(csv::trim(t.substr(0, eq)), t.substr(eq + 1));
        }
    }

    const std::string& text(std::string_view key) const {
        const auto it = values_.find(std::string(key));
        if (it == values_.end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
        return it->second;
    }

    bool was_set(std::string_view key) const {
        return std::find(explicit_.begin(), explicit_.end(), key) != explicit_.end();
    }

    double number(std::string_view key) const {
        try {
            const double v = csv::parse<double>(text(key));
            if (!std::isfinite(v)) throw ConfigError("not finite");
            return v;
        } catch (const ConfigError&) {
            throw ConfigError("key '" + std::string(key) + "' needs a finite number, got '" + text(key) + "'");
        }
    }

    long long integer(std::string_view key) const {
        try {
            return csv::parse<long long>(text(key));
        } catch (const ConfigError&) {
            throw ConfigError("key '" + std::string(key) + "' needs an integer, got '" + text(key) + "'");
        }
    }

    std::uint64_t seed() const {
        try {
            return csv::parse<std::uint64_t>(text("seed"));
        } catch (const ConfigError&) {
            throw ConfigError("seed must be an unsigned 64-bit integer");
        }
    }

    std::vector<std::string> list(std::string_view key) const {
        std::vector<std::string> out;
        for (auto f : csv::split(text(key)))
            if (auto t = csv::trim(f); !t.empty()) out.emplace_back(t);
        return out;
    }

    std::vector<double> grid(std::string_view fallback) const {
        const auto& g = text("grid");
        return parse_grid(g.empty() ? fallback : std::string_view(g));
    }

    /// Header comment block: version, command and every key, sorted.
    void echo(std::ostream& os, std::string_view command) const {
        os << "# geofwd " << kVersion << '\n';
        os << "# command=" << command << '\n';
        for (const auto& [k, v] : values_) os << "# " << k << '=' << v << '\n';
    }

    // Range helpers used by command validation.
    double positive(std::string_view key) const {
        const double v = number(key);
        if (!(v > 0.0)) throw ConfigError("key '" + std::string(key) + "' must be positive");
        return v;
    }

    double unit_interval(std::string_view key) const {
        const double v = number(key);
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("key '" + std::string(key) + "' must lie in [0, 1]");
        return v;
    }

    long long at_least(std::string_view key, long long lo) const {
        const long long v = integer(key);
        if (v < lo) throw ConfigError("key '" + std::string(key) + "' must be >= " + std::to_string(lo));
        return v;
    }

private:
    std::map<std::string, std::string, std::less<>> values_;
    std::vector<std::string> explicit_;
};

} // namespace geofwd::cli
