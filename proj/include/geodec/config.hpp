#pragma once

#include "geodec/control.hpp"

#include <charconv>
#include <cstdlib>
#include <map>
#include <sstream>

namespace geodec {

enum class RunMode { Mc, Analytic, Both };

inline std::string_view to_string(RunMode m) {
    switch (m) {
        case RunMode::Mc: return "mc";
        case RunMode::Analytic: return "analytic";
        case RunMode::Both: return "both";
    }
    return "?";
}

struct SweepAxis {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;

    std::vector<double> values() const {
        std::vector<double> v(points);
        for (std::size_t i = 0; i < points; ++i)
            v[i] = points == 1 ? min : min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
        return v;
    }
};

struct RunConfig {
    ModelKind model = ModelKind::Dephasing2L;
    double omega = 1.0;
    double lambda = 1.0;
    double gamma = 1.0;
    double Gamma = 1.0;
    double omega0 = 0.0;
    double theta = 1.0;
    std::optional<ControlField> control;
    double dt = 0.0;
    double t_final = 0.0;
    std::size_t n_traj = 10000;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;
    RunMode mode = RunMode::Mc;
    std::string output;
    std::optional<SweepAxis> sweep_x;
    std::optional<SweepAxis> sweep_y;

    BathParams bath() const { return {gamma, Gamma, omega0}; }
    TimeGrid grid() const { return TimeGrid::with_step(0.0, t_final, dt); }
    ModelSpec build() const { return build_model(model, omega, lambda, bath(), theta, control, grid()); }
    EnsembleOptions ensemble() const { return {n_traj, master_seed, threads, 1e-3}; }
};

/// A single `key = value` assignment and where it came from (for messages).
struct RawSetting {
    std::string value;
    std::string origin;
};

using RawConfig = std::map<std::string, RawSetting>;

namespace detail {

inline const std::map<std::string, std::string>& config_sections() {
    static const std::map<std::string, std::string> sections = {
        {"model", "model"},          {"omega", "model"},          {"lambda", "model"},         {"theta", "model"},
        {"gamma", "bath"},           {"Gamma", "bath"},           {"omega0", "bath"},          {"c_x", "control"},
        {"Omega_c", "control"},      {"dt", "grid"},              {"t_final", "grid"},         {"n_traj", "ensemble"},
        {"master_seed", "ensemble"}, {"threads", "ensemble"},     {"mode", "run"},             {"output", "run"},
        {"sweep_x", "sweep"},        {"sweep_x_min", "sweep"},    {"sweep_x_max", "sweep"},    {"sweep_x_points", "sweep"},
        {"sweep_y", "sweep"},        {"sweep_y_min", "sweep"},    {"sweep_y_max", "sweep"},    {"sweep_y_points", "sweep"},
    };
    return sections;
}

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::string strip_comment(const std::string& line) {
    for (std::size_t i = 0; i < line.size(); ++i)
        if ((line[i] == '#' || line[i] == ';') && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) return line.substr(0, i);
    return line;
}

inline double parse_double(const RawSetting& s, const std::string& key) {
    double v = 0.0;
    const char* begin = s.value.data();
    const char* end = begin + s.value.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError(s.origin + ": '" + key + "' expects a number, got '" + s.value + "'");
    if (!std::isfinite(v)) throw ConfigError(s.origin + ": '" + key + "' must be finite");
    return v;
}

inline std::uint64_t parse_unsigned(const std::string& text, const std::string& origin, const std::string& key) {
    std::uint64_t v = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw ConfigError(origin + ": '" + key + "' expects a non-negative integer, got '" + text + "'");
    return v;
}

inline bool is_sweepable(std::string_view name) {
    for (const char* p : {"theta", "gamma", "lambda", "omega", "omega0", "Gamma", "c_x", "Omega_c", "t_final"})
        if (name == p) return true;
    return false;
}

}  // namespace detail

/// Parse `key = value` lines with optional `[section]` headers. Blank lines
/// are ignored, and '#' or ';' at the start of a line or after whitespace
/// begins a comment. Keys outside any section
/// may be any known key; inside a section they must belong to it.
inline RawConfig parse_config_text(std::string_view text, const std::string& source = "<config>") {
    RawConfig out;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    const auto& sections = detail::config_sections();
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        const std::string t = detail::trim(detail::strip_comment(line));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(where + ": malformed section header '" + t + "'");
            section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
            bool known = false;
            for (const auto& [k, s] : sections) known = known || s == section;
            if (!known) throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = detail::trim(std::string_view(t).substr(0, eq));
        const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        const auto it = sections.find(key);
        if (it == sections.end()) throw ConfigError(where + ": unknown key '" + key + "'");
        if (!section.empty() && it->second != section)
            throw ConfigError(where + ": key '" + key + "' belongs in [" + it->second + "], not [" + section + "]");
        if (out.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        out[key] = {value, where};
    }
    return out;
}

/// Later settings win: apply `overrides` on top of `base`.
inline RawConfig merge_config(RawConfig base, const RawConfig& overrides) {
    for (const auto& [k, v] : overrides) {
        if (!detail::config_sections().count(k)) throw ConfigError(v.origin + ": unknown key '" + k + "'");
        base[k] = v;
    }
    return base;
}

/// Validate and resolve defaults. `env_seed` is the GEODEC_SEED value, if set.
inline RunConfig resolve_config(const RawConfig& raw, const char* env_seed = std::getenv("GEODEC_SEED")) {
    RunConfig c;
    auto has = [&](const char* k) { return raw.count(k) != 0; };
    auto num = [&](const char* k, double fallback) { return has(k) ? detail::parse_double(raw.at(k), k) : fallback; };

    if (!has("model")) throw ConfigError("missing required key 'model' (dissipative, dephasing or leo)");
    try {
        c.model = parse_model_kind(raw.at("model").value);
    } catch (const ConfigError& e) {
        throw ConfigError(raw.at("model").origin + ": " + e.what());
    }
    c.omega = num("omega", 1.0);
    c.lambda = num("lambda", 1.0);
    c.gamma = num("gamma", 1.0);
    c.Gamma = num("Gamma", 1.0);
    c.omega0 = num("omega0", 0.0);
    c.theta = num("theta", 1.0);
    auto origin = [&](const char* k, const char* fallback) { return has(k) ? raw.at(k).origin : std::string(fallback); };
    if (!(c.omega > 0.0)) throw ConfigError(origin("omega", "default") + ": omega must be > 0");
    if (c.lambda < 0.0) throw ConfigError(origin("lambda", "default") + ": lambda must be >= 0");
    if (!(c.gamma > 0.0)) throw ConfigError(origin("gamma", "default") + ": gamma must be > 0");
    if (c.Gamma < 0.0) throw ConfigError(origin("Gamma", "default") + ": Gamma must be >= 0");
    if (c.theta < 0.0 || c.theta > kPi) throw ConfigError(origin("theta", "default") + ": theta must lie in [0, pi]");

    if (has("c_x") || has("Omega_c")) {
        if (c.model != ModelKind::Leo3L) throw ConfigError(origin(has("c_x") ? "c_x" : "Omega_c", "") + ": control keys require model = leo");
    }
    if (c.model == ModelKind::Leo3L) c.control = ControlField{num("c_x", 0.0), num("Omega_c", 0.0)};

    const double period = kTwoPi / c.omega;
    c.t_final = num("t_final", period);
    c.dt = num("dt", c.model == ModelKind::Leo3L ? default_leo_dt(c.omega) : 1e-3 * period);
    if (!(c.t_final > 0.0)) throw ConfigError(origin("t_final", "default") + ": t_final must be > 0");
    if (!(c.dt > 0.0) || c.dt > c.t_final) throw ConfigError(origin("dt", "default") + ": dt must lie in (0, t_final]");

    if (has("n_traj")) c.n_traj = detail::parse_unsigned(raw.at("n_traj").value, raw.at("n_traj").origin, "n_traj");
    if (c.n_traj < 2) throw ConfigError(origin("n_traj", "default") + ": n_traj must be >= 2");
    if (has("master_seed"))
        c.master_seed = detail::parse_unsigned(raw.at("master_seed").value, raw.at("master_seed").origin, "master_seed");
    else if (env_seed && *env_seed)
        c.master_seed = detail::parse_unsigned(env_seed, "GEODEC_SEED", "GEODEC_SEED");
    if (has("threads"))
        c.threads = static_cast<unsigned>(detail::parse_unsigned(raw.at("threads").value, raw.at("threads").origin, "threads"));

    if (has("mode")) {
        const auto& m = raw.at("mode");
        if (m.value == "mc") c.mode = RunMode::Mc;
        else if (m.value == "analytic") c.mode = RunMode::Analytic;
        else if (m.value == "both") c.mode = RunMode::Both;
        else throw ConfigError(m.origin + ": mode must be mc, analytic or both");
    }
    if (has("output")) c.output = raw.at("output").value;

    auto axis = [&](const std::string& p) -> std::optional<SweepAxis> {
        if (!has(p.c_str())) {
            for (const char* suffix : {"_min", "_max", "_points"})
                if (has((p + suffix).c_str()))
                    throw ConfigError(raw.at(p + suffix).origin + ": '" + p + suffix + "' given without '" + p + "'");
            return std::nullopt;
        }
        SweepAxis a;
        a.name = raw.at(p).value;
        if (!detail::is_sweepable(a.name)) throw ConfigError(raw.at(p).origin + ": cannot sweep '" + a.name + "'");
        for (const char* suffix : {"_min", "_max", "_points"})
            if (!has((p + suffix).c_str())) throw ConfigError(raw.at(p).origin + ": sweep axis needs '" + p + suffix + "'");
        a.min = detail::parse_double(raw.at(p + "_min"), p + "_min");
        a.max = detail::parse_double(raw.at(p + "_max"), p + "_max");
        a.points = detail::parse_unsigned(raw.at(p + "_points").value, raw.at(p + "_points").origin, p + "_points");
        return a;
    };
    c.sweep_x = axis("sweep_x");
    c.sweep_y = axis("sweep_y");
    if (c.sweep_y && !c.sweep_x) throw ConfigError(raw.at("sweep_y").origin + ": sweep_y requires sweep_x");
    return c;
}

inline RunConfig parse_config(std::string_view text, const RawConfig& overrides = {}, const std::string& source = "<config>",
                              const char* env_seed = std::getenv("GEODEC_SEED")) {
    return resolve_config(merge_config(parse_config_text(text, source), overrides), env_seed);
}

/// Copy of `c` with one sweepable parameter replaced.
inline RunConfig with_parameter(RunConfig c, const std::string& name, double value) {
    if (name == "theta") c.theta = value;
    else if (name == "gamma") c.gamma = value;
    else if (name == "lambda") c.lambda = value;
    else if (name == "omega") c.omega = value;
    else if (name == "omega0") c.omega0 = value;
    else if (name == "Gamma") c.Gamma = value;
    else if (name == "t_final") c.t_final = value;
    else if (name == "c_x" || name == "Omega_c") {
        if (!c.control) throw ConfigError("cannot sweep '" + name + "' without model = leo");
        (name == "c_x" ? c.control->c_x : c.control->Omega_c) = value;
    } else
        throw ConfigError("cannot sweep '" + name + "'");
    return c;
}

}  // namespace geodec
