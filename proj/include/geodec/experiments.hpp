#pragma once

#include "geodec/closedform.hpp"
#include "geodec/config.hpp"
#include "geodec/csv.hpp"

#include <filesystem>

namespace geodec {

/// Ensemble-mean phases from the model's closed forms: the averaged formulas
/// for the two-level models, the deterministic total phase and trace-form
/// dynamical phase for the three-level model. Standard errors are zero.
inline PhaseSeries analytic_phase_series(const ModelSpec& m) {
    PhaseSeries out;
    out.grid = m.grid;
    const std::size_t n = m.grid.size();
    switch (m.kind) {
        case ModelKind::Dephasing2L:
            out.beta_tot.resize(n);
            out.beta_dyn.resize(n);
            out.beta.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                const auto p = dephasing_avg_phases(m.omega, m.lambda, m.bath, m.theta, m.grid.time(k) - m.grid.t0);
                out.beta_tot[k] = p.beta_tot;
                out.beta_dyn[k] = p.beta_dyn;
                out.beta[k] = p.beta;
            }
            return out;
        case ModelKind::Dissipative2L:
            out.beta_tot = dissipative_avg_total_phase_series(m.omega, m.lambda, m.theta, m.grid, m.obar_coeffs[0]);
            out.beta_dyn = dissipative_avg_dyn_phase_series(m.omega, m.lambda, m.theta, m.grid, m.obar_coeffs[0]);
            out.beta.resize(n);
            for (std::size_t k = 0; k < n; ++k) out.beta[k] = out.beta_tot[k] - out.beta_dyn[k];
            return out;
        case ModelKind::Leo3L: return leo_phase_series(m);
    }
    throw ConfigError("analytic_phase_series: unknown model");
}

struct SeriesResult {
    RunConfig config;
    TimeGrid grid;
    std::optional<PhaseEnsemble> mc;
    std::optional<PhaseSeries> analytic;
};

inline SeriesResult run_series(const RunConfig& c) {
    SeriesResult r;
    r.config = c;
    const ModelSpec m = c.build();
    r.grid = m.grid;
    if (c.mode != RunMode::Analytic) r.mc = average_phase_series(m, c.ensemble());
    if (c.mode != RunMode::Mc) r.analytic = analytic_phase_series(m);
    return r;
}

namespace detail {

inline std::vector<double> phase_columns(Complex tot, Complex dyn, Complex beta) {
    return {tot.real(), tot.imag(), dyn.real(), dyn.imag(), beta.real(), beta.imag()};
}

}  // namespace detail

inline void write_series_csv(std::ostream& out, const SeriesResult& r) {
    CsvWriter csv(out);
    std::vector<std::string> header = split_header(kSeriesHeader);
    const bool both = r.mc && r.analytic;
    if (both)
        for (const char* c : {"an_beta_tot_re", "an_beta_tot_im", "an_beta_dyn_re", "an_beta_dyn_im", "an_beta_re", "an_beta_im",
                              "residual"})
            header.emplace_back(c);
    csv.header(header);
    for (std::size_t k = 0; k < r.grid.size(); ++k) {
        std::vector<double> row{r.grid.time(k)};
        if (r.mc) {
            const auto cols = detail::phase_columns(r.mc->beta_tot.mean[k], r.mc->beta_dyn.mean[k], r.mc->beta.mean[k]);
            row.insert(row.end(), cols.begin(), cols.end());
            row.push_back(r.mc->beta.stderr[k]);
        }
        if (r.analytic) {
            const auto cols = detail::phase_columns(r.analytic->beta_tot[k], r.analytic->beta_dyn[k], r.analytic->beta[k]);
            row.insert(row.end(), cols.begin(), cols.end());
            if (!r.mc) row.push_back(0.0);
        }
        if (both) row.push_back(phase_distance(r.mc->beta.mean[k], r.analytic->beta[k]));
        csv.row(row);
    }
}

inline void write_phase_series_csv(std::ostream& out, const PhaseSeries& s) {
    CsvWriter csv(out);
    csv.header(split_header(kSeriesHeader));
    for (std::size_t k = 0; k < s.grid.size(); ++k) {
        std::vector<double> row{s.grid.time(k)};
        const auto cols = detail::phase_columns(s.beta_tot[k], s.beta_dyn[k], s.beta[k]);
        row.insert(row.end(), cols.begin(), cols.end());
        row.push_back(0.0);
        csv.row(row);
    }
}

struct SweepRow {
    double x = 0.0;
    double y = 0.0;
    Complex beta;     // Monte Carlo mean, or the closed form in analytic mode
    double stderr = 0.0;
    Complex analytic;  // only in both mode
};

struct SweepResult {
    RunConfig config;
    std::vector<SweepRow> rows;  // row-major: x outer, y inner
};

/// Geometric phase at t_final for one parameter point.
inline SweepRow evaluate_point(const RunConfig& c) {
    SweepRow row;
    const ModelSpec m = c.build();
    if (c.mode != RunMode::Analytic) {
        const PhaseEnsemble e = average_phase_series(m, c.ensemble());
        row.beta = e.beta.mean.back();
        row.stderr = e.beta.stderr.back();
    }
    if (c.mode != RunMode::Mc) {
        const Complex an = analytic_phase_series(m).beta.back();
        if (c.mode == RunMode::Analytic)
            row.beta = an;
        else
            row.analytic = an;
    }
    return row;
}

inline SweepResult run_sweep(const RunConfig& c) {
    if (!c.sweep_x) throw ConfigError("sweep requires sweep_x (and optionally sweep_y)");
    SweepResult r;
    r.config = c;
    const std::vector<double> xs = c.sweep_x->values();
    const std::vector<double> ys = c.sweep_y ? c.sweep_y->values() : std::vector<double>{0.0};
    if (c.sweep_y && ys.empty()) return r;
    for (double x : xs) {
        const RunConfig cx = with_parameter(c, c.sweep_x->name, x);
        for (double y : ys) {
            const RunConfig cxy = c.sweep_y ? with_parameter(cx, c.sweep_y->name, y) : cx;
            SweepRow row = evaluate_point(cxy);
            row.x = x;
            row.y = y;
            r.rows.push_back(row);
        }
    }
    return r;
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    CsvWriter csv(out);
    const bool both = r.config.mode == RunMode::Both;
    const bool two_axes = r.config.sweep_y.has_value();
    std::vector<std::string> header{r.config.sweep_x ? r.config.sweep_x->name : "x"};
    if (two_axes) header.push_back(r.config.sweep_y->name);
    for (const char* h : {"beta_im", "beta_re", "stderr"}) header.emplace_back(h);
    if (both)
        for (const char* h : {"an_beta_im", "an_beta_re", "residual"}) header.emplace_back(h);
    csv.header(header);
    for (const SweepRow& row : r.rows) {
        std::vector<double> v{row.x};
        if (two_axes) v.push_back(row.y);
        v.insert(v.end(), {row.beta.imag(), row.beta.real(), row.stderr});
        if (both) v.insert(v.end(), {row.analytic.imag(), row.analytic.real(), phase_distance(row.beta, row.analytic)});
        csv.row(v);
    }
}

enum class FigureId { Fig1a, Fig1b, Fig2, Fig3 };

inline FigureId parse_figure_id(std::string_view s) {
    if (s == "fig1a") return FigureId::Fig1a;
    if (s == "fig1b") return FigureId::Fig1b;
    if (s == "fig2") return FigureId::Fig2;
    if (s == "fig3") return FigureId::Fig3;
    throw ConfigError("unknown figure '" + std::string(s) + "' (expected fig1a, fig1b, fig2 or fig3)");
}

inline std::string_view to_string(FigureId id) {
    switch (id) {
        case FigureId::Fig1a: return "fig1a";
        case FigureId::Fig1b: return "fig1b";
        case FigureId::Fig2: return "fig2";
        case FigureId::Fig3: return "fig3";
    }
    return "?";
}

/// Default settings of each figure; user settings are merged on top.
inline RawConfig figure_preset(FigureId id) {
    const std::string origin = "figure " + std::string(to_string(id));
    RawConfig raw;
    auto set = [&](const char* k, const std::string& v) { raw[k] = {v, origin}; };
    auto axis = [&](const char* prefix, const char* name, const char* lo, const char* hi) {
        const std::string p = prefix;
        set(prefix, name);
        raw[p + "_min"] = {lo, origin};
        raw[p + "_max"] = {hi, origin};
        raw[p + "_points"] = {"41", origin};
    };
    char pi[32];
    std::snprintf(pi, sizeof pi, "%.17g", kPi);
    switch (id) {
        case FigureId::Fig1a:
            set("model", "dissipative");
            set("lambda", "1");
            set("mode", "analytic");
            axis("sweep_x", "theta", "0", pi);
            axis("sweep_y", "gamma", "0.05", "3");
            break;
        case FigureId::Fig1b:
            set("model", "dissipative");
            set("gamma", "1");
            set("mode", "analytic");
            axis("sweep_x", "theta", "0", pi);
            axis("sweep_y", "lambda", "0.05", "3");
            break;
        case FigureId::Fig2:
            set("model", "dissipative");
            set("theta", "1");
            set("mode", "analytic");
            axis("sweep_x", "lambda", "0.05", "3");
            axis("sweep_y", "gamma", "0.05", "3");
            break;
        case FigureId::Fig3:
            set("model", "leo");
            set("gamma", "0.3");
            set("lambda", "1");
            set("theta", "1.2");
            set("c_x", "10");
            set("Omega_c", "50");
            set("mode", "analytic");
            break;
    }
    return raw;
}

struct FigureOutput {
    std::vector<std::string> files;
    std::optional<SweepResult> sweep;
    std::optional<LeoExperiment> leo;
};

inline constexpr double kLeoImagBound = 0.005;

/// Runs a figure and writes its CSV files into `out_dir`.
inline FigureOutput run_figure(FigureId id, const RawConfig& overrides, const std::string& out_dir,
                               const char* env_seed = std::getenv("GEODEC_SEED")) {
    const RunConfig c = resolve_config(merge_config(figure_preset(id), overrides), env_seed);
    std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
    auto path = [&](const std::string& name) { return (std::filesystem::path(out_dir.empty() ? "." : out_dir) / name).string(); };
    FigureOutput out;
    const std::string stem(to_string(id));
    if (id != FigureId::Fig3) {
        out.sweep = run_sweep(c);
        const std::string file = path(stem + ".csv");
        write_file(file, [&](std::ostream& os) { write_sweep_csv(os, *out.sweep); });
        out.files.push_back(file);
        return out;
    }
    if (!c.control) throw ConfigError("fig3 requires model = leo");
    out.leo = run_leo_experiment(c.omega, c.lambda, c.bath(), c.theta, *c.control, c.grid());
    const LeoExperiment& e = *out.leo;
    const std::pair<const char*, const PhaseSeries*> series[] = {
        {"target", &e.target}, {"uncontrolled", &e.uncontrolled}, {"controlled", &e.controlled}};
    for (const auto& [name, s] : series) {
        const std::string file = path(stem + "_" + name + ".csv");
        write_file(file, [&](std::ostream& os) { write_phase_series_csv(os, *s); });
        out.files.push_back(file);
    }
    const std::string summary = path(stem + "_summary.csv");
    write_file(summary, [&](std::ostream& os) {
        CsvWriter csv(os);
        csv.header({"series", "sup_abs_beta_im", "final_beta_re", "final_beta_im", "max_abs_re_diff_from_target"});
        for (const auto& [name, s] : series) {
            double dev = 0.0;
            for (std::size_t k = 0; k < s->beta.size(); ++k)
                dev = std::max(dev, std::abs(s->beta[k].real() - e.target.beta[k].real()));
            csv.row_strings({name, format_number(sup_abs_imag(s->beta)), format_number(s->beta.back().real()),
                             format_number(s->beta.back().imag()), format_number(dev)});
        }
    });
    out.files.push_back(summary);
    return out;
}

}  // namespace geodec
