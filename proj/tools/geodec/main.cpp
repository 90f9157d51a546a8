#include "selftest.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace geodec;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitAssert = 4;

struct SharedOptions {
    std::string config_path;
    std::map<std::string, std::string> flags;
    bool assert_thresholds = false;
};

void add_setting_flags(CLI::App* app, SharedOptions& opts) {
    app->add_option("-c,--config", opts.config_path, "key = value configuration file");
    for (const auto& [key, section] : detail::config_sections()) {
        if (key == "output") continue;
        app->add_option("--" + key, opts.flags[key], "[" + section + "] " + key);
    }
    app->add_flag("--assert", opts.assert_thresholds, "exit with status 4 when an acceptance threshold is violated");
}

RawConfig load_settings(const SharedOptions& opts, CLI::App* app, const std::string& output) {
    RawConfig raw;
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path, std::ios::binary);
        if (!in) throw ConfigError("cannot read config file '" + opts.config_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        raw = parse_config_text(buf.str(), opts.config_path);
    }
    RawConfig overrides;
    for (const auto& [key, value] : opts.flags)
        if (app->count("--" + key)) overrides[key] = {value, "--" + key};
    if (!output.empty()) overrides["output"] = {output, "--output"};
    return merge_config(std::move(raw), overrides);
}

template <typename Fill>
void emit(const std::string& path, Fill&& fill) {
    if (path.empty() || path == "-")
        fill(std::cout);
    else
        write_file(path, fill);
}

int run_command(const SharedOptions& opts, CLI::App* app, const std::string& output) {
    const RunConfig c = resolve_config(load_settings(opts, app, output));
    const SeriesResult r = run_series(c);
    emit(c.output, [&](std::ostream& os) { write_series_csv(os, r); });
    if (r.mc)
        std::cerr << "trajectories used: " << r.mc->beta.n << ", excluded: " << r.mc->excluded.size() << "\n";
    if (opts.assert_thresholds && r.mc && r.analytic) {
        const double residual = phase_distance(r.mc->beta.mean.back(), r.analytic->beta.back());
        const double bound = 3.0 * r.mc->beta.stderr.back();
        std::cerr << "final residual " << format_number(residual) << " (3 stderr = " << format_number(bound) << ")\n";
        if (!(residual <= bound)) return kExitAssert;
    }
    return kExitOk;
}

int sweep_command(const SharedOptions& opts, CLI::App* app, const std::string& output) {
    const RunConfig c = resolve_config(load_settings(opts, app, output));
    const SweepResult r = run_sweep(c);
    emit(c.output, [&](std::ostream& os) { write_sweep_csv(os, r); });
    if (opts.assert_thresholds && c.mode == RunMode::Both) {
        bool ok = true;
        for (const SweepRow& row : r.rows) ok = ok && phase_distance(row.beta, row.analytic) <= 3.0 * row.stderr;
        if (!ok) return kExitAssert;
    }
    return kExitOk;
}

/// Largest |Im beta| on the low edges of the non-theta sweep axes.
double edge_imag(const SweepResult& r) {
    double worst = 0.0;
    for (const SweepRow& row : r.rows) {
        const bool x_edge = r.config.sweep_x->name != "theta" && row.x == r.config.sweep_x->min;
        const bool y_edge = r.config.sweep_y && r.config.sweep_y->name != "theta" && row.y == r.config.sweep_y->min;
        if (x_edge || y_edge) worst = std::max(worst, std::abs(row.beta.imag()));
    }
    return worst;
}

int figure_command(const SharedOptions& opts, CLI::App* app, const std::string& figure, const std::string& out_dir) {
    const FigureId id = parse_figure_id(figure);
    RawConfig overrides = load_settings(opts, app, "");
    const FigureOutput out = run_figure(id, overrides, out_dir);
    for (const auto& f : out.files) std::cout << f << "\n";
    int status = kExitOk;
    if (out.leo) {
        std::cout << "sup|Im beta| controlled " << format_number(out.leo->sup_im_controlled) << ", uncontrolled "
                  << format_number(out.leo->sup_im_uncontrolled) << "\n";
        if (opts.assert_thresholds &&
            !(out.leo->sup_im_controlled < kLeoImagBound && out.leo->sup_im_uncontrolled > kLeoImagBound))
            status = kExitAssert;
    }
    if (out.sweep) {
        const double edge = edge_imag(*out.sweep);
        std::cout << "max |Im beta| on the small-parameter edges " << format_number(edge) << "\n";
        if (opts.assert_thresholds && !(edge < 0.01)) status = kExitAssert;
    }
    return status;
}

int selftest_command() {
    int failures = 0;
    for (const auto& c : cli::run_oracle_suite()) {
        const bool ok = c.error <= c.tolerance;
        failures += ok ? 0 : 1;
        std::cout << (ok ? "PASS " : "FAIL ") << c.name << " (error " << format_number(c.error) << ", tolerance "
                  << format_number(c.tolerance) << ")\n";
    }
    return failures == 0 ? kExitOk : kExitAssert;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geodec: complex geometric phases of non-Markovian quantum state diffusion trajectories"};
    app.require_subcommand(1);

    SharedOptions run_opts, sweep_opts, figure_opts;
    std::string run_output, sweep_output, figure_dir = ".", figure_id;

    CLI::App* run = app.add_subcommand("run", "time series of averaged phases for one configuration");
    add_setting_flags(run, run_opts);
    run->add_option("-o,--output", run_output, "CSV path (default: stdout)");

    CLI::App* sweep = app.add_subcommand("sweep", "final-time geometric phase over one or two parameter axes");
    add_setting_flags(sweep, sweep_opts);
    sweep->add_option("-o,--output", sweep_output, "CSV path (default: stdout)");

    CLI::App* figure = app.add_subcommand("figure", "reproduce figure data (fig1a, fig1b, fig2, fig3)");
    figure->add_option("id", figure_id, "figure id")->required();
    add_setting_flags(figure, figure_opts);
    figure->add_option("-o,--output", figure_dir, "output directory");

    CLI::App* selftest = app.add_subcommand("selftest", "run the closed-form oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return run_command(run_opts, run, run_output);
        if (sweep->parsed()) return sweep_command(sweep_opts, sweep, sweep_output);
        if (figure->parsed()) return figure_command(figure_opts, figure, figure_id, figure_dir);
        if (selftest->parsed()) return selftest_command();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ExcessiveExclusions& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
