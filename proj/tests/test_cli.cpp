#include "support.hpp"

#include "catch_amalgamated.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace geodec;
using namespace geodec::testing;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("geodec_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + GEODEC_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string error_of(const std::string& text, const RawConfig& overrides = {}) {
    try {
        parse_config(text, overrides, "test.conf", nullptr);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("configuration defaults and validation") {
    const RunConfig c = parse_config("model = dephasing\n", {}, "test.conf", nullptr);
    CHECK(c.model == ModelKind::Dephasing2L);
    CHECK(c.omega == 1.0);
    CHECK(c.lambda == 1.0);
    CHECK(c.gamma == 1.0);
    CHECK(c.Gamma == 1.0);
    CHECK(c.omega0 == 0.0);
    CHECK(c.t_final == Approx(kTwoPi));
    CHECK(c.dt == Approx(1e-3 * kTwoPi));
    CHECK(c.n_traj == 10000);
    CHECK(c.master_seed == 0);
    CHECK(c.mode == RunMode::Mc);
    CHECK_FALSE(c.control);

    const RunConfig l = parse_config("[model]\nmodel = leo\n[control]\nc_x = 10\nOmega_c = 50\n", {}, "test.conf", nullptr);
    REQUIRE(l.control);
    CHECK(l.control->c_x == 10.0);
    CHECK(l.dt == Approx(default_leo_dt(1.0)));

    CHECK(error_of("model = dephasing\ntheta = 4\n").find("theta must lie in [0, pi]") != std::string::npos);
    CHECK(error_of("model = dephasing\ntheta = 4\n").find("test.conf:2") != std::string::npos);
    CHECK(error_of("model = dephasing\nbogus = 1\n").find("bogus") != std::string::npos);
    CHECK(error_of("model = dephasing\nlambda = 1\nlambda = 2\n").find("test.conf:3") != std::string::npos);
    CHECK(error_of("[bath]\nmodel = dephasing\n").find("test.conf:2") != std::string::npos);
    CHECK(error_of("[nowhere]\nmodel = dephasing\n") != "");
    CHECK(error_of("model = spin\n") != "");
    CHECK(error_of("lambda = 1\n").find("model") != std::string::npos);
    CHECK(error_of("model = dephasing\nlambda = abc\n").find("lambda") != std::string::npos);
    CHECK(error_of("model = dephasing\nn_traj = 1\n") != "");
    CHECK(error_of("model = dephasing\nsweep_x = theta\n").find("sweep_x_min") != std::string::npos);
    CHECK(error_of("model = dephasing\nsweep_x = n_traj\nsweep_x_min = 1\nsweep_x_max = 2\nsweep_x_points = 2\n") != "");
    CHECK(error_of("model = dephasing\ndt = 10\n").find("dt") != std::string::npos);
}

TEST_CASE("configuration precedence") {
    const std::string text = "# comment\n[model]\nmodel = dissipative\nlambda = 0.5 ; trailing\n[ensemble]\nmaster_seed = 9\n";
    CHECK(parse_config(text, {}, "f", nullptr).lambda == 0.5);
    CHECK(parse_config(text, {{"lambda", {"0.25", "--lambda"}}}, "f", nullptr).lambda == 0.25);
    CHECK(parse_config(text, {}, "f", "77").master_seed == 9);
    CHECK(parse_config("model = dephasing\n", {}, "f", "77").master_seed == 77);
    CHECK(parse_config("model = dephasing\n", {{"master_seed", {"5", "--master_seed"}}}, "f", "77").master_seed == 5);
    CHECK(error_of("model = dephasing\n", {{"theta", {"-1", "--theta"}}}).find("--theta") != std::string::npos);
}

TEST_CASE("sweep values") {
    const SweepAxis a{"theta", 0.0, 1.0, 5};
    CHECK(a.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(SweepAxis{"gamma", 2.0, 3.0, 1}.values() == std::vector<double>{2.0});
    CHECK(SweepAxis{"gamma", 2.0, 3.0, 0}.values().empty());

    RunConfig c = parse_config("model = dephasing\nmode = analytic\nsweep_x = theta\nsweep_x_min = 0\nsweep_x_max = 1\nsweep_x_points = 0\n",
                               {}, "f", nullptr);
    std::ostringstream out;
    write_sweep_csv(out, run_sweep(c));
    CHECK(out.str() == "theta,beta_im,beta_re,stderr\n");
}

TEST_CASE("series CSV schema and determinism") {
    const std::string text = "model = dissipative\nn_traj = 50\nmaster_seed = 4\nmode = both\ndt = 0.02\n";
    auto render = [&] {
        std::ostringstream out;
        write_series_csv(out, run_series(parse_config(text, {}, "f", nullptr)));
        return out.str();
    };
    const std::string a = render();
    CHECK(a == render());
    const auto rows = lines_of(a);
    const auto header = split_header(rows.front());
    CHECK(rows.front().rfind(kSeriesHeader, 0) == 0);
    CHECK(header.back() == "residual");
    CHECK(rows.size() == 1 + TimeGrid::with_step(0.0, kTwoPi, 0.02).size());
    CHECK(a.find('\r') == std::string::npos);
    CHECK(a.back() == '\n');

    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("analytic sweep values") {
    SECTION("fig2 corner cell") {
        RunConfig c = resolve_config(figure_preset(FigureId::Fig2), nullptr);
        c = with_parameter(with_parameter(c, "lambda", 0.05), "gamma", 0.05);
        CHECK(std::abs(evaluate_point(c).beta.imag()) < 0.01);
    }
    SECTION("theta = 0 column of fig1a") {
        RawConfig preset = figure_preset(FigureId::Fig1a);
        preset["sweep_y_points"] = {"5", "test"};
        const SweepResult r = run_sweep(resolve_config(preset, nullptr));
        for (const SweepRow& row : r.rows)
            if (row.x == 0.0) CHECK(std::abs(row.beta.imag()) < 1e-12);
    }
}

TEST_CASE("figure 3 files") {
    const fs::path dir = scratch_dir("fig3");
    const FigureOutput out = run_figure(FigureId::Fig3, {}, dir.string(), nullptr);
    REQUIRE(out.leo);
    CHECK(out.leo->sup_im_controlled < kLeoImagBound);
    const std::size_t rows = TimeGrid::with_step(0.0, kTwoPi, default_leo_dt(1.0)).size();
    for (const char* name : {"fig3_target.csv", "fig3_uncontrolled.csv", "fig3_controlled.csv"}) {
        const auto lines = lines_of(slurp(dir / name));
        INFO(name);
        REQUIRE(!lines.empty());
        CHECK(split_header(lines.front()).size() == 8);
        CHECK(lines.front() == kSeriesHeader);
        CHECK(lines.size() == rows + 1);
    }
    const auto summary = lines_of(slurp(dir / "fig3_summary.csv"));
    CHECK(summary.size() == 4);
    fs::remove_all(dir);
}

TEST_CASE("command-line tool") {
    const fs::path dir = scratch_dir("cli");
    const std::string conf = (dir / "run.conf").string();
    std::ofstream(conf) << "[model]\nmodel = dephasing\nlambda = 0.1\n[ensemble]\nn_traj = 200\nmaster_seed = 3\n[grid]\ndt = 0.01\n";

    CHECK(run_cli("selftest") == 0);
    CHECK(run_cli("run -c " + conf + " --mode both --assert -o " + (dir / "a.csv").string()) == 0);
    CHECK(run_cli("run -c " + conf + " --mode both --assert -o " + (dir / "b.csv").string()) == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(lines_of(slurp(dir / "a.csv")).size() == 1 + TimeGrid::with_step(0.0, kTwoPi, 0.01).size());

    CHECK(run_cli("run -c " + conf + " --theta 4") == 2);
    CHECK(run_cli("run -c " + (dir / "missing.conf").string()) == 2);
    CHECK(run_cli("run --no-such-flag") == 2);
    CHECK(run_cli("run -c " + conf + " --model dissipative --lambda 50 --mode analytic") == 3);
    CHECK(run_cli("figure fig9") == 2);
    CHECK(run_cli("figure fig3 --assert -o " + dir.string()) == 0);
    CHECK(fs::exists(dir / "fig3_controlled.csv"));
    fs::remove_all(dir);
}
