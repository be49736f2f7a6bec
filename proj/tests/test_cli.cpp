#include "doctest.h"

#include "seedopt/commands.hpp"
#include "seedopt/config.hpp"
#include "seedopt/error.hpp"
#include "seedopt/random.hpp"
#include "seedopt/report.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

using namespace seedopt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("seedopt_cli_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small_config(int flasks = 5, ObjectiveMode mode = ObjectiveMode::two) {
    RunConfig c = default_run_config(flasks, mode);
    c.seed_train.n_mc = 30;
    c.optimizer.n_lhs = 4;
    c.optimizer.n_iterations = 2;
    c.optimizer.gp_restarts = 2;
    c.optimizer.ehvi_mc_samples = 128;
    c.optimizer.acq_restarts = 8;
    c.optimizer.acq_refine = 1;
    c.finalize();
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
    }
    return out;
}

struct Run {
    int status;
    std::string output;
};

Run run_cli(const std::string& args) {
    const fs::path log = fs::temp_directory_path() / "seedopt_cli_stdout.txt";
    const std::string cmd = std::string(SEEDOPT_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(log)};
}

}  // namespace

TEST_CASE("reference writes the fixed-interval protocol") {
    RunConfig c = small_config();
    const fs::path out = scratch("reference");
    const auto r = cmd_reference(c, out);
    CHECK(r.objectives.d == 576.0);

    const auto protocol = read_csv(out / "protocol.csv");
    CHECK(protocol.rows.size() == 8);
    for (std::size_t i = 0; i < protocol.rows.size(); ++i) CHECK(protocol.number(i, "hour_in_scale") == 72.0);
    CHECK(protocol.units[protocol.column("time")] == "h");

    const std::string json = slurp(out / "objectives.json");
    CHECK(json.find("\"schema_version\": 1") != std::string::npos);
    CHECK(json.find("576.0") != std::string::npos);
    for (const char* name : kStateNames) {
        const auto bands = read_csv(out / (std::string("bands_") + name + ".csv"));
        CHECK(bands.columns == std::vector<std::string>{"t", "mean", "q05", "q95"});
        CHECK(bands.rows.size() > 500);
    }
}

TEST_CASE("reference needs one volume per flask") {
    RunConfig c = small_config(4);
    CHECK_THROWS_AS(reference_config(c), ConfigError);
}

TEST_CASE("simulate without volumes reports the field") {
    RunConfig c = small_config();
    try {
        cmd_simulate(c, scratch("novolumes"));
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.path() == "volumes");
    }
}

TEST_CASE("zero uncertainty collapses every band") {
    RunConfig c = small_config();
    c.seed_train.uncertainty.mu_max_rel_sd = 0.0;
    c.seed_train.uncertainty.initial_vcd_rel_sd = 0.0;
    c.volumes = DesignPoint{0.0145, 0.115, 0.49, 2.1, 7.4};
    c.finalize();
    const fs::path out = scratch("zero_sd");
    cmd_simulate(c, out);
    for (const char* name : kStateNames) {
        const auto bands = read_csv(out / (std::string("bands_") + name + ".csv"));
        for (const auto& row : bands.rows) {
            CHECK(row[1] == row[2]);
            CHECK(row[2] == row[3]);
        }
    }
}

TEST_CASE("optimize artifacts satisfy their schemas") {
    RunConfig c = small_config();
    const fs::path out = scratch("optimize");
    const auto r = cmd_optimize(c, out);

    const auto history = read_csv(out / "history.csv");
    CHECK(history.rows.size() == 6);
    CHECK(history.columns == std::vector<std::string>{"evaluation", "iteration", "provenance", "V1", "V2", "V3",
                                                      "V4", "V5", "d", "D", "is_pareto"});
    CHECK(history.units[history.column("d")] == "h");
    CHECK(history.units[history.column("D")] == "%");
    CHECK(history.units[history.column("V3")] == "L");

    const auto pareto = read_csv(out / "pareto.csv");
    REQUIRE(pareto.rows.size() >= 1);
    std::vector<Point> rows;
    for (std::size_t i = 0; i < pareto.rows.size(); ++i) rows.push_back({pareto.number(i, "d"), pareto.number(i, "D")});
    CHECK(pareto_filter(rows, c.optimizer.sense).size() == rows.size());
    CHECK(fs::exists(out / "protocols" / "solution_1.csv"));
    CHECK(read_csv(out / "protocols" / "solution_1.csv").rows.size() == 8);

    std::size_t contours = 0;
    for (const auto& e : fs::directory_iterator(out / "contours")) {
        const auto grid = read_csv(e.path());
        CHECK(grid.rows.size() == 2500);
        CHECK(grid.columns.size() == 3);
        ++contours;
    }
    CHECK(contours == 2 * 10);
    CHECK(slurp(out / "gp_models.json").find("\"schema_version\"") != std::string::npos);
    CHECK(slurp(out / "summary.json").find("\"schema_version\"") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "spider.csv"));
    CHECK(r.history.size() == 6);
}

TEST_CASE("four objectives emit spider data") {
    RunConfig c = small_config(3, ObjectiveMode::four);
    c.optimizer.n_iterations = 1;
    c.finalize();
    const fs::path out = scratch("four");
    cmd_optimize(c, out);
    const auto spider = read_csv(out / "spider.csv");
    CHECK(spider.columns == std::vector<std::string>{"solution", "d", "D", "titer", "viability"});
    CHECK(spider.units == std::vector<std::string>{"-", "h", "%", "mg/L", "%"});
    CHECK(spider.rows.size() == read_csv(out / "pareto.csv").rows.size());
    std::size_t contours = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(out / "contours")) ++contours;
    CHECK(contours == 4 * 3);
}

TEST_CASE("optimize flushes the history when an evaluation fails") {
    RunConfig c = small_config();
    // Volumes above 6 L are outside the last flask's working range and fail validation.
    c.seed_train.scales[4].working_volume_range.upper = 6.0;
    const auto lhs = latin_hypercube(c.design_space, c.optimizer.n_lhs, derive_seed(c.optimizer.rng_seed, 1));
    std::size_t ok = 0;
    while (ok < lhs.size() && lhs[ok][4] <= 6.0) ++ok;
    REQUIRE(ok < lhs.size());

    const fs::path out = scratch("failing");
    CHECK_THROWS_AS(cmd_optimize(c, out), ObjectiveEvaluationError);
    if (ok == 0) {
        CHECK_FALSE(fs::exists(out / "history.csv"));
    } else {
        CHECK(read_csv(out / "history.csv").rows.size() == ok);
    }
}

TEST_CASE("identity growth scenario reproduces the baseline") {
    RunConfig c = small_config();
    c.mu_factors = {1.0};
    const fs::path base = scratch("sweep_base");
    const fs::path sweep = scratch("sweep");
    cmd_optimize(c, base);
    const auto scenarios = cmd_sweep_mu(c, sweep);
    REQUIRE(scenarios.size() == 1);
    CHECK(tree(base) == tree(sweep / "mu_1"));
    const auto cmp = read_csv(sweep / "comparison.csv");
    CHECK(cmp.rows.size() == 1);
    CHECK(cmp.number(0, "mu_max") == doctest::Approx(c.model.mu_max));
}

TEST_CASE("growth scaling touches every rate") {
    const RunConfig c = default_run_config();
    const RunConfig s = scale_growth_rate(c, 1.05);
    CHECK(s.model.mu_max == doctest::Approx(c.model.mu_max * 1.05));
    CHECK(*s.seed_train.scales[5].mu_max_override == doctest::Approx(0.028 * 1.05));
}

TEST_CASE("iteration study on the seed train") {
    RunConfig c = small_config();
    c.budgets = {1, 2, 3};
    c.finalize();
    const fs::path out = scratch("study");
    const auto budgets = cmd_iteration_study(c, out);
    REQUIRE(budgets.size() == 3);
    const auto hv = read_csv(out / "hypervolume.csv");
    for (std::size_t i = 1; i < hv.rows.size(); ++i) {
        CHECK(hv.number(i, "hypervolume") >= hv.number(i - 1, "hypervolume"));
    }
    for (int b : {1, 2}) {
        const auto h = read_csv(out / ("budget_" + std::to_string(b)) / "history.csv");
        CHECK(h.rows.size() == static_cast<std::size_t>(c.optimizer.n_lhs + b));
        for (std::size_t i = 0; i < h.rows.size(); ++i) {
            CHECK(budgets[static_cast<std::size_t>(b - 1)].result.history[i].x == budgets[2].result.history[i].x);
        }
    }
}

TEST_CASE("verbs are byte-deterministic") {
    RunConfig c = small_config();
    c.volumes = DesignPoint{0.0145, 0.115, 0.49, 2.1, 7.4};
    c.finalize();
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    cmd_simulate(c, a / "simulate");
    cmd_simulate(c, b / "simulate");
    cmd_optimize(c, a / "optimize");
    cmd_optimize(c, b / "optimize");
    CHECK(tree(a) == tree(b));
}

TEST_CASE("command line") {
    const fs::path out = scratch("binary");
    auto r = run_cli("reference --config " SEEDOPT_PRESET_DIR "/reference.json --seed 3 --out " + out.string());
    CHECK(r.status == 0);
    CHECK(r.output.find("d = 576 h") != std::string::npos);
    CHECK(fs::exists(out / "protocol.csv"));

    const fs::path bad = fs::temp_directory_path() / "seedopt_cli_missing.json";
    std::ofstream(bad) << R"({"seed": 5})";
    r = run_cli("validate-config --config " + bad.string());
    CHECK(r.status != 0);
    CHECK(r.output.find("schema_version") != std::string::npos);

    r = run_cli("simulate --out " + out.string());
    CHECK(r.status != 0);
    CHECK(r.output.find("volumes") != std::string::npos);

    r = run_cli("validate-config --flasks 4 --objectives four --seed 11");
    CHECK(r.status == 0);
    const RunConfig parsed = parse_run_config(r.output);
    CHECK(parsed.flasks == 4);
    CHECK(parsed.seed == 11);
    CHECK(parsed.objectives == ObjectiveMode::four);

    r = run_cli("optimize --flasks 6");
    CHECK(r.status != 0);
    r = run_cli("frobnicate");
    CHECK(r.status != 0);
}

TEST_CASE("toy hypervolume plateaus between budgets 20 and 30") {
    DesignSpace square;
    square.names = {"x1", "x2"};
    square.bounds = {{0.0, 1.0}, {0.0, 1.0}};
    OptimizerConfig cfg;
    cfg.sense = {Sense::minimize, Sense::minimize};
    cfg.gp_restarts = 3;
    cfg.ehvi_mc_samples = 256;
    auto toy = [](const Point& x) {
        return std::vector<double>{x[0] * x[0] + x[1] * x[1],
                                   (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 1.0) * (x[1] - 1.0)};
    };
    const auto b = iteration_study(toy, square, cfg, {10, 20, 30});
    REQUIRE(b.size() == 3);
    CHECK(b[0].hypervolume <= b[1].hypervolume);
    CHECK(b[1].hypervolume <= b[2].hypervolume);
    for (std::size_t i = 0; i < b[1].result.history.size(); ++i) CHECK(b[1].result.history[i].x == b[2].result.history[i].x);
    // The front is continuous, so later budgets keep adding archive points; the gain is what plateaus.
    CHECK(b[2].hypervolume - b[1].hypervolume <= 0.01 * b[2].hypervolume);
}
