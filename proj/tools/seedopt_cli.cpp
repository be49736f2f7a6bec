#include "seedopt/commands.hpp"
#include "seedopt/config.hpp"
#include "seedopt/error.hpp"
#include "seedopt/report.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

using namespace seedopt;

namespace {

struct Overrides {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string objectives;
    std::optional<int> flasks;
};

RunConfig resolve(const Overrides& o) {
    RunConfig cfg = o.config_path.empty() ? default_run_config() : load_run_config(o.config_path);
    if (!o.objectives.empty()) cfg.objectives = o.objectives == "four" ? ObjectiveMode::four : ObjectiveMode::two;
    if (o.flasks) set_flask_count(cfg, *o.flasks);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out.empty()) cfg.output_dir = o.out;
    cfg.finalize();
    return cfg;
}

void print_objectives(const SeedTrainResult& r) {
    std::cout << "d = " << format_number(r.objectives.d) << " h, D = " << format_number(r.objectives.D) << " %";
    if (r.objectives.titer_end) std::cout << ", titer = " << format_number(*r.objectives.titer_end) << " mg/L";
    if (r.objectives.viability_end) std::cout << ", viability = " << format_number(*r.objectives.viability_end) << " %";
    std::cout << "\n";
}

void print_pareto(const OptimizationResult& r) {
    std::cout << r.history.size() << " evaluations, " << r.pareto_indices.size() << " Pareto solutions\n";
    for (std::size_t i : r.pareto_indices) {
        std::cout << " ";
        for (double v : r.history[i].objectives) std::cout << " " << format_number(v);
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seed-train filling-volume optimization"};
    app.require_subcommand(1);

    Overrides o;
    bool verbose = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory (overrides output_dir)");
        sub->add_option("--seed", o.seed, "Random seed (overrides seed)");
        sub->add_option("--objectives", o.objectives, "Objective set")->check(CLI::IsMember({"two", "four"}));
        sub->add_option("--flasks", o.flasks, "Number of shake-flask scales")->check(CLI::IsMember({3, 4, 5}));
        sub->add_flag("-v,--verbose", verbose, "Report each objective evaluation on stderr");
    };

    auto* simulate = app.add_subcommand("simulate", "Simulate the seed train at the configured volumes");
    auto* optimize = app.add_subcommand("optimize", "Optimize the flask filling volumes");
    auto* reference = app.add_subcommand("reference", "Simulate the fixed-interval reference protocol");
    auto* sweep = app.add_subcommand("sweep-mu", "Optimize under scaled maximum growth rates");
    auto* study = app.add_subcommand("iteration-study", "Compare optimizer iteration budgets");
    auto* check = app.add_subcommand("validate-config", "Print the canonical configuration");
    for (auto* sub : {simulate, optimize, reference, sweep, study, check}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    ProgressFn progress;
    if (verbose) progress = [](const std::string& line) { std::cerr << line << "\n"; };

    try {
        const RunConfig cfg = resolve(o);
        const std::filesystem::path out = cfg.output_dir;
        if (simulate->parsed()) {
            print_objectives(cmd_simulate(cfg, out));
        } else if (reference->parsed()) {
            print_objectives(cmd_reference(cfg, out));
        } else if (optimize->parsed()) {
            print_pareto(cmd_optimize(cfg, out, progress));
        } else if (sweep->parsed()) {
            for (const auto& s : cmd_sweep_mu(cfg, out, progress)) {
                std::cout << "mu x" << format_number(s.factor) << ": ";
                print_pareto(s.result);
            }
        } else if (study->parsed()) {
            for (const auto& b : cmd_iteration_study(cfg, out, progress)) {
                std::cout << "budget " << b.budget << ": hypervolume " << format_number(b.hypervolume) << ", "
                          << b.result.pareto_indices.size() << " Pareto solutions\n";
            }
        } else if (check->parsed()) {
            std::cout << cmd_validate_config(cfg);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
