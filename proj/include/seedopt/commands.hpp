#pragma once

/**
 * @file commands.hpp
 * @brief The operations behind the CLI verbs. Each writes its artifacts under
 *        an output directory and returns the in-memory results.
 */

#include "seedopt/config.hpp"
#include "seedopt/mobo.hpp"
#include "seedopt/seedtrain.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace seedopt {

/// Receives one human-readable line per completed step; may be empty.
using ProgressFn = std::function<void(const std::string&)>;

/// Seed-train black box: flask volumes to {d, D} or {d, D, titer, viability}.
ObjectiveFunction seed_train_objective(const RunConfig& cfg);

/// Copy of cfg with the reference volumes and a fixed passaging interval at every transition.
RunConfig reference_config(const RunConfig& cfg);

/// Copy of cfg with mu_max and every per-scale override multiplied by factor.
RunConfig scale_growth_rate(const RunConfig& cfg, double factor);

/// File-name stem for each objective, e.g. "duration" for d.
std::vector<std::string> objective_slugs(ObjectiveMode mode);

SeedTrainResult cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out);
SeedTrainResult cmd_reference(const RunConfig& cfg, const std::filesystem::path& out);

/// On an objective failure the evaluations so far are written to history.csv before rethrowing.
OptimizationResult cmd_optimize(const RunConfig& cfg, const std::filesystem::path& out,
                                const ProgressFn& progress = {});

struct ScenarioSummary {
    double factor = 1.0;
    OptimizationResult result;
};

std::vector<ScenarioSummary> cmd_sweep_mu(const RunConfig& cfg, const std::filesystem::path& out,
                                          const ProgressFn& progress = {});

struct BudgetSummary {
    int budget = 0;  ///< optimizer iterations after the initial design
    OptimizationResult result;
    double hypervolume = 0.0;  ///< against the reference point of the largest budget
};

/// One run at the largest budget, sliced into history prefixes.
std::vector<BudgetSummary> iteration_study(const ObjectiveFunction& objective, const DesignSpace& space,
                                           const OptimizerConfig& optimizer, const std::vector<int>& budgets);

std::vector<BudgetSummary> cmd_iteration_study(const RunConfig& cfg, const std::filesystem::path& out,
                                               const ProgressFn& progress = {});

/// Canonical form of the configuration.
std::string cmd_validate_config(const RunConfig& cfg);

}  // namespace seedopt
