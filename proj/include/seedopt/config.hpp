#pragma once

/**
 * @file config.hpp
 * @brief Run configuration: JSON parsing with field-path diagnostics, canonical
 *        serialization and the built-in seed-train layouts.
 *
 * Randomness fans out from the single top-level `seed`:
 *   Monte-Carlo ensemble  derive_seed(seed, 1)
 *   optimizer             derive_seed(seed, 2)
 */

#include "seedopt/integrator.hpp"
#include "seedopt/kinetics.hpp"
#include "seedopt/mobo.hpp"
#include "seedopt/seedtrain.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seedopt {

inline constexpr int kSchemaVersion = 1;

enum class ObjectiveMode { two, four };

/// Bioreactor volumes: "results" = 40/320/2100 L + 9600 L, "table2" = 38/302/2054 L + 9500 L.
enum class BioreactorPreset { results, table2 };

struct ReferenceSpec {
    DesignPoint volumes{0.015, 0.08, 0.30, 2.0, 4.0};  ///< L
    double interval_h = 72.0;
};

struct RunConfig {
    std::uint64_t seed = 20220101;
    ObjectiveMode objectives = ObjectiveMode::two;
    std::string output_dir = "out";
    unsigned workers = 1;

    int flasks = 5;
    BioreactorPreset bioreactors = BioreactorPreset::results;
    SeedTrainConfig seed_train;  ///< scales fully resolved
    ModelParameters model;
    IntegratorConfig integrator;
    DesignSpace design_space;
    OptimizerConfig optimizer;   ///< sense and rng_seed are derived

    std::optional<DesignPoint> volumes;  ///< flask volumes for `simulate`
    ReferenceSpec reference;
    std::vector<double> mu_factors{0.95, 1.0, 1.05};
    std::vector<int> budgets{10, 20, 30};

    /// Apply the seed fan-out and objective senses, then validate every section.
    void finalize();
};

/// Flask, bioreactor and production scales for 3, 4 or 5 flasks.
std::vector<ScaleConfig> standard_scales(int flasks, BioreactorPreset preset);

/// Flask filling-volume bounds for 3, 4 or 5 flasks (L).
DesignSpace flask_design_space(int flasks);

/// Defaults for the given layout, finalized.
RunConfig default_run_config(int flasks = 5, ObjectiveMode objectives = ObjectiveMode::two);

/// Throws ConfigError naming the dotted path of the offending field.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Canonical JSON with every field explicit; parse(serialize(c)) reproduces c.
std::string serialize_run_config(const RunConfig& cfg);

/// Rebuild scales and design space for a different flask count, keeping all other settings.
void set_flask_count(RunConfig& cfg, int flasks);

std::vector<std::string> objective_names(ObjectiveMode mode);
std::vector<std::string> objective_units(ObjectiveMode mode);
std::vector<Sense> objective_senses(ObjectiveMode mode);

}  // namespace seedopt
