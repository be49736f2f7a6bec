#pragma once

/**
 * @file seedtrain.hpp
 * @brief Uncertainty-aware seed-train simulation.
 *
 * A seed train is an ordered list of scales (shake flasks, bioreactors, and the
 * production vessel last). Each scale is simulated for a Monte-Carlo ensemble;
 * the passaging hour is the first hour in the scale's window at which
 * mean(Xv) - alpha * sd(Xv) reaches the transfer density required to seed the
 * next scale at the target density. All samples passage at that shared hour.
 */

#include "seedopt/integrator.hpp"
#include "seedopt/kinetics.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seedopt {

struct Range {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double v) const { return v >= lower && v <= upper; }
};

struct ScaleConfig {
    std::string name;
    double filling_volume_target = 0.0;  ///< L
    Range working_volume_range;          ///< L
    Range passaging_window{48.0, 120.0}; ///< h, relative to inoculation of this scale
    double medium_c_Glc = 30.0;          ///< mmol/L
    double medium_c_Gln = 6.0;           ///< mmol/L
    std::optional<double> mu_max_override;  ///< 1/h
    bool is_flask = false;               ///< flask targets are set from the design point

    void validate() const;
};

struct UncertaintySpec {
    double mu_max_rel_sd = 0.03;       ///< lognormal, one draw per sample for the whole train
    double initial_vcd_rel_sd = 0.05;  ///< lognormal on the thawed Xv
    std::uint64_t rng_seed = 20220101;
};

enum class DeviationCounting { per_trajectory, per_event };

struct SeedTrainConfig {
    std::vector<ScaleConfig> scales;  ///< flasks, bioreactors, production vessel (last)
    Range seeding_vcd_range{3e8, 3.5e8};     ///< cells/L
    Range transfer_vcd_range{1e9, 1e10};     ///< cells/L
    double target_seeding_vcd = 3.15e8;      ///< cells/L
    double alpha = 1.0;
    UncertaintySpec uncertainty;
    int n_mc = 1000;
    double production_duration = 192.0;  ///< h
    CultureState initial_state{0.0, 3.15e8, 3.3e8, 30.0, 6.0, 1.0, 0.5, 0.0, 0.015};
    /// Lag phase after every passaging instead of only after thaw.
    bool lag_every_scale = false;
    /// Count the thawed seeding density of scale 1 as a checked seeding event.
    bool count_initial_seeding = false;
    DeviationCounting deviation_counting = DeviationCounting::per_trajectory;
    /// Fixed passaging hour per transition (size = scales - 1) bypassing the utility search.
    std::vector<double> fixed_passaging_times;

    std::size_t flask_count() const;
    double max_window_upper() const;
    void validate() const;
};

/// Filling volumes of the flask scales, in train order (L).
using DesignPoint = std::vector<double>;

struct ObjectiveVector {
    double d = 0.0;                       ///< h
    double D = 0.0;                       ///< %
    std::optional<double> titer_end;      ///< mg/L
    std::optional<double> viability_end;  ///< %
};

struct PassagingEvent {
    int scale_index = 0;
    double time = 0.0;                    ///< h, absolute
    double transfer_vcd = 0.0;            ///< cells/L
    double seeding_vcd_next = 0.0;        ///< cells/L
    double suspension_volume_used = 0.0;  ///< L
    double medium_volume_added = 0.0;     ///< L
    double suspension_discarded = 0.0;    ///< L
};

struct Band {
    std::vector<double> t;  ///< h, absolute
    std::vector<double> mean;
    std::vector<double> q05;
    std::vector<double> q95;
};

struct SeedTrainResult {
    ObjectiveVector objectives;
    bool feasible = true;
    std::optional<int> unreachable_scale;        ///< set when a penalty was applied
    std::vector<PassagingEvent> protocol;        ///< ensemble-mean schedule
    std::vector<double> passaging_hours;         ///< per transition, relative to its scale
    std::array<Band, kStateSize> bands;          ///< empty unless requested
    std::vector<bool> mc_violation_flags;
    int violation_events = 0;
    int checked_events = 0;
};

struct SimulationOptions {
    bool four_objectives = false;
    bool compute_bands = true;
    unsigned workers = 1;  ///< threads for the per-sample integrations
};

/// Minimum Xv at which transferring the whole current volume reaches the seeding target.
double required_transfer_vcd(const ScaleConfig& current, const ScaleConfig& next,
                             double target_seeding, double transfer_floor);

/**
 * @brief First hour in the window with mean - alpha * sd >= threshold.
 *
 * @param xv_by_sample hourly Xv per sample; entry h is local hour h.
 * Throws ThresholdUnreachable when no hour qualifies.
 */
int find_passaging_time(const std::vector<std::vector<double>>& xv_by_sample, double alpha,
                        double threshold, Range window);

/// U = mean - alpha * sd (sample sd, n - 1) of the ensemble at one hour.
double utility_at(const std::vector<std::vector<double>>& xv_by_sample, std::size_t hour,
                  double alpha);

struct PassagingOutcome {
    CultureState state;  ///< seeded next scale, t = 0
    double suspension_used = 0.0;
    double medium_added = 0.0;
    double discarded = 0.0;
    double seeding_vcd = 0.0;
};

/// Split the source culture so that the next scale starts at the target density.
PassagingOutcome execute_passaging(const CultureState& source, const ScaleConfig& next,
                                   double target_seeding);

SeedTrainResult simulate_seed_train(const DesignPoint& x, const SeedTrainConfig& cfg,
                                    const ModelParameters& p, const IntegratorConfig& icfg,
                                    const SimulationOptions& opts = {});

/// Integrator settings tuned for the culture model (per-component absolute tolerances).
IntegratorConfig default_culture_integrator();

/// Sample quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

}  // namespace seedopt
