#pragma once

/**
 * @file kinetics.hpp
 * @brief Mechanistic CHO cell-culture model: growth, death, substrate uptake,
 *        metabolite and product formation for batch and fed-batch operation.
 *
 * State ordering used by the integrator (see CultureState::to_array):
 *   [Xv, Xt, c_Glc, c_Gln, c_Lac, c_Amm, c_titer, V]
 *
 * Units: cells/L, mmol/L, mg/L, L, h.
 */

#include <array>
#include <cstddef>
#include <vector>

namespace seedopt {

inline constexpr std::size_t kStateSize = 8;
using StateArray = std::array<double, kStateSize>;

enum StateIndex : std::size_t {
    kXv = 0,
    kXt = 1,
    kGlc = 2,
    kGln = 3,
    kLac = 4,
    kAmm = 5,
    kTiter = 6,
    kVolume = 7,
};

/// Column names of the state vector in output files, in StateIndex order.
inline constexpr std::array<const char*, kStateSize> kStateNames = {
    "Xv", "Xt", "c_Glc", "c_Gln", "c_Lac", "c_Amm", "c_titer", "V"};
inline constexpr std::array<const char*, kStateSize> kStateUnits = {
    "cells/L", "cells/L", "mmol/L", "mmol/L", "mmol/L", "mmol/L", "mg/L", "L"};

/**
 * @brief Kinetic constants of the cell-culture model.
 *
 * The defaults are the repository reference set: mu_max and q_titer_max are
 * the reported values for the CHO line; all remaining constants are
 * CHO-literature magnitudes frozen here so that results are reproducible.
 */
struct ModelParameters {
    double mu_max = 0.029;            ///< 1/h
    double mu_d_min = 0.001;          ///< 1/h
    double mu_d_max = 0.008;          ///< 1/h
    double K_S_Glc = 0.5;             ///< mmol/L, Monod constant for growth on glucose
    double K_S_Gln = 0.05;            ///< mmol/L, Monod constant for growth on glutamine
    double k_Glc = 1.0;               ///< mmol/L, glucose uptake half-saturation
    double k_Gln = 0.3;               ///< mmol/L, glutamine uptake half-saturation
    double q_Glc_max = 1.5e-10;       ///< mmol/(cell h)
    double q_Gln_max = 2.5e-11;       ///< mmol/(cell h)
    double Y_Lac_Glc = 0.7;           ///< mmol/mmol
    double Y_Amm_Gln = 1.0;           ///< mmol/mmol
    double q_Lac_uptake_max = 5e-11;  ///< mmol/(cell h)
    double q_Amm_uptake_max = 1e-11;  ///< mmol/(cell h)
    double k_Amm = 0.0;               ///< -, K_Amm = -k_Amm when mu <= mu_d
    double K_Lys = 0.0005;            ///< 1/h
    double q_titer_max = 3.9e-10;     ///< mg/(cell h)
    double t_Lag = 12.0;              ///< h
    double a_Lag = 0.3;               ///< -
    double glc_switch_threshold = 0.5;  ///< mmol/L, lactate uptake below this glucose level
    /// mmol/L. Uptake of lactate and ammonia is scaled by c/(c + uptake_saturation)
    /// so that consumed metabolites stay non-negative. 0 gives the bare rate law.
    double uptake_saturation = 0.1;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

/// Lower bound used in place of c_Lac / c_Amm in the production-ratio denominators.
inline constexpr double kConcentrationGuard = 1e-6;

struct CultureState {
    double t = 0.0;       ///< h
    double Xv = 0.0;      ///< cells/L
    double Xt = 0.0;      ///< cells/L
    double c_Glc = 0.0;   ///< mmol/L
    double c_Gln = 0.0;   ///< mmol/L
    double c_Lac = 0.0;   ///< mmol/L
    double c_Amm = 0.0;   ///< mmol/L
    double c_titer = 0.0; ///< mg/L
    double V = 0.0;       ///< L

    StateArray to_array() const;
    static CultureState from_array(double t, const StateArray& y);
    void validate() const;
};

/// Piecewise-constant feed profile. Each segment holds from its start time
/// until the next segment's start. An empty schedule is batch operation.
struct FeedRates {
    double F_Glc = 0.0;          ///< L/h
    double F_Gln = 0.0;          ///< L/h
    double F_Medium = 0.0;       ///< L/h
    double F_sample = 0.0;       ///< L/h
    double c_Glc_F = 0.0;        ///< mmol/L
    double c_Gln_F = 0.0;        ///< mmol/L
    double c_Glc_Medium = 0.0;   ///< mmol/L
    double c_Gln_Medium = 0.0;   ///< mmol/L
};

class FeedSchedule {
public:
    struct Segment {
        double t_start;
        FeedRates rates;
    };

    FeedSchedule() = default;
    explicit FeedSchedule(std::vector<Segment> segments);

    static FeedSchedule batch() { return {}; }

    /// Rates active at time t; zero before the first segment.
    FeedRates at(double t) const;
    bool is_batch() const;
    const std::vector<Segment>& segments() const { return segments_; }

private:
    std::vector<Segment> segments_;
};

struct SpecificRates {
    double q_Glc = 0.0;
    double q_Gln = 0.0;
    double q_Lac = 0.0;
    double q_Amm = 0.0;
    double q_titer = 0.0;
    double K_Amm = 0.0;  ///< selected ammonia-uptake case factor
};

double specific_growth_rate(const CultureState& s, const ModelParameters& p);
double specific_death_rate(const CultureState& s, const ModelParameters& p);
SpecificRates uptake_and_production_rates(const CultureState& s, const ModelParameters& p);

/// Time derivatives of all eight state components. Every component is NaN when V <= 0.
StateArray ode_rhs(const CultureState& s, const ModelParameters& p, const FeedSchedule& feeds);

/// Batch-mode right-hand side on the raw state array, the hot path for Monte-Carlo runs.
StateArray batch_rhs(double t, const StateArray& y, const ModelParameters& p);

/**
 * @brief Clamp round-off negatives to zero after an integrator step.
 *
 * Values in (-1e-9 * scale, 0) are set to 0, where scale is max(1, |previous|).
 * Anything more negative throws IntegrationError.
 */
void project_nonnegative(StateArray& y, const StateArray& previous);

}  // namespace seedopt
