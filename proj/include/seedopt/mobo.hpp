#pragma once

/**
 * @file mobo.hpp
 * @brief Multi-objective Bayesian optimization over a box.
 *
 * Objectives are handled internally in minimization form: maximized objectives
 * are negated before modelling, filtering and hypervolume computation.
 */

#include "seedopt/gp.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace seedopt {

using Point = std::vector<double>;

struct DesignSpace {
    std::vector<std::string> names;
    std::vector<std::pair<double, double>> bounds;  ///< (lower, upper) per variable

    std::size_t dims() const { return bounds.size(); }
    bool contains(const Point& x) const;
    Point from_unit(const Point& u) const;
    Point to_unit(const Point& x) const;
    void validate() const;
};

enum class Sense { minimize, maximize };

struct OptimizerConfig {
    int n_lhs = 10;
    int n_iterations = 20;
    std::vector<Sense> sense;  ///< one per objective
    int ehvi_mc_samples = 2048;
    int acq_restarts = 32;      ///< LHS starts for the acquisition search
    int acq_refine = 4;         ///< best starts refined by pattern search
    double acq_min_step = 1e-3; ///< pattern-search stop, fraction of each range
    int gp_restarts = 10;
    std::uint64_t rng_seed = 1;
    unsigned workers = 1;

    void validate() const;
};

enum class Provenance { lhs, proposed };

struct Evaluation {
    Point x;
    std::vector<double> objectives;  ///< in the user's sense
    Provenance provenance = Provenance::lhs;
    int iteration = 0;  ///< 0 for LHS points, 1..n_iterations for proposals
};

struct ParetoArchive {
    std::vector<Evaluation> entries;
    std::vector<double> reference_point;  ///< minimization form
};

struct OptimizationResult {
    std::vector<Evaluation> history;
    ParetoArchive archive;
    std::vector<std::size_t> pareto_indices;  ///< into history
    /// Hypervolume of the front of history[0..k] for every k, against archive.reference_point.
    std::vector<double> hypervolume_trace;
    std::vector<GpModel> models;  ///< surrogates fitted to the full history, minimization form
};

using ObjectiveFunction = std::function<std::vector<double>(const Point&)>;

/// Stratified sample: per dimension, one point at the midpoint of each of n equal strata.
std::vector<Point> latin_hypercube(const DesignSpace& space, int n, std::uint64_t seed);

/// Indices of the non-dominated points. Equal vectors are all kept.
std::vector<std::size_t> pareto_filter(const std::vector<Point>& points, const std::vector<Sense>& sense);

/// Minimization form of user-sense objective vectors.
Point to_minimization(const Point& values, const std::vector<Sense>& sense);

/// Worst observed value plus 10% of the observed range, per objective (minimization form).
Point reference_point(const std::vector<Point>& minimized);

/// Dominated volume of a set of minimization-form points; throws PointOutsideRef if a point exceeds ref.
double hypervolume(const std::vector<Point>& front, const Point& ref);

/// Fixed standard-normal draws and the current front for one acquisition surface.
struct EhviContext {
    std::vector<Point> front;  ///< non-dominated, minimization form
    Point ref;
    std::vector<Point> draws;  ///< samples x objectives

    static EhviContext make(std::vector<Point> front, Point ref, int samples, std::uint64_t seed);
};

struct EhviEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo expected hypervolume improvement at x for per-objective minimization-form models.
EhviEstimate acquisition_ehvi(const std::vector<GpModel>& models, const EhviContext& ctx, const Point& x);

/// Exclusive hypervolume contribution of y with respect to a front.
double hypervolume_improvement(const std::vector<Point>& front, const Point& ref, const Point& y);

/// Acquisition maximizer over the box, never within 1e-6 (unit-scaled) of an evaluated point.
Point propose_next(const std::vector<GpModel>& models, const EhviContext& ctx, const DesignSpace& space,
                   const std::vector<Point>& evaluated, const OptimizerConfig& cfg, int iteration);

/// Fit one surrogate per objective on minimization-form values.
std::vector<GpModel> fit_surrogates(const std::vector<Point>& X, const std::vector<Point>& minimized,
                                    const DesignSpace& space, const OptimizerConfig& cfg, int iteration);

OptimizationResult optimize(const ObjectiveFunction& objective, const DesignSpace& space,
                            const OptimizerConfig& cfg);

/// Rebuild archive, Pareto indices and hypervolume trace from a history (used for budget prefixes).
OptimizationResult summarize(std::vector<Evaluation> history, const std::vector<Sense>& sense);

}  // namespace seedopt
