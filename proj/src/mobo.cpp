#include "seedopt/mobo.hpp"

#include "seedopt/error.hpp"
#include "seedopt/parallel.hpp"
#include "seedopt/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>

namespace seedopt {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

bool dominates(const Point& a, const Point& b) {
    bool strictly = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] > b[j]) return false;
        if (a[j] < b[j]) strictly = true;
    }
    return strictly;
}

bool weakly_dominates(const Point& a, const Point& b) {
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] > b[j]) return false;
    }
    return true;
}

// Dominated volume over the first m objectives. Points need not be mutually non-dominated.
double hv_recursive(std::vector<Point> pts, const Point& ref, std::size_t m) {
    std::erase_if(pts, [&](const Point& p) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!(p[j] < ref[j])) return true;
        }
        return false;
    });
    if (pts.empty()) return 0.0;
    if (m == 1) {
        double best = ref[0];
        for (const auto& p : pts) best = std::min(best, p[0]);
        return ref[0] - best;
    }
    if (m == 2) {
        std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
            return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
        });
        double volume = 0.0;
        double ceiling = ref[1];
        for (const auto& p : pts) {
            if (p[1] < ceiling) {
                volume += (ref[0] - p[0]) * (ceiling - p[1]);
                ceiling = p[1];
            }
        }
        return volume;
    }
    const std::size_t last = m - 1;
    std::sort(pts.begin(), pts.end(), [last](const Point& a, const Point& b) { return a[last] < b[last]; });
    double volume = 0.0;
    std::vector<Point> active;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        active.push_back(pts[i]);
        const double top = i + 1 < pts.size() ? pts[i + 1][last] : ref[last];
        const double depth = top - pts[i][last];
        if (depth > 0.0) volume += depth * hv_recursive(active, ref, m - 1);
    }
    return volume;
}

std::vector<Point> minimized_history(const std::vector<Evaluation>& history, const std::vector<Sense>& sense) {
    std::vector<Point> out;
    out.reserve(history.size());
    for (const auto& e : history) out.push_back(to_minimization(e.objectives, sense));
    return out;
}

double unit_distance(const DesignSpace& space, const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double r = space.bounds[d].second - space.bounds[d].first;
        const double z = (a[d] - b[d]) / r;
        s += z * z;
    }
    return std::sqrt(s);
}

}  // namespace

bool DesignSpace::contains(const Point& x) const {
    if (x.size() != dims()) return false;
    for (std::size_t d = 0; d < x.size(); ++d) {
        if (x[d] < bounds[d].first || x[d] > bounds[d].second) return false;
    }
    return true;
}

Point DesignSpace::from_unit(const Point& u) const {
    Point x(u.size());
    for (std::size_t d = 0; d < u.size(); ++d) {
        const auto [lo, hi] = bounds[d];
        x[d] = std::clamp(lo + u[d] * (hi - lo), lo, hi);
    }
    return x;
}

Point DesignSpace::to_unit(const Point& x) const {
    Point u(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) {
        const auto [lo, hi] = bounds[d];
        u[d] = (x[d] - lo) / (hi - lo);
    }
    return u;
}

void DesignSpace::validate() const {
    require(!bounds.empty(), "design space has no variables");
    require(names.empty() || names.size() == bounds.size(), "design space: one name per variable");
    for (const auto& [lo, hi] : bounds) {
        require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "design space: require lower < upper");
    }
}

void OptimizerConfig::validate() const {
    require(n_lhs >= 2, "n_lhs must be >= 2");
    require(n_iterations >= 0, "n_iterations must be >= 0");
    require(!sense.empty(), "at least one objective is required");
    require(ehvi_mc_samples >= 1, "ehvi_mc_samples must be >= 1");
    require(acq_restarts >= 1, "acq_restarts must be >= 1");
    require(acq_refine >= 0, "acq_refine must be >= 0");
    require(acq_min_step > 0.0 && acq_min_step < 1.0, "acq_min_step must lie in (0, 1)");
    require(gp_restarts >= 1, "gp_restarts must be >= 1");
}

std::vector<Point> latin_hypercube(const DesignSpace& space, int n, std::uint64_t seed) {
    space.validate();
    require(n >= 1, "latin_hypercube: n must be >= 1");
    Rng rng(seed);
    const std::size_t dims = space.dims();
    std::vector<Point> unit(static_cast<std::size_t>(n), Point(dims));
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (std::size_t d = 0; d < dims; ++d) {
        std::iota(perm.begin(), perm.end(), 0);
        // Fisher-Yates with explicit draws; std::shuffle's algorithm is implementation-defined.
        for (std::size_t i = perm.size(); i > 1; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i - 1);
            std::swap(perm[i - 1], perm[pick(rng)]);
        }
        for (std::size_t i = 0; i < unit.size(); ++i) unit[i][d] = (perm[i] + 0.5) / n;
    }
    std::vector<Point> out;
    out.reserve(unit.size());
    for (const auto& u : unit) out.push_back(space.from_unit(u));
    return out;
}

Point to_minimization(const Point& values, const std::vector<Sense>& sense) {
    require(values.size() == sense.size(), "objective vector size does not match the senses");
    Point out(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
        out[j] = sense[j] == Sense::maximize ? -values[j] : values[j];
    }
    return out;
}

std::vector<std::size_t> pareto_filter(const std::vector<Point>& points, const std::vector<Sense>& sense) {
    require(!points.empty(), "pareto_filter: no points");
    std::vector<Point> mins;
    mins.reserve(points.size());
    for (const auto& p : points) mins.push_back(to_minimization(p, sense));

    // Sort lexicographically; a point can only be dominated by one that precedes it.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mins[a] < mins[b]; });
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        const bool dominated = std::any_of(kept.begin(), kept.end(),
                                           [&](std::size_t k) { return dominates(mins[k], mins[idx]); });
        if (!dominated) kept.push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

Point reference_point(const std::vector<Point>& minimized) {
    require(!minimized.empty(), "reference_point: no points");
    const std::size_t m = minimized[0].size();
    Point ref(m);
    for (std::size_t j = 0; j < m; ++j) {
        double lo = minimized[0][j], hi = minimized[0][j];
        for (const auto& p : minimized) {
            lo = std::min(lo, p[j]);
            hi = std::max(hi, p[j]);
        }
        const double range = hi - lo;
        ref[j] = hi + (range > 0.0 ? 0.1 * range : 0.1 * std::max(1.0, std::abs(hi)));
    }
    return ref;
}

double hypervolume(const std::vector<Point>& front, const Point& ref) {
    require(!ref.empty(), "hypervolume: empty reference point");
    for (const auto& p : front) {
        require(p.size() == ref.size(), "hypervolume: dimension mismatch");
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (p[j] > ref[j]) throw PointOutsideRef("hypervolume: point exceeds the reference point");
        }
    }
    return hv_recursive(front, ref, ref.size());
}

double hypervolume_improvement(const std::vector<Point>& front, const Point& ref, const Point& y) {
    double box = 1.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (!(y[j] < ref[j])) return 0.0;
        box *= ref[j] - y[j];
    }
    for (const auto& p : front) {
        if (weakly_dominates(p, y)) return 0.0;
    }
    std::vector<Point> limited;
    limited.reserve(front.size());
    for (const auto& p : front) {
        Point q(p.size());
        for (std::size_t j = 0; j < p.size(); ++j) q[j] = std::max(p[j], y[j]);
        limited.push_back(std::move(q));
    }
    return std::max(0.0, box - hv_recursive(std::move(limited), ref, ref.size()));
}

EhviContext EhviContext::make(std::vector<Point> front, Point ref, int samples, std::uint64_t seed) {
    require(samples >= 1, "EHVI needs at least one sample");
    EhviContext ctx;
    ctx.front = std::move(front);
    ctx.ref = std::move(ref);
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ctx.draws.assign(static_cast<std::size_t>(samples), Point(ctx.ref.size()));
    for (auto& z : ctx.draws) {
        for (double& v : z) v = normal(rng);
    }
    return ctx;
}

EhviEstimate acquisition_ehvi(const std::vector<GpModel>& models, const EhviContext& ctx, const Point& x) {
    const std::size_t m = models.size();
    require(m == ctx.ref.size(), "acquisition_ehvi: one model per objective required");
    Point mean(m), sd(m);
    for (std::size_t j = 0; j < m; ++j) {
        // Observations are deterministic given the seed, so the latent variance is used.
        const GpPrediction p = models[j].predict(x, false);
        mean[j] = p.mean;
        sd[j] = std::sqrt(p.variance);
    }
    double sum = 0.0, sum_sq = 0.0;
    Point y(m);
    for (const auto& z : ctx.draws) {
        for (std::size_t j = 0; j < m; ++j) y[j] = mean[j] + sd[j] * z[j];
        const double gain = hypervolume_improvement(ctx.front, ctx.ref, y);
        sum += gain;
        sum_sq += gain * gain;
    }
    const double n = static_cast<double>(ctx.draws.size());
    const double value = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * value * value) / (n - 1)) : 0.0;
    return {value, std::sqrt(var / n)};
}

Point propose_next(const std::vector<GpModel>& models, const EhviContext& ctx, const DesignSpace& space,
                   const std::vector<Point>& evaluated, const OptimizerConfig& cfg, int iteration) {
    const std::size_t dims = space.dims();
    struct Candidate {
        Point u;
        double value;
        double spread;  // tie-break: summed standardized posterior SD
    };
    auto score = [&](const Point& u) {
        const Point x = space.from_unit(u);
        double spread = 0.0;
        for (const auto& gp : models) spread += std::sqrt(gp.predict(x, false).variance) / gp.output_sd();
        return Candidate{u, acquisition_ehvi(models, ctx, x).value, spread};
    };
    auto better = [](const Candidate& a, const Candidate& b) {
        return a.value > b.value || (a.value == b.value && a.spread > b.spread);
    };
    auto duplicate = [&](const Point& u) {
        const Point x = space.from_unit(u);
        return std::any_of(evaluated.begin(), evaluated.end(),
                           [&](const Point& e) { return unit_distance(space, x, e) < 1e-6; });
    };

    DesignSpace unit_box;
    unit_box.bounds.assign(dims, {0.0, 1.0});
    const auto starts = latin_hypercube(unit_box, cfg.acq_restarts,
                                        derive_seed(cfg.rng_seed, 0x5000 + static_cast<std::uint64_t>(iteration)));
    std::vector<Candidate> pool(starts.size());
    parallel_for(starts.size(), cfg.workers, [&](std::size_t i) { pool[i] = score(starts[i]); });
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return better(pool[a], pool[b]); });

    const std::size_t refine = std::min<std::size_t>(static_cast<std::size_t>(cfg.acq_refine), pool.size());
    std::vector<Candidate> refined(refine);
    parallel_for(refine, cfg.workers, [&](std::size_t r) {
        Candidate cur = pool[order[r]];
        double step = 0.125;
        while (step >= cfg.acq_min_step) {
            bool moved = false;
            for (std::size_t d = 0; d < dims && !moved; ++d) {
                for (double dir : {1.0, -1.0}) {
                    Point u = cur.u;
                    u[d] = std::clamp(u[d] + dir * step, 0.0, 1.0);
                    if (u[d] == cur.u[d]) continue;
                    Candidate c = score(u);
                    if (c.value > cur.value) {
                        cur = std::move(c);
                        moved = true;
                        break;
                    }
                }
            }
            if (!moved) step *= 0.5;
        }
        refined[r] = std::move(cur);
    });

    std::vector<Candidate> all = refined;
    for (std::size_t i : order) all.push_back(pool[i]);
    std::stable_sort(all.begin(), all.end(), better);
    for (const auto& c : all) {
        if (!duplicate(c.u)) return space.from_unit(c.u);
    }
    // Every candidate coincides with an evaluated point; fall back to fresh random points.
    Rng rng(derive_seed(cfg.rng_seed, 0x6000 + static_cast<std::uint64_t>(iteration)));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (;;) {
        Point u(dims);
        for (double& v : u) v = uni(rng);
        if (!duplicate(u)) return space.from_unit(u);
    }
}

std::vector<GpModel> fit_surrogates(const std::vector<Point>& X, const std::vector<Point>& minimized,
                                    const DesignSpace& space, const OptimizerConfig& cfg, int iteration) {
    const std::size_t m = minimized.at(0).size();
    std::vector<std::optional<GpModel>> slots(m);
    parallel_for(m, cfg.workers, [&](std::size_t j) {
        std::vector<double> y;
        y.reserve(minimized.size());
        for (const auto& v : minimized) y.push_back(v[j]);
        GpFitOptions o;
        o.restarts = cfg.gp_restarts;
        o.seed = derive_seed(cfg.rng_seed, 0x1000 + static_cast<std::uint64_t>(iteration) * 16 + j);
        o.input_bounds = space.bounds;
        slots[j] = GpModel::fit(X, y, o);
    });
    std::vector<GpModel> models;
    models.reserve(m);
    for (auto& s : slots) models.push_back(std::move(*s));
    return models;
}

OptimizationResult summarize(std::vector<Evaluation> history, const std::vector<Sense>& sense) {
    require(!history.empty(), "summarize: empty history");
    OptimizationResult r;
    r.history = std::move(history);
    const auto mins = minimized_history(r.history, sense);
    std::vector<Point> values;
    for (const auto& e : r.history) values.push_back(e.objectives);
    r.pareto_indices = pareto_filter(values, sense);
    r.archive.reference_point = reference_point(mins);
    for (std::size_t i : r.pareto_indices) r.archive.entries.push_back(r.history[i]);

    std::vector<Point> front;
    for (std::size_t k = 0; k < mins.size(); ++k) {
        const Point& y = mins[k];
        if (std::none_of(front.begin(), front.end(), [&](const Point& p) { return weakly_dominates(p, y); })) {
            std::erase_if(front, [&](const Point& p) { return dominates(y, p); });
            front.push_back(y);
        }
        r.hypervolume_trace.push_back(hypervolume(front, r.archive.reference_point));
    }
    return r;
}

OptimizationResult optimize(const ObjectiveFunction& objective, const DesignSpace& space,
                            const OptimizerConfig& cfg) {
    space.validate();
    cfg.validate();
    const std::size_t m = cfg.sense.size();

    std::vector<Evaluation> history;
    auto evaluate = [&](const Point& x, Provenance prov, int iteration) {
        std::vector<double> f;
        try {
            f = objective(x);
        } catch (const std::exception& e) {
            throw ObjectiveEvaluationError(x, std::string("objective evaluation failed: ") + e.what());
        }
        if (f.size() != m) throw ObjectiveEvaluationError(x, "objective returned the wrong number of values");
        for (double v : f) {
            if (!std::isfinite(v)) throw ObjectiveEvaluationError(x, "objective returned a non-finite value");
        }
        history.push_back({x, std::move(f), prov, iteration});
    };

    for (const auto& x : latin_hypercube(space, cfg.n_lhs, derive_seed(cfg.rng_seed, 1))) {
        evaluate(x, Provenance::lhs, 0);
    }

    for (int it = 1; it <= cfg.n_iterations; ++it) {
        std::vector<Point> X;
        for (const auto& e : history) X.push_back(e.x);
        const auto mins = minimized_history(history, cfg.sense);
        const auto models = fit_surrogates(X, mins, space, cfg, it);

        std::vector<Point> front;
        std::vector<Point> values;
        for (const auto& e : history) values.push_back(e.objectives);
        for (std::size_t i : pareto_filter(values, cfg.sense)) front.push_back(mins[i]);
        const auto ctx = EhviContext::make(front, reference_point(mins), cfg.ehvi_mc_samples,
                                           derive_seed(cfg.rng_seed, 0x3000 + static_cast<std::uint64_t>(it)));
        evaluate(propose_next(models, ctx, space, X, cfg, it), Provenance::proposed, it);
    }

    OptimizationResult result = summarize(std::move(history), cfg.sense);
    std::vector<Point> X;
    for (const auto& e : result.history) X.push_back(e.x);
    result.models = fit_surrogates(X, minimized_history(result.history, cfg.sense), space, cfg,
                                   cfg.n_iterations + 1);
    return result;
}

}  // namespace seedopt
