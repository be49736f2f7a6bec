#include "seedopt/seedtrain.hpp"

#include "seedopt/error.hpp"
#include "seedopt/parallel.hpp"
#include "seedopt/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace seedopt {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

// Multiplicative lognormal factor with mean 1 and the given relative SD.
double lognormal_factor(double rel_sd, double z) {
    if (rel_sd <= 0.0) return 1.0;
    const double sigma = std::sqrt(std::log1p(rel_sd * rel_sd));
    return std::exp(sigma * z - 0.5 * sigma * sigma);
}

struct SampleDraw {
    double mu_factor = 1.0;
    double xv0_factor = 1.0;
};

// One draw per sample from its own stream, so sample i is identical for any n_mc.
SampleDraw draw_sample(const UncertaintySpec& u, std::size_t i) {
    Rng rng(derive_seed(u.rng_seed, i));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double z_mu = normal(rng);
    const double z_x0 = normal(rng);
    return {lognormal_factor(u.mu_max_rel_sd, z_mu), lognormal_factor(u.initial_vcd_rel_sd, z_x0)};
}

using Grid = std::vector<double>;

struct ScaleRun {
    std::vector<Trajectory<kStateSize>> samples;
};

ScaleRun integrate_ensemble(const std::vector<CultureState>& starts,
                            const std::vector<ModelParameters>& params, double horizon,
                            const IntegratorConfig& icfg, unsigned workers) {
    const Grid grid = hourly_grid(0.0, horizon);
    ScaleRun run;
    run.samples.resize(starts.size());
    parallel_for(starts.size(), workers, [&](std::size_t i) {
        const ModelParameters& p = params[i];
        run.samples[i] = integrate<kStateSize>(
            [&p](double t, const StateArray& y) { return batch_rhs(t, y, p); }, 0.0,
            starts[i].to_array(), horizon, icfg, grid,
            [](StateArray& y, const StateArray& prev) { project_nonnegative(y, prev); });
    });
    return run;
}

void append_bands(std::array<Band, kStateSize>& bands, const ScaleRun& run, double offset,
                  int hour_begin, int hour_end_inclusive) {
    const std::size_t n = run.samples.size();
    std::vector<double> column(n);
    for (int h = hour_begin; h <= hour_end_inclusive; ++h) {
        for (std::size_t v = 0; v < kStateSize; ++v) {
            for (std::size_t i = 0; i < n; ++i) {
                column[i] = run.samples[i].y[static_cast<std::size_t>(h)][v];
            }
            std::sort(column.begin(), column.end());
            // Offset from the minimum keeps the mean exact for a degenerate ensemble.
            double excess = 0.0;
            for (double c : column) excess += c - column.front();
            Band& b = bands[v];
            b.t.push_back(offset + h);
            b.mean.push_back(column.front() + excess / static_cast<double>(n));
            b.q05.push_back(quantile(column, 0.05));
            b.q95.push_back(quantile(column, 0.95));
        }
    }
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

void ScaleConfig::validate() const {
    require(filling_volume_target > 0.0, "scale '" + name + "': filling volume must be > 0");
    require(working_volume_range.lower <= filling_volume_target &&
                filling_volume_target <= working_volume_range.upper,
            "scale '" + name + "': working volume range must contain the filling volume");
    require(passaging_window.lower >= 0.0 && passaging_window.lower < passaging_window.upper,
            "scale '" + name + "': passaging window must satisfy 0 <= lower < upper");
    require(medium_c_Glc >= 0.0 && medium_c_Gln >= 0.0,
            "scale '" + name + "': medium concentrations must be >= 0");
    if (mu_max_override) {
        require(*mu_max_override >= 0.0, "scale '" + name + "': mu_max_override must be >= 0");
    }
}

std::size_t SeedTrainConfig::flask_count() const {
    return static_cast<std::size_t>(
        std::count_if(scales.begin(), scales.end(), [](const ScaleConfig& s) { return s.is_flask; }));
}

double SeedTrainConfig::max_window_upper() const {
    double m = 0.0;
    for (const auto& s : scales) m = std::max(m, s.passaging_window.upper);
    return m;
}

void SeedTrainConfig::validate() const {
    require(scales.size() >= 2, "seed train needs at least two scales");
    for (const auto& s : scales) s.validate();
    require(seeding_vcd_range.lower < seeding_vcd_range.upper, "seeding_vcd_range must be ordered");
    require(transfer_vcd_range.lower < transfer_vcd_range.upper, "transfer_vcd_range must be ordered");
    require(seeding_vcd_range.contains(target_seeding_vcd),
            "target_seeding_vcd must lie within seeding_vcd_range");
    require(alpha >= 0.0, "alpha must be >= 0");
    require(n_mc >= 2, "n_mc must be >= 2");
    require(production_duration >= 0.0, "production_duration must be >= 0");
    require(uncertainty.mu_max_rel_sd >= 0.0 && uncertainty.initial_vcd_rel_sd >= 0.0,
            "uncertainty SDs must be >= 0");
    require(fixed_passaging_times.empty() || fixed_passaging_times.size() == scales.size() - 1,
            "fixed_passaging_times needs one entry per transition");
    for (double t : fixed_passaging_times) {
        require(t > 0.0 && std::floor(t) == t, "fixed passaging times must be positive whole hours");
    }
    initial_state.validate();
}

double required_transfer_vcd(const ScaleConfig& current, const ScaleConfig& next,
                             double target_seeding, double transfer_floor) {
    require(current.filling_volume_target > 0.0 && next.filling_volume_target > 0.0,
            "volumes must be > 0");
    const double needed = target_seeding * next.filling_volume_target / current.filling_volume_target;
    return std::max(needed, transfer_floor);
}

double utility_at(const std::vector<std::vector<double>>& xv, std::size_t hour, double alpha) {
    const std::size_t n = xv.size();
    double sum = 0.0;
    for (const auto& s : xv) sum += s.at(hour);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& s : xv) ss += (s[hour] - mean) * (s[hour] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return mean - alpha * sd;
}

int find_passaging_time(const std::vector<std::vector<double>>& xv, double alpha, double threshold,
                        Range window) {
    require(xv.size() >= 2, "find_passaging_time: ensemble needs >= 2 samples");
    const int first = static_cast<int>(std::ceil(window.lower));
    const int last = static_cast<int>(std::floor(window.upper));
    for (const auto& s : xv) {
        require(static_cast<int>(s.size()) > last, "find_passaging_time: grid does not cover window");
    }
    for (int h = first; h <= last; ++h) {
        if (utility_at(xv, static_cast<std::size_t>(h), alpha) >= threshold) return h;
    }
    throw ThresholdUnreachable("utility stays below " + std::to_string(threshold) +
                               " cells/L throughout the passaging window");
}

PassagingOutcome execute_passaging(const CultureState& source, const ScaleConfig& next,
                                   double target_seeding) {
    require(source.Xv > 0.0, "execute_passaging: source Xv must be > 0");
    const double v_next = next.filling_volume_target;
    PassagingOutcome out;
    out.suspension_used = std::min(source.V, target_seeding * v_next / source.Xv);
    out.medium_added = v_next - out.suspension_used;
    out.discarded = source.V - out.suspension_used;

    const double w = out.suspension_used / v_next;  // suspension fraction
    CultureState& s = out.state;
    s.t = 0.0;
    s.Xv = source.Xv * w;
    s.Xt = source.Xt * w;
    s.c_Glc = source.c_Glc * w + next.medium_c_Glc * (1.0 - w);
    s.c_Gln = source.c_Gln * w + next.medium_c_Gln * (1.0 - w);
    s.c_Lac = source.c_Lac * w;
    s.c_Amm = source.c_Amm * w;
    s.c_titer = source.c_titer * w;
    s.V = v_next;
    out.seeding_vcd = s.Xv;
    return out;
}

double quantile(std::vector<double> values, double q) {
    require(!values.empty(), "quantile of empty sample");
    if (!std::is_sorted(values.begin(), values.end())) std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

IntegratorConfig default_culture_integrator() {
    IntegratorConfig c;
    c.method = IntegratorMethod::rk45_adaptive;
    c.rel_tol = 1e-8;
    c.h_init = 0.01;
    c.h_max = 1.0;
    // cells/L, cells/L, then concentrations and volume
    c.abs_tol = {1e-2, 1e-2, 1e-10, 1e-10, 1e-10, 1e-10, 1e-10, 1e-12};
    return c;
}

SeedTrainResult simulate_seed_train(const DesignPoint& x, const SeedTrainConfig& cfg_in,
                                    const ModelParameters& p, const IntegratorConfig& icfg,
                                    const SimulationOptions& opts) {
    SeedTrainConfig cfg = cfg_in;
    {
        std::size_t k = 0;
        for (auto& s : cfg.scales) {
            if (!s.is_flask) continue;
            require(k < x.size(), "design point has fewer volumes than flask scales");
            s.filling_volume_target = x[k++];
        }
        require(k == x.size(), "design point has more volumes than flask scales");
    }
    cfg.validate();
    p.validate();

    const auto n = static_cast<std::size_t>(cfg.n_mc);
    const std::size_t n_scales = cfg.scales.size();
    const bool fixed = !cfg.fixed_passaging_times.empty();

    std::vector<SampleDraw> draws(n);
    for (std::size_t i = 0; i < n; ++i) draws[i] = draw_sample(cfg.uncertainty, i);

    SeedTrainResult result;
    result.mc_violation_flags.assign(n, false);
    std::vector<int> sample_events(n, 0);

    auto check = [&](std::size_t i, bool ok) {
        ++result.checked_events;
        if (!ok) {
            ++result.violation_events;
            ++sample_events[i];
            result.mc_violation_flags[i] = true;
        }
    };

    std::vector<CultureState> states(n);
    for (std::size_t i = 0; i < n; ++i) {
        CultureState s = cfg.initial_state;
        s.t = 0.0;
        s.Xv *= draws[i].xv0_factor;
        s.Xt = std::max(s.Xt * draws[i].xv0_factor, s.Xv);
        s.V = cfg.scales.front().filling_volume_target;
        states[i] = s;
        if (cfg.count_initial_seeding) check(i, cfg.seeding_vcd_range.contains(s.Xv));
    }

    auto params_for = [&](std::size_t scale) {
        const ScaleConfig& sc = cfg.scales[scale];
        std::vector<ModelParameters> ps(n, p);
        const double base_mu = sc.mu_max_override.value_or(p.mu_max);
        const bool lag = scale == 0 || cfg.lag_every_scale;
        for (std::size_t i = 0; i < n; ++i) {
            ps[i].mu_max = base_mu * draws[i].mu_factor;
            if (!lag) ps[i].a_Lag = 0.0;
        }
        return ps;
    };

    double clock = 0.0;
    for (std::size_t k = 0; k + 1 < n_scales; ++k) {
        const ScaleConfig& cur = cfg.scales[k];
        const ScaleConfig& nxt = cfg.scales[k + 1];
        const double horizon =
            fixed ? std::max(cur.passaging_window.upper, cfg.fixed_passaging_times[k])
                  : std::floor(cur.passaging_window.upper);
        const ScaleRun run = integrate_ensemble(states, params_for(k), horizon, icfg, opts.workers);

        int hour = 0;
        if (fixed) {
            hour = static_cast<int>(cfg.fixed_passaging_times[k]);
        } else {
            std::vector<std::vector<double>> xv(n);
            for (std::size_t i = 0; i < n; ++i) {
                xv[i].reserve(run.samples[i].y.size());
                for (const auto& y : run.samples[i].y) xv[i].push_back(y[kXv]);
            }
            const double threshold = required_transfer_vcd(cur, nxt, cfg.target_seeding_vcd,
                                                           cfg.transfer_vcd_range.lower);
            try {
                hour = find_passaging_time(xv, cfg.alpha, threshold, cur.passaging_window);
            } catch (const ThresholdUnreachable&) {
                if (opts.compute_bands) {
                    append_bands(result.bands, run, clock, 0, static_cast<int>(horizon));
                }
                result.feasible = false;
                result.unreachable_scale = static_cast<int>(k);
                result.objectives.d = cfg.max_window_upper() * static_cast<double>(n_scales) * 2.0;
                result.objectives.D = 100.0;
                if (opts.four_objectives) {
                    result.objectives.titer_end = 0.0;
                    result.objectives.viability_end = 0.0;
                }
                std::fill(result.mc_violation_flags.begin(), result.mc_violation_flags.end(), true);
                return result;
            }
        }

        if (opts.compute_bands) append_bands(result.bands, run, clock, 0, hour - 1);

        std::vector<double> transfer(n), seeding(n), used(n), medium(n), discarded(n);
        for (std::size_t i = 0; i < n; ++i) {
            const CultureState src = CultureState::from_array(
                static_cast<double>(hour), run.samples[i].y[static_cast<std::size_t>(hour)]);
            const PassagingOutcome o = execute_passaging(src, nxt, cfg.target_seeding_vcd);
            transfer[i] = src.Xv;
            seeding[i] = o.seeding_vcd;
            used[i] = o.suspension_used;
            medium[i] = o.medium_added;
            discarded[i] = o.discarded;
            check(i, cfg.transfer_vcd_range.contains(src.Xv));
            check(i, cfg.seeding_vcd_range.contains(o.seeding_vcd));
            states[i] = o.state;
        }

        clock += hour;
        result.passaging_hours.push_back(hour);
        result.protocol.push_back(PassagingEvent{static_cast<int>(k), clock, mean_of(transfer),
                                                 mean_of(seeding), mean_of(used), mean_of(medium),
                                                 mean_of(discarded)});
    }

    result.objectives.d = clock;
    if (cfg.deviation_counting == DeviationCounting::per_trajectory) {
        const auto bad = std::count(result.mc_violation_flags.begin(), result.mc_violation_flags.end(), true);
        result.objectives.D = 100.0 * static_cast<double>(bad) / static_cast<double>(n);
    } else {
        result.objectives.D = result.checked_events == 0
                                  ? 0.0
                                  : 100.0 * result.violation_events / result.checked_events;
    }

    if (opts.four_objectives) {
        const double duration = cfg.production_duration;
        const ScaleRun run = integrate_ensemble(states, params_for(n_scales - 1), duration, icfg, opts.workers);
        double titer = 0.0, viability = 0.0;
        for (const auto& tr : run.samples) {
            const StateArray& end = tr.y.back();
            titer += end[kTiter];
            viability += end[kXt] > 0.0 ? 100.0 * end[kXv] / end[kXt] : 0.0;
        }
        result.objectives.titer_end = titer / static_cast<double>(n);
        result.objectives.viability_end = viability / static_cast<double>(n);
        if (opts.compute_bands) {
            append_bands(result.bands, run, clock, 0, static_cast<int>(std::floor(duration)));
        }
    } else if (opts.compute_bands) {
        ScaleRun seeded;
        seeded.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            seeded.samples[i].t = {0.0};
            seeded.samples[i].y = {states[i].to_array()};
        }
        append_bands(result.bands, seeded, clock, 0, 0);
    }
    return result;
}

}  // namespace seedopt
