#include "seedopt/commands.hpp"

#include "seedopt/error.hpp"
#include "seedopt/parallel.hpp"
#include "seedopt/report.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace seedopt {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kContourResolution = 50;

std::vector<double> objective_values(const SeedTrainResult& r, ObjectiveMode mode) {
    std::vector<double> f{r.objectives.d, r.objectives.D};
    if (mode == ObjectiveMode::four) {
        f.push_back(r.objectives.titer_end.value_or(0.0));
        f.push_back(r.objectives.viability_end.value_or(0.0));
    }
    return f;
}

SeedTrainResult run_train(const RunConfig& cfg, const DesignPoint& x, bool bands) {
    SimulationOptions opts;
    opts.four_objectives = cfg.objectives == ObjectiveMode::four;
    opts.compute_bands = bands;
    opts.workers = cfg.workers;
    return simulate_seed_train(x, cfg.seed_train, cfg.model, cfg.integrator, opts);
}

std::vector<std::string> sense_names(const std::vector<Sense>& sense) {
    std::vector<std::string> out;
    for (Sense s : sense) out.push_back(s == Sense::minimize ? "minimize" : "maximize");
    return out;
}

void write_json(const fs::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

CsvTable protocol_table(const SeedTrainResult& r, const SeedTrainConfig& st) {
    CsvTable t({"transition", "from_scale", "to_scale", "time", "hour_in_scale", "transfer_vcd",
                "seeding_vcd", "suspension_used", "medium_added", "suspension_discarded"},
               {"-", "-", "-", "h", "h", "cells/L", "cells/L", "L", "L", "L"});
    for (std::size_t k = 0; k < r.protocol.size(); ++k) {
        const auto& e = r.protocol[k];
        const auto from = static_cast<std::size_t>(e.scale_index);
        const double hour = k < r.passaging_hours.size() ? r.passaging_hours[k] : std::nan("");
        t.add_row({std::to_string(k + 1), st.scales.at(from).name, st.scales.at(from + 1).name,
                   format_number(e.time), format_number(hour), format_number(e.transfer_vcd),
                   format_number(e.seeding_vcd_next), format_number(e.suspension_volume_used),
                   format_number(e.medium_volume_added), format_number(e.suspension_discarded)});
    }
    return t;
}

void write_simulation(const fs::path& out, const RunConfig& cfg, const DesignPoint& x, const SeedTrainResult& r) {
    write_csv(out / "protocol.csv", protocol_table(r, cfg.seed_train));
    for (std::size_t k = 0; k < kStateSize; ++k) {
        const Band& b = r.bands[k];
        CsvTable t({"t", "mean", "q05", "q95"}, {"h", kStateUnits[k], kStateUnits[k], kStateUnits[k]});
        for (std::size_t i = 0; i < b.t.size(); ++i) t.add_row(std::vector<double>{b.t[i], b.mean[i], b.q05[i], b.q95[i]});
        write_csv(out / (std::string("bands_") + kStateNames[k] + ".csv"), t);
    }

    json j;
    j["schema_version"] = kSchemaVersion;
    j["volumes"] = x;
    j["n_mc"] = cfg.seed_train.n_mc;
    const auto names = objective_names(cfg.objectives);
    const auto units = objective_units(cfg.objectives);
    const auto values = objective_values(r, cfg.objectives);
    json obj;
    for (std::size_t i = 0; i < names.size(); ++i) obj[names[i]] = {{"value", values[i]}, {"unit", units[i]}};
    j["objectives"] = obj;
    j["feasible"] = r.feasible;
    j["unreachable_scale"] = r.unreachable_scale ? json(*r.unreachable_scale) : json(nullptr);
    j["passaging_hours"] = r.passaging_hours;
    j["violation_events"] = r.violation_events;
    j["checked_events"] = r.checked_events;
    write_json(out / "objectives.json", j);
}

std::vector<std::string> history_columns(const RunConfig& cfg, std::vector<std::string>& units) {
    std::vector<std::string> cols{"evaluation", "iteration", "provenance"};
    units = {"-", "-", "-"};
    for (const auto& n : cfg.design_space.names) {
        cols.push_back(n);
        units.push_back("L");
    }
    for (const auto& n : objective_names(cfg.objectives)) cols.push_back(n);
    for (const auto& u : objective_units(cfg.objectives)) units.push_back(u);
    return cols;
}

std::vector<std::string> evaluation_cells(std::size_t index, const Evaluation& e) {
    std::vector<std::string> cells{std::to_string(index), std::to_string(e.iteration),
                                   e.provenance == Provenance::lhs ? "lhs" : "proposed"};
    for (double v : e.x) cells.push_back(format_number(v));
    for (double v : e.objectives) cells.push_back(format_number(v));
    return cells;
}

void write_history(const fs::path& path, const RunConfig& cfg, const std::vector<Evaluation>& history,
                   const std::vector<std::size_t>& pareto) {
    std::vector<std::string> units;
    auto cols = history_columns(cfg, units);
    cols.push_back("is_pareto");
    units.push_back("-");
    CsvTable t(cols, units);
    for (std::size_t i = 0; i < history.size(); ++i) {
        auto cells = evaluation_cells(i, history[i]);
        cells.push_back(std::find(pareto.begin(), pareto.end(), i) != pareto.end() ? "1" : "0");
        t.add_row(std::move(cells));
    }
    write_csv(path, t);
}

void write_pareto(const fs::path& path, const RunConfig& cfg, const OptimizationResult& r) {
    std::vector<std::string> units;
    auto cols = history_columns(cfg, units);
    cols.insert(cols.begin(), "solution");
    units.insert(units.begin(), "-");
    CsvTable t(cols, units);
    for (std::size_t k = 0; k < r.pareto_indices.size(); ++k) {
        auto cells = evaluation_cells(r.pareto_indices[k], r.history[r.pareto_indices[k]]);
        cells.insert(cells.begin(), std::to_string(k + 1));
        t.add_row(std::move(cells));
    }
    write_csv(path, t);
}

void write_contours(const fs::path& dir, const RunConfig& cfg, const OptimizationResult& r) {
    const auto& space = cfg.design_space;
    const auto slugs = objective_slugs(cfg.objectives);
    const auto units = objective_units(cfg.objectives);
    const auto& sense = cfg.optimizer.sense;

    // Variables outside the plotted pair sit at the Pareto solution with the shortest duration.
    std::size_t anchor = r.pareto_indices.front();
    for (std::size_t i : r.pareto_indices) {
        if (r.history[i].objectives[0] < r.history[anchor].objectives[0]) anchor = i;
    }
    const Point base = r.history[anchor].x;

    for (std::size_t m = 0; m < r.models.size(); ++m) {
        const double sign = sense[m] == Sense::maximize ? -1.0 : 1.0;
        for (std::size_t a = 0; a < space.dims(); ++a) {
            for (std::size_t b = a + 1; b < space.dims(); ++b) {
                CsvTable t({space.names[a], space.names[b], "mean"}, {"L", "L", units[m]});
                for (int i = 0; i < kContourResolution; ++i) {
                    for (int j = 0; j < kContourResolution; ++j) {
                        Point x = base;
                        const double ua = static_cast<double>(i) / (kContourResolution - 1);
                        const double ub = static_cast<double>(j) / (kContourResolution - 1);
                        x[a] = space.bounds[a].first + ua * (space.bounds[a].second - space.bounds[a].first);
                        x[b] = space.bounds[b].first + ub * (space.bounds[b].second - space.bounds[b].first);
                        t.add_row(std::vector<double>{x[a], x[b], sign * r.models[m].predict(x).mean});
                    }
                }
                write_csv(dir / ("contour_" + slugs[m] + "_" + space.names[a] + "_" + space.names[b] + ".csv"), t);
            }
        }
    }
}

json summary_json(const RunConfig& cfg, const OptimizationResult& r) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["seed"] = cfg.seed;
    j["objectives"] = objective_names(cfg.objectives);
    j["senses"] = sense_names(cfg.optimizer.sense);
    j["n_lhs"] = cfg.optimizer.n_lhs;
    j["n_iterations"] = cfg.optimizer.n_iterations;
    j["evaluations"] = r.history.size();
    j["pareto_count"] = r.pareto_indices.size();
    j["reference_point"] = r.archive.reference_point;
    j["hypervolume"] = r.hypervolume_trace.empty() ? 0.0 : r.hypervolume_trace.back();
    const auto names = objective_names(cfg.objectives);
    json best;
    for (std::size_t m = 0; m < names.size(); ++m) {
        double v = cfg.optimizer.sense[m] == Sense::minimize ? std::numeric_limits<double>::infinity()
                                                               : -std::numeric_limits<double>::infinity();
        for (std::size_t i : r.pareto_indices) {
            const double f = r.history[i].objectives[m];
            v = cfg.optimizer.sense[m] == Sense::minimize ? std::min(v, f) : std::max(v, f);
        }
        best[names[m]] = v;
    }
    j["pareto_best"] = best;
    return j;
}

void write_optimization(const fs::path& out, const RunConfig& cfg, const OptimizationResult& r) {
    write_history(out / "history.csv", cfg, r.history, r.pareto_indices);
    write_pareto(out / "pareto.csv", cfg, r);

    for (std::size_t k = 0; k < r.pareto_indices.size(); ++k) {
        const auto& x = r.history[r.pareto_indices[k]].x;
        write_csv(out / "protocols" / ("solution_" + std::to_string(k + 1) + ".csv"),
                  protocol_table(run_train(cfg, x, false), cfg.seed_train));
    }

    json models = json::array();
    const auto names = objective_names(cfg.objectives);
    const auto senses = sense_names(cfg.optimizer.sense);
    for (std::size_t m = 0; m < r.models.size(); ++m) {
        models.push_back({{"objective", names[m]},
                          {"sense", senses[m]},
                          {"modelled_as", "minimize"},
                          {"model", json::parse(r.models[m].to_json())}});
    }
    write_json(out / "gp_models.json", {{"schema_version", kSchemaVersion}, {"models", models}});

    if (!r.models.empty() && !r.pareto_indices.empty()) write_contours(out / "contours", cfg, r);

    if (cfg.objectives == ObjectiveMode::four) {
        const auto units = objective_units(cfg.objectives);
        std::vector<std::string> cols{"solution"};
        std::vector<std::string> us{"-"};
        cols.insert(cols.end(), names.begin(), names.end());
        us.insert(us.end(), units.begin(), units.end());
        CsvTable t(cols, us);
        for (std::size_t k = 0; k < r.pareto_indices.size(); ++k) {
            std::vector<std::string> cells{std::to_string(k + 1)};
            for (double v : r.history[r.pareto_indices[k]].objectives) cells.push_back(format_number(v));
            t.add_row(std::move(cells));
        }
        write_csv(out / "spider.csv", t);
    }
    write_json(out / "summary.json", summary_json(cfg, r));
}

// Records every successful evaluation so a failing run can still flush its history.
struct RecordingObjective {
    ObjectiveFunction inner;
    std::vector<Evaluation>* log;
    int n_lhs;
    ProgressFn progress;

    std::vector<double> operator()(const Point& x) const {
        auto f = inner(x);
        const int index = static_cast<int>(log->size());
        const bool initial = index < n_lhs;
        log->push_back({x, f, initial ? Provenance::lhs : Provenance::proposed, initial ? 0 : index - n_lhs + 1});
        if (progress) {
            std::string line = "evaluation " + std::to_string(index + 1) + ":";
            for (double v : f) line += " " + format_number(v);
            progress(line);
        }
        return f;
    }
};

}  // namespace

std::vector<std::string> objective_slugs(ObjectiveMode mode) {
    if (mode == ObjectiveMode::two) return {"duration", "deviation"};
    return {"duration", "deviation", "titer", "viability"};
}

ObjectiveFunction seed_train_objective(const RunConfig& cfg) {
    return [cfg](const Point& x) { return objective_values(run_train(cfg, x, false), cfg.objectives); };
}

RunConfig reference_config(const RunConfig& cfg) {
    RunConfig r = cfg;
    if (r.reference.volumes.size() != r.seed_train.flask_count()) {
        throw ConfigError("reference.volumes", "one volume per flask scale is required (" +
                                                   std::to_string(r.seed_train.flask_count()) + " flasks configured)");
    }
    r.volumes = r.reference.volumes;
    r.seed_train.fixed_passaging_times.assign(r.seed_train.scales.size() - 1, r.reference.interval_h);
    // The reference volumes need not lie inside the optimization bounds.
    std::size_t k = 0;
    for (auto& s : r.seed_train.scales) {
        if (!s.is_flask) continue;
        const double v = r.reference.volumes[k++];
        s.working_volume_range.lower = std::min(s.working_volume_range.lower, v);
        s.working_volume_range.upper = std::max(s.working_volume_range.upper, v);
    }
    return r;
}

RunConfig scale_growth_rate(const RunConfig& cfg, double factor) {
    RunConfig r = cfg;
    r.model.mu_max *= factor;
    for (auto& s : r.seed_train.scales) {
        if (s.mu_max_override) *s.mu_max_override *= factor;
    }
    return r;
}

SeedTrainResult cmd_simulate(const RunConfig& cfg, const fs::path& out) {
    if (!cfg.volumes) throw ConfigError("volumes", "required field is missing");
    const SeedTrainResult r = run_train(cfg, *cfg.volumes, true);
    write_simulation(out, cfg, *cfg.volumes, r);
    return r;
}

SeedTrainResult cmd_reference(const RunConfig& cfg, const fs::path& out) {
    return cmd_simulate(reference_config(cfg), out);
}

OptimizationResult cmd_optimize(const RunConfig& cfg, const fs::path& out, const ProgressFn& progress) {
    std::vector<Evaluation> log;
    RecordingObjective objective{seed_train_objective(cfg), &log, cfg.optimizer.n_lhs, progress};
    OptimizationResult r;
    try {
        r = optimize(std::cref(objective), cfg.design_space, cfg.optimizer);
    } catch (const ObjectiveEvaluationError&) {
        if (!log.empty()) {
            std::vector<Point> values;
            for (const auto& e : log) values.push_back(e.objectives);
            write_history(out / "history.csv", cfg, log, pareto_filter(values, cfg.optimizer.sense));
        }
        throw;
    }
    write_optimization(out, cfg, r);
    return r;
}

std::vector<ScenarioSummary> cmd_sweep_mu(const RunConfig& cfg, const fs::path& out, const ProgressFn& progress) {
    const std::size_t n = cfg.mu_factors.size();
    std::vector<ScenarioSummary> scenarios(n);
    const bool outer_parallel = cfg.workers > 1 && n > 1;
    parallel_for(n, outer_parallel ? cfg.workers : 1, [&](std::size_t i) {
        const double f = cfg.mu_factors[i];
        RunConfig c = scale_growth_rate(cfg, f);
        if (outer_parallel) {
            c.workers = 1;
            c.optimizer.workers = 1;
        }
        ProgressFn scoped;
        if (progress && !outer_parallel) {
            scoped = [&, f](const std::string& line) { progress("mu x" + format_number(f) + " " + line); };
        }
        scenarios[i].factor = f;
        scenarios[i].result = cmd_optimize(c, out / ("mu_" + format_number(f)), scoped);
    });

    CsvTable t({"mu_factor", "mu_max", "pareto_count", "min_d", "min_D", "hypervolume"},
               {"-", "1/h", "-", "h", "%", "-"});
    for (const auto& s : scenarios) {
        double min_d = std::numeric_limits<double>::infinity();
        double min_D = std::numeric_limits<double>::infinity();
        for (std::size_t i : s.result.pareto_indices) {
            min_d = std::min(min_d, s.result.history[i].objectives[0]);
            min_D = std::min(min_D, s.result.history[i].objectives[1]);
        }
        t.add_row(std::vector<double>{s.factor, cfg.model.mu_max * s.factor,
                                      static_cast<double>(s.result.pareto_indices.size()), min_d, min_D,
                                      s.result.hypervolume_trace.back()});
    }
    write_csv(out / "comparison.csv", t);
    return scenarios;
}

std::vector<BudgetSummary> iteration_study(const ObjectiveFunction& objective, const DesignSpace& space,
                                           const OptimizerConfig& optimizer, const std::vector<int>& budgets) {
    if (budgets.empty()) throw std::invalid_argument("iteration_study: no budgets");
    OptimizerConfig full = optimizer;
    full.n_iterations = *std::max_element(budgets.begin(), budgets.end());
    const OptimizationResult run = optimize(objective, space, full);

    std::vector<BudgetSummary> out;
    for (int b : budgets) {
        const auto end = run.history.begin() + optimizer.n_lhs + b;
        BudgetSummary s;
        s.budget = b;
        s.result = summarize({run.history.begin(), end}, optimizer.sense);
        out.push_back(std::move(s));
    }
    const Point& ref = run.archive.reference_point;
    for (auto& s : out) {
        std::vector<Point> front;
        for (const auto& e : s.result.archive.entries) front.push_back(to_minimization(e.objectives, optimizer.sense));
        s.hypervolume = hypervolume(front, ref);
    }
    return out;
}

std::vector<BudgetSummary> cmd_iteration_study(const RunConfig& cfg, const fs::path& out, const ProgressFn& progress) {
    std::vector<Evaluation> log;
    RecordingObjective objective{seed_train_objective(cfg), &log, cfg.optimizer.n_lhs, progress};
    const auto budgets = iteration_study(std::cref(objective), cfg.design_space, cfg.optimizer, cfg.budgets);

    CsvTable t({"budget", "evaluations", "pareto_count", "hypervolume"}, {"-", "-", "-", "-"});
    for (const auto& b : budgets) {
        const fs::path dir = out / ("budget_" + std::to_string(b.budget));
        write_history(dir / "history.csv", cfg, b.result.history, b.result.pareto_indices);
        write_pareto(dir / "pareto.csv", cfg, b.result);
        t.add_row(std::vector<double>{static_cast<double>(b.budget), static_cast<double>(b.result.history.size()),
                                      static_cast<double>(b.result.pareto_indices.size()), b.hypervolume});
    }
    write_csv(out / "hypervolume.csv", t);
    return budgets;
}

std::string cmd_validate_config(const RunConfig& cfg) { return serialize_run_config(cfg); }

}  // namespace seedopt
