#include "seedopt/commands.hpp"
#include "seedopt/config.hpp"
#include "seedopt/error.hpp"
#include "seedopt/gp.hpp"
#include "seedopt/kinetics.hpp"
#include "seedopt/mobo.hpp"
#include "seedopt/seedtrain.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace seedopt;

namespace {

std::vector<Sense> parse_senses(const std::vector<std::string>& names) {
    std::vector<Sense> out;
    for (const auto& n : names) {
        if (n == "minimize") out.push_back(Sense::minimize);
        else if (n == "maximize") out.push_back(Sense::maximize);
        else throw py::value_error("sense must be 'minimize' or 'maximize', got '" + n + "'");
    }
    return out;
}

py::dict simulation_dict(const SeedTrainResult& r) {
    py::dict d;
    d["d"] = r.objectives.d;
    d["D"] = r.objectives.D;
    d["titer"] = r.objectives.titer_end ? py::cast(*r.objectives.titer_end) : py::none();
    d["viability"] = r.objectives.viability_end ? py::cast(*r.objectives.viability_end) : py::none();
    d["feasible"] = r.feasible;
    d["passaging_hours"] = r.passaging_hours;
    py::dict bands;
    for (std::size_t k = 0; k < kStateSize; ++k) {
        const Band& b = r.bands[k];
        py::dict one;
        one["t"] = b.t;
        one["mean"] = b.mean;
        one["q05"] = b.q05;
        one["q95"] = b.q95;
        bands[kStateNames[k]] = one;
    }
    d["bands"] = bands;
    return d;
}

py::dict optimization_dict(const OptimizationResult& r) {
    py::list history;
    for (const auto& e : r.history) {
        py::dict h;
        h["x"] = e.x;
        h["objectives"] = e.objectives;
        h["provenance"] = e.provenance == Provenance::lhs ? "lhs" : "proposed";
        h["iteration"] = e.iteration;
        history.append(h);
    }
    py::dict d;
    d["history"] = history;
    d["pareto_indices"] = r.pareto_indices;
    d["hypervolume_trace"] = r.hypervolume_trace;
    d["reference_point"] = r.archive.reference_point;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Seed-train simulation and multi-objective Bayesian optimization";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ThresholdUnreachable>(m, "ThresholdUnreachable", PyExc_RuntimeError);
    py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);

    py::class_<ModelParameters>(m, "ModelParameters")
        .def(py::init<>())
        .def_readwrite("mu_max", &ModelParameters::mu_max)
        .def_readwrite("mu_d_min", &ModelParameters::mu_d_min)
        .def_readwrite("mu_d_max", &ModelParameters::mu_d_max)
        .def_readwrite("K_S_Glc", &ModelParameters::K_S_Glc)
        .def_readwrite("K_S_Gln", &ModelParameters::K_S_Gln)
        .def_readwrite("q_Glc_max", &ModelParameters::q_Glc_max)
        .def_readwrite("q_Gln_max", &ModelParameters::q_Gln_max)
        .def_readwrite("q_titer_max", &ModelParameters::q_titer_max)
        .def_readwrite("K_Lys", &ModelParameters::K_Lys)
        .def_readwrite("t_Lag", &ModelParameters::t_Lag)
        .def_readwrite("a_Lag", &ModelParameters::a_Lag)
        .def("validate", &ModelParameters::validate);

    m.def("state_names", [] { return std::vector<std::string>(kStateNames.begin(), kStateNames.end()); });
    m.def("culture_rhs", [](const std::array<double, kStateSize>& y, const ModelParameters& p, double t) {
        return batch_rhs(t, y, p);
    }, py::arg("state"), py::arg("params"), py::arg("t") = 0.0,
       "Batch-mode time derivatives of [Xv, Xt, c_Glc, c_Gln, c_Lac, c_Amm, c_titer, V].");

    py::class_<RunConfig>(m, "RunConfig")
        .def_static("default", [](int flasks, const std::string& objectives) {
            return default_run_config(flasks, objectives == "four" ? ObjectiveMode::four : ObjectiveMode::two);
        }, py::arg("flasks") = 5, py::arg("objectives") = "two")
        .def_static("from_json", &parse_run_config, py::arg("text"))
        .def_static("load", &load_run_config, py::arg("path"))
        .def("to_json", &serialize_run_config)
        .def_property("seed", [](const RunConfig& c) { return c.seed; },
                      [](RunConfig& c, std::uint64_t s) { c.seed = s; c.finalize(); })
        .def_property("n_mc", [](const RunConfig& c) { return c.seed_train.n_mc; },
                      [](RunConfig& c, int n) { c.seed_train.n_mc = n; c.finalize(); })
        .def_property("volumes", [](const RunConfig& c) { return c.volumes; },
                      [](RunConfig& c, std::optional<DesignPoint> v) { c.volumes = std::move(v); c.finalize(); })
        .def_property("n_lhs", [](const RunConfig& c) { return c.optimizer.n_lhs; },
                      [](RunConfig& c, int n) { c.optimizer.n_lhs = n; c.finalize(); })
        .def_property("n_iterations", [](const RunConfig& c) { return c.optimizer.n_iterations; },
                      [](RunConfig& c, int n) { c.optimizer.n_iterations = n; c.finalize(); })
        .def_property_readonly("flasks", [](const RunConfig& c) { return c.flasks; })
        .def("set_flask_count", [](RunConfig& c, int flasks) { set_flask_count(c, flasks); c.finalize(); });

    m.def("simulate", [](const RunConfig& cfg, const DesignPoint& volumes, bool bands) {
        SeedTrainResult r;
        {
            py::gil_scoped_release release;
            SimulationOptions opts;
            opts.four_objectives = cfg.objectives == ObjectiveMode::four;
            opts.compute_bands = bands;
            opts.workers = cfg.workers;
            r = simulate_seed_train(volumes, cfg.seed_train, cfg.model, cfg.integrator, opts);
        }
        return simulation_dict(r);
    }, py::arg("config"), py::arg("volumes"), py::arg("bands") = true);

    m.def("run_simulate", [](const RunConfig& cfg, const std::filesystem::path& out) {
        SeedTrainResult r;
        {
            py::gil_scoped_release release;
            r = cmd_simulate(cfg, out);
        }
        return simulation_dict(r);
    }, py::arg("config"), py::arg("out"));
    m.def("run_reference", [](const RunConfig& cfg, const std::filesystem::path& out) {
        SeedTrainResult r;
        {
            py::gil_scoped_release release;
            r = cmd_reference(cfg, out);
        }
        return simulation_dict(r);
    }, py::arg("config"), py::arg("out"));
    m.def("run_optimize", [](const RunConfig& cfg, const std::filesystem::path& out) {
        OptimizationResult r;
        {
            py::gil_scoped_release release;
            r = cmd_optimize(cfg, out);
        }
        return optimization_dict(r);
    }, py::arg("config"), py::arg("out"));

    m.def("optimize", [](const std::function<std::vector<double>(const Point&)>& fn,
                         const std::vector<std::pair<double, double>>& bounds,
                         const std::vector<std::string>& senses, int n_lhs, int n_iterations,
                         std::uint64_t seed, int gp_restarts, int ehvi_mc_samples) {
        DesignSpace space;
        space.bounds = bounds;
        for (std::size_t i = 0; i < bounds.size(); ++i) space.names.push_back("x" + std::to_string(i + 1));
        OptimizerConfig cfg;
        cfg.sense = parse_senses(senses);
        cfg.n_lhs = n_lhs;
        cfg.n_iterations = n_iterations;
        cfg.rng_seed = seed;
        cfg.gp_restarts = gp_restarts;
        cfg.ehvi_mc_samples = ehvi_mc_samples;
        return optimization_dict(seedopt::optimize(fn, space, cfg));
    }, py::arg("objective"), py::arg("bounds"), py::arg("senses"), py::arg("n_lhs") = 10,
       py::arg("n_iterations") = 20, py::arg("seed") = 1, py::arg("gp_restarts") = 10,
       py::arg("ehvi_mc_samples") = 2048,
       "Optimize a Python black box returning one value per objective.");

    m.def("pareto_filter", [](const std::vector<Point>& points, const std::vector<std::string>& senses) {
        return pareto_filter(points, parse_senses(senses));
    }, py::arg("points"), py::arg("senses"));
    m.def("hypervolume", &hypervolume, py::arg("front"), py::arg("ref"),
          "Dominated volume of minimization-form points below ref.");
    m.def("latin_hypercube", [](const std::vector<std::pair<double, double>>& bounds, int n, std::uint64_t seed) {
        DesignSpace space;
        space.bounds = bounds;
        space.names.assign(bounds.size(), "x");
        return latin_hypercube(space, n, seed);
    }, py::arg("bounds"), py::arg("n"), py::arg("seed") = 1);

    py::class_<GpModel>(m, "GpModel")
        .def_static("fit", [](const std::vector<Point>& X, const std::vector<double>& y, int restarts,
                              std::uint64_t seed) {
            GpFitOptions o;
            o.restarts = restarts;
            o.seed = seed;
            return GpModel::fit(X, y, o);
        }, py::arg("X"), py::arg("y"), py::arg("restarts") = 10, py::arg("seed") = 1)
        .def("predict", [](const GpModel& g, const Point& x, bool include_noise) {
            const auto p = g.predict(x, include_noise);
            return py::make_tuple(p.mean, p.variance);
        }, py::arg("x"), py::arg("include_noise") = true)
        .def_property_readonly("lengthscales", [](const GpModel& g) { return g.hyperparams().lengthscales; })
        .def_property_readonly("signal_variance", [](const GpModel& g) { return g.hyperparams().signal_variance; })
        .def_property_readonly("noise_variance", [](const GpModel& g) { return g.hyperparams().noise_variance; })
        .def_property_readonly("log_marginal_likelihood", &GpModel::log_marginal_likelihood)
        .def("to_json", &GpModel::to_json, py::arg("indent") = 2);
}
