#include "seedopt/config.hpp"

#include "seedopt/error.hpp"
#include "seedopt/random.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace seedopt {

using json = nlohmann::ordered_json;

namespace {

const char* kFlaskNames[] = {"SF1", "SF2", "SF3", "SF4", "SF5"};

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

// Wraps one JSON object, tracks which keys were read and rejects the rest.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return j_.at(key);
    }

    template <typename T>
    T required(const std::string& key) {
        if (!has(key)) throw ConfigError(join(path_, key), "required field is missing");
        return convert<T>(raw(key), join(path_, key));
    }

    template <typename T>
    T get(const std::string& key, const T& fallback) {
        return has(key) ? convert<T>(raw(key), join(path_, key)) : fallback;
    }

    Node child(const std::string& key) {
        used_.insert(key);
        return Node(j_.at(key), join(path_, key));
    }

    std::string path(const std::string& key) const { return join(path_, key); }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) throw ConfigError(join(path_, key), "unknown key");
        }
    }

    template <typename T>
    static T convert(const json& v, const std::string& path) {
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw ConfigError(path, "expected a number");
                return v.get<double>();
            } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, unsigned> ||
                                 std::is_same_v<T, std::uint64_t>) {
                if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
                if constexpr (!std::is_same_v<T, int>) {
                    if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
                        throw ConfigError(path, "expected a non-negative integer");
                    }
                }
                return v.get<T>();
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
                return v.get<bool>();
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ConfigError(path, "expected a string");
                return v.get<std::string>();
            } else if constexpr (std::is_same_v<T, Range>) {
                if (!v.is_array() || v.size() != 2) throw ConfigError(path, "expected [lower, upper]");
                return Range{convert<double>(v[0], index_path(path, 0)), convert<double>(v[1], index_path(path, 1))};
            } else if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>) {
                if (!v.is_array()) throw ConfigError(path, "expected an array");
                T out;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    out.push_back(convert<typename T::value_type>(v[i], index_path(path, i)));
                }
                return out;
            } else {
                static_assert(sizeof(T) == 0, "unsupported config type");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(path, e.what());
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

template <typename E>
E parse_enum(const std::string& text, const std::string& path,
             std::initializer_list<std::pair<const char*, E>> options) {
    std::string allowed;
    for (const auto& [name, value] : options) {
        if (text == name) return value;
        allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(path, "expected one of: " + allowed);
}

const char* mode_name(ObjectiveMode m) { return m == ObjectiveMode::two ? "two" : "four"; }
const char* preset_name(BioreactorPreset p) { return p == BioreactorPreset::results ? "results" : "table2"; }
const char* method_name(IntegratorMethod m) {
    return m == IntegratorMethod::rk45_adaptive ? "rk45_adaptive" : "rk4_fixed";
}
const char* counting_name(DeviationCounting c) {
    return c == DeviationCounting::per_trajectory ? "per_trajectory" : "per_event";
}

void parse_model(Node n, ModelParameters& p) {
    p.mu_max = n.get("mu_max", p.mu_max);
    p.mu_d_min = n.get("mu_d_min", p.mu_d_min);
    p.mu_d_max = n.get("mu_d_max", p.mu_d_max);
    p.K_S_Glc = n.get("K_S_Glc", p.K_S_Glc);
    p.K_S_Gln = n.get("K_S_Gln", p.K_S_Gln);
    p.k_Glc = n.get("k_Glc", p.k_Glc);
    p.k_Gln = n.get("k_Gln", p.k_Gln);
    p.q_Glc_max = n.get("q_Glc_max", p.q_Glc_max);
    p.q_Gln_max = n.get("q_Gln_max", p.q_Gln_max);
    p.Y_Lac_Glc = n.get("Y_Lac_Glc", p.Y_Lac_Glc);
    p.Y_Amm_Gln = n.get("Y_Amm_Gln", p.Y_Amm_Gln);
    p.q_Lac_uptake_max = n.get("q_Lac_uptake_max", p.q_Lac_uptake_max);
    p.q_Amm_uptake_max = n.get("q_Amm_uptake_max", p.q_Amm_uptake_max);
    p.k_Amm = n.get("k_Amm", p.k_Amm);
    p.K_Lys = n.get("K_Lys", p.K_Lys);
    p.q_titer_max = n.get("q_titer_max", p.q_titer_max);
    p.t_Lag = n.get("t_Lag", p.t_Lag);
    p.a_Lag = n.get("a_Lag", p.a_Lag);
    p.glc_switch_threshold = n.get("glc_switch_threshold", p.glc_switch_threshold);
    p.uptake_saturation = n.get("uptake_saturation", p.uptake_saturation);
    n.finish();
}

json model_json(const ModelParameters& p) {
    return json{{"mu_max", p.mu_max},
                {"mu_d_min", p.mu_d_min},
                {"mu_d_max", p.mu_d_max},
                {"K_S_Glc", p.K_S_Glc},
                {"K_S_Gln", p.K_S_Gln},
                {"k_Glc", p.k_Glc},
                {"k_Gln", p.k_Gln},
                {"q_Glc_max", p.q_Glc_max},
                {"q_Gln_max", p.q_Gln_max},
                {"Y_Lac_Glc", p.Y_Lac_Glc},
                {"Y_Amm_Gln", p.Y_Amm_Gln},
                {"q_Lac_uptake_max", p.q_Lac_uptake_max},
                {"q_Amm_uptake_max", p.q_Amm_uptake_max},
                {"k_Amm", p.k_Amm},
                {"K_Lys", p.K_Lys},
                {"q_titer_max", p.q_titer_max},
                {"t_Lag", p.t_Lag},
                {"a_Lag", p.a_Lag},
                {"glc_switch_threshold", p.glc_switch_threshold},
                {"uptake_saturation", p.uptake_saturation}};
}

ScaleConfig parse_scale(Node n) {
    ScaleConfig s;
    s.name = n.required<std::string>("name");
    s.is_flask = n.get("is_flask", false);
    s.filling_volume_target = n.get("filling_volume_target", 0.0);
    if (!s.is_flask && !n.has("filling_volume_target")) {
        throw ConfigError(n.path("filling_volume_target"), "required field is missing");
    }
    s.working_volume_range = n.get("working_volume_range",
                                   Range{s.filling_volume_target, s.filling_volume_target});
    s.passaging_window = n.get("passaging_window", s.passaging_window);
    s.medium_c_Glc = n.get("medium_c_Glc", s.medium_c_Glc);
    s.medium_c_Gln = n.get("medium_c_Gln", s.medium_c_Gln);
    if (n.has("mu_max_override") && !n.raw("mu_max_override").is_null()) {
        s.mu_max_override = n.get("mu_max_override", 0.0);
    }
    n.finish();
    return s;
}

json scale_json(const ScaleConfig& s) {
    json j{{"name", s.name},
           {"is_flask", s.is_flask},
           {"filling_volume_target", s.filling_volume_target},
           {"working_volume_range", {s.working_volume_range.lower, s.working_volume_range.upper}},
           {"passaging_window", {s.passaging_window.lower, s.passaging_window.upper}},
           {"medium_c_Glc", s.medium_c_Glc},
           {"medium_c_Gln", s.medium_c_Gln}};
    j["mu_max_override"] = s.mu_max_override ? json(*s.mu_max_override) : json(nullptr);
    return j;
}

CultureState parse_state(Node n, CultureState s) {
    s.Xv = n.get("Xv", s.Xv);
    s.Xt = n.get("Xt", s.Xt);
    s.c_Glc = n.get("c_Glc", s.c_Glc);
    s.c_Gln = n.get("c_Gln", s.c_Gln);
    s.c_Lac = n.get("c_Lac", s.c_Lac);
    s.c_Amm = n.get("c_Amm", s.c_Amm);
    s.c_titer = n.get("c_titer", s.c_titer);
    n.finish();
    return s;
}

json state_json(const CultureState& s) {
    return json{{"Xv", s.Xv},       {"Xt", s.Xt},       {"c_Glc", s.c_Glc}, {"c_Gln", s.c_Gln},
                {"c_Lac", s.c_Lac}, {"c_Amm", s.c_Amm}, {"c_titer", s.c_titer}};
}

json range_json(const Range& r) { return json::array({r.lower, r.upper}); }

// Validation errors from the domain types are re-raised with the section path.
template <typename F>
void validated(const std::string& path, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace

std::vector<std::string> objective_names(ObjectiveMode mode) {
    if (mode == ObjectiveMode::two) return {"d", "D"};
    return {"d", "D", "titer", "viability"};
}

std::vector<std::string> objective_units(ObjectiveMode mode) {
    if (mode == ObjectiveMode::two) return {"h", "%"};
    return {"h", "%", "mg/L", "%"};
}

std::vector<Sense> objective_senses(ObjectiveMode mode) {
    if (mode == ObjectiveMode::two) return {Sense::minimize, Sense::minimize};
    return {Sense::minimize, Sense::minimize, Sense::maximize, Sense::maximize};
}

DesignSpace flask_design_space(int flasks) {
    DesignSpace s;
    switch (flasks) {
        case 5: s.bounds = {{0.014, 0.015}, {0.05, 0.15}, {0.15, 1.5}, {1.5, 4.0}, {4.0, 8.0}}; break;
        case 4: s.bounds = {{0.014, 0.015}, {0.1, 1.0}, {1.5, 4.0}, {4.0, 8.0}}; break;
        case 3: s.bounds = {{0.014, 0.015}, {0.1, 2.0}, {4.0, 8.0}}; break;
        default: throw std::invalid_argument("flask count must be 3, 4 or 5");
    }
    for (int i = 0; i < flasks; ++i) s.names.push_back("V" + std::to_string(i + 1));
    return s;
}

std::vector<ScaleConfig> standard_scales(int flasks, BioreactorPreset preset) {
    const DesignSpace space = flask_design_space(flasks);
    std::vector<ScaleConfig> scales;
    for (int i = 0; i < flasks; ++i) {
        ScaleConfig s;
        s.name = kFlaskNames[i];
        s.is_flask = true;
        s.working_volume_range = {space.bounds[static_cast<std::size_t>(i)].first,
                                  space.bounds[static_cast<std::size_t>(i)].second};
        s.filling_volume_target = s.working_volume_range.lower;
        scales.push_back(s);
    }
    const std::vector<double> volumes = preset == BioreactorPreset::results
                                            ? std::vector<double>{40.0, 320.0, 2100.0, 9600.0}
                                            : std::vector<double>{38.0, 302.0, 2054.0, 9500.0};
    for (std::size_t i = 0; i < volumes.size(); ++i) {
        ScaleConfig s;
        s.name = i + 1 < volumes.size() ? "BR" + std::to_string(i + 1) : "PR";
        s.filling_volume_target = volumes[i];
        s.working_volume_range = {volumes[i], volumes[i]};
        if (i == 0) s.mu_max_override = 0.028;
        scales.push_back(s);
    }
    return scales;
}

void set_flask_count(RunConfig& cfg, int flasks) {
    cfg.flasks = flasks;
    cfg.seed_train.scales = standard_scales(flasks, cfg.bioreactors);
    cfg.design_space = flask_design_space(flasks);
    cfg.seed_train.fixed_passaging_times.clear();
    cfg.volumes.reset();
}

void RunConfig::finalize() {
    seed_train.uncertainty.rng_seed = derive_seed(seed, 1);
    optimizer.rng_seed = derive_seed(seed, 2);
    optimizer.sense = objective_senses(objectives);
    optimizer.workers = workers;
    flasks = static_cast<int>(seed_train.flask_count());

    validated("seed_train", [&] {
        // Flask targets come from the design point; validate with the lower bounds in their place.
        SeedTrainConfig probe = seed_train;
        for (auto& s : probe.scales) {
            if (s.is_flask && s.filling_volume_target == 0.0) s.filling_volume_target = s.working_volume_range.lower;
        }
        probe.validate();
        if (probe.scales.back().is_flask) throw std::invalid_argument("the last scale must be the production vessel");
    });
    validated("model", [&] { model.validate(); });
    validated("integrator", [&] { integrator.validate(); });
    validated("design_space", [&] {
        design_space.validate();
        if (design_space.dims() != seed_train.flask_count()) {
            throw std::invalid_argument("one bound pair per flask scale is required");
        }
    });
    validated("optimizer", [&] { optimizer.validate(); });
    if (volumes) {
        validated("volumes", [&] {
            if (volumes->size() != seed_train.flask_count()) throw std::invalid_argument("one volume per flask scale");
            for (double v : *volumes) {
                if (!(v > 0.0)) throw std::invalid_argument("volumes must be > 0");
            }
        });
    }
    validated("reference", [&] {
        if (!(reference.interval_h > 0.0) || reference.interval_h != std::floor(reference.interval_h)) {
            throw std::invalid_argument("interval_h must be a positive whole number of hours");
        }
        for (double v : reference.volumes) {
            if (!(v > 0.0)) throw std::invalid_argument("volumes must be > 0");
        }
    });
    validated("sweep.mu_factors", [&] {
        if (mu_factors.empty()) throw std::invalid_argument("at least one factor is required");
        for (double f : mu_factors) {
            if (!(f > 0.0)) throw std::invalid_argument("factors must be > 0");
        }
    });
    validated("iteration_study.budgets", [&] {
        if (budgets.empty()) throw std::invalid_argument("at least one budget is required");
        for (std::size_t i = 0; i < budgets.size(); ++i) {
            if (budgets[i] < 0 || (i > 0 && budgets[i] <= budgets[i - 1])) {
                throw std::invalid_argument("budgets must be non-negative and strictly increasing");
            }
        }
    });
    if (workers == 0) throw ConfigError("workers", "must be >= 1");
}

RunConfig default_run_config(int flasks, ObjectiveMode objectives) {
    RunConfig c;
    c.objectives = objectives;
    c.integrator = default_culture_integrator();
    set_flask_count(c, flasks);
    c.finalize();
    return c;
}

RunConfig parse_run_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    Node n(root, "");
    const int version = n.required<int>("schema_version");
    if (version != kSchemaVersion) {
        throw ConfigError("schema_version", "unsupported version " + std::to_string(version));
    }

    RunConfig c;
    c.integrator = default_culture_integrator();
    c.seed = n.get<std::uint64_t>("seed", c.seed);
    c.objectives = parse_enum<ObjectiveMode>(n.get<std::string>("objectives", "two"), n.path("objectives"),
                                             {{"two", ObjectiveMode::two}, {"four", ObjectiveMode::four}});
    c.output_dir = n.get<std::string>("output_dir", c.output_dir);
    c.workers = n.get<unsigned>("workers", c.workers);

    if (n.has("model")) parse_model(n.child("model"), c.model);

    bool explicit_scales = false;
    if (n.has("seed_train")) {
        Node st = n.child("seed_train");
        c.flasks = st.get("flasks", c.flasks);
        c.bioreactors = parse_enum<BioreactorPreset>(
            st.get<std::string>("bioreactor_preset", preset_name(c.bioreactors)), st.path("bioreactor_preset"),
            {{"results", BioreactorPreset::results}, {"table2", BioreactorPreset::table2}});
        if (st.has("scales")) {
            const json& arr = st.raw("scales");
            if (!arr.is_array()) throw ConfigError(st.path("scales"), "expected an array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                c.seed_train.scales.push_back(parse_scale(Node(arr[i], index_path(st.path("scales"), i))));
            }
            explicit_scales = true;
        } else {
            try {
                c.seed_train.scales = standard_scales(c.flasks, c.bioreactors);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(st.path("flasks"), e.what());
            }
        }
        auto& s = c.seed_train;
        s.seeding_vcd_range = st.get("seeding_vcd_range", s.seeding_vcd_range);
        s.transfer_vcd_range = st.get("transfer_vcd_range", s.transfer_vcd_range);
        s.target_seeding_vcd = st.get("target_seeding_vcd", s.target_seeding_vcd);
        s.alpha = st.get("alpha", s.alpha);
        s.n_mc = st.get("n_mc", s.n_mc);
        s.production_duration = st.get("production_duration", s.production_duration);
        if (st.has("uncertainty")) {
            Node u = st.child("uncertainty");
            s.uncertainty.mu_max_rel_sd = u.get("mu_max_rel_sd", s.uncertainty.mu_max_rel_sd);
            s.uncertainty.initial_vcd_rel_sd = u.get("initial_vcd_rel_sd", s.uncertainty.initial_vcd_rel_sd);
            u.finish();
        }
        if (st.has("initial_state")) s.initial_state = parse_state(st.child("initial_state"), s.initial_state);
        s.lag_every_scale = st.get("lag_every_scale", s.lag_every_scale);
        s.count_initial_seeding = st.get("count_initial_seeding", s.count_initial_seeding);
        s.deviation_counting = parse_enum<DeviationCounting>(
            st.get<std::string>("deviation_counting", counting_name(s.deviation_counting)),
            st.path("deviation_counting"),
            {{"per_trajectory", DeviationCounting::per_trajectory}, {"per_event", DeviationCounting::per_event}});
        s.fixed_passaging_times = st.get("fixed_passaging_times", s.fixed_passaging_times);
        st.finish();
    } else {
        c.seed_train.scales = standard_scales(c.flasks, c.bioreactors);
    }
    c.seed_train.initial_state.V = c.seed_train.scales.front().filling_volume_target;
    if (explicit_scales) c.flasks = static_cast<int>(c.seed_train.flask_count());

    if (n.has("integrator")) {
        Node in = n.child("integrator");
        auto& ic = c.integrator;
        ic.method = parse_enum<IntegratorMethod>(
            in.get<std::string>("method", method_name(ic.method)), in.path("method"),
            {{"rk45_adaptive", IntegratorMethod::rk45_adaptive}, {"rk4_fixed", IntegratorMethod::rk4_fixed}});
        ic.h_init = in.get("h_init", ic.h_init);
        ic.rel_tol = in.get("rel_tol", ic.rel_tol);
        ic.abs_tol = in.get("abs_tol", ic.abs_tol);
        ic.h_max = in.get("h_max", ic.h_max);
        ic.h_min = in.get("h_min", ic.h_min);
        in.finish();
        if (ic.abs_tol.size() != 1 && ic.abs_tol.size() != kStateSize) {
            throw ConfigError("integrator.abs_tol", "expected 1 or 8 entries");
        }
    }

    if (n.has("design_space")) {
        Node ds = n.child("design_space");
        const json& b = ds.raw("bounds");
        if (!b.is_array()) throw ConfigError(ds.path("bounds"), "expected an array of [lower, upper]");
        for (std::size_t i = 0; i < b.size(); ++i) {
            const Range r = Node::convert<Range>(b[i], index_path(ds.path("bounds"), i));
            c.design_space.bounds.emplace_back(r.lower, r.upper);
        }
        if (ds.has("names")) {
            const json& names = ds.raw("names");
            if (!names.is_array()) throw ConfigError(ds.path("names"), "expected an array of strings");
            for (std::size_t i = 0; i < names.size(); ++i) {
                c.design_space.names.push_back(Node::convert<std::string>(names[i], index_path(ds.path("names"), i)));
            }
        }
        ds.finish();
    } else if (c.flasks >= 3 && c.flasks <= 5) {
        c.design_space = flask_design_space(c.flasks);
    } else {
        throw ConfigError("design_space", "required when the flask count is not 3, 4 or 5");
    }
    if (c.design_space.names.empty()) {
        for (std::size_t i = 0; i < c.design_space.dims(); ++i) c.design_space.names.push_back("V" + std::to_string(i + 1));
    }

    if (n.has("optimizer")) {
        Node o = n.child("optimizer");
        auto& oc = c.optimizer;
        oc.n_lhs = o.get("n_lhs", oc.n_lhs);
        oc.n_iterations = o.get("n_iterations", oc.n_iterations);
        oc.ehvi_mc_samples = o.get("ehvi_mc_samples", oc.ehvi_mc_samples);
        oc.acq_restarts = o.get("acq_restarts", oc.acq_restarts);
        oc.acq_refine = o.get("acq_refine", oc.acq_refine);
        oc.acq_min_step = o.get("acq_min_step", oc.acq_min_step);
        oc.gp_restarts = o.get("gp_restarts", oc.gp_restarts);
        o.finish();
    }

    if (n.has("volumes")) c.volumes = n.get<std::vector<double>>("volumes", {});
    if (n.has("reference")) {
        Node r = n.child("reference");
        c.reference.volumes = r.get("volumes", c.reference.volumes);
        c.reference.interval_h = r.get("interval_h", c.reference.interval_h);
        r.finish();
    }
    if (n.has("sweep")) {
        Node s = n.child("sweep");
        c.mu_factors = s.get("mu_factors", c.mu_factors);
        s.finish();
    }
    if (n.has("iteration_study")) {
        Node s = n.child("iteration_study");
        c.budgets = s.get("budgets", c.budgets);
        s.finish();
    }
    n.finish();
    c.finalize();
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::string serialize_run_config(const RunConfig& c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["seed"] = c.seed;
    j["objectives"] = mode_name(c.objectives);
    j["output_dir"] = c.output_dir;
    j["workers"] = c.workers;

    const auto& s = c.seed_train;
    json st;
    st["flasks"] = c.flasks;
    st["bioreactor_preset"] = preset_name(c.bioreactors);
    json scales = json::array();
    for (const auto& sc : s.scales) scales.push_back(scale_json(sc));
    st["scales"] = scales;
    st["seeding_vcd_range"] = range_json(s.seeding_vcd_range);
    st["transfer_vcd_range"] = range_json(s.transfer_vcd_range);
    st["target_seeding_vcd"] = s.target_seeding_vcd;
    st["alpha"] = s.alpha;
    st["n_mc"] = s.n_mc;
    st["production_duration"] = s.production_duration;
    st["uncertainty"] = {{"mu_max_rel_sd", s.uncertainty.mu_max_rel_sd},
                         {"initial_vcd_rel_sd", s.uncertainty.initial_vcd_rel_sd}};
    st["initial_state"] = state_json(s.initial_state);
    st["lag_every_scale"] = s.lag_every_scale;
    st["count_initial_seeding"] = s.count_initial_seeding;
    st["deviation_counting"] = counting_name(s.deviation_counting);
    st["fixed_passaging_times"] = s.fixed_passaging_times;
    j["seed_train"] = st;

    j["model"] = model_json(c.model);
    j["integrator"] = {{"method", method_name(c.integrator.method)},
                       {"h_init", c.integrator.h_init},
                       {"rel_tol", c.integrator.rel_tol},
                       {"abs_tol", c.integrator.abs_tol},
                       {"h_max", c.integrator.h_max},
                       {"h_min", c.integrator.h_min}};
    json bounds = json::array();
    for (const auto& [lo, hi] : c.design_space.bounds) bounds.push_back({lo, hi});
    j["design_space"] = {{"names", c.design_space.names}, {"bounds", bounds}};
    const auto& o = c.optimizer;
    j["optimizer"] = {{"n_lhs", o.n_lhs},
                      {"n_iterations", o.n_iterations},
                      {"ehvi_mc_samples", o.ehvi_mc_samples},
                      {"acq_restarts", o.acq_restarts},
                      {"acq_refine", o.acq_refine},
                      {"acq_min_step", o.acq_min_step},
                      {"gp_restarts", o.gp_restarts}};
    if (c.volumes) j["volumes"] = *c.volumes;
    j["reference"] = {{"volumes", c.reference.volumes}, {"interval_h", c.reference.interval_h}};
    j["sweep"] = {{"mu_factors", c.mu_factors}};
    j["iteration_study"] = {{"budgets", c.budgets}};
    return j.dump(2) + "\n";
}

}  // namespace seedopt
