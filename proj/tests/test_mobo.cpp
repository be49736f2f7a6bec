#include "doctest.h"

#include "seedopt/error.hpp"
#include "seedopt/mobo.hpp"
#include "seedopt/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace seedopt;

namespace {

const std::vector<Sense> kMinMin{Sense::minimize, Sense::minimize};

DesignSpace unit_square() {
    DesignSpace s;
    s.names = {"x1", "x2"};
    s.bounds = {{0.0, 1.0}, {0.0, 1.0}};
    return s;
}

std::vector<double> toy(const Point& x) {
    double f1 = 0.0, f2 = 0.0;
    for (double v : x) {
        f1 += v * v;
        f2 += (v - 1.0) * (v - 1.0);
    }
    return {f1, f2};
}

// Dominated area of the toy's analytic front sqrt(f1/2) + sqrt(f2/2) = 1 within (3, 3), by quadrature.
double toy_true_hypervolume() {
    const int n = 200000;
    double area = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f1 = 3.0 * (i + 0.5) / n;
        const double f2_front = f1 >= 2.0 ? 0.0 : 2.0 * std::pow(1.0 - std::sqrt(f1 / 2.0), 2);
        area += (3.0 - f2_front) * 3.0 / n;
    }
    return area;
}

std::vector<std::size_t> brute_force_front(const std::vector<Point>& pts) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
            bool all_le = true, any_lt = false;
            for (std::size_t k = 0; k < pts[i].size(); ++k) {
                all_le = all_le && pts[j][k] <= pts[i][k];
                any_lt = any_lt || pts[j][k] < pts[i][k];
            }
            dominated = all_le && any_lt;
        }
        if (!dominated) out.push_back(i);
    }
    return out;
}

double mc_hypervolume(const std::vector<Point>& front, const Point& ref, int samples, std::uint64_t seed) {
    const std::size_t m = ref.size();
    Point lo(m, std::numeric_limits<double>::infinity());
    for (const auto& p : front) {
        for (std::size_t j = 0; j < m; ++j) lo[j] = std::min(lo[j], p[j]);
    }
    double box = 1.0;
    for (std::size_t j = 0; j < m; ++j) box *= ref[j] - lo[j];
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int hits = 0;
    Point z(m);
    for (int s = 0; s < samples; ++s) {
        for (std::size_t j = 0; j < m; ++j) z[j] = lo[j] + u(rng) * (ref[j] - lo[j]);
        for (const auto& p : front) {
            bool dom = true;
            for (std::size_t j = 0; j < m && dom; ++j) dom = p[j] <= z[j];
            if (dom) {
                ++hits;
                break;
            }
        }
    }
    return box * hits / samples;
}

double toy_hypervolume(const OptimizationResult& r) {
    std::vector<Point> front;
    for (const auto& e : r.archive.entries) front.push_back(e.objectives);
    return hypervolume(front, {3.0, 3.0});
}

OptimizerConfig fast_config() {
    OptimizerConfig c;
    c.sense = kMinMin;
    c.gp_restarts = 3;
    c.ehvi_mc_samples = 256;
    c.acq_restarts = 16;
    c.acq_refine = 2;
    return c;
}

}  // namespace

TEST_CASE("latin hypercube strata") {
    DesignSpace s;
    s.bounds = {{0.0, 10.0}, {-1.0, 1.0}, {0.014, 0.015}};
    const auto one = latin_hypercube(s, 1, 3);
    CHECK(one[0][0] == doctest::Approx(5.0));
    CHECK(one[0][1] == doctest::Approx(0.0));
    const auto pts = latin_hypercube(s, 10, 42);
    for (std::size_t d = 0; d < 3; ++d) {
        std::set<int> strata;
        for (const auto& p : pts) {
            const double u = (p[d] - s.bounds[d].first) / (s.bounds[d].second - s.bounds[d].first);
            const int k = static_cast<int>(std::floor(u * 10));
            strata.insert(k);
            CHECK(u * 10 - k == doctest::Approx(0.5));
        }
        CHECK(strata.size() == 10);
    }
    CHECK(latin_hypercube(s, 10, 42) == pts);
    CHECK(latin_hypercube(s, 10, 43) != pts);
}

TEST_CASE("pareto filter examples") {
    CHECK(pareto_filter({{1, 2}, {2, 1}, {2, 2}}, kMinMin) == std::vector<std::size_t>{0, 1});
    CHECK(pareto_filter({{1, 1}, {1, 1}, {1, 1}}, kMinMin) == std::vector<std::size_t>{0, 1, 2});
    CHECK(pareto_filter({{1, 2}, {2, 1}, {2, 2}}, {Sense::maximize, Sense::maximize}) == std::vector<std::size_t>{2});
}

TEST_CASE("pareto filter equals brute force and is idempotent") {
    Rng rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> small(0, 5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = 2 + trial % 3;
        std::vector<Point> pts(50, Point(m));
        for (auto& p : pts) {
            for (double& v : p) v = trial % 2 ? u(rng) : small(rng);
        }
        const std::vector<Sense> sense(m, Sense::minimize);
        const auto idx = pareto_filter(pts, sense);
        REQUIRE(idx == brute_force_front(pts));
        std::vector<Point> front;
        for (std::size_t i : idx) front.push_back(pts[i]);
        CHECK(pareto_filter(front, sense).size() == front.size());
    }
}

TEST_CASE("hypervolume basics") {
    CHECK(hypervolume({{1, 1}}, {2, 2}) == 1.0);
    CHECK(hypervolume({{1, 3}, {3, 1}}, {4, 4}) == doctest::Approx(5.0));
    CHECK(hypervolume({{1, 3}, {3, 1}, {3, 3}}, {4, 4}) == doctest::Approx(5.0));
    CHECK(hypervolume({{1, 1, 1}}, {2, 3, 4}) == doctest::Approx(6.0));
    CHECK(hypervolume({{2.0}}, {5.0}) == 3.0);
    CHECK(hypervolume({}, {1, 1}) == 0.0);
    CHECK_THROWS_AS(hypervolume({{1, 5}}, {4, 4}), PointOutsideRef);
}

TEST_CASE("hypervolume agrees with Monte-Carlo integration") {
    Rng rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t m : {2u, 3u, 4u}) {
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<Point> pts(12, Point(m));
            for (auto& p : pts) {
                double s = 0.0;
                for (double& v : p) {
                    v = u(rng) + 0.05;
                    s += v;
                }
                for (double& v : p) v /= s;
            }
            const Point ref(m, 1.1);
            const double exact = hypervolume(pts, ref);
            const double mc = mc_hypervolume(pts, ref, 1000000, 77 + trial);
            CHECK(std::abs(exact - mc) <= 0.01 * exact);
        }
    }
}

TEST_CASE("adding a dominated point leaves the hypervolume unchanged") {
    const std::vector<Point> f{{1, 3, 2}, {2, 1, 3}, {3, 2, 1}};
    auto g = f;
    g.push_back({3, 3, 3});
    CHECK(hypervolume(g, {4, 4, 4}) == doctest::Approx(hypervolume(f, {4, 4, 4})));
}

TEST_CASE("exclusive contribution equals the hypervolume difference") {
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t m : {1u, 2u, 3u, 4u}) {
        std::vector<Point> pts(6, Point(m));
        for (auto& p : pts) {
            for (double& v : p) v = u(rng);
        }
        const Point ref(m, 1.2);
        for (int k = 0; k < 20; ++k) {
            Point y(m);
            for (double& v : y) v = u(rng);
            auto with = pts;
            with.push_back(y);
            CHECK(hypervolume_improvement(pts, ref, y) ==
                  doctest::Approx(hypervolume(with, ref) - hypervolume(pts, ref)).epsilon(1e-9));
        }
    }
}

TEST_CASE("reference point is the worst value plus a tenth of the range") {
    const Point ref = reference_point({{0, 10}, {4, 20}, {2, 30}});
    CHECK(ref[0] == doctest::Approx(4.4));
    CHECK(ref[1] == doctest::Approx(32.0));
    CHECK(reference_point({{5.0}})[0] == doctest::Approx(5.5));
}

TEST_CASE("single-objective EHVI matches closed-form expected improvement") {
    const std::vector<Point> X{{0.05}, {0.2}, {0.45}, {0.7}, {0.95}};
    std::vector<double> y;
    for (const auto& x : X) y.push_back(std::sin(6.0 * x[0]));
    const GpModel gp = GpModel::with_hyperparams(X, y, GpHyperparams{{0.15}, 1.0, 1e-8});
    const double best = *std::min_element(y.begin(), y.end());
    const auto ctx = EhviContext::make({{best}}, {best + 100.0}, 20000, 5);
    Rng rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 5; ++k) {
        const Point x{u(rng)};
        const GpPrediction p = gp.predict(x, false);
        const double sd = std::sqrt(p.variance);
        const double z = (best - p.mean) / sd;
        const double Phi = 0.5 * std::erfc(-z / std::numbers::sqrt2);
        const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
        const double ei = (best - p.mean) * Phi + sd * phi;
        const EhviEstimate est = acquisition_ehvi({gp}, ctx, x);
        CHECK(std::abs(est.value - ei) <= 3.0 * est.std_error + 1e-12);
    }
}

TEST_CASE("EHVI on degenerate posteriors") {
    const std::vector<Point> X{{0.0}, {0.5}, {1.0}};
    const GpHyperparams h{{0.3}, 1.0, 1e-12};
    const GpModel a = GpModel::with_hyperparams(X, {5.0, 1.0, 3.0}, h);
    const GpModel b = GpModel::with_hyperparams(X, {5.0, 1.0, 3.0}, h);
    // At x = 0.5 both objectives are ~1 with vanishing variance.
    const auto dominated = EhviContext::make({{0.5, 0.5}}, {6.0, 6.0}, 512, 1);
    CHECK(acquisition_ehvi({a, b}, dominated, {0.5}).value == 0.0);
    const std::vector<Point> front{{2.0, 4.0}, {4.0, 2.0}};
    const auto dominating = EhviContext::make(front, {6.0, 6.0}, 512, 1);
    CHECK(acquisition_ehvi({a, b}, dominating, {0.5}).value ==
          doctest::Approx(hypervolume_improvement(front, {6.0, 6.0}, {1.0, 1.0})).epsilon(1e-4));
    CHECK(acquisition_ehvi({a, b}, dominating, {0.3}).value >= 0.0);
}

TEST_CASE("proposal finds a single acquisition peak") {
    // Symmetric data with one gap centred at 0.5.
    std::vector<Point> X;
    std::vector<double> y;
    for (double x : {0.0, 0.1, 0.2, 0.3, 0.7, 0.8, 0.9, 1.0}) {
        X.push_back({x});
        y.push_back((x - 0.5) * (x - 0.5));
    }
    GpFitOptions o;
    o.input_bounds = std::vector<std::pair<double, double>>{{0.0, 1.0}};
    const GpModel gp = GpModel::with_hyperparams(X, y, GpHyperparams{{0.15}, 1.0, 1e-8}, o);
    DesignSpace space;
    space.bounds = {{0.0, 1.0}};
    OptimizerConfig cfg;
    cfg.sense = {Sense::minimize};
    const double best = 0.04;
    const auto ctx = EhviContext::make({{best}}, {1.0}, 4096, 3);
    const Point x = propose_next({gp}, ctx, space, X, cfg, 1);
    CHECK(std::abs(x[0] - 0.5) <= 1e-2);

    // Excluding the peak forces a different in-bounds point.
    auto with_peak = X;
    with_peak.push_back(x);
    const Point x2 = propose_next({gp}, ctx, space, with_peak, cfg, 1);
    CHECK(std::abs(x2[0] - x[0]) >= 1e-6);
    CHECK(space.contains(x2));
}

TEST_CASE("flat acquisition still yields an in-bounds point") {
    const std::vector<Point> X{{0.1, 0.1}, {0.9, 0.9}, {0.5, 0.2}};
    const GpHyperparams h{{0.5, 0.5}, 1.0, 1e-8};
    const GpModel a = GpModel::with_hyperparams(X, {10.0, 10.5, 11.0}, h);
    const auto ctx = EhviContext::make({{0.0}}, {100.0}, 64, 1);
    OptimizerConfig cfg;
    cfg.sense = {Sense::minimize};
    const Point x = propose_next({a}, ctx, unit_square(), X, cfg, 2);
    CHECK(unit_square().contains(x));
}

TEST_CASE("degenerate budget returns the LHS front") {
    OptimizerConfig cfg = fast_config();
    cfg.n_iterations = 0;
    const auto r = optimize(toy, unit_square(), cfg);
    REQUIRE(r.history.size() == 10);
    std::vector<Point> values;
    for (const auto& e : r.history) {
        values.push_back(e.objectives);
        CHECK(e.provenance == Provenance::lhs);
    }
    CHECK(r.pareto_indices == pareto_filter(values, kMinMin));
    CHECK(r.archive.entries.size() == r.pareto_indices.size());
}

TEST_CASE("optimizer properties on the analytic toy") {
    OptimizerConfig cfg = fast_config();
    cfg.n_iterations = 8;
    const auto r = optimize(toy, unit_square(), cfg);

    CHECK(r.history.size() == 18);
    for (std::size_t i = 10; i < r.history.size(); ++i) {
        CHECK(r.history[i].provenance == Provenance::proposed);
        CHECK(r.history[i].iteration == static_cast<int>(i) - 9);
        for (std::size_t j = 0; j < i; ++j) {
            CHECK(std::hypot(r.history[i].x[0] - r.history[j].x[0], r.history[i].x[1] - r.history[j].x[1]) >= 1e-6);
        }
    }
    for (std::size_t k = 1; k < r.hypervolume_trace.size(); ++k) {
        CHECK(r.hypervolume_trace[k] >= r.hypervolume_trace[k - 1]);
    }
    for (const auto& a : r.archive.entries) {
        for (const auto& b : r.archive.entries) {
            const bool dom = b.objectives[0] <= a.objectives[0] && b.objectives[1] <= a.objectives[1] &&
                             b.objectives != a.objectives;
            CHECK_FALSE(dom);
        }
        for (std::size_t j = 0; j < 2; ++j) CHECK(a.objectives[j] <= r.archive.reference_point[j]);
    }
    CHECK(r.models.size() == 2);

    SUBCASE("fixed seeds reproduce the run") {
        const auto again = optimize(toy, unit_square(), cfg);
        for (std::size_t i = 0; i < r.history.size(); ++i) CHECK(again.history[i].x == r.history[i].x);
    }
    SUBCASE("shorter budgets are prefixes") {
        OptimizerConfig shorter = cfg;
        shorter.n_iterations = 4;
        const auto s = optimize(toy, unit_square(), shorter);
        for (std::size_t i = 0; i < s.history.size(); ++i) CHECK(s.history[i].x == r.history[i].x);
        CHECK(toy_hypervolume(s) <= toy_hypervolume(r));
    }
    SUBCASE("maximizing f equals minimizing -f") {
        OptimizerConfig flipped = cfg;
        flipped.sense = {Sense::minimize, Sense::maximize};
        const auto f = optimize([](const Point& x) { auto v = toy(x); v[1] = -v[1]; return v; }, unit_square(),
                                flipped);
        REQUIRE(f.history.size() == r.history.size());
        for (std::size_t i = 0; i < r.history.size(); ++i) CHECK(f.history[i].x == r.history[i].x);
        CHECK(f.pareto_indices == r.pareto_indices);
    }
}

TEST_CASE("summarize rebuilds the archive of a history prefix") {
    OptimizerConfig cfg = fast_config();
    cfg.n_iterations = 3;
    const auto r = optimize(toy, unit_square(), cfg);
    std::vector<Evaluation> prefix(r.history.begin(), r.history.begin() + 11);
    const auto s = summarize(prefix, kMinMin);
    CHECK(s.history.size() == 11);
    CHECK(s.hypervolume_trace.size() == 11);
}

TEST_CASE("analytic toy reaches 95% of the true-front hypervolume") {
    const double truth = toy_true_hypervolume();
    CHECK(truth == doctest::Approx(25.0 / 3.0).epsilon(1e-6));
    OptimizerConfig cfg;
    cfg.sense = kMinMin;
    const auto r = optimize(toy, unit_square(), cfg);
    CHECK(toy_hypervolume(r) >= 0.95 * truth);
}

TEST_CASE("objective failures carry the design point") {
    OptimizerConfig cfg = fast_config();
    cfg.n_iterations = 0;
    int calls = 0;
    try {
        optimize([&](const Point& x) -> std::vector<double> {
            if (++calls == 3) throw std::runtime_error("boom");
            return toy(x);
        }, unit_square(), cfg);
        FAIL("expected an exception");
    } catch (const ObjectiveEvaluationError& e) {
        CHECK(e.x().size() == 2);
    }
}

TEST_CASE("configuration validation") {
    OptimizerConfig cfg;
    CHECK_THROWS(cfg.validate());
    cfg.sense = kMinMin;
    CHECK_NOTHROW(cfg.validate());
    cfg.n_lhs = 1;
    CHECK_THROWS(cfg.validate());
    DesignSpace s;
    s.bounds = {{1.0, 1.0}};
    CHECK_THROWS(s.validate());
}
