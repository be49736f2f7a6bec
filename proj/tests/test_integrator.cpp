#include "doctest.h"

#include "seedopt/integrator.hpp"
#include "seedopt/kinetics.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace seedopt;

namespace {

using V1 = std::array<double, 1>;

IntegratorConfig tight(IntegratorMethod m = IntegratorMethod::rk45_adaptive) {
    IntegratorConfig c;
    c.method = m;
    c.rel_tol = 1e-9;
    c.abs_tol = {1e-12};
    return c;
}

double rk4_error(double h) {
    IntegratorConfig c = tight(IntegratorMethod::rk4_fixed);
    c.h_init = h;
    c.h_max = h;
    const std::vector<double> grid{72.0};
    const auto tr = integrate<1>([](double, const V1& y) { return V1{0.029 * y[0]}; }, 0.0, V1{1.0},
                                 72.0, c, grid);
    return std::abs(tr.y.back()[0] - std::exp(0.029 * 72.0));
}

}  // namespace

TEST_CASE("constant right-hand side keeps the state") {
    const auto grid = hourly_grid(0.0, 10.0);
    const auto tr = integrate<1>([](double, const V1&) { return V1{0.0}; }, 0.0, V1{3.0}, 10.0,
                                 IntegratorConfig{}, grid);
    REQUIRE(tr.y.size() == 11);
    for (const auto& y : tr.y) CHECK(y[0] == 3.0);
}

TEST_CASE("exponential growth matches the closed form") {
    const auto grid = hourly_grid(0.0, 72.0);
    const auto tr = integrate<1>([](double, const V1& y) { return V1{0.029 * y[0]}; }, 0.0,
                                 V1{3.15e8}, 72.0, tight(), grid);
    const double exact = 3.15e8 * std::exp(2.088);
    CHECK(std::abs(tr.y.back()[0] - exact) / exact < 1e-8);
    CHECK(exact == doctest::Approx(2.54e9).epsilon(0.01));
}

TEST_CASE("cosine integrates to zero over a full period") {
    const double T = 2.0 * std::numbers::pi;
    const std::vector<double> grid{0.0, T};
    const auto tr = integrate<1>([](double t, const V1&) { return V1{std::cos(t)}; }, 0.0, V1{1.0}, T,
                                 tight(), grid);
    CHECK(tr.y.back()[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rk4 converges at fourth order") {
    const double e1 = rk4_error(0.5);
    const double e2 = rk4_error(0.25);
    const double ratio = e1 / e2;
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
}

TEST_CASE("output timestamps equal the requested grid") {
    std::vector<double> grid{0.0, 0.1, 0.3, 1.0 / 3.0, 7.25, 7.25, 12.0};
    for (auto m : {IntegratorMethod::rk45_adaptive, IntegratorMethod::rk4_fixed}) {
        IntegratorConfig c;
        c.method = m;
        c.h_init = 0.07;
        const auto tr = integrate<1>([](double, const V1& y) { return V1{-0.1 * y[0]}; }, 0.0, V1{1.0},
                                     12.0, c, grid);
        REQUIRE(tr.t.size() == grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(tr.t[i] == grid[i]);
    }
}

TEST_CASE("identical inputs give bit-identical trajectories") {
    ModelParameters p;
    const CultureState s{0.0, 3.15e8, 3.3e8, 30.0, 6.0, 1.0, 0.5, 0.0, 0.1};
    const auto grid = hourly_grid(0.0, 200.0);
    auto run = [&] {
        return integrate<kStateSize>([&](double t, const StateArray& y) { return batch_rhs(t, y, p); }, 0.0,
                                     s.to_array(), 200.0, IntegratorConfig{}, grid,
                                     [](StateArray& y, const StateArray& prev) { project_nonnegative(y, prev); });
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.y == b.y);
}

TEST_CASE("invalid configuration and grid are rejected") {
    const std::vector<double> grid{0.0, 2.0};
    IntegratorConfig c;
    c.h_init = 2.0;
    c.h_max = 1.0;
    auto rhs = [](double, const V1&) { return V1{0.0}; };
    CHECK_THROWS_AS(integrate<1>(rhs, 0.0, V1{1.0}, 2.0, c, grid), std::invalid_argument);
    const std::vector<double> outside{0.0, 3.0};
    CHECK_THROWS_AS(integrate<1>(rhs, 0.0, V1{1.0}, 2.0, IntegratorConfig{}, outside), std::invalid_argument);
    const std::vector<double> unsorted{1.0, 0.5};
    CHECK_THROWS_AS(integrate<1>(rhs, 0.0, V1{1.0}, 2.0, IntegratorConfig{}, unsorted), std::invalid_argument);
}

TEST_CASE("blow-up is reported as an integration error") {
    const std::vector<double> grid{0.0, 2.0};
    CHECK_THROWS_AS(integrate<1>([](double, const V1& y) { return V1{y[0] * y[0]}; }, 0.0, V1{1.0}, 2.0,
                                 IntegratorConfig{}, grid),
                    IntegrationError);
}

TEST_CASE("randomized batch cultures stay non-negative with constant volume") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto grid = hourly_grid(0.0, 240.0);
    for (int i = 0; i < 200; ++i) {
        ModelParameters p;
        p.mu_max *= 0.5 + u(rng);
        p.k_Amm = u(rng);
        const CultureState s{0.0, 1e8 + 1e9 * u(rng), 0.0, 40.0 * u(rng), 8.0 * u(rng), 5.0 * u(rng),
                             3.0 * u(rng), 0.0, 0.01 + u(rng)};
        StateArray y0 = s.to_array();
        y0[kXt] = y0[kXv] * (1.0 + 0.2 * u(rng));
        const auto tr = integrate<kStateSize>([&](double t, const StateArray& y) { return batch_rhs(t, y, p); },
                                              0.0, y0, 240.0, IntegratorConfig{}, grid,
                                              [](StateArray& y, const StateArray& prev) { project_nonnegative(y, prev); });
        for (const auto& y : tr.y) {
            for (double v : y) REQUIRE(v >= 0.0);
            REQUIRE(y[kVolume] == y0[kVolume]);
        }
    }
}
