#pragma once

/**
 * @file integrator.hpp
 * @brief Explicit Runge-Kutta integration with output on a caller-supplied time grid.
 *
 * Two methods are provided: classic fixed-step RK4 and the Dormand-Prince 5(4)
 * embedded pair with step-size control. Steps are shortened so that every grid
 * time is hit exactly; the returned timestamps are the requested values.
 */

#include "seedopt/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace seedopt {

enum class IntegratorMethod { rk4_fixed, rk45_adaptive };

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::rk45_adaptive;
    double h_init = 0.01;  ///< h; the fixed step for rk4_fixed
    double rel_tol = 1e-8;
    /// Per-component absolute tolerance; a single entry is broadcast.
    std::vector<double> abs_tol = {1e-10};
    double h_max = 1.0;    ///< h
    double h_min = 1e-12;  ///< h; smaller accepted steps are reported as underflow

    void validate() const;
};

template <std::size_t N>
struct Trajectory {
    std::vector<double> t;
    std::vector<std::array<double, N>> y;
};

namespace detail {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
inline Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    }
    return out;
}

template <std::size_t N>
inline void check_finite(const Vec<N>& y, double t) {
    for (double v : y) {
        if (!std::isfinite(v)) {
            throw IntegrationError("non-finite state at t = " + std::to_string(t));
        }
    }
}

struct NoProjection {
    template <typename V>
    void operator()(V&, const V&) const {}
};

}  // namespace detail

inline void IntegratorConfig::validate() const {
    if (!(h_init > 0.0) || !(h_max > 0.0) || h_init > h_max) {
        throw std::invalid_argument("integrator: require 0 < h_init <= h_max");
    }
    if (!(rel_tol > 0.0)) throw std::invalid_argument("integrator: rel_tol must be > 0");
    if (abs_tol.empty()) throw std::invalid_argument("integrator: abs_tol must not be empty");
    for (double a : abs_tol) {
        if (!(a > 0.0)) throw std::invalid_argument("integrator: abs_tol must be > 0");
    }
}

/**
 * @brief Integrate dy/dt = rhs(t, y) from (t0, y0) to t_end.
 *
 * @param grid sorted output times within [t0, t_end]; the trajectory holds one
 *        state per grid entry.
 * @param project called as project(y_new, y_old) after every accepted step;
 *        may clamp y_new or throw.
 *
 * Throws IntegrationError on step-size underflow or a non-finite state.
 */
template <std::size_t N, typename Rhs, typename Project = detail::NoProjection>
Trajectory<N> integrate(Rhs&& rhs, double t0, std::array<double, N> y0, double t_end,
                        const IntegratorConfig& cfg, std::span<const double> grid,
                        Project&& project = {}) {
    using V = std::array<double, N>;
    cfg.validate();
    if (t_end < t0) throw std::invalid_argument("integrate: t_end < t0");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < t0 || grid[i] > t_end || (i > 0 && grid[i] < grid[i - 1])) {
            throw std::invalid_argument("integrate: output grid must be sorted within [t0, t_end]");
        }
    }

    V atol;
    for (std::size_t i = 0; i < N; ++i) atol[i] = cfg.abs_tol.size() == 1 ? cfg.abs_tol[0] : cfg.abs_tol.at(i);

    Trajectory<N> out;
    out.t.reserve(grid.size());
    out.y.reserve(grid.size());

    double t = t0;
    V y = y0;
    detail::check_finite(y, t);
    std::size_t next = 0;
    auto emit_reached = [&] {
        while (next < grid.size() && grid[next] == t) {
            out.t.push_back(grid[next]);
            out.y.push_back(y);
            ++next;
        }
    };
    emit_reached();

    // Next stopping point: the following grid time or t_end.
    auto stop_time = [&] { return next < grid.size() ? grid[next] : t_end; };

    if (cfg.method == IntegratorMethod::rk4_fixed) {
        while (t < t_end) {
            const double target = stop_time();
            double h = std::min(cfg.h_init, target - t);
            // Avoid a sliver step caused by round-off in repeated additions.
            if (target - (t + h) < 1e-12 * std::max(1.0, std::abs(target))) h = target - t;
            const V k1 = rhs(t, y);
            const V k2 = rhs(t + 0.5 * h, detail::axpy<N>(y, h, {{0.5, &k1}}));
            const V k3 = rhs(t + 0.5 * h, detail::axpy<N>(y, h, {{0.5, &k2}}));
            const V k4 = rhs(t + h, detail::axpy<N>(y, h, {{1.0, &k3}}));
            V y_new;
            for (std::size_t i = 0; i < N; ++i) {
                y_new[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            const double t_new = (h == target - t) ? target : t + h;
            detail::check_finite(y_new, t_new);
            project(y_new, y);
            y = y_new;
            t = t_new;
            emit_reached();
        }
        return out;
    }

    // Dormand-Prince 5(4), FSAL.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double h = std::min(cfg.h_init, cfg.h_max);
    V k1 = rhs(t, y);
    while (t < t_end) {
        const double target = stop_time();
        bool lands = false;
        double step = std::min(h, cfg.h_max);
        if (t + step >= target || target - (t + step) < 1e-12 * std::max(1.0, std::abs(target))) {
            step = target - t;
            lands = true;
        }

        const V k2 = rhs(t + c2 * step, detail::axpy<N>(y, step, {{a21, &k1}}));
        const V k3 = rhs(t + c3 * step, detail::axpy<N>(y, step, {{a31, &k1}, {a32, &k2}}));
        const V k4 = rhs(t + c4 * step, detail::axpy<N>(y, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const V k5 = rhs(t + c5 * step,
                         detail::axpy<N>(y, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const V k6 = rhs(t + step, detail::axpy<N>(y, step, {{a61, &k1}, {a62, &k2}, {a63, &k3},
                                                            {a64, &k4}, {a65, &k5}}));
        V y_new = detail::axpy<N>(y, step, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const double t_new = lands ? target : t + step;
        const V k7 = rhs(t_new, y_new);

        double err = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                     e6 * k6[i] + e7 * k7[i]);
            const double sc = atol[i] + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            if (!std::isfinite(e) || !std::isfinite(y_new[i])) finite = false;
            err = std::max(err, std::abs(e) / sc);
        }

        if (finite && err <= 1.0) {
            const V unprojected = y_new;
            project(y_new, y);
            t = t_new;
            y = y_new;
            // FSAL reuse is only valid when the projection left the state untouched.
            k1 = (y_new == unprojected) ? k7 : rhs(t, y);
            emit_reached();
            const double factor = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
            // A landing step may be artificially short; do not let it shrink the next step.
            h = std::max(lands ? h : step, step * factor);
            h = std::min(h, cfg.h_max);
        } else {
            const double factor = finite ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
            h = step * factor;
            if (h < cfg.h_min) {
                if (!finite) detail::check_finite(y_new, t_new);
                throw IntegrationError("step size underflow at t = " + std::to_string(t));
            }
        }
    }
    return out;
}

/// Hourly grid t0, t0+1, ..., up to and including floor(t_end).
inline std::vector<double> hourly_grid(double t0, double t_end) {
    std::vector<double> g;
    for (double t = t0; t <= t_end; t += 1.0) g.push_back(t);
    return g;
}

}  // namespace seedopt
