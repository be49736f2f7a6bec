#include "seedopt/kinetics.hpp"

#include "seedopt/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace seedopt {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

double monod(double c, double K) {
    const double denom = c + K;
    return denom > 0.0 ? c / denom : 0.0;
}

// Inhibition-style factor K/(K + c); 1 at zero concentration.
double starvation(double c, double K) {
    const double denom = K + c;
    return denom > 0.0 ? K / denom : 1.0;
}

struct Kinetics {
    double mu;
    double mu_d;
    SpecificRates q;
};

double growth_rate(double t, double glc, double gln, const ModelParameters& p) {
    double mu = p.mu_max * monod(glc, p.K_S_Glc) * monod(gln, p.K_S_Gln);
    if (p.t_Lag > 0.0 && t <= p.t_Lag) {
        mu -= (1.0 - t / p.t_Lag) * p.a_Lag * p.mu_max;
    }
    return std::max(mu, 0.0);
}

double death_rate(double glc, double gln, const ModelParameters& p) {
    return p.mu_d_min + p.mu_d_max * starvation(glc, p.K_S_Glc) * starvation(gln, p.K_S_Gln);
}

Kinetics evaluate(double t, double glc, double gln, double lac, double amm,
                  const ModelParameters& p) {
    Kinetics k{};
    k.mu = growth_rate(t, glc, gln, p);
    k.mu_d = death_rate(glc, gln, p);

    SpecificRates& q = k.q;
    q.q_Glc = p.q_Glc_max * monod(glc, p.k_Glc);
    q.q_Gln = p.q_Gln_max * monod(gln, p.k_Gln);

    const double growth_deficit = p.mu_max > 0.0 ? (p.mu_max - k.mu) / p.mu_max : 0.0;
    const double ku = p.uptake_saturation;

    const double lac_uptake = glc <= p.glc_switch_threshold ? p.q_Lac_uptake_max : 0.0;
    const double lac_avail = ku > 0.0 ? monod(std::max(lac, 0.0), ku) : 1.0;
    q.q_Lac = p.Y_Lac_Glc * q.q_Glc * glc / std::max(lac, kConcentrationGuard) -
              lac_uptake * growth_deficit * lac_avail;

    if (gln > amm) {
        q.K_Amm = 0.0;
    } else if (k.mu > k.mu_d) {
        q.K_Amm = 1.0;
    } else {
        q.K_Amm = -p.k_Amm;
    }
    // Only the consuming branch (K_Amm > 0) is limited by availability.
    const double amm_avail = (ku > 0.0 && q.K_Amm > 0.0) ? monod(std::max(amm, 0.0), ku) : 1.0;
    q.q_Amm = p.Y_Amm_Gln * q.q_Gln * gln / std::max(amm, kConcentrationGuard) -
              q.K_Amm * p.q_Amm_uptake_max * growth_deficit * amm_avail;

    q.q_titer = p.q_titer_max;
    return k;
}

StateArray derivatives(double t, const StateArray& y, const ModelParameters& p,
                       const FeedRates& f) {
    const double V = y[kVolume];
    if (!(V > 0.0)) {
        StateArray nan;
        nan.fill(std::numeric_limits<double>::quiet_NaN());
        return nan;
    }
    const double Xv = y[kXv];
    const Kinetics k = evaluate(t, y[kGlc], y[kGln], y[kLac], y[kAmm], p);
    const double dilution = (f.F_Glc + f.F_Gln + f.F_Medium) / V;

    StateArray d{};
    d[kXv] = Xv * (k.mu - k.mu_d) - dilution * Xv;
    d[kXt] = Xv * k.mu - p.K_Lys * (y[kXt] - Xv) - dilution * y[kXt];
    d[kGlc] = -Xv * k.q.q_Glc + f.F_Glc / V * f.c_Glc_F + f.F_Medium / V * f.c_Glc_Medium -
              dilution * y[kGlc];
    d[kGln] = -Xv * k.q.q_Gln + f.F_Gln / V * f.c_Gln_F + f.F_Medium / V * f.c_Gln_Medium -
              dilution * y[kGln];
    d[kLac] = Xv * k.q.q_Lac - dilution * y[kLac];
    d[kAmm] = Xv * k.q.q_Amm - dilution * y[kAmm];
    d[kTiter] = Xv * k.q.q_titer - dilution * y[kTiter];
    d[kVolume] = -f.F_sample + f.F_Glc + f.F_Gln + f.F_Medium;
    return d;
}

}  // namespace

void ModelParameters::validate() const {
    require(mu_max >= 0.0, "mu_max must be >= 0");
    require(mu_d_min >= 0.0, "mu_d_min must be >= 0");
    require(mu_d_max >= 0.0, "mu_d_max must be >= 0");
    require(K_S_Glc >= 0.0, "K_S_Glc must be >= 0");
    require(K_S_Gln >= 0.0, "K_S_Gln must be >= 0");
    require(k_Glc >= 0.0, "k_Glc must be >= 0");
    require(k_Gln >= 0.0, "k_Gln must be >= 0");
    require(q_Glc_max >= 0.0, "q_Glc_max must be >= 0");
    require(q_Gln_max >= 0.0, "q_Gln_max must be >= 0");
    require(Y_Lac_Glc >= 0.0, "Y_Lac_Glc must be >= 0");
    require(Y_Amm_Gln >= 0.0, "Y_Amm_Gln must be >= 0");
    require(q_Lac_uptake_max >= 0.0, "q_Lac_uptake_max must be >= 0");
    require(q_Amm_uptake_max >= 0.0, "q_Amm_uptake_max must be >= 0");
    require(k_Amm >= 0.0, "k_Amm must be >= 0");
    require(K_Lys >= 0.0, "K_Lys must be >= 0");
    require(q_titer_max >= 0.0, "q_titer_max must be >= 0");
    require(t_Lag >= 0.0, "t_Lag must be >= 0");
    require(a_Lag >= 0.0 && a_Lag <= 1.0, "a_Lag must lie in [0, 1]");
    require(glc_switch_threshold >= 0.0, "glc_switch_threshold must be >= 0");
    require(uptake_saturation >= 0.0, "uptake_saturation must be >= 0");
}

StateArray CultureState::to_array() const {
    return {Xv, Xt, c_Glc, c_Gln, c_Lac, c_Amm, c_titer, V};
}

CultureState CultureState::from_array(double t, const StateArray& y) {
    return {t, y[kXv], y[kXt], y[kGlc], y[kGln], y[kLac], y[kAmm], y[kTiter], y[kVolume]};
}

void CultureState::validate() const {
    require(Xv >= 0.0, "Xv must be >= 0");
    require(Xt >= Xv, "Xt must be >= Xv");
    require(c_Glc >= 0.0 && c_Gln >= 0.0 && c_Lac >= 0.0 && c_Amm >= 0.0 && c_titer >= 0.0,
            "concentrations must be >= 0");
    require(V > 0.0, "V must be > 0");
}

FeedSchedule::FeedSchedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
    std::sort(segments_.begin(), segments_.end(),
              [](const Segment& a, const Segment& b) { return a.t_start < b.t_start; });
    for (const auto& s : segments_) {
        const auto& r = s.rates;
        require(r.F_Glc >= 0.0 && r.F_Gln >= 0.0 && r.F_Medium >= 0.0 && r.F_sample >= 0.0,
                "feed flow rates must be >= 0");
    }
}

FeedRates FeedSchedule::at(double t) const {
    FeedRates active{};
    for (const auto& s : segments_) {
        if (s.t_start > t) break;
        active = s.rates;
    }
    return active;
}

bool FeedSchedule::is_batch() const {
    return std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) {
        const auto& r = s.rates;
        return r.F_Glc == 0.0 && r.F_Gln == 0.0 && r.F_Medium == 0.0 && r.F_sample == 0.0;
    });
}

double specific_growth_rate(const CultureState& s, const ModelParameters& p) {
    return growth_rate(s.t, s.c_Glc, s.c_Gln, p);
}

double specific_death_rate(const CultureState& s, const ModelParameters& p) {
    return death_rate(s.c_Glc, s.c_Gln, p);
}

SpecificRates uptake_and_production_rates(const CultureState& s, const ModelParameters& p) {
    return evaluate(s.t, s.c_Glc, s.c_Gln, s.c_Lac, s.c_Amm, p).q;
}

StateArray ode_rhs(const CultureState& s, const ModelParameters& p, const FeedSchedule& feeds) {
    return derivatives(s.t, s.to_array(), p, feeds.at(s.t));
}

StateArray batch_rhs(double t, const StateArray& y, const ModelParameters& p) {
    return derivatives(t, y, p, FeedRates{});
}

void project_nonnegative(StateArray& y, const StateArray& previous) {
    for (std::size_t i = 0; i < kStateSize; ++i) {
        if (y[i] >= 0.0) continue;
        const double scale = std::max(1.0, std::abs(previous[i]));
        if (y[i] > -1e-9 * scale) {
            y[i] = 0.0;
        } else {
            throw IntegrationError("state component " + std::string(kStateNames[i]) +
                                   " went negative (" + std::to_string(y[i]) + ")");
        }
    }
}

}  // namespace seedopt
