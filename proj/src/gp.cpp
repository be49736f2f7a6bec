#include "seedopt/gp.hpp"

#include "seedopt/nelder_mead.hpp"
#include "seedopt/random.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace seedopt {

namespace {

constexpr double kJitterLadder[] = {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};

// Squared coordinate differences, one n x n matrix per input dimension.
std::vector<Eigen::MatrixXd> squared_differences(const std::vector<std::vector<double>>& X) {
    const std::size_t n = X.size();
    const std::size_t dims = n ? X[0].size() : 0;
    std::vector<Eigen::MatrixXd> out(dims, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                                   static_cast<Eigen::Index>(n)));
    for (std::size_t d = 0; d < dims; ++d) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double diff = X[i][d] - X[j][d];
                out[d](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = diff * diff;
                out[d](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = diff * diff;
            }
        }
    }
    return out;
}

Eigen::MatrixXd gram(const std::vector<Eigen::MatrixXd>& sq, std::size_t n, const GpHyperparams& h) {
    Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t d = 0; d < sq.size(); ++d) {
        const double l = h.lengthscales[d];
        r2 += sq[d] / (l * l);
    }
    return h.signal_variance * (-0.5 * r2.array()).exp().matrix();
}

// Factorize K + (noise + jitter) I, escalating the jitter on failure.
bool factorize(const Eigen::MatrixXd& K, double noise, Eigen::LLT<Eigen::MatrixXd>& llt, double& jitter) {
    for (double j : kJitterLadder) {
        Eigen::MatrixXd A = K;
        A.diagonal().array() += noise + j;
        llt.compute(A);
        if (llt.info() == Eigen::Success) {
            jitter = j;
            return true;
        }
    }
    return false;
}

double lml_from(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& y) {
    const Eigen::VectorXd a = llt.solve(y);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * y.dot(a) - 0.5 * log_det -
           0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
}

double lml_eval(const std::vector<Eigen::MatrixXd>& sq, const Eigen::VectorXd& y, const GpHyperparams& h) {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
    if (!factorize(gram(sq, static_cast<std::size_t>(y.size()), h), h.noise_variance, llt, jitter)) {
        return -std::numeric_limits<double>::infinity();
    }
    return lml_from(llt, y);
}

// Optimization vector: log lengthscale(s), log signal variance, log noise variance.
GpHyperparams unpack(const std::vector<double>& v, std::size_t dims, bool ard, const GpBounds& b) {
    GpHyperparams h;
    h.lengthscales.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        h.lengthscales[d] = std::clamp(std::exp(v[ard ? d : 0]), b.lengthscale_min, b.lengthscale_max);
    }
    const std::size_t k = ard ? dims : 1;
    h.signal_variance = std::clamp(std::exp(v[k]), b.signal_min, b.signal_max);
    h.noise_variance = std::clamp(std::exp(v[k + 1]), b.noise_min, b.noise_max);
    return h;
}

}  // namespace

void GpHyperparams::validate(std::size_t dims) const {
    if (lengthscales.size() != dims) throw std::invalid_argument("gp: one lengthscale per input dimension required");
    for (double l : lengthscales) {
        if (!(l > 0.0)) throw std::invalid_argument("gp: lengthscales must be > 0");
    }
    if (!(signal_variance > 0.0) || !(noise_variance > 0.0)) {
        throw std::invalid_argument("gp: variances must be > 0");
    }
}

double kernel_se(const std::vector<double>& a, const std::vector<double>& b, const GpHyperparams& h) {
    if (a.size() != b.size() || a.size() != h.lengthscales.size()) {
        throw std::invalid_argument("kernel_se: dimension mismatch");
    }
    double r2 = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double z = (a[d] - b[d]) / h.lengthscales[d];
        r2 += z * z;
    }
    return h.signal_variance * std::exp(-0.5 * r2);
}

double log_marginal_likelihood(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                               const GpHyperparams& h) {
    if (X.size() != y.size() || X.empty()) throw std::invalid_argument("log_marginal_likelihood: size mismatch");
    h.validate(X[0].size());
    return lml_eval(squared_differences(X), Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())), h);
}

void GpModel::prepare(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                      const GpFitOptions& opts) {
    if (X.size() != y.size()) throw std::invalid_argument("gp: |X| != |y|");
    if (X.empty()) throw std::invalid_argument("gp: no training data");
    const std::size_t dims = X[0].size();
    if (dims == 0) throw std::invalid_argument("gp: zero-dimensional inputs");
    for (const auto& x : X) {
        if (x.size() != dims) throw std::invalid_argument("gp: inconsistent input dimensions");
        for (double v : x) {
            if (!std::isfinite(v)) throw std::invalid_argument("gp: non-finite input");
        }
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw std::invalid_argument("gp: non-finite output");
    }
    X_raw_ = X;
    y_raw_ = y;

    offset_.assign(dims, 0.0);
    scale_.assign(dims, 1.0);
    if (opts.normalize_inputs) {
        for (std::size_t d = 0; d < dims; ++d) {
            double lo, hi;
            if (opts.input_bounds) {
                if (opts.input_bounds->size() != dims) throw std::invalid_argument("gp: input_bounds size mismatch");
                lo = (*opts.input_bounds)[d].first;
                hi = (*opts.input_bounds)[d].second;
            } else {
                lo = hi = X[0][d];
                for (const auto& x : X) {
                    lo = std::min(lo, x[d]);
                    hi = std::max(hi, x[d]);
                }
            }
            offset_[d] = lo;
            scale_[d] = hi > lo ? hi - lo : 1.0;
        }
    }
    X_.clear();
    for (const auto& x : X) X_.push_back(normalize(x));

    const double n = static_cast<double>(y.size());
    double mean = 0.0;
    for (double v : y) mean += v / n;
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double sd = y.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    degenerate_ = std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
    y_mean_ = opts.standardize_outputs ? mean : 0.0;
    y_sd_ = (opts.standardize_outputs && sd > 0.0) ? sd : 1.0;
    if (degenerate_) y_mean_ = y.front();
    y_.resize(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) y_(static_cast<Eigen::Index>(i)) = (y[i] - y_mean_) / y_sd_;
}

void GpModel::condition() {
    const std::size_t n = X_.size();
    const auto sq = squared_differences(X_);
    if (!factorize(gram(sq, n, hyper_), hyper_.noise_variance, llt_, jitter_)) {
        throw std::runtime_error("gp: Gram matrix not positive definite even with jitter 1e-6");
    }
    alpha_ = llt_.solve(y_);
    lml_ = lml_from(llt_, y_);
}

GpModel GpModel::with_hyperparams(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                                  const GpHyperparams& h, const GpFitOptions& opts) {
    GpModel m;
    m.prepare(X, y, opts);
    h.validate(m.dims());
    m.hyper_ = h;
    m.condition();
    return m;
}

GpModel GpModel::fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                     const GpFitOptions& opts) {
    if (opts.restarts < 1) throw std::invalid_argument("gp: restarts must be >= 1");
    GpModel m;
    m.prepare(X, y, opts);
    const std::size_t dims = m.dims();
    const GpBounds& b = opts.bounds;

    if (m.degenerate_) {
        m.hyper_.lengthscales.assign(dims, 1.0);
        m.hyper_.signal_variance = 1.0;
        m.hyper_.noise_variance = b.noise_min;
        m.condition();
        return m;
    }

    const auto sq = squared_differences(m.X_);
    const std::size_t k = opts.ard ? dims : 1;
    auto objective = [&](const std::vector<double>& v) {
        return -lml_eval(sq, m.y_, unpack(v, dims, opts.ard, b));
    };

    Rng rng(derive_seed(opts.seed, 0x6770));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return std::log(lo) + u(rng) * (std::log(hi) - std::log(lo)); };

    NelderMeadOptions nm;
    nm.max_evaluations = opts.max_evaluations_per_start;
    std::vector<double> best_v;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < opts.restarts; ++r) {
        std::vector<double> v0(k + 2);
        if (r == 0) {
            std::fill(v0.begin(), v0.begin() + static_cast<std::ptrdiff_t>(k), std::log(0.5));
            v0[k] = 0.0;
            v0[k + 1] = std::log(1e-3);
        } else {
            for (std::size_t d = 0; d < k; ++d) v0[d] = log_uniform(0.05, 5.0);
            v0[k] = log_uniform(0.1, 10.0);
            v0[k + 1] = log_uniform(1e-6, 0.1);
        }
        const NelderMeadResult res = nelder_mead(objective, v0, nm);
        if (res.value < best) {
            best = res.value;
            best_v = res.x;
        }
    }
    if (!std::isfinite(best)) throw std::runtime_error("gp: likelihood optimization failed at every start");
    m.hyper_ = unpack(best_v, dims, opts.ard, b);
    m.condition();
    return m;
}

std::vector<double> GpModel::normalize(const std::vector<double>& x) const {
    if (x.size() != scale_.size()) throw std::invalid_argument("gp: query dimension mismatch");
    std::vector<double> z(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) z[d] = (x[d] - offset_[d]) / scale_[d];
    return z;
}

GpPrediction GpModel::predict(const std::vector<double>& x, bool include_noise) const {
    const std::vector<double> z = normalize(x);
    const auto n = static_cast<Eigen::Index>(X_.size());
    Eigen::VectorXd ks(n);
    for (Eigen::Index i = 0; i < n; ++i) ks(i) = kernel_se(z, X_[static_cast<std::size_t>(i)], hyper_);
    const double mean = ks.dot(alpha_);
    const Eigen::VectorXd v = llt_.matrixL().solve(ks);
    double var = hyper_.signal_variance - v.squaredNorm();
    if (include_noise) var += hyper_.noise_variance;
    var = std::max(var, 0.0);
    return {y_mean_ + y_sd_ * mean, var * y_sd_ * y_sd_};
}

std::string GpModel::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["lengthscales"] = hyper_.lengthscales;
    j["signal_variance"] = hyper_.signal_variance;
    j["noise_variance"] = hyper_.noise_variance;
    j["log_marginal_likelihood"] = lml_;
    j["jitter"] = jitter_;
    j["degenerate"] = degenerate_;
    j["input_offset"] = offset_;
    j["input_scale"] = scale_;
    j["output_mean"] = y_mean_;
    j["output_sd"] = y_sd_;
    j["X_train"] = X_raw_;
    j["y_train"] = y_raw_;
    return j.dump(indent);
}

}  // namespace seedopt
