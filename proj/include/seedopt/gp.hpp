#pragma once

// Gaussian-process regression with a squared-exponential ARD kernel.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace seedopt {

struct GpHyperparams {
    std::vector<double> lengthscales;  // normalized input units, one per dimension
    double signal_variance = 1.0;
    double noise_variance = 1e-6;

    void validate(std::size_t dims) const;
};

struct GpBounds {
    double lengthscale_min = 1e-2, lengthscale_max = 1e2;
    double signal_min = 1e-4, signal_max = 1e4;
    double noise_min = 1e-8, noise_max = 1.0;
};

struct GpFitOptions {
    int restarts = 10;
    std::uint64_t seed = 1;
    bool ard = true;                  // false: one shared lengthscale
    bool normalize_inputs = true;     // affine map to [0, 1] per dimension
    bool standardize_outputs = true;  // zero mean, unit SD
    // Per-dimension (lower, upper) used for input normalization instead of the data range.
    std::optional<std::vector<std::pair<double, double>>> input_bounds;
    GpBounds bounds;
    int max_evaluations_per_start = 400;
};

struct GpPrediction {
    double mean = 0.0;
    double variance = 0.0;
};

double kernel_se(const std::vector<double>& a, const std::vector<double>& b, const GpHyperparams& h);

/// Log marginal likelihood of already normalized data; -inf if the Gram matrix cannot be factorized.
double log_marginal_likelihood(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                               const GpHyperparams& h);

class GpModel {
public:
    /// Fit hyperparameters by multi-start Nelder-Mead on the log marginal likelihood.
    static GpModel fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                       const GpFitOptions& opts = {});
    /// Condition on data with fixed hyperparameters (given in normalized/standardized units).
    static GpModel with_hyperparams(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                                    const GpHyperparams& h, const GpFitOptions& opts = {});

    /// Posterior in original output units. The variance includes the noise term unless
    /// include_noise is false.
    GpPrediction predict(const std::vector<double>& x, bool include_noise = true) const;

    const GpHyperparams& hyperparams() const { return hyper_; }
    double log_marginal_likelihood() const { return lml_; }
    bool degenerate() const { return degenerate_; }
    double jitter() const { return jitter_; }
    std::size_t size() const { return y_raw_.size(); }
    std::size_t dims() const { return scale_.size(); }
    double output_mean() const { return y_mean_; }
    double output_sd() const { return y_sd_; }

    std::vector<double> normalize(const std::vector<double>& x) const;
    std::string to_json(int indent = 2) const;

private:
    GpModel() = default;
    void prepare(const std::vector<std::vector<double>>& X, const std::vector<double>& y, const GpFitOptions& opts);
    void condition();

    std::vector<std::vector<double>> X_raw_;
    std::vector<double> y_raw_;
    std::vector<std::vector<double>> X_;  // normalized
    Eigen::VectorXd y_;                   // standardized
    std::vector<double> offset_, scale_;
    double y_mean_ = 0.0, y_sd_ = 1.0;
    GpHyperparams hyper_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
    double lml_ = 0.0;
    double jitter_ = 0.0;
    bool degenerate_ = false;
};

}  // namespace seedopt
