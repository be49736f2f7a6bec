#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace seedopt {

/// Step-size underflow, non-finite state or a projection failure during integration.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No hour in the passaging window reaches the required transfer density.
class ThresholdUnreachable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A front point is worse than the hypervolume reference point in some objective.
class PointOutsideRef : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid run configuration. `path()` is the dotted path of the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// The black-box objective failed; carries the design point that was being evaluated.
class ObjectiveEvaluationError : public std::runtime_error {
public:
    ObjectiveEvaluationError(std::vector<double> x, const std::string& message)
        : std::runtime_error(message), x_(std::move(x)) {}
    const std::vector<double>& x() const { return x_; }

private:
    std::vector<double> x_;
};

}  // namespace seedopt
