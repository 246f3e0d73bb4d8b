#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qeuclid {

/// Broad failure classes. The command-line tool maps each class to a
/// distinct exit status.
enum class ErrorKind {
    Precondition,  ///< caller supplied data outside the documented domain
    Numeric,       ///< a computation produced non-finite or unusable values
    Divergence,    ///< an iteration failed to contract
    Config,        ///< malformed or unknown experiment configuration
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Unsupported geometry, bad exponent, negative time and similar.
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorKind::Precondition, "domain error: " + w) {}
};

/// Grids or operators whose shapes do not fit together.
struct ShapeError : Error {
    explicit ShapeError(const std::string& w) : Error(ErrorKind::Precondition, "shape error: " + w) {}
};

/// Sector of the complex plane where the requested estimate does not hold.
struct SectorError : Error {
    explicit SectorError(const std::string& w) : Error(ErrorKind::Precondition, "sector error: " + w) {}
};

/// Hypotheses of a global existence statement are not met.
struct HypothesisError : Error {
    explicit HypothesisError(const std::string& w) : Error(ErrorKind::Precondition, "hypothesis error: " + w) {}
};

/// A symbol violates the structural assumption required by a bound.
struct AssumptionError : Error {
    explicit AssumptionError(const std::string& w)
        : Error(ErrorKind::Precondition, "assumption violation: " + w) {}
};

/// The admissible window for an existence time is empty.
struct EmptyWindowError : Error {
    explicit EmptyWindowError(const std::string& w) : Error(ErrorKind::Precondition, "empty window: " + w) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& w) : Error(ErrorKind::Numeric, "numeric error: " + w) {}
};

struct CalibrationError : Error {
    explicit CalibrationError(const std::string& w) : Error(ErrorKind::Numeric, "calibration error: " + w) {}
};

/// The requested accuracy could not be reached. `achieved` carries the best
/// error bound that was obtained.
struct AccuracyError : Error {
    AccuracyError(const std::string& w, double achieved_bound)
        : Error(ErrorKind::Numeric, "accuracy error: " + w), achieved(achieved_bound) {}
    double achieved;
};

struct DivergenceError : Error {
    DivergenceError(const std::string& w, std::vector<double> ratios)
        : Error(ErrorKind::Divergence, "divergence: " + w), ratio_history(std::move(ratios)) {}
    std::vector<double> ratio_history;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, "config error: " + w) {}
};

}  // namespace qeuclid
