#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace rpst {

// State and noise dimensions are small (desk scale); bounded fixed-capacity
// storage keeps per-step Eigen temporaries off the heap.
inline constexpr int kMaxDim = 10;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// A model or scheme parameter violates a documented constraint.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A requested time interval is not aligned with, or not covered by, a noise grid.
class WindowError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// The implicit stage equation could not be solved.
class NewtonError : public std::runtime_error {
public:
    NewtonError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// An iterative procedure ran out of its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_gap)
        : std::runtime_error(what), last_gap_(last_gap) {}

    double last_gap() const noexcept { return last_gap_; }

private:
    double last_gap_;
};

inline Vector constant_vector(int dim, double value) {
    return Vector::Constant(dim, value);
}

} // namespace rpst
