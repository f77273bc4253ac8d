#pragma once

#include "rpst/integrator.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rpst {

/// Per-step mean-square contraction rates of the theta scheme and of the exact flow.
struct ContractionConstants {
    // max of the three branches; lies in [0, 1) on the valid domain
    double c_delta = 0.0;
    std::array<double, 3> branches{};
    // exp(2 (L_f - lambda) dt)
    double exact_rate = 0.0;
};

/**
 * C_dt = max{ 1 - 2(lambda - L_f) theta dt / (1 + 2(lambda - L_f) theta dt),
 *             1 - (p* - 2) / (2 (p* - 1) theta),
 *             1 - (2 theta - 1) / theta^2 }.
 * Requires 0 < L_f < lambda, theta in (1/2, 1], p* > 2, dt in (0, 1].
 */
ContractionConstants contraction_constant(double lambda, double l_f, double theta, double pstar, double dt);

ContractionConstants contraction_constant(const SdeProblem& problem, const ThetaScheme& scheme);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least squares of log2(error) on log2(stepsize).
SlopeFit fit_slope(std::span<const double> stepsizes, std::span<const double> errors);

struct MsErrorConfig {
    double theta = 1.0;
    std::vector<int> levels;     // coarse levels, dt = 2^-level
    int reference_level = 12;
    std::size_t ensemble = 200;
    double t_start = -4.0;
    double t_end = 4.0;
    std::uint64_t seed = 0;
    std::optional<Vector> xi;    // defaults to the origin
    double newton_tol = 1e-5;
    bool sup_diagnostic = false; // also measure the rms of the sup-over-grid error
    int jobs = 1;
};

struct ConvergenceReport {
    std::vector<int> levels;
    std::vector<double> stepsizes;   // strictly decreasing
    std::vector<double> rms_errors;  // at t_end
    std::vector<double> stderrs;     // delta-method standard error of each rms error
    std::vector<double> sup_rms_errors; // filled when sup_diagnostic is set
    double fitted_slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    std::size_t ensemble_size = 0;
    int reference_level = 0;
    double theta = 0.0;
};

/**
 * Strong error at t_end of the theta scheme at each coarse level against the
 * same scheme at reference_level, all driven by the restriction of one fine
 * Brownian path per ensemble member. A failed Newton solve aborts the run.
 * The slope is fitted when there are at least two levels with positive errors.
 */
ConvergenceReport ms_error(const SdeProblem& problem, const MsErrorConfig& config);

struct MomentSeries {
    std::vector<double> times;
    std::vector<double> second_moment;
    std::vector<double> stderrs;
    double early_mean = 0.0; // first quarter after burn-in
    double late_mean = 0.0;  // last quarter
    bool growth_flag = false;
};

/// Monte-Carlo E|X_j|^2 along the pull-back from -k tau to 0.
MomentSeries moment_monitor(const SdeProblem& problem, const ThetaScheme& scheme, int k, std::size_t ensemble,
                            std::uint64_t seed, const Vector& xi, int jobs = 1);

struct ContractionTestResult {
    ContractionConstants constants;
    std::vector<double> times;
    std::vector<double> mean_sq_diff; // E|X_j - Y_j|^2
    std::vector<double> envelope;     // safety * mean_sq_diff[0] * C_dt^j
    double safety = 10.0;
    double floor = 1e-12;
    std::size_t checked_steps = 0;    // steps with mean_sq_diff >= floor
    bool reached_floor = false;
    bool dominated = false;
    bool passed = false;
};

/// Two paired-noise ensembles from xi and eta, compared against the C_dt^j envelope.
ContractionTestResult numerical_contraction_test(const SdeProblem& problem, const ThetaScheme& scheme,
                                                 const Vector& xi, const Vector& eta, int k, std::size_t ensemble,
                                                 std::uint64_t seed, int jobs = 1, double safety = 10.0,
                                                 double floor = 1e-12);

} // namespace rpst
