#pragma once

#include "rpst/integrator.hpp"

#include <cstdint>
#include <vector>

namespace rpst {

/// Start of the comparison range: every sup-type check skips the first two periods after a start.
inline constexpr double kBurnInPeriods = 2.0;

struct PullbackResult {
    int k_used = 0;
    double tolerance = 0.0;
    double t_eval = 0.0;
    // Ensemble sample of the numerical random periodic solution at t_eval
    // (the -(k_used + 1) tau pull-back).
    std::vector<Vector> states;
    bool converged = false;
    // L2 gap between the -k tau and -(k+1) tau pull-backs at t_eval.
    double l2_gap = 0.0;
    std::vector<double> gap_history; // gap_history[k-1] for k = 1..k_used
};

/**
 * Pull-back iteration at a fixed evaluation time. Ensemble member i is driven
 * by path_index i of seed; windows grow leftward with k, so consecutive k
 * share the same noise on their common window. Stops at the first k whose L2
 * gap is <= tolerance; throws ConvergenceError after k_max.
 */
PullbackResult pullback_converge(const SdeProblem& problem, const ThetaScheme& scheme, double t_eval,
                                 const Vector& xi, double tolerance, int k_max, std::size_t ensemble,
                                 std::uint64_t seed, int jobs = 1);

struct IndependenceReport {
    std::vector<Vector> initial_values;
    std::vector<PathSolution> paths;
    double compare_from = 0.0;
    double max_distance = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

/// Paths from several initial values under one shared noise path, compared after the burn-in.
IndependenceReport initial_value_independence(const SdeProblem& problem, const ThetaScheme& scheme,
                                              const std::vector<Vector>& xis, int k, std::uint64_t seed,
                                              double threshold = 1e-3, std::uint64_t path_index = 0);

struct ShiftedPeriodicityReport {
    double shift = 0.0;
    std::vector<double> times;        // t in the comparison window
    std::vector<Vector> original;     // X_t(omega)
    std::vector<Vector> shifted;      // X_{t - shift}(Theta_shift omega)
    double max_gap = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

/**
 * Compares X^{-k tau}_t(omega, xi) for t in window against
 * X^{-k tau}_{t - shift}(Theta_shift omega, xi). For the random periodic
 * solution X*_{s}(Theta_tau omega) = X*_{s + tau}(omega), so the two curves
 * agree once both pull-backs have converged. shift must be a multiple of tau.
 */
ShiftedPeriodicityReport periodicity_check_shifted(const SdeProblem& problem, const ThetaScheme& scheme, int k,
                                                   const Vector& xi, TimeWindow window, std::uint64_t seed,
                                                   double threshold = 1e-2, std::uint64_t path_index = 0);

ShiftedPeriodicityReport periodicity_check_shifted(const SdeProblem& problem, const ThetaScheme& scheme, int k,
                                                   const Vector& xi, TimeWindow window, std::uint64_t seed,
                                                   double shift, double threshold, std::uint64_t path_index);

struct PullbackPeriodicityReport {
    std::vector<double> times;
    std::vector<Vector> curve; // X^0(t, Theta_{-t} omega)
    double max_deviation = 0.0; // max |curve(t + tau) - curve(t)| for t in [tau, horizon - tau]
    bool deviation_defined = false;
    double threshold = 0.0;
    bool passed = false;
};

/// Evaluates t -> X^0(t, Theta_{-t} omega, x0) on [0, horizon]; one full run per grid time.
PullbackPeriodicityReport periodicity_check_pullback(const SdeProblem& problem, const ThetaScheme& scheme,
                                                     const Vector& x0, double horizon, std::uint64_t seed,
                                                     double threshold = 1e-2, std::uint64_t path_index = 0,
                                                     int jobs = 1);

} // namespace rpst
