#pragma once

#include "rpst/model.hpp"
#include "rpst/noise.hpp"

#include <cstdint>
#include <vector>

namespace rpst {

/// Stochastic theta method parameters; theta in (1/2, 1], dt in (0, 1).
struct ThetaScheme {
    double theta = 1.0;
    double dt = 0.1;
    // Euclidean norm of the stage residual at acceptance.
    double newton_tol = 1e-5;
    int newton_max_iter = 50;

    void validate() const;
};

struct NewtonOutcome {
    Vector y;
    int iterations = 0;
    double residual = 0.0;
};

/**
 * Solves y - theta dt (-A y + f(t_next, y)) = rhs by Newton's method with
 * Jacobian I + theta dt A - theta dt df/dx, starting from guess. A step that
 * does not reduce the residual is halved (at most 30 times). Once the
 * residual meets newton_tol one further correction is applied, so results
 * sit well below the tolerance and do not depend on the iteration count.
 *
 * Throws NewtonError on non-convergence or a non-finite iterate.
 */
NewtonOutcome solve_implicit(const SdeProblem& problem, const ThetaScheme& scheme, double t_next,
                             const Vector& rhs, const Vector& guess);

Vector implicit_step(const SdeProblem& problem, const ThetaScheme& scheme, double t_next, const Vector& rhs,
                     const Vector& guess);

/// One theta step from (t_j, x_j) with Brownian increment dW; times are taken mod tau.
NewtonOutcome step_with_stats(const SdeProblem& problem, const ThetaScheme& scheme, double t_j, const Vector& x_j,
                              const Vector& dW);

Vector step(const SdeProblem& problem, const ThetaScheme& scheme, double t_j, const Vector& x_j, const Vector& dW);

/// Closed-form theta step for dX = -lambda X dt + sigma dW.
double exact_linear_step(double lambda, double sigma, const ThetaScheme& scheme, double x, double dW);

struct PathSolution {
    double start_time = 0.0;
    std::vector<double> times;
    std::vector<Vector> states;
    ThetaScheme scheme;
    // newton_iters[j] is the iteration count of the step that produced states[j]; 0 for the start.
    std::vector<int> newton_iters;

    std::size_t size() const { return times.size(); }
};

/**
 * Integrates from start_time with state xi up to horizon on the grid
 * start_time + j dt, drawing increments from noise. Both ends must be grid
 * aligned and tau / dt must be an integer.
 */
PathSolution simulate(const SdeProblem& problem, const ThetaScheme& scheme, double start_time, double horizon,
                      const Vector& xi, const NoiseView& noise);

/// Pull-back trajectory started at -k tau.
PathSolution simulate_path(const SdeProblem& problem, const ThetaScheme& scheme, int k, double horizon,
                           const Vector& xi, const NoiseView& noise);

/// Same recursion as simulate() but only keeps the state at horizon.
Vector integrate_to(const SdeProblem& problem, const ThetaScheme& scheme, double start_time, double horizon,
                    const Vector& xi, const NoiseView& noise);

/// Per-step amplification (1 - (1-theta) lambda dt) / (1 + theta lambda dt) of the linear scheme.
double linear_amplification(double lambda, const ThetaScheme& scheme);

} // namespace rpst
