#pragma once

#include "rpst/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>

namespace rpst {

using DriftFn = std::function<Vector(double t, const Vector& x)>;
using JacobianFn = std::function<Matrix(double t, const Vector& x)>;
using DiffusionFn = std::function<Matrix(double t, const Vector& x)>;

/**
 * Semi-linear dissipative SDE
 *
 *   dX = (-A X + f(t, X)) dt + g(t, X) dW,
 *
 * with A symmetric positive definite, f and g periodic in t with period tau.
 * The dissipativity constants (one-sided Lipschitz constant of the drift
 * plus noise, moment exponent, growth exponent) travel with the problem so
 * analysis routines can evaluate theoretical rates.
 *
 * Instances are immutable once built; the callables must not carry shared
 * mutable state, so a problem may be evaluated from many threads at once.
 */
struct SdeProblem {
    int state_dim = 1;
    int noise_dim = 1;
    Matrix linear_matrix;
    double lambda_min = 0.0;
    DriftFn drift;
    JacobianFn drift_jacobian;
    DiffusionFn diffusion;
    double period = 1.0;
    double one_sided_lipschitz = 0.0;
    double moment_exponent = 0.0;
    double growth_exponent = 1.0;

    /// Time reduced into [0, period).
    double phase(double t) const;
};

/// Validates the structural assumptions on A, tau, L_f, p*, gamma; throws ParameterError.
void validate(const SdeProblem& problem);

enum class ModelKind { cubic_multiplicative, additive_sine, linear_ou };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ModelCatalogEntry {
    ModelKind kind;
    SdeProblem problem;
    std::map<std::string, double> parameters;
    bool has_exact_step = false;

    std::string name() const { return to_string(kind); }
};

/// dX = (-lambda X - a X^3 (1 + sin(pi t))) dt + (b + c X + dcoef X^2 (1 + sin(pi t))) dW, tau = 2.
SdeProblem build_cubic_model(double lambda, double a, double b, double c, double dcoef, double pstar);

/// dX = (-10 pi X + sin(2 pi t)) dt + 0.05 dW, tau = 1.
SdeProblem build_additive_model();

/// Ornstein-Uhlenbeck process dX = -lambda X dt + sigma dW (f = 0), tau = 1.
SdeProblem build_linear_model(double lambda, double sigma);

/**
 * Builds a catalog model by name. Unspecified parameters take the defaults
 * of the published experiments (cubic: lambda = 5 pi, a = 3, b = 1.5,
 * c = 0.5, d = 0.1, p* = 21; linear: lambda = 1, sigma = 0.3). Unknown
 * parameter names are rejected.
 */
ModelCatalogEntry make_catalog_model(const std::string& name,
                                     const std::map<std::string, double>& overrides = {});

struct DissipativityReport {
    std::size_t samples = 0;
    std::size_t effective_samples = 0; // samples with x != y
    double max_ratio = 0.0;
    double bound = 0.0;
    bool passed = false;
};

/**
 * Samples (t, x, y) uniformly from [0, tau) x [-r, r]^d x [-r, r]^d and
 * evaluates
 *   (<x - y, f(t,x) - f(t,y)> + (p* - 1) |g(t,x) - g(t,y)|_F^2) / |x - y|^2.
 * Passes iff the maximum does not exceed L_f (1 + 1e-9).
 */
DissipativityReport check_dissipativity(const SdeProblem& problem, std::size_t sample_count,
                                        double box_radius, std::uint64_t rng_seed);

} // namespace rpst
