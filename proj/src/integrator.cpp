#include "rpst/integrator.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace rpst {

namespace {

constexpr int kMaxHalvings = 30;

std::string str(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// F(y) = y + theta dt A y - theta dt f(t, y) - rhs
Vector residual(const SdeProblem& p, double h, double t, const Vector& y, const Vector& rhs) {
    return y + h * (p.linear_matrix * y) - h * p.drift(t, y) - rhs;
}

bool all_finite(const Vector& v) { return v.allFinite(); }

struct GridPlan {
    std::int64_t first = 0;     // absolute index of start_time on the dt grid
    std::int64_t steps = 0;
    std::int64_t per_period = 0; // tau / dt
};

GridPlan plan_grid(const SdeProblem& problem, const ThetaScheme& scheme, double start_time, double horizon,
                   const NoiseView& noise) {
    scheme.validate();
    if (!on_grid(problem.period, scheme.dt))
        throw ParameterError("period " + str(problem.period) + " is not an integer multiple of dt " + str(scheme.dt));
    GridPlan plan;
    plan.per_period = grid_index(problem.period, scheme.dt);
    plan.first = grid_index(start_time, scheme.dt);
    plan.steps = grid_index(horizon, scheme.dt) - plan.first;
    if (plan.steps < 0) throw WindowError("horizon precedes the start time");
    if (plan.steps > 0 && !noise.covers({start_time, horizon}))
        throw WindowError("noise window does not cover [" + str(start_time) + ", " + str(horizon) + "]");
    if (noise.noise_dim() != problem.noise_dim) throw ParameterError("noise dimension does not match the model");
    return plan;
}

// Time of grid point n reduced into [0, tau) by integer arithmetic, so points
// one period apart see bit-identical coefficient arguments.
double grid_phase(std::int64_t n, const GridPlan& plan, double dt) {
    std::int64_t r = n % plan.per_period;
    if (r < 0) r += plan.per_period;
    return static_cast<double>(r) * dt;
}

template <class Sink>
void run_steps(const SdeProblem& problem, const ThetaScheme& scheme, const GridPlan& plan, const Vector& xi,
               const NoiseView& noise, Sink&& sink) {
    Vector x = xi;
    for (std::int64_t j = 0; j < plan.steps; ++j) {
        const std::int64_t n = plan.first + j;
        const Vector dW = noise.increment(scheme.dt, n);
        NewtonOutcome out = step_with_stats(problem, scheme, grid_phase(n, plan, scheme.dt), x, dW);
        x = out.y;
        sink(n + 1, x, out.iterations);
    }
}

} // namespace

void ThetaScheme::validate() const {
    if (!(theta > 0.5 && theta <= 1.0)) throw ParameterError("theta must lie in (1/2, 1], got " + str(theta));
    if (!(dt > 0.0 && dt < 1.0)) throw ParameterError("dt must lie in (0, 1), got " + str(dt));
    if (!(newton_tol > 0.0)) throw ParameterError("newton_tol must be positive");
    if (newton_max_iter < 1) throw ParameterError("newton_max_iter must be at least 1");
}

NewtonOutcome solve_implicit(const SdeProblem& problem, const ThetaScheme& scheme, double t_next, const Vector& rhs,
                             const Vector& guess) {
    if (!all_finite(rhs)) throw NewtonError("non-finite right-hand side", std::numeric_limits<double>::quiet_NaN(), 0);
    const double h = scheme.theta * scheme.dt;
    const double t = problem.phase(t_next);
    const int d = problem.state_dim;
    const Matrix base_jac = Matrix::Identity(d, d) + h * problem.linear_matrix;

    NewtonOutcome out{guess, 0, 0.0};
    Vector r = residual(problem, h, t, out.y, rhs);
    out.residual = r.norm();
    bool polished = false;
    while (true) {
        if (!std::isfinite(out.residual))
            throw NewtonError("non-finite Newton residual", out.residual, out.iterations);
        if (out.residual <= scheme.newton_tol && (polished || out.residual == 0.0)) return out;
        if (out.iterations >= scheme.newton_max_iter) {
            if (out.residual <= scheme.newton_tol) return out;
            throw NewtonError("Newton did not converge in " + std::to_string(out.iterations) +
                                  " iterations (residual " + str(out.residual) + ")",
                              out.residual, out.iterations);
        }
        polished = out.residual <= scheme.newton_tol;

        const Matrix jac = base_jac - h * problem.drift_jacobian(t, out.y);
        const Vector delta = jac.partialPivLu().solve(-r);
        if (!all_finite(delta)) throw NewtonError("non-finite Newton update", out.residual, out.iterations);

        double scale = 1.0;
        Vector y_try = out.y + delta;
        Vector r_try = residual(problem, h, t, y_try, rhs);
        double norm_try = r_try.norm();
        for (int halving = 0; !(norm_try < out.residual) && !polished && halving < kMaxHalvings; ++halving) {
            scale *= 0.5;
            y_try = out.y + scale * delta;
            r_try = residual(problem, h, t, y_try, rhs);
            norm_try = r_try.norm();
        }
        ++out.iterations;
        if (polished && !(norm_try <= out.residual)) return out; // already at the rounding floor
        out.y = y_try;
        r = r_try;
        out.residual = norm_try;
    }
}

Vector implicit_step(const SdeProblem& problem, const ThetaScheme& scheme, double t_next, const Vector& rhs,
                     const Vector& guess) {
    return solve_implicit(problem, scheme, t_next, rhs, guess).y;
}

NewtonOutcome step_with_stats(const SdeProblem& problem, const ThetaScheme& scheme, double t_j, const Vector& x_j,
                              const Vector& dW) {
    if (!all_finite(x_j)) throw NewtonError("non-finite state", std::numeric_limits<double>::quiet_NaN(), 0);
    const double tj = problem.phase(t_j);
    const Vector explicit_drift = -(problem.linear_matrix * x_j) + problem.drift(tj, x_j);
    const Vector rhs = x_j + (1.0 - scheme.theta) * scheme.dt * explicit_drift + problem.diffusion(tj, x_j) * dW;
    NewtonOutcome out = solve_implicit(problem, scheme, tj + scheme.dt, rhs, x_j);
    if (!all_finite(out.y)) throw NewtonError("non-finite state after step", out.residual, out.iterations);
    return out;
}

Vector step(const SdeProblem& problem, const ThetaScheme& scheme, double t_j, const Vector& x_j, const Vector& dW) {
    return step_with_stats(problem, scheme, t_j, x_j, dW).y;
}

double exact_linear_step(double lambda, double sigma, const ThetaScheme& scheme, double x, double dW) {
    const double ld = lambda * scheme.dt;
    return (x * (1.0 - (1.0 - scheme.theta) * ld) + sigma * dW) / (1.0 + scheme.theta * ld);
}

double linear_amplification(double lambda, const ThetaScheme& scheme) {
    return exact_linear_step(lambda, 0.0, scheme, 1.0, 0.0);
}

PathSolution simulate(const SdeProblem& problem, const ThetaScheme& scheme, double start_time, double horizon,
                      const Vector& xi, const NoiseView& noise) {
    if (xi.size() != problem.state_dim) throw ParameterError("initial value has the wrong dimension");
    if (!all_finite(xi)) throw ParameterError("initial value must be finite");
    const GridPlan plan = plan_grid(problem, scheme, start_time, horizon, noise);

    PathSolution path;
    path.start_time = start_time;
    path.scheme = scheme;
    const auto n = static_cast<std::size_t>(plan.steps) + 1;
    path.times.reserve(n);
    path.states.reserve(n);
    path.newton_iters.reserve(n);
    path.times.push_back(start_time);
    path.states.push_back(xi);
    path.newton_iters.push_back(0);
    run_steps(problem, scheme, plan, xi, noise, [&](std::int64_t idx, const Vector& x, int iters) {
        path.times.push_back(static_cast<double>(idx) * scheme.dt);
        path.states.push_back(x);
        path.newton_iters.push_back(iters);
    });
    return path;
}

PathSolution simulate_path(const SdeProblem& problem, const ThetaScheme& scheme, int k, double horizon,
                           const Vector& xi, const NoiseView& noise) {
    if (k < 0) throw ParameterError("pull-back index k must be non-negative");
    return simulate(problem, scheme, -k * problem.period, horizon, xi, noise);
}

Vector integrate_to(const SdeProblem& problem, const ThetaScheme& scheme, double start_time, double horizon,
                    const Vector& xi, const NoiseView& noise) {
    if (xi.size() != problem.state_dim) throw ParameterError("initial value has the wrong dimension");
    const GridPlan plan = plan_grid(problem, scheme, start_time, horizon, noise);
    Vector last = xi;
    run_steps(problem, scheme, plan, xi, noise, [&](std::int64_t, const Vector& x, int) { last = x; });
    return last;
}

} // namespace rpst
