#include "rpst/periodic.hpp"

#include "rpst/ensemble.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rpst {

namespace {

std::string str(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Pull-back start -k tau sampled at t_eval for every ensemble member.
std::vector<Vector> pullback_sample(const SdeProblem& problem, const ThetaScheme& scheme, double t_eval, int k,
                                    const Vector& xi, std::size_t ensemble, std::uint64_t seed, int jobs) {
    const double start = -k * problem.period;
    std::vector<Vector> out(ensemble);
    for_each_path(ensemble, jobs, [&](std::size_t i) {
        const WienerGrid grid = generate_for_step(seed, i, scheme.dt, {start, t_eval}, problem.noise_dim);
        out[i] = integrate_to(problem, scheme, start, t_eval, xi, grid);
    });
    return out;
}

double l2_gap(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    std::vector<double> sq(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) sq[i] = (a[i] - b[i]).squaredNorm();
    return std::sqrt(ordered_sum(sq) / static_cast<double>(a.size()));
}

} // namespace

PullbackResult pullback_converge(const SdeProblem& problem, const ThetaScheme& scheme, double t_eval,
                                 const Vector& xi, double tolerance, int k_max, std::size_t ensemble,
                                 std::uint64_t seed, int jobs) {
    scheme.validate();
    if (!(tolerance > 0.0)) throw ParameterError("pull-back tolerance must be positive");
    if (k_max < 1) throw ParameterError("k_max must be at least 1");
    if (ensemble < 1) throw ParameterError("ensemble must contain at least one path");
    if (!on_grid(t_eval, scheme.dt)) throw WindowError("t_eval " + str(t_eval) + " is not on the time grid");
    if (!(t_eval > -problem.period)) throw ParameterError("t_eval must exceed -tau");

    PullbackResult result;
    result.tolerance = tolerance;
    result.t_eval = t_eval;
    std::vector<Vector> previous = pullback_sample(problem, scheme, t_eval, 1, xi, ensemble, seed, jobs);
    for (int k = 1; k <= k_max; ++k) {
        std::vector<Vector> next = pullback_sample(problem, scheme, t_eval, k + 1, xi, ensemble, seed, jobs);
        const double gap = l2_gap(previous, next);
        result.gap_history.push_back(gap);
        result.k_used = k;
        result.l2_gap = gap;
        result.states = std::move(next);
        if (gap <= tolerance) {
            result.converged = true;
            return result;
        }
        previous = result.states;
    }
    throw ConvergenceError("pull-back did not reach tolerance " + str(tolerance) + " within k_max = " +
                               std::to_string(k_max) + " (last gap " + str(result.l2_gap) + ")",
                           result.l2_gap);
}

IndependenceReport initial_value_independence(const SdeProblem& problem, const ThetaScheme& scheme,
                                              const std::vector<Vector>& xis, int k, std::uint64_t seed,
                                              double threshold, std::uint64_t path_index) {
    if (xis.size() < 2) throw ParameterError("initial-value independence needs at least two initial values");
    if (k < 1) throw ParameterError("k must be at least 1");
    const double start = -k * problem.period;
    const WienerGrid grid = generate_for_step(seed, path_index, scheme.dt, {start, 0.0}, problem.noise_dim);

    IndependenceReport report;
    report.initial_values = xis;
    report.threshold = threshold;
    report.compare_from = start + kBurnInPeriods * problem.period;
    for (const Vector& xi : xis) report.paths.push_back(simulate_path(problem, scheme, k, 0.0, xi, grid));

    const std::size_t n = report.paths.front().size();
    const std::int64_t first_compared = grid_index(report.compare_from, scheme.dt) - grid_index(start, scheme.dt);
    for (std::size_t j = static_cast<std::size_t>(std::max<std::int64_t>(first_compared, 0)); j < n; ++j)
        for (std::size_t a = 0; a < xis.size(); ++a)
            for (std::size_t b = a + 1; b < xis.size(); ++b)
                report.max_distance =
                    std::max(report.max_distance, (report.paths[a].states[j] - report.paths[b].states[j]).norm());
    report.passed = report.max_distance <= threshold;
    return report;
}

ShiftedPeriodicityReport periodicity_check_shifted(const SdeProblem& problem, const ThetaScheme& scheme, int k,
                                                   const Vector& xi, TimeWindow window, std::uint64_t seed,
                                                   double threshold, std::uint64_t path_index) {
    return periodicity_check_shifted(problem, scheme, k, xi, window, seed, problem.period, threshold, path_index);
}

ShiftedPeriodicityReport periodicity_check_shifted(const SdeProblem& problem, const ThetaScheme& scheme, int k,
                                                   const Vector& xi, TimeWindow window, std::uint64_t seed,
                                                   double shift, double threshold, std::uint64_t path_index) {
    if (k < 1) throw ParameterError("k must be at least 1");
    if (!on_grid(shift, problem.period)) throw ParameterError("shift must be a multiple of the period");
    if (!(window.start < window.end)) throw WindowError("comparison window must be non-empty");
    const double start = -k * problem.period;
    if (window.start - shift < start || window.start < start)
        throw WindowError("comparison window [" + str(window.start) + ", " + str(window.end) +
                          "] reaches before the pull-back start " + str(start));

    const WienerGrid grid = generate_for_step(seed, path_index, scheme.dt,
                                              {std::min(start, start + shift), window.end},
                                              problem.noise_dim);
    const NoiseView base(grid);
    const NoiseView moved = shift_view(base, shift);
    if (!moved.covers({start, window.end - shift}))
        throw WindowError("shifted noise does not cover the comparison window");

    const PathSolution p1 = simulate(problem, scheme, start, window.end, xi, base);
    const PathSolution p2 = simulate(problem, scheme, start, window.end - shift, xi, moved);

    ShiftedPeriodicityReport report;
    report.shift = shift;
    report.threshold = threshold;
    const double compare_from = start + kBurnInPeriods * problem.period;
    const std::int64_t origin = grid_index(start, scheme.dt);
    const std::int64_t shift_steps = grid_index(shift, scheme.dt);
    for (std::int64_t n = grid_index(window.start, scheme.dt); n <= grid_index(window.end, scheme.dt); ++n) {
        const auto j1 = static_cast<std::size_t>(n - origin);
        const auto j2 = static_cast<std::size_t>(n - shift_steps - origin);
        report.times.push_back(static_cast<double>(n) * scheme.dt);
        report.original.push_back(p1.states[j1]);
        report.shifted.push_back(p2.states[j2]);
        if (p1.times[j1] >= compare_from - 1e-9 && p2.times[j2] >= compare_from - 1e-9)
            report.max_gap = std::max(report.max_gap, (p1.states[j1] - p2.states[j2]).norm());
    }
    report.passed = report.max_gap <= threshold;
    return report;
}

PullbackPeriodicityReport periodicity_check_pullback(const SdeProblem& problem, const ThetaScheme& scheme,
                                                     const Vector& x0, double horizon, std::uint64_t seed,
                                                     double threshold, std::uint64_t path_index, int jobs) {
    scheme.validate();
    if (horizon < 0.0 || !on_grid(horizon, problem.period))
        throw ParameterError("horizon must be a non-negative multiple of the period");
    PullbackPeriodicityReport report;
    report.threshold = threshold;
    const std::int64_t steps = grid_index(horizon, scheme.dt);
    if (steps == 0) {
        report.times = {0.0};
        report.curve = {x0};
        report.passed = true;
        return report;
    }

    const WienerGrid grid = generate_for_step(seed, path_index, scheme.dt, {-horizon, 0.0}, problem.noise_dim);
    report.times.resize(static_cast<std::size_t>(steps) + 1);
    report.curve.resize(static_cast<std::size_t>(steps) + 1);
    for_each_path(static_cast<std::size_t>(steps) + 1, jobs, [&](std::size_t n) {
        const double t = static_cast<double>(n) * scheme.dt;
        const NoiseView view = shift_view(NoiseView(grid), -t);
        report.times[n] = t;
        report.curve[n] = integrate_to(problem, scheme, 0.0, t, x0, view);
    });

    const std::int64_t per_period = grid_index(problem.period, scheme.dt);
    for (std::int64_t n = per_period; n + per_period <= steps; ++n) {
        report.deviation_defined = true;
        report.max_deviation =
            std::max(report.max_deviation, (report.curve[static_cast<std::size_t>(n + per_period)] -
                                            report.curve[static_cast<std::size_t>(n)])
                                               .norm());
    }
    report.passed = report.max_deviation <= threshold;
    return report;
}

} // namespace rpst
