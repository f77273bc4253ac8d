#include "rpst/analysis.hpp"

#include "rpst/ensemble.hpp"

#include <algorithm>
#include <cmath>

namespace rpst {

namespace {

std::vector<std::vector<double>> columns(std::size_t rows, std::size_t cols) {
    return std::vector<std::vector<double>>(rows, std::vector<double>(cols, 0.0));
}

} // namespace

ContractionConstants contraction_constant(double lambda, double l_f, double theta, double pstar, double dt) {
    if (!(l_f > 0.0 && l_f < lambda)) throw ParameterError("contraction constant needs 0 < L_f < lambda");
    if (!(theta > 0.5 && theta <= 1.0)) throw ParameterError("contraction constant needs theta in (1/2, 1]");
    if (!(pstar > 2.0)) throw ParameterError("contraction constant needs p* > 2");
    if (!(dt > 0.0 && dt <= 1.0)) throw ParameterError("contraction constant needs dt in (0, 1]");

    const double gap = 2.0 * (lambda - l_f) * theta * dt;
    ContractionConstants c;
    c.branches[0] = 1.0 - gap / (1.0 + gap);
    c.branches[1] = 1.0 - (pstar - 2.0) / (2.0 * (pstar - 1.0) * theta);
    c.branches[2] = 1.0 - (2.0 * theta - 1.0) / (theta * theta);
    c.c_delta = *std::max_element(c.branches.begin(), c.branches.end());
    c.exact_rate = std::exp(2.0 * (l_f - lambda) * dt);
    return c;
}

ContractionConstants contraction_constant(const SdeProblem& problem, const ThetaScheme& scheme) {
    return contraction_constant(problem.lambda_min, problem.one_sided_lipschitz, scheme.theta,
                                problem.moment_exponent, scheme.dt);
}

SlopeFit fit_slope(std::span<const double> stepsizes, std::span<const double> errors) {
    if (stepsizes.size() != errors.size()) throw ParameterError("fit_slope: length mismatch");
    if (stepsizes.size() < 2) throw ParameterError("fit_slope: need at least two points");
    const std::size_t n = stepsizes.size();
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(stepsizes[i] > 0.0) || !(errors[i] > 0.0)) throw ParameterError("fit_slope: inputs must be positive");
        xs[i] = std::log2(stepsizes[i]);
        ys[i] = std::log2(errors[i]);
    }
    const double mx = ordered_sum(xs) / static_cast<double>(n);
    const double my = ordered_sum(ys) / static_cast<double>(n);
    std::vector<double> sxx(n), sxy(n);
    for (std::size_t i = 0; i < n; ++i) {
        sxx[i] = (xs[i] - mx) * (xs[i] - mx);
        sxy[i] = (xs[i] - mx) * (ys[i] - my);
    }
    const double denom = ordered_sum(sxx);
    if (denom == 0.0) throw ParameterError("fit_slope: all stepsizes are equal");
    SlopeFit fit;
    fit.slope = ordered_sum(sxy) / denom;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

ConvergenceReport ms_error(const SdeProblem& problem, const MsErrorConfig& config) {
    if (config.levels.empty()) throw ParameterError("ms_error: no levels given");
    if (config.ensemble < 1) throw ParameterError("ms_error: ensemble must be positive");
    std::vector<int> levels = config.levels;
    std::sort(levels.begin(), levels.end());
    if (std::adjacent_find(levels.begin(), levels.end()) != levels.end())
        throw ParameterError("ms_error: duplicate levels");
    if (levels.front() < 1) throw ParameterError("ms_error: levels must be >= 1 (dt < 1)");
    if (config.reference_level < levels.back())
        throw ParameterError("ms_error: reference_level must be at least the finest level");
    if (config.reference_level > 30) throw ParameterError("ms_error: reference_level must be <= 30");
    if (!(config.t_start < config.t_end)) throw ParameterError("ms_error: need t_start < t_end");
    const double coarsest = std::ldexp(1.0, -levels.front());
    if (!on_grid(config.t_start, coarsest) || !on_grid(config.t_end, coarsest))
        throw WindowError("ms_error: window must be aligned with the coarsest level");

    const Vector xi = config.xi.value_or(Vector::Zero(problem.state_dim));
    const std::size_t nl = levels.size();
    auto sq_final = columns(nl, config.ensemble);
    auto sq_sup = columns(nl, config.ensemble);

    for_each_path(config.ensemble, config.jobs, [&](std::size_t i) {
        const WienerGrid grid = WienerGrid::generate(config.seed, i, config.reference_level,
                                                     {config.t_start, config.t_end}, problem.noise_dim);
        ThetaScheme scheme{config.theta, std::ldexp(1.0, -config.reference_level), config.newton_tol, 50};
        if (config.sup_diagnostic) {
            const PathSolution ref = simulate(problem, scheme, config.t_start, config.t_end, xi, grid);
            for (std::size_t l = 0; l < nl; ++l) {
                scheme.dt = std::ldexp(1.0, -levels[l]);
                const PathSolution coarse = simulate(problem, scheme, config.t_start, config.t_end, xi, grid);
                const std::size_t stride = std::size_t{1} << (config.reference_level - levels[l]);
                double sup = 0.0;
                for (std::size_t j = 0; j < coarse.size(); ++j)
                    sup = std::max(sup, (coarse.states[j] - ref.states[j * stride]).norm());
                sq_final[l][i] = (coarse.states.back() - ref.states.back()).squaredNorm();
                sq_sup[l][i] = sup * sup;
            }
            return;
        }
        const Vector ref = integrate_to(problem, scheme, config.t_start, config.t_end, xi, grid);
        for (std::size_t l = 0; l < nl; ++l) {
            scheme.dt = std::ldexp(1.0, -levels[l]);
            const Vector x = integrate_to(problem, scheme, config.t_start, config.t_end, xi, grid);
            sq_final[l][i] = (x - ref).squaredNorm();
        }
    });

    ConvergenceReport report;
    report.levels = levels;
    report.ensemble_size = config.ensemble;
    report.reference_level = config.reference_level;
    report.theta = config.theta;
    bool all_positive = nl >= 2;
    for (std::size_t l = 0; l < nl; ++l) {
        const SampleStats s = sample_stats(sq_final[l]);
        const double rms = std::sqrt(s.mean);
        report.stepsizes.push_back(std::ldexp(1.0, -levels[l]));
        report.rms_errors.push_back(rms);
        report.stderrs.push_back(rms > 0.0 ? s.stderr_mean / (2.0 * rms) : 0.0);
        if (config.sup_diagnostic) report.sup_rms_errors.push_back(std::sqrt(sample_stats(sq_sup[l]).mean));
        all_positive = all_positive && rms > 0.0 && std::isfinite(rms);
    }
    if (all_positive) {
        const SlopeFit fit = fit_slope(report.stepsizes, report.rms_errors);
        report.fitted_slope = fit.slope;
        report.intercept = fit.intercept;
    }
    return report;
}

MomentSeries moment_monitor(const SdeProblem& problem, const ThetaScheme& scheme, int k, std::size_t ensemble,
                            std::uint64_t seed, const Vector& xi, int jobs) {
    if (ensemble < 2) throw ParameterError("moment_monitor: ensemble must be >= 2");
    if (k < 1) throw ParameterError("moment_monitor: k must be >= 1");
    const double start = -k * problem.period;
    const auto steps = static_cast<std::size_t>(grid_index(-start, scheme.dt));
    auto sq = columns(steps + 1, ensemble);

    for_each_path(ensemble, jobs, [&](std::size_t i) {
        const WienerGrid grid = generate_for_step(seed, i, scheme.dt, {start, 0.0}, problem.noise_dim);
        const PathSolution path = simulate(problem, scheme, start, 0.0, xi, grid);
        for (std::size_t j = 0; j < path.size(); ++j) sq[j][i] = path.states[j].squaredNorm();
    });

    MomentSeries out;
    for (std::size_t j = 0; j <= steps; ++j) {
        const SampleStats s = sample_stats(sq[j]);
        out.times.push_back(start + static_cast<double>(j) * scheme.dt);
        out.second_moment.push_back(s.mean);
        out.stderrs.push_back(s.stderr_mean);
    }

    // Quarters of the post-burn-in series; the whole series if the burn-in eats it.
    const auto burn = static_cast<std::size_t>(grid_index(2.0 * problem.period, scheme.dt));
    std::size_t from = burn < steps ? burn : 0;
    const std::size_t len = steps + 1 - from;
    const std::size_t quarter = std::max<std::size_t>(len / 4, 1);
    const std::span<const double> m(out.second_moment);
    out.early_mean = ordered_sum(m.subspan(from, quarter)) / static_cast<double>(quarter);
    out.late_mean = ordered_sum(m.subspan(steps + 1 - quarter, quarter)) / static_cast<double>(quarter);
    out.growth_flag = !(out.late_mean <= 4.0 * out.early_mean) && out.late_mean > 0.0;
    return out;
}

ContractionTestResult numerical_contraction_test(const SdeProblem& problem, const ThetaScheme& scheme,
                                                 const Vector& xi, const Vector& eta, int k, std::size_t ensemble,
                                                 std::uint64_t seed, int jobs, double safety, double floor) {
    if (xi == eta) throw ParameterError("contraction test needs distinct initial values");
    if (ensemble < 1) throw ParameterError("contraction test: ensemble must be positive");
    if (k < 1) throw ParameterError("contraction test: k must be >= 1");

    ContractionTestResult res;
    res.constants = contraction_constant(problem, scheme);
    res.safety = safety;
    res.floor = floor;
    const double start = -k * problem.period;
    const auto steps = static_cast<std::size_t>(grid_index(-start, scheme.dt));
    auto sq = columns(steps + 1, ensemble);

    for_each_path(ensemble, jobs, [&](std::size_t i) {
        const WienerGrid grid = generate_for_step(seed, i, scheme.dt, {start, 0.0}, problem.noise_dim);
        const PathSolution x = simulate(problem, scheme, start, 0.0, xi, grid);
        const PathSolution y = simulate(problem, scheme, start, 0.0, eta, grid);
        for (std::size_t j = 0; j <= steps; ++j) sq[j][i] = (x.states[j] - y.states[j]).squaredNorm();
    });

    res.dominated = true;
    for (std::size_t j = 0; j <= steps; ++j) {
        const double v = ordered_sum(sq[j]) / static_cast<double>(ensemble);
        res.times.push_back(start + static_cast<double>(j) * scheme.dt);
        res.mean_sq_diff.push_back(v);
        res.envelope.push_back(safety * res.mean_sq_diff.front() *
                               std::pow(res.constants.c_delta, static_cast<double>(j)));
        if (res.reached_floor) continue;
        if (v < floor) {
            res.reached_floor = true;
            continue;
        }
        ++res.checked_steps;
        if (!(v <= res.envelope.back())) res.dominated = false;
    }
    res.passed = res.dominated && res.reached_floor;
    return res;
}

} // namespace rpst
