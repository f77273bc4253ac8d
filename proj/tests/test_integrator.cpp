#include "rpst/analysis.hpp"
#include "rpst/integrator.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace rpst;

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

Matrix mat(double v) { return Matrix::Constant(1, 1, v); }

// Scalar problem without validation, for frozen-coefficient oracles.
SdeProblem raw_problem(double a, DriftFn f, JacobianFn df, double g = 0.0) {
    SdeProblem p;
    p.linear_matrix = mat(a);
    p.lambda_min = a;
    p.period = 1.0;
    p.drift = std::move(f);
    p.drift_jacobian = std::move(df);
    p.diffusion = [g](double, const Vector&) { return mat(g); };
    return p;
}

SdeProblem reference_cubic() { return build_cubic_model(5.0 * std::numbers::pi, 3.0, 1.5, 0.5, 0.1, 21.0); }

} // namespace

TEST_CASE("theta scheme validation") {
    CHECK_NOTHROW(ThetaScheme{1.0, 0.1}.validate());
    CHECK_NOTHROW(ThetaScheme{0.51, 0.999}.validate());
    CHECK_THROWS_AS((ThetaScheme{0.5, 0.1}.validate()), ParameterError);
    CHECK_THROWS_AS((ThetaScheme{1.01, 0.1}.validate()), ParameterError);
    CHECK_THROWS_AS((ThetaScheme{1.0, 1.0}.validate()), ParameterError);
    CHECK_THROWS_AS((ThetaScheme{1.0, 0.0}.validate()), ParameterError);
    CHECK_THROWS_AS((ThetaScheme{1.0, 0.1, 0.0}.validate()), ParameterError);
}

TEST_CASE("implicit step oracles") {
    SUBCASE("scalar linear: y (1 + 0.5) = 1") {
        const SdeProblem p = build_linear_model(1.0, 0.0);
        const Vector y = implicit_step(p, {1.0, 0.5}, 0.5, scalar(1.0), scalar(1.0));
        CHECK(y(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("frozen cubic: y + 0.1 y^3 = 1.1 has root 1") {
        const SdeProblem p = raw_problem(
            0.0, [](double, const Vector& x) { return Vector(-x.cwiseProduct(x).cwiseProduct(x)); },
            [](double, const Vector& x) { return mat(-3.0 * x(0) * x(0)); });
        const NewtonOutcome out = solve_implicit(p, {1.0, 0.1}, 0.0, scalar(1.1), scalar(1.1));
        CHECK(out.y(0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(out.residual <= 1e-5);
    }
    SUBCASE("zero fixed point") {
        const SdeProblem p = reference_cubic();
        const NewtonOutcome out = solve_implicit(p, {0.75, 0.1}, 0.3, scalar(0.0), scalar(0.0));
        CHECK(out.y(0) == 0.0);
        CHECK(out.iterations == 0);
    }
}

TEST_CASE("damped Newton recovers from an overshooting full step") {
    // F(y) = atan(y) - rhs with h = 1: plain Newton from y0 = 3 diverges.
    const SdeProblem p = raw_problem(
        0.0, [](double, const Vector& x) { return scalar(x(0) - std::atan(x(0))); },
        [](double, const Vector& x) { return mat(1.0 - 1.0 / (1.0 + x(0) * x(0))); });
    const NewtonOutcome out = solve_implicit(p, {1.0, 1.0}, 0.0, scalar(0.0), scalar(3.0));
    CHECK(std::abs(out.y(0)) <= 1e-6);
    CHECK(out.residual <= 1e-5);
}

TEST_CASE("Newton failures are reported, not hidden") {
    const SdeProblem p = reference_cubic();
    ThetaScheme tight{1.0, 0.1, 1e-300, 3};
    try {
        solve_implicit(p, tight, 0.0, scalar(3.0), scalar(3.0));
        FAIL("expected NewtonError");
    } catch (const NewtonError& e) {
        CHECK(e.iterations() == 3);
        CHECK(e.residual() >= 0.0);
    }
    SdeProblem nan_drift = p;
    nan_drift.drift = [](double, const Vector&) { return scalar(std::numeric_limits<double>::quiet_NaN()); };
    CHECK_THROWS_AS(solve_implicit(nan_drift, {1.0, 0.1}, 0.0, scalar(1.0), scalar(1.0)), NewtonError);
    CHECK_THROWS_AS(step(p, {1.0, 0.1}, 0.0, scalar(std::numeric_limits<double>::infinity()), scalar(0.0)),
                    NewtonError);
}

TEST_CASE("theta step oracles") {
    SUBCASE("pure linear decay x/(1 + lambda dt)") {
        const SdeProblem p = build_linear_model(1.0, 0.0);
        CHECK(step(p, {1.0, 1.0}, 0.0, scalar(2.0), scalar(0.0))(0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("equilibrium is preserved") {
        SdeProblem p = reference_cubic();
        p.diffusion = [](double, const Vector&) { return mat(0.0); };
        CHECK(step(p, {0.75, 0.1}, 0.4, scalar(0.0), scalar(0.0))(0) == 0.0);
    }
    SUBCASE("additive scheme is affine in (x, dW)") {
        const SdeProblem p = build_additive_model();
        const ThetaScheme s{0.75, 0.125};
        const double t = 0.375;
        const double base = step(p, s, t, scalar(0.0), scalar(0.0))(0);
        const double x1 = 0.7, x2 = -1.3, w1 = 0.2, w2 = 0.05;
        const double lhs = step(p, s, t, scalar(x1 + x2), scalar(w1 + w2))(0) - base;
        const double rhs = (step(p, s, t, scalar(x1), scalar(w1))(0) - base) +
                           (step(p, s, t, scalar(x2), scalar(w2))(0) - base);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
    SUBCASE("matches the explicit formula for the cubic model") {
        const SdeProblem p = reference_cubic();
        const ThetaScheme s{0.75, 0.1};
        const double x = 0.4, dw = 0.3, t = 0.3;
        const double y = step(p, s, t, scalar(x), scalar(dw))(0);
        const double lam = p.lambda_min;
        auto f = [](double tt, double v) { return -3.0 * v * v * v * (1.0 + std::sin(std::numbers::pi * tt)); };
        const double g = 1.5 + 0.5 * x + 0.1 * x * x * (1.0 + std::sin(std::numbers::pi * t));
        const double lhs = y - s.theta * s.dt * (-lam * y + f(t + s.dt, y));
        const double rhs = x + (1.0 - s.theta) * s.dt * (-lam * x + f(t, x)) + g * dw;
        CHECK(std::abs(lhs - rhs) <= 1e-5);
    }
}

TEST_CASE("exact linear step") {
    CHECK(exact_linear_step(1.0, 0.0, {1.0, 1.0}, 1.0, 0.0) == 0.5);
    CHECK(exact_linear_step(2.0, 0.3, {0.7, 0.25}, 0.0, 0.0) == 0.0);

    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> th(0.5001, 1.0), dt(0.001, 0.99), lam(0.01, 50.0), sig(0.0, 2.0),
        xs(-5.0, 5.0), ws(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const ThetaScheme s{th(rng), dt(rng)};
        const double l = lam(rng), sg = sig(rng), x = xs(rng), w = ws(rng);
        const SdeProblem p = build_linear_model(l, sg);
        const double newton = step(p, s, 0.0, scalar(x), scalar(w))(0);
        CHECK(std::abs(newton - exact_linear_step(l, sg, s, x, w)) <= 1e-10);
    }
    CHECK(linear_amplification(1.0, {1.0, 0.5}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("simulate_path basics") {
    const SdeProblem p = reference_cubic();
    const ThetaScheme s{1.0, 0.1};
    const WienerGrid g = generate_for_step(1, 0, 0.1, {-10.0, 0.0}, 1);

    const PathSolution single = simulate_path(p, s, 0, 0.0, scalar(0.4), g);
    CHECK(single.size() == 1);
    CHECK(single.states[0](0) == 0.4);

    const PathSolution path = simulate_path(p, s, 5, 0.0, scalar(0.6), g);
    CHECK(path.size() == 101);
    CHECK(path.times.front() == -10.0);
    CHECK(path.times.back() == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t j = 1; j < path.size(); ++j) CHECK(path.times[j] - path.times[j - 1] == doctest::Approx(0.1));
    for (const auto& x : path.states) CHECK(x.allFinite());

    CHECK_THROWS_AS(simulate_path(p, s, 6, 0.0, scalar(0.6), g), WindowError);
    CHECK_THROWS_AS(simulate(p, s, -10.0, 0.05, scalar(0.6), g), WindowError);
    CHECK_THROWS_AS(simulate(p, {1.0, 0.3}, -9.0, 0.0, scalar(0.6), generate_for_step(1, 0, 0.3, {-9.0, 0.0}, 1)),
                    ParameterError); // tau / dt not an integer
    CHECK_THROWS_AS(simulate(p, s, 0.0, -1.0, scalar(0.6), g), WindowError);
}

TEST_CASE("paths from different initial values coincide after a short time") {
    const SdeProblem p = reference_cubic();
    const WienerGrid g = generate_for_step(20240501, 0, 0.1, {-10.0, 0.0}, 1);
    for (double theta : {0.75, 1.0}) {
        const ThetaScheme s{theta, 0.1};
        const PathSolution up = simulate_path(p, s, 5, 0.0, scalar(0.6), g);
        const PathSolution down = simulate_path(p, s, 5, 0.0, scalar(-0.6), g);
        double gap = 0.0;
        for (std::size_t j = 20; j < up.size(); ++j) gap = std::max(gap, std::abs(up.states[j](0) - down.states[j](0)));
        CHECK(gap <= 1e-3);
    }
}

TEST_CASE("linear path follows the closed-form recursion") {
    const double lam = 2.0, sig = 0.3;
    const SdeProblem p = build_linear_model(lam, sig);
    const ThetaScheme s{0.8, 1.0 / 64.0};
    const WienerGrid g = WienerGrid::generate(5, 0, 6, {0.0, 1000.0 / 64.0}, 1);
    const PathSolution path = simulate(p, s, 0.0, 1000.0 / 64.0, scalar(1.5), g);
    REQUIRE(path.size() == 1001);
    double x = 1.5;
    double worst = 0.0;
    for (std::int64_t j = 0; j < 1000; ++j) {
        x = exact_linear_step(lam, sig, s, x, g.fine_increment(j)(0));
        worst = std::max(worst, std::abs(path.states[static_cast<std::size_t>(j) + 1](0) - x));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("deterministic replay is bit-identical") {
    const SdeProblem p = reference_cubic();
    const ThetaScheme s{0.75, 1.0 / 32.0};
    auto run = [&] {
        const WienerGrid g = generate_for_step(99, 4, s.dt, {-4.0, 2.0}, 1);
        return simulate(p, s, -4.0, 2.0, scalar(0.3), g);
    };
    const PathSolution a = run(), b = run();
    CHECK(a.times == b.times);
    CHECK(a.newton_iters == b.newton_iters);
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(a.states[j](0) == b.states[j](0));
    CHECK(integrate_to(p, s, -4.0, 2.0, scalar(0.3), generate_for_step(99, 4, s.dt, {-4.0, 2.0}, 1))(0) ==
          a.states.back()(0));
}

TEST_CASE("Newton quality on the cubic model") {
    const SdeProblem p = reference_cubic();
    for (double dt : {0.1, 1.0 / 16.0, 0.01}) {
        const ThetaScheme s{1.0, dt};
        const WienerGrid g = generate_for_step(3, 0, dt, {-10.0, 0.0}, 1);
        const PathSolution path = simulate(p, s, -10.0, 0.0, scalar(0.6), g);
        std::vector<int> iters(path.newton_iters.begin() + 1, path.newton_iters.end());
        std::nth_element(iters.begin(), iters.begin() + iters.size() / 2, iters.end());
        CHECK(iters[iters.size() / 2] <= 5);

        // residual of the stage equation at every accepted state
        for (std::size_t j = 0; j + 1 < path.size(); ++j) {
            const double t = p.phase(path.times[j]);
            const Vector& x = path.states[j];
            const Vector& y = path.states[j + 1];
            const Vector dW = NoiseView(g).increment(dt, grid_index(path.times[j], dt));
            const Vector rhs = x + (1.0 - s.theta) * dt * (-(p.linear_matrix * x) + p.drift(t, x)) +
                               p.diffusion(t, x) * dW;
            const Vector res = y - s.theta * dt * (-(p.linear_matrix * y) + p.drift(p.phase(t + dt), y)) - rhs;
            CHECK(res.norm() <= 1e-5);
        }
    }
}

TEST_CASE("second moment stays bounded along the pull-back") {
    const SdeProblem p = reference_cubic();
    for (double dt : {0.1, 0.01}) {
        const MomentSeries m = moment_monitor(p, {1.0, dt}, 5, 500, 2024, scalar(0.6));
        const std::size_t half = m.second_moment.size() / 2;
        const double first = *std::max_element(m.second_moment.begin(), m.second_moment.begin() + half);
        const double last = *std::max_element(m.second_moment.begin() + half, m.second_moment.end());
        CHECK(last <= 2.0 * first);
        CHECK_FALSE(m.growth_flag);
    }
}
