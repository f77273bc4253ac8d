#include "rpst/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace rpst;

namespace {

constexpr double kPi = std::numbers::pi;

Vector scalar(double v) { return Vector::Constant(1, v); }

SdeProblem reference_cubic() { return build_cubic_model(5.0 * kPi, 3.0, 1.5, 0.5, 0.1, 21.0); }

} // namespace

TEST_CASE("cubic model with the published parameters") {
    const SdeProblem p = reference_cubic();
    CHECK(p.state_dim == 1);
    CHECK(p.noise_dim == 1);
    CHECK(p.period == 2.0);
    CHECK(p.growth_exponent == 3.0);
    CHECK(p.one_sided_lipschitz == doctest::Approx(15.0).epsilon(1e-15));
    CHECK(p.one_sided_lipschitz < p.lambda_min);
    CHECK(p.drift(0.0, scalar(0.0))(0) == 0.0);
    CHECK(p.diffusion(0.0, scalar(0.0))(0, 0) == 1.5);
    // f(t, x) = -a x^3 (1 + sin(pi t)) at t = 1/2: factor 2
    CHECK(p.drift(0.5, scalar(2.0))(0) == doctest::Approx(-3.0 * 8.0 * 2.0));
    CHECK(p.diffusion(0.5, scalar(2.0))(0, 0) == doctest::Approx(1.5 + 1.0 + 0.1 * 4.0 * 2.0));
}

TEST_CASE("cubic model constraint violations name the failed inequality") {
    // 12 d^2 (p* - 1) = 12 * 0.25 * 20 = 60 > a = 3
    try {
        build_cubic_model(5.0 * kPi, 3.0, 1.5, 0.5, 0.5, 21.0);
        FAIL("expected ParameterError");
    } catch (const ParameterError& e) {
        CHECK(std::string(e.what()).find("12 d^2") != std::string::npos);
    }
    // c = 10 makes L_f = 3 * 100 * 20 >= lambda: rejected at construction
    CHECK_THROWS_AS(build_cubic_model(5.0 * kPi, 3.0, 1.5, 10.0, 0.1, 21.0), ParameterError);
    CHECK_THROWS_AS(build_cubic_model(-1.0, 3.0, 1.5, 0.5, 0.1, 21.0), ParameterError);
    CHECK_THROWS_AS(build_cubic_model(5.0 * kPi, 0.0, 1.5, 0.5, 0.0, 21.0), ParameterError);
    // p* must exceed (d + 4) gamma = 15
    CHECK_THROWS_AS(build_cubic_model(5.0 * kPi, 3.0, 1.5, 0.1, 0.1, 15.0), ParameterError);
}

TEST_CASE("additive model") {
    const SdeProblem p = build_additive_model();
    CHECK(p.period == 1.0);
    CHECK(p.lambda_min == doctest::Approx(10.0 * kPi));
    CHECK(p.drift(0.25, scalar(7.0))(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.drift(1.25, scalar(7.0))(0) == p.drift(0.25, scalar(-3.0))(0));
    CHECK(p.diffusion(0.3, scalar(100.0))(0, 0) == 0.05);
    CHECK(p.diffusion(-7.1, scalar(-2.0))(0, 0) == 0.05);
}

TEST_CASE("linear model") {
    const SdeProblem p = build_linear_model(1.0, 0.0);
    CHECK(p.drift(0.3, scalar(5.0))(0) == 0.0);
    CHECK(p.diffusion(0.3, scalar(5.0))(0, 0) == 0.0);
    CHECK(p.linear_matrix(0, 0) == 1.0);
    CHECK_THROWS_AS(build_linear_model(0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(build_linear_model(1.0, -1.0), ParameterError);

    const ModelCatalogEntry e = make_catalog_model("linear_ou", {{"lambda", 2.0}, {"sigma", 0.3}});
    CHECK(e.has_exact_step);
    CHECK(e.problem.diffusion(0.0, scalar(1.0))(0, 0) == 0.3);
}

TEST_CASE("catalog lookup") {
    CHECK(make_catalog_model("cubic_multiplicative").problem.one_sided_lipschitz == doctest::Approx(15.0));
    CHECK_FALSE(make_catalog_model("additive_sine").has_exact_step);
    CHECK_THROWS_AS(make_catalog_model("quartic"), ParameterError);
    CHECK_THROWS_AS(make_catalog_model("additive_sine", {{"lambda", 1.0}}), ParameterError);
    CHECK_THROWS_AS(make_catalog_model("cubic_multiplicative", {{"c", 10.0}}), ParameterError);
}

TEST_CASE("catalog coefficients are exactly periodic on a dyadic time grid") {
    for (const char* name : {"cubic_multiplicative", "additive_sine", "linear_ou"}) {
        const SdeProblem p = make_catalog_model(name).problem;
        for (int i = 0; i < 100; ++i) {
            const double t = -3.0 + i / 16.0;
            const Vector x = scalar(-2.0 + 0.04 * i);
            CHECK((p.drift(t + p.period, x) - p.drift(t, x)).norm() == 0.0);
            CHECK((p.diffusion(t + p.period, x) - p.diffusion(t, x)).norm() == 0.0);
        }
    }
}

TEST_CASE("drift Jacobians match central differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ts(-4.0, 4.0), xs(-3.0, 3.0);
    const double h = 1e-5;
    for (const char* name : {"cubic_multiplicative", "additive_sine", "linear_ou"}) {
        const SdeProblem p = make_catalog_model(name).problem;
        for (int i = 0; i < 100; ++i) {
            const double t = ts(rng);
            const Vector x = scalar(xs(rng));
            const double fd = (p.drift(t, x + scalar(h))(0) - p.drift(t, x - scalar(h))(0)) / (2.0 * h);
            const double jac = p.drift_jacobian(t, x)(0, 0);
            CHECK(std::abs(fd - jac) / std::max(1.0, std::abs(jac)) <= 1e-6);
        }
    }
}

TEST_CASE("sampled dissipativity") {
    const DissipativityReport cubic = check_dissipativity(reference_cubic(), 10000, 3.0, 11);
    CHECK(cubic.passed);
    CHECK(cubic.effective_samples == 10000);
    CHECK(cubic.max_ratio <= 15.0);

    const DissipativityReport additive = check_dissipativity(build_additive_model(), 500, 5.0, 3);
    CHECK(additive.passed);
    CHECK(additive.max_ratio == 0.0);

    CHECK_THROWS_AS(check_dissipativity(reference_cubic(), 0, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(check_dissipativity(reference_cubic(), 10, 0.0, 1), ParameterError);
}

TEST_CASE("sampled dissipativity detects a violated one-sided Lipschitz bound") {
    SdeProblem p = reference_cubic();
    // Drift with slope +20 > L_f = 15: the sampled ratio must exceed the bound.
    p.drift = [](double, const Vector& x) { return Vector(20.0 * x); };
    p.diffusion = [](double, const Vector&) { return Matrix::Constant(1, 1, 1.0); };
    CHECK_FALSE(check_dissipativity(p, 100, 1.0, 5).passed);
}

TEST_CASE("validate rejects malformed problems") {
    SdeProblem p = build_linear_model(1.0, 0.1);
    SUBCASE("non-symmetric A") {
        p.state_dim = 2;
        p.linear_matrix = Matrix::Identity(2, 2);
        p.linear_matrix(0, 1) = 0.5;
        CHECK_THROWS_AS(validate(p), ParameterError);
    }
    SUBCASE("lambda_min above the spectrum") {
        p.lambda_min = 2.0;
        p.one_sided_lipschitz = 1.0;
        CHECK_THROWS_AS(validate(p), ParameterError);
    }
    SUBCASE("L_f >= lambda") {
        p.one_sided_lipschitz = 1.0;
        CHECK_THROWS_AS(validate(p), ParameterError);
    }
    SUBCASE("missing callable") {
        p.drift_jacobian = nullptr;
        CHECK_THROWS_AS(validate(p), ParameterError);
    }
}
