#include "rpst/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace rpst {

namespace {

constexpr double kPi = std::numbers::pi;

// Nominal one-sided Lipschitz constant for models whose drift nonlinearity
// does not depend on the state: any positive value satisfies the monotonicity
// condition, so use one that is negligible against lambda.
constexpr double kStateFreeLipschitzFraction = 1e-6;

[[noreturn]] void fail(const std::string& msg) { throw ParameterError(msg); }

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// Reduces t into [0, period); catalog coefficients evaluate on the phase so
// that f(t + tau, x) and f(t, x) agree bit for bit whenever t + tau is exact.
double reduce(double t, double period) {
    double r = std::fmod(t, period);
    if (r < 0.0) r += period;
    return r >= period ? 0.0 : r;
}

Matrix scalar_matrix(double v) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return m;
}

} // namespace

double SdeProblem::phase(double t) const { return reduce(t, period); }

void validate(const SdeProblem& p) {
    if (p.state_dim < 1 || p.state_dim > kMaxDim) fail("state_dim must be in [1, " + std::to_string(kMaxDim) + "]");
    if (p.noise_dim < 1 || p.noise_dim > kMaxDim) fail("noise_dim must be in [1, " + std::to_string(kMaxDim) + "]");
    if (p.linear_matrix.rows() != p.state_dim || p.linear_matrix.cols() != p.state_dim)
        fail("linear_matrix must be state_dim x state_dim");
    if (!p.drift || !p.drift_jacobian || !p.diffusion) fail("drift, drift_jacobian and diffusion are required");
    if (!(p.period > 0.0)) fail("period must be positive");
    if ((p.linear_matrix - p.linear_matrix.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * (1.0 + p.linear_matrix.cwiseAbs().maxCoeff()))
        fail("linear_matrix must be symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(p.linear_matrix), Eigen::EigenvaluesOnly);
    const double smallest = eig.eigenvalues().minCoeff();
    if (!(p.lambda_min > 0.0)) fail("lambda_min must be positive");
    if (smallest < p.lambda_min * (1.0 - 1e-12))
        fail("linear_matrix has eigenvalue " + fmt_num(smallest) + " below lambda_min " + fmt_num(p.lambda_min));

    if (!(p.one_sided_lipschitz > 0.0 && p.one_sided_lipschitz < p.lambda_min))
        fail("need 0 < L_f < lambda (L_f = " + fmt_num(p.one_sided_lipschitz) + ", lambda = " +
             fmt_num(p.lambda_min) + ")");
    if (!(p.growth_exponent >= 1.0)) fail("growth exponent gamma must be >= 1");
    const double moment_floor = (p.state_dim + 4) * p.growth_exponent;
    if (!(p.moment_exponent > moment_floor))
        fail("need p* > (d + 4) gamma = " + fmt_num(moment_floor) + " (p* = " + fmt_num(p.moment_exponent) + ")");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::cubic_multiplicative: return "cubic_multiplicative";
    case ModelKind::additive_sine: return "additive_sine";
    case ModelKind::linear_ou: return "linear_ou";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "cubic_multiplicative") return ModelKind::cubic_multiplicative;
    if (name == "additive_sine") return ModelKind::additive_sine;
    if (name == "linear_ou") return ModelKind::linear_ou;
    fail("unknown model '" + name + "' (expected cubic_multiplicative, additive_sine or linear_ou)");
}

SdeProblem build_cubic_model(double lambda, double a, double b, double c, double dcoef, double pstar) {
    if (!(lambda > 0.0)) fail("cubic model: need lambda > 0");
    if (!(a > 0.0)) fail("cubic model: need a > 0");
    if (!(pstar > 1.0)) fail("cubic model: need p* > 1");
    const double noise_growth = 12.0 * dcoef * dcoef * (pstar - 1.0);
    if (!(noise_growth <= a))
        fail("cubic model: 12 d^2 (p* - 1) <= a violated (" + fmt_num(noise_growth) + " > " + fmt_num(a) + ")");
    const double lf = 3.0 * c * c * (pstar - 1.0);
    if (!(lf < lambda))
        fail("cubic model: 3 c^2 (p* - 1) < lambda violated (" + fmt_num(lf) + " >= " + fmt_num(lambda) + ")");

    SdeProblem p;
    p.state_dim = 1;
    p.noise_dim = 1;
    p.linear_matrix = scalar_matrix(lambda);
    p.lambda_min = lambda;
    p.period = 2.0;
    p.growth_exponent = 3.0;
    p.one_sided_lipschitz = lf;
    p.moment_exponent = pstar;
    p.drift = [a](double t, const Vector& x) {
        Vector out(1);
        out(0) = -a * x(0) * x(0) * x(0) * (1.0 + std::sin(kPi * reduce(t, 2.0)));
        return out;
    };
    p.drift_jacobian = [a](double t, const Vector& x) {
        return scalar_matrix(-3.0 * a * x(0) * x(0) * (1.0 + std::sin(kPi * reduce(t, 2.0))));
    };
    p.diffusion = [b, c, dcoef](double t, const Vector& x) {
        return scalar_matrix(b + c * x(0) + dcoef * x(0) * x(0) * (1.0 + std::sin(kPi * reduce(t, 2.0))));
    };
    validate(p);
    return p;
}

SdeProblem build_additive_model() {
    constexpr double lambda = 10.0 * kPi;
    SdeProblem p;
    p.linear_matrix = scalar_matrix(lambda);
    p.lambda_min = lambda;
    p.period = 1.0;
    p.growth_exponent = 1.0;
    p.one_sided_lipschitz = kStateFreeLipschitzFraction * lambda;
    p.moment_exponent = 21.0;
    p.drift = [](double t, const Vector&) {
        Vector out(1);
        out(0) = std::sin(2.0 * kPi * reduce(t, 1.0));
        return out;
    };
    p.drift_jacobian = [](double, const Vector&) { return scalar_matrix(0.0); };
    p.diffusion = [](double, const Vector&) { return scalar_matrix(0.05); };
    validate(p);
    return p;
}

SdeProblem build_linear_model(double lambda, double sigma) {
    if (!(lambda > 0.0)) fail("linear model: need lambda > 0");
    if (!(sigma >= 0.0)) fail("linear model: need sigma >= 0");
    SdeProblem p;
    p.linear_matrix = scalar_matrix(lambda);
    p.lambda_min = lambda;
    p.period = 1.0;
    p.growth_exponent = 1.0;
    p.one_sided_lipschitz = kStateFreeLipschitzFraction * lambda;
    p.moment_exponent = 21.0;
    p.drift = [](double, const Vector& x) { return Vector::Zero(x.size()).eval(); };
    p.drift_jacobian = [](double, const Vector& x) { return Matrix::Zero(x.size(), x.size()).eval(); };
    p.diffusion = [sigma](double, const Vector&) { return scalar_matrix(sigma); };
    validate(p);
    return p;
}

ModelCatalogEntry make_catalog_model(const std::string& name, const std::map<std::string, double>& overrides) {
    ModelCatalogEntry entry;
    entry.kind = model_kind_from_string(name);

    switch (entry.kind) {
    case ModelKind::cubic_multiplicative:
        entry.parameters = {{"lambda", 5.0 * kPi}, {"a", 3.0}, {"b", 1.5}, {"c", 0.5}, {"d", 0.1}, {"pstar", 21.0}};
        break;
    case ModelKind::additive_sine:
        entry.parameters = {};
        break;
    case ModelKind::linear_ou:
        entry.parameters = {{"lambda", 1.0}, {"sigma", 0.3}};
        entry.has_exact_step = true;
        break;
    }
    for (const auto& [key, value] : overrides) {
        auto it = entry.parameters.find(key);
        if (it == entry.parameters.end()) fail("model " + name + " has no parameter '" + key + "'");
        it->second = value;
    }

    const auto& q = entry.parameters;
    switch (entry.kind) {
    case ModelKind::cubic_multiplicative:
        entry.problem = build_cubic_model(q.at("lambda"), q.at("a"), q.at("b"), q.at("c"), q.at("d"), q.at("pstar"));
        break;
    case ModelKind::additive_sine:
        entry.problem = build_additive_model();
        break;
    case ModelKind::linear_ou:
        entry.problem = build_linear_model(q.at("lambda"), q.at("sigma"));
        break;
    }
    return entry;
}

DissipativityReport check_dissipativity(const SdeProblem& problem, std::size_t sample_count, double box_radius,
                                        std::uint64_t rng_seed) {
    if (sample_count < 1) fail("check_dissipativity: sample_count must be >= 1");
    if (!(box_radius > 0.0)) fail("check_dissipativity: box_radius must be positive");

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> time_dist(0.0, problem.period);
    std::uniform_real_distribution<double> box(-box_radius, box_radius);

    DissipativityReport report;
    report.samples = sample_count;
    report.bound = problem.one_sided_lipschitz;
    report.max_ratio = -std::numeric_limits<double>::infinity();
    const int d = problem.state_dim;
    for (std::size_t s = 0; s < sample_count; ++s) {
        const double t = time_dist(rng);
        Vector x(d), y(d);
        for (int i = 0; i < d; ++i) x(i) = box(rng);
        for (int i = 0; i < d; ++i) y(i) = box(rng);
        const double dist2 = (x - y).squaredNorm();
        if (dist2 == 0.0) continue;
        const double drift_part = (x - y).dot(problem.drift(t, x) - problem.drift(t, y));
        const double noise_part = (problem.diffusion(t, x) - problem.diffusion(t, y)).squaredNorm();
        const double ratio = (drift_part + (problem.moment_exponent - 1.0) * noise_part) / dist2;
        report.max_ratio = std::max(report.max_ratio, ratio);
        ++report.effective_samples;
    }
    if (report.effective_samples == 0) report.max_ratio = 0.0;
    report.passed = report.max_ratio <= problem.one_sided_lipschitz * (1.0 + 1e-9);
    return report;
}

} // namespace rpst
