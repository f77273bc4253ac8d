#include "rpst/config.hpp"

#include "rpst/analysis.hpp"
#include "rpst/model.hpp"
#include "rpst/noise.hpp"

#include <cmath>
#include <istream>
#include <sstream>

namespace rpst {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ParameterError("config: " + msg); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        fail("key '" + key + "' expects a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long out = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        fail("key '" + key + "' expects an integer, got '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long out = std::stoull(v, &used, 0);
        if (used != v.size() || v.front() == '-') throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        fail("key '" + key + "' expects a non-negative integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail("key '" + key + "' expects true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
    if (out.empty()) fail("key '" + key + "' expects a non-empty list");
    return out;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_floating_point_v<T>)
            out += num(xs[i]);
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

} // namespace

std::string to_string(Command c) {
    switch (c) {
    case Command::simulate: return "simulate";
    case Command::pullback: return "pullback";
    case Command::periodicity: return "periodicity";
    case Command::converge: return "converge";
    case Command::contraction: return "contraction";
    }
    return "unknown";
}

Command command_from_string(const std::string& name) {
    for (Command c : {Command::simulate, Command::pullback, Command::periodicity, Command::converge,
                      Command::contraction})
        if (to_string(c) == name) return c;
    fail("unknown subcommand '" + name + "'");
}

double ExperimentConfig::step() const { return level ? std::ldexp(1.0, -*level) : dt; }

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line.substr(0, line.find('#')));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) fail("line " + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

void apply_entries(ExperimentConfig& c, const std::map<std::string, std::string>& entries) {
    for (const auto& [key, v] : entries) {
        if (key.rfind("model.", 0) == 0) {
            c.model_params[key.substr(6)] = to_double(key, v);
        } else if (key == "model") {
            c.model = v;
        } else if (key == "theta") {
            c.thetas = to_doubles(key, v);
        } else if (key == "dt") {
            c.dt = to_double(key, v);
            c.level.reset();
        } else if (key == "level") {
            if (v.empty() || v == "none")
                c.level.reset();
            else
                c.level = static_cast<int>(to_int(key, v));
        } else if (key == "seed") {
            c.seed = to_u64(key, v);
        } else if (key == "ensemble") {
            c.ensemble = static_cast<std::size_t>(to_u64(key, v));
        } else if (key == "jobs") {
            c.jobs = static_cast<int>(to_int(key, v));
        } else if (key == "output_dir") {
            c.output_dir = v;
        } else if (key == "newton_tol") {
            c.newton_tol = to_double(key, v);
        } else if (key == "newton_max_iter") {
            c.newton_max_iter = static_cast<int>(to_int(key, v));
        } else if (key == "k") {
            c.k = static_cast<int>(to_int(key, v));
        } else if (key == "horizon") {
            c.horizon = to_double(key, v);
        } else if (key == "window") {
            const auto w = to_doubles(key, v);
            if (w.size() != 2) fail("window expects two numbers");
            c.window_start = w[0];
            c.window_end = w[1];
        } else if (key == "tolerance") {
            c.tolerance = to_double(key, v);
        } else if (key == "k_max") {
            c.k_max = static_cast<int>(to_int(key, v));
        } else if (key == "t_eval") {
            c.t_eval = to_double(key, v);
        } else if (key == "levels") {
            c.levels.clear();
            for (const auto& s : split_list(v)) c.levels.push_back(static_cast<int>(to_int(key, s)));
        } else if (key == "reference_level") {
            c.reference_level = static_cast<int>(to_int(key, v));
        } else if (key == "xi") {
            c.xis = to_doubles(key, v);
        } else if (key == "eta") {
            c.etas = to_doubles(key, v);
        } else if (key == "x0") {
            c.x0 = to_double(key, v);
        } else if (key == "pullback_horizon") {
            c.pullback_horizon = to_double(key, v);
        } else if (key == "path_index") {
            c.path_index = to_u64(key, v);
        } else if (key == "threshold") {
            c.threshold = to_double(key, v);
        } else if (key == "slope_min") {
            c.slope_min = to_double(key, v);
        } else if (key == "slope_max") {
            c.slope_max = to_double(key, v);
        } else if (key == "moments") {
            c.moments = to_bool(key, v);
        } else if (key == "sup_diagnostic") {
            c.sup_diagnostic = to_bool(key, v);
        } else {
            fail("unknown key '" + key + "'");
        }
    }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
    std::vector<std::pair<std::string, std::string>> e;
    e.emplace_back("model", model);
    for (const auto& [k2, v] : model_params) e.emplace_back("model." + k2, num(v));
    e.emplace_back("theta", join(thetas));
    if (level)
        e.emplace_back("level", std::to_string(*level));
    else
        e.emplace_back("dt", num(dt));
    e.emplace_back("seed", std::to_string(seed));
    e.emplace_back("ensemble", std::to_string(ensemble));
    e.emplace_back("jobs", std::to_string(jobs));
    e.emplace_back("output_dir", output_dir);
    e.emplace_back("newton_tol", num(newton_tol));
    e.emplace_back("newton_max_iter", std::to_string(newton_max_iter));
    e.emplace_back("k", std::to_string(k));
    e.emplace_back("horizon", num(horizon));
    e.emplace_back("window", num(window_start) + ", " + num(window_end));
    e.emplace_back("tolerance", num(tolerance));
    e.emplace_back("k_max", std::to_string(k_max));
    e.emplace_back("t_eval", num(t_eval));
    e.emplace_back("levels", join(levels));
    e.emplace_back("reference_level", std::to_string(reference_level));
    e.emplace_back("xi", join(xis));
    e.emplace_back("eta", join(etas));
    e.emplace_back("x0", num(x0));
    e.emplace_back("pullback_horizon", num(pullback_horizon));
    e.emplace_back("path_index", std::to_string(path_index));
    e.emplace_back("threshold", num(threshold));
    if (slope_min) e.emplace_back("slope_min", num(*slope_min));
    if (slope_max) e.emplace_back("slope_max", num(*slope_max));
    e.emplace_back("moments", moments ? "true" : "false");
    e.emplace_back("sup_diagnostic", sup_diagnostic ? "true" : "false");
    return e;
}

Vector broadcast(double value, int dim) { return Vector::Constant(dim, value); }

void validate_config(const ExperimentConfig& c, Command command) {
    const ModelCatalogEntry entry = make_catalog_model(c.model, c.model_params);
    const SdeProblem& p = entry.problem;
    if (c.jobs < 1) fail("jobs must be >= 1");
    if (c.ensemble < 1) fail("ensemble must be >= 1");
    if (c.thetas.empty()) fail("theta list is empty");
    for (double theta : c.thetas) {
        ThetaScheme s{theta, c.step(), c.newton_tol, c.newton_max_iter};
        if (command != Command::converge) {
            s.validate();
            if (!on_grid(p.period, s.dt)) fail("the model period must be a multiple of dt");
        } else if (!(theta > 0.5 && theta <= 1.0)) {
            fail("theta must lie in (1/2, 1]");
        }
    }
    for (double x : c.xis)
        if (!std::isfinite(x)) fail("initial values must be finite");

    switch (command) {
    case Command::simulate:
        if (c.k < 0) fail("k must be >= 0");
        if (c.xis.empty()) fail("simulate needs at least one initial value");
        if (c.horizon < -c.k * p.period) fail("horizon precedes the start -k tau");
        if (!on_grid(c.horizon, c.step())) fail("horizon must be on the time grid");
        break;
    case Command::pullback:
        if (!(c.tolerance > 0.0)) fail("tolerance must be positive");
        if (c.k_max < 1) fail("k_max must be >= 1");
        if (!on_grid(c.t_eval, c.step()) || !(c.t_eval > -p.period)) fail("t_eval must be on the grid and > -tau");
        break;
    case Command::periodicity:
        if (c.k < 1) fail("k must be >= 1");
        if (!(c.window_start < c.window_end)) fail("window must be non-empty");
        if (!on_grid(c.window_start, c.step()) || !on_grid(c.window_end, c.step()))
            fail("window must be on the time grid");
        if (c.window_start - p.period < -c.k * p.period) fail("shifted window reaches before -k tau");
        if (c.pullback_horizon < 0.0 || !on_grid(c.pullback_horizon, p.period))
            fail("pullback_horizon must be a non-negative multiple of the period");
        break;
    case Command::converge: {
        if (c.levels.empty()) fail("levels must be non-empty");
        int lo = c.levels.front(), hi = c.levels.front();
        for (int l : c.levels) {
            lo = std::min(lo, l);
            hi = std::max(hi, l);
        }
        if (lo < 1) fail("levels must be >= 1");
        if (c.reference_level < hi || c.reference_level > 30) fail("reference_level must be in [max(levels), 30]");
        if (!(c.window_start < c.window_end)) fail("window must be non-empty");
        const double coarse = std::ldexp(1.0, -lo);
        if (!on_grid(c.window_start, coarse) || !on_grid(c.window_end, coarse))
            fail("window must be aligned with the coarsest level");
        break;
    }
    case Command::contraction:
        if (c.k < 1) fail("k must be >= 1");
        if (c.xis.empty() || c.etas.empty()) fail("contraction needs xi and eta");
        if (c.xis.front() == c.etas.front()) fail("xi and eta must differ");
        for (double theta : c.thetas) contraction_constant(p.lambda_min, p.one_sided_lipschitz, theta,
                                                           p.moment_exponent, c.step());
        if (c.moments && c.ensemble < 2) fail("moment monitoring needs ensemble >= 2");
        break;
    }
}

} // namespace rpst
