#pragma once

#include "rpst/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rpst {

enum class Command { simulate, pullback, periodicity, converge, contraction };

std::string to_string(Command c);
Command command_from_string(const std::string& name);

/**
 * Flat key = value configuration shared by all subcommands. Lines starting
 * with '#' are comments; lists are comma separated. Model parameters are
 * given as "model.<name> = value". See README for the full key list.
 */
struct ExperimentConfig {
    std::string model = "cubic_multiplicative";
    std::map<std::string, double> model_params;
    std::vector<double> thetas{1.0};
    double dt = 0.1;
    std::optional<int> level;            // when set, dt = 2^-level
    std::uint64_t seed = 20240501;
    std::size_t ensemble = 100;
    int jobs = 1;
    std::string output_dir = "rpst_out";
    double newton_tol = 1e-5;
    int newton_max_iter = 50;

    int k = 5;
    double horizon = 0.0;
    double window_start = -4.0;
    double window_end = 0.0;
    double tolerance = 1e-3;
    int k_max = 20;
    double t_eval = 0.0;
    std::vector<int> levels{6, 7, 8, 9, 10};
    int reference_level = 12;
    std::vector<double> xis{0.6};
    std::vector<double> etas{-0.6};
    double x0 = -0.2;
    double pullback_horizon = 10.0;
    std::uint64_t path_index = 0;
    double threshold = -1.0;             // < 0: per-check default
    std::optional<double> slope_min;
    std::optional<double> slope_max;
    bool moments = false;
    bool sup_diagnostic = false;

    /// Effective stepsize (2^-level when level is set).
    double step() const;

    /// key = value lines that reproduce this configuration.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Parses key = value text into raw entries; throws ParameterError on syntax errors.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Applies raw entries (later calls win); unknown keys are an error.
void apply_entries(ExperimentConfig& config, const std::map<std::string, std::string>& entries);

/// Precondition checks for the operations a subcommand feeds; runs before any simulation.
void validate_config(const ExperimentConfig& config, Command command);

/// Vector with every component equal to value.
Vector broadcast(double value, int dim);

} // namespace rpst
