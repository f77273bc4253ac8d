#pragma once

#include "rpst/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rpst {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunSummary {
    Command command = Command::simulate;
    std::vector<CheckResult> checks;
    std::vector<std::string> files; // written under output_dir

    bool all_passed() const;
};

/// Library version string baked in at build time.
std::string library_version();

RunSummary run_simulate(const ExperimentConfig& config);
RunSummary run_pullback(const ExperimentConfig& config);
RunSummary run_periodicity(const ExperimentConfig& config);
RunSummary run_converge(const ExperimentConfig& config);
RunSummary run_contraction(const ExperimentConfig& config);

/// Validates, dispatches, and writes manifest.txt (config echo + seed + version) to output_dir.
RunSummary run_command(Command command, const ExperimentConfig& config);

/// One line per check: "PASS name: detail" / "FAIL ...".
void print_summary(std::ostream& out, const RunSummary& summary);

} // namespace rpst
