#pragma once

#include "rpst/analysis.hpp"
#include "rpst/integrator.hpp"

#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace rpst {

/// 17 significant digits, round-trippable.
std::string format_real(double v);

/// Comma separated rows with a header; floats via format_real.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);

    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(const std::string& v);
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

/// Columns t, x_1..x_d, newton_iters.
void write_path_csv(std::ostream& out, const PathSolution& path);

/// Columns level, dt, rms_error, stderr; footer rows "slope" and "intercept".
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

/// Opens a file for writing under dir, creating dir; throws std::runtime_error on failure.
std::ofstream open_output(const std::filesystem::path& dir, const std::string& name);

struct PlotSeries {
    std::string csv;
    int x_column = 1;
    int y_column = 2;
    std::string title;
};

/// Standalone gnuplot script drawing the given CSV columns (png terminal).
std::string gnuplot_script(const std::string& output_png, const std::string& xlabel, const std::string& ylabel,
                           const std::vector<PlotSeries>& series, bool log_axes = false);

} // namespace rpst
