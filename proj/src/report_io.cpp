#include "rpst/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rpst {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_real(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
    out_ << (filled_ ? "," : "") << v;
    ++filled_;
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) throw std::logic_error("CSV row has the wrong number of cells");
    out_ << '\n';
    filled_ = 0;
}

void write_path_csv(std::ostream& out, const PathSolution& path) {
    const int d = path.states.empty() ? 0 : static_cast<int>(path.states.front().size());
    std::vector<std::string> header{"t"};
    for (int i = 1; i <= d; ++i) header.push_back("x_" + std::to_string(i));
    header.push_back("newton_iters");
    CsvWriter csv(out, header);
    for (std::size_t j = 0; j < path.size(); ++j) {
        csv.cell(path.times[j]);
        for (int i = 0; i < d; ++i) csv.cell(path.states[j](i));
        csv.cell(static_cast<long long>(path.newton_iters[j]));
        csv.end_row();
    }
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
    CsvWriter csv(out, {"level", "dt", "rms_error", "stderr"});
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        csv.cell(static_cast<long long>(report.levels[i]))
            .cell(report.stepsizes[i])
            .cell(report.rms_errors[i])
            .cell(report.stderrs[i]);
        csv.end_row();
    }
    csv.cell("slope").cell(report.fitted_slope).cell("").cell("");
    csv.end_row();
    csv.cell("intercept").cell(report.intercept).cell("").cell("");
    csv.end_row();
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + (dir / name).string() + " for writing");
    return out;
}

std::string gnuplot_script(const std::string& output_png, const std::string& xlabel, const std::string& ylabel,
                           const std::vector<PlotSeries>& series, bool log_axes) {
    std::ostringstream gp;
    gp << "# gnuplot script; run with: gnuplot <this file>\n"
       << "set datafile separator ','\n"
       << "set terminal pngcairo size 900,600\n"
       << "set output '" << output_png << "'\n"
       << "set xlabel '" << xlabel << "'\n"
       << "set ylabel '" << ylabel << "'\n"
       << "set key outside\n";
    if (log_axes) gp << "set logscale xy 2\n";
    gp << "plot ";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        gp << (i ? ", \\\n     " : "") << "'" << s.csv << "' every ::1 using " << s.x_column << ":" << s.y_column
           << " with " << (log_axes ? "linespoints" : "lines") << " title '" << s.title << "'";
    }
    gp << '\n';
    return gp.str();
}

} // namespace rpst
