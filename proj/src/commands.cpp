#include "rpst/commands.hpp"

#include "rpst/analysis.hpp"
#include "rpst/model.hpp"
#include "rpst/periodic.hpp"
#include "rpst/report_io.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#ifndef RPST_VERSION
#define RPST_VERSION "unknown"
#endif

namespace rpst {

namespace fs = std::filesystem;

namespace {

std::string tag(double theta) {
    std::ostringstream os;
    os << "theta" << theta;
    return os.str();
}

std::string short_num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

ThetaScheme scheme_for(const ExperimentConfig& c, double theta) {
    return {theta, c.step(), c.newton_tol, c.newton_max_iter};
}

double threshold_or(const ExperimentConfig& c, double fallback) { return c.threshold >= 0.0 ? c.threshold : fallback; }

void write_text(RunSummary& summary, const ExperimentConfig& c, const std::string& name, const std::string& text) {
    auto out = open_output(c.output_dir, name);
    out << text;
    summary.files.push_back(name);
}

template <class Fn>
void write_csv(RunSummary& summary, const ExperimentConfig& c, const std::string& name, Fn&& fill) {
    auto out = open_output(c.output_dir, name);
    fill(out);
    if (!out) throw std::runtime_error("failed writing " + name);
    summary.files.push_back(name);
}

} // namespace

bool RunSummary::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::string library_version() { return RPST_VERSION; }

RunSummary run_simulate(const ExperimentConfig& c) {
    RunSummary summary{Command::simulate, {}, {}};
    const ModelCatalogEntry model = make_catalog_model(c.model, c.model_params);
    const SdeProblem& p = model.problem;
    const double start = -c.k * p.period;
    for (double theta : c.thetas) {
        const ThetaScheme scheme = scheme_for(c, theta);
        const double w_end = std::max(c.horizon, start + scheme.dt);
        const WienerGrid grid = generate_for_step(c.seed, c.path_index, scheme.dt, {start, w_end}, p.noise_dim);
        std::vector<PathSolution> paths;
        for (double xi : c.xis) paths.push_back(simulate_path(p, scheme, c.k, c.horizon, broadcast(xi, p.state_dim), grid));

        const std::string stem = "simulate_" + tag(theta);
        write_csv(summary, c, stem + ".csv", [&](std::ostream& out) {
            std::vector<std::string> header{"t"};
            for (double xi : c.xis) header.push_back("xi=" + format_real(xi));
            CsvWriter csv(out, header);
            for (std::size_t j = 0; j < paths.front().size(); ++j) {
                csv.cell(paths.front().times[j]);
                for (const auto& path : paths) csv.cell(path.states[j](0));
                csv.end_row();
            }
        });
        for (std::size_t i = 0; i < paths.size(); ++i)
            write_csv(summary, c, stem + "_path" + std::to_string(i) + ".csv",
                      [&](std::ostream& out) { write_path_csv(out, paths[i]); });
        std::vector<PlotSeries> series;
        for (std::size_t i = 0; i < c.xis.size(); ++i)
            series.push_back({stem + ".csv", 1, static_cast<int>(i) + 2, "xi = " + short_num(c.xis[i])});
        write_text(summary, c, stem + ".gp", gnuplot_script(stem + ".png", "t", "X_t", series));

        if (c.xis.size() >= 2 && c.k >= 1 && c.horizon == 0.0) {
            const IndependenceReport rep = initial_value_independence(
                p, scheme, [&] {
                    std::vector<Vector> v;
                    for (double xi : c.xis) v.push_back(broadcast(xi, p.state_dim));
                    return v;
                }(),
                c.k, c.seed, threshold_or(c, 1e-3), c.path_index);
            summary.checks.push_back({"initial_value_independence " + tag(theta), rep.passed,
                                      "max distance " + short_num(rep.max_distance) + " for t >= " +
                                          short_num(rep.compare_from) + " (threshold " + short_num(rep.threshold) +
                                          ")"});
        }
    }
    return summary;
}

RunSummary run_pullback(const ExperimentConfig& c) {
    RunSummary summary{Command::pullback, {}, {}};
    const ModelCatalogEntry model = make_catalog_model(c.model, c.model_params);
    const SdeProblem& p = model.problem;
    for (double theta : c.thetas) {
        const ThetaScheme scheme = scheme_for(c, theta);
        const std::string stem = "pullback_" + tag(theta);
        PullbackResult res;
        try {
            res = pullback_converge(p, scheme, c.t_eval, broadcast(c.xis.front(), p.state_dim), c.tolerance, c.k_max,
                                    c.ensemble, c.seed, c.jobs);
        } catch (const ConvergenceError& e) {
            summary.checks.push_back({"pullback " + tag(theta), false, e.what()});
            continue;
        }
        write_csv(summary, c, stem + "_states.csv", [&](std::ostream& out) {
            std::vector<std::string> header{"path_index"};
            for (int i = 1; i <= p.state_dim; ++i) header.push_back("x_" + std::to_string(i));
            CsvWriter csv(out, header);
            for (std::size_t i = 0; i < res.states.size(); ++i) {
                csv.cell(static_cast<long long>(i));
                for (int d = 0; d < p.state_dim; ++d) csv.cell(res.states[i](d));
                csv.end_row();
            }
        });
        write_csv(summary, c, stem + "_gaps.csv", [&](std::ostream& out) {
            CsvWriter csv(out, {"k", "l2_gap"});
            for (std::size_t k = 0; k < res.gap_history.size(); ++k) {
                csv.cell(static_cast<long long>(k + 1)).cell(res.gap_history[k]);
                csv.end_row();
            }
        });
        write_text(summary, c, stem + ".gp",
                   gnuplot_script(stem + ".png", "k", "L2 gap", {{stem + "_gaps.csv", 1, 2, "gap"}}, true));
        summary.checks.push_back({"pullback " + tag(theta), res.converged,
                                  "k_used " + std::to_string(res.k_used) + ", gap " + short_num(res.l2_gap) +
                                      " (tolerance " + short_num(res.tolerance) + ")"});
    }
    return summary;
}

RunSummary run_periodicity(const ExperimentConfig& c) {
    RunSummary summary{Command::periodicity, {}, {}};
    const ModelCatalogEntry model = make_catalog_model(c.model, c.model_params);
    const SdeProblem& p = model.problem;
    const double thr = threshold_or(c, 1e-2);
    for (double theta : c.thetas) {
        const ThetaScheme scheme = scheme_for(c, theta);
        const std::string stem = "periodicity_" + tag(theta);

        const ShiftedPeriodicityReport shifted = periodicity_check_shifted(
            p, scheme, c.k, broadcast(c.xis.front(), p.state_dim), {c.window_start, c.window_end}, c.seed, thr,
            c.path_index);
        write_csv(summary, c, stem + "_shifted.csv", [&](std::ostream& out) {
            CsvWriter csv(out, {"t", "x_t", "t_shifted", "x_shifted"});
            for (std::size_t j = 0; j < shifted.times.size(); ++j) {
                csv.cell(shifted.times[j]).cell(shifted.original[j](0)).cell(shifted.times[j] - shifted.shift)
                    .cell(shifted.shifted[j](0));
                csv.end_row();
            }
        });
        write_text(summary, c, stem + "_shifted.gp",
                   gnuplot_script(stem + "_shifted.png", "t", "X",
                                  {{stem + "_shifted.csv", 1, 2, "X_t(omega)"},
                                   {stem + "_shifted.csv", 1, 4, "X_{t-tau}(Theta_tau omega)"}}));
        summary.checks.push_back({"periodicity_shifted " + tag(theta), shifted.passed,
                                  "max gap " + short_num(shifted.max_gap) + " (threshold " + short_num(thr) + ")"});

        const PullbackPeriodicityReport pb =
            periodicity_check_pullback(p, scheme, broadcast(c.x0, p.state_dim), c.pullback_horizon, c.seed, thr,
                                       c.path_index, c.jobs);
        write_csv(summary, c, stem + "_pullback.csv", [&](std::ostream& out) {
            CsvWriter csv(out, {"t", "x"});
            for (std::size_t j = 0; j < pb.times.size(); ++j) {
                csv.cell(pb.times[j]).cell(pb.curve[j](0));
                csv.end_row();
            }
        });
        write_text(summary, c, stem + "_pullback.gp",
                   gnuplot_script(stem + "_pullback.png", "t", "X^0(t, Theta_{-t} omega)",
                                  {{stem + "_pullback.csv", 1, 2, "pull-back curve"}}));
        summary.checks.push_back(
            {"periodicity_pullback " + tag(theta), pb.passed,
             pb.deviation_defined ? "max period deviation " + short_num(pb.max_deviation) + " (threshold " +
                                        short_num(thr) + ")"
                                  : "horizon too short for a period comparison (reported as 0)"});
    }
    return summary;
}

RunSummary run_converge(const ExperimentConfig& c) {
    RunSummary summary{Command::converge, {}, {}};
    const ModelCatalogEntry model = make_catalog_model(c.model, c.model_params);
    for (double theta : c.thetas) {
        MsErrorConfig mc;
        mc.theta = theta;
        mc.levels = c.levels;
        mc.reference_level = c.reference_level;
        mc.ensemble = c.ensemble;
        mc.t_start = c.window_start;
        mc.t_end = c.window_end;
        mc.seed = c.seed;
        mc.xi = broadcast(c.xis.front(), model.problem.state_dim);
        mc.newton_tol = c.newton_tol;
        mc.sup_diagnostic = c.sup_diagnostic;
        mc.jobs = c.jobs;
        const ConvergenceReport rep = ms_error(model.problem, mc);

        const std::string stem = "converge_" + tag(theta);
        write_csv(summary, c, stem + ".csv", [&](std::ostream& out) { write_convergence_csv(out, rep); });
        if (c.sup_diagnostic)
            write_csv(summary, c, stem + "_sup.csv", [&](std::ostream& out) {
                CsvWriter csv(out, {"level", "dt", "sup_rms_error"});
                for (std::size_t i = 0; i < rep.levels.size(); ++i) {
                    csv.cell(static_cast<long long>(rep.levels[i])).cell(rep.stepsizes[i]).cell(rep.sup_rms_errors[i]);
                    csv.end_row();
                }
            });
        write_text(summary, c, stem + ".gp",
                   gnuplot_script(stem + ".png", "dt", "rms error", {{stem + ".csv", 2, 3, "theta scheme"}}, true));

        const bool in_band = (!c.slope_min || rep.fitted_slope >= *c.slope_min) &&
                             (!c.slope_max || rep.fitted_slope <= *c.slope_max) && std::isfinite(rep.fitted_slope);
        std::string band;
        if (c.slope_min || c.slope_max)
            band = " (band [" + (c.slope_min ? short_num(*c.slope_min) : std::string("-inf")) + ", " +
                   (c.slope_max ? short_num(*c.slope_max) : std::string("inf")) + "])";
        summary.checks.push_back({"converge " + tag(theta), in_band, "slope " + short_num(rep.fitted_slope) + band});
    }
    return summary;
}

RunSummary run_contraction(const ExperimentConfig& c) {
    RunSummary summary{Command::contraction, {}, {}};
    const ModelCatalogEntry model = make_catalog_model(c.model, c.model_params);
    const SdeProblem& p = model.problem;
    for (double theta : c.thetas) {
        const ThetaScheme scheme = scheme_for(c, theta);
        const std::string stem = "contraction_" + tag(theta);
        const ContractionTestResult res =
            numerical_contraction_test(p, scheme, broadcast(c.xis.front(), p.state_dim),
                                       broadcast(c.etas.front(), p.state_dim), c.k, c.ensemble, c.seed, c.jobs);
        write_csv(summary, c, stem + "_constants.csv", [&](std::ostream& out) {
            CsvWriter csv(out, {"quantity", "value"});
            csv.cell("c_delta").cell(res.constants.c_delta);
            csv.end_row();
            for (int b = 0; b < 3; ++b) {
                csv.cell("branch_" + std::to_string(b + 1)).cell(res.constants.branches[static_cast<std::size_t>(b)]);
                csv.end_row();
            }
            csv.cell("exact_rate").cell(res.constants.exact_rate);
            csv.end_row();
        });
        write_csv(summary, c, stem + "_decay.csv", [&](std::ostream& out) {
            CsvWriter csv(out, {"j", "t", "mean_sq_diff", "envelope"});
            for (std::size_t j = 0; j < res.times.size(); ++j) {
                csv.cell(static_cast<long long>(j)).cell(res.times[j]).cell(res.mean_sq_diff[j]).cell(res.envelope[j]);
                csv.end_row();
            }
        });
        write_text(summary, c, stem + "_decay.gp",
                   gnuplot_script(stem + "_decay.png", "j", "E|X_j - Y_j|^2",
                                  {{stem + "_decay.csv", 1, 3, "paired ensembles"},
                                   {stem + "_decay.csv", 1, 4, "safety * C * C_dt^j"}}));
        summary.checks.push_back({"contraction " + tag(theta), res.passed,
                                  "C_dt " + short_num(res.constants.c_delta) + ", checked " +
                                      std::to_string(res.checked_steps) + " steps, reached floor " +
                                      (res.reached_floor ? "yes" : "no") + ", dominated " +
                                      (res.dominated ? "yes" : "no")});

        if (c.moments) {
            const MomentSeries m = moment_monitor(p, scheme, c.k, c.ensemble, c.seed,
                                                  broadcast(c.xis.front(), p.state_dim), c.jobs);
            write_csv(summary, c, stem + "_moments.csv", [&](std::ostream& out) {
                CsvWriter csv(out, {"t", "second_moment", "stderr"});
                for (std::size_t j = 0; j < m.times.size(); ++j) {
                    csv.cell(m.times[j]).cell(m.second_moment[j]).cell(m.stderrs[j]);
                    csv.end_row();
                }
            });
            summary.checks.push_back({"moment_bound " + tag(theta), !m.growth_flag,
                                      "early mean " + short_num(m.early_mean) + ", late mean " +
                                          short_num(m.late_mean)});
        }
    }
    return summary;
}

RunSummary run_command(Command command, const ExperimentConfig& config) {
    validate_config(config, command);
    RunSummary summary;
    switch (command) {
    case Command::simulate: summary = run_simulate(config); break;
    case Command::pullback: summary = run_pullback(config); break;
    case Command::periodicity: summary = run_periodicity(config); break;
    case Command::converge: summary = run_converge(config); break;
    case Command::contraction: summary = run_contraction(config); break;
    }

    std::ostringstream manifest;
    manifest << "# rpst " << library_version() << "\n"
             << "# command " << to_string(command) << "\n"
             << "# reproduce: rpst " << to_string(command) << " --config manifest.txt\n";
    for (const auto& [key, value] : config.entries()) manifest << key << " = " << value << "\n";
    for (const auto& check : summary.checks)
        manifest << "# check " << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << "\n";
    write_text(summary, config, "manifest.txt", manifest.str());
    return summary;
}

void print_summary(std::ostream& out, const RunSummary& summary) {
    for (const auto& c : summary.checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    out << "wrote " << summary.files.size() << " file(s)\n";
}

} // namespace rpst
