#include "isaacs/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "isaacs/decomposition.hpp"
#include "isaacs/discrete.hpp"
#include "isaacs/errors.hpp"
#include "isaacs/experiments.hpp"
#include "isaacs/grid.hpp"
#include "isaacs/io.hpp"
#include "isaacs/solver.hpp"

namespace isaacs {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

void note(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

void write_json(const std::filesystem::path& path, const json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

/// Scalars every summary repeats so each artifact is self-describing.
json config_echo(const RunConfig& config) {
  json j;
  j["family"] = config.problem_family;
  j["stencil"] = config.stencil_name;
  j["seed"] = config.seed;
  j["delta"] = config.problem.bounds.delta;
  j["k0"] = config.problem.bounds.k0;
  return j;
}

json solver_echo(const SolveReport& report) {
  json j;
  j["iterations"] = report.iterations;
  j["policy_iterations"] = report.policy_iterations;
  j["pseudo_steps"] = report.pseudo_steps;
  j["final_residual"] = report.final_residual;
  j["method"] = to_string(report.method_used);
  return j;
}

void run_solve(const RunConfig& config, const std::filesystem::path& dir,
               std::ostream* log, json& timing) {
  note(log, "building grid at h = " + format_double(config.h));
  const Grid grid = build_grid(config.problem.domain, config.stencil, config.h);
  note(log, "grid: " + std::to_string(grid.n_interior) + " interior, " +
                std::to_string(grid.n_boundary()) + " boundary points");
  const SchemeTables tables = build_scheme_tables(config.problem, grid);
  const GridFunction initial = sample(grid, config.problem.g.value);

  note(log, "solving");
  auto [w, report] = solve_scheme(tables, initial, config.solver);
  note(log, "done: residual " + format_double(report.final_residual) + " after " +
                std::to_string(report.iterations) + " iterations (" +
                to_string(report.method_used) + ")");

  write_grid_csv(grid, dir / "grid.csv");

  CsvBuilder csv({"i", "j", "x", "y", "class", "value", "residual", "alpha",
                  "beta"});
  const auto& labels_a = config.problem.controls_a.labels;
  const auto& labels_b = config.problem.controls_b.labels;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool interior = grid.is_interior(i);
    std::string residual, alpha, beta;
    if (interior) {
      const SchemeValue sv = eval_scheme(tables, w, i);
      residual = cell(sv.value);
      alpha = labels_a[sv.alpha];
      beta = labels_b[sv.beta];
    }
    csv.add_row({cell(grid.coords[i][0]), cell(grid.coords[i][1]),
                 cell(grid.points[i][0]), cell(grid.points[i][1]),
                 interior ? "interior" : "boundary", cell(w[i]), residual,
                 alpha, beta});
  }
  atomic_write(dir / "solution.csv", csv.str());

  double lo = 0.0, hi = 0.0;
  if (!w.values.empty()) {
    lo = hi = w.values.front();
    for (double v : w.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  json j = config_echo(config);
  j["mode"] = to_string(config.mode);
  j["h"] = config.h;
  j["grid"] = {{"n_interior", grid.n_interior},
               {"n_boundary", grid.n_boundary()}};
  j["solver"] = solver_echo(report);
  j["solution"] = {{"min", lo}, {"max", hi}};
  j["version"] = kVersion;
  write_json(dir / "report.json", j);

  timing["solve_seconds"] = report.wall_time;
}

void run_rates(const RunConfig& config, const std::filesystem::path& dir,
               std::ostream* log, json&) {
  note(log, "grid-rate study over " + std::to_string(config.h_sequence.size()) +
                " resolutions");
  const RateReport r = run_grid_rate(*config.manufactured, config.h_sequence,
                                     config.stencil, config.solver);
  note(log, "fitted exponent " + format_double(r.fitted_exponent));

  CsvBuilder csv({"h", "error"});
  for (std::size_t i = 0; i < r.abscissae.size(); ++i)
    csv.add_row({cell(r.abscissae[i]), cell(r.errors[i])});
  atomic_write(dir / "rates.csv", csv.str());

  json j = config_echo(config);
  j["mode"] = to_string(config.mode);
  j["h"] = r.abscissae;
  j["errors"] = r.errors;
  j["fitted_exponent"] = r.fitted_exponent;
  j["fit_residual"] = r.fit_residual;
  j["points_used"] = r.points_used;
  j["caveat"] = r.caveat;
  j["version"] = kVersion;
  write_json(dir / "summary.json", j);
}

void run_sandwich_mode(const RunConfig& config, const std::filesystem::path& dir,
                       std::ostream* log, json&) {
  note(log, "building grid at h = " + format_double(config.h));
  const Grid grid = build_grid(config.problem.domain, config.stencil, config.h);
  note(log, "truncation study over " + std::to_string(config.levels.size()) +
                " levels");
  const RateReport r =
      run_sandwich(config.problem, grid, config.levels, config.solver,
                   config.pucci_overridden ? &config.pucci : nullptr);
  note(log, "fitted decay exponent " + format_double(r.fitted_exponent));

  CsvBuilder csv({"K", "gap", "reference_gap"});
  for (std::size_t i = 0; i < r.abscissae.size(); ++i)
    csv.add_row({cell(r.abscissae[i]), cell(r.errors[i]),
                 cell(r.reference_gaps[i])});
  atomic_write(dir / "sandwich.csv", csv.str());

  json j = config_echo(config);
  j["mode"] = to_string(config.mode);
  j["h"] = config.h;
  j["levels"] = r.abscissae;
  j["gaps"] = r.errors;
  j["reference_gaps"] = r.reference_gaps;
  j["fitted_exponent"] = r.fitted_exponent;
  j["fit_residual"] = r.fit_residual;
  j["points_used"] = r.points_used;
  j["caveat"] = r.caveat;
  j["pucci"] = {{"delta_hat", config.pucci.delta_hat}, {"k1", config.pucci.k1}};
  j["version"] = kVersion;
  write_json(dir / "summary.json", j);
}

void run_check_decomposition(const RunConfig& config,
                             const std::filesystem::path& dir,
                             std::ostream* log, json&) {
  const auto& problem = config.problem;
  const std::vector<Point> points =
      sample_in_domain(problem.domain, config.samples, config.seed);
  note(log, "auditing " + std::to_string(points.size()) + " points x " +
                std::to_string(problem.controls_a.size()) + " x " +
                std::to_string(problem.controls_b.size()) + " control pairs");

  CsvBuilder csv({"point_id", "x", "y", "alpha", "beta", "feasible",
                  "min_coefficient", "reconstruction_residual"});
  std::size_t infeasible = 0;
  double min_coefficient = std::numeric_limits<double>::infinity();
  double max_residual = 0.0;
  std::optional<Eigen::MatrixXd> first_bad;
  std::string first_bad_where;

  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t alpha = 0; alpha < problem.controls_a.size(); ++alpha) {
      for (std::size_t beta = 0; beta < problem.controls_b.size(); ++beta) {
        const Eigen::MatrixXd a = problem.coeffs.a(alpha, beta, points[p]);
        const DecompositionAuditRow row = audit_decomposition(
            a, config.stencil, static_cast<std::int64_t>(p), alpha, beta);
        csv.add_row({cell(row.point_id), cell(points[p][0]), cell(points[p][1]),
                     problem.controls_a.labels[alpha],
                     problem.controls_b.labels[beta],
                     row.feasible ? "yes" : "no", cell(row.min_coefficient),
                     cell(row.reconstruction_residual)});
        if (row.feasible) {
          min_coefficient = std::min(min_coefficient, row.min_coefficient);
          max_residual = std::max(max_residual, row.reconstruction_residual);
        } else {
          ++infeasible;
          if (!first_bad) {
            first_bad = a;
            first_bad_where = "point " + std::to_string(p) + " (" +
                              format_double(points[p][0]) + ", " +
                              format_double(points[p][1]) + "), controls (" +
                              problem.controls_a.labels[alpha] + ", " +
                              problem.controls_b.labels[beta] + ")";
          }
        }
      }
    }
  }
  atomic_write(dir / "audit.csv", csv.str());

  json j = config_echo(config);
  j["mode"] = to_string(config.mode);
  j["points"] = points.size();
  j["control_pairs"] = problem.controls_a.size() * problem.controls_b.size();
  j["infeasible"] = infeasible;
  if (infeasible == 0) {
    j["min_coefficient"] = min_coefficient;
    j["max_reconstruction_residual"] = max_residual;
  }
  j["certified_floor"] =
      decomposition_floor(problem.bounds.delta, config.stencil);
  j["version"] = kVersion;
  write_json(dir / "summary.json", j);

  if (first_bad)
    throw DecompositionInfeasible(
        "coefficient matrix at " + first_bad_where +
            " admits no nonnegative decomposition on the '" +
            config.stencil_name + "' stencil",
        *first_bad);
  note(log, "all matrices decomposable; smallest coefficient " +
                format_double(min_coefficient));
}

void run_verify_barrier(const RunConfig& config,
                        const std::filesystem::path& dir, std::ostream* log,
                        json&) {
  const double delta = config.problem.bounds.delta;
  const double k1 = config.pucci.k1;
  note(log, "tuning barrier for delta = " + format_double(delta) +
                ", k1 = " + format_double(k1));
  const Barrier barrier = tune_barrier(config.problem.domain, delta, k1);
  note(log, "candidate mu = " + format_double(barrier.mu) + ", R = " +
                format_double(barrier.R) + "; verifying with " +
                std::to_string(config.samples) + " samples");
  const double max_slack = verify_barrier(barrier, config.problem.domain, delta,
                                          k1, config.samples, config.seed);
  note(log, "max sampled slack " + format_double(max_slack));

  json j = config_echo(config);
  j["mode"] = to_string(config.mode);
  j["k1"] = k1;
  j["mu"] = barrier.mu;
  j["R"] = barrier.R;
  j["samples"] = config.samples;
  j["max_sampled_slack"] = max_slack;
  j["required_bound"] = -1.0;
  j["version"] = kVersion;
  write_json(dir / "barrier.json", j);
}

}  // namespace

void run_job(const RunConfig& config, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path dir = config.output_dir;
  std::filesystem::create_directories(dir);
  note(log, "mode " + to_string(config.mode) + ", artifacts in " + dir.string());

  json timing;
  switch (config.mode) {
    case RunMode::solve:
      run_solve(config, dir, log, timing);
      break;
    case RunMode::rates:
      run_rates(config, dir, log, timing);
      break;
    case RunMode::sandwich:
      run_sandwich_mode(config, dir, log, timing);
      break;
    case RunMode::check_decomposition:
      run_check_decomposition(config, dir, log, timing);
      break;
    case RunMode::verify_barrier:
      run_verify_barrier(config, dir, log, timing);
      break;
  }

  timing["total_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  write_json(dir / "timing.json", timing);
}

int run_to_exit_code(const RunConfig& config, std::ostream& err,
                     std::ostream* log) {
  try {
    run_job(config, log);
    return 0;
  } catch (const DecompositionInfeasible& e) {
    std::ostringstream matrix;
    matrix << e.offending;
    err << "error: " << e.what() << "\noffending matrix:\n"
        << matrix.str() << '\n';
    return 3;
  } catch (const NoConvergence& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const OrderingViolation& e) {
    err << "error: " << e.what() << '\n';
    return 5;
  } catch (const BarrierInvalid& e) {
    err << "error: " << e.what() << '\n';
    return 6;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace isaacs
