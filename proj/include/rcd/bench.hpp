#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcd/apps.hpp"
#include "rcd/solvers.hpp"

namespace rcd {

// Which problem to build. Generator families use n/dim/density/lambda and
// gen_seed; svm and custom read `data`.
//
// custom: a svmlight file whose i-th line holds column z_i and q_i as its
// label, with h = lambda|x| + Box[lower, upper] and e'x = b.
struct ProblemSpec {
  std::string family = "svm";
  std::string data;
  Index n = 0;
  Index dim = 0;
  Index density = 0;
  double lambda = 0.0;
  double C = 1.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  double b = 1.0;
  std::uint64_t gen_seed = 0;
  std::optional<StartPoint> x0;
};

struct BuiltProblem {
  CompositeProblem problem;
  Vector x0;
};

BuiltProblem build_problem(const ProblemSpec& spec);

struct SolverEntry {
  std::string label;
  SolverConfig config;
};

struct ExperimentManifest {
  ProblemSpec problem;
  std::vector<SolverEntry> solvers;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = ".";
  int jobs = 1;
};

// Plain `key = value` lines, `#` comments. Keys: family, data, n, dim,
// density, lambda, C, lower, upper, b, gen_seed, x0, seeds (comma list),
// output, jobs, and repeated `solver = <algo> [key=value ...]` lines with
// alpha, eps, max_full_iters, window, trace_every, label. Throws ParseError.
ExperimentManifest parse_manifest(std::istream& in);
ExperimentManifest parse_manifest(const std::string& path);

struct CellResult {
  std::string label;
  std::uint64_t seed = 0;
  std::optional<SolveResult> result;
  std::string status;
};

struct ExperimentOutcome {
  std::vector<CellResult> cells;

  bool all_ok() const;
};

// Runs every (solver, seed) cell, up to manifest.jobs at a time, and writes
//   trace_<label>_seed<seed>.csv  per cell,
//   summary.csv,
//   aggregate_<label>.csv         per solver when there are >= 2 seeds.
// A failing cell is recorded in the summary status column.
ExperimentOutcome run_experiment(const ExperimentManifest& manifest);

// 17 significant digits, round-trips exactly.
std::string format_double(double value);

inline constexpr const char* kTraceHeader = "full_iteration,raw_iterations,objective,feasibility_defect";
inline constexpr const char* kSummaryHeader =
    "algorithm,seed,full_iterations,raw_iterations,objective,feasibility,elapsed_seconds,status";
inline constexpr const char* kAggregateHeader = "full_iteration,mean,min,max";

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace);
void write_summary_csv(std::ostream& out, const std::vector<CellResult>& cells);

struct AggregateRow {
  double full_iteration = 0.0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Row-wise mean/min/max objective across traces sharing one row schedule.
// Traces that stopped early contribute their last objective to later rows.
std::vector<AggregateRow> aggregate_traces(const std::vector<const ConvergenceTrace*>& traces);

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

struct RateFit {
  // Least-squares slope of log(gap) against log(k).
  double loglog_slope = 0.0;
  // R^2 of the least-squares line of log(gap) against k.
  double linear_r2 = 0.0;
  // Slope of that line, i.e. log of the per-iteration contraction.
  double linear_slope = 0.0;
};

// Needs k > 0 and gap > 0 at every point, at least two points.
RateFit fit_rate(std::span<const double> k, std::span<const double> gap);

// Fit over the aggregate rows with k_from <= full_iteration <= k_to, using
// gap = mean - f_star.
RateFit fit_rate(const std::vector<AggregateRow>& rows, double f_star, double k_from, double k_to);

}  // namespace rcd
