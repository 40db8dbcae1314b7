#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rcd/problem.hpp"
#include "rcd/rng.hpp"

namespace rcd {

enum class Algorithm { kRcd, kRcdN, kCgd, kGm };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

// Stop once the objective decrease between consecutive trace rows has been
// <= epsilon for `window + 1` consecutive rows, i.e.
// F(x^{k-j}) - F(x^{k-j+1}) <= epsilon for j = 0..window.
struct PlateauWindow {
  int window = 10;
};

// Stop once F(x) - f_star <= gap at a trace row.
struct GapToReference {
  double f_star = 0.0;
  double gap = 1.0;
};

using StopRule = std::variant<PlateauWindow, GapToReference>;

struct SolverConfig {
  Algorithm algorithm = Algorithm::kRcd;
  double alpha = 0.0;
  double epsilon = 1e-5;
  double max_full_iterations = 1000;
  std::uint64_t seed = 0;
  StopRule stop_rule = PlateauWindow{};
  // Trace stride in full iterations.
  double trace_every = 1.0;

  void validate() const;
};

struct TraceRow {
  double full_iteration = 0.0;
  std::int64_t raw_iterations = 0;
  double objective = 0.0;
  double feasibility_defect = 0.0;
  double elapsed_seconds = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;

  const TraceRow& last() const { return rows.back(); }
};

enum class StopReason { kPlateau, kGapReached, kMaxIterations, kStationary };

std::string to_string(StopReason reason);

struct SolveResult {
  Vector x;
  ConvergenceTrace trace;
  StopReason reason = StopReason::kMaxIterations;
  // Coordinate-derivative and residual touches (nonzeros of Z read).
  std::uint64_t touches = 0;
};

// Uniformly random pair of blocks, exact two-block step.
// One full iteration is n/2 raw iterations.
SolveResult rcd_solve(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config);

// Uniformly random (m+1)-tuple of scalar blocks, exact step along
// the tuple's null-space direction. One full iteration is n/(m+1) raw
// iterations.
SolveResult rcd_n_solve(const CompositeProblem& problem, const Vector& x0,
                        const SolverConfig& config);

// Coordinate gradient descent with the Gauss-Southwell rule: full gradient,
// projected direction from the diag(L) knapsack, conformal realization, the
// elementary pair with the largest predicted decrease, exact pair step and
// Armijo backtracking. One full iteration per raw iteration.
SolveResult cgd_solve(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config);

// Composite projected gradient with constant 1/L_f, L_f from 30 power
// iterations on Z'Z (x1.01). One full iteration per raw iteration.
SolveResult gm_solve(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config);

// Dispatches on config.algorithm.
SolveResult solve(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config);

// Largest eigenvalue estimate of Z'Z (power iteration, `iterations` steps,
// scaled by 1.01).
double estimate_smooth_lipschitz(const SparseMatrix& Z, int iterations = 30);

// Uniformly random set of `count` distinct indices in [0, n), drawn
// sequentially: the p-th draw picks uniformly among the n - p unused indices.
// For count = 2 this is the pair rule used by rcd_solve.
std::vector<Index> sample_distinct(SplitMix64& rng, Index n, Index count);

}  // namespace rcd
