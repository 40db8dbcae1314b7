#include "rcd/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "rcd/conformal.hpp"
#include "rcd/directions.hpp"
#include "rcd/error.hpp"
#include "rcd/knapsack.hpp"
#include "rcd/rng.hpp"

namespace rcd {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kRcd: return "rcd";
    case Algorithm::kRcdN: return "rcdn";
    case Algorithm::kCgd: return "cgd";
    case Algorithm::kGm: return "gm";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "rcd") return Algorithm::kRcd;
  if (name == "rcdn") return Algorithm::kRcdN;
  if (name == "cgd") return Algorithm::kCgd;
  if (name == "gm") return Algorithm::kGm;
  throw Error(Error::Kind::kInvalidArgument, "unknown algorithm '" + name + "'");
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kPlateau: return "plateau";
    case StopReason::kGapReached: return "gap_reached";
    case StopReason::kMaxIterations: return "max_iterations";
    case StopReason::kStationary: return "stationary";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0)) throw Error(Error::Kind::kInvalidArgument, "epsilon must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Error::Kind::kInvalidArgument, "alpha must lie in [0,1]");
  if (!(max_full_iterations >= 0.0)) {
    throw Error(Error::Kind::kInvalidArgument, "max_full_iterations must be nonnegative");
  }
  if (!(trace_every > 0.0)) throw Error(Error::Kind::kInvalidArgument, "trace_every must be positive");
  if (const auto* plateau = std::get_if<PlateauWindow>(&stop_rule); plateau && plateau->window < 0) {
    throw Error(Error::Kind::kInvalidArgument, "plateau window must be nonnegative");
  }
}

std::vector<Index> sample_distinct(SplitMix64& rng, Index n, Index count) {
  if (count > n || count < 0) throw Error(Error::Kind::kInvalidArgument, "cannot sample that many distinct indices");
  std::vector<Index> drawn;
  std::vector<Index> sorted;
  drawn.reserve(static_cast<std::size_t>(count));
  sorted.reserve(static_cast<std::size_t>(count));
  for (Index p = 0; p < count; ++p) {
    auto r = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n - p)));
    for (Index used : sorted) {
      if (used <= r) ++r;
    }
    drawn.push_back(r);
    sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), r), r);
  }
  return drawn;
}

double estimate_smooth_lipschitz(const SparseMatrix& Z, int iterations) {
  if (Z.cols() == 0) return 0.0;
  Vector v = Vector::Ones(Z.cols()) / std::sqrt(static_cast<double>(Z.cols()));
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = Z.transpose() * (Z * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    estimate = norm;
    v = w / norm;
  }
  return 1.01 * estimate;
}

namespace {

using Clock = std::chrono::steady_clock;

// Owns the trace, the row schedule and the stopping rules shared by all four
// methods.
class Driver {
 public:
  Driver(const CompositeProblem& problem, const SolverConfig& config, double raw_per_full)
      : problem_(problem),
        config_(config),
        raw_per_full_(raw_per_full),
        raw_per_row_(std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::llround(config.trace_every * raw_per_full)))),
        start_(Clock::now()) {}

  double full_iterations(std::int64_t raw) const { return static_cast<double>(raw) / raw_per_full_; }

  bool row_due(std::int64_t raw) const { return raw % raw_per_row_ == 0; }

  void record(SolverState& state, std::int64_t raw) {
    state.feasibility_defect = problem_.coupling().defect(state.x);
    TraceRow row;
    row.full_iteration = full_iterations(raw);
    row.raw_iterations = raw;
    row.objective = state.objective;
    row.feasibility_defect = state.feasibility_defect;
    row.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    if (!trace_.rows.empty()) {
      const double decrease = trace_.rows.back().objective - row.objective;
      plateau_run_ = decrease <= config_.epsilon ? plateau_run_ + 1 : 0;
    }
    trace_.rows.push_back(row);
  }

  // Evaluated right after record().
  std::optional<StopReason> should_stop() const {
    const TraceRow& row = trace_.rows.back();
    if (const auto* plateau = std::get_if<PlateauWindow>(&config_.stop_rule)) {
      if (plateau_run_ >= plateau->window + 1) return StopReason::kPlateau;
    } else {
      const auto& gap = std::get<GapToReference>(config_.stop_rule);
      if (row.objective - gap.f_star <= gap.gap) return StopReason::kGapReached;
    }
    if (row.full_iteration >= config_.max_full_iterations) return StopReason::kMaxIterations;
    return std::nullopt;
  }

  SolveResult finish(SolverState& state, std::int64_t raw, StopReason reason) {
    refresh(problem_, state);
    if (trace_.rows.empty() || trace_.rows.back().raw_iterations != raw) {
      record(state, raw);
    } else {
      TraceRow& row = trace_.rows.back();
      row.objective = state.objective;
      row.feasibility_defect = state.feasibility_defect;
    }
    SolveResult result;
    result.x = state.x;
    result.trace = std::move(trace_);
    result.reason = reason;
    result.touches = state.touches;
    return result;
  }

 private:
  const CompositeProblem& problem_;
  const SolverConfig& config_;
  double raw_per_full_;
  std::int64_t raw_per_row_;
  Clock::time_point start_;
  ConvergenceTrace trace_;
  int plateau_run_ = 0;
};

SolverState checked_start(const CompositeProblem& problem, const Vector& x0,
                          const SolverConfig& config) {
  config.validate();
  if (x0.size() != problem.dim()) throw Error(Error::Kind::kDimension, "x0 has the wrong length");
  SolverState state = make_state(problem, x0);
  if (state.objective == kInfiniteObjective) {
    throw Error(Error::Kind::kInfeasible, "x0 lies outside dom h");
  }
  if (state.feasibility_defect > 1e-9 * problem.coupling().defect_scale(x0)) {
    throw Error(Error::Kind::kInfeasible, "x0 violates the coupling constraint");
  }
  return state;
}

void check_descent(double before, double after) {
  if (after > before + 1e-9 * (1.0 + std::abs(before))) {
    throw Error(Error::Kind::kInternal, "objective increased after an exact model step");
  }
}

CompositeProblem with_config_alpha(const CompositeProblem& problem, const SolverConfig& config) {
  return problem.alpha() == config.alpha ? problem : problem.with_alpha(config.alpha);
}

BlockStep all_blocks_step(const CompositeProblem& problem, Vector values) {
  BlockStep step;
  step.blocks.resize(static_cast<std::size_t>(problem.num_blocks()));
  std::iota(step.blocks.begin(), step.blocks.end(), Index{0});
  step.values = std::move(values);
  return step;
}

// Knapsack for min <g,s> + 1/2 sum w_c s_c^2 + h(x+s) - h(x) s.t. a's = 0.
SeparableKnapsack<double> full_knapsack(const CompositeProblem& problem, const SolverState& state,
                                        const Vector& gradient, const Vector& weight) {
  const SeparableTerm& h = problem.nonsmooth();
  SeparableKnapsack<double> sub;
  sub.g = gradient;
  sub.weight = weight;
  sub.a = problem.coupling().a();
  sub.b = 0.0;
  sub.lower = h.lowers() - state.x;
  sub.upper = h.uppers() - state.x;
  if (h.has_l1()) {
    sub.lambda = h.lambdas();
    sub.kink = -state.x;
  }
  return sub;
}

void require_single_scalar(const CompositeProblem& problem, const char* who) {
  if (!problem.coupling().is_single()) {
    throw Error(Error::Kind::kUnsupported, std::string(who) + " needs a single coupling constraint");
  }
  if (!problem.partition().all_scalar()) {
    throw Error(Error::Kind::kUnsupported, std::string(who) + " supports scalar blocks only");
  }
}

}  // namespace

SolveResult rcd_solve(const CompositeProblem& base, const Vector& x0, const SolverConfig& config) {
  const CompositeProblem problem = with_config_alpha(base, config);
  if (!problem.coupling().is_single()) {
    throw Error(Error::Kind::kUnsupported, "rcd needs a single coupling constraint; use rcdn");
  }
  SolverState state = checked_start(problem, x0, config);
  const Index N = problem.num_blocks();
  Driver driver(problem, config, static_cast<double>(problem.dim()) / 2.0);
  SplitMix64 rng(config.seed);

  std::int64_t raw = 0;
  driver.record(state, raw);
  if (auto stop = driver.should_stop()) return driver.finish(state, raw, *stop);
  for (;;) {
    const std::vector<Index> pair = sample_distinct(rng, N, 2);
    const BlockStep step = two_block_direction(problem, state, pair[0], pair[1]);
    const double before = state.objective;
    apply_update(problem, state, step);
    check_descent(before, state.objective);
    ++raw;
    if (driver.row_due(raw)) {
      driver.record(state, raw);
      if (auto stop = driver.should_stop()) return driver.finish(state, raw, *stop);
    }
  }
}

SolveResult rcd_n_solve(const CompositeProblem& base, const Vector& x0, const SolverConfig& config) {
  const CompositeProblem problem = with_config_alpha(base, config);
  if (!problem.partition().all_scalar()) {
    throw Error(Error::Kind::kUnsupported, "rcdn supports scalar blocks only");
  }
  SolverState state = checked_start(problem, x0, config);
  const Index N = problem.num_blocks();
  const Index m = problem.coupling().num_constraints();
  if (N < m + 1) throw Error(Error::Kind::kInvalidArgument, "rcdn needs at least m + 1 blocks");
  Driver driver(problem, config, static_cast<double>(problem.dim()) / static_cast<double>(m + 1));
  SplitMix64 rng(config.seed);

  constexpr int kMaxResamples = 10000;
  std::int64_t raw = 0;
  driver.record(state, raw);
  if (auto stop = driver.should_stop()) return driver.finish(state, raw, *stop);
  for (;;) {
    std::optional<BlockStep> step;
    for (int attempt = 0; !step; ++attempt) {
      if (attempt == kMaxResamples) {
        throw Error(Error::Kind::kUnsupported, "rcdn: no tuple with a one-dimensional null space found");
      }
      const std::vector<Index> tuple = sample_distinct(rng, N, m + 1);
      step = tuple_direction(problem, state, tuple);
    }
    const double before = state.objective;
    apply_update(problem, state, *step);
    check_descent(before, state.objective);
    ++raw;
    if (driver.row_due(raw)) {
      driver.record(state, raw);
      if (auto stop = driver.should_stop()) return driver.finish(state, raw, *stop);
    }
  }
}

SolveResult cgd_solve(const CompositeProblem& base, const Vector& x0, const SolverConfig& config) {
  const CompositeProblem problem = with_config_alpha(base, config);
  require_single_scalar(problem, "cgd");
  SolverState state = checked_start(problem, x0, config);
  const SeparableTerm& h = problem.nonsmooth();
  const Vector a = problem.coupling().a();
  const Index n = problem.dim();
  Driver driver(problem, config, 1.0);

  constexpr double kArmijoSigma = 0.01;
  constexpr double kArmijoShrink = 0.5;
  constexpr int kMaxBacktracks = 60;

  std::int64_t raw = 0;
  driver.record(state, raw);
  if (auto stop = driver.should_stop()) return driver.finish(state, raw, *stop);
  for (;;) {
    const Vector gradient = full_gradient(problem, state);
    Vector direction = solve_knapsack(full_knapsack(problem, state, gradient, problem.lipschitz()));
    // The breakpoint search leaves round-off in a'd; move it onto the
    // coordinate with the largest |a_i d_i|.
    Index anchor = 0;
    (a.cwiseProduct(direction)).cwiseAbs().maxCoeff(&anchor);
    if (a[anchor] != 0.0) direction[anchor] -= a.dot(direction) / a[anchor];
    if (direction.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + state.x.lpNorm<Eigen::Infinity>())) {
      return driver.finish(state, raw, StopReason::kStationary);
    }

    // Gauss-Southwell: elementary piece with the largest predicted decrease.
    const auto pieces = elementary_pieces(direction, a);
    double best_decrease = kInfiniteObjective;
    Index best_i = -1;
    Index best_j = -1;
    auto predicted = [&](Index c, double s) {
      const double moved = std::clamp(state.x[c] + s, h.lower(c), h.upper(c));
      return gradient[c] * s + 0.5 * problem.lipschitz(c) * s * s + h.value(c, moved) - h.value(c, state.x[c]);
    };
    for (const auto& piece : pieces) {
      const double decrease = predicted(piece.i, piece.si) + (piece.j >= 0 ? predicted(piece.j, piece.sj) : 0.0);
      if (decrease < best_decrease) {
        best_decrease = decrease;
        best_i = piece.i;
        best_j = piece.j;
      }
    }
    if (best_j < 0) best_j = (best_i + 1) % n;

    const BlockStep step = two_block_direction(problem, state, best_i, best_j);
    double model = 0.0;
    for (std::size_t k = 0; k < step.blocks.size(); ++k) {
      const Index c = step.blocks[k];
      const double moved = std::clamp(state.x[c] + step.values[k], h.lower(c), h.upper(c));
      model += gradient[c] * step.values[k] + h.value(c, moved) - h.value(c, state.x[c]);
    }
    double tau = 1.0;
    SolverState trial = state;
    for (int backtrack = 0;; ++backtrack) {
      trial = state;
      BlockStep scaled = step;
      scaled.values *= tau;
      apply_update(problem, trial, scaled);
      if (trial.objective <= state.objective + kArmijoSigma * tau * model ||
          backtrack == kMaxBacktracks) {
        break;
      }
      tau *= kArmijoShrink;
    }
    if (trial.objective <= state.objective) state = std::move(trial);
    ++raw;
    if (driver.row_due(raw)) {
      driver.record(state, raw);
      if (auto stop = driver.should_stop()) return driver.finish(state, raw, *stop);
    }
  }
}

SolveResult gm_solve(const CompositeProblem& base, const Vector& x0, const SolverConfig& config) {
  const CompositeProblem problem = with_config_alpha(base, config);
  if (!problem.coupling().is_single()) {
    throw Error(Error::Kind::kUnsupported, "gm needs a single coupling constraint");
  }
  SolverState state = checked_start(problem, x0, config);
  const SeparableTerm& h = problem.nonsmooth();
  const Index n = problem.dim();
  Driver driver(problem, config, 1.0);

  const Vector a = problem.coupling().a();
  const bool simplex_case = problem.coupling().b() == 1.0 && (a.array() == 1.0).all() &&
                            !h.has_l1() && (h.lowers().array() == 0.0).all() &&
                            (h.uppers().array() == kInfiniteObjective).all();
  double lipschitz = std::max(estimate_smooth_lipschitz(problem.Z()), 1e-12);

  std::int64_t raw = 0;
  driver.record(state, raw);
  if (auto stop = driver.should_stop()) return driver.finish(state, raw, *stop);
  for (;;) {
    const Vector gradient = full_gradient(problem, state);
    // The power-iteration estimate can fall short of the true constant;
    // doubling it restores monotonicity.
    constexpr int kMaxDoublings = 60;
    SolverState trial = state;
    Vector step_values;
    for (int doubling = 0;; ++doubling) {
      if (simplex_case) {
        step_values = simplex_projection(Vector(state.x - gradient / lipschitz)) - state.x;
      } else {
        step_values = solve_knapsack(
            full_knapsack(problem, state, gradient, Vector::Constant(n, lipschitz)));
      }
      trial = state;
      apply_update(problem, trial, all_blocks_step(problem, step_values));
      if (trial.objective <= state.objective || doubling == kMaxDoublings) break;
      lipschitz *= 2.0;
    }
    if (step_values.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + state.x.lpNorm<Eigen::Infinity>())) {
      return driver.finish(state, raw, StopReason::kStationary);
    }
    if (trial.objective <= state.objective) state = std::move(trial);
    ++raw;
    if (driver.row_due(raw)) {
      driver.record(state, raw);
      if (auto stop = driver.should_stop()) return driver.finish(state, raw, *stop);
    }
  }
}

SolveResult solve(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config) {
  switch (config.algorithm) {
    case Algorithm::kRcd: return rcd_solve(problem, x0, config);
    case Algorithm::kRcdN: return rcd_n_solve(problem, x0, config);
    case Algorithm::kCgd: return cgd_solve(problem, x0, config);
    case Algorithm::kGm: return gm_solve(problem, x0, config);
  }
  throw Error(Error::Kind::kInvalidArgument, "unknown algorithm");
}

}  // namespace rcd
