#include "rcd/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rcd/error.hpp"

namespace rcd {

namespace {

void require(bool condition, Error::Kind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

void require_dim(Index got, Index expected, const char* what) {
  if (got != expected) {
    throw Error(Error::Kind::kDimension, std::string(what) + ": expected length " +
                                             std::to_string(expected) + ", got " +
                                             std::to_string(got));
  }
}

// Largest eigenvalue of B'B for a dense column block, 30 power iterations.
double spectral_norm_squared(const Matrix& block) {
  if (block.cols() == 0 || block.rows() == 0) return 0.0;
  Vector v = Vector::Ones(block.cols()) / std::sqrt(static_cast<double>(block.cols()));
  double estimate = 0.0;
  for (int it = 0; it < 30; ++it) {
    Vector w = block.transpose() * (block * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    estimate = norm;
    v = w / norm;
  }
  return 1.01 * estimate;
}

}  // namespace

// ---------------------------------------------------------------------------
// BlockPartition

BlockPartition::BlockPartition(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
  require(sizes_.size() >= 2, Error::Kind::kInvalidArgument,
          "block partition needs at least two blocks");
  offsets_.resize(sizes_.size() + 1);
  offsets_[0] = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    require(sizes_[i] > 0, Error::Kind::kInvalidArgument, "block sizes must be positive");
    offsets_[i + 1] = offsets_[i] + sizes_[i];
  }
}

BlockPartition BlockPartition::scalar(Index n) {
  return BlockPartition(std::vector<Index>(static_cast<std::size_t>(std::max<Index>(n, 0)), 1));
}

BlockPartition BlockPartition::uniform(Index n, Index block_size) {
  require(block_size > 0, Error::Kind::kInvalidArgument, "block size must be positive");
  std::vector<Index> sizes;
  for (Index start = 0; start < n; start += block_size) {
    sizes.push_back(std::min(block_size, n - start));
  }
  return BlockPartition(std::move(sizes));
}

Index BlockPartition::block_of(Index coordinate) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), coordinate);
  return static_cast<Index>(it - offsets_.begin()) - 1;
}

double StructuredSmooth::average_column_nnz() const {
  if (Z.cols() == 0) return 0.0;
  return static_cast<double>(Z.nonZeros()) / static_cast<double>(Z.cols());
}

// ---------------------------------------------------------------------------
// SeparableTerm

SeparableTerm::SeparableTerm(Vector lambda, Vector lower, Vector upper)
    : lambda_(std::move(lambda)), lower_(std::move(lower)), upper_(std::move(upper)) {
  require_dim(lower_.size(), lambda_.size(), "separable term lower bounds");
  require_dim(upper_.size(), lambda_.size(), "separable term upper bounds");
  for (Index i = 0; i < lambda_.size(); ++i) {
    require(lambda_[i] >= 0.0, Error::Kind::kInvalidArgument, "l1 weight must be nonnegative");
    require(lower_[i] <= upper_[i], Error::Kind::kInvalidArgument, "box needs lower <= upper");
  }
}

SeparableTerm SeparableTerm::zero(Index n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return SeparableTerm(Vector::Zero(n), Vector::Constant(n, -inf), Vector::Constant(n, inf));
}

SeparableTerm SeparableTerm::l1(Index n, double lambda) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return SeparableTerm(Vector::Constant(n, lambda), Vector::Constant(n, -inf),
                       Vector::Constant(n, inf));
}

SeparableTerm SeparableTerm::box(Index n, double lower, double upper) {
  return SeparableTerm(Vector::Zero(n), Vector::Constant(n, lower), Vector::Constant(n, upper));
}

SeparableTerm SeparableTerm::l1_box(Index n, double lambda, double lower, double upper) {
  return SeparableTerm(Vector::Constant(n, lambda), Vector::Constant(n, lower),
                       Vector::Constant(n, upper));
}

SeparableTerm::Kind SeparableTerm::kind(Index i) const {
  const bool l1 = lambda_[i] > 0.0;
  const bool box = std::isfinite(lower_[i]) || std::isfinite(upper_[i]);
  if (l1 && box) return Kind::kL1Box;
  if (l1) return Kind::kL1;
  if (box) return Kind::kBox;
  return Kind::kZero;
}

double SeparableTerm::value(Index i, double xi) const {
  if (!contains(i, xi)) return kInfiniteObjective;
  return lambda_[i] > 0.0 ? lambda_[i] * std::abs(xi) : 0.0;
}

double SeparableTerm::value(const Vector& x) const {
  require_dim(x.size(), dim(), "separable term argument");
  double total = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double v = value(i, x[i]);
    if (v == kInfiniteObjective) return kInfiniteObjective;
    total += v;
  }
  return total;
}

bool SeparableTerm::has_l1() const { return (lambda_.array() > 0.0).any(); }

bool SeparableTerm::has_box() const {
  return lower_.array().isFinite().any() || upper_.array().isFinite().any();
}

// ---------------------------------------------------------------------------
// Coupling

Coupling Coupling::single(Vector a, double b) {
  Matrix A = a.transpose();
  Vector rhs(1);
  rhs[0] = b;
  return Coupling(true, std::move(A), std::move(rhs));
}

Coupling Coupling::general(Matrix A, Vector b) {
  require_dim(b.size(), A.rows(), "coupling right-hand side");
  require(A.rows() >= 1 && A.rows() <= A.cols(), Error::Kind::kInvalidArgument,
          "general coupling needs 1 <= m <= n");
  return Coupling(false, std::move(A), std::move(b));
}

double Coupling::defect(const Vector& x) const {
  require_dim(x.size(), dim(), "coupling argument");
  return (A_ * x - rhs_).lpNorm<Eigen::Infinity>();
}

double Coupling::defect_scale(const Vector& x) const {
  return 1.0 + rhs_.lpNorm<Eigen::Infinity>() + A_.norm() * x.norm();
}

// ---------------------------------------------------------------------------
// CompositeProblem

CompositeProblem::CompositeProblem(StructuredSmooth smooth, SeparableTerm nonsmooth,
                                   Coupling coupling, BlockPartition partition, double alpha,
                                   LipschitzRule rule, std::optional<double> strong_convexity)
    : smooth_(std::move(smooth)),
      nonsmooth_(std::move(nonsmooth)),
      coupling_(std::move(coupling)),
      partition_(std::move(partition)),
      alpha_(alpha),
      strong_convexity_(strong_convexity) {
  const Index n = smooth_.Z.cols();
  require_dim(smooth_.q.size(), n, "linear term q");
  require_dim(nonsmooth_.dim(), n, "separable term");
  require_dim(coupling_.dim(), n, "coupling");
  require_dim(partition_.dim(), n, "block partition");
  require(alpha_ >= 0.0 && alpha_ <= 1.0, Error::Kind::kInvalidArgument, "alpha must lie in [0,1]");
  smooth_.Z.makeCompressed();

  if (coupling_.is_single()) {
    const Vector a = coupling_.a();
    Index blocks_with_weight = 0;
    for (Index i = 0; i < partition_.num_blocks(); ++i) {
      if (!a.segment(partition_.offset(i), partition_.size(i)).isZero(0.0)) ++blocks_with_weight;
    }
    require(blocks_with_weight >= 2, Error::Kind::kInvalidArgument,
            "coupling vector must be nonzero on at least two blocks");
  }

  const Index N = partition_.num_blocks();
  lipschitz_.resize(N);
  for (Index i = 0; i < N; ++i) {
    const Index begin = partition_.offset(i);
    const Index size = partition_.size(i);
    double frobenius = 0.0;
    for (Index c = begin; c < begin + size; ++c) {
      frobenius += smooth_.Z.col(c).squaredNorm();
    }
    if (rule == LipschitzRule::kSpectral && size > 1) {
      const Matrix block = Matrix(smooth_.Z.middleCols(begin, size));
      lipschitz_[i] = std::min(frobenius, spectral_norm_squared(block));
    } else {
      lipschitz_[i] = frobenius;
    }
  }
  // Zero columns (e.g. empty examples in a dataset) have no curvature; any
  // positive constant is a valid bound, and a tiny one keeps L_i > 0.
  const double largest = lipschitz_.size() > 0 ? lipschitz_.maxCoeff() : 0.0;
  const double floor = 1e-12 * std::max(1.0, largest);
  lipschitz_ = lipschitz_.cwiseMax(floor);
}

CompositeProblem CompositeProblem::with_alpha(double alpha) const {
  CompositeProblem copy = *this;
  require(alpha >= 0.0 && alpha <= 1.0, Error::Kind::kInvalidArgument, "alpha must lie in [0,1]");
  copy.alpha_ = alpha;
  return copy;
}

double CompositeProblem::pair_lipschitz(Index i, Index j) const {
  return std::pow(lipschitz_[i], 1.0 - alpha_) + std::pow(lipschitz_[j], 1.0 - alpha_);
}

double CompositeProblem::norm_weight(Index block) const {
  return std::pow(lipschitz_[block], alpha_);
}

// ---------------------------------------------------------------------------
// Evaluation

double eval_smooth(const CompositeProblem& problem, const Vector& x) {
  require_dim(x.size(), problem.dim(), "objective argument");
  const Vector r = problem.Z() * x;
  return 0.5 * r.squaredNorm() + problem.q().dot(x);
}

double eval_objective(const CompositeProblem& problem, const Vector& x) {
  require_dim(x.size(), problem.dim(), "objective argument");
  const double h = problem.nonsmooth().value(x);
  if (h == kInfiniteObjective) return kInfiniteObjective;
  return eval_smooth(problem, x) + h;
}

SolverState make_state(const CompositeProblem& problem, Vector x) {
  require_dim(x.size(), problem.dim(), "initial point");
  SolverState state;
  state.x = std::move(x);
  refresh(problem, state);
  return state;
}

void refresh(const CompositeProblem& problem, SolverState& state) {
  state.residual = problem.Z() * state.x;
  const double h = problem.nonsmooth().value(state.x);
  state.objective = h == kInfiniteObjective
                        ? kInfiniteObjective
                        : 0.5 * state.residual.squaredNorm() + problem.q().dot(state.x) + h;
  state.feasibility_defect = problem.coupling().defect(state.x);
  state.updates_since_refresh = 0;
}

double grad_coordinate(const CompositeProblem& problem, const SolverState& state,
                       Index coordinate) {
  const SparseMatrix& Z = problem.Z();
  double g = problem.q()[coordinate];
  for (SparseMatrix::InnerIterator it(Z, coordinate); it; ++it) {
    g += it.value() * state.residual[it.index()];
    ++state.touches;
  }
  return g;
}

Vector grad_block(const CompositeProblem& problem, const SolverState& state, Index block) {
  const Index begin = problem.partition().offset(block);
  const Index size = problem.partition().size(block);
  Vector g(size);
  for (Index k = 0; k < size; ++k) g[k] = grad_coordinate(problem, state, begin + k);
#ifdef RCD_EXPENSIVE_CHECKS
  const Vector fresh = problem.Z() * state.x;
  if ((fresh - state.residual).lpNorm<Eigen::Infinity>() >
      1e-8 * (1.0 + fresh.lpNorm<Eigen::Infinity>())) {
    throw Error(Error::Kind::kInternal, "stale residual in grad_block");
  }
#endif
  return g;
}

Vector full_gradient(const CompositeProblem& problem, const SolverState& state) {
  state.touches += static_cast<std::uint64_t>(problem.Z().nonZeros());
  return problem.Z().transpose() * state.residual + problem.q();
}

void apply_update(const CompositeProblem& problem, SolverState& state, const BlockStep& step) {
  const BlockPartition& partition = problem.partition();
  const SeparableTerm& h = problem.nonsmooth();
  const SparseMatrix& Z = problem.Z();
  const Vector& q = problem.q();

  Index cursor = 0;
  double delta = 0.0;
  for (Index block : step.blocks) {
    const Index begin = partition.offset(block);
    const Index size = partition.size(block);
    if (cursor + size > step.values.size()) {
      throw Error(Error::Kind::kDimension, "block step shorter than its block list");
    }
    for (Index k = 0; k < size; ++k) {
      const Index c = begin + k;
      const double requested = step.values[cursor + k];
      if (requested == 0.0) continue;
      const double old_x = state.x[c];
      const double new_x = std::clamp(old_x + requested, h.lower(c), h.upper(c));
      const double d = new_x - old_x;
      if (d == 0.0) continue;
      for (SparseMatrix::InnerIterator it(Z, c); it; ++it) {
        double& r = state.residual[it.index()];
        const double dr = it.value() * d;
        delta += dr * (r + 0.5 * dr);
        r += dr;
        ++state.touches;
      }
      delta += q[c] * d + h.value(c, new_x) - h.value(c, old_x);
      state.x[c] = new_x;
    }
    cursor += size;
  }
  if (cursor != step.values.size()) {
    throw Error(Error::Kind::kDimension, "block step longer than its block list");
  }
  state.objective += delta;
  state.updates_since_refresh += static_cast<std::int64_t>(step.blocks.size());
  if (state.updates_since_refresh >= kRefreshPeriodPerBlock * problem.num_blocks()) {
    refresh(problem, state);
  }
}

double alpha_norm(const CompositeProblem& problem, const Vector& x) {
  require_dim(x.size(), problem.dim(), "alpha_norm argument");
  const BlockPartition& partition = problem.partition();
  double total = 0.0;
  for (Index i = 0; i < partition.num_blocks(); ++i) {
    total += problem.norm_weight(i) * x.segment(partition.offset(i), partition.size(i)).squaredNorm();
  }
  return std::sqrt(total);
}

double alpha_dual_norm(const CompositeProblem& problem, const Vector& y) {
  require_dim(y.size(), problem.dim(), "alpha_dual_norm argument");
  const BlockPartition& partition = problem.partition();
  double total = 0.0;
  for (Index i = 0; i < partition.num_blocks(); ++i) {
    total += y.segment(partition.offset(i), partition.size(i)).squaredNorm() / problem.norm_weight(i);
  }
  return std::sqrt(total);
}

}  // namespace rcd
