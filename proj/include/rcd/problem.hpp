#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace rcd {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Objective value used for points outside dom h. Compares greater than every
// finite value.
inline constexpr double kInfiniteObjective = std::numeric_limits<double>::infinity();

// Splits the n coordinates into N contiguous blocks. Blocks are addressed by
// (offset, size) slices; no selection matrices are ever built.
class BlockPartition {
 public:
  explicit BlockPartition(std::vector<Index> sizes);

  // N = n blocks of one coordinate each.
  static BlockPartition scalar(Index n);
  // Blocks of `block_size` coordinates; the last block takes the remainder.
  static BlockPartition uniform(Index n, Index block_size);

  Index num_blocks() const { return static_cast<Index>(sizes_.size()); }
  Index dim() const { return offsets_.back(); }
  Index offset(Index block) const { return offsets_[block]; }
  Index size(Index block) const { return sizes_[block]; }
  bool all_scalar() const { return num_blocks() == dim(); }
  Index block_of(Index coordinate) const;

  const std::vector<Index>& sizes() const { return sizes_; }
  const std::vector<Index>& offsets() const { return offsets_; }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
};

// f(x) = 1/2 x'Z'Zx + q'x with Z stored column-major so that z_i is a
// contiguous range of nonzeros.
struct StructuredSmooth {
  SparseMatrix Z;
  Vector q;

  Index dim() const { return Z.cols(); }
  // Average number of nonzeros per column (p).
  double average_column_nnz() const;
};

// h(x) = sum_i lambda_i |x_i| + indicator{lower_i <= x_i <= upper_i}.
// lambda = 0 and infinite bounds switch the respective part off, which yields
// the four kinds Zero, L1, Box and L1Box.
class SeparableTerm {
 public:
  enum class Kind { kZero, kL1, kBox, kL1Box };

  SeparableTerm(Vector lambda, Vector lower, Vector upper);

  static SeparableTerm zero(Index n);
  static SeparableTerm l1(Index n, double lambda);
  static SeparableTerm box(Index n, double lower, double upper);
  static SeparableTerm l1_box(Index n, double lambda, double lower, double upper);

  Index dim() const { return lambda_.size(); }
  Kind kind(Index i) const;
  double lambda(Index i) const { return lambda_[i]; }
  double lower(Index i) const { return lower_[i]; }
  double upper(Index i) const { return upper_[i]; }
  const Vector& lambdas() const { return lambda_; }
  const Vector& lowers() const { return lower_; }
  const Vector& uppers() const { return upper_; }

  bool contains(Index i, double xi) const { return lower_[i] <= xi && xi <= upper_[i]; }
  // h_i(x_i); kInfiniteObjective outside the box.
  double value(Index i, double xi) const;
  double value(const Vector& x) const;
  bool has_l1() const;
  bool has_box() const;

 private:
  Vector lambda_;
  Vector lower_;
  Vector upper_;
};

// Either one constraint a'x = b or a system Ax = b with 1 < m <= n.
class Coupling {
 public:
  static Coupling single(Vector a, double b);
  static Coupling general(Matrix A, Vector b);

  bool is_single() const { return single_; }
  Index num_constraints() const { return A_.rows(); }
  Index dim() const { return A_.cols(); }
  // Row 0 of A; the whole coupling when is_single().
  Vector a() const { return A_.row(0).transpose(); }
  double b() const { return rhs_[0]; }
  const Matrix& A() const { return A_; }
  const Vector& rhs() const { return rhs_; }

  // |a'x - b| for a single constraint, ||Ax - b||_inf otherwise.
  double defect(const Vector& x) const;
  // Scale used for relative feasibility tolerances: 1 + |b| + ||A|| ||x||.
  double defect_scale(const Vector& x) const;

 private:
  Coupling(bool single, Matrix A, Vector rhs) : single_(single), A_(std::move(A)), rhs_(std::move(rhs)) {}

  bool single_;
  Matrix A_;
  Vector rhs_;
};

enum class LipschitzRule {
  kFrobenius,  // ||Z_block||_F^2, exact for scalar blocks
  kSpectral,   // power iteration on the column block, x1.01
};

class CompositeProblem {
 public:
  CompositeProblem(StructuredSmooth smooth, SeparableTerm nonsmooth, Coupling coupling,
                   BlockPartition partition, double alpha = 0.0,
                   LipschitzRule rule = LipschitzRule::kFrobenius,
                   std::optional<double> strong_convexity = std::nullopt);

  Index dim() const { return smooth_.dim(); }
  Index num_blocks() const { return partition_.num_blocks(); }
  const StructuredSmooth& smooth() const { return smooth_; }
  const SparseMatrix& Z() const { return smooth_.Z; }
  const Vector& q() const { return smooth_.q; }
  const SeparableTerm& nonsmooth() const { return nonsmooth_; }
  const Coupling& coupling() const { return coupling_; }
  const BlockPartition& partition() const { return partition_; }

  const Vector& lipschitz() const { return lipschitz_; }
  double lipschitz(Index block) const { return lipschitz_[block]; }
  double max_lipschitz() const { return lipschitz_.maxCoeff(); }
  double alpha() const { return alpha_; }
  std::optional<double> strong_convexity() const { return strong_convexity_; }

  // Copy of this problem with a different norm parameter.
  CompositeProblem with_alpha(double alpha) const;

  // L_ij^alpha = L_i^(1-alpha) + L_j^(1-alpha).
  double pair_lipschitz(Index i, Index j) const;
  // Weight of block i in ||.||_alpha^2: L_i^alpha.
  double norm_weight(Index block) const;

 private:
  StructuredSmooth smooth_;
  SeparableTerm nonsmooth_;
  Coupling coupling_;
  BlockPartition partition_;
  Vector lipschitz_;
  double alpha_;
  std::optional<double> strong_convexity_;
};

// Iterate plus the cached residual r = Zx. `touches` counts the nonzeros of Z
// read by grad_block and apply_update; it exists for cost instrumentation only.
struct SolverState {
  Vector x;
  Vector residual;
  double objective = 0.0;
  double feasibility_defect = 0.0;
  std::int64_t updates_since_refresh = 0;
  mutable std::uint64_t touches = 0;
};

// Block-sparse step: `values` holds the concatenated entries of `blocks` in
// the listed order.
struct BlockStep {
  std::vector<Index> blocks;
  Vector values;

  bool is_zero() const { return values.size() == 0 || values.isZero(0.0); }
};

// Number of block updates between two from-scratch recomputations of r = Zx,
// expressed as a multiple of N.
inline constexpr Index kRefreshPeriodPerBlock = 10;

double eval_smooth(const CompositeProblem& problem, const Vector& x);
// F(x) = f(x) + h(x); kInfiniteObjective if a box term is violated.
double eval_objective(const CompositeProblem& problem, const Vector& x);

SolverState make_state(const CompositeProblem& problem, Vector x);
// Recomputes residual, objective and feasibility defect from x.
void refresh(const CompositeProblem& problem, SolverState& state);

// grad_i f(x) = Z_i' r + q_i using only block i's columns.
Vector grad_block(const CompositeProblem& problem, const SolverState& state, Index block);
double grad_coordinate(const CompositeProblem& problem, const SolverState& state, Index coordinate);
// Z'r + q via the cached residual.
Vector full_gradient(const CompositeProblem& problem, const SolverState& state);

// x += d on the listed blocks; residual and objective are updated from the
// touched columns only. Coordinates are kept inside their box, which absorbs
// round-off of order one ulp in steps that land exactly on a bound.
void apply_update(const CompositeProblem& problem, SolverState& state, const BlockStep& step);

// ||x||_alpha = (sum_i L_i^alpha ||x_i||^2)^(1/2) and its dual norm.
double alpha_norm(const CompositeProblem& problem, const Vector& x);
double alpha_dual_norm(const CompositeProblem& problem, const Vector& y);

}  // namespace rcd
