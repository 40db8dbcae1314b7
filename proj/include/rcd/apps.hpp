#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "rcd/problem.hpp"

namespace rcd {

// Linear SVM dual data: examples are the columns of Z (features x examples).
struct SvmInstance {
  SparseMatrix Z;
  Vector labels;
  double C = 1.0;
  // Labels outside {-1, +1} that were replaced by their sign.
  std::int64_t label_warnings = 0;
  // True when a {0, 1} labeling was mapped to {-1, +1}.
  bool labels_remapped = false;

  Index num_examples() const { return Z.cols(); }
  Index num_features() const { return Z.rows(); }
  double average_column_nnz() const;
};

struct ParseOptions {
  // Replace labels by +-1 (sign rule, {0,1} -> {-1,+1}). When false labels are
  // returned verbatim.
  bool normalize_labels = true;
  // Lower bound on the number of feature rows (e.g. to match a train file).
  Index min_features = 0;
};

// svmlight / LIBSVM text: `<label> <index>:<value> ...` per line, 1-based
// strictly increasing indices. Blank lines and `#` comments are skipped,
// `qid:` tokens ignored. Throws ParseError with the offending line number.
SvmInstance parse_sparse_dataset(std::istream& in, const ParseOptions& options = {});
SvmInstance parse_sparse_dataset(const std::string& path, const ParseOptions& options = {});

// min 1/2 x'D Z'Z D x - e'x  s.t.  labels'x = 0,  0 <= x <= C,  D = diag(labels).
CompositeProblem build_svm(const SvmInstance& instance);

// Random sparse SVM data: `column_nnz` distinct nonzero features per example,
// values uniform on [0, 1), labels uniform on {-1, +1}.
SvmInstance random_svm(Index num_examples, Index num_features, Index column_nnz,
                       std::uint64_t seed, double C = 1.0);

// Points z_1..z_n are the columns.
struct ChebyshevInstance {
  Matrix points;

  Index num_points() const { return points.cols(); }
  Index point_dim() const { return points.rows(); }
};

struct BallSolution {
  Vector center;
  double radius = 0.0;
};

// Dual of the smallest enclosing ball:
//   min ||Zx||^2 - sum ||z_i||^2 x_i  s.t.  e'x = 1, x >= 0,
// stored as f = 1/2 ||(sqrt 2 Z) x||^2 + q'x. Needs at least two points.
CompositeProblem build_chebyshev(const ChebyshevInstance& instance);

// center = Zx, radius^2 = sum ||z_i||^2 x_i - ||Zx||^2. A radicand that is
// negative by more than round-off means x is not a converged dual point.
BallSolution recover_ball(const ChebyshevInstance& instance, const Vector& x);

// Points with i.i.d. uniform [0, 1) coordinates.
ChebyshevInstance random_points(Index n, Index point_dim, std::uint64_t seed);

// min 1/2 ||Zx||^2 + q'x + lambda ||x||_1  s.t.  e'x = 1, -1 <= x <= 1,
// with Z (point_dim x n) and q i.i.d. uniform [0, 1).
CompositeProblem build_l1_random(Index n, Index point_dim, double lambda, std::uint64_t seed);

enum class StartPoint { kZero, kFirstVertex, kUniform };

StartPoint start_point_from_string(const std::string& name);
std::string to_string(StartPoint start);

// 0, e_1 or e/n.
Vector start_point(StartPoint start, Index n);

}  // namespace rcd
