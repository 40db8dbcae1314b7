#include "rcd/apps.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <string_view>
#include <vector>

#include "rcd/error.hpp"
#include "rcd/rng.hpp"
#include "rcd/solvers.hpp"

namespace rcd {

namespace {

using Triplet = Eigen::Triplet<double>;

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && end == text.data() + text.size() && std::isfinite(out);
}

bool parse_index(std::string_view text, long long& out) {
  if (text.empty()) return false;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && end == text.data() + text.size();
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    if (end > pos) tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

SparseMatrix dense_to_sparse(const Matrix& dense) {
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(dense.size()));
  for (Index j = 0; j < dense.cols(); ++j) {
    for (Index i = 0; i < dense.rows(); ++i) {
      if (dense(i, j) != 0.0) triplets.emplace_back(i, j, dense(i, j));
    }
  }
  SparseMatrix Z(dense.rows(), dense.cols());
  Z.setFromTriplets(triplets.begin(), triplets.end());
  return Z;
}

}  // namespace

double SvmInstance::average_column_nnz() const {
  return Z.cols() == 0 ? 0.0 : static_cast<double>(Z.nonZeros()) / static_cast<double>(Z.cols());
}

SvmInstance parse_sparse_dataset(std::istream& in, const ParseOptions& options) {
  std::vector<Triplet> triplets;
  std::vector<double> raw_labels;
  Index rows = options.min_features;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto tokens = split_whitespace(view);
    if (tokens.empty()) continue;

    double label = 0.0;
    if (!parse_double(tokens[0], label)) {
      throw ParseError(line_number, "label '" + std::string(tokens[0]) + "' is not a number");
    }
    const auto column = static_cast<Index>(raw_labels.size());
    raw_labels.push_back(label);

    long long previous = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const std::string_view token = tokens[t];
      const auto colon = token.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_number, "expected <index>:<value>, got '" + std::string(token) + "'");
      }
      if (token.substr(0, colon) == "qid") continue;
      long long index = 0;
      double value = 0.0;
      if (!parse_index(token.substr(0, colon), index) || index < 1) {
        throw ParseError(line_number, "bad feature index in '" + std::string(token) + "'");
      }
      if (!parse_double(token.substr(colon + 1), value)) {
        throw ParseError(line_number, "bad feature value in '" + std::string(token) + "'");
      }
      if (index <= previous) {
        throw ParseError(line_number, "feature indices must be strictly increasing");
      }
      previous = index;
      rows = std::max<Index>(rows, static_cast<Index>(index));
      if (value != 0.0) triplets.emplace_back(static_cast<Index>(index - 1), column, value);
    }
  }

  SvmInstance instance;
  const auto n = static_cast<Index>(raw_labels.size());
  instance.Z.resize(rows, n);
  instance.Z.setFromTriplets(triplets.begin(), triplets.end());
  instance.labels.resize(n);
  bool zero_one = n > 0;
  bool has_zero = false;
  for (double label : raw_labels) {
    zero_one = zero_one && (label == 0.0 || label == 1.0);
    has_zero = has_zero || label == 0.0;
  }
  for (Index i = 0; i < n; ++i) {
    const double label = raw_labels[static_cast<std::size_t>(i)];
    if (!options.normalize_labels) {
      instance.labels[i] = label;
    } else if (zero_one && has_zero) {
      instance.labels[i] = label == 1.0 ? 1.0 : -1.0;
    } else if (label == 1.0 || label == -1.0) {
      instance.labels[i] = label;
    } else {
      instance.labels[i] = label > 0.0 ? 1.0 : -1.0;
      ++instance.label_warnings;
    }
  }
  instance.labels_remapped = options.normalize_labels && zero_one && has_zero;
  return instance;
}

SvmInstance parse_sparse_dataset(const std::string& path, const ParseOptions& options) {
  std::ifstream file(path);
  if (!file) throw Error(Error::Kind::kParse, "cannot open dataset '" + path + "'");
  return parse_sparse_dataset(file, options);
}

CompositeProblem build_svm(const SvmInstance& instance) {
  const Index n = instance.num_examples();
  if (!(instance.C > 0.0)) throw Error(Error::Kind::kInvalidArgument, "SVM penalty C must be positive");
  if (instance.labels.size() != n) throw Error(Error::Kind::kDimension, "one label per example");
  for (Index i = 0; i < n; ++i) {
    if (instance.labels[i] != 1.0 && instance.labels[i] != -1.0) {
      throw Error(Error::Kind::kInvalidArgument, "SVM labels must be +1 or -1");
    }
  }
  // The dual Hessian is diag(a) Z'Z diag(a), so the stored columns are a_i z_i.
  SparseMatrix signed_columns = instance.Z * instance.labels.asDiagonal();
  return CompositeProblem(StructuredSmooth{std::move(signed_columns), Vector::Constant(n, -1.0)},
                          SeparableTerm::box(n, 0.0, instance.C),
                          Coupling::single(instance.labels, 0.0), BlockPartition::scalar(n));
}

SvmInstance random_svm(Index num_examples, Index num_features, Index column_nnz,
                       std::uint64_t seed, double C) {
  if (column_nnz < 0 || column_nnz > num_features) {
    throw Error(Error::Kind::kInvalidArgument, "column_nnz must lie in [0, num_features]");
  }
  SplitMix64 pattern_rng = SplitMix64(seed).split(0);
  SplitMix64 value_rng = SplitMix64(seed).split(1);
  SplitMix64 label_rng = SplitMix64(seed).split(2);
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(num_examples * column_nnz));
  SvmInstance instance;
  instance.C = C;
  instance.labels.resize(num_examples);
  for (Index j = 0; j < num_examples; ++j) {
    for (Index row : sample_distinct(pattern_rng, num_features, column_nnz)) {
      triplets.emplace_back(row, j, value_rng.uniform01());
    }
    instance.labels[j] = label_rng.uniform_index(2) == 0 ? -1.0 : 1.0;
  }
  instance.Z.resize(num_features, num_examples);
  instance.Z.setFromTriplets(triplets.begin(), triplets.end());
  return instance;
}

CompositeProblem build_chebyshev(const ChebyshevInstance& instance) {
  const Index n = instance.num_points();
  const Vector q = -instance.points.colwise().squaredNorm().transpose();
  return CompositeProblem(
      StructuredSmooth{dense_to_sparse(std::sqrt(2.0) * instance.points), q},
      SeparableTerm::box(n, 0.0, std::numeric_limits<double>::infinity()),
      Coupling::single(Vector::Ones(n), 1.0), BlockPartition::scalar(n));
}

BallSolution recover_ball(const ChebyshevInstance& instance, const Vector& x) {
  const Index n = instance.num_points();
  if (x.size() != n) throw Error(Error::Kind::kDimension, "recover_ball: one weight per point");
  if (std::abs(x.sum() - 1.0) > 1e-6 || (n > 0 && x.minCoeff() < -1e-9)) {
    throw Error(Error::Kind::kInvalidArgument, "recover_ball: x is not on the simplex");
  }
  BallSolution ball;
  ball.center = instance.points * x;
  const Vector norms = instance.points.colwise().squaredNorm().transpose();
  const double weighted = norms.dot(x);
  const double radicand = weighted - ball.center.squaredNorm();
  const double scale = 1.0 + norms.cwiseProduct(x.cwiseAbs()).sum();
  if (radicand < -1e-10 * scale) {
    throw Error(Error::Kind::kInvalidArgument,
                "recover_ball: negative squared radius, dual point not converged");
  }
  ball.radius = std::sqrt(std::max(radicand, 0.0));
  return ball;
}

ChebyshevInstance random_points(Index n, Index point_dim, std::uint64_t seed) {
  SplitMix64 rng(seed);
  ChebyshevInstance instance;
  instance.points.resize(point_dim, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < point_dim; ++i) instance.points(i, j) = rng.uniform01();
  }
  return instance;
}

CompositeProblem build_l1_random(Index n, Index point_dim, double lambda, std::uint64_t seed) {
  if (!(lambda >= 0.0)) throw Error(Error::Kind::kInvalidArgument, "lambda must be nonnegative");
  SplitMix64 z_rng = SplitMix64(seed).split(0);
  SplitMix64 q_rng = SplitMix64(seed).split(1);
  Matrix Z(point_dim, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < point_dim; ++i) Z(i, j) = z_rng.uniform01();
  }
  Vector q(n);
  for (Index j = 0; j < n; ++j) q[j] = q_rng.uniform01();
  return CompositeProblem(StructuredSmooth{dense_to_sparse(Z), q},
                          SeparableTerm::l1_box(n, lambda, -1.0, 1.0),
                          Coupling::single(Vector::Ones(n), 1.0), BlockPartition::scalar(n));
}

StartPoint start_point_from_string(const std::string& name) {
  if (name == "zero") return StartPoint::kZero;
  if (name == "e1") return StartPoint::kFirstVertex;
  if (name == "uniform") return StartPoint::kUniform;
  throw Error(Error::Kind::kInvalidArgument, "unknown start point '" + name + "'");
}

std::string to_string(StartPoint start) {
  switch (start) {
    case StartPoint::kZero: return "zero";
    case StartPoint::kFirstVertex: return "e1";
    case StartPoint::kUniform: return "uniform";
  }
  return "unknown";
}

Vector start_point(StartPoint start, Index n) {
  if (n < 1) throw Error(Error::Kind::kInvalidArgument, "start point needs n >= 1");
  switch (start) {
    case StartPoint::kZero: return Vector::Zero(n);
    case StartPoint::kFirstVertex: return Vector::Unit(n, 0);
    case StartPoint::kUniform: return Vector::Constant(n, 1.0 / static_cast<double>(n));
  }
  throw Error(Error::Kind::kInvalidArgument, "unknown start point");
}

}  // namespace rcd
