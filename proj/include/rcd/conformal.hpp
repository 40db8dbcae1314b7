#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rcd/error.hpp"

namespace rcd {

// d = d^1 + ... + d^s with every d^t in Null(a') and conformal to d.
template <class Scalar>
using ElementaryDecomposition = std::vector<Eigen::SparseVector<Scalar>>;

// One piece of a single-constraint realization: s_i e_i + s_j e_j, or the
// singleton s_i e_i when j < 0.
template <class Scalar>
struct ElementaryPiece {
  Eigen::Index i = -1;
  Scalar si = 0;
  Eigen::Index j = -1;
  Scalar sj = 0;
};

// Greedy pairing realization for one constraint a'd = 0. Coordinates split
// into P = {a_i d_i > 0} and M = {a_i d_i < 0}; the heads of P and M are
// paired into a two-nonzero piece that moves min(a_i d_i, -a_j d_j) units of
// a-mass and exhausts at least one of them. Coordinates with a_i = 0 become
// singleton pieces. O(n), and at most |supp(d)| - 1 pieces when P and M are
// both nonempty. Throws kInvalidArgument if |a'd| > 1e-10 ||a|| ||d||.
template <class DerivedD, class DerivedA>
std::vector<ElementaryPiece<typename DerivedD::Scalar>> elementary_pieces(
    const Eigen::MatrixBase<DerivedD>& d, const Eigen::MatrixBase<DerivedA>& a) {
  using Scalar = typename DerivedD::Scalar;
  using Piece = ElementaryPiece<Scalar>;
  const Eigen::Index n = d.size();
  if (a.size() != n) throw Error(Error::Kind::kDimension, "conformal_realization: size mismatch");
  const Scalar dot = a.dot(d);
  if (std::abs(dot) > Scalar(1e-10) * a.norm() * d.norm()) {
    throw Error(Error::Kind::kInvalidArgument, "conformal_realization: d is not in Null(a')");
  }

  std::vector<Piece> pieces;
  std::vector<Eigen::Index> plus;
  std::vector<Eigen::Index> minus;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d[i] == 0) continue;
    const Scalar mass = a[i] * d[i];
    if (mass > 0) {
      plus.push_back(i);
    } else if (mass < 0) {
      minus.push_back(i);
    } else {
      pieces.push_back({i, d[i]});
    }
  }
  pieces.reserve(pieces.size() + plus.size() + minus.size());

  std::vector<Scalar> remaining(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) remaining[i] = d[i];
  std::size_t p = 0;
  std::size_t m = 0;
  while (p < plus.size() && m < minus.size()) {
    const Eigen::Index i = plus[p];
    const Eigen::Index j = minus[m];
    if (remaining[i] == 0) {
      ++p;
      continue;
    }
    if (remaining[j] == 0) {
      ++m;
      continue;
    }
    const Scalar mass_i = a[i] * remaining[i];
    const Scalar mass_j = -a[j] * remaining[j];
    Scalar step_i;
    Scalar step_j;
    if (mass_i < mass_j) {
      step_i = remaining[i];
      step_j = -mass_i / a[j];
      ++p;
    } else if (mass_j < mass_i) {
      step_j = remaining[j];
      step_i = mass_j / a[i];
      ++m;
    } else {
      step_i = remaining[i];
      step_j = remaining[j];
      ++p;
      ++m;
    }
    // Never overshoot through zero on round-off.
    if ((remaining[i] - step_i) * d[i] < 0) step_i = remaining[i];
    if ((remaining[j] - step_j) * d[j] < 0) step_j = remaining[j];
    remaining[i] -= step_i;
    remaining[j] -= step_j;
    if (i < j) {
      pieces.push_back({i, step_i, j, step_j});
    } else {
      pieces.push_back({j, step_j, i, step_i});
    }
  }

  // Whatever is left is round-off mass (a'd = 0 up to tolerance). Fold it into
  // the last piece that touches the coordinate, else emit a singleton.
  auto leftovers = [&](const std::vector<Eigen::Index>& side, std::size_t from) {
    for (std::size_t k = from; k < side.size(); ++k) {
      const Eigen::Index i = side[k];
      if (remaining[i] == 0) continue;
      if (!pieces.empty() && pieces.back().i == i) {
        pieces.back().si += remaining[i];
      } else if (!pieces.empty() && pieces.back().j == i) {
        pieces.back().sj += remaining[i];
      } else {
        pieces.push_back({i, remaining[i]});
      }
      remaining[i] = 0;
    }
  };
  leftovers(plus, p);
  leftovers(minus, m);
  return pieces;
}

// The same realization as sparse vectors of length n.
template <class DerivedD, class DerivedA>
ElementaryDecomposition<typename DerivedD::Scalar> conformal_realization(
    const Eigen::MatrixBase<DerivedD>& d, const Eigen::MatrixBase<DerivedA>& a) {
  using Scalar = typename DerivedD::Scalar;
  ElementaryDecomposition<Scalar> pieces;
  const auto compact = elementary_pieces(d, a);
  pieces.reserve(compact.size());
  for (const auto& c : compact) {
    Eigen::SparseVector<Scalar> piece(d.size());
    piece.insert(c.i) = c.si;
    if (c.j >= 0) piece.insert(c.j) = c.sj;
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

// Checks every invariant of a single-constraint realization. Returns a
// description of the first violation, or nullopt.
template <class DerivedD, class DerivedA>
std::optional<std::string> check_conformal_realization(
    const Eigen::MatrixBase<DerivedD>& d, const Eigen::MatrixBase<DerivedA>& a,
    const ElementaryDecomposition<typename DerivedD::Scalar>& pieces, bool check_count = true) {
  using Scalar = typename DerivedD::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = d.size();
  Vec sum = Vec::Zero(n);
  Eigen::Index support = 0;
  for (Eigen::Index i = 0; i < n; ++i) support += d[i] != 0;
  const Scalar scale = a.norm() * d.norm();
  for (std::size_t t = 0; t < pieces.size(); ++t) {
    const auto& piece = pieces[t];
    if (piece.nonZeros() > 2) return "piece " + std::to_string(t) + " has more than 2 nonzeros";
    Scalar dot = 0;
    for (typename Eigen::SparseVector<Scalar>::InnerIterator it(piece); it; ++it) {
      const Eigen::Index i = it.index();
      if (d[i] == 0) return "piece " + std::to_string(t) + " leaves supp(d)";
      if (it.value() * d[i] < 0) return "piece " + std::to_string(t) + " has a sign conflict";
      dot += a[i] * it.value();
      sum[i] += it.value();
    }
    if (std::abs(dot) > Scalar(1e-10) * (Scalar(1) + scale)) {
      return "piece " + std::to_string(t) + " is not in Null(a')";
    }
  }
  if ((sum - d).norm() > Scalar(1e-10) * (Scalar(1) + d.norm())) return "pieces do not sum to d";
  if (check_count && support > 0 && static_cast<Eigen::Index>(pieces.size()) > support - 1) {
    return "more than |supp(d)| - 1 pieces";
  }
  return std::nullopt;
}

}  // namespace rcd
