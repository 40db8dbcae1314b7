#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "rcd/error.hpp"

namespace rcd {

// Continuous separable knapsack
//
//   min_s  sum_i g_i s_i + w_i/2 s_i^2 + lambda_i |s_i - kink_i|
//   s.t.   a's = b,  lower <= s <= upper,
//
// with w > 0. `lambda` and `kink` may be left empty (no l1 part). The l1 part
// is what h = lambda|x + s| becomes after the shift kink = -x.
template <class Scalar>
struct SeparableKnapsack {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vec g;
  Vec weight;
  Vec a;
  Scalar b = 0;
  Vec lower;
  Vec upper;
  Vec lambda;
  Vec kink;

  Eigen::Index dim() const { return g.size(); }
  bool has_l1() const { return lambda.size() > 0; }
};

// argmin_s c s + w/2 s^2 + lambda |s - kink| over [lower, upper].
template <class Scalar>
Scalar knapsack_coordinate(Scalar c, Scalar w, Scalar lambda, Scalar kink, Scalar lower,
                           Scalar upper) {
  Scalar s;
  if (lambda > 0) {
    const Scalar right = -(c + lambda) / w;
    const Scalar left = -(c - lambda) / w;
    s = right > kink ? right : (left < kink ? left : kink);
  } else {
    s = -c / w;
  }
  return std::clamp(s, lower, upper);
}

namespace detail {

template <class Scalar>
class KnapsackDual {
 public:
  using Vec = typename SeparableKnapsack<Scalar>::Vec;

  explicit KnapsackDual(const SeparableKnapsack<Scalar>& p) : p_(p) {}

  Scalar lambda(Eigen::Index i) const { return p_.has_l1() ? p_.lambda[i] : Scalar(0); }
  Scalar kink(Eigen::Index i) const { return p_.has_l1() ? p_.kink[i] : Scalar(0); }

  Scalar coordinate(Eigen::Index i, Scalar mu) const {
    return knapsack_coordinate(p_.g[i] + mu * p_.a[i], p_.weight[i], lambda(i), kink(i),
                               p_.lower[i], p_.upper[i]);
  }

  // a's(mu); nonincreasing in mu.
  Scalar constraint(Scalar mu) const {
    Scalar total = 0;
    for (Eigen::Index i = 0; i < p_.dim(); ++i) {
      if (p_.a[i] != 0) total += p_.a[i] * coordinate(i, mu);
    }
    return total;
  }

  Vec primal(Scalar mu) const {
    Vec s(p_.dim());
    for (Eigen::Index i = 0; i < p_.dim(); ++i) s[i] = coordinate(i, mu);
    return s;
  }

  // Values of mu where some s_i(mu) changes regime (superset is harmless).
  std::vector<Scalar> breakpoints() const {
    std::vector<Scalar> out;
    out.reserve(6 * static_cast<std::size_t>(p_.dim()));
    for (Eigen::Index i = 0; i < p_.dim(); ++i) {
      const Scalar a = p_.a[i];
      if (a == 0) continue;
      const Scalar w = p_.weight[i];
      const Scalar g = p_.g[i];
      const Scalar l = lambda(i);
      auto add = [&](Scalar position) {
        if (!std::isfinite(position)) return;
        // s = position is reached when c = -w position -+ lambda.
        out.push_back((-w * position - l - g) / a);
        if (l > 0) out.push_back((-w * position + l - g) / a);
      };
      add(p_.lower[i]);
      add(p_.upper[i]);
      if (l > 0) add(kink(i));
    }
    return out;
  }

 private:
  const SeparableKnapsack<Scalar>& p_;
};

}  // namespace detail

// Exact minimizer by breakpoint search on the multiplier mu of a's = b:
// s_i(mu) minimizes the i-th term with g_i replaced by g_i + mu a_i, and
// a's(mu) is monotone and piecewise linear, so the root is bracketed between
// two adjacent breakpoints and recovered by linear interpolation. The bracket
// is narrowed by median selection over the remaining breakpoints. Throws kInfeasible when b lies outside the range of a's over
// the box.
template <class Scalar>
typename SeparableKnapsack<Scalar>::Vec solve_knapsack(const SeparableKnapsack<Scalar>& p) {
  using Vec = typename SeparableKnapsack<Scalar>::Vec;
  const Eigen::Index d = p.dim();
  if (p.weight.size() != d || p.a.size() != d || p.lower.size() != d || p.upper.size() != d ||
      (p.has_l1() && (p.lambda.size() != d || p.kink.size() != d))) {
    throw Error(Error::Kind::kDimension, "knapsack: inconsistent dimensions");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(p.weight[i] > 0)) throw Error(Error::Kind::kInvalidArgument, "knapsack: weights must be positive");
    if (p.lower[i] > p.upper[i]) throw Error(Error::Kind::kInfeasible, "knapsack: lower > upper");
  }

  // Range of a's over the box.
  Scalar reach_hi = 0;
  Scalar reach_lo = 0;
  Scalar scale = std::abs(p.b);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Scalar a = p.a[i];
    if (a == 0) continue;
    reach_hi += a > 0 ? a * p.upper[i] : a * p.lower[i];
    reach_lo += a > 0 ? a * p.lower[i] : a * p.upper[i];
    if (std::isfinite(p.lower[i])) scale += std::abs(a * p.lower[i]);
    if (std::isfinite(p.upper[i])) scale += std::abs(a * p.upper[i]);
  }
  const Scalar tol = Scalar(1e-10) * (Scalar(1) + scale);
  if (p.b > reach_hi + tol || p.b < reach_lo - tol) {
    throw Error(Error::Kind::kInfeasible, "knapsack: equality constraint unreachable within the box");
  }

  const detail::KnapsackDual<Scalar> dual(p);
  std::vector<Scalar> mus = dual.breakpoints();
  // Without breakpoints a's(mu) is affine everywhere; mu = 0 serves as the
  // reference point for the extrapolation below.
  if (mus.empty()) mus.push_back(Scalar(0));

  auto interpolate = [&](Scalar mu0, Scalar phi0, Scalar mu1, Scalar phi1) -> Scalar {
    if (phi0 == phi1) return mu0;
    return mu0 + (p.b - phi0) * (mu1 - mu0) / (phi1 - phi0);
  };

  const auto [min_it, max_it] = std::minmax_element(mus.begin(), mus.end());
  const Scalar first = *min_it;
  const Scalar last = *max_it;
  const Scalar phi_first = dual.constraint(first);
  const Scalar phi_last = dual.constraint(last);
  Scalar mu;
  if (phi_first <= p.b) {
    // Root at or left of the first breakpoint; a's is affine there.
    const Scalar step = std::max(Scalar(1), std::abs(first));
    const Scalar phi_left = dual.constraint(first - step);
    mu = phi_left == phi_first ? first : interpolate(first - step, phi_left, first, phi_first);
  } else if (phi_last >= p.b) {
    const Scalar step = std::max(Scalar(1), std::abs(last));
    const Scalar phi_right = dual.constraint(last + step);
    mu = phi_right == phi_last ? last : interpolate(last, phi_last, last + step, phi_right);
  } else {
    // Invariant: phi(mu_lo) > b > phi(mu_hi), and [begin, end) holds every
    // breakpoint strictly inside (mu_lo, mu_hi) (plus possibly repeats).
    Scalar mu_lo = first;
    Scalar mu_hi = last;
    Scalar phi_lo = phi_first;
    Scalar phi_hi = phi_last;
    auto begin = mus.begin();
    auto end = mus.end();
    bool exact = false;
    while (begin != end) {
      const auto mid = begin + (end - begin) / 2;
      std::nth_element(begin, mid, end);
      const Scalar candidate = *mid;
      if (candidate <= mu_lo) {
        begin = mid + 1;
        continue;
      }
      if (candidate >= mu_hi) {
        end = mid;
        continue;
      }
      const Scalar phi_mid = dual.constraint(candidate);
      if (phi_mid == p.b) {
        mu_lo = candidate;
        exact = true;
        break;
      }
      if (phi_mid > p.b) {
        mu_lo = candidate;
        phi_lo = phi_mid;
        begin = mid + 1;
      } else {
        mu_hi = candidate;
        phi_hi = phi_mid;
        end = mid;
      }
    }
    mu = exact ? mu_lo : interpolate(mu_lo, phi_lo, mu_hi, phi_hi);
  }
  Vec s = dual.primal(mu);
  return s;
}

// min <g,s> + L/2 ||s||^2  s.t.  a's = b, lo <= s <= hi.
template <class DerivedG, class DerivedA, class DerivedLo, class DerivedHi>
Eigen::Matrix<typename DerivedG::Scalar, Eigen::Dynamic, 1> quadratic_knapsack(
    const Eigen::MatrixBase<DerivedG>& g, typename DerivedG::Scalar L,
    const Eigen::MatrixBase<DerivedA>& a, typename DerivedG::Scalar b,
    const Eigen::MatrixBase<DerivedLo>& lo, const Eigen::MatrixBase<DerivedHi>& hi) {
  using Scalar = typename DerivedG::Scalar;
  if (!(L > 0)) throw Error(Error::Kind::kInvalidArgument, "knapsack: L must be positive");
  SeparableKnapsack<Scalar> p;
  p.g = g;
  p.weight = SeparableKnapsack<Scalar>::Vec::Constant(g.size(), L);
  p.a = a;
  p.b = b;
  p.lower = lo;
  p.upper = hi;
  return solve_knapsack(p);
}

// Euclidean projection onto {x >= 0, e'x = 1}: the knapsack with g = -y,
// L = 1, a = e, b = 1 and bounds [0, +inf).
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> simplex_projection(
    const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = y.size();
  if (n == 0) throw Error(Error::Kind::kDimension, "simplex projection of an empty vector");
  return quadratic_knapsack(Vec(-y), Scalar(1), Vec::Ones(n), Scalar(1), Vec::Zero(n),
                            Vec::Constant(n, std::numeric_limits<Scalar>::infinity()));
}

}  // namespace rcd
