#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rcd/error.hpp"

namespace rcd {

// One separable term evaluated along a line: lambda |offset + weight t| plus
// the indicator of lower <= offset + weight t <= upper.
template <class Scalar>
struct LineTerm {
  Scalar weight;
  Scalar offset;
  Scalar lambda = 0;
  Scalar lower = -std::numeric_limits<Scalar>::infinity();
  Scalar upper = std::numeric_limits<Scalar>::infinity();
};

// phi(t) = 1/2 c2 t^2 + c1 t + sum_k h_k(offset_k + weight_k t) on [t_lo, t_hi].
template <class Scalar>
struct PiecewiseQuadratic1D {
  Scalar c2 = 0;
  Scalar c1 = 0;
  std::vector<LineTerm<Scalar>> terms;
  Scalar t_lo = -std::numeric_limits<Scalar>::infinity();
  Scalar t_hi = std::numeric_limits<Scalar>::infinity();

  // Smooth part plus l1 parts; the box parts are assumed satisfied.
  Scalar value(Scalar t) const {
    Scalar v = Scalar(0.5) * c2 * t * t + c1 * t;
    for (const auto& term : terms) {
      if (term.lambda > 0) v += term.lambda * std::abs(term.offset + term.weight * t);
    }
    return v;
  }
};

template <class Scalar>
struct Pw1dResult {
  Scalar t;
  Scalar value;
};

// Global minimizer of a convex 1-D piecewise quadratic. Every kink is mapped
// to t, the segments between consecutive kinks are minimized in closed form,
// and the best candidate wins; ties go to the smallest |t|.
// Throws kInfeasible for an empty domain and kUnbounded when c2 = 0 and phi
// decreases towards an infinite end of the domain.
template <class Scalar>
Pw1dResult<Scalar> pw1d_minimize(const PiecewiseQuadratic1D<Scalar>& phi) {
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  if (phi.c2 < 0) throw Error(Error::Kind::kInvalidArgument, "pw1d: negative curvature");

  Scalar lo = phi.t_lo;
  Scalar hi = phi.t_hi;
  Scalar constant = 0;
  std::vector<Scalar> kinks;
  kinks.reserve(phi.terms.size());
  for (const auto& term : phi.terms) {
    if (term.weight == 0) {
      if (term.offset < term.lower || term.offset > term.upper) {
        throw Error(Error::Kind::kInfeasible, "pw1d: fixed term outside its box");
      }
      if (term.lambda > 0) constant += term.lambda * std::abs(term.offset);
      continue;
    }
    Scalar a = (term.lower - term.offset) / term.weight;
    Scalar b = (term.upper - term.offset) / term.weight;
    if (term.weight < 0) std::swap(a, b);
    if (std::isnan(a)) a = -inf;
    if (std::isnan(b)) b = inf;
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    if (term.lambda > 0) kinks.push_back(-term.offset / term.weight);
  }
  if (lo > hi) throw Error(Error::Kind::kInfeasible, "pw1d: empty domain");

  std::vector<Scalar> points;
  points.reserve(kinks.size() + 2);
  points.push_back(lo);
  for (Scalar k : kinks) {
    if (k > lo && k < hi) points.push_back(k);
  }
  points.push_back(hi);
  std::sort(points.begin() + 1, points.end() - 1);
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::vector<Scalar> candidates;
  candidates.reserve(3 * points.size());

  const std::size_t segments = points.size() == 1 ? 1 : points.size() - 1;
  for (std::size_t s = 0; s < segments; ++s) {
    const Scalar a = points[s];
    const Scalar b = points.size() == 1 ? points[0] : points[s + 1];
    // Interior representative for the sign pattern of the l1 terms.
    Scalar mid;
    if (std::isfinite(a) && std::isfinite(b)) {
      mid = a + (b - a) / 2;
    } else if (std::isfinite(a)) {
      mid = a + std::max(Scalar(1), std::abs(a));
    } else if (std::isfinite(b)) {
      mid = b - std::max(Scalar(1), std::abs(b));
    } else {
      mid = 0;
    }
    Scalar slope = phi.c1;
    for (const auto& term : phi.terms) {
      if (term.lambda <= 0 || term.weight == 0) continue;
      const Scalar kink = -term.offset / term.weight;
      const Scalar sign = mid > kink ? Scalar(1) : (mid < kink ? Scalar(-1) : Scalar(0));
      slope += term.lambda * std::abs(term.weight) * sign;
    }
    Scalar t;
    if (phi.c2 > 0) {
      t = std::clamp(-slope / phi.c2, a, b);
    } else if (slope > 0) {
      if (!std::isfinite(a)) throw Error(Error::Kind::kUnbounded, "pw1d: unbounded below");
      t = a;
    } else if (slope < 0) {
      if (!std::isfinite(b)) throw Error(Error::Kind::kUnbounded, "pw1d: unbounded below");
      t = b;
    } else {
      t = std::clamp(Scalar(0), a, b);
    }
    candidates.push_back(t);
    if (std::isfinite(a)) candidates.push_back(a);
    if (std::isfinite(b)) candidates.push_back(b);
  }

  Scalar best_value = inf;
  for (Scalar t : candidates) best_value = std::min(best_value, phi.value(t));
  const Scalar tol =
      Scalar(64) * std::numeric_limits<Scalar>::epsilon() * (Scalar(1) + std::abs(best_value));
  Scalar best_t = inf;
  for (Scalar t : candidates) {
    if (phi.value(t) <= best_value + tol && std::abs(t) < std::abs(best_t)) best_t = t;
  }
  return {best_t, phi.value(best_t) + constant};
}

}  // namespace rcd
