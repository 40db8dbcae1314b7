#pragma once

// Brute-force reference solvers used only by the tests. Each one is written
// independently of the library kernels it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// F(x) = 1/2 ||Zx||^2 + q'x + sum lambda_i |x_i| (+inf outside [lower, upper]).
inline double dense_objective(const MatrixXd& Z, const VectorXd& q, const VectorXd& lambda,
                              const VectorXd& lower, const VectorXd& upper, const VectorXd& x) {
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) return kInf;
  }
  return 0.5 * (Z * x).squaredNorm() + q.dot(x) + lambda.dot(x.cwiseAbs());
}

// min g's + 1/2 sum w_i s_i^2  s.t. a's = b, lo <= s <= hi by enumerating all
// 3^d patterns (at lower / at upper / free) and solving each equality QP.
inline VectorXd knapsack_by_enumeration(const VectorXd& g, const VectorXd& w, const VectorXd& a,
                                        double b, const VectorXd& lo, const VectorXd& hi) {
  const Index d = g.size();
  Index patterns = 1;
  for (Index i = 0; i < d; ++i) patterns *= 3;
  double best = kInf;
  VectorXd best_s = VectorXd::Constant(d, std::nan(""));
  const double tol = 1e-9 * (1.0 + std::abs(b) + a.cwiseAbs().sum());
  for (Index code = 0; code < patterns; ++code) {
    VectorXd s(d);
    std::vector<int> state(d);
    Index c = code;
    bool finite = true;
    for (Index i = 0; i < d; ++i) {
      state[i] = static_cast<int>(c % 3);
      c /= 3;
      if (state[i] == 0) {
        s[i] = lo[i];
        finite = finite && std::isfinite(lo[i]);
      } else if (state[i] == 1) {
        s[i] = hi[i];
        finite = finite && std::isfinite(hi[i]);
      }
    }
    if (!finite) continue;
    double fixed = 0.0;
    double free_num = 0.0;
    double free_den = 0.0;
    for (Index i = 0; i < d; ++i) {
      if (state[i] == 2) {
        free_num += -g[i] * a[i] / w[i];
        free_den += a[i] * a[i] / w[i];
      } else {
        fixed += a[i] * s[i];
      }
    }
    double mu = 0.0;
    if (free_den > 0.0) mu = (free_num + fixed - b) / free_den;
    for (Index i = 0; i < d; ++i) {
      if (state[i] == 2) s[i] = (-g[i] - mu * a[i]) / w[i];
    }
    bool feasible = std::abs(a.dot(s) - b) <= tol;
    for (Index i = 0; i < d; ++i) {
      feasible = feasible && s[i] >= lo[i] - 1e-12 && s[i] <= hi[i] + 1e-12;
    }
    if (!feasible) continue;
    const double value = g.dot(s) + 0.5 * w.dot(s.cwiseProduct(s));
    if (value < best) {
      best = value;
      best_s = s;
    }
  }
  return best_s;
}

// Same problem plus sum lambda_i |s_i - kink_i|: 5^d patterns (lower, upper,
// at the kink, free right of the kink, free left of it).
inline VectorXd knapsack_l1_by_enumeration(const VectorXd& g, const VectorXd& w,
                                           const VectorXd& a, double b, const VectorXd& lo,
                                           const VectorXd& hi, const VectorXd& lambda,
                                           const VectorXd& kink) {
  const Index d = g.size();
  Index patterns = 1;
  for (Index i = 0; i < d; ++i) patterns *= 5;
  double best = kInf;
  VectorXd best_s = VectorXd::Constant(d, std::nan(""));
  const double tol = 1e-9 * (1.0 + std::abs(b) + a.cwiseAbs().sum());
  for (Index code = 0; code < patterns; ++code) {
    VectorXd s(d);
    std::vector<int> state(d);
    Index c = code;
    bool finite = true;
    double fixed = 0.0;
    double free_num = 0.0;
    double free_den = 0.0;
    for (Index i = 0; i < d; ++i) {
      state[i] = static_cast<int>(c % 5);
      c /= 5;
      switch (state[i]) {
        case 0: s[i] = lo[i]; break;
        case 1: s[i] = hi[i]; break;
        case 2: s[i] = kink[i]; break;
        default: {
          const double sign = state[i] == 3 ? 1.0 : -1.0;
          free_num += (-g[i] - sign * lambda[i]) * a[i] / w[i];
          free_den += a[i] * a[i] / w[i];
        }
      }
      if (state[i] < 3) {
        finite = finite && std::isfinite(s[i]);
        fixed += a[i] * s[i];
      }
    }
    if (!finite) continue;
    const double mu = free_den > 0.0 ? (free_num + fixed - b) / free_den : 0.0;
    bool feasible = true;
    for (Index i = 0; i < d; ++i) {
      if (state[i] >= 3) {
        const double sign = state[i] == 3 ? 1.0 : -1.0;
        s[i] = (-g[i] - sign * lambda[i] - mu * a[i]) / w[i];
        feasible = feasible && (s[i] - kink[i]) * sign >= -1e-12;
      }
      feasible = feasible && s[i] >= lo[i] - 1e-12 && s[i] <= hi[i] + 1e-12;
    }
    feasible = feasible && std::abs(a.dot(s) - b) <= tol;
    if (!feasible) continue;
    const double value =
        g.dot(s) + 0.5 * w.dot(s.cwiseProduct(s)) + lambda.dot((s - kink).cwiseAbs());
    if (value < best) {
      best = value;
      best_s = s;
    }
  }
  return best_s;
}

// Euclidean projection onto the probability simplex by sorting.
inline VectorXd simplex_projection_by_sorting(const VectorXd& y) {
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0) theta = candidate;
  }
  return (y.array() - theta).cwiseMax(0.0);
}

// Minimizes a convex function of one variable on [lo, hi] by a uniform grid
// followed by repeated zooming around the best grid point.
inline double grid_minimize(const std::function<double(double)>& phi, double lo, double hi,
                            int points = 20001, int zooms = 6) {
  double best_t = lo;
  double best_v = kInf;
  for (int level = 0; level <= zooms; ++level) {
    const double step = (hi - lo) / (points - 1);
    for (int k = 0; k < points; ++k) {
      const double t = lo + step * k;
      const double v = phi(t);
      if (v < best_v) {
        best_v = v;
        best_t = t;
      }
    }
    lo = best_t - 2 * step;
    hi = best_t + 2 * step;
  }
  return best_t;
}

// Smallest enclosing ball by enumerating every support set of 1..d+1 points:
// the circumcenter of a support set lies in its affine hull.
struct Ball {
  VectorXd center;
  double radius = kInf;
};

inline Ball enclosing_ball_by_enumeration(const MatrixXd& points) {
  const Index d = points.rows();
  const Index n = points.cols();
  Ball best;
  std::vector<Index> subset;
  std::function<void(Index)> recurse = [&](Index start) {
    if (!subset.empty()) {
      const Index k = static_cast<Index>(subset.size());
      const VectorXd p0 = points.col(subset[0]);
      VectorXd center = p0;
      if (k > 1) {
        // center = p0 + E c with E the edge vectors, |center - p_j| equal.
        MatrixXd E(d, k - 1);
        for (Index j = 1; j < k; ++j) E.col(j - 1) = points.col(subset[j]) - p0;
        const MatrixXd G = E.transpose() * E;
        const VectorXd rhs = 0.5 * G.diagonal();
        Eigen::FullPivLU<MatrixXd> lu(G);
        if (lu.rank() == k - 1) center = p0 + E * lu.solve(rhs);
        else center = VectorXd::Constant(d, std::nan(""));
      }
      if (center.allFinite()) {
        double radius = 0.0;
        for (Index j = 0; j < n; ++j) radius = std::max(radius, (points.col(j) - center).norm());
        if (radius < best.radius) {
          best.radius = radius;
          best.center = center;
        }
      }
    }
    if (static_cast<Index>(subset.size()) == std::min(d + 1, n)) return;
    for (Index i = start; i < n; ++i) {
      subset.push_back(i);
      recurse(i + 1);
      subset.pop_back();
    }
  };
  recurse(0);
  return best;
}

// min 1/2 x'Hx + c'x  s.t.  Ax = b, lo <= x <= hi, H positive definite, by
// enumerating 3^n active patterns and solving each reduced KKT system.
inline VectorXd box_qp_by_enumeration(const MatrixXd& H, const VectorXd& c, const MatrixXd& A,
                                      const VectorXd& b, const VectorXd& lo, const VectorXd& hi) {
  const Index n = c.size();
  const Index m = A.rows();
  Index patterns = 1;
  for (Index i = 0; i < n; ++i) patterns *= 3;
  double best = kInf;
  VectorXd best_x = VectorXd::Constant(n, std::nan(""));
  for (Index code = 0; code < patterns; ++code) {
    VectorXd x = VectorXd::Zero(n);
    std::vector<Index> free;
    Index cc = code;
    bool finite = true;
    for (Index i = 0; i < n; ++i) {
      const int s = static_cast<int>(cc % 3);
      cc /= 3;
      if (s == 0) {
        x[i] = lo[i];
        finite = finite && std::isfinite(lo[i]);
      } else if (s == 1) {
        x[i] = hi[i];
        finite = finite && std::isfinite(hi[i]);
      } else {
        free.push_back(i);
      }
    }
    if (!finite) continue;
    const auto f = static_cast<Index>(free.size());
    MatrixXd K = MatrixXd::Zero(f + m, f + m);
    VectorXd rhs(f + m);
    for (Index p = 0; p < f; ++p) {
      for (Index r = 0; r < f; ++r) K(p, r) = H(free[p], free[r]);
      for (Index k = 0; k < m; ++k) {
        K(p, f + k) = A(k, free[p]);
        K(f + k, p) = A(k, free[p]);
      }
      rhs[p] = -c[free[p]] - H.row(free[p]).dot(x);
    }
    for (Index k = 0; k < m; ++k) rhs[f + k] = b[k] - A.row(k).dot(x);
    Eigen::FullPivLU<MatrixXd> lu(K);
    if (lu.rank() < f + m) continue;
    const VectorXd sol = lu.solve(rhs);
    for (Index p = 0; p < f; ++p) x[free[p]] = sol[p];
    bool feasible = (A * x - b).lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + b.lpNorm<Eigen::Infinity>());
    for (Index i = 0; i < n; ++i) feasible = feasible && x[i] >= lo[i] - 1e-10 && x[i] <= hi[i] + 1e-10;
    if (!feasible) continue;
    const double value = 0.5 * x.dot(H * x) + c.dot(x);
    if (value < best) {
      best = value;
      best_x = x;
    }
  }
  return best_x;
}

// min 1/2 x'Hx + c'x  s.t.  Ax = b (no bounds), via the KKT system.
inline VectorXd equality_qp(const MatrixXd& H, const VectorXd& c, const MatrixXd& A,
                            const VectorXd& b) {
  const Index n = c.size();
  const Index m = A.rows();
  MatrixXd K = MatrixXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = H;
  K.topRightCorner(n, m) = A.transpose();
  K.bottomLeftCorner(m, n) = A;
  VectorXd rhs(n + m);
  rhs << -c, b;
  return K.completeOrthogonalDecomposition().solve(rhs).head(n);
}

inline MatrixXd random_matrix(std::mt19937_64& gen, Index rows, Index cols, double lo = -1.0,
                              double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  MatrixXd M(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) M(i, j) = u(gen);
  }
  return M;
}

inline VectorXd random_vector(std::mt19937_64& gen, Index n, double lo = -1.0, double hi = 1.0) {
  return random_matrix(gen, n, 1, lo, hi);
}

}  // namespace oracle
