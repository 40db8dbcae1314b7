#pragma once

#include <random>

#include "oracles.hpp"
#include "rcd/problem.hpp"

namespace fixture {

inline rcd::SparseMatrix sparse(const Eigen::MatrixXd& dense) { return dense.sparseView(0.0, 0.0); }

// Random instance with scalar blocks, single coupling, given h.
inline rcd::CompositeProblem random_scalar_problem(std::mt19937_64& gen, Eigen::Index rows,
                                                   Eigen::Index n, rcd::SeparableTerm h,
                                                   double alpha = 0.0) {
  const Eigen::MatrixXd Z = oracle::random_matrix(gen, rows, n);
  const Eigen::VectorXd q = oracle::random_vector(gen, n);
  Eigen::VectorXd a = oracle::random_vector(gen, n, 0.5, 2.0);
  for (Eigen::Index i = 0; i < n; i += 2) a[i] = -a[i];
  return rcd::CompositeProblem(rcd::StructuredSmooth{sparse(Z), q}, std::move(h),
                               rcd::Coupling::single(a, 0.0), rcd::BlockPartition::scalar(n), alpha);
}

inline Eigen::MatrixXd dense(const rcd::SparseMatrix& Z) { return Eigen::MatrixXd(Z); }

}  // namespace fixture
