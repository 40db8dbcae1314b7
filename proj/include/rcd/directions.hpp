#pragma once

#include <optional>
#include <span>

#include "rcd/problem.hpp"

namespace rcd {

// Exact minimizer of
//   <grad_ij f(x), s> + L_ij^alpha/2 ||s||_alpha^2 + h(x + s)
//   s.t. a_i's_i + a_j's_j = 0
// over the two blocks i != j. Scalar pairs reduce to a 1-D piecewise
// quadratic along the constraint line; larger blocks go through the separable
// knapsack (box and l1 parts handled in the same breakpoint search).
BlockStep two_block_direction(const CompositeProblem& problem, const SolverState& state,
                              Index i, Index j);

// Exact minimizer of <grad f(x), s> + L_N/2 ||s||^2 + h(x + s) over
// {As = 0, s zero outside the tuple} for m + 1 distinct scalar blocks, with
// L_N the sum of the tuple's L_i. Returns nullopt when the tuple's m x (m+1)
// column submatrix is rank deficient (null space of dimension > 1): the caller
// should draw another tuple.
std::optional<BlockStep> tuple_direction(const CompositeProblem& problem,
                                         const SolverState& state, std::span<const Index> tuple);

// Value of the pair model at `step` minus its value at 0:
//   <g, s> + 1/2 sum_c w_c s_c^2 + h(x + s) - h(x)
// with w_c = L_ij^alpha L_block(c)^alpha. Nonpositive at the model minimizer.
double pair_model_decrease(const CompositeProblem& problem, const SolverState& state,
                           const BlockStep& step);

}  // namespace rcd
