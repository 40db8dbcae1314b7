#include "rcd/directions.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "rcd/error.hpp"
#include "rcd/knapsack.hpp"
#include "rcd/pw1d.hpp"

namespace rcd {

namespace {

LineTerm<double> line_term(const SeparableTerm& h, Index c, double x, double weight) {
  return LineTerm<double>{weight, x, h.lambda(c), h.lower(c), h.upper(c)};
}

// Minimizes g s + w/2 s^2 + h_c(x + s) for one unconstrained coordinate.
double single_coordinate_step(const SeparableTerm& h, Index c, double x, double g, double w) {
  PiecewiseQuadratic1D<double> phi;
  phi.c2 = w;
  phi.c1 = g;
  phi.terms.push_back(line_term(h, c, x, 1.0));
  return pw1d_minimize(phi).t;
}

// Closed-form step for two scalar coordinates coupled by a_i s_i + a_j s_j = 0.
Vector scalar_pair_step(const SeparableTerm& h, const Vector& x, Index ci, Index cj, double gi,
                        double gj, double wi, double wj, double ai, double aj) {
  Vector s(2);
  if (ai == 0.0 && aj == 0.0) {
    s[0] = single_coordinate_step(h, ci, x[ci], gi, wi);
    s[1] = single_coordinate_step(h, cj, x[cj], gj, wj);
    return s;
  }
  const double scale = std::max(std::abs(ai), std::abs(aj));
  const double vi = aj / scale;
  const double vj = -ai / scale;
  PiecewiseQuadratic1D<double> phi;
  phi.c2 = wi * vi * vi + wj * vj * vj;
  phi.c1 = gi * vi + gj * vj;
  phi.terms.reserve(2);
  phi.terms.push_back(line_term(h, ci, x[ci], vi));
  phi.terms.push_back(line_term(h, cj, x[cj], vj));
  const double t = pw1d_minimize(phi).t;
  s[0] = t * vi;
  s[1] = t * vj;
  return s;
}

void require_block(const CompositeProblem& problem, Index block) {
  if (block < 0 || block >= problem.num_blocks()) {
    throw Error(Error::Kind::kInvalidArgument, "block index out of range");
  }
}

}  // namespace

BlockStep two_block_direction(const CompositeProblem& problem, const SolverState& state,
                              Index i, Index j) {
  require_block(problem, i);
  require_block(problem, j);
  if (i == j) throw Error(Error::Kind::kInvalidArgument, "two_block_direction needs i != j");
  if (!problem.coupling().is_single()) {
    throw Error(Error::Kind::kUnsupported, "two_block_direction needs a single coupling constraint");
  }
  const BlockPartition& partition = problem.partition();
  const SeparableTerm& h = problem.nonsmooth();
  const Matrix& A = problem.coupling().A();
  const double lij = problem.pair_lipschitz(i, j);
  const double wi = lij * problem.norm_weight(i);
  const double wj = lij * problem.norm_weight(j);

  BlockStep step;
  step.blocks = {i, j};
  if (partition.size(i) == 1 && partition.size(j) == 1) {
    const Index ci = partition.offset(i);
    const Index cj = partition.offset(j);
    const double gi = grad_coordinate(problem, state, ci);
    const double gj = grad_coordinate(problem, state, cj);
    step.values = scalar_pair_step(h, state.x, ci, cj, gi, gj, wi, wj, A(0, ci), A(0, cj));
    return step;
  }

  const Index ni = partition.size(i);
  const Index nj = partition.size(j);
  const Index d = ni + nj;
  SeparableKnapsack<double> sub;
  sub.g.resize(d);
  sub.g << grad_block(problem, state, i), grad_block(problem, state, j);
  sub.weight.resize(d);
  sub.weight << Vector::Constant(ni, wi), Vector::Constant(nj, wj);
  sub.a.resize(d);
  sub.lower.resize(d);
  sub.upper.resize(d);
  Vector x_sub(d);
  bool any_l1 = false;
  for (Index k = 0; k < d; ++k) {
    const Index c = k < ni ? partition.offset(i) + k : partition.offset(j) + (k - ni);
    x_sub[k] = state.x[c];
    sub.a[k] = A(0, c);
    sub.lower[k] = h.lower(c) - state.x[c];
    sub.upper[k] = h.upper(c) - state.x[c];
    any_l1 = any_l1 || h.lambda(c) > 0.0;
  }
  if (any_l1) {
    sub.lambda.resize(d);
    for (Index k = 0; k < d; ++k) {
      const Index c = k < ni ? partition.offset(i) + k : partition.offset(j) + (k - ni);
      sub.lambda[k] = h.lambda(c);
    }
    sub.kink = -x_sub;
  }
  sub.b = 0.0;
  step.values = solve_knapsack(sub);
  return step;
}

std::optional<BlockStep> tuple_direction(const CompositeProblem& problem,
                                         const SolverState& state, std::span<const Index> tuple) {
  const Matrix& A = problem.coupling().A();
  const Index m = A.rows();
  if (static_cast<Index>(tuple.size()) != m + 1) {
    throw Error(Error::Kind::kDimension, "tuple_direction needs exactly m + 1 blocks");
  }
  const BlockPartition& partition = problem.partition();
  for (std::size_t p = 0; p < tuple.size(); ++p) {
    require_block(problem, tuple[p]);
    if (partition.size(tuple[p]) != 1) {
      throw Error(Error::Kind::kUnsupported, "tuple_direction supports scalar blocks only");
    }
    for (std::size_t r = 0; r < p; ++r) {
      if (tuple[r] == tuple[p]) throw Error(Error::Kind::kInvalidArgument, "tuple blocks must be distinct");
    }
  }

  const Index k = m + 1;
  std::vector<Index> coords(tuple.size());
  for (std::size_t p = 0; p < tuple.size(); ++p) coords[p] = partition.offset(tuple[p]);

  Vector v(k);
  if (m == 1) {
    // Null space of the 1 x 2 row [a_i a_j] in closed form.
    const double ai = A(0, coords[0]);
    const double aj = A(0, coords[1]);
    if (ai == 0.0 && aj == 0.0) return std::nullopt;
    const double scale = std::max(std::abs(ai), std::abs(aj));
    v << aj / scale, -ai / scale;
  } else {
    Matrix sub(m, k);
    for (Index p = 0; p < k; ++p) sub.col(p) = A.col(coords[p]);
    Eigen::FullPivLU<Matrix> lu(sub);
    lu.setThreshold(1e-10);
    const Index nullity = k - lu.rank();
    if (nullity != 1) return std::nullopt;
    v = lu.kernel().col(0);
    v /= v.lpNorm<Eigen::Infinity>();
  }

  double lipschitz_sum = 0.0;
  for (Index block : tuple) lipschitz_sum += problem.lipschitz(block);

  const SeparableTerm& h = problem.nonsmooth();
  PiecewiseQuadratic1D<double> phi;
  // Summed term by term so that m = 1 rounds exactly like the pair step.
  for (Index p = 0; p < k; ++p) phi.c2 += lipschitz_sum * v[p] * v[p];
  phi.terms.reserve(static_cast<std::size_t>(k));
  for (Index p = 0; p < k; ++p) {
    const Index c = coords[p];
    phi.c1 += grad_coordinate(problem, state, c) * v[p];
    phi.terms.push_back(line_term(h, c, state.x[c], v[p]));
  }
  const double t = pw1d_minimize(phi).t;

  BlockStep step;
  step.blocks.assign(tuple.begin(), tuple.end());
  step.values = t * v;
  return step;
}

double pair_model_decrease(const CompositeProblem& problem, const SolverState& state,
                           const BlockStep& step) {
  const BlockPartition& partition = problem.partition();
  const SeparableTerm& h = problem.nonsmooth();
  if (step.blocks.size() != 2) {
    throw Error(Error::Kind::kInvalidArgument, "pair model needs a two-block step");
  }
  const double lij = problem.pair_lipschitz(step.blocks[0], step.blocks[1]);
  double total = 0.0;
  Index cursor = 0;
  for (Index block : step.blocks) {
    const Vector g = grad_block(problem, state, block);
    const double w = lij * problem.norm_weight(block);
    for (Index k = 0; k < partition.size(block); ++k) {
      const Index c = partition.offset(block) + k;
      const double s = step.values[cursor + k];
      const double moved = std::clamp(state.x[c] + s, h.lower(c), h.upper(c));
      total += g[k] * s + 0.5 * w * s * s + h.value(c, moved) - h.value(c, state.x[c]);
    }
    cursor += partition.size(block);
  }
  return total;
}

}  // namespace rcd
