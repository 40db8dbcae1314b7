#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "pair_cases.hpp"
#include "rcd/conformal.hpp"
#include "rcd/directions.hpp"
#include "rcd/error.hpp"
#include "rcd/knapsack.hpp"
#include "rcd/pw1d.hpp"

using rcd::BlockPartition;
using rcd::CompositeProblem;
using rcd::Coupling;
using rcd::SeparableTerm;
using rcd::StructuredSmooth;
using rcd::Vector;

namespace {

using Phi = rcd::PiecewiseQuadratic1D<double>;
using Term = rcd::LineTerm<double>;

rcd::Error::Kind error_kind(const std::function<void()>& call) {
  try {
    call();
  } catch (const rcd::Error& e) {
    return e.kind();
  }
  FAIL("expected an rcd::Error");
  return rcd::Error::Kind::kInternal;
}

// Left and right derivatives of phi at t (box parts excluded).
std::pair<double, double> one_sided_slopes(const Phi& phi, double t) {
  double left = phi.c2 * t + phi.c1;
  double right = left;
  for (const Term& term : phi.terms) {
    if (term.lambda <= 0) continue;
    const double u = term.offset + term.weight * t;
    const double lw = term.lambda * term.weight;
    // A kink mapped to t and back only vanishes up to round-off.
    const bool at_kink = std::abs(u) <= 1e-12 * (1 + std::abs(term.offset));
    if (at_kink) {
      left -= std::abs(lw);
      right += std::abs(lw);
    } else if (u > 0) {
      left += lw;
      right += lw;
    } else {
      left -= lw;
      right -= lw;
    }
  }
  return {left, right};
}

}  // namespace

TEST_CASE("pw1d_minimize") {
  SUBCASE("pure quadratic") {
    // phi(t) = 2t^2 - 4t
    Phi phi;
    phi.c2 = 4;
    phi.c1 = -4;
    const auto r = rcd::pw1d_minimize(phi);
    CHECK(r.t == doctest::Approx(1.0));
    CHECK(r.value == doctest::Approx(-2.0));
  }
  SUBCASE("quadratic plus a kink against the grid") {
    Phi phi;
    phi.c2 = 1;
    phi.terms.push_back(Term{1.0, -1.0, 1.0});
    const auto r = rcd::pw1d_minimize(phi);
    double best_t = -3;
    double best_v = oracle::kInf;
    for (long k = 0; k <= 6000000; ++k) {
      const double t = -3.0 + 1e-6 * static_cast<double>(k);
      const double v = 0.5 * t * t + std::abs(t - 1.0);
      if (v < best_v) {
        best_v = v;
        best_t = t;
      }
    }
    CHECK(std::abs(r.t - best_t) <= 1e-5);
    CHECK(std::abs(r.value - best_v) <= 1e-5);
  }
  SUBCASE("clipped vertex") {
    Phi phi;
    phi.c2 = 1;
    phi.c1 = -10;
    phi.t_lo = 0;
    phi.t_hi = 2;
    CHECK(rcd::pw1d_minimize(phi).t == 2.0);
    Phi boxed;
    boxed.c2 = 1;
    boxed.c1 = -10;
    boxed.terms.push_back(Term{1.0, 0.0, 0.0, 0.0, 2.0});
    CHECK(rcd::pw1d_minimize(boxed).t == 2.0);
  }
  SUBCASE("ties go to the smallest |t|") {
    Phi flat;
    flat.t_lo = -1;
    flat.t_hi = 2;
    CHECK(rcd::pw1d_minimize(flat).t == 0.0);
    Phi valley;
    valley.terms.push_back(Term{1.0, -1.0, 1.0});
    valley.terms.push_back(Term{1.0, 1.0, 1.0});
    CHECK(rcd::pw1d_minimize(valley).t == 0.0);
    Phi shifted;
    shifted.t_lo = 0.5;
    shifted.t_hi = 3;
    CHECK(rcd::pw1d_minimize(shifted).t == 0.5);
  }
  SUBCASE("errors") {
    Phi slope;
    slope.c1 = -1;
    CHECK(error_kind([&] { rcd::pw1d_minimize(slope); }) == rcd::Error::Kind::kUnbounded);
    Phi empty;
    empty.c2 = 1;
    empty.t_lo = 1;
    empty.t_hi = 0;
    CHECK(error_kind([&] { rcd::pw1d_minimize(empty); }) == rcd::Error::Kind::kInfeasible);
    Phi bounded_l1;
    bounded_l1.c1 = -0.5;
    bounded_l1.terms.push_back(Term{1.0, 0.0, 1.0});
    CHECK(rcd::pw1d_minimize(bounded_l1).t == 0.0);
  }
  SUBCASE("zero is in the subdifferential at the minimizer") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 2000; ++trial) {
      Phi phi;
      phi.c2 = trial % 5 == 0 ? 0.0 : std::abs(u(gen));
      phi.c1 = u(gen);
      for (int k = 0; k < 4; ++k) {
        Term term{u(gen), u(gen), std::abs(u(gen))};
        if (k == 3) term.weight = 0.0;
        phi.terms.push_back(term);
      }
      phi.t_lo = -3 + u(gen) * 0.1;
      phi.t_hi = 3 + u(gen) * 0.1;
      const auto r = rcd::pw1d_minimize(phi);
      const auto [left, right] = one_sided_slopes(phi, r.t);
      const double tol = 1e-9 * (1 + std::abs(left) + std::abs(right));
      if (r.t > phi.t_lo) CHECK(left <= tol);
      if (r.t < phi.t_hi) CHECK(right >= -tol);
    }
  }
}

TEST_CASE("quadratic_knapsack") {
  SUBCASE("unconstrained optimum feasible") {
    const Vector s = rcd::quadratic_knapsack(Vector::Zero(3), 2.0, Vector::Ones(3), 0.0,
                                             Vector::Constant(3, -1), Vector::Constant(3, 1));
    CHECK(s.isZero(0.0));
  }
  SUBCASE("hand KKT") {
    const Vector s = rcd::quadratic_knapsack(Vector{{1.0, 1.0}}, 1.0, Vector{{1.0, -1.0}}, 0.0,
                                             Vector::Constant(2, -10), Vector::Constant(2, 10));
    CHECK(s[0] == doctest::Approx(-1.0));
    CHECK(s[1] == doctest::Approx(-1.0));
  }
  SUBCASE("infeasible") {
    CHECK(error_kind([] {
            rcd::quadratic_knapsack(Vector::Zero(2), 1.0, Vector::Ones(2), 5.0, Vector::Zero(2), Vector::Ones(2));
          }) == rcd::Error::Kind::kInfeasible);
  }
  SUBCASE("random instances against enumeration, with KKT residuals") {
    std::mt19937_64 gen(31);
    std::uniform_int_distribution<int> dim(2, 6);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index d = dim(gen);
      const Vector g = oracle::random_vector(gen, d, -3, 3);
      const double L = oracle::random_vector(gen, 1, 0.2, 4)[0];
      Vector a = oracle::random_vector(gen, d, -2, 2);
      const Vector lo = oracle::random_vector(gen, d, -2, 0);
      const Vector hi = lo + oracle::random_vector(gen, d, 0.1, 3);
      const Vector inside = lo + (hi - lo).cwiseProduct(oracle::random_vector(gen, d, 0, 1));
      const double b = a.dot(inside);
      const Vector s = rcd::quadratic_knapsack(g, L, a, b, lo, hi);
      const Vector expected = oracle::knapsack_by_enumeration(g, Vector::Constant(d, L), a, b, lo, hi);
      worst = std::max(worst, (s - expected).lpNorm<Eigen::Infinity>());

      // Stationarity: free coordinates share one multiplier, bounds have the
      // right sign.
      const double scale = 1 + g.cwiseAbs().maxCoeff() + L * hi.cwiseAbs().maxCoeff();
      double mu = 0;
      double mu_weight = 0;
      for (Eigen::Index i = 0; i < d; ++i) {
        if (s[i] > lo[i] + 1e-9 && s[i] < hi[i] - 1e-9 && std::abs(a[i]) > 1e-3) {
          mu += -(g[i] + L * s[i]) / a[i] * std::abs(a[i]);
          mu_weight += std::abs(a[i]);
        }
      }
      if (mu_weight > 0) mu /= mu_weight;
      for (Eigen::Index i = 0; i < d; ++i) {
        const double residual = g[i] + L * s[i] + mu * a[i];
        if (s[i] > lo[i] + 1e-9 && s[i] < hi[i] - 1e-9 && mu_weight > 0) CHECK(std::abs(residual) <= 1e-9 * scale);
        if (mu_weight > 0 && s[i] <= lo[i] + 1e-9 && s[i] < hi[i] - 1e-9) CHECK(residual >= -1e-9 * scale);
        if (mu_weight > 0 && s[i] >= hi[i] - 1e-9 && s[i] > lo[i] + 1e-9) CHECK(residual <= 1e-9 * scale);
      }
      CHECK(std::abs(a.dot(s) - b) <= 1e-9 * (1 + std::abs(b)));
    }
    CHECK(worst <= 1e-8);
  }
  SUBCASE("weighted knapsack with l1 against enumeration") {
    std::mt19937_64 gen(32);
    std::uniform_int_distribution<int> dim(2, 5);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index d = dim(gen);
      rcd::SeparableKnapsack<double> p;
      p.g = oracle::random_vector(gen, d, -3, 3);
      p.weight = oracle::random_vector(gen, d, 0.2, 4);
      p.a = oracle::random_vector(gen, d, -2, 2);
      p.lower = oracle::random_vector(gen, d, -2, 0);
      p.upper = p.lower + oracle::random_vector(gen, d, 0.1, 3);
      p.lambda = oracle::random_vector(gen, d, 0, 1.5);
      p.kink = p.lower + (p.upper - p.lower).cwiseProduct(oracle::random_vector(gen, d, -0.2, 1.2));
      if (trial % 3 == 0) {
        p.lower.setConstant(-oracle::kInf);
        p.upper.setConstant(oracle::kInf);
      }
      const Vector inside = trial % 3 == 0 ? oracle::random_vector(gen, d)
                                           : Vector(p.lower + (p.upper - p.lower).cwiseProduct(oracle::random_vector(gen, d, 0, 1)));
      p.b = p.a.dot(inside);
      const Vector s = rcd::solve_knapsack(p);
      const Vector expected =
          oracle::knapsack_l1_by_enumeration(p.g, p.weight, p.a, p.b, p.lower, p.upper, p.lambda, p.kink);
      auto value = [&](const Vector& v) {
        return p.g.dot(v) + 0.5 * p.weight.dot(v.cwiseProduct(v)) + p.lambda.dot((v - p.kink).cwiseAbs());
      };
      worst = std::max(worst, std::abs(value(s) - value(expected)));
      CHECK(std::abs(p.a.dot(s) - p.b) <= 1e-9 * (1 + std::abs(p.b)));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("simplex_projection") {
  const Vector on{{0.2, 0.3, 0.5}};
  CHECK((rcd::simplex_projection(on) - on).norm() <= 1e-15);
  const Vector two = rcd::simplex_projection(Vector{{1.0, 0.5}});
  CHECK(two[0] == doctest::Approx(0.75));
  CHECK(two[1] == doctest::Approx(0.25));
  const Vector flat = rcd::simplex_projection(Vector::Constant(3, -5.0));
  CHECK((flat - Vector::Constant(3, 1.0 / 3.0)).norm() <= 1e-15);

  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 500; ++trial) {
    const Vector y = oracle::random_vector(gen, 1 + trial % 40, -3, 3);
    CHECK((rcd::simplex_projection(y) - oracle::simplex_projection_by_sorting(y)).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  Eigen::VectorXf yf(2);
  yf << 1.0f, 0.5f;
  CHECK(rcd::simplex_projection(yf)[0] == doctest::Approx(0.75f));
}

TEST_CASE("two_block_direction") {
  SUBCASE("stationary pair") {
    const CompositeProblem p(StructuredSmooth{fixture::sparse(Eigen::MatrixXd::Identity(3, 3)), Vector::Zero(3)},
                             SeparableTerm::zero(3), Coupling::single(Vector::Ones(3), 0.0), BlockPartition::scalar(3));
    const auto s = rcd::two_block_direction(p, rcd::make_state(p, Vector::Zero(3)), 0, 2);
    CHECK(s.values.isZero(0.0));
  }
  SUBCASE("hand KKT projection") {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);
    Z(0, 0) = 1;
    Z(1, 1) = std::sqrt(2.0);
    const CompositeProblem p(StructuredSmooth{fixture::sparse(Z), Vector{{2.0, -1.0}}}, SeparableTerm::zero(2),
                             Coupling::single(Vector::Ones(2), 0.0), BlockPartition::scalar(2));
    CHECK(p.pair_lipschitz(0, 1) == doctest::Approx(3.0));
    const auto s = rcd::two_block_direction(p, rcd::make_state(p, Vector::Zero(2)), 0, 1);
    CHECK(s.values[0] == doctest::Approx(-0.5));
    CHECK(s.values[1] == doctest::Approx(0.5));
  }
  SUBCASE("scalar pairs against the line grid") {
    std::mt19937_64 gen(51);
    double worst = 0.0;
    for (auto kind : {pair_case::Kind::kL1, pair_case::Kind::kBox, pair_case::Kind::kL1Box}) {
      for (int trial = 0; trial < 30; ++trial) {
        const double alpha = trial % 2 == 0 ? 0.0 : 1.0;
        const auto inst = pair_case::random_instance(gen, kind, alpha);
        const rcd::SolverState state = rcd::make_state(inst.problem, inst.x);
        const auto step = rcd::two_block_direction(inst.problem, state, 1, 2);
        const auto model = pair_case::line_model(inst.problem, inst.x, 1, 2);
        const double value = rcd::pair_model_decrease(inst.problem, state, step);
        worst = std::max(worst, std::abs(value - pair_case::grid_value(model)));
        const Vector a = inst.problem.coupling().a();
        CHECK(std::abs(a[1] * step.values[0] + a[2] * step.values[1]) <= 1e-10 * (1 + step.values.norm()));
        CHECK(value <= 0.0);
      }
    }
    CHECK(worst <= 1e-6);
  }
  SUBCASE("multi-coordinate blocks against enumeration") {
    std::mt19937_64 gen(52);
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::Index n = 5;
      const Eigen::MatrixXd Z = oracle::random_matrix(gen, 4, n);
      const Vector q = oracle::random_vector(gen, n);
      const Vector a = oracle::random_vector(gen, n, 0.3, 1.5).cwiseProduct(Vector{{1, -1, 1, 1, -1}});
      const bool l1 = trial % 2 == 0;
      const CompositeProblem p(StructuredSmooth{fixture::sparse(Z), q},
                               SeparableTerm::l1_box(n, l1 ? 0.7 : 0.0, -1.0, 1.0),
                               Coupling::single(a, 0.0), BlockPartition({2, 3}), trial % 4 < 2 ? 0.0 : 1.0);
      const Vector x = oracle::random_vector(gen, n, -1, 1);
      const rcd::SolverState state = rcd::make_state(p, x);
      const auto step = rcd::two_block_direction(p, state, 0, 1);
      const Vector g = Z.transpose() * (Z * x) + q;
      Vector w(n);
      w << Vector::Constant(2, p.pair_lipschitz(0, 1) * p.norm_weight(0)),
          Vector::Constant(3, p.pair_lipschitz(0, 1) * p.norm_weight(1));
      const Vector lambda = Vector::Constant(n, l1 ? 0.7 : 0.0);
      const Vector expected = oracle::knapsack_l1_by_enumeration(
          g, w, a, 0.0, Vector::Constant(n, -1) - x, Vector::Constant(n, 1) - x, lambda, -x);
      auto value = [&](const Vector& s) {
        return g.dot(s) + 0.5 * w.dot(s.cwiseProduct(s)) + lambda.dot((x + s).cwiseAbs());
      };
      CHECK(value(step.values) <= value(expected) + 1e-9);
      CHECK(std::abs(a.dot(step.values)) <= 1e-10 * (1 + step.values.norm()));
    }
  }
  SUBCASE("both coupling weights zero") {
    const Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(4, 4);
    const CompositeProblem p(StructuredSmooth{fixture::sparse(Z), Vector{{0, 0, -1, 2}}}, SeparableTerm::zero(4),
                             Coupling::single(Vector{{1, 1, 0, 0}}, 0.0), BlockPartition::scalar(4));
    const auto s = rcd::two_block_direction(p, rcd::make_state(p, Vector::Zero(4)), 2, 3);
    // Independent minimizers of g s + (L_i + L_j)/2 s^2 with L = 1.
    CHECK(s.values[0] == doctest::Approx(0.5));
    CHECK(s.values[1] == doctest::Approx(-1.0));
  }
  SUBCASE("argument errors") {
    std::mt19937_64 gen(53);
    const CompositeProblem p = fixture::random_scalar_problem(gen, 2, 3, SeparableTerm::zero(3));
    const auto state = rcd::make_state(p, Vector::Zero(3));
    CHECK_THROWS_AS(rcd::two_block_direction(p, state, 1, 1), rcd::Error);
    CHECK_THROWS_AS(rcd::two_block_direction(p, state, 0, 3), rcd::Error);
  }
}

TEST_CASE("conformal_realization") {
  SUBCASE("already elementary") {
    const Vector a{{1, 2, 3}};
    const Vector d{{2, -1, 0}};
    const auto pieces = rcd::conformal_realization(d, a);
    REQUIRE(pieces.size() == 1);
    CHECK((Vector(pieces[0]) - d).norm() == 0.0);
  }
  SUBCASE("three coordinates") {
    const Vector a = Vector::Ones(3);
    const Vector d{{1, -2, 1}};
    const auto pieces = rcd::conformal_realization(d, a);
    REQUIRE(pieces.size() == 2);
    CHECK((Vector(pieces[0]) - Vector{{1, -1, 0}}).norm() == 0.0);
    CHECK((Vector(pieces[1]) - Vector{{0, -1, 1}}).norm() == 0.0);
    CHECK_FALSE(rcd::check_conformal_realization(d, a, pieces).has_value());
  }
  SUBCASE("zero weights become singletons") {
    const Vector a{{1, 0, -1, 0}};
    const Vector d{{1, 5, 1, -2}};
    const auto pieces = rcd::conformal_realization(d, a);
    CHECK_FALSE(rcd::check_conformal_realization(d, a, pieces, false).has_value());
    CHECK(pieces.size() == 3);
  }
  SUBCASE("checker catches violations") {
    const Vector a = Vector::Ones(3);
    const Vector d{{1, -2, 1}};
    rcd::ElementaryDecomposition<double> bad(1, Eigen::SparseVector<double>(3));
    bad[0].insert(0) = 1;
    bad[0].insert(1) = -2;
    bad[0].insert(2) = 1;
    CHECK(rcd::check_conformal_realization(d, a, bad).has_value());
  }
  SUBCASE("not in the null space") {
    CHECK(error_kind([] { rcd::conformal_realization(Vector{{1.0, 1.0}}, Vector{{1.0, 1.0}}); }) ==
          rcd::Error::Kind::kInvalidArgument);
  }
  SUBCASE("random null-space vectors") {
    std::mt19937_64 gen(61);
    std::uniform_int_distribution<int> size(2, 50);
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Index n = size(gen);
      Vector a = oracle::random_vector(gen, n, -2, 2);
      Vector d = oracle::random_vector(gen, n, -1, 1);
      for (Eigen::Index i = 0; i < n; i += 3) d[i] = 0;
      d -= a * (a.dot(d) / a.squaredNorm());
      const auto pieces = rcd::conformal_realization(d, a);
      const auto problem = rcd::check_conformal_realization(d, a, pieces);
      CHECK_MESSAGE(!problem.has_value(), problem.value_or(""));
    }
  }
}

TEST_CASE("tuple_direction") {
  SUBCASE("stationary tuple") {
    const Eigen::MatrixXd A = (Eigen::MatrixXd(2, 3) << 1, 0, -1, 0, 1, -1).finished();
    const CompositeProblem p(StructuredSmooth{fixture::sparse(Eigen::MatrixXd::Identity(3, 3)), Vector::Zero(3)},
                             SeparableTerm::zero(3), Coupling::general(A, Vector::Zero(2)), BlockPartition::scalar(3));
    const std::vector<Eigen::Index> tuple{0, 1, 2};
    const auto s = rcd::tuple_direction(p, rcd::make_state(p, Vector::Zero(3)), tuple);
    REQUIRE(s.has_value());
    CHECK(s->values.isZero(0.0));
  }
  SUBCASE("m = 1 is the pair step") {
    std::mt19937_64 gen(71);
    for (int trial = 0; trial < 50; ++trial) {
      const auto inst = pair_case::random_instance(gen, pair_case::Kind::kL1Box, 0.0);
      const CompositeProblem general(inst.problem.smooth(), inst.problem.nonsmooth(),
                                     Coupling::general(inst.problem.coupling().A(), Vector::Zero(1)),
                                     inst.problem.partition());
      const auto state = rcd::make_state(inst.problem, inst.x);
      const std::vector<Eigen::Index> tuple{3, 1};
      const auto s = rcd::tuple_direction(general, state, tuple);
      const auto pair = rcd::two_block_direction(inst.problem, state, 3, 1);
      REQUIRE(s.has_value());
      CHECK(s->values == pair.values);
    }
  }
  SUBCASE("m = 2 against the equality-constrained QP") {
    const Eigen::MatrixXd A = (Eigen::MatrixXd(2, 3) << 1, 0, -1, 0, 1, -1).finished();
    std::mt19937_64 gen(72);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::MatrixXd Z = oracle::random_matrix(gen, 3, 3);
      const Vector q = oracle::random_vector(gen, 3);
      const CompositeProblem p(StructuredSmooth{fixture::sparse(Z), q}, SeparableTerm::zero(3),
                               Coupling::general(A, Vector::Zero(2)), BlockPartition::scalar(3));
      const Vector x = oracle::random_vector(gen, 3);
      const std::vector<Eigen::Index> tuple{0, 1, 2};
      const auto s = rcd::tuple_direction(p, rcd::make_state(p, x), tuple);
      REQUIRE(s.has_value());
      const double LN = p.lipschitz().sum();
      const Vector g = Z.transpose() * (Z * x) + q;
      const Vector expected = oracle::equality_qp(LN * Eigen::MatrixXd::Identity(3, 3), g, A, Vector::Zero(2));
      CHECK((s->values - expected).lpNorm<Eigen::Infinity>() <= 1e-8);
      CHECK((A * s->values).lpNorm<Eigen::Infinity>() <= 1e-10 * (1 + s->values.norm()));
    }
  }
  SUBCASE("rank-deficient tuple asks for a resample") {
    // Columns 0, 1, 3 of A span a single direction; columns 0, 2, 3 do not.
    const Eigen::MatrixXd A = (Eigen::MatrixXd(2, 4) << 1, 2, 0, 3, 2, 4, 1, 6).finished();
    const CompositeProblem p(StructuredSmooth{fixture::sparse(Eigen::MatrixXd::Identity(4, 4)), Vector::Ones(4)},
                             SeparableTerm::zero(4), Coupling::general(A, Vector::Zero(2)), BlockPartition::scalar(4));
    const auto state = rcd::make_state(p, Vector::Zero(4));
    const std::vector<Eigen::Index> rank_one{0, 1, 3};
    const std::vector<Eigen::Index> full_rank{0, 2, 3};
    CHECK_FALSE(rcd::tuple_direction(p, state, rank_one).has_value());
    CHECK(rcd::tuple_direction(p, state, full_rank).has_value());
  }
  SUBCASE("non-scalar blocks are unsupported") {
    const Eigen::MatrixXd A = (Eigen::MatrixXd(1, 3) << 1, 1, 1).finished();
    const CompositeProblem p(StructuredSmooth{fixture::sparse(Eigen::MatrixXd::Identity(3, 3)), Vector::Zero(3)},
                             SeparableTerm::zero(3), Coupling::general(A, Vector::Zero(1)), BlockPartition({2, 1}));
    const std::vector<Eigen::Index> tuple{0, 1};
    CHECK(error_kind([&] { rcd::tuple_direction(p, rcd::make_state(p, Vector::Zero(3)), tuple); }) ==
          rcd::Error::Kind::kUnsupported);
  }
}
