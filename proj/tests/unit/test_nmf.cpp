#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bnmf/error.hpp"
#include "bnmf/membership.hpp"
#include "bnmf/nmf.hpp"

namespace bnmf {
namespace {

using Index = Eigen::Index;

Factorization make_state(Matrix w, Matrix h, Vector beta, double a = 1.0, double b = 2.0) {
  Factorization f;
  const Index k = w.cols();
  f.w = std::move(w);
  f.h = std::move(h);
  f.beta = std::move(beta);
  f.a = Vector::Constant(k, a);
  f.b = Vector::Constant(k, b);
  return f;
}

Matrix uniform_matrix(std::mt19937_64& rng, Index r, Index c, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

InteractionMatrix random_counts(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix v(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) v(i, j) = u(rng) < 0.5 ? 5.0 * u(rng) : 0.0;
  return InteractionMatrix(v);
}

// Test-side oracle for U, written with explicit loops.
double energy_oracle(const Matrix& v, const Factorization& f, double eps) {
  const Index n = v.rows();
  const Index k = f.w.cols();
  double u = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double vh = 0.0;
      for (Index c = 0; c < k; ++c) vh += f.w(i, c) * f.h(c, j);
      if (v(i, j) > 0) u += v(i, j) * std::log(v(i, j) / std::max(vh, eps));
      u += vh;
    }
  }
  for (Index c = 0; c < k; ++c) {
    double sq = 0.0;
    for (Index i = 0; i < n; ++i) sq += f.w(i, c) * f.w(i, c) + f.h(c, i) * f.h(c, i);
    const double lb = std::log(f.beta(c));
    u += 0.5 * (f.beta(c) * sq - 2.0 * static_cast<double>(n) * lb);
    u += f.beta(c) * f.b(c) - (f.a(c) - 1.0) * lb;
  }
  return u;
}

// dU/dw_ik = sum_j h_kj (1 - v_ij / vhat_ij) + beta_k w_ik
Matrix grad_w_oracle(const Matrix& v, const Factorization& f) {
  const Matrix vh = f.w * f.h;
  Matrix g(f.w.rows(), f.w.cols());
  for (Index i = 0; i < f.w.rows(); ++i)
    for (Index c = 0; c < f.w.cols(); ++c) {
      double s = 0.0;
      for (Index j = 0; j < v.cols(); ++j) s += f.h(c, j) * (1.0 - v(i, j) / vh(i, j));
      g(i, c) = s + f.beta(c) * f.w(i, c);
    }
  return g;
}

double beta_derivative_oracle(const Factorization& f, Index c) {
  const double n = static_cast<double>(f.w.rows());
  const double sq = f.w.col(c).squaredNorm() + f.h.row(c).squaredNorm();
  return 0.5 * sq - n / f.beta(c) + f.b(c) - (f.a(c) - 1.0) / f.beta(c);
}

TEST(Initialize, EntriesInRange) {
  SolverConfig cfg;
  const Factorization f = initialize(cfg, 16);
  EXPECT_EQ(f.w.rows(), 16);
  EXPECT_EQ(f.w.cols(), 16);
  EXPECT_GE(f.w.minCoeff(), 1e-12);
  EXPECT_LE(f.w.maxCoeff(), 1.0);
  EXPECT_GE(f.h.minCoeff(), 1e-12);
  EXPECT_LE(f.h.maxCoeff(), 1.0);
  EXPECT_GT(f.beta.minCoeff(), 0.0);
}

TEST(Initialize, DeterministicForSeed) {
  SolverConfig cfg;
  cfg.seed = 99;
  const Factorization a = initialize(cfg, 10);
  const Factorization b = initialize(cfg, 10);
  EXPECT_EQ(a.w, b.w);
  EXPECT_EQ(a.h, b.h);
  EXPECT_EQ(a.beta, b.beta);
  cfg.seed = 100;
  EXPECT_NE(initialize(cfg, 10).w, a.w);
}

TEST(Initialize, HonorsKmax) {
  SolverConfig cfg;
  cfg.k_max = 4;
  const Factorization f = initialize(cfg, 16);
  EXPECT_EQ(f.w.rows(), 16);
  EXPECT_EQ(f.w.cols(), 4);
  EXPECT_EQ(f.h.rows(), 4);
  EXPECT_EQ(f.h.cols(), 16);
}

TEST(Initialize, BetaIsOneUpdateStep) {
  SolverConfig cfg;
  const Factorization f = initialize(cfg, 8);
  EXPECT_EQ(update_beta(f, cfg), f.beta);
}

TEST(Initialize, RejectsInvalidConfig) {
  SolverConfig cfg;
  cfg.a = 0.0;
  EXPECT_THROW(initialize(cfg, 3), ParameterError);
  cfg = {};
  cfg.tol = -1.0;
  EXPECT_THROW(initialize(cfg, 3), ParameterError);
}

TEST(Reconstruct, RankOne) {
  Matrix w(2, 1), h(1, 2);
  w << 1, 0;
  h << 0, 1;
  Matrix expected(2, 2);
  expected << 0, 1, 0, 0;
  EXPECT_EQ(reconstruct(make_state(w, h, Vector::Ones(1))), expected);
}

TEST(Reconstruct, IdentityComposition) {
  Matrix v(3, 3);
  v << 2, 1, 0, 1, 3, 2, 0, 2, 2;
  EXPECT_EQ(reconstruct(make_state(Matrix::Identity(3, 3), v, Vector::Ones(3))), v);
}

TEST(Reconstruct, MatchesTripleLoop) {
  std::mt19937_64 rng(1);
  const Matrix w = uniform_matrix(rng, 3, 2, 0, 1);
  const Matrix h = uniform_matrix(rng, 2, 3, 0, 1);
  const Matrix got = reconstruct(make_state(w, h, Vector::Ones(2)));
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) {
      double s = 0.0;
      for (Index c = 0; c < 2; ++c) s += w(i, c) * h(c, j);
      EXPECT_NEAR(got(i, j), s, 1e-15);
    }
}

TEST(DataFit, PerfectScalar) {
  Matrix v(1, 1), vh(1, 1);
  v << 2;
  vh << 2;
  EXPECT_DOUBLE_EQ(data_fit_term(v, vh, 1e-12), 2.0);
}

TEST(DataFit, ZeroCountConvention) {
  Matrix v(1, 1), vh(1, 1);
  v << 0;
  vh << 3;
  EXPECT_DOUBLE_EQ(data_fit_term(v, vh, 1e-12), 3.0);
}

TEST(DataFit, HandSummation) {
  Matrix v(2, 2);
  v << 1, 2, 2, 1;
  EXPECT_NEAR(data_fit_term(v, Matrix::Ones(2, 2), 1e-12), 4.0 + 4.0 * std::log(2.0), 1e-14);
}

TEST(PoissonNll, MatchesLogFactorialForm) {
  Matrix v(1, 2), vh(1, 2);
  v << 3, 0;
  vh << 2, 1.5;
  const double expected = (-3 * std::log(2.0) + 2 + std::log(6.0)) + 1.5;
  EXPECT_NEAR(poisson_nll(v, vh, 1e-12), expected, 1e-12);
}

TEST(Energy, ZeroDataUnitBeta) {
  const double eps = 1e-12;
  Factorization f = make_state(Matrix::Constant(1, 1, eps), Matrix::Constant(1, 1, eps),
                               Vector::Ones(1), 1.0, 2.0);
  SolverConfig cfg;
  const double u = energy(InteractionMatrix(Matrix::Zero(1, 1)), f, cfg);
  EXPECT_NEAR(u, 2.0, 1e-20);
}

TEST(Energy, BetaDoublingShift) {
  // With w = h = 0 only the beta terms move:
  //   dU = -N K log 2 + b sum(beta) - (a - 1) K log 2
  const Index n = 3, k = 2;
  const double a = 1.0, b = 2.0;
  Vector beta(k);
  beta << 0.7, 1.9;
  Factorization f = make_state(Matrix::Zero(n, k), Matrix::Zero(k, n), beta, a, b);
  SolverConfig cfg;
  const InteractionMatrix v(Matrix::Zero(n, n));
  const double u0 = energy(v, f, cfg);
  f.beta *= 2.0;
  const double u1 = energy(v, f, cfg);
  const double expected = -static_cast<double>(n * k) * std::log(2.0) + b * beta.sum() -
                          (a - 1.0) * static_cast<double>(k) * std::log(2.0);
  EXPECT_NEAR(u1 - u0, expected, 1e-12);

  Factorization g = make_state(Matrix::Zero(n, k), Matrix::Zero(k, n), beta, 3.0, b);
  const double g0 = energy(v, g, cfg);
  g.beta *= 2.0;
  const double g_expected = -static_cast<double>(n * k) * std::log(2.0) + b * beta.sum() -
                            2.0 * static_cast<double>(k) * std::log(2.0);
  EXPECT_NEAR(energy(v, g, cfg) - g0, g_expected, 1e-12);
}

TEST(Energy, MatchesLoopOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const InteractionMatrix v = random_counts(rng, 7);
    Factorization f = make_state(uniform_matrix(rng, 7, 4, 0.01, 1), uniform_matrix(rng, 4, 7, 0.01, 1),
                                 uniform_matrix(rng, 4, 1, 0.5, 3).col(0), 1.3, 0.7);
    const double got = energy(v, f, SolverConfig{});
    EXPECT_NEAR(got, energy_oracle(v.values(), f, 1e-12), 1e-10 * std::abs(got));
  }
}

TEST(Energy, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(8);
  SolverConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    const InteractionMatrix v = random_counts(rng, 6);
    Factorization f = make_state(uniform_matrix(rng, 6, 3, 0.2, 1), uniform_matrix(rng, 3, 6, 0.2, 1),
                                 uniform_matrix(rng, 3, 1, 0.5, 3).col(0));
    const Matrix g = grad_w_oracle(v.values(), f);
    for (Index i = 0; i < 6; ++i)
      for (Index c = 0; c < 3; ++c) {
        const double delta = 1e-6;
        Factorization up = f, down = f;
        up.w(i, c) += delta;
        down.w(i, c) -= delta;
        const double fd = (energy(v, up, cfg) - energy(v, down, cfg)) / (2 * delta);
        EXPECT_NEAR(fd, g(i, c), 1e-5 * std::max(1.0, std::abs(g(i, c))));
      }
  }
}

TEST(UpdateH, FixedPointWhenExact) {
  std::mt19937_64 rng(2);
  const Matrix w = uniform_matrix(rng, 5, 3, 0.1, 1);
  const Matrix h = uniform_matrix(rng, 3, 5, 0.1, 1);
  const Factorization f = make_state(w, h, Vector::Zero(3));
  const InteractionMatrix v(w * h);
  EXPECT_TRUE(update_h(v, f, SolverConfig{}).isApprox(h, 1e-13));
  EXPECT_TRUE(update_w(v, f, SolverConfig{}).isApprox(w, 1e-13));
}

TEST(UpdateH, ScalarSubstitution) {
  // h <- 1 / (2 + 0) * (2 * 4 / 2) = 2
  const Factorization f = make_state(Matrix::Constant(1, 1, 2), Matrix::Constant(1, 1, 1),
                                     Vector::Zero(1));
  const Matrix h = update_h(InteractionMatrix(Matrix::Constant(1, 1, 4)), f, SolverConfig{});
  EXPECT_DOUBLE_EQ(h(0, 0), 2.0);
}

TEST(UpdateW, ScalarSubstitution) {
  // w <- 1 / (2 + 0) * ((4 / 2) * 2) = 2
  const Factorization f = make_state(Matrix::Constant(1, 1, 1), Matrix::Constant(1, 1, 2),
                                     Vector::Zero(1));
  const Matrix w = update_w(InteractionMatrix(Matrix::Constant(1, 1, 4)), f, SolverConfig{});
  EXPECT_DOUBLE_EQ(w(0, 0), 2.0);
}

TEST(Updates, OutputsRespectFloor) {
  std::mt19937_64 rng(4);
  SolverConfig cfg;
  cfg.eps = 1e-9;
  for (int trial = 0; trial < 20; ++trial) {
    InteractionMatrix v(Matrix::Zero(5, 5));
    if (trial % 2) v = random_counts(rng, 5);
    const Factorization f = make_state(uniform_matrix(rng, 5, 4, 0, 1e-6),
                                       uniform_matrix(rng, 4, 5, 0, 1e-6), Vector::Constant(4, 50));
    EXPECT_GE(update_h(v, f, cfg).minCoeff(), cfg.eps);
    EXPECT_GE(update_w(v, f, cfg).minCoeff(), cfg.eps);
  }
}

TEST(UpdateW, MirrorsUpdateHOnSymmetricInput) {
  std::mt19937_64 rng(6);
  Matrix s = random_counts(rng, 6).values();
  s = s + s.transpose().eval();
  const InteractionMatrix v(s);
  const Matrix w = uniform_matrix(rng, 6, 3, 0.1, 1);
  Vector beta(3);
  beta << 0.5, 1.5, 4;
  const Factorization f = make_state(w, w.transpose(), beta);
  const Matrix new_w = update_w(v, f, SolverConfig{});
  const Matrix new_h = update_h(v, f, SolverConfig{});
  EXPECT_TRUE(new_w.isApprox(new_h.transpose(), 1e-13));
}

TEST(UpdateBeta, ZeroSums) {
  const Factorization f = make_state(Matrix::Zero(4, 1), Matrix::Zero(1, 4), Vector::Ones(1), 1, 2);
  EXPECT_DOUBLE_EQ(update_beta(f, SolverConfig{})(0), 2.0);
}

TEST(UpdateBeta, DirectSubstitution) {
  // sum w^2 = 2, sum h^2 = 2, N = 16 -> 16 / (2 + 2) = 4
  Matrix w = Matrix::Zero(16, 1), h = Matrix::Zero(1, 16);
  w(0, 0) = 1;
  w(1, 0) = 1;
  h(0, 3) = std::sqrt(2.0);
  const Factorization f = make_state(w, h, Vector::Ones(1), 1, 2);
  EXPECT_DOUBLE_EQ(update_beta(f, SolverConfig{})(0), 4.0);
}

TEST(UpdateBeta, ZeroesEnergyDerivative) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    Factorization f = make_state(uniform_matrix(rng, 9, 5, 0, 2), uniform_matrix(rng, 5, 9, 0, 2),
                                 Vector::Ones(5), 1.0 + trial % 4, 0.5 + trial % 3);
    f.beta = update_beta(f, SolverConfig{});
    for (Index c = 0; c < 5; ++c) {
      const double scale = static_cast<double>(f.w.rows()) / f.beta(c) + f.b(c);
      EXPECT_LE(std::abs(beta_derivative_oracle(f, c)), 1e-10 * scale);
    }
  }
}

TEST(Fit, ZeroMatrixCollapsesToFloor) {
  SolverConfig cfg;
  const FitResult r = fit(InteractionMatrix(Matrix::Zero(4, 4)), cfg);
  EXPECT_TRUE(r.converged);
  // beta_k -> (N + a - 1) / b once w, h hit the floor
  const double limit = (4 + cfg.a - 1) / cfg.b;
  for (Index c = 0; c < r.factorization.beta.size(); ++c) {
    EXPECT_NEAR(r.factorization.beta(c), limit, 1e-6 * limit);
  }
  EXPECT_EQ(memberships(r.factorization.w, cfg.eps).k_effective, 0u);
}

TEST(Fit, TraceIsNonIncreasing) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    std::uniform_int_distribution<Index> size(4, 24);
    const Index n = size(rng);
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(trial);
    cfg.k_max = static_cast<std::size_t>(1 + trial % n);
    const FitResult r = fit(random_counts(rng, n), cfg);
    ASSERT_EQ(r.energy_trace.size(), r.iterations_run + 1);
    for (std::size_t t = 1; t < r.energy_trace.size(); ++t) {
      const double prev = r.energy_trace[t - 1];
      ASSERT_LE(r.energy_trace[t], prev + 1e-9 * std::max(std::abs(prev), 1.0)) << "step " << t;
    }
    EXPECT_GE(r.factorization.w.minCoeff(), cfg.eps);
    EXPECT_GE(r.factorization.h.minCoeff(), cfg.eps);
  }
}

TEST(Fit, DeterministicForSeed) {
  std::mt19937_64 rng(31);
  const InteractionMatrix v = random_counts(rng, 12);
  SolverConfig cfg;
  cfg.seed = 5;
  const FitResult a = fit(v, cfg);
  const FitResult b = fit(v, cfg);
  EXPECT_EQ(a.energy_trace, b.energy_trace);
  EXPECT_EQ(a.factorization.w, b.factorization.w);
}

TEST(Fit, StopsAtIterationCap) {
  std::mt19937_64 rng(32);
  SolverConfig cfg;
  cfg.max_iters = 3;
  cfg.tol = 1e-300;
  const FitResult r = fit(random_counts(rng, 8), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations_run, 3u);
  EXPECT_EQ(r.energy_trace.size(), 4u);
}

TEST(Fit, NonFiniteEnergyRaisesWithIteration) {
  Matrix v = Matrix::Ones(3, 3);
  v(1, 2) = std::numeric_limits<double>::infinity();
  try {
    fit(InteractionMatrix(v), SolverConfig{});
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.iteration(), 0u);
  }
}

TEST(Fit, StationaryAtFixedPoint) {
  // Run to a tight fixed point, then check that the central-difference
  // gradient of U vanishes on every entry above the floor.
  std::mt19937_64 rng(40);
  Matrix s = random_counts(rng, 6).values();
  const InteractionMatrix v(s + s.transpose().eval() + Matrix::Identity(6, 6));
  SolverConfig cfg;
  cfg.k_max = 3;
  cfg.tol = 1e-300;
  cfg.max_iters = 20000;
  const FitResult r = fit(v, cfg);
  const Factorization& f = r.factorization;
  const Matrix next = update_w(v, f, cfg);
  ASSERT_LT((next - f.w).cwiseAbs().maxCoeff(), 1e-8);

  for (Index i = 0; i < f.w.rows(); ++i)
    for (Index c = 0; c < f.w.cols(); ++c) {
      if (f.w(i, c) < 1e-4) continue;
      const double delta = 1e-6 * f.w(i, c);
      Factorization up = f, down = f;
      up.w(i, c) += delta;
      down.w(i, c) -= delta;
      const double fd = (energy(v, up, cfg) - energy(v, down, cfg)) / (2 * delta);
      const double scale = f.h.row(c).sum() + f.beta(c) * f.w(i, c);
      EXPECT_LT(std::abs(fd), 1e-5 * scale) << "w(" << i << "," << c << ")";
    }
}

TEST(Fit, PermutationEquivariance) {
  std::mt19937_64 rng(50);
  const Index n = 10;
  const InteractionMatrix v = random_counts(rng, n);
  SolverConfig cfg;
  cfg.k_max = 4;
  cfg.max_iters = 40;
  cfg.tol = 1e-300;
  const Factorization init = initialize(cfg, n);

  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(n);
  for (Index i = 0; i < n; ++i) p.indices()(i) = static_cast<int>(perm[static_cast<std::size_t>(i)]);

  const InteractionMatrix pv(p * v.values() * p.transpose());
  Factorization pinit = init;
  pinit.w = p * init.w;
  pinit.h = init.h * p.transpose();

  // Single update: identical up to summation order.
  EXPECT_TRUE(update_h(pv, pinit, cfg).isApprox(update_h(v, init, cfg) * p.transpose(), 1e-12));
  EXPECT_TRUE(update_w(pv, pinit, cfg).isApprox(p * update_w(v, init, cfg), 1e-12));

  const FitResult a = fit(v, cfg, init);
  const FitResult b = fit(pv, cfg, pinit);
  EXPECT_TRUE(b.factorization.w.isApprox(p * a.factorization.w, 1e-8));
  EXPECT_TRUE(b.factorization.h.isApprox(a.factorization.h * p.transpose(), 1e-8));
  EXPECT_NEAR(a.energy_trace.back(), b.energy_trace.back(), 1e-9 * std::abs(a.energy_trace.back()));
}

InteractionMatrix planted_blocks(std::size_t blocks, std::size_t size) {
  const std::size_t n = blocks * size;
  Matrix v = Matrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && i / size == j / size) v(static_cast<Index>(i), static_cast<Index>(j)) = 1.0;
  for (Index i = 0; i < v.rows(); ++i) v(i, i) = v.row(i).sum();
  return InteractionMatrix(v);
}

TEST(Fit, TwoCliquesYieldTwoCommunities) {
  const InteractionMatrix v = planted_blocks(2, 3);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SolverConfig cfg;
    cfg.seed = seed;
    const FitResult r = fit(v, cfg);
    if (memberships(r.factorization.w, cfg.eps).k_effective == 2) ++hits;
  }
  EXPECT_GT(hits, 10);
}

TEST(Fit, ShrinkagePrunesSurplusComponents) {
  const InteractionMatrix v = planted_blocks(2, 8);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SolverConfig cfg;
    cfg.seed = seed;
    const FitResult r = fit(v, cfg);
    if (active_components(r.factorization.w, 1e-4) == 2) ++hits;
  }
  EXPECT_GT(hits, 10);
}

}  // namespace
}  // namespace bnmf
