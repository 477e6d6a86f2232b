#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bnmf/graph.hpp"

namespace bnmf {

inline constexpr std::uint64_t kDefaultSeed = 1729;

// Solver settings for the MAP fixed-point iteration.
//
// `b` is the *rate* of the Gamma prior on each relevance weight beta_k, so
// the prior energy carries beta_k * b_k. The default 0.5 corresponds to a
// Gamma with shape 1 and scale 2.
struct SolverConfig {
  std::size_t k_max = 0;  // 0 selects K = N
  double a = 1.0;
  double b = 0.5;
  // Optional per-component overrides; empty means `a`/`b` shared across k.
  std::vector<double> a_k;
  std::vector<double> b_k;
  std::size_t max_iters = 500;
  double tol = 1e-6;
  double eps = 1e-12;
  std::uint64_t seed = kDefaultSeed;

  void validate() const;
  std::size_t components(std::size_t n) const { return k_max == 0 ? n : k_max; }
  Vector shape_per_component(std::size_t k) const;
  Vector rate_per_component(std::size_t k) const;
};

// Model state: V ~ W H with per-component relevance weights beta.
//   w    : N x K, non-negative mixing coefficients (column k = community k)
//   h    : K x N, non-negative basis interactions
//   beta : K precisions of the half-normal priors on column k / row k
//   a, b : per-component Gamma shape and rate
struct Factorization {
  Matrix w;
  Matrix h;
  Vector beta;
  Vector a;
  Vector b;

  std::size_t num_nodes() const noexcept { return static_cast<std::size_t>(w.rows()); }
  std::size_t num_components() const noexcept { return static_cast<std::size_t>(w.cols()); }
};

struct FitResult {
  Factorization factorization;
  // energy_trace[0] is the energy at initialization; entry t is the energy
  // after the t-th H, W, beta sweep.
  std::vector<double> energy_trace;
  std::size_t iterations_run = 0;
  bool converged = false;
};

// Draws w, h i.i.d. uniform on [eps, 1] and sets beta by one application of
// update_beta(). Deterministic in config.seed.
Factorization initialize(const SolverConfig& config, std::size_t n);

Matrix reconstruct(const Factorization& f);

// Sum over entries of v*log(v / max(v_hat, eps)) + v_hat, with 0*log(0/x) = 0.
double data_fit_term(const Matrix& v, const Matrix& v_hat, double eps);

// Exact Poisson negative log-likelihood including log(v!) (via lgamma).
// Reporting only; the solver minimizes energy().
double poisson_nll(const Matrix& v, const Matrix& v_hat, double eps);

// Negative log posterior up to parameter-independent constants:
//   data_fit_term
//   + 1/2 sum_k [ beta_k (sum_i w_ik^2 + sum_j h_kj^2) - 2N log beta_k ]
//   + sum_k [ beta_k b_k - (a_k - 1) log beta_k ]
double energy(const InteractionMatrix& v, const Factorization& f, const SolverConfig& config);

// h_kj <- h_kj / (sum_i w_ik + beta_k h_kj) * sum_i w_ik v_ij / vhat_ij
Matrix update_h(const InteractionMatrix& v, const Factorization& f, const SolverConfig& config);

// w_ik <- w_ik / (sum_j h_kj + w_ik beta_k) * sum_j (v_ij / vhat_ij) h_kj
Matrix update_w(const InteractionMatrix& v, const Factorization& f, const SolverConfig& config);

// beta_k <- (N + a_k - 1) / (1/2 (sum_i w_ik^2 + sum_j h_kj^2) + b_k)
Vector update_beta(const Factorization& f, const SolverConfig& config);

// Cycles H, W, beta updates until the relative energy change drops below
// config.tol or config.max_iters sweeps have run. Throws NumericalError on a
// non-finite energy.
FitResult fit(const InteractionMatrix& v, const SolverConfig& config);
FitResult fit(const InteractionMatrix& v, const SolverConfig& config, Factorization init);

}  // namespace bnmf
