#include "bnmf/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bnmf/error.hpp"

namespace bnmf {

namespace {

using Index = Eigen::Index;

// V / max(Vhat, eps), with zero counts mapped to zero.
Matrix count_ratio(const Matrix& v, const Matrix& v_hat, double eps) {
  Matrix r(v.rows(), v.cols());
  for (Index j = 0; j < v.cols(); ++j) {
    for (Index i = 0; i < v.rows(); ++i) {
      const double x = v(i, j);
      r(i, j) = x == 0.0 ? 0.0 : x / std::max(v_hat(i, j), eps);
    }
  }
  return r;
}

Matrix next_h(const Matrix& v, const Matrix& w, const Matrix& h, const Vector& beta,
              const Matrix& v_hat, double eps) {
  const Matrix numer = w.transpose() * count_ratio(v, v_hat, eps);
  const Vector col_mass = w.colwise().sum().transpose();
  Matrix out(h.rows(), h.cols());
  for (Index j = 0; j < h.cols(); ++j) {
    for (Index k = 0; k < h.rows(); ++k) {
      const double hk = h(k, j);
      const double updated = hk / (col_mass(k) + beta(k) * hk) * numer(k, j);
      out(k, j) = std::max(updated, eps);
    }
  }
  return out;
}

Matrix next_w(const Matrix& v, const Matrix& w, const Matrix& h, const Vector& beta,
              const Matrix& v_hat, double eps) {
  const Matrix numer = count_ratio(v, v_hat, eps) * h.transpose();
  const Vector row_mass = h.rowwise().sum();
  Matrix out(w.rows(), w.cols());
  for (Index k = 0; k < w.cols(); ++k) {
    for (Index i = 0; i < w.rows(); ++i) {
      const double wi = w(i, k);
      const double updated = wi / (row_mass(k) + wi * beta(k)) * numer(i, k);
      out(i, k) = std::max(updated, eps);
    }
  }
  return out;
}

Vector next_beta(const Matrix& w, const Matrix& h, const Vector& a, const Vector& b) {
  const double n = static_cast<double>(w.rows());
  Vector beta(w.cols());
  for (Index k = 0; k < w.cols(); ++k) {
    const double mass = 0.5 * (w.col(k).squaredNorm() + h.row(k).squaredNorm());
    beta(k) = (n + a(k) - 1.0) / (mass + b(k));
  }
  return beta;
}

double prior_energy(const Factorization& f) {
  const double n = static_cast<double>(f.num_nodes());
  double u = 0.0;
  for (Index k = 0; k < f.w.cols(); ++k) {
    const double beta = f.beta(k);
    const double log_beta = std::log(beta);
    const double sq = f.w.col(k).squaredNorm() + f.h.row(k).squaredNorm();
    u += 0.5 * (beta * sq - 2.0 * n * log_beta);
    u += beta * f.b(k) - (f.a(k) - 1.0) * log_beta;
  }
  return u;
}

void check_shapes(const InteractionMatrix& v, const Factorization& f) {
  const auto n = static_cast<Index>(v.size());
  const Index k = f.w.cols();
  if (f.w.rows() != n || f.h.rows() != k || f.h.cols() != n || f.beta.size() != k ||
      f.a.size() != k || f.b.size() != k) {
    throw ValidationError("factorization shape does not match the interaction matrix");
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(a > 0.0)) throw ParameterError("a must be positive");
  if (!(b > 0.0)) throw ParameterError("b must be positive");
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  if (max_iters == 0) throw ParameterError("max_iters must be positive");
  for (double x : a_k)
    if (!(x > 0.0)) throw ParameterError("every a_k must be positive");
  for (double x : b_k)
    if (!(x > 0.0)) throw ParameterError("every b_k must be positive");
}

Vector SolverConfig::shape_per_component(std::size_t k) const {
  if (a_k.empty()) return Vector::Constant(static_cast<Index>(k), a);
  if (a_k.size() != k) throw ParameterError("a_k must have one entry per component");
  return Eigen::Map<const Vector>(a_k.data(), static_cast<Index>(k));
}

Vector SolverConfig::rate_per_component(std::size_t k) const {
  if (b_k.empty()) return Vector::Constant(static_cast<Index>(k), b);
  if (b_k.size() != k) throw ParameterError("b_k must have one entry per component");
  return Eigen::Map<const Vector>(b_k.data(), static_cast<Index>(k));
}

Factorization initialize(const SolverConfig& config, std::size_t n) {
  config.validate();
  if (n == 0) throw ParameterError("cannot factorize an empty matrix");
  const std::size_t k = config.components(n);
  const auto rows = static_cast<Index>(n);
  const auto cols = static_cast<Index>(k);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(config.eps, 1.0);

  Factorization f;
  f.w.resize(rows, cols);
  f.h.resize(cols, rows);
  // Fill order is fixed (w row-major, then h row-major) so a seed pins the state.
  for (Index i = 0; i < rows; ++i)
    for (Index c = 0; c < cols; ++c) f.w(i, c) = unif(rng);
  for (Index c = 0; c < cols; ++c)
    for (Index j = 0; j < rows; ++j) f.h(c, j) = unif(rng);
  f.a = config.shape_per_component(k);
  f.b = config.rate_per_component(k);
  f.beta = next_beta(f.w, f.h, f.a, f.b);
  return f;
}

Matrix reconstruct(const Factorization& f) { return f.w * f.h; }

double data_fit_term(const Matrix& v, const Matrix& v_hat, double eps) {
  if (v.rows() != v_hat.rows() || v.cols() != v_hat.cols()) {
    throw ValidationError("data_fit_term: shape mismatch");
  }
  double total = 0.0;
  for (Index j = 0; j < v.cols(); ++j) {
    for (Index i = 0; i < v.rows(); ++i) {
      const double x = v(i, j);
      const double y = v_hat(i, j);
      if (x != 0.0) total += x * std::log(x / std::max(y, eps));
      total += y;
    }
  }
  return total;
}

double poisson_nll(const Matrix& v, const Matrix& v_hat, double eps) {
  double total = 0.0;
  for (Index j = 0; j < v.cols(); ++j) {
    for (Index i = 0; i < v.rows(); ++i) {
      const double x = v(i, j);
      const double y = std::max(v_hat(i, j), eps);
      total += -x * std::log(y) + y + std::lgamma(x + 1.0);
    }
  }
  return total;
}

double energy(const InteractionMatrix& v, const Factorization& f, const SolverConfig& config) {
  check_shapes(v, f);
  return data_fit_term(v.values(), reconstruct(f), config.eps) + prior_energy(f);
}

Matrix update_h(const InteractionMatrix& v, const Factorization& f, const SolverConfig& config) {
  check_shapes(v, f);
  return next_h(v.values(), f.w, f.h, f.beta, reconstruct(f), config.eps);
}

Matrix update_w(const InteractionMatrix& v, const Factorization& f, const SolverConfig& config) {
  check_shapes(v, f);
  return next_w(v.values(), f.w, f.h, f.beta, reconstruct(f), config.eps);
}

Vector update_beta(const Factorization& f, const SolverConfig& /*config*/) {
  return next_beta(f.w, f.h, f.a, f.b);
}

FitResult fit(const InteractionMatrix& v, const SolverConfig& config) {
  return fit(v, config, initialize(config, v.size()));
}

FitResult fit(const InteractionMatrix& v, const SolverConfig& config, Factorization init) {
  config.validate();
  check_shapes(v, init);
  const Matrix& counts = v.values();
  const double eps = config.eps;

  FitResult result;
  Factorization& f = result.factorization;
  f = std::move(init);

  Matrix v_hat = f.w * f.h;
  double previous = data_fit_term(counts, v_hat, eps) + prior_energy(f);
  if (!std::isfinite(previous)) {
    throw NumericalError(0, "non-finite energy at initialization");
  }
  result.energy_trace.reserve(config.max_iters + 1);
  result.energy_trace.push_back(previous);

  for (std::size_t t = 1; t <= config.max_iters; ++t) {
    f.h = next_h(counts, f.w, f.h, f.beta, v_hat, eps);
    v_hat.noalias() = f.w * f.h;
    f.w = next_w(counts, f.w, f.h, f.beta, v_hat, eps);
    f.beta = next_beta(f.w, f.h, f.a, f.b);
    v_hat.noalias() = f.w * f.h;

    const double current = data_fit_term(counts, v_hat, eps) + prior_energy(f);
    if (!std::isfinite(current)) {
      throw NumericalError(t, "non-finite energy at iteration " + std::to_string(t));
    }
    result.energy_trace.push_back(current);
    result.iterations_run = t;
    if (std::abs(current - previous) / std::max(std::abs(previous), 1.0) < config.tol) {
      result.converged = true;
      break;
    }
    previous = current;
  }
  return result;
}

}  // namespace bnmf
