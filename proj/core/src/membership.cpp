#include "bnmf/membership.hpp"

#include <algorithm>
#include <cmath>

namespace bnmf {

namespace {

using Index = Eigen::Index;

void assign_labels(Membership& m) {
  const Index n = m.pi.rows();
  const Index k = m.pi.cols();
  m.labels.assign(static_cast<std::size_t>(n), kUnassigned);
  std::vector<bool> used(static_cast<std::size_t>(k), false);
  for (Index i = 0; i < n; ++i) {
    if (m.degenerate[static_cast<std::size_t>(i)]) continue;
    Index best = 0;
    for (Index c = 1; c < k; ++c) {
      if (m.pi(i, c) > m.pi(i, best)) best = c;
    }
    m.labels[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
    used[static_cast<std::size_t>(best)] = true;
  }
  m.remap.assign(static_cast<std::size_t>(k), kUnassigned);
  std::size_t next = 0;
  for (std::size_t c = 0; c < used.size(); ++c) {
    if (used[c]) m.remap[c] = next++;
  }
  m.k_effective = next;
}

}  // namespace

Membership memberships(const Matrix& w, double eps) {
  Membership m;
  const Index n = w.rows();
  const Index k = w.cols();
  const double floor_mass = static_cast<double>(k) * eps * 10.0;
  m.pi.resize(n, k);
  m.degenerate.assign(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    const double total = w.row(i).sum();
    if (total <= floor_mass) m.degenerate[static_cast<std::size_t>(i)] = true;
    if (total > 0.0) {
      m.pi.row(i) = w.row(i) / total;
    } else {
      m.pi.row(i).setConstant(k > 0 ? 1.0 / static_cast<double>(k) : 0.0);
    }
  }
  assign_labels(m);
  return m;
}

EntropyReport entropy_bits(const Membership& m) {
  EntropyReport r;
  const Index n = m.pi.rows();
  r.per_node.assign(static_cast<std::size_t>(n), 0.0);
  double sum = 0.0;
  std::size_t counted = 0;
  for (Index i = 0; i < n; ++i) {
    if (m.degenerate[static_cast<std::size_t>(i)]) continue;
    double h = 0.0;
    for (Index c = 0; c < m.pi.cols(); ++c) {
      const double p = m.pi(i, c);
      if (p > 0.0) h -= p * std::log2(p);
    }
    r.per_node[static_cast<std::size_t>(i)] = h;
    sum += h;
    ++counted;
  }
  r.mean = counted ? sum / static_cast<double>(counted) : 0.0;
  return r;
}

Membership compact(const Membership& m) {
  Membership out;
  const Index n = m.pi.rows();
  const auto kept = static_cast<Index>(m.k_effective);
  out.pi.resize(n, kept);
  for (std::size_t c = 0; c < m.remap.size(); ++c) {
    if (m.remap[c] != kUnassigned) {
      out.pi.col(static_cast<Index>(m.remap[c])) = m.pi.col(static_cast<Index>(c));
    }
  }
  for (Index i = 0; i < n; ++i) {
    const double total = out.pi.row(i).sum();
    if (total > 0.0) out.pi.row(i) /= total;
  }
  out.degenerate = m.degenerate;
  out.labels.resize(m.labels.size());
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    out.labels[i] = m.labels[i] == kUnassigned ? kUnassigned : m.remap[m.labels[i]];
  }
  out.k_effective = m.k_effective;
  out.remap = m.remap;
  return out;
}

std::size_t active_components(const Matrix& w, double rel_threshold) {
  if (w.cols() == 0) return 0;
  const Vector energy = w.colwise().squaredNorm().transpose();
  const double cutoff = rel_threshold * energy.maxCoeff();
  return static_cast<std::size_t>((energy.array() > cutoff).count());
}

}  // namespace bnmf
