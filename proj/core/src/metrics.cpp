#include "bnmf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "bnmf/error.hpp"
#include "bnmf/membership.hpp"

namespace bnmf {

HardPartition HardPartition::from_labels(const std::vector<std::size_t>& labels) {
  HardPartition p;
  p.labels_.reserve(labels.size());
  std::unordered_map<std::size_t, std::size_t> dense;
  std::size_t next = 0;
  for (std::size_t label : labels) {
    if (label == kUnassigned) {
      p.labels_.push_back(next++);
      continue;
    }
    auto [it, inserted] = dense.try_emplace(label, next);
    if (inserted) ++next;
    p.labels_.push_back(it->second);
  }
  p.communities_ = next;
  return p;
}

double modularity(const Graph& g, const HardPartition& p) {
  if (p.size() != g.num_nodes()) {
    throw ValidationError("partition covers " + std::to_string(p.size()) + " nodes, graph has " +
                          std::to_string(g.num_nodes()));
  }
  const double m = g.total_weight();
  if (g.num_edges() == 0 || !(m > 0.0)) {
    throw MetricError("modularity is undefined on a graph without edges");
  }
  const auto& label = p.labels();
  std::vector<double> inside(p.num_communities(), 0.0);
  std::vector<double> degree(p.num_communities(), 0.0);
  for (const Edge& e : g.edges()) {
    degree[label[e.i]] += e.w;
    degree[label[e.j]] += e.w;
    if (label[e.i] == label[e.j]) inside[label[e.i]] += e.w;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < inside.size(); ++c) {
    const double frac = degree[c] / (2.0 * m);
    q += inside[c] / m - frac * frac;
  }
  return q;
}

double nmi(const HardPartition& a, const HardPartition& b) {
  if (a.size() != b.size()) {
    throw ValidationError("nmi: partitions have different lengths (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
  const std::size_t n = a.size();
  if (n == 0) throw ValidationError("nmi: empty partitions");
  const std::size_t ca = a.num_communities();
  const std::size_t cb = b.num_communities();
  if (ca == 1 && cb == 1) return 1.0;

  std::vector<double> joint(ca * cb, 0.0);
  std::vector<double> row(ca, 0.0);
  std::vector<double> col(cb, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    joint[a.labels()[i] * cb + b.labels()[i]] += 1.0;
    row[a.labels()[i]] += 1.0;
    col[b.labels()[i]] += 1.0;
  }
  const double total = static_cast<double>(n);

  double numer = 0.0;
  for (std::size_t i = 0; i < ca; ++i) {
    for (std::size_t j = 0; j < cb; ++j) {
      const double nij = joint[i * cb + j];
      if (nij > 0.0) numer += nij * std::log(nij * total / (row[i] * col[j]));
    }
  }
  double denom = 0.0;
  for (double ni : row) denom += ni * std::log(ni / total);
  for (double nj : col) denom += nj * std::log(nj / total);
  if (denom == 0.0) return 0.0;
  // Rounding can push identical partitions a few ulps past 1.
  return std::clamp(-2.0 * numer / denom, 0.0, 1.0);
}

}  // namespace bnmf
