#pragma once

#include <cstddef>
#include <vector>

#include "bnmf/graph.hpp"

namespace bnmf {

// Dense 0-based hard partition where every id in 0..C-1 is used.
class HardPartition {
 public:
  HardPartition() = default;

  // Densifies arbitrary labels in first-appearance order. Entries equal to
  // kUnassigned (see membership.hpp) each become their own singleton
  // community.
  static HardPartition from_labels(const std::vector<std::size_t>& labels);

  const std::vector<std::size_t>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t num_communities() const noexcept { return communities_; }

 private:
  std::vector<std::size_t> labels_;
  std::size_t communities_ = 0;
};

// Weighted Newman-Girvan modularity
//   Q = sum_c [ e_c / m - (d_c / 2m)^2 ]
// with m the total edge weight, e_c the intra-community weight and d_c the
// total strength of community c. Throws MetricError for an edgeless graph.
double modularity(const Graph& g, const HardPartition& p);

// Normalized mutual information in the confusion-matrix form of Danon et al.:
//   -2 sum_ij N_ij log(N_ij N / (N_i N_j))
//   / ( sum_i N_i log(N_i / N) + sum_j N_j log(N_j / N) )
// Returns 1 when both partitions are the single all-in-one community and 0
// when only the denominator vanishes.
double nmi(const HardPartition& a, const HardPartition& b);

}  // namespace bnmf
