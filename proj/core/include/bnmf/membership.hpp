#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "bnmf/graph.hpp"

namespace bnmf {

inline constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

// Soft memberships derived from the mixing matrix W.
struct Membership {
  Matrix pi;                         // N x K, rows sum to 1
  std::vector<std::size_t> labels;   // greedy argmax, kUnassigned for degenerate rows
  std::vector<bool> degenerate;      // row mass at the numerical floor
  std::size_t k_effective = 0;       // communities holding >= 1 greedy node
  // remap[k] is the dense output index of column k, or kUnassigned when no
  // node is greedily allocated to it.
  std::vector<std::size_t> remap;

  std::size_t num_nodes() const noexcept { return labels.size(); }
  std::size_t num_communities() const noexcept { return static_cast<std::size_t>(pi.cols()); }
};

// pi_ik = w_ik / sum_k' w_ik'. A row whose total is <= K * eps * 10 is
// flagged degenerate and left unassigned. Argmax ties go to the lowest k.
Membership memberships(const Matrix& w, double eps);

struct EntropyReport {
  std::vector<double> per_node;  // bits; 0 for degenerate rows
  double mean = 0.0;             // over non-degenerate rows
};

EntropyReport entropy_bits(const Membership& m);

// Keeps only columns that received a greedy node, renormalizes rows and
// renumbers labels densely (ascending original column order).
Membership compact(const Membership& m);

// Diagnostic: number of columns whose energy sum_i w_ik^2 exceeds
// rel_threshold * max_k sum_i w_ik^2.
std::size_t active_components(const Matrix& w, double rel_threshold = 1e-4);

}  // namespace bnmf
