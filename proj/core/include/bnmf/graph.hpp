#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace bnmf {

using NodeId = std::uint64_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Edge {
  std::size_t i;
  std::size_t j;
  double w;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected weighted graph on dense 0-based node indices. Edges are stored
// once per unordered pair with i < j, strictly positive weight and no
// self-loops.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : n_(n) {}

  // Validates the invariants and merges duplicate pairs by summing weights.
  // Returns the number of merged duplicates through `merged` when non-null.
  static Graph from_edges(std::size_t n, const std::vector<Edge>& edges,
                          std::size_t* merged = nullptr);

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  double total_weight() const noexcept;
  std::vector<double> strengths() const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

// Maps the arbitrary ids found in an input file onto dense indices, in
// first-appearance order.
class IdRemap {
 public:
  std::size_t intern(NodeId id);
  // Returns the dense index of `id`, or npos if unknown.
  std::size_t find(NodeId id) const;
  NodeId original(std::size_t index) const { return originals_.at(index); }
  const std::vector<NodeId>& originals() const noexcept { return originals_; }
  std::size_t size() const noexcept { return originals_.size(); }

  static IdRemap identity(std::size_t n);
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<NodeId> originals_;
  std::unordered_map<NodeId, std::size_t> index_;
};

struct LoadReport {
  IdRemap remap;
  std::size_t merged_duplicates = 0;
};

struct LoadedGraph {
  Graph graph;
  LoadReport report;
};

// Parses the line-oriented edge-list format: `i j` or `i j w` per line,
// `#` comments, blank lines ignored, `\n` or `\r\n` endings.
LoadedGraph load_edge_list(std::string_view text);
LoadedGraph load_edge_list_file(const std::string& path);

// Writes `i j w` lines using the remap's original ids (dense indices when
// `remap` is null). load_edge_list() reads the output back unchanged.
std::string serialize_edge_list(const Graph& g, const IdRemap* remap = nullptr);

// Dense symmetric N x N interaction matrix: edge weights off the diagonal
// and each node's strength on the diagonal.
class InteractionMatrix {
 public:
  explicit InteractionMatrix(Matrix v) : v_(std::move(v)) {}
  std::size_t size() const noexcept { return static_cast<std::size_t>(v_.rows()); }
  const Matrix& values() const noexcept { return v_; }
  double operator()(std::size_t i, std::size_t j) const {
    return v_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  Matrix v_;
};

InteractionMatrix build_interaction_matrix(const Graph& g);

// Ground-truth or externally computed hard partition; labels in 0..C-1.
struct PlantedPartition {
  std::vector<std::size_t> labels;
  std::size_t num_communities() const;
};

// Reads `node_id community_id` lines. With a remap, node ids are translated
// through it; otherwise they must already be dense 0-based indices below
// `n`. Community ids are renumbered densely in ascending order.
PlantedPartition load_partition(std::string_view text, std::size_t n,
                                const IdRemap* remap = nullptr);
PlantedPartition load_partition_file(const std::string& path, std::size_t n,
                                     const IdRemap* remap = nullptr);

// Newman-Girvan planted partition benchmark parameters.
struct NgParams {
  std::size_t n = 128;
  std::size_t c = 4;
  double k_mean = 16.0;
  double k_out = 0.0;

  double p_in() const;
  double p_out() const;
  void validate() const;
};

struct GeneratedGraph {
  Graph graph;
  PlantedPartition planted;
};

// Independent Bernoulli draws per pair (i < j in lexicographic order), unit
// weights. Community c holds nodes [c*n/C, (c+1)*n/C).
GeneratedGraph generate_ng_graph(const NgParams& params, std::uint64_t seed);

std::string read_text_file(const std::string& path);

}  // namespace bnmf
