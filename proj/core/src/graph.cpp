#include "bnmf/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "bnmf/error.hpp"

namespace bnmf {

namespace {

std::uint64_t pair_key(std::size_t i, std::size_t j) {
  return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
}

// Splits `text` into logical lines, strips `\r`, and skips blanks and
// `#` comments. The callback receives (1-based line number, tokens).
template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<std::string_view> tokens;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;

    tokens.clear();
    std::size_t k = 0;
    while (k < line.size()) {
      while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '\r')) ++k;
      std::size_t start = k;
      while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r') ++k;
      if (k > start) tokens.push_back(line.substr(start, k - start));
    }
    if (tokens.empty() || tokens.front().front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    fn(line_no, tokens);
    if (end == text.size()) break;
  }
}

NodeId parse_id(std::string_view tok, std::size_t line) {
  NodeId v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected a non-negative integer id, got '" + std::string(tok) + "'");
  }
  return v;
}

double parse_weight(std::string_view tok, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected a numeric weight, got '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

Graph Graph::from_edges(std::size_t n, const std::vector<Edge>& edges, std::size_t* merged) {
  Graph g(n);
  std::unordered_map<std::uint64_t, std::size_t> slot;
  std::size_t dup = 0;
  for (const Edge& e : edges) {
    if (e.i >= n || e.j >= n) {
      throw ValidationError("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                            ") references a node outside 0.." + std::to_string(n));
    }
    if (e.i == e.j) {
      throw ValidationError("self-loop on node " + std::to_string(e.i));
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw ValidationError("edge weight must be positive and finite");
    }
    const std::size_t lo = std::min(e.i, e.j);
    const std::size_t hi = std::max(e.i, e.j);
    auto [it, inserted] = slot.try_emplace(pair_key(lo, hi), g.edges_.size());
    if (inserted) {
      g.edges_.push_back({lo, hi, e.w});
    } else {
      g.edges_[it->second].w += e.w;
      ++dup;
    }
  }
  if (merged) *merged = dup;
  return g;
}

double Graph::total_weight() const noexcept {
  double m = 0.0;
  for (const Edge& e : edges_) m += e.w;
  return m;
}

std::vector<double> Graph::strengths() const {
  std::vector<double> s(n_, 0.0);
  for (const Edge& e : edges_) {
    s[e.i] += e.w;
    s[e.j] += e.w;
  }
  return s;
}

std::size_t IdRemap::intern(NodeId id) {
  auto [it, inserted] = index_.try_emplace(id, originals_.size());
  if (inserted) originals_.push_back(id);
  return it->second;
}

std::size_t IdRemap::find(NodeId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? npos : it->second;
}

IdRemap IdRemap::identity(std::size_t n) {
  IdRemap r;
  for (std::size_t i = 0; i < n; ++i) r.intern(i);
  return r;
}

LoadedGraph load_edge_list(std::string_view text) {
  LoadReport report;
  std::vector<Edge> raw;
  std::vector<std::size_t> raw_lines;

  for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() != 2 && tok.size() != 3) {
      throw ParseError(line, "expected 2 or 3 fields, got " + std::to_string(tok.size()));
    }
    const NodeId a = parse_id(tok[0], line);
    const NodeId b = parse_id(tok[1], line);
    const double w = tok.size() == 3 ? parse_weight(tok[2], line) : 1.0;
    if (a == b) {
      throw ValidationError("line " + std::to_string(line) + ": self-loop on node " +
                            std::to_string(a));
    }
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ValidationError("line " + std::to_string(line) +
                            ": edge weight must be positive and finite");
    }
    const std::size_t i = report.remap.intern(a);
    const std::size_t j = report.remap.intern(b);
    raw.push_back({i, j, w});
  });

  Graph g = Graph::from_edges(report.remap.size(), raw, &report.merged_duplicates);
  return {std::move(g), std::move(report)};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

LoadedGraph load_edge_list_file(const std::string& path) {
  return load_edge_list(read_text_file(path));
}

std::string serialize_edge_list(const Graph& g, const IdRemap* remap) {
  std::ostringstream out;
  out.precision(17);
  for (const Edge& e : g.edges()) {
    const NodeId a = remap ? remap->original(e.i) : e.i;
    const NodeId b = remap ? remap->original(e.j) : e.j;
    out << a << ' ' << b << ' ' << e.w << '\n';
  }
  return out.str();
}

InteractionMatrix build_interaction_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Matrix v = Matrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    v(i, j) += e.w;
    v(j, i) += e.w;
  }
  // Strength on the diagonal, summed in column order so it matches the row sum exactly.
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) s += v(i, j);
    v(i, i) = s;
  }
  return InteractionMatrix(std::move(v));
}

std::size_t PlantedPartition::num_communities() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

PlantedPartition load_partition(std::string_view text, std::size_t n, const IdRemap* remap) {
  const std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<NodeId> raw(n, 0);
  std::vector<std::size_t> seen_line(n, unset);

  for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() != 2) {
      throw ValidationError("line " + std::to_string(line) + ": expected `node_id community_id`");
    }
    NodeId node = 0;
    NodeId comm = 0;
    try {
      node = parse_id(tok[0], line);
      comm = parse_id(tok[1], line);
    } catch (const ParseError& e) {
      throw ValidationError(e.what());
    }
    std::size_t idx = 0;
    if (remap) {
      idx = remap->find(node);
      if (idx == IdRemap::npos) {
        throw ValidationError("line " + std::to_string(line) + ": unknown node id " +
                              std::to_string(node));
      }
    } else {
      if (node >= n) {
        throw ValidationError("line " + std::to_string(line) + ": node id " +
                              std::to_string(node) + " outside 0.." + std::to_string(n));
      }
      idx = static_cast<std::size_t>(node);
    }
    if (seen_line[idx] != unset) {
      throw ValidationError("line " + std::to_string(line) + ": duplicate node " +
                            std::to_string(node) + " (first seen on line " +
                            std::to_string(seen_line[idx]) + ")");
    }
    seen_line[idx] = line;
    raw[idx] = comm;
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (seen_line[i] == unset) {
      const NodeId id = remap ? remap->original(i) : i;
      throw ValidationError("missing node " + std::to_string(id) + " in partition");
    }
  }

  std::map<NodeId, std::size_t> dense;
  for (NodeId c : raw) dense.emplace(c, 0);
  std::size_t next = 0;
  for (auto& [id, slot] : dense) slot = next++;

  PlantedPartition p;
  p.labels.reserve(n);
  for (NodeId c : raw) p.labels.push_back(dense.at(c));
  return p;
}

PlantedPartition load_partition_file(const std::string& path, std::size_t n,
                                     const IdRemap* remap) {
  return load_partition(read_text_file(path), n, remap);
}

double NgParams::p_in() const {
  const double block = static_cast<double>(n / c);
  return (k_mean - k_out) / (block - 1.0);
}

double NgParams::p_out() const {
  const double outside = static_cast<double>(n - n / c);
  if (outside == 0.0) return 0.0;
  return k_out / outside;
}

void NgParams::validate() const {
  if (n == 0 || c == 0) throw ParameterError("n and c must be positive");
  if (n % c != 0) throw ParameterError("n must be divisible by c");
  if (n / c < 2) throw ParameterError("communities need at least two nodes");
  if (!(k_out >= 0.0) || !(k_mean >= 0.0)) throw ParameterError("degrees must be non-negative");
  if (k_out > k_mean) throw ParameterError("k_out must not exceed k_mean");
  if (c == 1 && k_out > 0.0) throw ParameterError("k_out must be 0 with a single community");
  const double pi = p_in();
  const double po = p_out();
  if (!(pi >= 0.0 && pi <= 1.0)) throw ParameterError("derived p_in outside [0, 1]");
  if (!(po >= 0.0 && po <= 1.0)) throw ParameterError("derived p_out outside [0, 1]");
}

GeneratedGraph generate_ng_graph(const NgParams& params, std::uint64_t seed) {
  params.validate();
  const std::size_t n = params.n;
  const std::size_t block = n / params.c;
  const double pi = params.p_in();
  const double po = params.p_out();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  PlantedPartition planted;
  planted.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) planted.labels[i] = i / block;

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = planted.labels[i] == planted.labels[j] ? pi : po;
      if (unif(rng) < p) edges.push_back({i, j, 1.0});
    }
  }
  return {Graph::from_edges(n, edges), std::move(planted)};
}

}  // namespace bnmf
