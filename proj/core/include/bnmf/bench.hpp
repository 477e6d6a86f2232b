#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bnmf/graph.hpp"
#include "bnmf/membership.hpp"
#include "bnmf/nmf.hpp"

namespace bnmf {

// Mean and sample (n-1) standard deviation; std is 0 for a single sample.
struct Summary {
  double mean = 0.0;
  double std = 0.0;
};
Summary summarize(const std::vector<double>& xs);

struct RunRecord {
  std::uint64_t seed = 0;
  double q = 0.0;
  std::size_t k_effective = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double final_energy = 0.0;
  std::optional<double> nmi;  // against a reference partition, when supplied
  double wall_ms = 0.0;
};

struct RestartReport {
  std::uint64_t base_seed = 0;
  std::size_t runs = 0;
  std::vector<RunRecord> records;  // in seed order

  Summary q;
  Summary k_effective;
  std::optional<Summary> nmi;

  // Highest-modularity run (lowest index on ties) and its fitted state.
  std::size_t best_run = 0;
  double best_q = 0.0;
  FitResult best_fit;
  Membership best_membership;

  // Lowest-energy run, i.e. the MAP choice among restarts.
  std::size_t min_energy_run = 0;

  double wall_ms_total = 0.0;
};

// `runs` independent fits seeded base_seed, base_seed + 1, ... The fits run
// on `threads` workers (0 = hardware concurrency); aggregation is a fold in
// seed order, so the report does not depend on scheduling.
RestartReport restart_experiment(const InteractionMatrix& v, const Graph& g,
                                 const SolverConfig& config, std::size_t runs,
                                 std::uint64_t base_seed, std::size_t threads = 0,
                                 const std::vector<std::size_t>* reference = nullptr);

struct RealizationRecord {
  std::uint64_t seed = 0;
  double nmi = 0.0;
  double q = 0.0;
  double mean_entropy_bits = 0.0;
  std::size_t k_effective = 0;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t selected_restart = 0;  // index of the lowest-energy restart
  double wall_ms = 0.0;
};

struct SweepCell {
  double k_out = 0.0;
  std::vector<RealizationRecord> realizations;
  Summary nmi;
  Summary q;
  Summary entropy_bits;
  Summary k_effective;
};

struct SweepReport {
  NgParams base;
  std::uint64_t base_seed = 0;
  std::size_t realizations = 0;
  std::size_t restarts = 1;
  std::vector<SweepCell> cells;
  double wall_ms_total = 0.0;
};

// Seed used for realization r of grid point g, for both the generated graph
// and its first fit.
std::uint64_t sweep_seed(std::uint64_t base_seed, std::size_t grid_index, std::size_t realizations,
                         std::size_t r);

// Fit seed of restart j on a realization; restart 0 reuses the realization seed.
std::uint64_t restart_seed(std::uint64_t realization_seed, std::size_t restart);

// Each realization is fitted `restarts` times and the lowest-energy fit is
// scored; the planted partition never influences the choice.
SweepReport ng_sweep(const NgParams& base, const std::vector<double>& kout_values,
                     std::size_t realizations, const SolverConfig& config,
                     std::uint64_t base_seed, std::size_t threads = 0, std::size_t restarts = 1);

struct IngestReport {
  std::string dataset;
  LoadReport load;
  Graph graph;
  RestartReport restarts;
  bool has_reference = false;
};

// Loads an edge list (and optionally a reference partition keyed by the
// same node ids), then runs restart_experiment. NMI per run is filled in
// when a reference is given.
IngestReport ingest_and_score(const std::string& graph_path,
                              const std::optional<std::string>& partition_path,
                              const SolverConfig& config, std::size_t runs,
                              std::uint64_t base_seed, std::size_t threads = 0);

}  // namespace bnmf
