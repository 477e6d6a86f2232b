#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bnmf/bnmf.hpp"

namespace bnmf::cli {

namespace {

using nlohmann::json;

struct SolverFlags {
  std::optional<std::size_t> k_max;
  double a = SolverConfig{}.a;
  double b = SolverConfig{}.b;
  double tol = SolverConfig{}.tol;
  double eps = SolverConfig{}.eps;
  std::size_t max_iters = SolverConfig{}.max_iters;
  std::size_t threads = 0;

  void attach(CLI::App& app) {
    app.add_option("--k-max", k_max, "Maximum number of communities K (default depends on command)");
    app.add_option("--a", a, "Gamma shape for the relevance weights")->capture_default_str();
    app.add_option("--b", b, "Gamma rate for the relevance weights")->capture_default_str();
    app.add_option("--tol", tol, "Relative energy change that stops a fit")->capture_default_str();
    app.add_option("--eps", eps, "Numerical floor for W, H and reconstructions")
        ->capture_default_str();
    app.add_option("--max-iters", max_iters, "Iteration cap per fit")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads for restarts (0 = all cores)")
        ->capture_default_str();
  }

  SolverConfig config(std::size_t default_k_max, std::uint64_t seed) const {
    SolverConfig c;
    c.k_max = k_max.value_or(default_k_max);
    c.a = a;
    c.b = b;
    c.tol = tol;
    c.eps = eps;
    c.max_iters = max_iters;
    c.seed = seed;
    c.validate();
    return c;
  }
};

std::string format_metric(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string default_output(const std::string& input, const std::string& suffix) {
  const char* dir = std::getenv(kOutputDirEnv);
  const std::filesystem::path base = dir && *dir ? std::filesystem::path(dir) : ".";
  return (base / (std::filesystem::path(input).stem().string() + suffix)).string();
}

// "-" writes to `out`, anything else to a file.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::string detect_json(const IngestReport& ingest, const SolverConfig& config,
                        std::uint64_t seed) {
  const RestartReport& rr = ingest.restarts;
  const Membership compacted = compact(rr.best_membership);
  const EntropyReport entropy = entropy_bits(rr.best_membership);
  const FitResult& best = rr.best_fit;
  const IdRemap& remap = ingest.load.remap;

  json nodes = json::array();
  for (std::size_t i = 0; i < compacted.num_nodes(); ++i) {
    json pi = json::array();
    for (Eigen::Index c = 0; c < compacted.pi.cols(); ++c) {
      pi.push_back(compacted.pi(static_cast<Eigen::Index>(i), c));
    }
    json row = {
        {"id", remap.original(i)},
        {"community", compacted.labels[i] == kUnassigned ? json(nullptr) : json(compacted.labels[i])},
        {"entropy_bits", entropy.per_node[i]},
        {"pi", std::move(pi)},
    };
    nodes.push_back(std::move(row));
  }

  json doc = {
      {"meta",
       {{"seed", seed},
        {"config", json::parse(config_json(config))},
        {"dataset", ingest.dataset},
        {"nodes", ingest.graph.num_nodes()},
        {"edges", ingest.graph.num_edges()},
        {"merged_duplicates", ingest.load.merged_duplicates},
        {"unassigned_policy", "singleton"}}},
      {"k_effective", compacted.k_effective},
      {"modularity", rr.best_q},
      {"mean_entropy_bits", entropy.mean},
      {"energy",
       {{"initial", best.energy_trace.front()},
        {"final", best.energy_trace.back()},
        {"iterations", best.iterations_run},
        {"converged", best.converged}}},
      {"restarts",
       {{"runs", rr.runs},
        {"best_seed", rr.records[rr.best_run].seed},
        {"q_mean", rr.q.mean},
        {"q_std", rr.q.std},
        {"k_effective_mean", rr.k_effective.mean},
        {"k_effective_std", rr.k_effective.std}}},
      {"nodes", std::move(nodes)},
  };
  return doc.dump(2) + "\n";
}

// Reads a partition keyed by arbitrary node ids, interning ids in file order.
PlantedPartition load_keyed_partition(const std::string& path, IdRemap& remap) {
  const std::string text = read_text_file(path);
  if (remap.size() == 0) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream fields(line);
      std::string first;
      if (!(fields >> first) || first.front() == '#') continue;
      NodeId id = 0;
      try {
        std::size_t used = 0;
        id = std::stoull(first, &used);
        if (used != first.size()) throw std::invalid_argument(first);
      } catch (const std::exception&) {
        throw ValidationError(path + ": non-integer node id '" + first + "'");
      }
      remap.intern(id);
    }
  }
  try {
    return load_partition(text, remap.size(), &remap);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian NMF community detection"};
  app.name("bnmf");
  app.require_subcommand(1);

  // detect
  std::string detect_graph;
  std::string detect_out;
  std::uint64_t detect_seed = kDefaultSeed;
  std::size_t detect_restarts = 1;
  SolverFlags detect_flags;
  CLI::App* detect = app.add_subcommand("detect", "Fit the model to an edge list and report memberships");
  detect->add_option("graph", detect_graph, "Edge-list file")->required();
  detect->add_option("-o,--output", detect_out, "Report path ('-' for standard output)");
  detect->add_option("--seed", detect_seed, "Base seed")->capture_default_str();
  detect->add_option("--restarts", detect_restarts, "Independent fits; the best modularity wins")
      ->capture_default_str();
  detect_flags.attach(*detect);

  // bench
  CLI::App* bench = app.add_subcommand("bench", "Benchmark experiments");
  bench->require_subcommand(1);

  std::vector<double> kouts{0, 2, 4, 6, 8};
  std::size_t realizations = 20;
  std::size_t ng_restarts = 5;
  NgParams ng_base;
  std::uint64_t ng_seed = kDefaultSeed;
  std::string ng_format = "json";
  std::string ng_out = "-";
  bool ng_full_k = false;
  bool ng_no_timing = false;
  SolverFlags ng_flags;
  CLI::App* ng = bench->add_subcommand("ng", "Newman-Girvan planted partition sweep");
  ng->add_option("--kout", kouts, "Comma-separated inter-community degrees")
      ->delimiter(',')
      ->capture_default_str();
  ng->add_option("--realizations", realizations, "Graphs per grid point")->capture_default_str();
  ng->add_option("--restarts", ng_restarts, "Fits per graph; the lowest-energy one is scored")
      ->capture_default_str();
  ng->add_option("--n", ng_base.n, "Nodes")->capture_default_str();
  ng->add_option("--c", ng_base.c, "Communities")->capture_default_str();
  ng->add_option("--k-mean", ng_base.k_mean, "Expected total degree")->capture_default_str();
  ng->add_option("--seed", ng_seed, "Base seed")->capture_default_str();
  ng->add_option("--format", ng_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  ng->add_option("-o,--output", ng_out, "Report path ('-' for standard output)")
      ->capture_default_str();
  ng->add_flag("--full-k", ng_full_k, "Use K = N instead of min(N, 64)");
  ng->add_flag("--no-timing", ng_no_timing, "Omit wall-clock fields");
  ng_flags.attach(*ng);

  std::string rs_graph;
  std::string rs_partition;
  std::size_t rs_runs = 20;
  std::uint64_t rs_seed = kDefaultSeed;
  std::string rs_out = "-";
  bool rs_full_k = false;
  bool rs_no_timing = false;
  SolverFlags rs_flags;
  CLI::App* restarts = bench->add_subcommand("restarts", "Multi-restart modularity / K* statistics");
  restarts->add_option("graph", rs_graph, "Edge-list file")->required();
  restarts->add_option("--partition", rs_partition, "Reference partition for NMI");
  restarts->add_option("--runs", rs_runs, "Number of restarts")->capture_default_str();
  restarts->add_option("--seed", rs_seed, "Base seed")->capture_default_str();
  restarts->add_option("-o,--output", rs_out, "Report path ('-' for standard output)")
      ->capture_default_str();
  restarts->add_flag("--full-k", rs_full_k, "Use K = N instead of min(N, 64)");
  restarts->add_flag("--no-timing", rs_no_timing, "Omit wall-clock fields");
  rs_flags.attach(*restarts);

  // metrics
  CLI::App* metrics = app.add_subcommand("metrics", "Partition quality metrics");
  metrics->require_subcommand(1);
  std::uint64_t metrics_seed = kDefaultSeed;
  std::string nmi_a, nmi_b;
  CLI::App* nmi_cmd = metrics->add_subcommand("nmi", "NMI between two partition files");
  nmi_cmd->add_option("a", nmi_a, "Partition file")->required();
  nmi_cmd->add_option("b", nmi_b, "Partition file")->required();
  nmi_cmd->add_option("--seed", metrics_seed, "Accepted for uniformity; unused");
  std::string mod_graph, mod_part;
  CLI::App* mod_cmd = metrics->add_subcommand("modularity", "Modularity of a partition");
  mod_cmd->add_option("graph", mod_graph, "Edge-list file")->required();
  mod_cmd->add_option("partition", mod_part, "Partition file")->required();
  mod_cmd->add_option("--seed", metrics_seed, "Accepted for uniformity; unused");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*detect) {
      const std::string path = detect_out.empty() ? default_output(detect_graph, ".detect.json")
                                                  : detect_out;
      const SolverConfig config = detect_flags.config(0, detect_seed);
      const IngestReport ingest = ingest_and_score(detect_graph, std::nullopt, config,
                                                   detect_restarts, detect_seed,
                                                   detect_flags.threads);
      emit(path, detect_json(ingest, config, detect_seed), out);
      if (path != "-") err << "wrote " << path << "\n";
    } else if (*ng) {
      const std::size_t k_default = ng_full_k ? 0 : std::min<std::size_t>(ng_base.n, 64);
      const SolverConfig config = ng_flags.config(k_default, ng_seed);
      const SweepReport report =
          ng_sweep(ng_base, kouts, realizations, config, ng_seed, ng_flags.threads, ng_restarts);
      const ReportMeta meta{ng_seed, config, "ng"};
      const std::string text = ng_format == "csv"
                                   ? sweep_report_csv(report, !ng_no_timing)
                                   : sweep_report_json(report, meta, !ng_no_timing);
      emit(ng_out, text, out);
    } else if (*restarts) {
      LoadedGraph probe = load_edge_list_file(rs_graph);
      const std::size_t n = probe.graph.num_nodes();
      const std::size_t k_default = rs_full_k ? 0 : std::min<std::size_t>(n, 64);
      const SolverConfig config = rs_flags.config(k_default, rs_seed);
      std::optional<std::string> reference;
      if (!rs_partition.empty()) reference = rs_partition;
      const IngestReport ingest =
          ingest_and_score(rs_graph, reference, config, rs_runs, rs_seed, rs_flags.threads);
      const ReportMeta meta{rs_seed, config, ingest.dataset};
      emit(rs_out, restart_report_json(ingest.restarts, meta, !rs_no_timing), out);
    } else if (*nmi_cmd) {
      IdRemap ids;
      const PlantedPartition a = load_keyed_partition(nmi_a, ids);
      const PlantedPartition b = load_keyed_partition(nmi_b, ids);
      out << format_metric(nmi(HardPartition::from_labels(a.labels),
                               HardPartition::from_labels(b.labels)))
          << "\n";
    } else if (*mod_cmd) {
      LoadedGraph g = load_edge_list_file(mod_graph);
      const PlantedPartition p = [&] {
        try {
          return load_partition_file(mod_part, g.graph.num_nodes(), &g.report.remap);
        } catch (const ValidationError& e) {
          throw ValidationError(mod_part + ": " + e.what());
        }
      }();
      out << format_metric(modularity(g.graph, HardPartition::from_labels(p.labels))) << "\n";
    }
  } catch (const NumericalError& e) {
    err << "error kind=" << e.kind() << " iteration=" << e.iteration();
    if (e.has_seed()) err << " seed=" << e.seed();
    err << " message=" << json(e.what()).dump() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error kind=" << e.kind() << " message=" << json(e.what()).dump() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error kind=internal message=" << json(e.what()).dump() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace bnmf::cli
