#include "bnmf/report.hpp"

#include <sstream>

#include "json.hpp"

namespace bnmf {

namespace {

using nlohmann::json;

json config_object(const SolverConfig& c) {
  json j = {
      {"k_max", c.k_max},
      {"a", c.a},
      {"b", c.b},
      {"max_iters", c.max_iters},
      {"tol", c.tol},
      {"eps", c.eps},
      {"seed", c.seed},
  };
  if (!c.a_k.empty()) j["a_k"] = c.a_k;
  if (!c.b_k.empty()) j["b_k"] = c.b_k;
  return j;
}

json summary_object(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

void strip(json& j) {
  if (j.is_object()) {
    j.erase("wall_ms");
    j.erase("wall_ms_total");
    for (auto& [key, value] : j.items()) strip(value);
  } else if (j.is_array()) {
    for (auto& value : j) strip(value);
  }
}

}  // namespace

std::string config_json(const SolverConfig& config) { return config_object(config).dump(); }

std::string restart_report_json(const RestartReport& report, const ReportMeta& meta,
                                bool include_timing) {
  json runs = json::array();
  for (const RunRecord& r : report.records) {
    json row = {
        {"seed", r.seed},
        {"q", r.q},
        {"k_effective", r.k_effective},
        {"iterations", r.iterations},
        {"converged", r.converged},
        {"final_energy", r.final_energy},
    };
    if (r.nmi) row["nmi"] = *r.nmi;
    if (include_timing) row["wall_ms"] = r.wall_ms;
    runs.push_back(std::move(row));
  }

  const RunRecord& best = report.records.at(report.best_run);
  const RunRecord& map = report.records.at(report.min_energy_run);
  json aggregates = {
      {"runs", report.runs},
      {"q_mean", report.q.mean},
      {"q_std", report.q.std},
      {"k_effective_mean", report.k_effective.mean},
      {"k_effective_std", report.k_effective.std},
      {"best_run",
       {{"index", report.best_run},
        {"seed", best.seed},
        {"q", best.q},
        {"k_effective", best.k_effective}}},
      {"min_energy_run",
       {{"index", report.min_energy_run},
        {"seed", map.seed},
        {"q", map.q},
        {"k_effective", map.k_effective},
        {"final_energy", map.final_energy}}},
  };
  if (report.nmi) {
    aggregates["nmi_mean"] = report.nmi->mean;
    aggregates["nmi_std"] = report.nmi->std;
  }
  if (include_timing) aggregates["wall_ms_total"] = report.wall_ms_total;

  json doc = {
      {"meta",
       {{"seed", meta.seed}, {"config", config_object(meta.config)}, {"dataset", meta.dataset}}},
      {"runs", std::move(runs)},
      {"aggregates", std::move(aggregates)},
  };
  return doc.dump(2) + "\n";
}

std::string sweep_report_json(const SweepReport& report, const ReportMeta& meta,
                              bool include_timing) {
  json runs = json::array();
  json grid = json::array();
  for (const SweepCell& cell : report.cells) {
    for (std::size_t r = 0; r < cell.realizations.size(); ++r) {
      const RealizationRecord& rec = cell.realizations[r];
      json row = {
          {"k_out", cell.k_out},
          {"realization", r},
          {"seed", rec.seed},
          {"nmi", rec.nmi},
          {"q", rec.q},
          {"mean_entropy_bits", rec.mean_entropy_bits},
          {"k_effective", rec.k_effective},
          {"iterations", rec.iterations},
          {"converged", rec.converged},
          {"selected_restart", rec.selected_restart},
      };
      if (include_timing) row["wall_ms"] = rec.wall_ms;
      runs.push_back(std::move(row));
    }
    grid.push_back({
        {"k_out", cell.k_out},
        {"realizations", cell.realizations.size()},
        {"nmi_mean", cell.nmi.mean},
        {"nmi_std", cell.nmi.std},
        {"q_mean", cell.q.mean},
        {"q_std", cell.q.std},
        {"mean_entropy_bits_mean", cell.entropy_bits.mean},
        {"mean_entropy_bits_std", cell.entropy_bits.std},
        {"k_effective", summary_object(cell.k_effective)},
    });
  }
  json aggregates = {{"grid", std::move(grid)}};
  if (include_timing) aggregates["wall_ms_total"] = report.wall_ms_total;

  json doc = {
      {"meta",
       {{"seed", meta.seed},
        {"config", config_object(meta.config)},
        {"dataset", meta.dataset},
        {"ng",
         {{"n", report.base.n},
          {"c", report.base.c},
          {"k_mean", report.base.k_mean},
          {"realizations", report.realizations},
          {"restarts", report.restarts},
          {"selection", "min_energy"},
          {"nmi_variant", "danon"}}}}},
      {"runs", std::move(runs)},
      {"aggregates", std::move(aggregates)},
  };
  return doc.dump(2) + "\n";
}

std::string sweep_report_csv(const SweepReport& report, bool include_timing) {
  std::ostringstream out;
  out.precision(17);
  out << "k_out,realization,seed,nmi,q,mean_entropy_bits,k_effective,iterations,converged,"
         "selected_restart";
  if (include_timing) out << ",wall_ms";
  out << '\n';
  for (const SweepCell& cell : report.cells) {
    for (std::size_t r = 0; r < cell.realizations.size(); ++r) {
      const RealizationRecord& rec = cell.realizations[r];
      out << cell.k_out << ',' << r << ',' << rec.seed << ',' << rec.nmi << ',' << rec.q << ','
          << rec.mean_entropy_bits << ',' << rec.k_effective << ',' << rec.iterations << ','
          << (rec.converged ? 1 : 0) << ',' << rec.selected_restart;
      if (include_timing) out << ',' << rec.wall_ms;
      out << '\n';
    }
  }
  return out.str();
}

std::string report_payload(std::string_view text) {
  json j = json::parse(text);
  strip(j);
  return j.dump();
}

}  // namespace bnmf
