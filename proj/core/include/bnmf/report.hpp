#pragma once

#include <string>
#include <string_view>

#include "bnmf/bench.hpp"
#include "bnmf/nmf.hpp"

namespace bnmf {

struct ReportMeta {
  std::uint64_t seed = 0;
  SolverConfig config;
  std::string dataset;
};

// JSON document {meta, runs, aggregates}. Wall-clock fields ("wall_ms",
// "wall_ms_total") are written only when include_timing is set; everything
// else is a pure function of the inputs and seed.
std::string restart_report_json(const RestartReport& report, const ReportMeta& meta,
                                bool include_timing = true);
std::string sweep_report_json(const SweepReport& report, const ReportMeta& meta,
                              bool include_timing = true);

// One row per (k_out, realization).
std::string sweep_report_csv(const SweepReport& report, bool include_timing = true);

std::string config_json(const SolverConfig& config);

// Re-serializes a report with every wall-clock field removed.
std::string report_payload(std::string_view json);

}  // namespace bnmf
