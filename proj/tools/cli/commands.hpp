#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "run_config.hpp"

namespace sgpvsel::cli {

/// Selection report for every requested method on `loaded`; with
/// config.splits > 0 also the repeated-split summary. Per-method failures
/// are recorded in the report instead of thrown. Writes per-split rows to
/// `splits_csv` when it is non-null.
nlohmann::ordered_json fit_report(const LoadedData& loaded, const RunConfig& config,
                                  std::ostream* splits_csv = nullptr);

/// Reads the CSV, writes <out>/report.json (and <out>/splits.csv in split
/// mode), prints a summary. Returns the process exit code.
int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Runs every scenario cell, writes <out>/results.csv, <out>/summary.csv and
/// <out>/summary.json. Cell failures are logged and counted; the exit code is
/// nonzero only when every cell failed.
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Metadata object for JSON outputs; the only place a timestamp appears.
nlohmann::ordered_json run_metadata(const RunConfig& config);

} // namespace sgpvsel::cli
