// CSV and manifest emission for completed experiment runs.
#pragma once

#include "genrisk/experiment.hpp"

#include <string>

namespace genrisk {

// Writes scores/ranking/subscore tables, per-model KPI and backtest CSVs,
// plot-data CSVs and manifest.json under the output directory.
void emit_reports(const ExperimentResult& result, const std::string& out_dir);

// Rebuilds the configuration recorded in a manifest.json.
RunConfig config_from_manifest(const std::string& manifest_path);

// RFC-4180 field quoting.
std::string csv_quote(const std::string& field);

}  // namespace genrisk
