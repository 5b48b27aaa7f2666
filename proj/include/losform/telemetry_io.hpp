/**
 * @file telemetry_io.hpp
 * @brief Deterministic telemetry output: the full CSV, the four plot-ready
 *        series files, and the run summary document.
 *
 * Numbers are printed with 17 significant digits so identical runs produce
 * byte-identical files.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "losform/formation.hpp"
#include "losform/simulation.hpp"

namespace losform {

struct TelemetryLabels {
  std::vector<std::string> edge;   // "12", "23", ... in chain order
  std::vector<std::string> craft;  // "1", "2", ... by node id
};

TelemetryLabels make_labels(const FormationSpec& spec);

/// Header then one line per record; columns follow the record layout:
/// t, per edge (Psi, eQ xyz, eNorm), per craft (eW xyz, u xyz), U, V,
/// rot_drift. Throws std::invalid_argument for empty input.
void write_csv(std::ostream& out, const std::vector<TelemetryRecord>& records,
               const TelemetryLabels& labels);

/// Four plot series files written into dir: plot_psi.csv, plot_eq.csv,
/// plot_ew.csv, plot_u.csv. Every decimate-th record is kept, and the first
/// and last records are always present. Throws on empty input or I/O errors.
void write_plot_files(const std::string& dir, const std::vector<TelemetryRecord>& records,
                      const TelemetryLabels& labels, int decimate = 1);

nlohmann::json summary_to_json(const RunSummary& summary);

/// telemetry.csv, the four plot files, and summary.json under dir.
void write_run_outputs(const std::string& dir, const RunResult& result,
                       const TelemetryLabels& labels);

}  // namespace losform
