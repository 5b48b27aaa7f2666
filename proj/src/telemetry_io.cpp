#include "losform/telemetry_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace losform {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_vec_columns(std::vector<std::string>& cols, const std::string& base) {
  cols.push_back(base + "_x");
  cols.push_back(base + "_y");
  cols.push_back(base + "_z");
}

void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
  for (size_t c = 0; c < header.size(); ++c) {
    out << (c ? "," : "") << header[c];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << fmt(row[c]);
    }
    out << "\n";
  }
}

std::vector<size_t> plot_indices(size_t count, int decimate) {
  std::vector<size_t> idx;
  for (size_t r = 0; r < count; r += static_cast<size_t>(decimate)) idx.push_back(r);
  if (idx.back() != count - 1) idx.push_back(count - 1);
  return idx;
}

std::ofstream open_file(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

TelemetryLabels make_labels(const FormationSpec& spec) {
  TelemetryLabels labels;
  const auto& chain = spec.chain();
  for (size_t m = 0; m + 1 < chain.size(); ++m) {
    labels.edge.push_back(std::to_string(chain[m] + 1) + std::to_string(chain[m + 1] + 1));
  }
  for (int i = 0; i < spec.node_count(); ++i) {
    labels.craft.push_back(std::to_string(i + 1));
  }
  return labels;
}

void write_csv(std::ostream& out, const std::vector<TelemetryRecord>& records,
               const TelemetryLabels& labels) {
  if (records.empty()) throw std::invalid_argument("write_csv: no records");

  std::vector<std::string> header{"t"};
  for (const auto& e : labels.edge) {
    header.push_back("Psi_" + e);
    append_vec_columns(header, "eQ_" + e);
    header.push_back("eNorm_" + e);
  }
  for (const auto& c : labels.craft) {
    append_vec_columns(header, "eW_" + c);
    append_vec_columns(header, "u_" + c);
  }
  header.push_back("U");
  header.push_back("V");
  header.push_back("rot_drift");

  std::vector<std::vector<double>> rows;
  rows.reserve(records.size());
  for (const auto& rec : records) {
    std::vector<double> row{rec.t};
    for (size_t m = 0; m < labels.edge.size(); ++m) {
      row.push_back(rec.psi[m]);
      for (int a = 0; a < 3; ++a) row.push_back(rec.attitude_error[m](a));
      row.push_back(rec.e_norm[m]);
    }
    for (size_t i = 0; i < labels.craft.size(); ++i) {
      for (int a = 0; a < 3; ++a) row.push_back(rec.rate_error[i](a));
      for (int a = 0; a < 3; ++a) row.push_back(rec.moment[i](a));
    }
    row.push_back(rec.energy);
    row.push_back(rec.lyapunov);
    row.push_back(rec.rotation_drift_max);
    rows.push_back(std::move(row));
  }
  write_table(out, header, rows);
}

void write_plot_files(const std::string& dir, const std::vector<TelemetryRecord>& records,
                      const TelemetryLabels& labels, int decimate) {
  if (records.empty()) throw std::invalid_argument("write_plot_files: no records");
  if (decimate < 1) throw std::invalid_argument("write_plot_files: decimate must be >= 1");
  const auto idx = plot_indices(records.size(), decimate);

  {
    std::vector<std::string> header{"t"};
    for (const auto& e : labels.edge) header.push_back("Psi_" + e);
    std::vector<std::vector<double>> rows;
    for (size_t r : idx) {
      std::vector<double> row{records[r].t};
      row.insert(row.end(), records[r].psi.begin(), records[r].psi.end());
      rows.push_back(std::move(row));
    }
    auto out = open_file(dir + "/plot_psi.csv");
    write_table(out, header, rows);
  }
  {
    std::vector<std::string> header{"t"};
    for (const auto& e : labels.edge) append_vec_columns(header, "eQ_" + e);
    std::vector<std::vector<double>> rows;
    for (size_t r : idx) {
      std::vector<double> row{records[r].t};
      for (const auto& v : records[r].attitude_error) {
        for (int a = 0; a < 3; ++a) row.push_back(v(a));
      }
      rows.push_back(std::move(row));
    }
    auto out = open_file(dir + "/plot_eq.csv");
    write_table(out, header, rows);
  }
  {
    std::vector<std::string> header{"t"};
    for (const auto& c : labels.craft) append_vec_columns(header, "eW_" + c);
    std::vector<std::vector<double>> rows;
    for (size_t r : idx) {
      std::vector<double> row{records[r].t};
      for (const auto& v : records[r].rate_error) {
        for (int a = 0; a < 3; ++a) row.push_back(v(a));
      }
      rows.push_back(std::move(row));
    }
    auto out = open_file(dir + "/plot_ew.csv");
    write_table(out, header, rows);
  }
  {
    std::vector<std::string> header{"t"};
    for (const auto& c : labels.craft) append_vec_columns(header, "u_" + c);
    std::vector<std::vector<double>> rows;
    for (size_t r : idx) {
      std::vector<double> row{records[r].t};
      for (const auto& v : records[r].moment) {
        for (int a = 0; a < 3; ++a) row.push_back(v(a));
      }
      rows.push_back(std::move(row));
    }
    auto out = open_file(dir + "/plot_u.csv");
    write_table(out, header, rows);
  }
}

nlohmann::json summary_to_json(const RunSummary& summary) {
  nlohmann::json j;
  j["status"] = summary.status;
  j["final_time"] = summary.final_time;
  j["steps"] = summary.steps;
  j["records"] = summary.records;
  j["final_psi"] = summary.final_psi;
  j["max_rotation_drift"] = summary.max_rotation_drift;
  j["energy_violation_count"] = summary.energy_violation_count;
  j["energy_step_tolerance"] = summary.energy_step_tolerance;
  j["coupling_used"] = summary.coupling_used;
  j["certificate_feasible"] = summary.certificate_feasible;
  j["rate_bound"] = summary.rate_bound;
  j["scale_audit_max"] = summary.scale_audit_max;
  return j;
}

void write_run_outputs(const std::string& dir, const RunResult& result,
                       const TelemetryLabels& labels) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_file(dir + "/telemetry.csv");
    write_csv(out, result.records, labels);
  }
  write_plot_files(dir, result.records, labels);
  {
    auto out = open_file(dir + "/summary.json");
    out << summary_to_json(result.summary).dump(2) << "\n";
  }
}

}  // namespace losform
