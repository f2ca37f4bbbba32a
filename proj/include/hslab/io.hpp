#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "hslab/complex_matrix.hpp"
#include "hslab/errors.hpp"
#include "hslab/tolerance.hpp"

namespace hslab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kMatrixSchemaVersion = "1";

using Json = nlohmann::json;

// Shortest text that round-trips a double exactly.
inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---- matrix files ---------------------------------------------------------

// Row-major [re, im] pairs. "cols" may be omitted for square matrices.
inline Json matrix_to_json(const CMatrix& m) {
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      entries.push_back({m(i, j).real(), m(i, j).imag()});
  Json out{{"schema_version", kMatrixSchemaVersion},
           {"n", m.rows()},
           {"entries", entries}};
  if (m.cols() != m.rows()) out["cols"] = m.cols();
  return out;
}

inline CMatrix matrix_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("matrix file: top level must be an object");
  if (!j.contains("schema_version") || !j["schema_version"].is_string() ||
      j["schema_version"].get<std::string>() != kMatrixSchemaVersion)
    throw ParseError("matrix file: unsupported schema_version");
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw ParseError("matrix file: missing integer field 'n'");
  const long long n = j["n"].get<long long>();
  long long cols = n;
  if (j.contains("cols")) {
    if (!j["cols"].is_number_integer())
      throw ParseError("matrix file: 'cols' must be an integer");
    cols = j["cols"].get<long long>();
  }
  if (n < 1 || n > 100000 || cols < 0 || cols > 100000)
    throw ParseError("matrix file: dimensions out of range");
  if (!j.contains("entries") || !j["entries"].is_array())
    throw ParseError("matrix file: missing array field 'entries'");
  const auto& entries = j["entries"];
  if (entries.size() != std::size_t(n) * std::size_t(cols))
    throw ParseError("matrix file: entries size does not match rows*cols");
  CMatrix m(n, cols);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++idx) {
      const auto& e = entries[idx];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ParseError("matrix file: entry " + std::to_string(idx) +
                         " must be [re, im]");
      double re = e[0].get<double>(), im = e[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im))
        throw ParseError("matrix file: entry " + std::to_string(idx) +
                         " is not finite");
      m(i, j2) = Complex(re, im);
    }
  return m;
}

inline void save_matrix(const std::filesystem::path& path, const CMatrix& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << matrix_to_json(m).dump(2) << "\n";
}

inline CMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file: " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError(std::string("matrix file: invalid JSON: ") + e.what());
  }
  return matrix_from_json(j);
}

// ---- tolerance overrides ---------------------------------------------------

inline ToleranceConfig tolerances_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("tolerance file: top level must be an object");
  ToleranceConfig tol;
  const std::vector<std::pair<const char*, double*>> doubles = {
      {"rank_rel", &tol.rank_rel},
      {"schur_residual_rel", &tol.schur_residual_rel},
      {"unitary_residual_rel", &tol.unitary_residual_rel},
      {"swap_sep_min", &tol.swap_sep_min},
      {"herm_rel", &tol.herm_rel},
      {"psd_clamp_rel", &tol.psd_clamp_rel},
      {"cluster_rel", &tol.cluster_rel},
      {"point_match_tol", &tol.point_match_tol},
      {"boundary_guard_rel", &tol.boundary_guard_rel},
      {"invariance_rel", &tol.invariance_rel},
      {"power_gap_min", &tol.power_gap_min},
      {"power_feas_eps", &tol.power_feas_eps},
      {"power_feas_frac", &tol.power_feas_frac},
      {"cross_method_angle", &tol.cross_method_angle},
      {"join_meet_angle", &tol.join_meet_angle},
      {"similarity_angle_factor", &tol.similarity_angle_factor},
      {"pushforward_angle", &tol.pushforward_angle},
      {"commute_rel", &tol.commute_rel},
      {"quasinil_tol", &tol.quasinil_tol},
      {"growth_rel_slack", &tol.growth_rel_slack},
      {"growth_rel_gap", &tol.growth_rel_gap},
      {"angle_zero_tol", &tol.angle_zero_tol},
      {"idem_residual", &tol.idem_residual},
      {"idem_bound_slack", &tol.idem_bound_slack},
      {"measure_residual", &tol.measure_residual},
      {"selfadjoint_residual", &tol.selfadjoint_residual},
      {"split_rel", &tol.split_rel},
      {"series_tail_frac", &tol.series_tail_frac},
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (!it.value().is_number())
      throw ParseError("tolerance file: '" + key + "' must be a number");
    const double v = it.value().get<double>();
    bool found = false;
    for (const auto& [name, slot] : doubles)
      if (key == name) {
        *slot = v;
        found = true;
        break;
      }
    if (found) continue;
    if (key == "growth_n_max") tol.growth_n_max = int(v);
    else if (key == "max_exhaustive_atoms") tol.max_exhaustive_atoms = std::size_t(v);
    else if (key == "sampled_unions") tol.sampled_unions = std::size_t(v);
    else if (key == "series_k_cap") tol.series_k_cap = std::size_t(v);
    else throw ParseError("tolerance file: unknown key '" + key + "'");
  }
  return tol;
}

inline ToleranceConfig load_tolerances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open tolerance file: " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError(std::string("tolerance file: invalid JSON: ") + e.what());
  }
  return tolerances_from_json(j);
}

// ---- reports ---------------------------------------------------------------

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string command;
  std::uint64_t seed = 0;
  Json config;  // canonical parameter echo; hashed into meta
  std::vector<Table> tables;
  std::vector<Verdict> verdicts;

  bool all_pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }
};

inline std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json report_to_json(const Report& rep) {
  Json meta{{"version", kVersion},
            {"command", rep.command},
            {"seed", rep.seed},
            {"config_hash", fnv1a(rep.config.dump())},
            {"generated_at", iso8601_utc_now()}};
  Json tables = Json::object();
  for (const auto& t : rep.tables) {
    Json rows = Json::array();
    for (const auto& r : t.rows) {
      Json row = Json::object();
      for (std::size_t c = 0; c < t.columns.size() && c < r.size(); ++c)
        row[t.columns[c]] = r[c];
      rows.push_back(row);
    }
    tables[t.name] = rows;
  }
  Json verdicts = Json::array();
  for (const auto& v : rep.verdicts)
    verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  return Json{{"meta", meta},
              {"config", rep.config},
              {"tables", tables},
              {"verdicts", verdicts}};
}

// CSV body: header line plus one line per row. Cells never contain commas or
// quotes (numbers, region expressions without commas are pre-sanitized by the
// caller), but quote defensively if one slips through.
inline std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::string table_to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    os << (c ? "," : "") << csv_escape(t.columns[c]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << csv_escape(row[c]);
    os << "\n";
  }
  return os.str();
}

// Writes <dir>/<command>_report.json and/or <dir>/<command>_<table>.csv.
inline std::vector<std::filesystem::path> write_report(
    const std::filesystem::path& dir, const Report& rep,
    const std::string& format) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const bool want_json = format == "json" || format == "both";
  const bool want_csv = format == "csv" || format == "both";
  if (!want_json && !want_csv)
    throw DomainError("write_report: format must be json, csv, or both");
  if (want_json) {
    auto path = dir / (rep.command + "_report.json");
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << report_to_json(rep).dump(2) << "\n";
    written.push_back(path);
  }
  if (want_csv) {
    for (const auto& t : rep.tables) {
      auto path = dir / (rep.command + "_" + t.name + ".csv");
      std::ofstream out(path);
      if (!out) throw Error("cannot open for writing: " + path.string());
      out << table_to_csv(t);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace hslab
