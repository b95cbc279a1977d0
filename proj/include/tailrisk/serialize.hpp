#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tailrisk/error.hpp"
#include "tailrisk/gpd.hpp"
#include "tailrisk/quadrature.hpp"
#include "tailrisk/version.hpp"

namespace tailrisk {

/// Insertion-ordered JSON keeps key order deterministic, so rerunning
/// a command emits byte-identical files.
using ojson = nlohmann::ordered_json;

/// Fixed significant digits, '.' decimal separator, no grouping.
inline std::string fmt_sig(double x, int sig = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", sig, x);
  return buf;
}

inline ojson gpd_fit_to_json(const gpd_fit& f) {
  ojson j;
  j["xi"] = f.xi;
  j["beta"] = f.beta;
  j["u"] = f.threshold;
  j["n"] = f.n_total;
  j["n_u"] = f.n_exceed;
  // the published convention: non-exceedance frequency 1 - n_u/n
  j["prob"] = 1.0 - f.tail_prob();
  if (f.se_valid) {
    j["se_xi"] = f.se_xi;
    j["se_beta"] = f.se_beta;
  } else {
    j["se_xi"] = nullptr;
    j["se_beta"] = nullptr;
  }
  j["loglik"] = f.loglik;
  return j;
}

inline gpd_fit gpd_fit_from_json(const nlohmann::json& j) {
  gpd_fit f;
  try {
    f.xi = j.at("xi").get<double>();
    f.beta = j.at("beta").get<double>();
    f.threshold = j.at("u").get<double>();
    f.n_total = j.at("n").get<std::size_t>();
    f.n_exceed = j.at("n_u").get<std::size_t>();
    if (j.contains("loglik") && !j["loglik"].is_null())
      f.loglik = j["loglik"].get<double>();
    if (j.contains("se_xi") && !j["se_xi"].is_null() &&
        j.contains("se_beta") && !j["se_beta"].is_null()) {
      f.se_xi = j["se_xi"].get<double>();
      f.se_beta = j["se_beta"].get<double>();
      f.se_valid = true;
    }
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("malformed GPD fit record: ") + e.what());
  }
  if (!(f.beta > 0.0)) throw data_error("GPD fit record: beta must be positive");
  if (f.n_exceed == 0 || f.n_total < f.n_exceed)
    throw data_error("GPD fit record: need 0 < n_u <= n");
  return f;
}

/// Metadata block embedded in every output artifact: version, command,
/// full config echo, seed, node placement scheme. Deliberately no
/// timestamps, so identical runs emit identical bytes.
inline ojson make_metadata(const std::string& command, const ojson& config,
                           std::uint64_t seed) {
  ojson meta;
  meta["version"] = version_string;
  meta["command"] = command;
  meta["config"] = config;
  meta["seed"] = seed;
  meta["node_scheme"] = node_scheme_id;
  return meta;
}

/// '#'-prefixed metadata comment lines atop CSV output.
inline void write_csv_metadata(std::ostream& os, const ojson& meta) {
  for (const auto& [key, value] : meta.items()) {
    os << "# " << key << ": ";
    if (value.is_string())
      os << value.get<std::string>();
    else
      os << value.dump();
    os << "\n";
  }
}

struct csv_table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline void write_csv(std::ostream& os, const csv_table& table,
                      const ojson& meta) {
  write_csv_metadata(os, meta);
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw numeric_error("write_csv: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

}  // namespace tailrisk
