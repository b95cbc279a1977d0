#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "tailrisk/error.hpp"
#include "tailrisk/gpd.hpp"
#include "tailrisk/normal.hpp"
#include "tailrisk/rng.hpp"

namespace tailrisk {

enum class position_side { long_side, short_side };

inline const char* to_string(position_side p) {
  return p == position_side::long_side ? "long" : "short";
}

inline position_side position_from_string(const std::string& s) {
  if (s == "long") return position_side::long_side;
  if (s == "short") return position_side::short_side;
  throw data_error("unknown position: " + s + " (expected long or short)");
}

struct price_observation {
  std::string date;  // ISO-8601 YYYY-MM-DD
  double price = 0.0;
};

struct price_series {
  std::string label;
  std::vector<price_observation> observations;
};

struct return_series {
  std::string label;
  std::vector<double> returns;  // percent log returns
  std::size_t n() const { return returns.size(); }
};

struct loss_series {
  std::string label;
  std::vector<double> losses;  // positive sign = money lost
  position_side position = position_side::long_side;
};

struct summary_stats_t {
  std::size_t n = 0;
  double mean = 0.0;
  double std_dev = 0.0;   // sample (n-1) standard deviation
  double skewness = 0.0;  // m3 / m2^1.5, central moments about the mean
  double kurtosis = 0.0;  // m4 / m2^2, raw (Gaussian = 3)
  double jb_stat = 0.0;
  double jb_pvalue = 0.0;
};

namespace detail {

inline bool valid_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (s[i] < '0' || s[i] > '9') return false;
  int m = (s[5] - '0') * 10 + (s[6] - '0');
  int d = (s[8] - '0') * 10 + (s[9] - '0');
  return m >= 1 && m <= 12 && d >= 1 && d <= 31;
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(trim(field));
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

inline double parse_number(const std::string& s, std::size_t line_no,
                           const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size())
      throw data_error("line " + std::to_string(line_no) + ": malformed " +
                       what + " '" + s + "'");
    return v;
  } catch (const data_error&) {
    throw;
  } catch (const std::exception&) {
    throw data_error("line " + std::to_string(line_no) + ": malformed " +
                     what + " '" + s + "'");
  }
}

// days since 1970-01-01 <-> civil date (proleptic Gregorian)
inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  y = static_cast<int>(yr + (m <= 2));
}

inline std::string format_date(std::int64_t serial) {
  int y, m, d;
  civil_from_days(serial, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

}  // namespace detail

/// Check the PriceSeries invariants: positive prices, valid ISO dates,
/// strictly increasing dates.
inline void validate(const price_series& p) {
  for (std::size_t i = 0; i < p.observations.size(); ++i) {
    const auto& o = p.observations[i];
    if (!detail::valid_iso_date(o.date))
      throw data_error("price series '" + p.label + "': invalid date '" +
                       o.date + "' at row " + std::to_string(i + 1));
    if (!(o.price > 0.0) || !std::isfinite(o.price))
      throw data_error("price series '" + p.label +
                       "': non-positive price at row " +
                       std::to_string(i + 1));
    if (i > 0 && !(p.observations[i - 1].date < o.date))
      throw data_error("price series '" + p.label +
                       "': dates not strictly increasing at row " +
                       std::to_string(i + 1));
  }
}

/// Load one price column from delimited text: header row required,
/// first column an ISO-8601 date, remaining columns named price
/// series. Lines starting with '#' are metadata comments and are
/// skipped, so our own CSV output round-trips. `column` selects by
/// header name, or by 0-based index when it parses as an integer
/// (index 0 is the date column and is not selectable). An empty
/// `column` picks the first price column.
inline price_series load_price_series(std::istream& in,
                                      const std::string& column = "",
                                      char delim = ',') {
  std::string line;
  std::size_t line_no = 0;
  for (;;) {
    if (!std::getline(in, line))
      throw data_error("empty input: header row required");
    ++line_no;
    std::string t = detail::trim(line);
    if (!t.empty() && t[0] != '#') break;
  }
  auto header = detail::split(line, delim);
  if (header.size() < 2)
    throw data_error("header must name a date column and at least one price "
                     "column");

  std::size_t col = 0;
  if (column.empty()) {
    col = 1;
  } else {
    for (std::size_t i = 1; i < header.size(); ++i)
      if (header[i] == column) {
        col = i;
        break;
      }
    if (col == 0) {
      bool numeric = !column.empty() &&
                     column.find_first_not_of("0123456789") == std::string::npos;
      if (numeric && column.size() <= 6) {
        std::size_t idx = std::stoul(column);
        if (idx >= 1 && idx < header.size())
          col = idx;
      }
    }
    if (col == 0)
      throw data_error("column '" + column + "' not found in header");
  }

  price_series out;
  out.label = header[col];
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = detail::split(line, delim);
    if (fields.size() != header.size())
      throw data_error("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    price_observation obs;
    obs.date = fields[0];
    if (!detail::valid_iso_date(obs.date))
      throw data_error("line " + std::to_string(line_no) +
                       ": invalid ISO-8601 date '" + obs.date + "'");
    obs.price = detail::parse_number(fields[col], line_no, "price");
    if (!(obs.price > 0.0) || !std::isfinite(obs.price))
      throw data_error("line " + std::to_string(line_no) +
                       ": non-positive price " + fields[col]);
    if (!out.observations.empty() &&
        !(out.observations.back().date < obs.date))
      throw data_error("line " + std::to_string(line_no) +
                       ": dates not strictly increasing");
    out.observations.push_back(std::move(obs));
  }
  return out;
}

inline price_series load_price_series_file(const std::string& path,
                                           const std::string& column = "",
                                           char delim = ',') {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open input file: " + path);
  return load_price_series(in, column, delim);
}

/// Percent log returns: r[i] = 100 ln(P[i+1]/P[i]).
inline return_series log_returns(const price_series& p) {
  if (p.observations.size() < 2)
    throw data_error("log_returns: need at least 2 price observations");
  return_series out;
  out.label = p.label;
  out.returns.reserve(p.observations.size() - 1);
  for (std::size_t i = 1; i < p.observations.size(); ++i)
    out.returns.push_back(100.0 * std::log(p.observations[i].price /
                                           p.observations[i - 1].price));
  return out;
}

/// Losses carry positive sign: a long position loses when returns are
/// negative, a short position when they are positive.
inline loss_series to_loss_series(const return_series& r,
                                  position_side position) {
  loss_series out;
  out.label = r.label;
  out.position = position;
  out.losses.reserve(r.returns.size());
  for (double x : r.returns)
    out.losses.push_back(position == position_side::long_side ? -x : x);
  return out;
}

/// Descriptive statistics with the Jarque-Bera normality test.
/// Skewness and kurtosis use central moments about the mean; kurtosis
/// is raw (Gaussian = 3). P-values below 1e-12 are reported as 0.
inline summary_stats_t summary_stats(const return_series& r) {
  const std::size_t n = r.n();
  if (n < 4) throw data_error("summary_stats: need at least 4 observations");
  double mean = 0.0;
  for (double x : r.returns) mean += x;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : r.returns) {
    double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  double ss = m2;  // sum of squared deviations
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (!(m2 > 0.0))
    throw data_error("summary_stats: degenerate series (zero variance)");

  summary_stats_t s;
  s.n = n;
  s.mean = mean;
  s.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
  s.skewness = m3 / std::pow(m2, 1.5);
  s.kurtosis = m4 / (m2 * m2);
  s.jb_stat = static_cast<double>(n) *
              (s.skewness * s.skewness / 6.0 +
               (s.kurtosis - 3.0) * (s.kurtosis - 3.0) / 24.0);
  s.jb_pvalue = chi2_survival_2df(s.jb_stat);
  if (s.jb_pvalue < 1e-12) s.jb_pvalue = 0.0;
  return s;
}

/// Synthetic return generator, used by tests and the simulate command
/// in place of proprietary market data.
///
/// gaussian: i.i.d. N(mu, sigma^2).
/// gpd_composite: Gaussian body with both tails replaced, beyond the
/// tail_prob quantiles, by GPD tails with shape xi. The tail scale
/// beta = sigma * tail_prob / pdf(z_cut) makes the density continuous
/// at the graft points, and excesses beyond either cut are exactly
/// GPD(xi, beta) distributed, which is what tail-recovery tests need.
///
/// Contract: sampling is by inverse transform from a deterministic
/// uniform stream, so a fixed (spec, n, seed) triple yields the same
/// sequence on every platform, run, and thread count.
struct synthetic_spec {
  enum class family { gaussian, gpd_composite };
  family model = family::gaussian;
  double mu = 0.0;
  double sigma = 1.0;
  double xi = 0.1;         // composite only
  double tail_prob = 0.05; // composite only: mass in each grafted tail
};

inline return_series generate_synthetic_returns(const synthetic_spec& spec,
                                                std::size_t n,
                                                std::uint64_t seed) {
  if (n < 1) throw data_error("generate_synthetic_returns: n must be >= 1");
  if (!(spec.sigma > 0.0))
    throw data_error("generate_synthetic_returns: sigma must be positive");

  return_series out;
  out.label = spec.model == synthetic_spec::family::gaussian
                  ? "synthetic-gaussian"
                  : "synthetic-gpd-composite";
  out.returns.reserve(n);
  rng gen(seed);

  if (spec.model == synthetic_spec::family::gaussian) {
    for (std::size_t i = 0; i < n; ++i)
      out.returns.push_back(spec.mu + spec.sigma * normal_quantile(
                                          gen.uniform_pos()));
    return out;
  }

  if (!(spec.tail_prob > 0.0 && spec.tail_prob <= 0.25))
    throw data_error("generate_synthetic_returns: tail_prob must lie in "
                     "(0, 0.25]");
  if (!(spec.xi < 1.0))
    throw data_error("generate_synthetic_returns: composite requires xi < 1");
  const double p = spec.tail_prob;
  const double zc = normal_quantile(1.0 - p);
  const double beta = spec.sigma * p / normal_pdf(zc);
  const double upper_cut = spec.mu + spec.sigma * zc;
  const double lower_cut = spec.mu - spec.sigma * zc;
  for (std::size_t i = 0; i < n; ++i) {
    double u = gen.uniform_pos();
    double x;
    if (u < p)
      x = lower_cut - gpd_quantile((p - u) / p, spec.xi, beta);
    else if (u <= 1.0 - p)
      x = spec.mu + spec.sigma * normal_quantile(u);
    else
      x = upper_cut + gpd_quantile((u - (1.0 - p)) / p, spec.xi, beta);
    out.returns.push_back(x);
  }
  return out;
}

/// Turn returns into a weekly price path for the simulate command:
/// P_0 = 100, P_t = P_{t-1} exp(r_t / 100), Friday dates from start.
inline price_series to_price_series(const return_series& r,
                                    const std::string& start_date =
                                        "1979-01-05") {
  if (!detail::valid_iso_date(start_date))
    throw data_error("to_price_series: invalid start date " + start_date);
  int y = std::stoi(start_date.substr(0, 4));
  int m = std::stoi(start_date.substr(5, 2));
  int d = std::stoi(start_date.substr(8, 2));
  std::int64_t serial = detail::days_from_civil(y, m, d);

  price_series out;
  out.label = r.label;
  out.observations.reserve(r.returns.size() + 1);
  double price = 100.0;
  out.observations.push_back({detail::format_date(serial), price});
  for (double ret : r.returns) {
    serial += 7;
    price *= std::exp(ret / 100.0);
    out.observations.push_back({detail::format_date(serial), price});
  }
  return out;
}

}  // namespace tailrisk
