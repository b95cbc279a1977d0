#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tailrisk/error.hpp"
#include "tailrisk/gpd.hpp"
#include "tailrisk/normal.hpp"
#include "tailrisk/timeseries.hpp"

namespace tailrisk {

struct qq_point {
  double theoretical = 0.0;  // fitted-normal quantile
  double empirical = 0.0;    // order statistic
};

/// Normal QQ pairs: i-th pair is (mu + sd * z_{(i-0.5)/n}, i-th order
/// statistic), sorted by the empirical coordinate. The (i-0.5)/n
/// plotting positions are a convention and are echoed in CLI metadata.
inline std::vector<qq_point> qq_normal(const return_series& r) {
  const std::size_t n = r.n();
  if (n < 10) throw data_error("qq_normal: need at least 10 observations");
  auto stats = summary_stats(r);  // throws on degenerate series

  std::vector<double> sorted(r.returns);
  std::sort(sorted.begin(), sorted.end());
  std::vector<qq_point> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out[i].theoretical = stats.mean + stats.std_dev * normal_quantile(p);
    out[i].empirical = sorted[i];
  }
  return out;
}

struct stability_entry {
  std::size_t n_u = 0;     // requested exceedance count
  double u = 0.0;          // threshold at that count
  double xi_hat = 0.0;
  double ci_low = 0.0;     // xi_hat -/+ 1.96 se
  double ci_high = 0.0;
  bool ok = false;
  std::string message;     // failure reason when not ok
};

struct stability_scan {
  std::vector<stability_entry> entries;
};

inline double threshold_from_count(const loss_series& losses, std::size_t k) {
  return threshold_from_count(losses.losses, k);
}

/// Tail-index stability across exceedance counts: for each requested
/// count, place the threshold at that order statistic, refit, and
/// report xi with a 95% band. Per-entry fit failures are recorded
/// inline; they do not abort the scan, and output order follows the
/// input counts.
inline stability_scan tail_stability_scan(const loss_series& losses,
                                          const std::vector<std::size_t>& counts) {
  const std::size_t n = losses.losses.size();
  for (std::size_t c : counts)
    if (c < 10 || c >= n)
      throw data_error("tail_stability_scan: counts must lie in [10, n)");

  stability_scan scan;
  scan.entries.reserve(counts.size());
  for (std::size_t c : counts) {
    stability_entry e;
    e.n_u = c;
    try {
      e.u = threshold_from_count(losses.losses, c);
      auto fit = fit_gpd(losses.losses, e.u);
      e.xi_hat = fit.xi;
      if (!fit.se_valid)
        throw numeric_error("standard errors unavailable (information matrix "
                            "not positive definite)");
      e.ci_low = fit.xi - 1.96 * fit.se_xi;
      e.ci_high = fit.xi + 1.96 * fit.se_xi;
      e.ok = true;
    } catch (const error& err) {
      e.ok = false;
      e.message = err.what();
    }
    scan.entries.push_back(std::move(e));
  }
  return scan;
}

struct exceedance_point {
  double x = 0.0;          // excess over the threshold
  double ecdf = 0.0;       // i / (n_u + 1)
  double model_cdf = 0.0;  // fitted GPD CDF at x
};

/// Empirical vs fitted exceedance distribution over the excesses used
/// in the fit. Plotting positions i/(n_u+1) keep the empirical CDF off
/// 0 and 1.
inline std::vector<exceedance_point> fitted_exceedance_curve(
    const gpd_fit& fit, std::vector<double> excesses) {
  if (excesses.empty())
    throw data_error("fitted_exceedance_curve: no exceedances");
  std::sort(excesses.begin(), excesses.end());
  std::vector<exceedance_point> out(excesses.size());
  const double denom = static_cast<double>(excesses.size()) + 1.0;
  for (std::size_t i = 0; i < excesses.size(); ++i) {
    out[i].x = excesses[i];
    out[i].ecdf = static_cast<double>(i + 1) / denom;
    out[i].model_cdf = gpd_cdf(excesses[i], fit.xi, fit.beta);
  }
  return out;
}

}  // namespace tailrisk
