#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tailrisk/error.hpp"
#include "tailrisk/gpd.hpp"
#include "tailrisk/risk_measures.hpp"
#include "tailrisk/rng.hpp"

namespace tailrisk {

enum class measure_kind { var, es, srm };

inline const char* to_string(measure_kind k) {
  switch (k) {
    case measure_kind::var: return "var";
    case measure_kind::es: return "es";
    case measure_kind::srm: return "srm";
  }
  return "unknown";
}

/// How the per-resample expected shortfall is formed: from the model
/// identity ES = VaR/(1-xi) + (beta - xi u)/(1-xi) applied to the
/// resample VaR (default), or as the average of resampled losses at
/// and above the resample VaR.
enum class es_bootstrap_method { model, tail_average };

struct bootstrap_config {
  std::size_t resamples = 5000;
  /// Monte Carlo draws per resample for the spectral measure.
  std::size_t srm_draws = 5000;
  /// Central coverage of the percentile interval (0.90 = 5th..95th).
  double ci_level = 0.90;
  std::uint64_t seed = 42;
  es_bootstrap_method es_method = es_bootstrap_method::model;
};

struct bootstrap_result {
  measure_kind kind = measure_kind::var;
  double param = 0.0;  // confidence level (var, es) or risk aversion (srm)
  double estimate = 0.0;  // point estimate from the fitted model
  double mean = 0.0;      // mean of bootstrap replicates
  double se = 0.0;        // sample sd of replicates (ddof = 1)
  double ci_low = 0.0, ci_high = 0.0;          // percentile interval
  double ci_low_std = 0.0, ci_high_std = 0.0;  // interval / replicate mean
};

namespace detail {

/// 1-based nearest-rank percentile of an ascending-sorted sample.
inline double percentile_nearest_rank(const std::vector<double>& sorted,
                                      double p) {
  std::size_t b = sorted.size();
  auto idx = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(b)));
  if (idx < 1) idx = 1;
  if (idx > b) idx = b;
  return sorted[idx - 1];
}

inline void summarize_replicates(std::vector<double>& reps, double ci_level,
                                 bootstrap_result& out) {
  const std::size_t b = reps.size();
  double m = 0.0;
  for (double x : reps) m += x;
  m /= static_cast<double>(b);
  double ss = 0.0;
  for (double x : reps) ss += (x - m) * (x - m);
  out.mean = m;
  out.se = std::sqrt(ss / static_cast<double>(b - 1));
  std::sort(reps.begin(), reps.end());
  double tail = 0.5 * (1.0 - ci_level);
  out.ci_low = percentile_nearest_rank(reps, tail);
  out.ci_high = percentile_nearest_rank(reps, 1.0 - tail);
  out.ci_low_std = out.ci_low / m;
  out.ci_high_std = out.ci_high / m;
}

}  // namespace detail

/// Semi-parametric bootstrap of the fitted POT model.
///
/// Each resample j draws n uniforms through the fitted quantile
/// function (a fresh sample from the fitted model): VaR replicates are
/// order statistics at rank ceil(alpha n), ES replicates follow the
/// configured method, and spectral replicates average
/// phi_r(p) q(p) over srm_draws fresh uniforms. Streams are derived
/// per resample (losses on stream 2j, spectral draws on 2j+1), so
/// results are independent of evaluation order and identical whether a
/// measure is bootstrapped alone or as part of the panel.
///
/// Rows come back ordered var per alpha, es per alpha, srm per r.
inline std::vector<bootstrap_result> bootstrap_panel(
    const gpd_fit& fit, const std::vector<double>& alphas,
    const std::vector<double>& rs, const quadrature_spec& srm_quad,
    const bootstrap_config& cfg) {
  if (cfg.resamples < 2)
    throw data_error("bootstrap: need at least 2 resamples");
  if (!rs.empty() && cfg.srm_draws < 2)
    throw data_error("bootstrap: need at least 2 spectral draws");
  if (!(cfg.ci_level > 0.0 && cfg.ci_level < 1.0))
    throw data_error("bootstrap: ci_level must lie in (0, 1)");

  const std::size_t n = fit.n_total;
  const std::size_t b = cfg.resamples;
  const bool need_loss = !alphas.empty();
  const bool need_srm = !rs.empty();

  std::vector<std::size_t> rank(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    if (!(alphas[a] > 0.0 && alphas[a] < 1.0))
      throw data_error("bootstrap: alpha must lie in (0, 1)");
    auto k = static_cast<std::size_t>(
        std::ceil(alphas[a] * static_cast<double>(n)));
    if (k < 1) k = 1;
    if (k > n) k = n;
    rank[a] = k;
  }

  std::vector<std::vector<double>> var_rep(alphas.size()),
      es_rep(alphas.size()), srm_rep(rs.size());
  for (auto& v : var_rep) v.reserve(b);
  for (auto& v : es_rep) v.reserve(b);
  for (auto& v : srm_rep) v.reserve(b);

  std::vector<double> qs(n), qd;
  for (std::size_t j = 0; j < b; ++j) {
    if (need_loss) {
      rng g = rng::substream(cfg.seed, 2 * j);
      for (std::size_t i = 0; i < n; ++i)
        qs[i] = pot_quantile(fit, g.uniform_pos());
      std::sort(qs.begin(), qs.end());
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        double v = qs[rank[a] - 1];
        var_rep[a].push_back(v);
        if (cfg.es_method == es_bootstrap_method::model) {
          es_rep[a].push_back(v / (1.0 - fit.xi) +
                              (fit.beta - fit.xi * fit.threshold) /
                                  (1.0 - fit.xi));
        } else {
          double s = 0.0;
          for (std::size_t i = rank[a] - 1; i < n; ++i) s += qs[i];
          es_rep[a].push_back(s / static_cast<double>(n - rank[a] + 1));
        }
      }
    }
    if (need_srm) {
      rng g = rng::substream(cfg.seed, 2 * j + 1);
      qd.resize(cfg.srm_draws);
      std::vector<double> pd(cfg.srm_draws);
      for (std::size_t t = 0; t < cfg.srm_draws; ++t) {
        pd[t] = g.uniform_pos();
        qd[t] = pot_quantile(fit, pd[t]);
      }
      for (std::size_t ri = 0; ri < rs.size(); ++ri) {
        double s = 0.0;
        for (std::size_t t = 0; t < cfg.srm_draws; ++t)
          s += exp_weight(pd[t], rs[ri]) * qd[t];
        srm_rep[ri].push_back(s / static_cast<double>(cfg.srm_draws));
      }
    }
  }

  std::vector<bootstrap_result> out;
  out.reserve(2 * alphas.size() + rs.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    bootstrap_result r;
    r.kind = measure_kind::var;
    r.param = alphas[a];
    r.estimate = pot_var(fit, alphas[a]);
    detail::summarize_replicates(var_rep[a], cfg.ci_level, r);
    out.push_back(r);
  }
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    if (fit.xi >= 1.0)
      throw numeric_error("bootstrap: expected shortfall requires xi < 1");
    bootstrap_result r;
    r.kind = measure_kind::es;
    r.param = alphas[a];
    r.estimate = pot_es(fit, alphas[a]);
    detail::summarize_replicates(es_rep[a], cfg.ci_level, r);
    out.push_back(r);
  }
  for (std::size_t ri = 0; ri < rs.size(); ++ri) {
    bootstrap_result r;
    r.kind = measure_kind::srm;
    r.param = rs[ri];
    r.estimate = pot_srm(fit, rs[ri], srm_quad);
    detail::summarize_replicates(srm_rep[ri], cfg.ci_level, r);
    out.push_back(r);
  }
  return out;
}

/// Bootstrap a single measure; stream assignment matches the panel.
inline bootstrap_result bootstrap_var(const gpd_fit& fit, double alpha,
                                      const bootstrap_config& cfg) {
  return bootstrap_panel(fit, {alpha}, {}, quadrature_spec{}, cfg)[0];
}

inline bootstrap_result bootstrap_es(const gpd_fit& fit, double alpha,
                                     const bootstrap_config& cfg) {
  return bootstrap_panel(fit, {alpha}, {}, quadrature_spec{}, cfg)[1];
}

inline bootstrap_result bootstrap_srm(const gpd_fit& fit, double r,
                                      const quadrature_spec& srm_quad,
                                      const bootstrap_config& cfg) {
  return bootstrap_panel(fit, {}, {r}, srm_quad, cfg)[0];
}

}  // namespace tailrisk
