#pragma once

#include <cmath>
#include <string>

#include "tailrisk/error.hpp"
#include "tailrisk/gpd.hpp"
#include "tailrisk/normal.hpp"
#include "tailrisk/quadrature.hpp"

namespace tailrisk {

/// Exponential spectral weight with risk-aversion r > 0, normalized to
/// integrate to one on [0, 1]. Larger r concentrates the weight on the
/// worst outcomes (p near 1).
inline double exp_weight(double p, double r) {
  if (!(r > 0.0))
    throw numeric_error("exp_weight: risk aversion must be positive");
  return r * std::exp(-r * (1.0 - p)) / (-std::expm1(-r));
}

// ---------------------------------------------------------------- Gaussian

/// Losses are reported in loss units: positive = money lost. Under a
/// Gaussian return model r ~ N(mu, sigma), the loss is -r.
inline double normal_var(double mu, double sigma, double alpha) {
  if (!(sigma > 0.0)) throw numeric_error("normal_var: sigma must be positive");
  return sigma * normal_quantile(alpha) - mu;
}

inline double normal_es(double mu, double sigma, double alpha) {
  if (!(sigma > 0.0)) throw numeric_error("normal_es: sigma must be positive");
  double z = normal_quantile(alpha);
  return sigma * normal_pdf(z) / (1.0 - alpha) - mu;
}

/// Spectral risk measure of the Gaussian model: the weighted quantile
/// integral int phi(p) (mu + sigma z_p) dp evaluated by quadrature.
inline double normal_srm(double mu, double sigma, double r,
                         const quadrature_spec& spec) {
  if (!(sigma > 0.0))
    throw numeric_error("normal_srm: sigma must be positive");
  return integrate01(
      [&](double p) {
        return exp_weight(p, r) * (mu + sigma * normal_quantile(p));
      },
      spec);
}

// --------------------------------------------------------------------- POT

/// The POT quantile formula needs only these four numbers. Decoupled
/// from gpd_fit so benchmark parameter sets with non-integer
/// exceedance counts can be evaluated directly.
struct pot_params {
  double xi = 0.0;
  double beta = 1.0;
  double u = 0.0;          // threshold
  double tail_prob = 0.1;  // n_u / n
};

inline pot_params to_pot_params(const gpd_fit& fit) {
  return {fit.xi, fit.beta, fit.threshold, fit.tail_prob()};
}

/// Quantile of the peaks-over-threshold model at probability p. Above
/// the threshold this is the GPD tail estimator
///   q(p) = u + (beta/xi) [ ((n/n_u)(1-p))^(-xi) - 1 ];
/// below it the same expression extrapolates smoothly and is used only
/// inside spectral integrals, where the weight on that region is tiny.
inline double pot_quantile(const pot_params& m, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw numeric_error("pot_quantile: probability must lie in (0, 1)");
  double w = (1.0 - p) / m.tail_prob;
  if (m.xi == 0.0) return m.u - m.beta * std::log(w);
  return m.u + (m.beta / m.xi) * std::expm1(-m.xi * std::log(w));
}

/// Semi-parametric exceedance probability P(X > x) for a loss level at
/// or above the threshold:
///   (n_u/n) (1 + xi (x-u)/beta)^(-1/xi),
/// the tail complement of the fitted model's CDF.
inline double pot_exceed_prob(const pot_params& m, double x) {
  if (!(x >= m.u))
    throw numeric_error(
        "pot_exceed_prob: level lies below the threshold, where the tail "
        "formula does not apply");
  return m.tail_prob * (1.0 - gpd_cdf(x - m.u, m.xi, m.beta));
}

/// Value-at-risk of the POT model. The confidence level must lie in
/// the tail the model actually covers, i.e. at or above the threshold
/// quantile 1 - n_u/n; alpha = 1 - n_u/n returns the threshold itself.
inline double pot_var(const pot_params& m, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw numeric_error("pot_var: alpha must lie in (0, 1)");
  if (1.0 - alpha > m.tail_prob)
    throw numeric_error(
        "pot_var: confidence level " + std::to_string(alpha) +
        " lies below the fitted threshold quantile; use empirical "
        "quantiles for the interior of the distribution");
  return pot_quantile(m, alpha);
}

/// Expected shortfall of the POT model,
///   ES = VaR/(1-xi) + (beta - xi u)/(1-xi),
/// finite only for xi < 1.
inline double pot_es(const pot_params& m, double alpha) {
  if (m.xi >= 1.0)
    throw numeric_error(
        "pot_es: expected shortfall is infinite for xi >= 1 (xi = " +
        std::to_string(m.xi) + ")");
  double q = pot_var(m, alpha);
  return q / (1.0 - m.xi) + (m.beta - m.xi * m.u) / (1.0 - m.xi);
}

/// Spectral risk measure of the POT model: int phi(p) q(p) dp with the
/// extrapolated POT quantile.
inline double pot_srm(const pot_params& m, double r,
                      const quadrature_spec& spec) {
  if (m.xi >= 1.0)
    throw numeric_error("pot_srm: spectral measure diverges for xi >= 1");
  return integrate01(
      [&](double p) { return exp_weight(p, r) * pot_quantile(m, p); }, spec);
}

inline double pot_quantile(const gpd_fit& fit, double p) {
  return pot_quantile(to_pot_params(fit), p);
}
inline double pot_exceed_prob(const gpd_fit& fit, double x) {
  return pot_exceed_prob(to_pot_params(fit), x);
}
inline double pot_var(const gpd_fit& fit, double alpha) {
  return pot_var(to_pot_params(fit), alpha);
}
inline double pot_es(const gpd_fit& fit, double alpha) {
  return pot_es(to_pot_params(fit), alpha);
}
inline double pot_srm(const gpd_fit& fit, double r,
                      const quadrature_spec& spec) {
  return pot_srm(to_pot_params(fit), r, spec);
}

}  // namespace tailrisk
