#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "tailrisk/error.hpp"

namespace tailrisk {

enum class quad_rule { trapezoid, simpson, niederreiter, weyl };

inline const char* to_string(quad_rule r) {
  switch (r) {
    case quad_rule::trapezoid: return "trapezoid";
    case quad_rule::simpson: return "simpson";
    case quad_rule::niederreiter: return "niederreiter";
    case quad_rule::weyl: return "weyl";
  }
  return "unknown";
}

inline quad_rule quad_rule_from_string(const std::string& s) {
  if (s == "trapezoid") return quad_rule::trapezoid;
  if (s == "simpson") return quad_rule::simpson;
  if (s == "niederreiter") return quad_rule::niederreiter;
  if (s == "weyl") return quad_rule::weyl;
  throw data_error("unknown quadrature rule: " + s);
}

struct quadrature_spec {
  quad_rule rule = quad_rule::trapezoid;
  std::int64_t slices = 1000000;
};

/// Identifier of the node placement scheme, embedded in output
/// metadata so results stay comparable across versions.
inline constexpr const char* node_scheme_id = "open-interior-v1";

/// Neumaier compensated accumulator. Fixed summation order plus
/// compensation keeps results reproducible and accurate for the
/// multi-million-node grids used here.
class compensated_sum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// k-th point (k >= 1) of the base-2 radical inverse (van der Corput)
/// sequence: 1/2, 1/4, 3/4, 1/8, 5/8, ...
inline double niederreiter_point(std::uint64_t k) {
  double x = 0.0;
  double b = 0.5;
  while (k) {
    if (k & 1) x += b;
    b *= 0.5;
    k >>= 1;
  }
  return x;
}

/// k-th point (k >= 1) of the Weyl sequence frac(k * sqrt(2)).
inline double weyl_point(std::uint64_t k) {
  return std::fmod(static_cast<double>(k) * std::sqrt(2.0), 1.0);
}

/// Integrate f over (0, 1) on the open interior grid p_k = k / (N+1),
/// k = 1..N, h = 1/(N+1). Integrands here (spectral weights times
/// quantile functions) blow up at p -> 1, so no rule ever evaluates f
/// at 0 or 1:
///  - trapezoid / simpson: composite rule across the interior nodes;
///    the two half-open end panels are dropped, which for increasing
///    integrands biases the estimate low and makes convergence
///    monotone from below.
///  - niederreiter / weyl: stratified low-discrepancy rule. [h, 1-h]
///    is split into N equal cells and the k-th sequence point places
///    the node inside cell k, weighted by the cell width (1-2h)/N.
///    Stratification keeps the two sequences' treatment of the
///    near-singular upper end aligned cell by cell (a raw (1/N)-sum
///    over unsorted points lets the largest-point gap dominate there,
///    separating the rules by far more than their discrepancy and
///    even flipping the sign of the benchmark bias), while the node
///    inside each cell still comes from the chosen sequence.
template <class F>
double integrate01(F&& f, const quadrature_spec& spec) {
  const std::int64_t n = spec.slices;
  if (n < 2) throw numeric_error("integrate01: slices must be at least 2");
  const double h = 1.0 / static_cast<double>(n + 1);

  auto eval = [&](double x) {
    double y = f(x);
    if (!std::isfinite(y))
      throw numeric_error("integrate01: integrand not finite at node " +
                          std::to_string(x));
    return y;
  };

  compensated_sum s;
  switch (spec.rule) {
    case quad_rule::trapezoid: {
      double first = 0.0, last = 0.0;
      for (std::int64_t k = 1; k <= n; ++k) {
        double y = eval(static_cast<double>(k) * h);
        if (k == 1) first = y;
        if (k == n) last = y;
        s.add(y);
      }
      return h * (s.value() - 0.5 * first - 0.5 * last);
    }
    case quad_rule::simpson: {
      // n nodes span n-1 panels; an odd panel count is handled by a
      // trapezoid step on the first panel, composite Simpson on the rest
      std::int64_t start = 1;
      double head = 0.0;
      if ((n - 1) % 2 != 0) {
        double y1 = eval(h);
        double y2 = eval(2.0 * h);
        head = 0.5 * h * (y1 + y2);
        start = 2;
      }
      if (n - start >= 2) {
        compensated_sum odd, even;
        double y0 = eval(static_cast<double>(start) * h);
        double ym = eval(static_cast<double>(n) * h);
        for (std::int64_t k = start + 1; k < n; ++k) {
          double y = eval(static_cast<double>(k) * h);
          if ((k - start) % 2 == 1)
            odd.add(y);
          else
            even.add(y);
        }
        return head +
               (h / 3.0) * (y0 + 4.0 * odd.value() + 2.0 * even.value() + ym);
      }
      return head;
    }
    case quad_rule::niederreiter:
    case quad_rule::weyl: {
      const double span = 1.0 - 2.0 * h;
      const double cell = span / static_cast<double>(n);
      for (std::int64_t k = 1; k <= n; ++k) {
        double x = spec.rule == quad_rule::weyl
                       ? weyl_point(static_cast<std::uint64_t>(k))
                       : niederreiter_point(static_cast<std::uint64_t>(k));
        s.add(eval(h + (static_cast<double>(k - 1) + x) * cell));
      }
      return s.value() * cell;
    }
  }
  throw numeric_error("integrate01: unknown rule");
}

}  // namespace tailrisk
