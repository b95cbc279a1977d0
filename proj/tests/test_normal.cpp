#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tailrisk/error.hpp"
#include "tailrisk/normal.hpp"

using namespace tailrisk;

namespace {
// high-precision reference values, frozen from an independent
// arbitrary-precision oracle
struct ref {
  double p, z;
};
constexpr ref quantile_refs[] = {
    {0.95, 1.6448536269514722},   {0.99, 2.3263478740408408},
    {0.995, 2.5758293035489004},  {0.999, 3.090232306167813},
    {0.025, -1.9599639845400545}, {1e-9, -5.9978070150076865},
    {0.3, -0.5244005127080409},   {0.5, 0.0},
};
}  // namespace

TEST_CASE("normal_quantile matches reference values to 1e-12") {
  for (const auto& r : quantile_refs)
    REQUIRE(std::abs(normal_quantile(r.p) - r.z) < 1e-12);
}

TEST_CASE("normal_cdf matches reference values") {
  REQUIRE(std::abs(normal_cdf(1.0) - 0.8413447460685429) < 1e-15);
  REQUIRE(std::abs(normal_cdf(-2.5) - 0.006209665325776132) < 1e-16);
  REQUIRE(normal_cdf(0.0) == 0.5);
}

TEST_CASE("normal_pdf at zero") {
  REQUIRE(std::abs(normal_pdf(0.0) - 0.3989422804014327) < 1e-15);
}

TEST_CASE("quantile/CDF round-trip") {
  for (double p = 0.0005; p < 1.0; p += 0.0007)
    REQUIRE(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-13);
}

TEST_CASE("quantile is antisymmetric about 1/2") {
  for (double p : {0.001, 0.01, 0.2, 0.4, 0.49})
    REQUIRE(std::abs(normal_quantile(p) + normal_quantile(1.0 - p)) < 1e-11);
}

TEST_CASE("quantile rejects probabilities outside (0,1)") {
  REQUIRE_THROWS_AS(normal_quantile(0.0), numeric_error);
  REQUIRE_THROWS_AS(normal_quantile(1.0), numeric_error);
  REQUIRE_THROWS_AS(normal_quantile(-0.1), numeric_error);
  REQUIRE_THROWS_AS(normal_quantile(1.1), numeric_error);
}

TEST_CASE("chi-squared(2) survival function") {
  REQUIRE(chi2_survival_2df(0.0) == 1.0);
  REQUIRE(std::abs(chi2_survival_2df(2.0) - 0.36787944117144233) < 1e-16);
  // monotone decreasing
  REQUIRE(chi2_survival_2df(5.0) > chi2_survival_2df(6.0));
}
