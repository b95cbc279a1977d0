#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include "tailrisk/error.hpp"
#include "tailrisk/gpd.hpp"
#include "tailrisk/serialize.hpp"
#include "tailrisk/version.hpp"

using namespace tailrisk;
using Catch::Matchers::ContainsSubstring;

namespace {

gpd_fit sample_fit() {
  gpd_fit f;
  f.xi = 0.036;
  f.beta = 2.445;
  f.threshold = 3.269;
  f.n_total = 1462;
  f.n_exceed = 201;
  f.loglik = -412.53125;
  f.se_xi = 0.0625;
  f.se_beta = 0.25;
  f.se_valid = true;
  return f;
}

}  // namespace

TEST_CASE("significant-digit formatting matches printf %g") {
  REQUIRE(fmt_sig(10.73328545793165) == "10.7333");
  REQUIRE(fmt_sig(0.00012345678) == "0.000123457");
  REQUIRE(fmt_sig(123456789.0) == "1.23457e+08");
  REQUIRE(fmt_sig(-5.884050002293346) == "-5.88405");
  REQUIRE(fmt_sig(0.0) == "0");
  REQUIRE(fmt_sig(2.0) == "2");
  REQUIRE(fmt_sig(1.0 / 3.0, 3) == "0.333");
  REQUIRE(fmt_sig(9.989) == "9.989");
}

TEST_CASE("fit records round-trip bitwise through json") {
  gpd_fit f = sample_fit();
  auto j = gpd_fit_to_json(f);
  auto g = gpd_fit_from_json(j);
  REQUIRE(g.xi == f.xi);
  REQUIRE(g.beta == f.beta);
  REQUIRE(g.threshold == f.threshold);
  REQUIRE(g.n_total == f.n_total);
  REQUIRE(g.n_exceed == f.n_exceed);
  REQUIRE(g.loglik == f.loglik);
  REQUIRE(g.se_valid);
  REQUIRE(g.se_xi == f.se_xi);
  REQUIRE(g.se_beta == f.se_beta);
  // and through a serialized string as well
  auto h = gpd_fit_from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(h.xi == f.xi);
  REQUIRE(h.beta == f.beta);
  REQUIRE(h.loglik == f.loglik);
}

TEST_CASE("fit json carries the documented keys in stable order") {
  auto j = gpd_fit_to_json(sample_fit());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  REQUIRE(keys == std::vector<std::string>{"xi", "beta", "u", "n", "n_u",
                                           "prob", "se_xi", "se_beta",
                                           "loglik"});
  // prob records the published non-exceedance frequency 1 - n_u/n
  REQUIRE(j["prob"].get<double>() == 1.0 - 201.0 / 1462.0);
  REQUIRE(j.dump() == gpd_fit_to_json(sample_fit()).dump());
}

TEST_CASE("invalid standard errors serialize as null and stay invalid") {
  gpd_fit f = sample_fit();
  f.se_valid = false;
  auto j = gpd_fit_to_json(f);
  REQUIRE(j["se_xi"].is_null());
  REQUIRE(j["se_beta"].is_null());
  auto g = gpd_fit_from_json(j);
  REQUIRE_FALSE(g.se_valid);
}

TEST_CASE("malformed fit records are rejected with context") {
  nlohmann::json j = {{"xi", 0.1}, {"beta", 2.0}};
  REQUIRE_THROWS_AS(gpd_fit_from_json(j), data_error);
  REQUIRE_THROWS_WITH(gpd_fit_from_json(j),
                      ContainsSubstring("malformed GPD fit record"));
  nlohmann::json bad_beta = gpd_fit_to_json(sample_fit());
  bad_beta["beta"] = -1.0;
  REQUIRE_THROWS_WITH(gpd_fit_from_json(bad_beta),
                      ContainsSubstring("beta must be positive"));
  nlohmann::json bad_counts = gpd_fit_to_json(sample_fit());
  bad_counts["n_u"] = 0;
  REQUIRE_THROWS_AS(gpd_fit_from_json(bad_counts), data_error);
  bad_counts = gpd_fit_to_json(sample_fit());
  bad_counts["n"] = 100;  // smaller than n_u
  REQUIRE_THROWS_AS(gpd_fit_from_json(bad_counts), data_error);
  nlohmann::json wrong_type = gpd_fit_to_json(sample_fit());
  wrong_type["xi"] = "heavy";
  REQUIRE_THROWS_AS(gpd_fit_from_json(wrong_type), data_error);
}

TEST_CASE("metadata echoes version, command, config, seed, and node scheme") {
  ojson config;
  config["alpha"] = {0.99, 0.995};
  config["rule"] = "trapezoid";
  auto meta = make_metadata("risk", config, 42);
  REQUIRE(meta["version"].get<std::string>() == version_string);
  REQUIRE(meta["command"] == "risk");
  REQUIRE(meta["config"]["rule"] == "trapezoid");
  REQUIRE(meta["seed"] == 42);
  REQUIRE(meta["node_scheme"].get<std::string>() == node_scheme_id);
  // deliberately no timestamps: identical runs emit identical bytes
  REQUIRE_FALSE(meta.contains("timestamp"));
  REQUIRE(meta.dump() == make_metadata("risk", config, 42).dump());
}

TEST_CASE("csv output carries commented metadata and exact cells") {
  csv_table t;
  t.columns = {"series", "alpha", "var"};
  t.rows = {{"corn", "0.99", "9.989"}, {"corn", "0.995", "11.875"}};
  ojson config;
  config["alpha"] = {0.99, 0.995};
  auto meta = make_metadata("risk", config, 7);

  std::ostringstream os;
  write_csv(os, t, meta);
  std::string expected =
      "# version: " + std::string(version_string) + "\n"
      "# command: risk\n"
      "# config: {\"alpha\":[0.99,0.995]}\n"
      "# seed: 7\n"
      "# node_scheme: " + std::string(node_scheme_id) + "\n"
      "series,alpha,var\n"
      "corn,0.99,9.989\n"
      "corn,0.995,11.875\n";
  REQUIRE(os.str() == expected);

  std::ostringstream again;
  write_csv(again, t, meta);
  REQUIRE(again.str() == os.str());
}

TEST_CASE("csv rows must match the header width") {
  csv_table t;
  t.columns = {"a", "b"};
  t.rows = {{"1", "2", "3"}};
  std::ostringstream os;
  REQUIRE_THROWS_AS(write_csv(os, t, ojson::object()), numeric_error);
}
