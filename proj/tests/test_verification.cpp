#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "dpp/verification.hpp"

using namespace dpp;

TEST_CASE("closed-form suite reproduces the analytic reference values") {
  const auto reports = run_closedform_suite();
  CHECK(reports.size() >= 4);
  for (const auto& r : reports) {
    INFO(r.name, " z=", r.z);
    CHECK(r.pass);
  }
}

TEST_CASE("bonferroni threshold") {
  // a single test keeps the base threshold
  CHECK(bonferroni_threshold(3.0, 1) == 3.0);
  // more simultaneous tests require a wider per-test threshold
  const double t10 = bonferroni_threshold(3.0, 10);
  CHECK(t10 > 3.0);
  // and the widened quantile splits the family tail budget evenly
  CHECK(std::erfc(t10 / std::sqrt(2.0)) * 10 ==
        doctest::Approx(std::erfc(3.0 / std::sqrt(2.0))));
}

TEST_CASE("integration by parts holds for trivial statistics") {
  auto k = make_bergman_kernel(0.5, 2);
  Rng rng(3);
  // constant F: the directional derivative vanishes identically
  TestFunctional constant_f(
      linear_outer(Eigen::VectorXd::Zero(1), 1.0),
      {polynomial_statistic(Polynomial(2, Eigen::MatrixXd::Zero(1, 1)))}, 64);
  std::vector<IbpTriple> triples;
  triples.push_back({"constant-f", constant_f,
                     fixtures::random_functional(k.domain(), rng, 64),
                     fixtures::random_supported_field(k.domain(), rng)});
  // zero vector field: both sides vanish identically
  triples.push_back({"zero-field",
                     fixtures::random_functional(k.domain(), rng, 64),
                     fixtures::random_functional(k.domain(), rng, 64),
                     constant_field(Point::Zero(2))});
  const auto reports = run_ibp_suite(k, triples, 2000, 11);
  REQUIRE(reports.size() == 2);
  // constant F: the left side is pointwise zero, the right side only in mean
  CHECK(reports[0].lhs.mean == 0.0);
  CHECK(reports[0].pass);
  // zero field: both sides vanish pointwise
  CHECK(reports[1].lhs.mean == 0.0);
  CHECK(reports[1].rhs.mean == 0.0);
  CHECK(reports[1].pass);
}

TEST_CASE("integration by parts holds for generic statistics") {
  auto k = make_bergman_kernel(0.5, 2);
  const auto reports =
      run_ibp_suite(k, default_ibp_triples(k, 3, 7), 20000, 7);
  for (const auto& r : reports) {
    INFO(r.name, " z=", r.z);
    CHECK(r.pass);
    CHECK(r.dropped_samples <= 20);
  }
}

TEST_CASE("quasi-invariance weights balance transported expectations") {
  auto k = make_bergman_kernel(0.5, 2);
  const auto reports =
      run_quasi_invariance_suite(k, default_quasi_cases(k, 3, 7), 20000, 7);
  CHECK(reports.size() == 3);
  for (const auto& r : reports) {
    INFO(r.name, " z=", r.z);
    CHECK(r.pass);
  }
}

TEST_CASE("dirichlet form matches the generator pairing") {
  auto k = make_bergman_kernel(0.5, 2);
  const auto reports =
      run_dirichlet_suite(k, default_dirichlet_pairs(k, 3, 7), 20000, 7);
  CHECK(reports.size() == 6);  // form identity + symmetry, per pair
  for (const auto& r : reports) {
    INFO(r.name, " z=", r.z);
    CHECK(r.pass);
  }
}

TEST_CASE("run_all drives suites from a json config") {
  const auto rep = run_all(R"({"suites":["closedform"],"seed":5})");
  CHECK(rep.exit_code == 0);
  CHECK(rep.pass);
  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["pass"] == true);
  REQUIRE(j.contains("reports"));
  REQUIRE(!j["reports"].empty());
  const auto& r0 = j["reports"][0];
  for (const char* key :
       {"suite", "identity", "lhs", "rhs", "z", "pass", "dropped"})
    CHECK(r0.contains(key));
  CHECK(r0["lhs"].contains("mean"));
  CHECK(r0["lhs"].contains("se"));
  CHECK(r0["lhs"].contains("n"));

  CHECK_THROWS_AS(run_all(R"({"suites":["no-such-suite"]})"), ParameterError);
  CHECK_THROWS_AS(run_all(R"({"kernel":{"type":"martian"}})"), ParameterError);
  CHECK_THROWS_AS(run_all("not json at all"), ParameterError);
  CHECK_THROWS_AS(run_all(R"({"n_samples":-4})"), ParameterError);
}

TEST_CASE("run_all with the domination suite") {
  const auto rep = run_all(R"({"suites":["domination"],"n_samples":20000})");
  REQUIRE(rep.reports.size() == 1);
  CHECK(rep.reports[0].suite == "domination");
  CHECK(rep.reports[0].pass);
  CHECK(rep.exit_code == 0);
}
