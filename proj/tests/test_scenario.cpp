#include "doctest.h"

#include <cmath>

#include "cda/scenario.hpp"

using namespace cda;

namespace {

bool has_term(const BasisSpec& b, const std::string& col, int power = 1) {
  for (const auto& t : b.terms)
    if (t.column == col && t.power == power) return true;
  return false;
}

bool has_cross(const BasisSpec& b, const std::string& a, const std::string& c) {
  for (const auto& ix : b.interactions)
    if ((ix.a == a && ix.b == c) || (ix.a == c && ix.b == a)) return true;
  return false;
}

}  // namespace

TEST_CASE("nuisance tiers shape the designs as documented") {
  Dataset d = dgm_generate(500, DgmArm::observed, 70);
  SlotLevels correct;
  correct.all = SpecLevel::correct;
  EstimatorConfig cc = benchmark_config(d, correct, false);
  CHECK(has_term(cc.mu1, "Az2", 2));
  CHECK(has_term(cc.mu1, "Ay2", 2));
  CHECK(has_cross(cc.mu1, "Z", "Az2"));
  CHECK(!has_cross(cc.mu1, "Z", "N1"));
  CHECK(!has_cross(cc.eobd, "Z", "Az2"));  // linear estimator stays linear in Z

  SlotLevels flex;
  flex.all = SpecLevel::flexible;
  EstimatorConfig cf = benchmark_config(d, flex, false);
  CHECK(has_cross(cf.mu1, "Z", "N1"));
  CHECK(has_cross(cf.mu1, "Az2", "N2"));

  SlotLevels wrong;
  wrong.all = SpecLevel::incorrect;
  EstimatorConfig cw = benchmark_config(d, wrong, false);
  CHECK(!has_term(cw.mu1, "Ay1"));
  CHECK(!has_term(cw.mu1, "Az1"));
  CHECK(!has_term(cw.mu1, "N2"));
  CHECK(!has_term(cw.mu1, "Az2", 2));
  CHECK(cw.mu1.interactions.empty());
}

TEST_CASE("slot overrides corrupt one avenue at a time") {
  Dataset d = dgm_generate(500, DgmArm::observed, 71);
  SlotLevels lv;
  lv.all = SpecLevel::flexible;
  lv.nu = SpecLevel::incorrect;
  EstimatorConfig c = benchmark_config(d, lv, false);
  CHECK(!has_term(c.nu1, "N2"));
  CHECK(has_term(c.mu1, "N2"));
  CHECK(has_term(c.zeta1, "Az1"));

  lv = SlotLevels{};
  lv.all = SpecLevel::flexible;
  lv.w_01 = SpecLevel::incorrect;
  c = benchmark_config(d, lv, false);
  CHECK(!has_term(c.w01_num, "Az1"));
  CHECK(has_term(c.g_azay, "Az1"));  // zn-side membership untouched
}

TEST_CASE("gate handling is wired through weights, samples, and densities") {
  Dataset d = dgm_generate(500, DgmArm::observed, 72);
  SlotLevels lv;
  EstimatorConfig c = benchmark_config(d, lv, true);
  CHECK(c.weight_opts.gate_col == "Az2");
  CHECK(c.sample_opts.gate_threshold == 140.0);
  CHECK(c.lambda0z[0].gate_col == "Az2");
  CHECK(c.pz_full1[0].gate_col == "Az2");
  EstimatorConfig off = benchmark_config(d, lv, false);
  CHECK(off.weight_opts.gate_col.empty());
  CHECK(off.lambda0z[0].gate_col.empty());
}

TEST_CASE("estimator names parse back to themselves") {
  for (EstimatorId id : all_estimators())
    CHECK(parse_estimator(estimator_name(id)) == id);
  CHECK(parse_estimator("n_bridge_wse") == EstimatorId::n_bridge_wse);
  CHECK_THROWS_AS(parse_estimator("nonesuch"), ValidationError);
  CHECK_THROWS_AS(parse_spec_level("sloppy"), ValidationError);
}

TEST_CASE("zero replicates yield empty metrics") {
  ScenarioSpec sc;
  sc.reps = 0;
  CHECK(run_scenario(sc).empty());
}

TEST_CASE("small scenario runs are deterministic and thread-invariant") {
  ScenarioSpec sc;
  sc.n = 400;
  sc.reps = 4;
  sc.bootstrap_b = 8;
  sc.seed = 99;
  sc.gate_handling = false;
  sc.truth = 160.0;
  sc.estimators = {EstimatorId::n_bridge_wse, EstimatorId::z_model_pw};
  auto a = run_scenario(sc);
  auto b = run_scenario(sc);
  sc.threads = 2;
  auto c = run_scenario(sc);
  REQUIRE(a.size() == 2);
  for (std::size_t j = 0; j < a.size(); ++j) {
    CHECK(a[j].bias == b[j].bias);
    CHECK(a[j].bias == c[j].bias);
    CHECK(a[j].se == c[j].se);
    CHECK(a[j].coverage == c[j].coverage);
    CHECK(a[j].rmse ==
          doctest::Approx(std::sqrt(a[j].bias * a[j].bias + a[j].se * a[j].se))
              .epsilon(1e-12));
  }
}
