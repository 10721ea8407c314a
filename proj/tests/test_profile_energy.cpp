#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "locset/logistic.hpp"
#include "locset/profile_energy.hpp"
#include "locset/rng.hpp"
#include "support.hpp"

using namespace locset;

TEST_CASE("category odds translate to the expected log-odds deltas") {
  auto odds = default_category_odds();
  CHECK(fixed_odds_delta(Category::A, odds) == std::log(50.0));
  CHECK(fixed_odds_delta(Category::B, odds) == std::log(1.0 / 25.0));
  CHECK(fixed_odds_delta(Category::C, odds) == std::log(0.5));
  CHECK(fixed_odds_delta(Category::D, odds) == std::log(0.2));
  CHECK(fixed_odds_delta(Category::E, odds) == std::log(1.0 / 8.0));

  // Pinned decimal values, evaluated independently.
  CHECK(fixed_odds_delta(Category::A, odds) ==
        Catch::Approx(3.912023005428146).margin(1e-12));
  CHECK(fixed_odds_delta(Category::B, odds) ==
        Catch::Approx(-3.2188758248682006).margin(1e-12));
  CHECK(fixed_odds_delta(Category::C, odds) ==
        Catch::Approx(-0.6931471805599453).margin(1e-12));
  CHECK(fixed_odds_delta(Category::D, odds) ==
        Catch::Approx(-1.6094379124341003).margin(1e-12));
  CHECK(fixed_odds_delta(Category::E, odds) ==
        Catch::Approx(-2.0794415416798357).margin(1e-12));
}

TEST_CASE("odds lookups reject missing or degenerate entries") {
  std::map<Category, std::pair<double, double>> odds;
  CHECK_THROWS_AS(fixed_odds_delta(Category::A, odds), ConfigError);
  odds[Category::A] = {0.0, 1.0};
  CHECK_THROWS_AS(fixed_odds_delta(Category::A, odds), ConfigError);
  odds[Category::A] = {50.0, -1.0};
  CHECK_THROWS_AS(fixed_odds_delta(Category::A, odds), ConfigError);
}

TEST_CASE("fixed-odds model routes a profile through its category") {
  FixedOddsModel model{ts::test_categorizer()};
  auto strong = ts::user(1);
  strong.location_text = "Corinto, Colombia";
  CHECK(profile_energy_delta(strong, ProfileEnergyModel{model}) ==
        std::log(50.0));

  auto empty_loc = ts::user(2);
  CHECK(profile_energy_delta(empty_loc, ProfileEnergyModel{model}) ==
        std::log(0.2));
}

TEST_CASE("linear model delta is the sum of active coefficients") {
  FeatureSchema schema({"corinto"}, {}, "es", std::nullopt);
  REQUIRE(schema.size() == 13);
  LinearModel model;
  model.schema = schema;
  model.beta.assign(schema.size(), 0.0);
  model.beta[0] = 1.25;   // corinto in location
  model.beta[8] = -0.5;   // empty location flag
  model.beta[9] = 2.0;    // language match

  auto u = ts::user(3);
  u.location_text = "CORINTO cauca";
  u.language_code = "ES";
  ProfileFeatures f = extract_features(u, schema);
  CHECK(profile_energy_delta(f, model) == Catch::Approx(3.25).margin(1e-12));
  CHECK(profile_energy_delta(u, ProfileEnergyModel{model}) ==
        Catch::Approx(3.25).margin(1e-12));
}

TEST_CASE("linear model delta is the logit of its predicted probability") {
  FeatureSchema schema({"corinto"}, {}, "es", std::nullopt);
  Rng rng(21);
  LinearModel model;
  model.schema = schema;
  model.beta.resize(schema.size());
  for (auto& b : model.beta) b = rng.uniform(-2.0, 2.0);

  for (int trial = 0; trial < 40; ++trial) {
    ProfileFeatures f(schema.size());
    for (auto& v : f) v = rng.bernoulli(0.4) ? 1 : 0;
    double delta = profile_energy_delta(f, model);
    double p = predict_proba(model.beta, f);
    CHECK(std::log(p / (1.0 - p)) == Catch::Approx(delta).margin(1e-9));
  }
}

TEST_CASE("linear model rejects mismatched feature vectors") {
  FeatureSchema schema({"corinto"}, {}, "", std::nullopt);
  LinearModel model;
  model.schema = schema;
  model.beta.assign(schema.size(), 0.1);
  ProfileFeatures wrong(schema.size() + 1, 0);
  CHECK_THROWS_AS(profile_energy_delta(wrong, model), DimensionError);
}

TEST_CASE("pinned model returns stored deltas and flags unknown users") {
  PinnedDeltaModel model;
  model.delta_by_user[7] = -1.5;
  auto u = ts::user(7);
  CHECK(profile_energy_delta(u, ProfileEnergyModel{model}) == -1.5);
  auto other = ts::user(8);
  CHECK_THROWS_AS(profile_energy_delta(other, ProfileEnergyModel{model}),
                  DataError);
}

TEST_CASE("unary energies keep the delta difference and stay non-negative") {
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    double d = rng.uniform(-10.0, 10.0);
    double member = phi_member(d);
    double nonmember = phi_nonmember(d);
    CHECK(member >= 0.0);
    CHECK(nonmember >= 0.0);
    // Exactly one side carries the cost, and the gap is the log-odds.
    CHECK(std::min(member, nonmember) == 0.0);
    CHECK(nonmember - member == Catch::Approx(d).margin(1e-12));
  }
  CHECK(phi_member(0.0) == 0.0);
  CHECK(phi_nonmember(0.0) == 0.0);
  CHECK(phi_member(2.5) == 0.0);
  CHECK(phi_nonmember(2.5) == 2.5);
  CHECK(phi_member(-1.25) == 1.25);
  CHECK(phi_nonmember(-1.25) == 0.0);
}
