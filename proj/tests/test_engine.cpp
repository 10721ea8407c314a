#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "locset/engine.hpp"
#include "locset/synthnet.hpp"
#include "support.hpp"

using namespace locset;

namespace {

const LocationSpec kWhere{"corinto", {3.174159, -76.2588}, 7.0};

// Two labeled users (1, 2) plus a scripted neighborhood around them.
struct ScriptedWorld {
  ts::ScriptedSource source;
  Snapshot snap;

  ScriptedWorld() {
    for (UserId id = 1; id <= 6; ++id) {
      auto u = ts::user(id);
      u.friends_count = 10 * id;
      u.followers_count = 100 * id;
      source.add(u);
    }
    source.followers_map[1] = {3, 4};
    source.friends_map[1] = {5};
    source.followers_map[2] = {3};
    source.friends_map[2] = {6};
    Post p;
    p.text = "aqui";
    p.geo = GeoPoint{3.174159, -76.2588};
    p.timestamp = "2017-05-20T10:00:00Z";
    source.posts_map[3] = {p};

    snap.add_user(source.profile_map.at(1));
    snap.add_user(source.profile_map.at(2));
    snap.labels = {{1, 1}, {2, 1}};
    snap.seeds = {1, 2};
  }
};

RunConfig base_run_config() {
  RunConfig cfg;
  cfg.location = kWhere;
  cfg.categorizer = ts::test_categorizer();
  cfg.seed_query = "corinto";
  cfg.stopping.max_iterations = 2;
  return cfg;
}

SynthConfig engine_world_config() {
  SynthConfig cfg;
  cfg.n_in = 60;
  cfg.n_out = 300;
  cfg.p_in = 0.08;
  cfg.p_out = 0.004;
  cfg.term_tp = 0.6;
  cfg.term_fp = 0.05;
  cfg.geo_rate_in = 0.8;
  cfg.geo_rate_out = 0.6;
  cfg.noise_flip = 0.02;
  cfg.hub_count = 1;
  cfg.hub_degree = 40;
  cfg.seed = 23;
  cfg.location_terms = {"corinto", "cauca"};
  cfg.world_cities = {"bogota", "medellin"};
  return cfg;
}

}  // namespace

TEST_CASE("one expansion adds the scripted users and edges") {
  ScriptedWorld w;
  Rng rng(1);
  ExpandBudget budget;
  expand_step(w.snap, w.source, budget, rng, kWhere);

  CHECK(w.snap.users.size() == 6);
  for (UserId id = 3; id <= 6; ++id) CHECK(w.snap.has_user(id));
  CHECK(w.snap.iteration == 1);
  CHECK(!w.snap.rng_state.empty());

  // (follower, friend) pairs with degree annotations from the profiles.
  CHECK(w.snap.edges.size() == 5);
  CHECK(w.snap.edge_keys.count({3, 1}) == 1);
  CHECK(w.snap.edge_keys.count({4, 1}) == 1);
  CHECK(w.snap.edge_keys.count({1, 5}) == 1);
  CHECK(w.snap.edge_keys.count({3, 2}) == 1);
  CHECK(w.snap.edge_keys.count({2, 6}) == 1);
  for (const auto& e : w.snap.edges) {
    CHECK(e.z1 == w.snap.find_user(e.follower)->friends_count);
    CHECK(e.z2 == w.snap.find_user(e.friend_id)->followers_count);
  }

  // Posts were fetched once per new user; user 3's geo post sets its truth.
  CHECK(w.snap.truth_of(3) == GroundTruth::inside);
  CHECK(w.snap.truth_of(4) == GroundTruth::unknown);
  REQUIRE(w.snap.posts_of(4) != nullptr);
  CHECK(w.snap.posts_of(4)->empty());
  CHECK_NOTHROW(w.snap.validate());

  // A second expansion from the same pool changes nothing new.
  expand_step(w.snap, w.source, budget, rng, kWhere);
  CHECK(w.snap.users.size() == 6);
  CHECK(w.snap.edges.size() == 5);
  CHECK(w.snap.iteration == 2);
}

TEST_CASE("the per-iteration fetch budget is respected") {
  ScriptedWorld w;
  // Ten labeled users so the batch sampler has real work.
  for (UserId id = 7; id <= 14; ++id) {
    auto u = ts::user(id);
    w.source.add(u);
    w.snap.add_user(u);
    w.snap.labels[id] = 1;
  }
  Rng rng(2);
  ExpandBudget budget;
  budget.users_per_direction = 3;
  budget.neighbors_per_user = 2;
  expand_step(w.snap, w.source, budget, rng, kWhere);

  CHECK(w.source.total_neighbor_calls() == 6);  // 3 follower + 3 friend
  for (std::size_t limit : w.source.neighbor_limits)
    CHECK(limit == 2);
  // Neighbor lists were truncated at the budget: user 1 has two followers
  // plus one friend, so even if it was drawn twice nothing exceeds 2.
  for (const auto& [id, calls] : w.source.followers_calls) CHECK(calls == 1);
  for (const auto& [id, calls] : w.source.friends_calls) CHECK(calls == 1);
}

TEST_CASE("a batch smaller than the budget takes the whole pool") {
  ScriptedWorld w;
  Rng rng(3);
  ExpandBudget budget;  // 30 per direction, pool of 2
  expand_step(w.snap, w.source, budget, rng, kWhere);
  CHECK(w.source.followers_calls[1] == 1);
  CHECK(w.source.followers_calls[2] == 1);
  CHECK(w.source.friends_calls[1] == 1);
  CHECK(w.source.friends_calls[2] == 1);
  CHECK(w.source.total_neighbor_calls() == 4);
}

TEST_CASE("failing neighbor fetches are retried, then skipped") {
  ScriptedWorld w;
  w.source.fail_followers.insert(1);
  std::ostringstream log;
  EngineOptions opts;
  opts.log = &log;
  Rng rng(4);
  expand_step(w.snap, w.source, ExpandBudget{}, rng, kWhere, opts);

  // One initial try plus two retries, then the crawl moved on.
  CHECK(w.source.followers_calls[1] == 3);
  CHECK(log.str().find("neighbor fetch failed for user 1") !=
        std::string::npos);
  // User 1's follower edges are missing; everything else arrived.
  CHECK(w.snap.edge_keys.count({3, 1}) == 0);
  CHECK(w.snap.edge_keys.count({4, 1}) == 0);
  CHECK(w.snap.edge_keys.count({1, 5}) == 1);
  CHECK(w.snap.edge_keys.count({3, 2}) == 1);
  CHECK(w.snap.has_user(3));   // still found through user 2
  CHECK(!w.snap.has_user(4));  // only reachable through the failed call
}

TEST_CASE("a user whose posts cannot be fetched still joins, unlabeled") {
  ScriptedWorld w;
  w.source.fail_posts.insert(3);
  std::ostringstream log;
  EngineOptions opts;
  opts.log = &log;
  Rng rng(5);
  expand_step(w.snap, w.source, ExpandBudget{}, rng, kWhere, opts);

  CHECK(w.source.posts_calls[3] == 3);
  CHECK(w.snap.has_user(3));
  CHECK(w.snap.truth_of(3) == GroundTruth::unknown);
  REQUIRE(w.snap.posts_of(3) != nullptr);
  CHECK(w.snap.posts_of(3)->empty());
  CHECK(log.str().find("posts fetch failed for user 3") != std::string::npos);
}

TEST_CASE("neighbors without profiles are dropped with their edges") {
  ScriptedWorld w;
  w.source.followers_map[1] = {3, 999};  // 999 has no profile anywhere
  Rng rng(6);
  expand_step(w.snap, w.source, ExpandBudget{}, rng, kWhere);
  CHECK(!w.snap.has_user(999));
  CHECK(w.snap.edge_keys.count({999, 1}) == 0);
  CHECK(w.snap.edge_keys.count({3, 1}) == 1);
  CHECK_NOTHROW(w.snap.validate());
}

TEST_CASE("ground truth is fetched once and never rewritten") {
  ScriptedWorld w;
  Rng rng(7);
  expand_step(w.snap, w.source, ExpandBudget{}, rng, kWhere);
  REQUIRE(w.snap.truth_of(3) == GroundTruth::inside);

  // The remote account moves; the crawl must keep its original evidence.
  Post far;
  far.text = "moved";
  far.geo = GeoPoint{40.7, -74.0};
  far.timestamp = "2017-06-01T00:00:00Z";
  w.source.posts_map[3] = {far};
  expand_step(w.snap, w.source, ExpandBudget{}, rng, kWhere);
  CHECK(w.snap.truth_of(3) == GroundTruth::inside);
  CHECK(w.source.posts_calls[3] == 1);
}

TEST_CASE("expansion without labels or seeds is an error") {
  Snapshot empty;
  ts::ScriptedSource source;
  Rng rng(8);
  CHECK_THROWS_AS(expand_step(empty, source, ExpandBudget{}, rng, kWhere),
                  DataError);
}

TEST_CASE("an unlabeled snapshot expands from its seeds") {
  ScriptedWorld w;
  w.snap.labels.clear();
  Rng rng(9);
  expand_step(w.snap, w.source, ExpandBudget{}, rng, kWhere);
  CHECK(w.snap.users.size() == 6);
}

TEST_CASE("budget validation rejects zeros") {
  ExpandBudget b;
  b.users_per_direction = 0;
  CHECK_THROWS_AS(b.validate(), ConfigError);
  b = ExpandBudget{};
  b.neighbors_per_user = 0;
  CHECK_THROWS_AS(b.validate(), ConfigError);
}

TEST_CASE("a full crawl grows the snapshot and the member set") {
  SynthWorld world = generate(engine_world_config(), kWhere);
  SynthDataSource source = as_data_source(world);
  RunConfig cfg = base_run_config();
  cfg.stopping.max_iterations = 3;

  RunResult rr = run(source, cfg);
  REQUIRE(rr.history.size() == 4);  // seeds plus three expansions
  CHECK(rr.snapshot.iteration == 3);
  for (std::size_t i = 1; i < rr.history.size(); ++i) {
    CHECK(rr.history[i].iteration == i);
    CHECK(rr.history[i].user_count >= rr.history[i - 1].user_count);
    CHECK(rr.history[i].edge_count >= rr.history[i - 1].edge_count);
  }
  CHECK(rr.history.back().labeled_in > 0);
  CHECK(rr.history.back().user_count > rr.history.front().user_count);
  CHECK(rr.history.back().auc.has_value());
  CHECK(*rr.history.back().auc > 0.6);
  CHECK(rr.classification.labels.size() == rr.snapshot.users.size());
  CHECK_NOTHROW(rr.snapshot.validate());

  // Every discovered edge references known users with matching annotations.
  for (const auto& e : rr.snapshot.edges) {
    REQUIRE(rr.snapshot.has_user(e.follower));
    REQUIRE(rr.snapshot.has_user(e.friend_id));
  }
}

TEST_CASE("identical seeds reproduce the crawl exactly") {
  SynthWorld world = generate(engine_world_config(), kWhere);
  SynthDataSource s1 = as_data_source(world);
  SynthDataSource s2 = as_data_source(world);
  RunConfig cfg = base_run_config();

  RunResult a = run(s1, cfg);
  RunResult b = run(s2, cfg);
  CHECK(a.snapshot == b.snapshot);
  CHECK(a.classification.labels == b.classification.labels);
  CHECK(a.classification.energy == b.classification.energy);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].user_count == b.history[i].user_count);
    CHECK(a.history[i].edge_count == b.history[i].edge_count);
    CHECK(a.history[i].labeled_in == b.history[i].labeled_in);
    CHECK(a.history[i].auc == b.history[i].auc);
  }

  RunConfig other = cfg;
  other.rng_seed = 99;
  SynthDataSource s3 = as_data_source(world);
  RunResult c = run(s3, other);  // a different crawl path is expected
  CHECK((c.snapshot.users.size() != a.snapshot.users.size() ||
         !(c.snapshot == a.snapshot)));
}

TEST_CASE("zero iterations classifies only the seeds") {
  SynthWorld world = generate(engine_world_config(), kWhere);
  SynthDataSource source = as_data_source(world);
  RunConfig cfg = base_run_config();
  cfg.stopping.max_iterations = 0;
  RunResult rr = run(source, cfg);
  CHECK(rr.history.size() == 1);
  CHECK(rr.snapshot.iteration == 0);
  CHECK(rr.snapshot.users.size() == rr.snapshot.seeds.size());
}

TEST_CASE("an exhausted wall clock stops before the first expansion") {
  SynthWorld world = generate(engine_world_config(), kWhere);
  SynthDataSource source = as_data_source(world);
  RunConfig cfg = base_run_config();
  cfg.stopping.wall_clock_seconds = 0.0;
  std::ostringstream log;
  cfg.options.log = &log;
  RunResult rr = run(source, cfg);
  CHECK(rr.history.size() == 1);
  CHECK(rr.snapshot.iteration == 0);
  CHECK(log.str().find("wall-clock budget reached") != std::string::npos);
}

TEST_CASE("seed resolution failures are reported by kind") {
  SynthWorld world = generate(engine_world_config(), kWhere);
  SynthDataSource source = as_data_source(world);

  RunConfig cfg = base_run_config();
  cfg.seed_query = "";
  CHECK_THROWS_AS(run(source, cfg), ConfigError);

  cfg.seed_query = "zzz no such text anywhere";
  CHECK_THROWS_AS(run(source, cfg), DataError);

  cfg.seed_query = "";
  cfg.seed_ids = {123456789};  // unknown id resolves to nothing
  CHECK_THROWS_AS(run(source, cfg), DataError);
}

TEST_CASE("explicit seed ids are honored in order") {
  SynthWorld world = generate(engine_world_config(), kWhere);
  SynthDataSource source = as_data_source(world);
  RunConfig cfg = base_run_config();
  cfg.seed_query = "";
  cfg.seed_ids = {5, 1, 700};  // 700 does not exist
  cfg.stopping.max_iterations = 0;
  RunResult rr = run(source, cfg);
  CHECK(rr.snapshot.seeds == std::vector<UserId>{5, 1});
}

TEST_CASE("logistic mode trains a model once truth accumulates") {
  SynthConfig wc = engine_world_config();
  wc.language = "es";
  wc.language_rate_in = 0.9;
  wc.language_rate_out = 0.3;
  SynthWorld world = generate(wc, kWhere);
  SynthDataSource source = as_data_source(world);

  RunConfig cfg = base_run_config();
  cfg.mode = ProfileModelMode::logistic;
  cfg.schema = FeatureSchema({"corinto", "cauca"}, {}, "es", std::nullopt);
  cfg.c_grid = {0.1, 1.0};
  cfg.stopping.max_iterations = 2;

  RunResult rr = run(source, cfg);
  REQUIRE(rr.trained_model.has_value());
  CHECK(rr.trained_model->model.schema == cfg.schema);
  CHECK(rr.trained_model->model.beta.size() == cfg.schema.size());
  CHECK(!rr.history.back().fixed_odds_fallback);
  REQUIRE(rr.history.back().chosen_c.has_value());
  CHECK((*rr.history.back().chosen_c == 0.1 ||
         *rr.history.back().chosen_c == 1.0));
  CHECK(rr.history.back().auc.has_value());
}

TEST_CASE("single-class truth falls back to fixed odds") {
  SynthConfig wc = engine_world_config();
  wc.geo_rate_in = 1.0;
  wc.geo_rate_out = 0.0;  // nobody outside ever posts with location
  wc.noise_flip = 0.0;
  SynthWorld world = generate(wc, kWhere);
  SynthDataSource source = as_data_source(world);

  RunConfig cfg = base_run_config();
  cfg.mode = ProfileModelMode::logistic;
  cfg.schema = FeatureSchema({"corinto"}, {}, "", std::nullopt);
  cfg.stopping.max_iterations = 1;
  std::ostringstream log;
  cfg.options.log = &log;

  RunResult rr = run(source, cfg);
  for (const auto& m : rr.history) {
    CHECK(m.fixed_odds_fallback);
    CHECK(!m.chosen_c.has_value());
    CHECK(!m.auc.has_value());  // single-class truth has no curve
  }
  CHECK(!rr.trained_model.has_value());
  CHECK(log.str().find("logistic fit unavailable") != std::string::npos);
}
