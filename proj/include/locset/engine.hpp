#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "locset/dataset.hpp"
#include "locset/datasource.hpp"
#include "locset/geo.hpp"
#include "locset/graph_cut.hpp"
#include "locset/logistic.hpp"
#include "locset/rng.hpp"
#include "locset/roc.hpp"
#include "locset/types.hpp"
#include "locset/util.hpp"

namespace locset {

struct ExpandBudget {
  std::size_t users_per_direction = 30;
  std::size_t neighbors_per_user = 5000;

  void validate() const {
    if (users_per_direction == 0 || neighbors_per_user == 0)
      throw ConfigError("budget: counts must be positive");
  }
};

struct EngineOptions {
  std::size_t recent_posts_depth = 200;
  std::size_t max_in_flight = 8;  // concurrent data-source fetches
  std::size_t max_retries = 2;    // per failed fetch, beyond the first try
  std::ostream* log = nullptr;    // optional progress/warning stream
};

enum class ProfileModelMode { fixed_odds, logistic };

struct StoppingRule {
  std::uint64_t max_iterations = 4;  // 0 means classify the seeds only
  std::optional<double> wall_clock_seconds;  // checked between iterations
};

struct IterationMetrics {
  std::uint64_t iteration = 0;
  std::size_t user_count = 0;
  std::size_t edge_count = 0;
  std::size_t labeled_in = 0;  // users labeled 1
  std::size_t truth_known = 0;
  std::size_t truth_inside = 0;
  std::size_t truth_outside = 0;
  std::optional<double> auc;       // absent when truth is single-class
  std::optional<double> chosen_c;  // logistic mode, when the fit succeeded
  bool fixed_odds_fallback = false;
  double energy = 0.0;
  double cut_value = 0.0;
};

struct RunConfig {
  std::vector<UserId> seed_ids;  // used when nonempty, else seed_query
  std::string seed_query;
  std::size_t seed_limit = 100;
  LocationSpec location;
  LinkEnergyParams link;
  ProfileModelMode mode = ProfileModelMode::fixed_odds;
  CategorizerConfig categorizer;  // fixed-odds model and logistic fallback
  FeatureSchema schema;           // logistic mode feature layout
  TrainConfig train;
  std::vector<double> c_grid = {0.01, 0.1, 1.0, 10.0};
  ExpandBudget budget;
  StoppingRule stopping;
  EngineOptions options;
  std::uint64_t rng_seed = 0;
};

struct RunResult {
  Snapshot snapshot;
  ClassificationResult classification;
  std::vector<IterationMetrics> history;
  std::optional<SavedModel> trained_model;  // last successful logistic fit
};

namespace detail {

inline void log_line(const EngineOptions& opts, const std::string& msg) {
  if (opts.log) *opts.log << msg << '\n';
}

// Runs fn up to 1 + max_retries times; returns nullopt (with the last error
// in *error_out) if every attempt throws.
template <class Fn>
auto try_fetch(Fn&& fn, std::size_t max_retries, std::string* error_out)
    -> std::optional<decltype(fn())> {
  for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
    try {
      return fn();
    } catch (const std::exception& e) {
      if (error_out) *error_out = e.what();
    }
  }
  return std::nullopt;
}

// Fetches recent posts for the given users concurrently, stores them on the
// snapshot and derives ground truth. A user whose fetch keeps failing gets
// an empty post list (so their truth stays unknown) and a log line.
inline void ingest_posts(Snapshot& snap, DataSource& source,
                         const std::vector<UserId>& ids,
                         const LocationSpec& where, const EngineOptions& opts) {
  struct Slot {
    std::vector<Post> posts;
    bool ok = false;
    std::string error;
  };
  std::vector<Slot> slots(ids.size());
  parallel_for(ids.size(), opts.max_in_flight, [&](std::size_t k) {
    auto r = try_fetch(
        [&] { return source.recent_posts(ids[k], opts.recent_posts_depth); },
        opts.max_retries, &slots[k].error);
    if (r.has_value()) {
      slots[k].posts = std::move(*r);
      slots[k].ok = true;
    }
  });
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (!slots[k].ok)
      log_line(opts, "warn: posts fetch failed for user " +
                         std::to_string(ids[k]) + ": " + slots[k].error);
    GroundTruth g = label_ground_truth(slots[k].posts, where);
    snap.posts[ids[k]] = std::move(slots[k].posts);
    if (g != GroundTruth::unknown) snap.ground_truth[ids[k]] = g;
  }
}

}  // namespace detail

// One crawl round: sample two batches of in-location users, pull follower
// lists for the first and friend lists for the second, then fold every
// discovered user and edge into the snapshot. Individual fetch failures are
// logged and skipped. When nothing is labeled yet the seed set is the
// sampling pool.
inline void expand_step(Snapshot& snap, DataSource& source,
                        const ExpandBudget& budget, Rng& rng,
                        const LocationSpec& where,
                        const EngineOptions& opts = {}) {
  budget.validate();

  std::vector<UserId> pool;
  for (const auto& u : snap.users) {
    auto it = snap.labels.find(u.id);
    if (it != snap.labels.end() && it->second == 1) pool.push_back(u.id);
  }
  if (pool.empty()) pool = snap.seeds;
  if (pool.empty())
    throw DataError("expand_step: no labeled users and no seeds to expand");

  std::vector<UserId> follower_batch = rng.sample(pool, budget.users_per_direction);
  std::vector<UserId> friend_batch = rng.sample(pool, budget.users_per_direction);

  struct Fetch {
    UserId id = 0;
    bool follower_side = false;
    std::vector<UserId> neighbors;
    bool ok = false;
    std::string error;
  };
  std::vector<Fetch> fetches;
  fetches.reserve(follower_batch.size() + friend_batch.size());
  for (UserId id : follower_batch) fetches.push_back({id, true, {}, false, {}});
  for (UserId id : friend_batch) fetches.push_back({id, false, {}, false, {}});

  parallel_for(fetches.size(), opts.max_in_flight, [&](std::size_t k) {
    Fetch& f = fetches[k];
    auto r = detail::try_fetch(
        [&] {
          return f.follower_side
                     ? source.followers(f.id, budget.neighbors_per_user)
                     : source.friends(f.id, budget.neighbors_per_user);
        },
        opts.max_retries, &f.error);
    if (r.has_value()) {
      f.neighbors = std::move(*r);
      f.ok = true;
    }
  });

  // Directed edges in deterministic (batch, list) order.
  std::vector<std::pair<UserId, UserId>> found;  // (follower, friend)
  for (const Fetch& f : fetches) {
    if (!f.ok) {
      detail::log_line(opts, "warn: neighbor fetch failed for user " +
                                 std::to_string(f.id) + ": " + f.error);
      continue;
    }
    for (UserId n : f.neighbors) {
      if (n == f.id) continue;  // defensive: self-follows carry no energy
      if (f.follower_side)
        found.emplace_back(n, f.id);
      else
        found.emplace_back(f.id, n);
    }
  }

  std::vector<UserId> new_ids;
  std::unordered_set<UserId> seen;
  for (auto [a, b] : found) {
    for (UserId id : {a, b})
      if (!snap.has_user(id) && seen.insert(id).second) new_ids.push_back(id);
  }

  std::vector<UserProfile> fetched_profiles;
  if (!new_ids.empty()) {
    std::string err;
    auto r = detail::try_fetch([&] { return source.profiles(new_ids); },
                               opts.max_retries, &err);
    if (r.has_value()) {
      fetched_profiles = std::move(*r);
    } else {
      detail::log_line(opts,
                       "warn: profile fetch failed, skipping " +
                           std::to_string(new_ids.size()) +
                           " new users this iteration: " + err);
    }
  }

  std::vector<UserId> added;
  added.reserve(fetched_profiles.size());
  for (auto& p : fetched_profiles) {
    if (snap.has_user(p.id)) continue;  // defensive against source dup
    UserId id = p.id;
    snap.add_user(std::move(p));
    added.push_back(id);
  }
  detail::ingest_posts(snap, source, added, where, opts);

  for (auto [a, b] : found) {
    const UserProfile* ua = snap.find_user(a);
    const UserProfile* ub = snap.find_user(b);
    if (!ua || !ub) continue;  // endpoint's profile never arrived
    RelationshipEdge e;
    e.follower = a;
    e.friend_id = b;
    e.z1 = ua->friends_count;
    e.z2 = ub->followers_count;
    snap.add_edge(e);
  }

  snap.iteration += 1;
  snap.rng_state = rng.state();
}

namespace detail {

struct ClassifyOutcome {
  ClassificationResult result;
  IterationMetrics metrics;
  std::optional<SavedModel> fitted;
};

// Builds the profile model for the current snapshot (fitting the logistic
// model on ground-truth users when asked and possible), runs the exact
// labeling, and collects the iteration metrics.
inline ClassifyOutcome classify_step(Snapshot& snap, const RunConfig& cfg) {
  ClassifyOutcome out;
  ProfileEnergyModel model = FixedOddsModel{cfg.categorizer};

  if (cfg.mode == ProfileModelMode::logistic) {
    TrainingSet data{{}, {}, cfg.schema};
    for (const auto& u : snap.users) {
      GroundTruth g = snap.truth_of(u.id);
      if (g == GroundTruth::unknown) continue;
      data.x.push_back(extract_features(u, cfg.schema));
      data.y.push_back(g == GroundTruth::inside ? 1 : 0);
    }
    try {
      ValidationResult vr = fit_with_validation(data, cfg.c_grid, cfg.train);
      out.metrics.chosen_c = vr.chosen_c;
      out.fitted = SavedModel{vr.model, vr.chosen_c, cfg.train.penalty};
      model = vr.model;
    } catch (const TrainingError& e) {
      out.metrics.fixed_odds_fallback = true;
      log_line(cfg.options, "warn: iteration " +
                                std::to_string(snap.iteration) +
                                ": logistic fit unavailable (" + e.what() +
                                "); using fixed-odds profile model");
    }
  }

  out.result = classify(snap, model, cfg.link);
  snap.labels = out.result.labels;

  IterationMetrics& m = out.metrics;
  m.iteration = snap.iteration;
  m.user_count = snap.users.size();
  m.edge_count = snap.edges.size();
  m.energy = out.result.energy;
  m.cut_value = out.result.cut_value;
  for (const auto& [id, l] : snap.labels)
    if (l == 1) ++m.labeled_in;
  std::vector<std::pair<double, int>> scored;
  for (const auto& u : snap.users) {
    GroundTruth g = snap.truth_of(u.id);
    if (g == GroundTruth::unknown) continue;
    ++m.truth_known;
    int y = g == GroundTruth::inside ? 1 : 0;
    (y == 1 ? m.truth_inside : m.truth_outside)++;
    scored.emplace_back(out.result.membership_probability.at(u.id), y);
  }
  if (m.truth_inside > 0 && m.truth_outside > 0)
    m.auc = roc_auc(std::move(scored)).auc;
  return out;
}

}  // namespace detail

// The full expand-classify loop: resolve seeds, classify them, then
// alternate crawling and relabeling until the stopping rule fires.
// Deterministic for a deterministic data source and fixed seeds.
inline RunResult run(DataSource& source, const RunConfig& cfg) {
  cfg.location.validate();
  cfg.link.validate();
  cfg.budget.validate();
  cfg.categorizer.validate();
  auto start = std::chrono::steady_clock::now();

  Rng rng(cfg.rng_seed);
  RunResult rr;
  Snapshot& snap = rr.snapshot;

  std::vector<UserProfile> seed_profiles;
  std::string err;
  if (!cfg.seed_ids.empty()) {
    auto r = detail::try_fetch([&] { return source.profiles(cfg.seed_ids); },
                               cfg.options.max_retries, &err);
    if (!r.has_value())
      throw DataError("seed profile fetch failed: " + err);
    seed_profiles = std::move(*r);
  } else if (!cfg.seed_query.empty()) {
    auto r = detail::try_fetch(
        [&] {
          return source.user_search(cfg.seed_query,
                                    std::min(cfg.seed_limit, kMaxSearchResults));
        },
        cfg.options.max_retries, &err);
    if (!r.has_value()) throw DataError("seed search failed: " + err);
    seed_profiles = std::move(*r);
  } else {
    throw ConfigError("run: need seed_ids or seed_query");
  }
  if (seed_profiles.empty())
    throw DataError("run: seed resolution produced no users");

  for (auto& p : seed_profiles) {
    if (snap.has_user(p.id)) continue;
    UserId id = p.id;
    snap.add_user(std::move(p));
    snap.seeds.push_back(id);
  }
  detail::ingest_posts(snap, source, snap.seeds, cfg.location, cfg.options);
  snap.rng_state = rng.state();

  detail::ClassifyOutcome step = detail::classify_step(snap, cfg);
  rr.history.push_back(step.metrics);
  rr.classification = std::move(step.result);
  if (step.fitted.has_value()) rr.trained_model = std::move(step.fitted);

  for (std::uint64_t it = 1; it <= cfg.stopping.max_iterations; ++it) {
    if (cfg.stopping.wall_clock_seconds.has_value()) {
      double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      if (elapsed > *cfg.stopping.wall_clock_seconds) {
        detail::log_line(cfg.options,
                         "info: wall-clock budget reached, stopping before "
                         "iteration " +
                             std::to_string(it));
        break;
      }
    }
    expand_step(snap, source, cfg.budget, rng, cfg.location, cfg.options);
    step = detail::classify_step(snap, cfg);
    rr.history.push_back(step.metrics);
    rr.classification = std::move(step.result);
    if (step.fitted.has_value()) rr.trained_model = std::move(step.fitted);
  }
  return rr;
}

}  // namespace locset
