#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "locset/engine.hpp"
#include "locset/features.hpp"
#include "locset/geo.hpp"
#include "locset/link_energy.hpp"
#include "locset/logistic.hpp"
#include "locset/synthnet.hpp"
#include "locset/types.hpp"

namespace locset {

// One JSON file drives every subcommand. Unknown keys are rejected at the
// top level so typos fail loudly instead of silently using defaults.
// world_cities_file resolves relative to the config file's directory.
struct AppConfig {
  LocationSpec location;
  LinkEnergyParams link;
  ProfileModelMode mode = ProfileModelMode::fixed_odds;
  FeatureSchema schema;
  CategorizerConfig categorizer;
  TrainConfig train;
  std::vector<double> c_grid = {0.01, 0.1, 1.0, 10.0};
  ExpandBudget budget;
  std::size_t recent_posts_depth = 200;
  std::size_t max_in_flight = 8;
  std::size_t max_retries = 2;
  StoppingRule stopping;
  std::vector<UserId> seed_ids;
  std::string seed_query;
  std::size_t seed_limit = 100;
  std::uint64_t seed = 0;
  std::optional<SynthConfig> synthetic;
  std::vector<std::string> stopwords;

  RunConfig run_config(std::ostream* log) const {
    RunConfig rc;
    rc.seed_ids = seed_ids;
    rc.seed_query = seed_query;
    rc.seed_limit = seed_limit;
    rc.location = location;
    rc.link = link;
    rc.mode = mode;
    rc.categorizer = categorizer;
    rc.schema = schema;
    rc.train = train;
    rc.c_grid = c_grid;
    rc.budget = budget;
    rc.stopping = stopping;
    rc.options.recent_posts_depth = recent_posts_depth;
    rc.options.max_in_flight = max_in_flight;
    rc.options.max_retries = max_retries;
    rc.options.log = log;
    rc.rng_seed = seed;
    return rc;
  }

  static AppConfig load(const std::string& path);
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& path,
                                     const std::string& what) {
  throw ConfigError(path + ": " + what);
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

inline void reject_unknown(const nlohmann::json& j,
                           std::initializer_list<const char*> known,
                           const std::string& path, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) { ok = true; break; }
    if (!ok) config_fail(path, "unknown key \"" + key + "\" in " + where);
  }
}

}  // namespace detail

inline AppConfig AppConfig::load(const std::string& path) {
  namespace fs = std::filesystem;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    detail::config_fail(path, std::string("invalid JSON: ") + e.what());
  }

  AppConfig cfg;
  try {
    detail::reject_unknown(
        j,
        {"location", "link_energy", "mode", "features", "categorizer", "train",
         "budget", "stopping", "engine", "seeds", "seed", "synthetic",
         "stopwords"},
        path, "the top level");

    const auto& loc = j.at("location");
    cfg.location.name = loc.at("name").get<std::string>();
    cfg.location.center.lat = loc.at("center").at("lat").get<double>();
    cfg.location.center.lon = loc.at("center").at("lon").get<double>();
    cfg.location.radius_miles = loc.at("radius_miles").get<double>();
    cfg.location.validate();

    if (j.contains("link_energy")) {
      const auto& le = j.at("link_energy");
      cfg.link.gamma = detail::get_or(le, "gamma", cfg.link.gamma);
      cfg.link.alpha1 = detail::get_or(le, "alpha1", cfg.link.alpha1);
      cfg.link.alpha2 = detail::get_or(le, "alpha2", cfg.link.alpha2);
      cfg.link.lambda = detail::get_or(le, "lambda", cfg.link.lambda);
      cfg.link.validate();
    }

    std::string mode = detail::get_or<std::string>(j, "mode", "fixed_odds");
    if (mode == "fixed_odds")
      cfg.mode = ProfileModelMode::fixed_odds;
    else if (mode == "logistic")
      cfg.mode = ProfileModelMode::logistic;
    else
      detail::config_fail(path, "mode must be fixed_odds or logistic");

    if (j.contains("features")) {
      const auto& f = j.at("features");
      std::optional<int> utc;
      if (f.contains("utc_offset_seconds") && !f.at("utc_offset_seconds").is_null())
        utc = f.at("utc_offset_seconds").get<int>();
      cfg.schema = FeatureSchema(
          detail::get_or(f, "primary_terms", std::vector<std::string>{}),
          detail::get_or(f, "secondary_terms", std::vector<std::string>{}),
          detail::get_or<std::string>(f, "language", ""), utc);
    }
    if (cfg.mode == ProfileModelMode::logistic && cfg.schema.size() == 0)
      detail::config_fail(path, "logistic mode needs a features section");

    if (!j.contains("categorizer"))
      detail::config_fail(path, "categorizer section is required");
    const auto& cat = j.at("categorizer");
    cfg.categorizer.strong_conjunctions = detail::get_or(
        cat, "strong_conjunctions", std::vector<std::vector<std::string>>{});
    cfg.categorizer.weak_terms =
        detail::get_or(cat, "weak_terms", std::vector<std::string>{});
    cfg.categorizer.neutral_locations =
        detail::get_or(cat, "neutral_locations", std::vector<std::string>{});
    cfg.categorizer.world_city_exclusions =
        detail::get_or(cat, "world_city_exclusions", std::vector<std::string>{});
    if (cat.contains("world_cities"))
      cfg.categorizer.world_cities =
          cat.at("world_cities").get<std::vector<std::string>>();
    if (cat.contains("world_cities_file")) {
      fs::path f = cat.at("world_cities_file").get<std::string>();
      if (f.is_relative()) f = fs::path(path).parent_path() / f;
      for (auto& city : load_city_list(f.string()))
        cfg.categorizer.world_cities.push_back(std::move(city));
    }
    cfg.categorizer.odds = default_category_odds();
    if (cat.contains("odds")) {
      for (const auto& [key, val] : cat.at("odds").items()) {
        Category c;
        if (key == "A") c = Category::A;
        else if (key == "B") c = Category::B;
        else if (key == "C") c = Category::C;
        else if (key == "D") c = Category::D;
        else if (key == "E") c = Category::E;
        else detail::config_fail(path, "odds: unknown category " + key);
        auto pair = val.get<std::vector<double>>();
        if (pair.size() != 2)
          detail::config_fail(path, "odds." + key + " must be [num, den]");
        cfg.categorizer.odds[c] = {pair[0], pair[1]};
      }
    }
    cfg.categorizer.validate();

    if (j.contains("train")) {
      const auto& t = j.at("train");
      std::string penalty = detail::get_or<std::string>(t, "penalty", "l2");
      if (penalty == "l1")
        cfg.train.penalty = Penalty::l1;
      else if (penalty == "l2")
        cfg.train.penalty = Penalty::l2;
      else
        detail::config_fail(path, "train.penalty must be l1 or l2");
      cfg.train.c = detail::get_or(t, "c", cfg.train.c);
      cfg.train.max_iterations =
          detail::get_or(t, "max_iterations", cfg.train.max_iterations);
      cfg.train.tolerance = detail::get_or(t, "tolerance", cfg.train.tolerance);
      cfg.train.validation_fraction = detail::get_or(
          t, "validation_fraction", cfg.train.validation_fraction);
      cfg.train.seed = detail::get_or(t, "seed", cfg.train.seed);
      cfg.c_grid = detail::get_or(t, "c_grid", cfg.c_grid);
      cfg.train.validate();
      if (cfg.c_grid.empty())
        detail::config_fail(path, "train.c_grid must not be empty");
    }

    if (j.contains("budget")) {
      const auto& b = j.at("budget");
      cfg.budget.users_per_direction = detail::get_or(
          b, "users_per_direction", cfg.budget.users_per_direction);
      cfg.budget.neighbors_per_user =
          detail::get_or(b, "neighbors_per_user", cfg.budget.neighbors_per_user);
      cfg.recent_posts_depth =
          detail::get_or(b, "recent_posts", cfg.recent_posts_depth);
      cfg.budget.validate();
    }

    if (j.contains("stopping")) {
      const auto& s = j.at("stopping");
      cfg.stopping.max_iterations =
          detail::get_or(s, "max_iterations", cfg.stopping.max_iterations);
      if (s.contains("wall_clock_seconds") && !s.at("wall_clock_seconds").is_null())
        cfg.stopping.wall_clock_seconds =
            s.at("wall_clock_seconds").get<double>();
    }

    if (j.contains("engine")) {
      const auto& e = j.at("engine");
      cfg.max_in_flight = detail::get_or(e, "max_in_flight", cfg.max_in_flight);
      cfg.max_retries = detail::get_or(e, "max_retries", cfg.max_retries);
      if (cfg.max_in_flight == 0)
        detail::config_fail(path, "engine.max_in_flight must be >= 1");
    }

    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      cfg.seed_ids = detail::get_or(s, "ids", std::vector<UserId>{});
      cfg.seed_query = detail::get_or<std::string>(s, "query", "");
      cfg.seed_limit = detail::get_or(s, "limit", cfg.seed_limit);
    }
    cfg.seed = detail::get_or<std::uint64_t>(j, "seed", 0);

    if (j.contains("synthetic") && !j.at("synthetic").is_null()) {
      const auto& s = j.at("synthetic");
      SynthConfig sc;
      sc.n_in = detail::get_or(s, "n_in", sc.n_in);
      sc.n_out = detail::get_or(s, "n_out", sc.n_out);
      sc.p_in = detail::get_or(s, "p_in", sc.p_in);
      sc.p_out = detail::get_or(s, "p_out", sc.p_out);
      sc.term_tp = detail::get_or(s, "term_tp", sc.term_tp);
      sc.term_fp = detail::get_or(s, "term_fp", sc.term_fp);
      sc.geo_rate_in = detail::get_or(s, "geo_rate_in", sc.geo_rate_in);
      sc.geo_rate_out = detail::get_or(s, "geo_rate_out", sc.geo_rate_out);
      sc.noise_flip = detail::get_or(s, "noise_flip", sc.noise_flip);
      sc.hub_count = detail::get_or(s, "hub_count", sc.hub_count);
      sc.hub_degree = detail::get_or(s, "hub_degree", sc.hub_degree);
      sc.seed = detail::get_or<std::uint64_t>(s, "seed", sc.seed);
      sc.location_terms =
          detail::get_or(s, "location_terms", std::vector<std::string>{});
      if (sc.location_terms.empty() && cfg.schema.size() > 0)
        sc.location_terms = cfg.schema.primary_terms();
      sc.big_city_rate = detail::get_or(s, "big_city_rate", sc.big_city_rate);
      if (detail::get_or(s, "plant_world_cities", true))
        sc.world_cities = cfg.categorizer.world_cities;
      sc.language = detail::get_or<std::string>(s, "language", cfg.schema.language());
      sc.language_rate_in =
          detail::get_or(s, "language_rate_in", sc.language_rate_in);
      sc.language_rate_out =
          detail::get_or(s, "language_rate_out", sc.language_rate_out);
      if (s.contains("utc_offset_seconds") && !s.at("utc_offset_seconds").is_null())
        sc.utc_offset_seconds = s.at("utc_offset_seconds").get<int>();
      else
        sc.utc_offset_seconds = cfg.schema.utc_offset_seconds();
      sc.utc_match_rate_in =
          detail::get_or(s, "utc_match_rate_in", sc.utc_match_rate_in);
      sc.utc_match_rate_out =
          detail::get_or(s, "utc_match_rate_out", sc.utc_match_rate_out);
      sc.posts_per_user = detail::get_or(s, "posts_per_user", sc.posts_per_user);
      sc.validate();
      cfg.synthetic = std::move(sc);
    }

    cfg.stopwords = detail::get_or(j, "stopwords", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    detail::config_fail(path, e.what());
  }
  return cfg;
}

}  // namespace locset
