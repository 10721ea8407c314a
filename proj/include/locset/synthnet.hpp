#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "locset/dataset.hpp"
#include "locset/datasource.hpp"
#include "locset/geo.hpp"
#include "locset/rng.hpp"
#include "locset/types.hpp"
#include "locset/util.hpp"

namespace locset {

// Two-block directed random graph with planted location structure:
// in-location users follow each other at p_in, every other ordered pair
// connects at p_out. Profiles carry a planted location term with probability
// term_tp (in-block) / term_fp (out-block); geo-tagged posts appear at
// geo_rate_in/out and land on the wrong side of the radius with probability
// noise_flip (travelers). Optional celebrity hubs draw followers from both
// blocks, giving the degree-damping of the link energy something to damp.
struct SynthConfig {
  std::size_t n_in = 200;
  std::size_t n_out = 2000;
  double p_in = 0.05;
  double p_out = 0.001;
  double term_tp = 0.6;
  double term_fp = 0.01;
  double geo_rate_in = 0.5;
  double geo_rate_out = 0.15;
  double noise_flip = 0.05;
  std::size_t hub_count = 2;
  std::size_t hub_degree = 500;
  std::uint64_t seed = 1;

  // Content knobs (defaults are neutral or mild).
  std::vector<std::string> location_terms;  // planted strings; defaults to
                                            // the location name at generate()
  std::vector<std::string> world_cities;    // planted big-city locations
  double big_city_rate = 0.3;               // out-block users naming one
  std::string language;                     // e.g. "es"; empty disables
  double language_rate_in = 0.5;
  double language_rate_out = 0.5;
  std::optional<int> utc_offset_seconds;
  double utc_match_rate_in = 0.5;
  double utc_match_rate_out = 0.5;
  std::size_t posts_per_user = 2;  // plain text posts besides the geo post

  void validate() const {
    if (n_in < 1 || n_out < 1)
      throw ConfigError("synth: n_in and n_out must be >= 1");
    for (double p : {p_in, p_out, term_tp, term_fp, geo_rate_in, geo_rate_out,
                     noise_flip, big_city_rate, language_rate_in,
                     language_rate_out, utc_match_rate_in, utc_match_rate_out})
      if (!(p >= 0.0) || !(p <= 1.0))
        throw ConfigError("synth: probabilities must be in [0, 1]");
  }
};

struct SynthWorld {
  Snapshot snapshot;  // full generated population; labels empty
  std::unordered_map<UserId, int> true_membership;
  std::unordered_map<UserId, std::vector<UserId>> followers_of;
  std::unordered_map<UserId, std::vector<UserId>> friends_of;
};

namespace detail {

// Appends all positions in [lo, hi) \ {skip} hit by an independent
// Bernoulli(p) per position, via geometric gap sampling: O(hits), not
// O(range), which is what makes the 1e5-user worlds cheap.
inline void sample_positions(Rng& rng, UserId lo, UserId hi, UserId skip,
                             double p, std::vector<UserId>& out) {
  if (p <= 0.0 || lo >= hi) return;
  UserId pos = lo;
  while (true) {
    std::uint64_t gap = rng.geometric_skip(p);
    if (gap >= hi - pos) return;
    pos += gap;
    if (pos != skip) out.push_back(pos);
    ++pos;
    if (pos >= hi) return;
  }
}

// Planar offset from a center point: distance in miles along a bearing.
// Good to a fraction of a percent at these scales, which is plenty for
// placing synthetic posts on either side of a radius.
inline GeoPoint offset_point(GeoPoint center, double miles, double bearing_rad) {
  constexpr double miles_per_deg = kEarthRadiusMiles * kPi / 180.0;
  double dlat = miles * std::cos(bearing_rad) / miles_per_deg;
  double cos_lat = std::cos(deg2rad(center.lat));
  if (std::fabs(cos_lat) < 0.01) cos_lat = 0.01;
  double dlon = miles * std::sin(bearing_rad) / (miles_per_deg * cos_lat);
  GeoPoint p{center.lat + dlat, center.lon + dlon};
  p.lat = std::clamp(p.lat, -89.9, 89.9);
  if (p.lon > 180.0) p.lon -= 360.0;
  if (p.lon < -180.0) p.lon += 360.0;
  return p;
}

}  // namespace detail

inline SynthWorld generate(const SynthConfig& cfg, const LocationSpec& where) {
  cfg.validate();
  where.validate();

  std::vector<std::string> terms = cfg.location_terms;
  if (terms.empty()) terms.push_back(where.name);

  Rng rng(cfg.seed);
  SynthWorld world;
  Snapshot& snap = world.snapshot;

  const UserId first_in = 1;
  const UserId first_out = first_in + cfg.n_in;
  const UserId first_hub = first_out + cfg.n_out;
  const UserId end_nonhub = first_hub;
  const UserId end_all = first_hub + cfg.hub_count;

  // Edges first, so profile degree fields can match them exactly.
  std::vector<std::pair<UserId, UserId>> edge_list;  // (follower, friend)
  for (UserId i = first_in; i < end_nonhub; ++i) {
    std::vector<UserId> targets;
    if (i < first_out) {
      detail::sample_positions(rng, first_in, first_out, i, cfg.p_in, targets);
      detail::sample_positions(rng, first_out, end_nonhub, i, cfg.p_out, targets);
    } else {
      detail::sample_positions(rng, first_in, end_nonhub, i, cfg.p_out, targets);
    }
    for (UserId j : targets) edge_list.emplace_back(i, j);
  }
  for (UserId h = first_hub; h < end_all; ++h) {
    std::vector<UserId> pool(end_nonhub - first_in);
    for (UserId i = first_in; i < end_nonhub; ++i) pool[i - first_in] = i;
    std::vector<UserId> fans = rng.sample(pool, cfg.hub_degree);
    std::sort(fans.begin(), fans.end());
    for (UserId f : fans) edge_list.emplace_back(f, h);
  }

  std::unordered_map<UserId, std::uint64_t> out_deg, in_deg;
  for (auto [a, b] : edge_list) {
    ++out_deg[a];
    ++in_deg[b];
  }

  static const char* kVocab[] = {"hola",    "trabajo", "futbol", "lluvia",
                                 "mercado", "amigos",  "musica", "fiesta",
                                 "manana",  "siempre"};
  constexpr std::size_t kVocabSize = sizeof(kVocab) / sizeof(kVocab[0]);

  for (UserId id = first_in; id < end_all; ++id) {
    bool is_hub = id >= first_hub;
    bool member = id < first_out;
    world.true_membership[id] = member ? 1 : 0;

    UserProfile u;
    u.id = id;
    u.screen_name = (is_hub ? "star" : "user") + std::to_string(id);
    u.name = (is_hub ? "Star " : "User ") + std::to_string(id);
    u.friends_count = out_deg.count(id) ? out_deg[id] : 0;
    u.followers_count = in_deg.count(id) ? in_deg[id] : 0;

    if (!is_hub) {
      double term_p = member ? cfg.term_tp : cfg.term_fp;
      if (rng.bernoulli(term_p)) {
        const std::string& t = terms[rng.below(terms.size())];
        if (rng.bernoulli(0.75))
          u.location_text = t;
        else
          u.description = "living in " + t;
      } else if (!member && !cfg.world_cities.empty() &&
                 rng.bernoulli(cfg.big_city_rate)) {
        u.location_text = cfg.world_cities[rng.below(cfg.world_cities.size())];
      }
      if (!cfg.language.empty()) {
        double lp = member ? cfg.language_rate_in : cfg.language_rate_out;
        u.language_code = rng.bernoulli(lp) ? cfg.language : "en";
      }
      if (cfg.utc_offset_seconds.has_value()) {
        double up = member ? cfg.utc_match_rate_in : cfg.utc_match_rate_out;
        u.utc_offset_seconds = rng.bernoulli(up) ? *cfg.utc_offset_seconds : 0;
      }
      u.protected_account = rng.bernoulli(0.05);
      u.verified = rng.bernoulli(0.02);
    } else {
      u.location_text = "everywhere";
      u.verified = true;
    }
    snap.add_user(std::move(u));

    // Posts: newest first. An optional geo post, then plain chatter.
    std::vector<Post> posts;
    double geo_p = is_hub ? 0.0 : (member ? cfg.geo_rate_in : cfg.geo_rate_out);
    if (geo_p > 0.0 && rng.bernoulli(geo_p)) {
      bool place_inside = member;
      if (rng.bernoulli(cfg.noise_flip)) place_inside = !place_inside;
      double bearing = rng.uniform(0.0, 2.0 * kPi);
      double dist = place_inside
                        ? 0.95 * where.radius_miles * std::sqrt(rng.uniform01())
                        : rng.uniform(100.0, 1000.0);
      Post p;
      p.text = "checking in";
      p.geo = detail::offset_point(where.center, dist, bearing);
      p.timestamp = "2017-05-2" + std::to_string(rng.below(7)) + "T12:00:00Z";
      posts.push_back(std::move(p));
    }
    for (std::size_t k = 0; k < cfg.posts_per_user; ++k) {
      Post p;
      p.text = kVocab[rng.below(kVocabSize)];
      p.text += ' ';
      p.text += kVocab[rng.below(kVocabSize)];
      if (member && rng.bernoulli(0.3)) p.text += ' ' + terms.front();
      p.timestamp = "2017-05-2" + std::to_string(rng.below(7)) + "T09:00:00Z";
      posts.push_back(std::move(p));
    }
    GroundTruth g = label_ground_truth(posts, where);
    snap.posts[id] = std::move(posts);
    if (g != GroundTruth::unknown) snap.ground_truth[id] = g;
  }

  for (auto [a, b] : edge_list) {
    RelationshipEdge e;
    e.follower = a;
    e.friend_id = b;
    e.z1 = snap.find_user(a)->friends_count;
    e.z2 = snap.find_user(b)->followers_count;
    snap.add_edge(e);
    world.followers_of[b].push_back(a);
    world.friends_of[a].push_back(b);
  }
  for (auto& [id, v] : world.followers_of) std::sort(v.begin(), v.end());
  for (auto& [id, v] : world.friends_of) std::sort(v.begin(), v.end());

  snap.rng_state = rng.state();
  return world;
}

// Read-only DataSource over a generated world. The world must outlive the
// source.
class SynthDataSource : public DataSource {
 public:
  explicit SynthDataSource(const SynthWorld& world) : world_(&world) {}

  std::vector<UserProfile> user_search(const std::string& query,
                                       std::size_t limit) override {
    limit = std::min(limit, kMaxSearchResults);
    std::vector<UserProfile> out;
    for (const auto& u : world_->snapshot.users) {
      if (out.size() >= limit) break;
      if (contains_ci(u.location_text, query) ||
          contains_ci(u.description, query) || contains_ci(u.name, query) ||
          contains_ci(u.screen_name, query))
        out.push_back(u);
    }
    return out;
  }

  std::vector<UserId> followers(UserId id, std::size_t limit) override {
    return neighbor_list(world_->followers_of, id, limit);
  }

  std::vector<UserId> friends(UserId id, std::size_t limit) override {
    return neighbor_list(world_->friends_of, id, limit);
  }

  std::vector<UserProfile> profiles(const std::vector<UserId>& ids) override {
    std::vector<UserProfile> out;
    out.reserve(ids.size());
    for (UserId id : ids) {
      const UserProfile* u = world_->snapshot.find_user(id);
      if (u) out.push_back(*u);
    }
    return out;
  }

  std::vector<Post> recent_posts(UserId id, std::size_t limit) override {
    const auto* p = world_->snapshot.posts_of(id);
    if (!p) return {};
    std::vector<Post> out(p->begin(),
                          p->begin() + std::min<std::size_t>(limit, p->size()));
    return out;
  }

 private:
  static std::vector<UserId> neighbor_list(
      const std::unordered_map<UserId, std::vector<UserId>>& adj, UserId id,
      std::size_t limit) {
    limit = std::min(limit, kMaxNeighbors);
    auto it = adj.find(id);
    if (it == adj.end()) return {};
    const auto& v = it->second;
    return std::vector<UserId>(v.begin(),
                               v.begin() + std::min(limit, v.size()));
  }

  const SynthWorld* world_;
};

inline SynthDataSource as_data_source(const SynthWorld& world) {
  return SynthDataSource(world);
}

}  // namespace locset
