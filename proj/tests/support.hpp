#pragma once

// Shared helpers for the test suite: temp directories, tiny profile
// builders, a scripted data source, and an independent brute-force energy
// oracle the graph-cut tests compare against.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "locset/locset.hpp"

namespace ts {

using namespace locset;

inline std::filesystem::path fresh_dir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  auto p = std::filesystem::temp_directory_path() /
           ("locset_" + tag + "_" + std::to_string(counter.fetch_add(1)));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline UserProfile user(UserId id) {
  UserProfile u;
  u.id = id;
  u.screen_name = "u" + std::to_string(id);
  u.name = "User " + std::to_string(id);
  return u;
}

inline RelationshipEdge edge_between(UserId follower, UserId friend_id,
                                     std::uint64_t z1, std::uint64_t z2) {
  RelationshipEdge e;
  e.follower = follower;
  e.friend_id = friend_id;
  e.z1 = z1;
  e.z2 = z2;
  return e;
}

inline CategorizerConfig test_categorizer() {
  CategorizerConfig c;
  c.strong_conjunctions = {{"corinto", "colombia"}, {"corinto, cauca"}};
  c.weak_terms = {"corinto", "cauca"};
  c.neutral_locations = {"colombia", "sur america"};
  c.world_cities = {"bogota", "medellin", "cali", "new york", "rio de janeiro"};
  c.world_city_exclusions = {"cali"};
  c.odds = default_category_odds();
  return c;
}

// ---- Random labeling-energy instances and the brute-force oracle ----------
// The oracle never touches the flow/graph machinery: it evaluates the energy
// definition directly for every labeling.

struct OracleInstance {
  std::vector<double> deltas;  // user i = index, id = i + 1
  std::vector<RelationshipEdge> edges;
  LinkEnergyParams params;
};

inline OracleInstance random_instance(Rng& rng) {
  static const double gammas[] = {0.0, std::log(2.0), std::log(5.0),
                                  std::log(10.0)};
  static const double lambdas[] = {0.0, 0.5, 0.98, 1.0};
  OracleInstance inst;
  std::size_t n = 2 + static_cast<std::size_t>(rng.below(11));  // 2..12
  inst.deltas.resize(n);
  for (auto& d : inst.deltas) d = rng.uniform(-5.0, 5.0);
  inst.params.gamma = gammas[rng.below(4)];
  inst.params.lambda = lambdas[rng.below(4)];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !rng.bernoulli(0.35)) continue;
      inst.edges.push_back(
          edge_between(i + 1, j + 1, rng.below(8001), rng.below(8001)));
    }
  return inst;
}

inline double oracle_energy(const OracleInstance& inst,
                            const std::vector<int>& labels) {
  double e = 0.0;
  for (std::size_t i = 0; i < inst.deltas.size(); ++i) {
    double d = inst.deltas[i];
    e += labels[i] == 1 ? std::max(0.0, -d) : std::max(0.0, d);
  }
  for (const auto& ed : inst.edges)
    e += link_energy(ed, labels[ed.follower - 1], labels[ed.friend_id - 1],
                     inst.params);
  return e;
}

inline std::pair<double, std::vector<int>> oracle_min_energy(
    const OracleInstance& inst) {
  std::size_t n = inst.deltas.size();
  double best = 0.0;
  std::vector<int> best_labels, labels(n);
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) labels[i] = (mask >> i) & 1;
    double e = oracle_energy(inst, labels);
    if (best_labels.empty() || e < best) {
      best = e;
      best_labels = labels;
    }
  }
  return {best, best_labels};
}

inline Snapshot instance_snapshot(const OracleInstance& inst) {
  Snapshot snap;
  for (std::size_t i = 0; i < inst.deltas.size(); ++i)
    snap.add_user(user(i + 1));
  for (const auto& e : inst.edges) snap.add_edge(e);
  return snap;
}

inline PinnedDeltaModel instance_model(const OracleInstance& inst) {
  PinnedDeltaModel m;
  for (std::size_t i = 0; i < inst.deltas.size(); ++i)
    m.delta_by_user[i + 1] = inst.deltas[i];
  return m;
}

// ---- A scripted, instrumented data source ----------------------------------
// Thread safe (the engine fetches concurrently). Ids listed in fail_* throw
// on every call so retry/skip behavior can be observed.

class ScriptedSource : public DataSource {
 public:
  std::map<UserId, UserProfile> profile_map;
  std::map<UserId, std::vector<UserId>> followers_map;
  std::map<UserId, std::vector<UserId>> friends_map;
  std::map<UserId, std::vector<Post>> posts_map;
  std::set<UserId> fail_followers, fail_friends, fail_posts;

  // instrumentation
  std::map<UserId, int> followers_calls, friends_calls, posts_calls;
  std::vector<std::size_t> neighbor_limits;
  int profiles_calls = 0;

  void add(const UserProfile& u) { profile_map[u.id] = u; }

  std::vector<UserProfile> user_search(const std::string& query,
                                       std::size_t limit) override {
    std::scoped_lock lock(mu_);
    limit = std::min(limit, kMaxSearchResults);
    std::vector<UserProfile> out;
    for (const auto& [id, u] : profile_map) {
      if (out.size() >= limit) break;
      if (contains_ci(u.location_text, query) ||
          contains_ci(u.description, query) || contains_ci(u.name, query) ||
          contains_ci(u.screen_name, query))
        out.push_back(u);
    }
    return out;
  }

  std::vector<UserId> followers(UserId id, std::size_t limit) override {
    std::scoped_lock lock(mu_);
    ++followers_calls[id];
    neighbor_limits.push_back(limit);
    if (fail_followers.count(id)) throw DataError("scripted failure");
    return clamped(followers_map, id, limit);
  }

  std::vector<UserId> friends(UserId id, std::size_t limit) override {
    std::scoped_lock lock(mu_);
    ++friends_calls[id];
    neighbor_limits.push_back(limit);
    if (fail_friends.count(id)) throw DataError("scripted failure");
    return clamped(friends_map, id, limit);
  }

  std::vector<UserProfile> profiles(const std::vector<UserId>& ids) override {
    std::scoped_lock lock(mu_);
    ++profiles_calls;
    std::vector<UserProfile> out;
    for (UserId id : ids) {
      auto it = profile_map.find(id);
      if (it != profile_map.end()) out.push_back(it->second);
    }
    return out;
  }

  std::vector<Post> recent_posts(UserId id, std::size_t limit) override {
    std::scoped_lock lock(mu_);
    ++posts_calls[id];
    if (fail_posts.count(id)) throw DataError("scripted failure");
    auto it = posts_map.find(id);
    if (it == posts_map.end()) return {};
    const auto& v = it->second;
    return std::vector<Post>(v.begin(),
                             v.begin() + std::min(limit, v.size()));
  }

  int total_neighbor_calls() const {
    int n = 0;
    for (const auto& [id, c] : followers_calls) n += c;
    for (const auto& [id, c] : friends_calls) n += c;
    return n;
  }

 private:
  static std::vector<UserId> clamped(
      const std::map<UserId, std::vector<UserId>>& m, UserId id,
      std::size_t limit) {
    limit = std::min(limit, kMaxNeighbors);
    auto it = m.find(id);
    if (it == m.end()) return {};
    const auto& v = it->second;
    return std::vector<UserId>(v.begin(),
                               v.begin() + std::min(limit, v.size()));
  }

  std::mutex mu_;
};

// Runs a shell command, capturing stdout+stderr; returns the exit code.
inline int run_command(const std::string& cmd, std::string* output = nullptr) {
  auto out_file = fresh_dir("cmd") / "out.txt";
  std::string full = cmd + " > " + out_file.string() + " 2>&1";
  int status = std::system(full.c_str());
  if (output) {
    std::ifstream in(out_file);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    *output = text;
  }
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace ts
