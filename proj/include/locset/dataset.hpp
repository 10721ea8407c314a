#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "locset/types.hpp"

namespace locset {

struct EdgeKeyHash {
  std::size_t operator()(const std::pair<UserId, UserId>& k) const {
    std::uint64_t h = k.first * 0x9e3779b97f4a7c15ULL;
    h ^= k.second + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Everything known about the crawl so far. Users and edges keep insertion
// order (which the crawl makes deterministic); lookups go through the
// indices. At most one edge per ordered (follower, friend) pair.
struct Snapshot {
  std::vector<UserProfile> users;
  std::vector<RelationshipEdge> edges;
  std::unordered_map<UserId, std::vector<Post>> posts;
  std::unordered_map<UserId, GroundTruth> ground_truth;
  LabelVector labels;  // from the most recent classification, may be empty
  std::uint64_t iteration = 0;
  std::vector<UserId> seeds;
  std::string rng_state;  // crawl RNG, serialized; empty if never used

  std::unordered_map<UserId, std::size_t> user_index;
  std::unordered_set<std::pair<UserId, UserId>, EdgeKeyHash> edge_keys;

  bool has_user(UserId id) const { return user_index.count(id) != 0; }

  const UserProfile* find_user(UserId id) const {
    auto it = user_index.find(id);
    return it == user_index.end() ? nullptr : &users[it->second];
  }

  UserProfile* find_user(UserId id) {
    auto it = user_index.find(id);
    return it == user_index.end() ? nullptr : &users[it->second];
  }

  void add_user(UserProfile u) {
    if (has_user(u.id))
      throw DataError("duplicate user id " + std::to_string(u.id));
    user_index.emplace(u.id, users.size());
    users.push_back(std::move(u));
  }

  // Ignores exact duplicates of an ordered pair; returns whether added.
  bool add_edge(RelationshipEdge e) {
    if (!has_user(e.follower) || !has_user(e.friend_id))
      throw DataError("edge references unknown user " +
                      std::to_string(has_user(e.follower) ? e.friend_id
                                                          : e.follower));
    if (!edge_keys.emplace(e.follower, e.friend_id).second) return false;
    edges.push_back(e);
    return true;
  }

  const std::vector<Post>* posts_of(UserId id) const {
    auto it = posts.find(id);
    return it == posts.end() ? nullptr : &it->second;
  }

  GroundTruth truth_of(UserId id) const {
    auto it = ground_truth.find(id);
    return it == ground_truth.end() ? GroundTruth::unknown : it->second;
  }

  void validate() const {
    if (user_index.size() != users.size())
      throw DataError("snapshot: user index out of sync");
    for (const auto& e : edges)
      if (!has_user(e.follower) || !has_user(e.friend_id))
        throw DataError("snapshot: edge references unknown user");
    for (const auto& [id, l] : labels) {
      if (l != 0 && l != 1)
        throw DataError("snapshot: label must be 0 or 1");
      if (!has_user(id))
        throw DataError("snapshot: label for unknown user " + std::to_string(id));
    }
    for (const auto& [id, _] : posts)
      if (!has_user(id))
        throw DataError("snapshot: posts for unknown user " + std::to_string(id));
    for (const auto& [id, g] : ground_truth) {
      if (!has_user(id))
        throw DataError("snapshot: ground truth for unknown user " +
                        std::to_string(id));
      (void)g;
    }
    for (UserId s : seeds)
      if (!has_user(s))
        throw DataError("snapshot: seed " + std::to_string(s) + " missing");
  }

  // Content equality; index structures are derived so they are skipped.
  bool operator==(const Snapshot& o) const {
    auto sorted_truth = [](const std::unordered_map<UserId, GroundTruth>& m) {
      std::vector<std::pair<UserId, int>> v;
      v.reserve(m.size());
      for (auto& [k, g] : m) v.emplace_back(k, static_cast<int>(g));
      std::sort(v.begin(), v.end());
      return v;
    };
    auto sorted_posts = [](const std::unordered_map<UserId, std::vector<Post>>& m) {
      std::vector<std::pair<UserId, const std::vector<Post>*>> v;
      v.reserve(m.size());
      for (auto& [k, p] : m) v.emplace_back(k, &p);
      std::sort(v.begin(), v.end(),
                [](auto& a, auto& b) { return a.first < b.first; });
      return v;
    };
    if (!(users == o.users && edges == o.edges && labels == o.labels &&
          iteration == o.iteration && seeds == o.seeds &&
          rng_state == o.rng_state))
      return false;
    if (sorted_truth(ground_truth) != sorted_truth(o.ground_truth)) return false;
    auto a = sorted_posts(posts), b = sorted_posts(o.posts);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].first != b[i].first || *a[i].second != *b[i].second) return false;
    return true;
  }
};

}  // namespace locset
