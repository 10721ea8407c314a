#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "locset/dataset.hpp"
#include "locset/types.hpp"

namespace locset {

// Snapshot directory layout:
//   users.jsonl   one profile object per line, insertion order
//   edges.csv     follower_id,friend_id,z1,z2 (z columns empty when unknown)
//   posts.jsonl   one post object per line, grouped by user in user order
//   meta.json     iteration, seeds, rng state, labels, ground truth
// Loading rebuilds the snapshot losslessly.

namespace detail {

inline nlohmann::json profile_to_json(const UserProfile& u) {
  nlohmann::json j;
  j["id"] = u.id;
  j["screen_name"] = u.screen_name;
  j["name"] = u.name;
  j["description"] = u.description;
  j["location"] = u.location_text;
  j["language"] = u.language_code;
  if (u.utc_offset_seconds.has_value())
    j["utc_offset_seconds"] = *u.utc_offset_seconds;
  else
    j["utc_offset_seconds"] = nullptr;
  j["protected"] = u.protected_account;
  j["verified"] = u.verified;
  j["friends_count"] = u.friends_count;
  j["followers_count"] = u.followers_count;
  return j;
}

inline UserProfile profile_from_json(const nlohmann::json& j) {
  UserProfile u;
  u.id = j.at("id").get<UserId>();
  u.screen_name = j.at("screen_name").get<std::string>();
  u.name = j.at("name").get<std::string>();
  u.description = j.at("description").get<std::string>();
  u.location_text = j.at("location").get<std::string>();
  u.language_code = j.at("language").get<std::string>();
  if (!j.at("utc_offset_seconds").is_null())
    u.utc_offset_seconds = j.at("utc_offset_seconds").get<int>();
  u.protected_account = j.at("protected").get<bool>();
  u.verified = j.at("verified").get<bool>();
  u.friends_count = j.at("friends_count").get<std::uint64_t>();
  u.followers_count = j.at("followers_count").get<std::uint64_t>();
  return u;
}

[[noreturn]] inline void parse_fail(const std::string& file, std::size_t line,
                                    const std::string& what) {
  throw DataError(file + ":" + std::to_string(line) + ": " + what);
}

}  // namespace detail

inline void save_snapshot(const Snapshot& snap, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create snapshot directory " + dir);

  {
    std::ofstream out(fs::path(dir) / "users.jsonl");
    if (!out) throw DataError("cannot write users.jsonl in " + dir);
    for (const auto& u : snap.users)
      out << detail::profile_to_json(u).dump() << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "edges.csv");
    if (!out) throw DataError("cannot write edges.csv in " + dir);
    out << "follower_id,friend_id,z1,z2\n";
    for (const auto& e : snap.edges) {
      out << e.follower << ',' << e.friend_id << ',';
      if (e.z1.has_value()) out << *e.z1;
      out << ',';
      if (e.z2.has_value()) out << *e.z2;
      out << '\n';
    }
  }
  {
    std::ofstream out(fs::path(dir) / "posts.jsonl");
    if (!out) throw DataError("cannot write posts.jsonl in " + dir);
    for (const auto& u : snap.users) {
      const auto* posts = snap.posts_of(u.id);
      if (!posts) continue;
      for (const auto& p : *posts) {
        nlohmann::json j;
        j["user_id"] = u.id;
        j["text"] = p.text;
        if (p.geo.has_value()) {
          j["lat"] = p.geo->lat;
          j["lon"] = p.geo->lon;
        } else {
          j["lat"] = nullptr;
          j["lon"] = nullptr;
        }
        j["timestamp"] = p.timestamp;
        out << j.dump() << '\n';
      }
    }
  }
  {
    nlohmann::json meta;
    meta["iteration"] = snap.iteration;
    meta["seeds"] = snap.seeds;
    meta["rng_state"] = snap.rng_state;
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [id, l] : snap.labels) labels[std::to_string(id)] = l;
    meta["labels"] = labels;
    nlohmann::json truth = nlohmann::json::object();
    for (const auto& u : snap.users) {
      GroundTruth g = snap.truth_of(u.id);
      if (g != GroundTruth::unknown)
        truth[std::to_string(u.id)] = static_cast<int>(g);
    }
    meta["ground_truth"] = truth;
    // Users with an empty post list still need their key recorded, since
    // posts.jsonl cannot express "fetched, found nothing".
    std::vector<UserId> empty_posts;
    for (const auto& u : snap.users) {
      const auto* p = snap.posts_of(u.id);
      if (p && p->empty()) empty_posts.push_back(u.id);
    }
    meta["empty_post_users"] = empty_posts;
    std::ofstream out(fs::path(dir) / "meta.json");
    if (!out) throw DataError("cannot write meta.json in " + dir);
    out << meta.dump(2) << '\n';
  }
}

inline Snapshot load_snapshot(const std::string& dir) {
  namespace fs = std::filesystem;
  Snapshot snap;

  {
    std::string file = (fs::path(dir) / "users.jsonl").string();
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file);
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      if (line.empty()) continue;
      try {
        snap.add_user(detail::profile_from_json(nlohmann::json::parse(line)));
      } catch (const nlohmann::json::exception& e) {
        detail::parse_fail(file, ln, e.what());
      }
    }
  }
  {
    std::string file = (fs::path(dir) / "edges.csv").string();
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file);
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      if (ln == 1) {
        if (line != "follower_id,friend_id,z1,z2")
          detail::parse_fail(file, ln, "unexpected header: " + line);
        continue;
      }
      if (line.empty()) continue;
      std::array<std::string, 4> col;
      std::size_t ncol = 0, start = 0;
      for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
          if (ncol >= 4) detail::parse_fail(file, ln, "too many columns");
          col[ncol++] = line.substr(start, i - start);
          start = i + 1;
        }
      }
      if (ncol != 4) detail::parse_fail(file, ln, "expected 4 columns");
      RelationshipEdge e;
      try {
        e.follower = std::stoull(col[0]);
        e.friend_id = std::stoull(col[1]);
        if (!col[2].empty()) e.z1 = std::stoull(col[2]);
        if (!col[3].empty()) e.z2 = std::stoull(col[3]);
      } catch (const std::exception&) {
        detail::parse_fail(file, ln, "bad integer field");
      }
      try {
        snap.add_edge(e);
      } catch (const DataError& ex) {
        detail::parse_fail(file, ln, ex.what());
      }
    }
  }
  {
    std::string file = (fs::path(dir) / "posts.jsonl").string();
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file);
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      if (line.empty()) continue;
      try {
        nlohmann::json j = nlohmann::json::parse(line);
        UserId id = j.at("user_id").get<UserId>();
        if (!snap.has_user(id))
          detail::parse_fail(file, ln, "post for unknown user " + std::to_string(id));
        Post p;
        p.text = j.at("text").get<std::string>();
        bool lat_null = j.at("lat").is_null(), lon_null = j.at("lon").is_null();
        if (lat_null != lon_null)
          detail::parse_fail(file, ln, "lat/lon must both be set or both null");
        if (!lat_null)
          p.geo = GeoPoint{j.at("lat").get<double>(), j.at("lon").get<double>()};
        p.timestamp = j.at("timestamp").get<std::string>();
        snap.posts[id].push_back(std::move(p));
      } catch (const nlohmann::json::exception& e) {
        detail::parse_fail(file, ln, e.what());
      }
    }
  }
  {
    std::string file = (fs::path(dir) / "meta.json").string();
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file);
    try {
      nlohmann::json meta;
      in >> meta;
      snap.iteration = meta.at("iteration").get<std::uint64_t>();
      snap.seeds = meta.at("seeds").get<std::vector<UserId>>();
      snap.rng_state = meta.at("rng_state").get<std::string>();
      for (const auto& [key, val] : meta.at("labels").items())
        snap.labels[std::stoull(key)] = val.get<int>();
      for (const auto& [key, val] : meta.at("ground_truth").items()) {
        int v = val.get<int>();
        if (v != 0 && v != 1)
          throw DataError("meta.json: ground truth must be 0 or 1");
        snap.ground_truth[std::stoull(key)] =
            v == 1 ? GroundTruth::inside : GroundTruth::outside;
      }
      for (UserId id : meta.at("empty_post_users").get<std::vector<UserId>>())
        snap.posts.emplace(id, std::vector<Post>{});
    } catch (const nlohmann::json::exception& e) {
      throw DataError(file + ": " + e.what());
    }
  }
  snap.validate();
  return snap;
}

}  // namespace locset
