#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "locset/types.hpp"

namespace locset {

// Hard caps mirroring the platform query semantics the engine was built
// against: search pages out at 1000 profiles, neighbor lists at 5000 ids.
constexpr std::size_t kMaxSearchResults = 1000;
constexpr std::size_t kMaxNeighbors = 5000;

// Read-only social data access. Implementations must be idempotent: the
// same query returns the same result for the lifetime of the source, and
// concurrent reads are safe. Failures are reported by throwing DataError;
// an unknown user id is not a failure (empty result).
class DataSource {
 public:
  virtual ~DataSource() = default;

  // Profiles whose text fields match the query, up to min(limit, 1000).
  virtual std::vector<UserProfile> user_search(const std::string& query,
                                               std::size_t limit) = 0;

  // Ids of accounts following `id`, up to min(limit, 5000).
  virtual std::vector<UserId> followers(UserId id, std::size_t limit) = 0;

  // Ids of accounts `id` follows, up to min(limit, 5000).
  virtual std::vector<UserId> friends(UserId id, std::size_t limit) = 0;

  // Profiles for the requested ids; unknown ids are simply absent from the
  // result. Order follows the request order.
  virtual std::vector<UserProfile> profiles(const std::vector<UserId>& ids) = 0;

  // Most recent posts, newest first, up to limit.
  virtual std::vector<Post> recent_posts(UserId id, std::size_t limit) = 0;
};

}  // namespace locset
