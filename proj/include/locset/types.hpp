#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace locset {

using UserId = std::uint64_t;

// Label assignment: 1 = member of the target location, 0 = not.
using LabelVector = std::map<UserId, int>;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
};

struct UserProfile {
  UserId id = 0;
  std::string screen_name;
  std::string name;
  std::string description;
  std::string location_text;  // free-form, user supplied
  std::string language_code;
  std::optional<int> utc_offset_seconds;
  bool protected_account = false;
  bool verified = false;
  std::uint64_t friends_count = 0;    // accounts this user follows
  std::uint64_t followers_count = 0;  // accounts following this user

  bool operator==(const UserProfile&) const = default;
};

// Directed follow relation: follower follows friend_id.
// z1 = follower's friend count, z2 = the followed account's follower count.
// Either may be unknown when the profile was never fetched.
struct RelationshipEdge {
  UserId follower = 0;
  UserId friend_id = 0;
  std::optional<std::uint64_t> z1;
  std::optional<std::uint64_t> z2;

  bool operator==(const RelationshipEdge&) const = default;
};

struct Post {
  std::string text;
  std::optional<GeoPoint> geo;
  std::string timestamp;  // ISO 8601 date or datetime, may be empty

  bool operator==(const Post& o) const {
    bool geo_eq = geo.has_value() == o.geo.has_value() &&
                  (!geo || (geo->lat == o.geo->lat && geo->lon == o.geo->lon));
    return geo_eq && text == o.text && timestamp == o.timestamp;
  }
};

enum class GroundTruth : int { outside = 0, inside = 1, unknown = 2 };

// Error taxonomy. The CLI maps ConfigError to exit code 1 and
// DataError (and subclasses) to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameter values, malformed configuration, bad CLI usage.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed input files, inconsistent snapshots, failed data access.
struct DataError : Error {
  using Error::Error;
};

// Feature vector length does not match the model's schema.
struct DimensionError : DataError {
  using DataError::DataError;
};

// Training cannot proceed (e.g. single-class training set).
struct TrainingError : DataError {
  using DataError::DataError;
};

}  // namespace locset
