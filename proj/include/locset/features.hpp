#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "locset/types.hpp"
#include "locset/util.hpp"

namespace locset {

enum class ProfileField : int { location = 0, description = 1, name = 2, screen_name = 3 };

constexpr std::array<ProfileField, 4> kProfileFields = {
    ProfileField::location, ProfileField::description, ProfileField::name,
    ProfileField::screen_name};

inline const char* profile_field_name(ProfileField f) {
  switch (f) {
    case ProfileField::location: return "location";
    case ProfileField::description: return "description";
    case ProfileField::name: return "name";
    case ProfileField::screen_name: return "screen_name";
  }
  return "?";
}

inline const std::string& profile_field_text(const UserProfile& u, ProfileField f) {
  switch (f) {
    case ProfileField::location: return u.location_text;
    case ProfileField::description: return u.description;
    case ProfileField::name: return u.name;
    case ProfileField::screen_name: return u.screen_name;
  }
  return u.location_text;
}

// One binary feature. term_field tests a single term against one profile
// field; list_field tests whether any term of the secondary list appears in
// one field; the rest are profile flags.
struct FeatureDescriptor {
  enum class Kind {
    term_field,
    list_field,
    empty_location,
    language_match,
    utc_offset_match,
    protected_flag,
    verified_flag,
  };
  Kind kind = Kind::term_field;
  std::string term;             // term_field only
  ProfileField field = ProfileField::location;  // term_field / list_field

  std::string label() const {
    switch (kind) {
      case Kind::term_field:
        return "term:" + term + ":" + profile_field_name(field);
      case Kind::list_field:
        return std::string("list:") + profile_field_name(field);
      case Kind::empty_location: return "empty_location";
      case Kind::language_match: return "language_match";
      case Kind::utc_offset_match: return "utc_offset_match";
      case Kind::protected_flag: return "protected";
      case Kind::verified_flag: return "verified";
    }
    return "?";
  }
};

using ProfileFeatures = std::vector<std::uint8_t>;

// Fixed feature layout: for every primary term, one indicator per profile
// field (substring, ASCII case-insensitive); four any-of indicators for the
// secondary term list; then five profile flags. 12 primary terms gives
// 12*4 + 4 + 5 = 57 features.
class FeatureSchema {
 public:
  FeatureSchema() = default;

  FeatureSchema(std::vector<std::string> primary_terms,
                std::vector<std::string> secondary_terms,
                std::string language, std::optional<int> utc_offset_seconds)
      : primary_terms_(std::move(primary_terms)),
        secondary_terms_(std::move(secondary_terms)),
        language_(std::move(language)),
        utc_offset_seconds_(utc_offset_seconds) {
    for (const auto& t : primary_terms_)
      if (t.empty()) throw ConfigError("feature schema: empty primary term");
    build_descriptors();
  }

  std::size_t size() const { return descriptors_.size(); }
  const std::vector<FeatureDescriptor>& descriptors() const { return descriptors_; }
  const std::vector<std::string>& primary_terms() const { return primary_terms_; }
  const std::vector<std::string>& secondary_terms() const { return secondary_terms_; }
  const std::string& language() const { return language_; }
  std::optional<int> utc_offset_seconds() const { return utc_offset_seconds_; }

  bool operator==(const FeatureSchema& o) const {
    return primary_terms_ == o.primary_terms_ &&
           secondary_terms_ == o.secondary_terms_ && language_ == o.language_ &&
           utc_offset_seconds_ == o.utc_offset_seconds_;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["primary_terms"] = primary_terms_;
    j["secondary_terms"] = secondary_terms_;
    j["language"] = language_;
    if (utc_offset_seconds_.has_value())
      j["utc_offset_seconds"] = *utc_offset_seconds_;
    else
      j["utc_offset_seconds"] = nullptr;
    return j;
  }

  static FeatureSchema from_json(const nlohmann::json& j) {
    std::optional<int> utc;
    if (j.contains("utc_offset_seconds") && !j.at("utc_offset_seconds").is_null())
      utc = j.at("utc_offset_seconds").get<int>();
    return FeatureSchema(j.at("primary_terms").get<std::vector<std::string>>(),
                         j.at("secondary_terms").get<std::vector<std::string>>(),
                         j.value("language", std::string{}), utc);
  }

 private:
  void build_descriptors() {
    descriptors_.clear();
    for (const auto& term : primary_terms_)
      for (ProfileField f : kProfileFields)
        descriptors_.push_back({FeatureDescriptor::Kind::term_field, term, f});
    for (ProfileField f : kProfileFields)
      descriptors_.push_back({FeatureDescriptor::Kind::list_field, {}, f});
    descriptors_.push_back({FeatureDescriptor::Kind::empty_location, {}, {}});
    descriptors_.push_back({FeatureDescriptor::Kind::language_match, {}, {}});
    descriptors_.push_back({FeatureDescriptor::Kind::utc_offset_match, {}, {}});
    descriptors_.push_back({FeatureDescriptor::Kind::protected_flag, {}, {}});
    descriptors_.push_back({FeatureDescriptor::Kind::verified_flag, {}, {}});
  }

  std::vector<std::string> primary_terms_;
  std::vector<std::string> secondary_terms_;
  std::string language_;
  std::optional<int> utc_offset_seconds_;
  std::vector<FeatureDescriptor> descriptors_;
};

inline ProfileFeatures extract_features(const UserProfile& u,
                                        const FeatureSchema& schema) {
  ProfileFeatures x;
  x.reserve(schema.size());
  for (const auto& d : schema.descriptors()) {
    bool v = false;
    switch (d.kind) {
      case FeatureDescriptor::Kind::term_field:
        v = contains_ci(profile_field_text(u, d.field), d.term);
        break;
      case FeatureDescriptor::Kind::list_field: {
        const std::string& text = profile_field_text(u, d.field);
        for (const auto& t : schema.secondary_terms())
          if (contains_ci(text, t)) { v = true; break; }
        break;
      }
      case FeatureDescriptor::Kind::empty_location:
        v = trim(u.location_text).empty();
        break;
      case FeatureDescriptor::Kind::language_match:
        v = !schema.language().empty() &&
            equals_ci(u.language_code, schema.language());
        break;
      case FeatureDescriptor::Kind::utc_offset_match:
        v = schema.utc_offset_seconds().has_value() &&
            u.utc_offset_seconds.has_value() &&
            *u.utc_offset_seconds == *schema.utc_offset_seconds();
        break;
      case FeatureDescriptor::Kind::protected_flag:
        v = u.protected_account;
        break;
      case FeatureDescriptor::Kind::verified_flag:
        v = u.verified;
        break;
    }
    x.push_back(v ? 1 : 0);
  }
  return x;
}

// Heuristic profile categories, checked in order; first match wins.
//   A: a strong-evidence conjunction matches across the profile text fields
//   B: the location names some other big city (minus allowed exceptions)
//   C: a weak-evidence term appears somewhere in the profile
//   D: the location is empty or names only the wider region
//   E: everything else
enum class Category : int { A = 0, B = 1, C = 2, D = 3, E = 4 };

inline const char* category_name(Category c) {
  switch (c) {
    case Category::A: return "A";
    case Category::B: return "B";
    case Category::C: return "C";
    case Category::D: return "D";
    case Category::E: return "E";
  }
  return "?";
}

struct CategorizerConfig {
  // Each entry of strong_conjunctions is a set of terms that must all appear
  // somewhere in the profile's four text fields (category A).
  std::vector<std::vector<std::string>> strong_conjunctions;
  // Any of these appearing in any text field is weak evidence (category C).
  std::vector<std::string> weak_terms;
  // Location exactly equal to one of these (or empty) is neutral (category D).
  std::vector<std::string> neutral_locations;
  // Large-city names that push a profile to category B when they appear in
  // the location field, except for the listed exclusions.
  std::vector<std::string> world_cities;
  std::vector<std::string> world_city_exclusions;
  // Prior odds in:out per category, as a (numerator, denominator) pair.
  std::map<Category, std::pair<double, double>> odds;

  void validate() const {
    if (weak_terms.empty())
      throw ConfigError("categorizer: weak term list must not be empty");
    if (neutral_locations.empty())
      throw ConfigError("categorizer: neutral location list must not be empty");
    if (world_cities.empty())
      throw ConfigError("categorizer: world city list must not be empty");
    for (const auto& conj : strong_conjunctions)
      if (conj.empty())
        throw ConfigError("categorizer: empty conjunction in strong term list");
    for (Category c : {Category::A, Category::B, Category::C, Category::D, Category::E}) {
      auto it = odds.find(c);
      if (it == odds.end())
        throw ConfigError(std::string("categorizer: missing odds for category ") +
                          category_name(c));
      if (!(it->second.first > 0.0) || !(it->second.second > 0.0))
        throw ConfigError(std::string("categorizer: odds must be positive for category ") +
                          category_name(c));
    }
  }
};

// Odds from the field studies that introduced the category scheme.
inline std::map<Category, std::pair<double, double>> default_category_odds() {
  return {
      {Category::A, {50.0, 1.0}},
      {Category::B, {1.0, 25.0}},
      {Category::C, {1.0, 2.0}},
      {Category::D, {1.0, 5.0}},
      {Category::E, {1.0, 8.0}},
  };
}

inline Category categorize(const UserProfile& u, const CategorizerConfig& cfg) {
  // A: every term of some conjunction appears in at least one text field.
  for (const auto& conj : cfg.strong_conjunctions) {
    bool all = !conj.empty();
    for (const auto& term : conj) {
      bool found = false;
      for (ProfileField f : kProfileFields)
        if (contains_ci(profile_field_text(u, f), term)) { found = true; break; }
      if (!found) { all = false; break; }
    }
    if (all) return Category::A;
  }
  // B: the location mentions a big city that is not excluded.
  for (const auto& city : cfg.world_cities) {
    if (!contains_ci(u.location_text, city)) continue;
    bool excluded = false;
    for (const auto& ex : cfg.world_city_exclusions)
      if (equals_ci(city, ex)) { excluded = true; break; }
    if (!excluded) return Category::B;
  }
  // C: weak term anywhere in the profile text.
  for (const auto& term : cfg.weak_terms)
    for (ProfileField f : kProfileFields)
      if (contains_ci(profile_field_text(u, f), term)) return Category::C;
  // D: empty location, or location exactly a neutral regional string.
  std::string loc = trim(u.location_text);
  if (loc.empty()) return Category::D;
  for (const auto& n : cfg.neutral_locations)
    if (equals_ci(loc, trim(n))) return Category::D;
  return Category::E;
}

// log(in:out odds) for the category; positive favors membership.
inline double fixed_odds_delta(
    Category c, const std::map<Category, std::pair<double, double>>& odds) {
  auto it = odds.find(c);
  if (it == odds.end())
    throw ConfigError(std::string("no odds configured for category ") +
                      category_name(c));
  auto [num, den] = it->second;
  if (!(num > 0.0) || !(den > 0.0))
    throw ConfigError(std::string("odds must be positive for category ") +
                      category_name(c));
  return std::log(num / den);
}

// One city name per line; blank lines ignored; names are matched
// case-insensitively, so the file's own casing does not matter.
inline std::vector<std::string> load_city_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open city list: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (!t.empty()) out.push_back(t);
  }
  if (out.empty()) throw ConfigError("city list is empty: " + path);
  return out;
}

}  // namespace locset
