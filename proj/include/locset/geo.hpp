#pragma once

#include <cmath>
#include <vector>

#include "locset/types.hpp"

namespace locset {

constexpr double kEarthRadiusMiles = 3958.8;
constexpr double kPi = 3.141592653589793238462643383279502884;

inline double deg2rad(double d) { return d * (kPi / 180.0); }

// Great-circle distance in miles (haversine, spherical earth).
inline double haversine_miles(GeoPoint a, GeoPoint b) {
  double lat1 = deg2rad(a.lat), lat2 = deg2rad(b.lat);
  double dlat = lat2 - lat1;
  double dlon = deg2rad(b.lon - a.lon);
  double s1 = std::sin(dlat / 2.0), s2 = std::sin(dlon / 2.0);
  double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  if (h > 1.0) h = 1.0;
  return 2.0 * kEarthRadiusMiles * std::asin(std::sqrt(h));
}

// Target region: a named disc on the sphere.
struct LocationSpec {
  std::string name;
  GeoPoint center;
  double radius_miles = 0.0;

  void validate() const {
    if (name.empty()) throw ConfigError("location: name must not be empty");
    if (!(radius_miles > 0.0) || !std::isfinite(radius_miles))
      throw ConfigError("location: radius must be finite and > 0");
    if (center.lat < -90.0 || center.lat > 90.0)
      throw ConfigError("location: latitude out of range");
    if (center.lon < -180.0 || center.lon > 180.0)
      throw ConfigError("location: longitude out of range");
  }
};

// Ground truth from geo-tagged posts: the single post nearest the region's
// center decides, inside iff within the radius. Users with no geo-tagged
// posts stay unknown. Ties on distance resolve to the earliest post in the
// given order.
inline GroundTruth label_ground_truth(const std::vector<Post>& posts,
                                      const LocationSpec& spec) {
  bool any = false;
  double best = 0.0;
  for (const auto& p : posts) {
    if (!p.geo.has_value()) continue;
    double d = haversine_miles(*p.geo, spec.center);
    if (!any || d < best) {
      best = d;
      any = true;
    }
  }
  if (!any) return GroundTruth::unknown;
  return best <= spec.radius_miles ? GroundTruth::inside : GroundTruth::outside;
}

}  // namespace locset
