#pragma once

#include <map>
#include <variant>
#include <vector>

#include "locset/features.hpp"
#include "locset/types.hpp"

namespace locset {

// Profile evidence enters the energy as a single log-odds value delta per
// user: positive means the profile looks local. The unary energies are the
// re-centered pair
//   phi(x, 1) = max(0, -delta),  phi(x, 0) = max(0, delta)
// which keeps both nonnegative while preserving their difference.

// Hand-tuned prior model: category odds only.
struct FixedOddsModel {
  CategorizerConfig config;

  double delta(const UserProfile& u) const {
    return fixed_odds_delta(categorize(u, config), config.odds);
  }
};

// Trained linear model over the binary feature vector.
struct LinearModel {
  FeatureSchema schema;
  std::vector<double> beta;

  double delta(const ProfileFeatures& x) const {
    if (x.size() != beta.size() || beta.size() != schema.size())
      throw DimensionError("linear model: feature vector length " +
                           std::to_string(x.size()) + " does not match schema size " +
                           std::to_string(schema.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i]) s += beta[i];
    return s;
  }

  double delta(const UserProfile& u) const {
    return delta(extract_features(u, schema));
  }
};

// Externally supplied per-user deltas (precomputed scores, harness inputs).
struct PinnedDeltaModel {
  std::map<UserId, double> delta_by_user;

  double delta(const UserProfile& u) const {
    auto it = delta_by_user.find(u.id);
    if (it == delta_by_user.end())
      throw DataError("pinned delta model: no delta for user " +
                      std::to_string(u.id));
    return it->second;
  }
};

using ProfileEnergyModel = std::variant<FixedOddsModel, LinearModel, PinnedDeltaModel>;

inline double profile_energy_delta(const UserProfile& u,
                                   const ProfileEnergyModel& model) {
  return std::visit([&](const auto& m) { return m.delta(u); }, model);
}

inline double profile_energy_delta(const ProfileFeatures& x,
                                   const LinearModel& model) {
  return model.delta(x);
}

// Unary energies for one user given delta.
inline double phi_member(double delta) { return delta < 0.0 ? -delta : 0.0; }
inline double phi_nonmember(double delta) { return delta > 0.0 ? delta : 0.0; }

}  // namespace locset
