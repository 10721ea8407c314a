#pragma once

#include <cmath>
#include <optional>

#include "locset/types.hpp"

namespace locset {

// Pairwise energy parameters.
//
// gamma scales how strongly a follow link pulls both endpoints toward the
// same label; alpha1/alpha2 are the degree scales past which a link stops
// counting (accounts following thousands, or followed by thousands, carry
// little location signal); lambda discounts the both-outside case relative
// to the disagreement case.
struct LinkEnergyParams {
  double gamma = std::log(5.0);
  double alpha1 = 500.0;
  double alpha2 = 5000.0;
  double lambda = 0.98;

  void validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
      throw ConfigError("link energy: gamma must be finite and >= 0");
    if (!(alpha1 > 0.0) || !(alpha2 > 0.0))
      throw ConfigError("link energy: alpha1 and alpha2 must be > 0");
    if (!(lambda >= 0.0) || !(lambda <= 1.0))
      throw ConfigError("link energy: lambda must be in [0, 1]");
  }
};

// Energy of a disagreeing pair (labels 1,0 or 0,1) across one observed link:
//   gamma / (1 + exp(-2 + 2 z1/alpha1 + 2 z2/alpha2))
// Decays toward zero as either endpoint's degree grows past its alpha scale.
// A link with unknown degrees contributes nothing.
inline double link_energy_cross(std::optional<std::uint64_t> z1,
                                std::optional<std::uint64_t> z2,
                                const LinkEnergyParams& p) {
  if (!z1.has_value() || !z2.has_value()) return 0.0;
  double e = 2.0 * (static_cast<double>(*z1) / p.alpha1) +
             2.0 * (static_cast<double>(*z2) / p.alpha2) - 2.0;
  return p.gamma / (1.0 + std::exp(e));
}

// Full pairwise energy for labels (li, lj) on the follower/friend pair.
// Both inside costs nothing; both outside costs lambda times the
// disagreement energy. No link at all means no coupling.
inline double link_energy(const std::optional<RelationshipEdge>& edge, int li,
                          int lj, const LinkEnergyParams& p) {
  if (!edge.has_value()) return 0.0;
  if (li == 1 && lj == 1) return 0.0;
  double cross = link_energy_cross(edge->z1, edge->z2, p);
  if (li != lj) return cross;
  return p.lambda * cross;  // li == lj == 0
}

}  // namespace locset
