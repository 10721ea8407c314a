#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "locset/dataset.hpp"
#include "locset/link_energy.hpp"
#include "locset/maxflow.hpp"
#include "locset/profile_energy.hpp"
#include "locset/types.hpp"
#include "locset/util.hpp"

namespace locset {

// Pairwise energies of one observed link under the four label combinations.
// Both-inside is zero by convention, so only three values are stored.
// psi_10: follower inside, friend outside; psi_01: the reverse; psi_00: both
// outside.
struct PairPotentials {
  double psi_10 = 0.0;
  double psi_01 = 0.0;
  double psi_00 = 0.0;
};

inline PairPotentials pair_potentials(const RelationshipEdge& e,
                                      const LinkEnergyParams& p) {
  double cross = link_energy_cross(e.z1, e.z2, p);
  return {cross, cross, p.lambda * cross};
}

inline double pair_energy(const PairPotentials& psi, int li, int lj) {
  if (li == 1) return lj == 1 ? 0.0 : psi.psi_10;
  return lj == 1 ? psi.psi_01 : psi.psi_00;
}

// s-t network encoding the labeling energy: cutting a labeling's arcs costs
// exactly that labeling's energy. Per user i with profile log-odds delta_i,
//   (i -> t)  phi(x_i, 1) = max(0, -delta_i)
//   (s -> i)  phi(x_i, 0) = max(0, delta_i), plus half of psi_00 summed over
//             the user's links
// and per link (i, j),
//   (i -> j)  psi_10 - psi_00 / 2
//   (j -> i)  psi_01 - psi_00 / 2.
// Nodes on the source side of the minimum cut take label 1.
struct EnergyGraph {
  std::vector<UserId> users;  // node index -> user
  std::vector<double> source_cap;
  std::vector<double> sink_cap;
  struct PairArc {
    std::uint32_t i, j;
    double cap_ij, cap_ji;
  };
  std::vector<PairArc> pair_arcs;
  std::unordered_map<UserId, std::uint32_t> index;
};

inline EnergyGraph build_energy_graph(
    const std::vector<std::pair<UserId, double>>& profile_deltas,
    const std::vector<std::pair<RelationshipEdge, PairPotentials>>& edges,
    const LinkEnergyParams& params) {
  params.validate();
  EnergyGraph g;
  g.users.reserve(profile_deltas.size());
  g.source_cap.reserve(profile_deltas.size());
  g.sink_cap.reserve(profile_deltas.size());
  for (const auto& [id, delta] : profile_deltas) {
    if (!std::isfinite(delta))
      throw DataError("energy graph: non-finite delta for user " +
                      std::to_string(id));
    if (!g.index.emplace(id, static_cast<std::uint32_t>(g.users.size())).second)
      throw DataError("energy graph: duplicate user " + std::to_string(id));
    g.users.push_back(id);
    g.source_cap.push_back(phi_nonmember(delta));
    g.sink_cap.push_back(phi_member(delta));
  }
  g.pair_arcs.reserve(edges.size());
  for (const auto& [e, psi] : edges) {
    auto it_i = g.index.find(e.follower);
    auto it_j = g.index.find(e.friend_id);
    if (it_i == g.index.end() || it_j == g.index.end())
      throw DataError("energy graph: edge references unknown user");
    if (it_i == it_j || e.follower == e.friend_id)
      throw DataError("energy graph: self loop on user " +
                      std::to_string(e.follower));
    if (!(psi.psi_10 >= 0.0) || !(psi.psi_01 >= 0.0) || !(psi.psi_00 >= 0.0) ||
        !std::isfinite(psi.psi_10) || !std::isfinite(psi.psi_01) ||
        !std::isfinite(psi.psi_00))
      throw DataError("energy graph: pair potentials must be finite and >= 0");
    double half = psi.psi_00 * 0.5;
    double cap_ij = psi.psi_10 - half;
    double cap_ji = psi.psi_01 - half;
    // Cutting arcs to reproduce the energy needs each disagreement cost to
    // cover half the both-outside cost; with psi_11 = 0 this is the
    // submodularity requirement in splittable form.
    if (cap_ij < 0.0 || cap_ji < 0.0)
      throw ConfigError(
          "energy graph: pair potentials violate submodularity "
          "(psi_00 > 2 * min(psi_10, psi_01))");
    g.source_cap[it_i->second] += half;
    g.source_cap[it_j->second] += half;
    g.pair_arcs.push_back({it_i->second, it_j->second, cap_ij, cap_ji});
  }
  return g;
}

// Total capacity of the arcs a labeling cuts: source arcs of 0-labeled
// users, sink arcs of 1-labeled users, and pair arcs leaving the 1 side.
// Equals the labeling's energy by construction.
inline double cut_capacity(const EnergyGraph& g, const LabelVector& labels) {
  std::vector<int> l(g.users.size());
  for (std::size_t i = 0; i < g.users.size(); ++i) {
    auto it = labels.find(g.users[i]);
    if (it == labels.end())
      throw DataError("cut_capacity: missing label for user " +
                      std::to_string(g.users[i]));
    if (it->second != 0 && it->second != 1)
      throw DataError("cut_capacity: labels must be 0 or 1");
    l[i] = it->second;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < g.users.size(); ++i)
    total += l[i] == 1 ? g.sink_cap[i] : g.source_cap[i];
  for (const auto& a : g.pair_arcs) {
    if (l[a.i] == 1 && l[a.j] == 0) total += a.cap_ij;
    if (l[a.i] == 0 && l[a.j] == 1) total += a.cap_ji;
  }
  return total;
}

struct MinCutResult {
  double flow_value = 0.0;
  double cut_value = 0.0;
  std::vector<UserId> source_side;  // label-1 users, ascending id
};

// Exact minimum cut via max-flow. Returns the minimal source side, i.e.
// ties break toward label 0.
inline MinCutResult min_cut(const EnergyGraph& g) {
  const std::size_t n = g.users.size();
  FlowNetwork net(n + 2);
  const int s = static_cast<int>(n);
  const int t = static_cast<int>(n) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (g.source_cap[i] > 0.0)
      net.add_arc_pair(s, static_cast<int>(i), g.source_cap[i]);
    if (g.sink_cap[i] > 0.0)
      net.add_arc_pair(static_cast<int>(i), t, g.sink_cap[i]);
  }
  for (const auto& a : g.pair_arcs)
    if (a.cap_ij > 0.0 || a.cap_ji > 0.0)
      net.add_arc_pair(static_cast<int>(a.i), static_cast<int>(a.j), a.cap_ij,
                       a.cap_ji);

  MinCutResult r;
  r.flow_value = net.max_flow(s, t);
  std::vector<char> side = net.source_side(s);
  LabelVector labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels[g.users[i]] = side[i] ? 1 : 0;
    if (side[i]) r.source_side.push_back(g.users[i]);
  }
  std::sort(r.source_side.begin(), r.source_side.end());
  r.cut_value = cut_capacity(g, labels);
  return r;
}

namespace detail {

struct EdgeWithPotentials {
  std::size_t i, j;  // indices into the delta array
  PairPotentials psi;
};

// Shared scaffolding for classify / energy_of / local_probability: profile
// deltas in snapshot user order plus per-edge potentials.
struct EnergyTerms {
  std::vector<double> deltas;
  std::vector<EdgeWithPotentials> edges;
};

inline EnergyTerms energy_terms(const Snapshot& snap,
                                const ProfileEnergyModel& model,
                                const LinkEnergyParams& params) {
  EnergyTerms t;
  t.deltas.reserve(snap.users.size());
  for (const auto& u : snap.users)
    t.deltas.push_back(profile_energy_delta(u, model));
  t.edges.reserve(snap.edges.size());
  for (const auto& e : snap.edges) {
    std::size_t i = snap.user_index.at(e.follower);
    std::size_t j = snap.user_index.at(e.friend_id);
    t.edges.push_back({i, j, pair_potentials(e, params)});
  }
  return t;
}

inline double total_energy(const EnergyTerms& t, const std::vector<int>& l) {
  double e = 0.0;
  for (std::size_t i = 0; i < t.deltas.size(); ++i)
    e += l[i] == 1 ? phi_member(t.deltas[i]) : phi_nonmember(t.deltas[i]);
  for (const auto& ep : t.edges) e += pair_energy(ep.psi, l[ep.i], l[ep.j]);
  return e;
}

inline std::vector<int> label_array(const Snapshot& snap,
                                    const LabelVector& labels) {
  std::vector<int> l(snap.users.size());
  for (std::size_t i = 0; i < snap.users.size(); ++i) {
    auto it = labels.find(snap.users[i].id);
    if (it == labels.end())
      throw DataError("missing label for user " +
                      std::to_string(snap.users[i].id));
    if (it->second != 0 && it->second != 1)
      throw DataError("labels must be 0 or 1");
    l[i] = it->second;
  }
  return l;
}

// P(l_i = 1 | rest of the labeling): the Gibbs conditional of the energy,
// sigmoid(delta_i - sum over incident links of psi(1, l_j) - psi(0, l_j)).
inline std::vector<double> local_probabilities(const EnergyTerms& t,
                                               const std::vector<int>& l) {
  std::vector<double> shift(t.deltas.size(), 0.0);
  for (const auto& ep : t.edges) {
    // For the follower i: psi(1, l_j) - psi(0, l_j). For the friend j:
    // psi(l_i, 1) - psi(l_i, 0). psi_11 is zero.
    shift[ep.i] += l[ep.j] == 1 ? -ep.psi.psi_01 : ep.psi.psi_10 - ep.psi.psi_00;
    shift[ep.j] += l[ep.i] == 1 ? -ep.psi.psi_10 : ep.psi.psi_01 - ep.psi.psi_00;
  }
  std::vector<double> p(t.deltas.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = sigmoid(t.deltas[i] - shift[i]);
  return p;
}

}  // namespace detail

// Energy of a full labeling of the snapshot: unary profile terms plus
// pairwise link terms.
inline double energy_of(const Snapshot& snap, const LabelVector& labels,
                        const ProfileEnergyModel& model,
                        const LinkEnergyParams& params) {
  params.validate();
  auto terms = detail::energy_terms(snap, model, params);
  return detail::total_energy(terms, detail::label_array(snap, labels));
}

// Membership probability of one user conditioned on the other labels.
inline double local_probability(const Snapshot& snap, const LabelVector& labels,
                                UserId id, const ProfileEnergyModel& model,
                                const LinkEnergyParams& params) {
  params.validate();
  auto it = snap.user_index.find(id);
  if (it == snap.user_index.end())
    throw DataError("local_probability: unknown user " + std::to_string(id));
  auto terms = detail::energy_terms(snap, model, params);
  auto l = detail::label_array(snap, labels);
  return detail::local_probabilities(terms, l)[it->second];
}

struct ClassificationResult {
  LabelVector labels;
  double energy = 0.0;      // energy of the returned labeling (the minimum)
  double cut_value = 0.0;   // capacity of the minimum cut, equals energy
  double flow_value = 0.0;  // max flow, equals cut_value up to rounding
  std::map<UserId, double> membership_probability;  // Gibbs conditional per user
};

// Exact minimum-energy labeling of the snapshot.
inline ClassificationResult classify(const Snapshot& snap,
                                     const ProfileEnergyModel& model,
                                     const LinkEnergyParams& params) {
  params.validate();
  auto terms = detail::energy_terms(snap, model, params);

  std::vector<std::pair<UserId, double>> deltas;
  deltas.reserve(snap.users.size());
  for (std::size_t i = 0; i < snap.users.size(); ++i)
    deltas.emplace_back(snap.users[i].id, terms.deltas[i]);
  std::vector<std::pair<RelationshipEdge, PairPotentials>> edges;
  edges.reserve(snap.edges.size());
  for (std::size_t k = 0; k < snap.edges.size(); ++k)
    edges.emplace_back(snap.edges[k], terms.edges[k].psi);

  EnergyGraph g = build_energy_graph(deltas, edges, params);
  MinCutResult cut = min_cut(g);

  ClassificationResult r;
  r.cut_value = cut.cut_value;
  r.flow_value = cut.flow_value;
  std::vector<int> l(snap.users.size(), 0);
  for (UserId id : cut.source_side) l[snap.user_index.at(id)] = 1;
  for (std::size_t i = 0; i < snap.users.size(); ++i)
    r.labels[snap.users[i].id] = l[i];
  r.energy = detail::total_energy(terms, l);
  auto probs = detail::local_probabilities(terms, l);
  for (std::size_t i = 0; i < snap.users.size(); ++i)
    r.membership_probability[snap.users[i].id] = probs[i];
  return r;
}

}  // namespace locset
