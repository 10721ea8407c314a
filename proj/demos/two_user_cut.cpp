// Smallest interesting example: two users joined by one follow link.
// The first user's profile says "inside", the second's is ambiguous; the
// link drags the second user in once gamma is large enough.

#include <iostream>

#include "locset/graph_cut.hpp"

using namespace locset;

int main() {
  Snapshot snap;
  UserProfile a;
  a.id = 1;
  UserProfile b;
  b.id = 2;
  snap.add_user(a);
  snap.add_user(b);
  RelationshipEdge e;
  e.follower = 2;
  e.friend_id = 1;
  e.z1 = 50;   // the follower follows 50 accounts
  e.z2 = 120;  // the friend has 120 followers
  snap.add_edge(e);

  PinnedDeltaModel deltas;
  deltas.delta_by_user[1] = 2.0;   // clearly local
  deltas.delta_by_user[2] = -0.4;  // slightly not

  for (double gamma : {0.0, 0.3, 1.0}) {
    LinkEnergyParams params;
    params.gamma = gamma;
    auto result = classify(snap, deltas, params);
    std::cout << "gamma=" << gamma << "  labels: 1->" << result.labels[1]
              << " 2->" << result.labels[2] << "  energy=" << result.energy
              << "  P1(2)=" << result.membership_probability[2] << '\n';
  }
  return 0;
}
