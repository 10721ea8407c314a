#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "locset/maxflow.hpp"
#include "locset/rng.hpp"
#include "support.hpp"

using namespace locset;

namespace {

struct RandomNet {
  std::size_t n = 0;
  // (u, v, cap) directed
  std::vector<std::tuple<int, int, double>> arcs;
};

RandomNet random_net(Rng& rng) {
  RandomNet net;
  net.n = 4 + rng.below(7);  // 4..10 nodes, node 0 = s, node 1 = t
  for (std::size_t u = 0; u < net.n; ++u)
    for (std::size_t v = 0; v < net.n; ++v) {
      if (u == v || !rng.bernoulli(0.38)) continue;
      // Integer capacities make the brute-force cut comparison exact.
      net.arcs.emplace_back(static_cast<int>(u), static_cast<int>(v),
                            static_cast<double>(rng.below(20)));
    }
  return net;
}

// Smallest s-t cut by enumerating every node bipartition.
double brute_min_cut(const RandomNet& net) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t n = net.n;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    if (!(mask & 1ULL)) continue;         // s on the source side
    if (mask & (1ULL << 1)) continue;     // t on the sink side
    double cap = 0.0;
    for (const auto& [u, v, c] : net.arcs)
      if ((mask >> u & 1ULL) && !(mask >> v & 1ULL)) cap += c;
    best = std::min(best, cap);
  }
  return best;
}

}  // namespace

TEST_CASE("a two-arc chain is limited by its bottleneck") {
  FlowNetwork net(3);
  net.add_arc_pair(0, 1, 3.0);
  net.add_arc_pair(1, 2, 2.0);
  CHECK(net.max_flow(0, 2) == 2.0);
  auto side = net.source_side(0);
  CHECK(side[0] == 1);
  CHECK(side[1] == 1);  // the 1->2 arc is the saturated one
  CHECK(side[2] == 0);
}

TEST_CASE("a diamond with a cross arc routes all five units") {
  FlowNetwork net(4);  // s=0, a=1, b=2, t=3
  net.add_arc_pair(0, 1, 3.0);
  net.add_arc_pair(0, 2, 2.0);
  net.add_arc_pair(1, 2, 1.0);
  net.add_arc_pair(1, 3, 2.0);
  net.add_arc_pair(2, 3, 3.0);
  CHECK(net.max_flow(0, 3) == 5.0);
  auto side = net.source_side(0);
  CHECK(side[0] == 1);
  CHECK(side[1] == 0);
  CHECK(side[2] == 0);
  CHECK(side[3] == 0);
}

TEST_CASE("arc pairs carry capacity in both directions") {
  FlowNetwork net(2);
  int fwd = net.add_arc_pair(0, 1, 4.0, 2.5);
  CHECK(net.max_flow(0, 1) == 4.0);
  CHECK(net.residual(fwd) == 0.0);
  // The stated reverse capacity plus the pushed flow is now available.
  CHECK(net.residual(fwd ^ 1) == 6.5);
}

TEST_CASE("unreachable sinks yield zero flow") {
  FlowNetwork net(4);
  net.add_arc_pair(0, 1, 5.0);
  net.add_arc_pair(2, 3, 5.0);
  CHECK(net.max_flow(0, 3) == 0.0);
  auto side = net.source_side(0);
  CHECK(side[0] == 1);
  CHECK(side[1] == 1);
  CHECK(side[2] == 0);
  CHECK(side[3] == 0);
}

TEST_CASE("zero-capacity arcs do not carry flow") {
  FlowNetwork net(3);
  net.add_arc_pair(0, 1, 0.0);
  net.add_arc_pair(1, 2, 7.0);
  CHECK(net.max_flow(0, 2) == 0.0);
  auto side = net.source_side(0);
  CHECK(side[1] == 0);  // a zero arc is already saturated
}

TEST_CASE("parallel arcs between the same nodes add up") {
  FlowNetwork net(2);
  net.add_arc_pair(0, 1, 1.5);
  net.add_arc_pair(0, 1, 2.5);
  CHECK(net.max_flow(0, 1) == 4.0);
}

TEST_CASE("flow value matches the brute-force minimum cut") {
  Rng rng(51);
  for (int trial = 0; trial < 120; ++trial) {
    RandomNet spec = random_net(rng);
    FlowNetwork net(spec.n);
    for (const auto& [u, v, c] : spec.arcs) net.add_arc_pair(u, v, c);
    double flow = net.max_flow(0, 1);
    CHECK(flow == brute_min_cut(spec));

    // The residual source side must itself be an s-t cut of that value.
    auto side = net.source_side(0);
    CHECK(side[0] == 1);
    CHECK(side[1] == 0);
    double crossing = 0.0;
    for (const auto& [u, v, c] : spec.arcs)
      if (side[u] && !side[v]) crossing += c;
    CHECK(crossing == flow);
  }
}

TEST_CASE("repeated runs on identical graphs agree exactly") {
  Rng rng(52);
  RandomNet spec = random_net(rng);
  std::vector<double> flows;
  std::vector<std::vector<char>> sides;
  for (int run = 0; run < 3; ++run) {
    FlowNetwork net(spec.n);
    for (const auto& [u, v, c] : spec.arcs) net.add_arc_pair(u, v, c);
    flows.push_back(net.max_flow(0, 1));
    sides.push_back(net.source_side(0));
  }
  CHECK(flows[0] == flows[1]);
  CHECK(flows[1] == flows[2]);
  CHECK(sides[0] == sides[1]);
  CHECK(sides[1] == sides[2]);
}
