#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "locset/types.hpp"

namespace locset {

// Dinic max-flow on doubles. Arcs are stored in pairs so arc k and its
// reverse k^1 share storage; pushing flow on one grows the other's residual.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t node_count)
      : head_(node_count, -1) {}

  std::size_t node_count() const { return head_.size(); }

  // Adds u->v with capacity cap_uv and v->u with cap_vu as one arc pair.
  // Returns the index of the forward arc; the reverse arc is index^1.
  int add_arc_pair(int u, int v, double cap_uv, double cap_vu = 0.0) {
    int idx = static_cast<int>(arcs_.size());
    arcs_.push_back({v, head_[u], cap_uv});
    head_[u] = idx;
    arcs_.push_back({u, head_[v], cap_vu});
    head_[v] = idx + 1;
    return idx;
  }

  double residual(int arc) const { return arcs_[arc].cap; }

  double max_flow(int s, int t) {
    double total = 0.0;
    while (bfs(s, t)) {
      iter_ = head_;
      total += blocking_flow(s, t);
    }
    return total;
  }

  // Nodes reachable from s in the residual graph after max_flow: the
  // source side of a minimum cut (the smallest one, since it takes only
  // strictly usable residual arcs). Residuals at or below eps count as
  // saturated so rounding debris cannot leak across the cut.
  std::vector<char> source_side(int s, double eps = 1e-12) const {
    std::vector<char> seen(head_.size(), 0);
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int a = head_[u]; a != -1; a = arcs_[a].next) {
        if (arcs_[a].cap > eps && !seen[arcs_[a].to]) {
          seen[arcs_[a].to] = 1;
          stack.push_back(arcs_[a].to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    int to;
    int next;
    double cap;
  };

  bool bfs(int s, int t) {
    level_.assign(head_.size(), -1);
    level_[s] = 0;
    queue_.clear();
    queue_.push_back(s);
    for (std::size_t q = 0; q < queue_.size(); ++q) {
      int u = queue_[q];
      for (int a = head_[u]; a != -1; a = arcs_[a].next) {
        if (arcs_[a].cap > 0.0 && level_[arcs_[a].to] < 0) {
          level_[arcs_[a].to] = level_[u] + 1;
          queue_.push_back(arcs_[a].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  // Iterative DFS with current-arc pointers. Augments along shortest paths
  // until the level graph is exhausted. Termination is exact: every
  // augmentation zeroes its bottleneck arc (x - x == 0), and dead nodes
  // leave the level graph.
  double blocking_flow(int s, int t) {
    double added = 0.0;
    path_.clear();
    int cur = s;
    while (true) {
      if (cur == t) {
        double f = std::numeric_limits<double>::infinity();
        for (int a : path_)
          if (arcs_[a].cap < f) f = arcs_[a].cap;
        for (int a : path_) {
          arcs_[a].cap -= f;
          arcs_[a ^ 1].cap += f;
        }
        added += f;
        std::size_t k = 0;
        while (k < path_.size() && arcs_[path_[k]].cap > 0.0) ++k;
        path_.resize(k);
        cur = path_.empty() ? s : arcs_[path_.back()].to;
        continue;
      }
      bool advanced = false;
      for (int& a = iter_[cur]; a != -1; a = arcs_[a].next) {
        if (arcs_[a].cap > 0.0 && level_[arcs_[a].to] == level_[cur] + 1) {
          path_.push_back(a);
          cur = arcs_[a].to;
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        level_[cur] = -1;
        if (cur == s) break;
        int pa = path_.back();
        path_.pop_back();
        cur = arcs_[pa ^ 1].to;
        iter_[cur] = arcs_[pa].next;
      }
    }
    return added;
  }

  std::vector<Arc> arcs_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> iter_;
  std::vector<int> queue_;
  std::vector<int> path_;
};

}  // namespace locset
