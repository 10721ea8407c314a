#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "locset/types.hpp"

namespace locset {

struct RocPoint {
  double threshold;  // score cutoff; predictions are score >= threshold
  double fpr;
  double tpr;
};

struct RocReport {
  std::vector<RocPoint> points;  // thresholds descending, (0,0) to (1,1)
  double auc = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

// ROC curve and area under it for (score, truth) pairs, truth in {0,1}.
// One point per distinct score plus a leading +inf threshold; tied scores
// collapse into a single point, so the trapezoid area equals the pairwise
// ranking statistic with ties counted half.
inline RocReport roc_auc(std::vector<std::pair<double, int>> scored) {
  std::size_t pos = 0, neg = 0;
  for (auto& [s, y] : scored) {
    if (y != 0 && y != 1) throw DataError("roc_auc: truth labels must be 0 or 1");
    if (y == 1) ++pos; else ++neg;
  }
  if (pos == 0 || neg == 0)
    throw DataError("roc_auc: need at least one positive and one negative");

  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  RocReport r;
  r.positives = pos;
  r.negatives = neg;
  r.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

  std::size_t tp = 0, fp = 0;
  double auc = 0.0;
  std::size_t i = 0;
  while (i < scored.size()) {
    double s = scored[i].first;
    std::size_t gp = 0, gn = 0;
    while (i < scored.size() && scored[i].first == s) {
      if (scored[i].second == 1) ++gp; else ++gn;
      ++i;
    }
    double fpr0 = static_cast<double>(fp) / static_cast<double>(neg);
    double tpr0 = static_cast<double>(tp) / static_cast<double>(pos);
    tp += gp;
    fp += gn;
    double fpr1 = static_cast<double>(fp) / static_cast<double>(neg);
    double tpr1 = static_cast<double>(tp) / static_cast<double>(pos);
    auc += (fpr1 - fpr0) * (tpr0 + tpr1) * 0.5;
    r.points.push_back({s, fpr1, tpr1});
  }
  r.auc = auc;
  return r;
}

}  // namespace locset
