#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "locset/features.hpp"
#include "locset/profile_energy.hpp"
#include "locset/rng.hpp"
#include "locset/roc.hpp"
#include "locset/types.hpp"
#include "locset/util.hpp"

namespace locset {

// Geo-labeled design matrix. Rows are users with known ground truth; the
// schema fixes the column layout.
struct TrainingSet {
  std::vector<ProfileFeatures> x;
  std::vector<int> y;  // 0/1
  FeatureSchema schema;

  std::size_t size() const { return x.size(); }

  void validate() const {
    if (x.size() != y.size())
      throw DataError("training set: row/label count mismatch");
    for (const auto& row : x)
      if (row.size() != schema.size())
        throw DimensionError("training set: row width " +
                             std::to_string(row.size()) +
                             " does not match schema size " +
                             std::to_string(schema.size()));
    for (int v : y)
      if (v != 0 && v != 1)
        throw DataError("training set: labels must be 0 or 1");
  }
};

enum class Penalty { l1, l2 };

struct TrainConfig {
  Penalty penalty = Penalty::l2;
  double c = 1.0;  // likelihood weight; larger fits the data harder
  std::size_t max_iterations = 500;
  double tolerance = 1e-8;
  double validation_fraction = 0.25;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c))
      throw ConfigError("train config: C must be finite and > 0");
    if (!(tolerance > 0.0))
      throw ConfigError("train config: tolerance must be > 0");
    if (max_iterations == 0)
      throw ConfigError("train config: max_iterations must be >= 1");
    if (!(validation_fraction > 0.0) || !(validation_fraction < 1.0))
      throw ConfigError("train config: validation_fraction must be in (0, 1)");
  }
};

namespace detail {

// Rows as index lists: features are binary, so a dot product is a sum of
// the weights at the row's set positions.
struct SparseRows {
  std::vector<std::vector<std::uint32_t>> nz;

  explicit SparseRows(const std::vector<ProfileFeatures>& x) {
    nz.reserve(x.size());
    for (const auto& row : x) {
      std::vector<std::uint32_t> idx;
      for (std::uint32_t j = 0; j < row.size(); ++j)
        if (row[j]) idx.push_back(j);
      nz.push_back(std::move(idx));
    }
  }

  double dot(std::size_t i, const std::vector<double>& beta) const {
    double s = 0.0;
    for (std::uint32_t j : nz[i]) s += beta[j];
    return s;
  }
};

// Solves A x = b for symmetric positive definite A (row-major, n x n),
// overwriting A with its Cholesky factor.
inline std::vector<double> cholesky_solve(std::vector<double>& a,
                                          std::vector<double> b,
                                          std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (d <= 0.0) throw DataError("cholesky: matrix not positive definite");
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
  // forward: L z = b
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  // back: L^T x = z
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
    b[ii] = s / a[ii * n + ii];
  }
  return b;
}

}  // namespace detail

// Unpenalized log-likelihood sum(y log sigma + (1-y) log(1-sigma)).
inline double log_likelihood(const TrainingSet& data,
                             const std::vector<double>& beta) {
  detail::SparseRows rows(data.x);
  double ll = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double m = rows.dot(i, beta);
    ll += data.y[i] == 1 ? log_sigmoid(m) : log_sigmoid(-m);
  }
  return ll;
}

inline double penalty_term(const std::vector<double>& beta, Penalty p) {
  double r = 0.0;
  if (p == Penalty::l1) {
    for (double b : beta) r += std::fabs(b);
  } else {
    for (double b : beta) r += 0.5 * b * b;
  }
  return r;
}

// The maximized objective: C * log-likelihood - penalty.
inline double objective_value(const TrainingSet& data,
                              const std::vector<double>& beta, Penalty p,
                              double c) {
  return c * log_likelihood(data, beta) - penalty_term(beta, p);
}

// Gradient of the L2 objective (the smooth case).
inline std::vector<double> objective_gradient_l2(const TrainingSet& data,
                                                 const std::vector<double>& beta,
                                                 double c) {
  detail::SparseRows rows(data.x);
  std::vector<double> g(beta.size(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    double r = c * (static_cast<double>(data.y[i]) -
                    sigmoid(rows.dot(i, beta)));
    for (std::uint32_t j : rows.nz[i]) g[j] += r;
  }
  for (std::size_t j = 0; j < beta.size(); ++j) g[j] -= beta[j];
  return g;
}

struct FitResult {
  std::vector<double> beta;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

inline void check_two_classes(const TrainingSet& data) {
  bool pos = false, neg = false;
  for (int v : data.y) (v == 1 ? pos : neg) = true;
  if (!pos || !neg)
    throw TrainingError("training requires at least one example of each class");
}

// Damped Newton on the strictly concave L2 objective.
inline FitResult fit_l2(const TrainingSet& data, const TrainConfig& cfg) {
  const std::size_t n = data.size(), d = data.schema.size();
  SparseRows rows(data.x);
  std::vector<double> beta(d, 0.0);
  std::vector<double> p(n);

  auto objective = [&](const std::vector<double>& b) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double m = rows.dot(i, b);
      ll += data.y[i] == 1 ? log_sigmoid(m) : log_sigmoid(-m);
    }
    return cfg.c * ll - penalty_term(b, Penalty::l2);
  };

  FitResult res;
  double obj = objective(beta);
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    res.iterations = it;
    for (std::size_t i = 0; i < n; ++i) p[i] = sigmoid(rows.dot(i, beta));

    std::vector<double> g(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double r = cfg.c * (static_cast<double>(data.y[i]) - p[i]);
      for (std::uint32_t j : rows.nz[i]) g[j] += r;
    }
    for (std::size_t j = 0; j < d; ++j) g[j] -= beta[j];

    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::fabs(v));
    if (gmax <= cfg.tolerance) {
      res.converged = true;
      break;
    }

    // Negative Hessian: C * X^T W X + I, symmetric positive definite.
    std::vector<double> h(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double w = cfg.c * p[i] * (1.0 - p[i]);
      const auto& idx = rows.nz[i];
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a; b < idx.size(); ++b)
          h[idx[a] * d + idx[b]] += w;
    }
    for (std::size_t a = 0; a < d; ++a) {
      h[a * d + a] += 1.0;
      for (std::size_t b = a + 1; b < d; ++b) h[b * d + a] = h[a * d + b];
    }

    std::vector<double> step = cholesky_solve(h, g, d);
    double slope = 0.0;
    for (std::size_t j = 0; j < d; ++j) slope += g[j] * step[j];

    double t = 1.0;
    std::vector<double> cand(d);
    while (true) {
      for (std::size_t j = 0; j < d; ++j) cand[j] = beta[j] + t * step[j];
      double cobj = objective(cand);
      if (cobj >= obj + 0.25 * t * slope || t < 1e-12) {
        beta = cand;
        obj = cobj;
        break;
      }
      t *= 0.5;
    }
  }
  res.beta = std::move(beta);
  res.objective = obj;
  return res;
}

// FISTA with backtracking for the L1 objective; soft-thresholding is the
// proximal step of the |beta| penalty.
inline FitResult fit_l1(const TrainingSet& data, const TrainConfig& cfg) {
  const std::size_t n = data.size(), d = data.schema.size();
  SparseRows rows(data.x);

  auto smooth = [&](const std::vector<double>& b) {  // -C * LL, minimized
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double m = rows.dot(i, b);
      ll += data.y[i] == 1 ? log_sigmoid(m) : log_sigmoid(-m);
    }
    return -cfg.c * ll;
  };
  auto smooth_grad = [&](const std::vector<double>& b) {
    std::vector<double> g(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double r = cfg.c * (static_cast<double>(data.y[i]) -
                          sigmoid(rows.dot(i, b)));
      for (std::uint32_t j : rows.nz[i]) g[j] -= r;
    }
    return g;
  };
  auto l1 = [](const std::vector<double>& b) {
    double s = 0.0;
    for (double v : b) s += std::fabs(v);
    return s;
  };

  std::vector<double> beta(d, 0.0), z = beta, best = beta;
  double lips = 1.0;
  double theta = 1.0;
  double best_f = smooth(beta) + l1(beta);

  FitResult res;
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    res.iterations = it;
    std::vector<double> gz = smooth_grad(z);
    double gzval = smooth(z);

    std::vector<double> next(d);
    while (true) {
      double inv = 1.0 / lips;
      for (std::size_t j = 0; j < d; ++j) {
        double v = z[j] - inv * gz[j];
        double m = std::fabs(v) - inv;
        next[j] = m > 0.0 ? (v > 0.0 ? m : -m) : 0.0;
      }
      double quad = gzval, dist = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        double diff = next[j] - z[j];
        quad += gz[j] * diff;
        dist += diff * diff;
      }
      quad += 0.5 * lips * dist;
      if (smooth(next) <= quad + 1e-12 * std::fabs(quad)) break;
      lips *= 2.0;
      if (lips > 1e15)
        throw DataError("l1 fit: backtracking failed (non-finite data?)");
    }

    double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    double move = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double diff = next[j] - beta[j];
      move = std::max(move, std::fabs(diff));
      z[j] = next[j] + (theta - 1.0) / theta_next * diff;
    }
    beta = next;
    theta = theta_next;
    lips *= 0.9;  // allow the step estimate to relax between iterations

    double f = smooth(beta) + l1(beta);
    if (f < best_f) {
      best_f = f;
      best = beta;
    }
    if (move <= cfg.tolerance * std::max(1.0, l1(beta))) {
      res.converged = true;
      break;
    }
  }
  res.beta = std::move(best);
  res.objective = -best_f;  // back to the maximized form
  return res;
}

}  // namespace detail

// Maximizes C * (sum_{y=1} log sigma(m) + sum_{y=0} log sigma(-m)) - ||beta||
// where ||.|| is sum|b| for L1 and b'b/2 for L2. Non-convergence is not an
// error: the best iterate is returned with converged = false.
inline FitResult fit_logistic(const TrainingSet& data, const TrainConfig& cfg) {
  data.validate();
  cfg.validate();
  detail::check_two_classes(data);
  return cfg.penalty == Penalty::l2 ? detail::fit_l2(data, cfg)
                                    : detail::fit_l1(data, cfg);
}

inline double predict_proba(const std::vector<double>& beta,
                            const ProfileFeatures& x) {
  if (beta.size() != x.size())
    throw DimensionError("predict_proba: dimension mismatch");
  double m = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j]) m += beta[j];
  return sigmoid(m);
}

inline double predict_proba(const LinearModel& model, const ProfileFeatures& x) {
  return predict_proba(model.beta, x);
}

struct ValidationResult {
  LinearModel model;  // refit on all data with the chosen C
  double chosen_c = 0.0;
  double validation_auc = 0.0;
  std::vector<std::pair<double, double>> c_grid_auc;  // (C, validation AUC)
};

// Seeded stratified split (both classes present on each side), then picks
// the candidate C with the best validation AUC, smallest C on ties, and
// refits on everything.
inline ValidationResult fit_with_validation(const TrainingSet& data,
                                            std::vector<double> candidate_cs,
                                            TrainConfig cfg) {
  data.validate();
  if (candidate_cs.empty())
    throw ConfigError("fit_with_validation: empty C grid");
  std::sort(candidate_cs.begin(), candidate_cs.end());
  candidate_cs.erase(std::unique(candidate_cs.begin(), candidate_cs.end()),
                     candidate_cs.end());
  if (candidate_cs.front() <= 0.0)
    throw ConfigError("fit_with_validation: C values must be > 0");

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < data.size(); ++i)
    (data.y[i] == 1 ? pos : neg).push_back(i);
  if (pos.size() < 2 || neg.size() < 2)
    throw TrainingError(
        "fit_with_validation: need at least two examples of each class to "
        "split");

  Rng rng(cfg.seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  auto val_count = [&](std::size_t n) {
    auto k = static_cast<std::size_t>(
        std::llround(cfg.validation_fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n - 1);
  };
  std::size_t vp = val_count(pos.size()), vn = val_count(neg.size());

  TrainingSet train{{}, {}, data.schema}, val{{}, {}, data.schema};
  for (std::size_t k = 0; k < pos.size(); ++k) {
    auto& part = k < vp ? val : train;
    part.x.push_back(data.x[pos[k]]);
    part.y.push_back(1);
  }
  for (std::size_t k = 0; k < neg.size(); ++k) {
    auto& part = k < vn ? val : train;
    part.x.push_back(data.x[neg[k]]);
    part.y.push_back(0);
  }

  ValidationResult out;
  bool have_best = false;
  for (double c : candidate_cs) {
    TrainConfig fit_cfg = cfg;
    fit_cfg.c = c;
    FitResult fr = fit_logistic(train, fit_cfg);
    std::vector<std::pair<double, int>> scored;
    scored.reserve(val.size());
    for (std::size_t i = 0; i < val.size(); ++i)
      scored.emplace_back(predict_proba(fr.beta, val.x[i]), val.y[i]);
    double auc = roc_auc(std::move(scored)).auc;
    out.c_grid_auc.emplace_back(c, auc);
    if (!have_best || auc > out.validation_auc) {
      have_best = true;
      out.validation_auc = auc;
      out.chosen_c = c;
    }
  }

  TrainConfig final_cfg = cfg;
  final_cfg.c = out.chosen_c;
  FitResult final_fit = fit_logistic(data, final_cfg);
  out.model = LinearModel{data.schema, std::move(final_fit.beta)};
  return out;
}

struct SavedModel {
  LinearModel model;
  double chosen_c = 1.0;
  Penalty penalty = Penalty::l2;
};

// JSON model file. Doubles are emitted in shortest round-trip form, so beta
// survives save/load bit-exactly (asserted in the test suite).
inline void save_model(const SavedModel& m, const std::string& path) {
  nlohmann::json j;
  j["schema"] = m.model.schema.to_json();
  j["beta"] = m.model.beta;
  j["chosen_c"] = m.chosen_c;
  j["penalty"] = m.penalty == Penalty::l1 ? "l1" : "l2";
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path);
  out << j.dump(2) << '\n';
}

inline SavedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed model file " + path + ": " + e.what());
  }
  try {
    SavedModel m;
    m.model.schema = FeatureSchema::from_json(j.at("schema"));
    m.model.beta = j.at("beta").get<std::vector<double>>();
    m.chosen_c = j.at("chosen_c").get<double>();
    std::string p = j.value("penalty", "l2");
    if (p != "l1" && p != "l2")
      throw DataError("model file: unknown penalty " + p);
    m.penalty = p == "l1" ? Penalty::l1 : Penalty::l2;
    if (m.model.beta.size() != m.model.schema.size())
      throw DimensionError("model file: beta length does not match schema");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file " + path + " missing fields: " + e.what());
  }
}

}  // namespace locset
