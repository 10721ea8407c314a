// locset: expand-classify location user sets on a synthetic social network.
//
// Subcommands:
//   generate  build a synthetic world from the config's "synthetic" section
//             and save it as a snapshot directory
//   run       run the expand-classify crawl loop against the synthetic
//             world; writes snapshot/, labels.csv, metrics.json (and
//             model.json in logistic mode)
//   classify  one-shot labeling of an existing snapshot
//   eval      classify + ROC/AUC against the snapshot's ground truth
//   sweep     re-evaluate while varying gamma, lambda, or C
//   freq      term frequencies over posts in a date range
//
// Exit codes: 0 success, 1 usage/config error, 2 data error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "locset/locset.hpp"

namespace fs = std::filesystem;
using namespace locset;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string snapshot_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
};

AppConfig load_config(const GlobalArgs& g) {
  if (g.config_path.empty())
    throw ConfigError("missing --config PATH");
  AppConfig cfg = AppConfig::load(g.config_path);
  if (g.seed_override.has_value()) cfg.seed = *g.seed_override;
  return cfg;
}

Snapshot load_snapshot_arg(const GlobalArgs& g) {
  if (g.snapshot_path.empty())
    throw ConfigError("missing --snapshot DIR");
  return load_snapshot(g.snapshot_path);
}

void ensure_out_dir(const GlobalArgs& g) {
  std::error_code ec;
  fs::create_directories(g.out_dir, ec);
  if (ec) throw DataError("cannot create output directory " + g.out_dir);
}

std::string out_path(const GlobalArgs& g, const char* name) {
  return (fs::path(g.out_dir) / name).string();
}

SynthWorld make_world(const AppConfig& cfg) {
  if (!cfg.synthetic.has_value())
    throw ConfigError(
        "this command needs a \"synthetic\" section in the config (live "
        "data sources are not built in)");
  return generate(*cfg.synthetic, cfg.location);
}

// The profile model a standalone snapshot command uses: a trained model
// file if given, otherwise fit/fixed per the config, falling back to fixed
// odds when the logistic fit is impossible.
ProfileEnergyModel make_model(const AppConfig& cfg, const Snapshot& snap,
                              const std::string& model_path) {
  if (!model_path.empty()) return load_model(model_path).model;
  if (cfg.mode == ProfileModelMode::logistic) {
    TrainingSet data{{}, {}, cfg.schema};
    for (const auto& u : snap.users) {
      GroundTruth g = snap.truth_of(u.id);
      if (g == GroundTruth::unknown) continue;
      data.x.push_back(extract_features(u, cfg.schema));
      data.y.push_back(g == GroundTruth::inside ? 1 : 0);
    }
    try {
      return fit_with_validation(data, cfg.c_grid, cfg.train).model;
    } catch (const TrainingError& e) {
      std::cerr << "warn: logistic fit unavailable (" << e.what()
                << "); using fixed-odds profile model\n";
    }
  }
  return FixedOddsModel{cfg.categorizer};
}

nlohmann::json classification_metrics(const AppConfig& cfg,
                                      const Snapshot& snap,
                                      const ClassificationResult& result) {
  nlohmann::json m;
  m["users"] = snap.users.size();
  m["edges"] = snap.edges.size();
  std::size_t in = 0;
  for (const auto& [id, l] : result.labels)
    if (l == 1) ++in;
  m["labeled_in"] = in;
  m["energy"] = result.energy;
  m["cut_value"] = result.cut_value;
  m["link_energy"] = link_params_to_json(cfg.link);
  return m;
}

std::vector<std::pair<double, int>> truth_scores(
    const Snapshot& snap, const ClassificationResult& result) {
  std::vector<std::pair<double, int>> scored;
  for (const auto& u : snap.users) {
    GroundTruth g = snap.truth_of(u.id);
    if (g == GroundTruth::unknown) continue;
    scored.emplace_back(result.membership_probability.at(u.id),
                        g == GroundTruth::inside ? 1 : 0);
  }
  return scored;
}

int cmd_generate(const GlobalArgs& g) {
  AppConfig cfg = load_config(g);
  ensure_out_dir(g);
  SynthWorld world = make_world(cfg);
  save_snapshot(world.snapshot, g.out_dir);
  std::cout << "generated " << world.snapshot.users.size() << " users, "
            << world.snapshot.edges.size() << " edges -> " << g.out_dir
            << '\n';
  return 0;
}

int cmd_run(const GlobalArgs& g) {
  AppConfig cfg = load_config(g);
  ensure_out_dir(g);
  SynthWorld world = make_world(cfg);
  SynthDataSource source(world);
  RunConfig rc = cfg.run_config(&std::cerr);
  RunResult rr = run(source, rc);

  save_snapshot(rr.snapshot, out_path(g, "snapshot"));
  write_labels_csv(rr.snapshot, rr.classification, out_path(g, "labels.csv"));

  nlohmann::json m = classification_metrics(cfg, rr.snapshot, rr.classification);
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& it : rr.history) iters.push_back(metrics_to_json(it));
  m["iterations"] = iters;
  if (!rr.history.empty() && rr.history.back().auc.has_value())
    m["auc"] = *rr.history.back().auc;
  else
    m["auc"] = nullptr;
  write_json(m, out_path(g, "metrics.json"));

  if (rr.trained_model.has_value())
    save_model(*rr.trained_model, out_path(g, "model.json"));
  std::cout << "run complete: " << rr.snapshot.users.size() << " users, "
            << rr.snapshot.edges.size() << " edges after "
            << rr.snapshot.iteration << " expansions -> " << g.out_dir << '\n';
  return 0;
}

int cmd_classify(const GlobalArgs& g, const std::string& model_path) {
  AppConfig cfg = load_config(g);
  Snapshot snap = load_snapshot_arg(g);
  ensure_out_dir(g);
  ProfileEnergyModel model = make_model(cfg, snap, model_path);
  ClassificationResult result = classify(snap, model, cfg.link);
  write_labels_csv(snap, result, out_path(g, "labels.csv"));
  write_json(classification_metrics(cfg, snap, result),
             out_path(g, "metrics.json"));
  std::size_t in = 0;
  for (const auto& [id, l] : result.labels)
    if (l == 1) ++in;
  std::cout << "classified " << snap.users.size() << " users, " << in
            << " labeled in-location -> " << g.out_dir << '\n';
  return 0;
}

int cmd_eval(const GlobalArgs& g, const std::string& model_path) {
  AppConfig cfg = load_config(g);
  Snapshot snap = load_snapshot_arg(g);
  ensure_out_dir(g);
  ProfileEnergyModel model = make_model(cfg, snap, model_path);
  ClassificationResult result = classify(snap, model, cfg.link);
  RocReport roc = roc_auc(truth_scores(snap, result));

  write_roc_csv(roc, out_path(g, "roc.csv"));
  write_labels_csv(snap, result, out_path(g, "labels.csv"));
  nlohmann::json m = classification_metrics(cfg, snap, result);
  m["auc"] = roc.auc;
  m["positives"] = roc.positives;
  m["negatives"] = roc.negatives;
  write_json(m, out_path(g, "metrics.json"));
  std::cout << "auc " << roc.auc << " on " << roc.positives << '+'
            << roc.negatives << " truth users -> " << g.out_dir << '\n';
  return 0;
}

int cmd_sweep(const GlobalArgs& g, const std::string& axis_name,
              const std::vector<double>& values) {
  AppConfig cfg = load_config(g);
  Snapshot snap = load_snapshot_arg(g);
  ensure_out_dir(g);
  if (values.empty()) throw ConfigError("sweep: --values must not be empty");
  SweepInputs inputs{cfg.link, cfg.mode, cfg.categorizer,
                     cfg.schema, cfg.train, cfg.c_grid};
  SweepReport report = sweep(snap, inputs, parse_sweep_axis(axis_name), values);
  write_sweep_csv(report, out_path(g, "sweep.csv"));
  std::size_t failed = 0;
  for (const auto& c : report.cells)
    if (!c.ok) ++failed;
  std::cout << "swept " << report.cells.size() << " values on " << axis_name;
  if (failed) std::cout << " (" << failed << " failed)";
  std::cout << " -> " << g.out_dir << '\n';
  return 0;
}

int cmd_freq(const GlobalArgs& g, const std::string& from,
             const std::string& to, std::size_t top_k) {
  // freq does not need a full config; use stopwords if a config was given.
  std::vector<std::string> stopwords;
  if (!g.config_path.empty()) stopwords = load_config(g).stopwords;
  Snapshot snap = load_snapshot_arg(g);
  ensure_out_dir(g);
  auto freq = term_frequencies(snap, from, to, stopwords, top_k);
  write_freq_csv(freq, out_path(g, "freq.csv"));
  std::cout << "counted " << freq.size() << " terms -> " << g.out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"location user-set expansion and classification"};
  app.require_subcommand(1);

  GlobalArgs g;
  std::uint64_t seed_val = 0;
  app.add_option("--config", g.config_path, "JSON configuration file")
      ->expected(1);
  app.add_option("--snapshot", g.snapshot_path, "snapshot directory to read");
  app.add_option("--out", g.out_dir, "output directory (default .)");
  auto* seed_opt =
      app.add_option("--seed", seed_val, "override the config's crawl seed");

  auto* c_generate = app.add_subcommand("generate", "synthesize a snapshot");
  auto* c_run = app.add_subcommand("run", "expand-classify crawl loop");
  auto* c_classify = app.add_subcommand("classify", "label a snapshot");
  auto* c_eval = app.add_subcommand("eval", "ROC/AUC on a snapshot");
  auto* c_sweep = app.add_subcommand("sweep", "parameter sensitivity sweep");
  auto* c_freq = app.add_subcommand("freq", "term frequencies over posts");

  std::string model_path;
  for (auto* c : {c_classify, c_eval})
    c->add_option("--model", model_path, "trained model file (model.json)");

  std::string axis;
  std::vector<double> values;
  c_sweep->add_option("--axis", axis, "gamma|lambda|C")->required();
  c_sweep->add_option("--values", values, "axis values")
      ->required()
      ->delimiter(',');

  std::string from_date, to_date;
  std::size_t top_k = 20;
  c_freq->add_option("--from", from_date, "start date YYYY-MM-DD (inclusive)");
  c_freq->add_option("--to", to_date, "end date YYYY-MM-DD (inclusive)");
  c_freq->add_option("--top", top_k, "how many terms to keep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // --help exits 0; any parse failure is usage
  }

  if (seed_opt->count() > 0) g.seed_override = seed_val;

  try {
    if (c_generate->parsed()) return cmd_generate(g);
    if (c_run->parsed()) return cmd_run(g);
    if (c_classify->parsed()) return cmd_classify(g, model_path);
    if (c_eval->parsed()) return cmd_eval(g, model_path);
    if (c_sweep->parsed()) return cmd_sweep(g, axis, values);
    if (c_freq->parsed()) return cmd_freq(g, from_date, to_date, top_k);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
