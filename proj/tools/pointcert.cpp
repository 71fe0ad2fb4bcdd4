// Copyright 2026 The PointCert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// pointcert: partition, certify, attack and evaluate point clouds from the
// command line. Exit status: 0 on success, 1 on input errors, 2 when a
// classifier backend fails.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pointcert/attacks.hpp"
#include "pointcert/baselines.hpp"
#include "pointcert/certlab.hpp"
#include "pointcert/dataset.hpp"
#include "pointcert/errors.hpp"
#include "pointcert/evaluate.hpp"

namespace {

using namespace pointcert;
using nlohmann::json;

struct Globals {
  std::size_t m = 400;
  std::string hash = "md5";
  std::string attack = "add";
  std::string classifier = "centroid";
  std::string scenario = "2";
  std::string completion = "upsample:4";
  double lambda = kDefaultLambda;
  double eta = kEtaCube;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  std::string manifest;
  std::size_t classes = 0;
  std::size_t threads = 1;
};

EvalConfig to_config(const Globals& g) {
  EvalConfig cfg;
  cfg.m = g.m;
  cfg.rule = HashRule::parse(g.hash);
  cfg.attack = parse_attack_type(g.attack);
  cfg.classifier = g.classifier;
  cfg.scenario = parse_scenario(g.scenario);
  cfg.completion = g.completion;
  cfg.lambda = g.lambda;
  cfg.eta = g.eta;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  return cfg;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + g.out);
  out << text;
  out.close();
  if (!out) throw IoError("error writing " + g.out);
}

PointCloud read_cloud(const std::string& path) {
  auto loaded = load_cloud(path, format_for_path(path));
  if (loaded.duplicates_dropped > 0) {
    std::cerr << "warning: " << path << ": dropped " << loaded.duplicates_dropped
              << " duplicate point(s)\n";
  }
  return std::move(loaded.cloud);
}

EnsembleSpec build_ensemble(const Globals& g) {
  const auto cfg = to_config(g);
  if (cfg.m == 0) throw ConfigError("m must be at least 1");
  std::size_t classes = g.classes;
  std::vector<LabeledCloud> train;
  if (!g.manifest.empty()) {
    const auto manifest = load_manifest(g.manifest);
    if (classes == 0) classes = manifest.classes;
    if (g.classifier == "centroid") train = load_split(manifest, "train");
  }
  if (classes == 0) throw ConfigError("--classes or --manifest is required");
  return {cfg.m, cfg.rule, make_classifier(cfg, train, classes)};
}

json certificate_json(const Certificate& cert) {
  json sizes = json::object();
  for (auto type : kAllAttackTypes) {
    sizes[std::string(to_string(type))] = cert.size(type);
  }
  return {{"label", cert.label.value},
          {"frequencies", cert.frequencies.counts},
          {"gap", cert.gap},
          {"certified", sizes}};
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

int run(int argc, char** argv) {
  CLI::App app{"Certified robustness for point-cloud classification"};
  app.set_version_flag("--version", std::string(version()));
  app.set_config("--config", "", "Flat key = value file; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--m", g.m, "Number of sub-point clouds")->capture_default_str();
  app.add_option("--hash", g.hash, "Bucket rule")
      ->check(CLI::IsMember({"md5", "mean", "mean-digits"}))
      ->capture_default_str();
  app.add_option("--attack", g.attack, "Attack type")
      ->check(CLI::IsMember({"add", "delete", "modify", "perturb"}))
      ->capture_default_str();
  app.add_option("--classifier", g.classifier,
                 "centroid | constant:<l> | lookup:<file> | external:<cmd>")
      ->capture_default_str();
  app.add_option("--scenario", g.scenario, "1, 2 or 3")
      ->check(CLI::IsMember({"1", "2", "3"}))
      ->capture_default_str();
  app.add_option("--completion", g.completion,
                 "identity | upsample:<k> | external:<cmd> (scenario 3)")
      ->capture_default_str();
  app.add_option("--lambda", g.lambda, "Weight of the classification loss")
      ->capture_default_str();
  app.add_option("--eta", g.eta, "Diameter bound of the coordinate space")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output path (stdout when omitted)");
  app.add_option("--format", g.format, "Result format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--manifest", g.manifest, "Dataset manifest.json");
  app.add_option("--classes", g.classes, "Number of classes without a manifest");
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str();

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic dataset and manifest");
  SyntheticSpec spec;
  gen->add_option("--train-per-class", spec.train_per_class)->capture_default_str();
  gen->add_option("--test-per-class", spec.test_per_class)->capture_default_str();
  gen->add_option("--points", spec.points)->capture_default_str();
  gen->add_option("--spread", spec.spread)->capture_default_str();
  gen->callback([&] {
    if (g.out.empty()) throw ConfigError("gen-data needs --out <directory>");
    spec.classes = g.classes == 0 ? 3 : g.classes;
    spec.seed = g.seed;
    const auto manifest = gen_synthetic(spec, g.out);
    std::cout << "wrote " << manifest.entries.size() << " clouds to " << g.out
              << "\n";
  });

  std::string cloud_path;

  auto* part_cmd = app.add_subcommand("partition", "Bucket sizes of a cloud");
  part_cmd->add_option("cloud", cloud_path, "Point cloud file")->required();
  part_cmd->callback([&] {
    if (g.m == 0) throw ConfigError("m must be at least 1");
    const auto cloud = read_cloud(cloud_path);
    const auto part = partition(cloud, g.m, HashRule::parse(g.hash));
    std::vector<std::size_t> sizes;
    for (const auto& s : part.subclouds) sizes.push_back(s.size());
    if (g.format == "csv") {
      std::string text = "bucket,size\n";
      for (std::size_t b = 0; b < sizes.size(); ++b) {
        text += std::to_string(b) + "," + std::to_string(sizes[b]) + "\n";
      }
      emit(g, text);
      return;
    }
    const auto stats = balance_stats(part);
    emit(g, dump({{"m", g.m},
                  {"hash", HashRule::parse(g.hash).name()},
                  {"points", cloud.size()},
                  {"nonempty", part.nonempty_count()},
                  {"sizes", sizes},
                  {"balance",
                   {{"min", stats.min},
                    {"max", stats.max},
                    {"mean", stats.mean},
                    {"stddev", stats.stddev},
                    {"empty_buckets", stats.empty_buckets}}}}));
  });

  auto* predict_cmd = app.add_subcommand("predict", "Ensemble label of a cloud");
  predict_cmd->add_option("cloud", cloud_path, "Point cloud file")->required();
  predict_cmd->callback([&] {
    const auto ens = build_ensemble(g);
    const auto label = ensemble_predict(read_cloud(cloud_path), ens.m, ens.rule,
                                        ens.classifier());
    emit(g, std::to_string(label.value) + "\n");
  });

  auto* certify_cmd = app.add_subcommand("certify", "Label and certified sizes");
  certify_cmd->add_option("cloud", cloud_path, "Point cloud file")->required();
  certify_cmd->callback([&] {
    const auto ens = build_ensemble(g);
    emit(g, dump(certificate_json(predict_and_certify(read_cloud(cloud_path), ens))));
  });

  auto* attack_cmd = app.add_subcommand("attack", "Run a search attack on a cloud");
  std::size_t budget_t = 1;
  std::size_t pool = 64;
  std::optional<int> true_label;
  std::string adversarial_out;
  attack_cmd->add_option("cloud", cloud_path, "Point cloud file")->required();
  attack_cmd->add_option("--t", budget_t, "Perturbation budget")->capture_default_str();
  attack_cmd->add_option("--pool", pool, "Candidate points per step")->capture_default_str();
  attack_cmd->add_option("--label", true_label, "True label (defaults to the clean prediction)");
  attack_cmd->add_option("--save", adversarial_out, "Write the adversarial cloud here");
  attack_cmd->callback([&] {
    const auto ens = build_ensemble(g);
    const auto cloud = read_cloud(cloud_path);
    const AttackBudget budget{parse_attack_type(g.attack), budget_t, pool, g.seed};
    std::optional<Label> reference;
    if (true_label) reference = Label(*true_label);
    const auto r = run_attack(cloud, ens, budget, reference);
    const auto cert = predict_and_certify(cloud, ens);
    if (!adversarial_out.empty()) {
      save_cloud(r.adversarial, adversarial_out, format_for_path(adversarial_out));
    }
    emit(g, dump({{"attack", std::string(to_string(budget.type))},
                  {"t", budget.t},
                  {"certified", cert.size(budget.type)},
                  {"original_label", r.original_label.value},
                  {"attacked_label",
                   r.attacked_label ? json(r.attacked_label->value) : json(nullptr)},
                  {"achieved_size", r.achieved_size},
                  {"success", r.success}}));
  });

  auto* eval_cmd = app.add_subcommand("eval", "Certified and empirical accuracy curve");
  std::vector<std::size_t> t_grid;
  std::size_t t_max = 10;
  bool with_attacks = false;
  eval_cmd->add_option("--t-grid", t_grid, "Budgets to report (ascending)");
  eval_cmd->add_option("--t-max", t_max, "Report t = 0..t-max when no grid is given")
      ->capture_default_str();
  eval_cmd->add_flag("--attacks", with_attacks, "Also run attacks (empirical accuracy)");
  eval_cmd->add_option("--pool", pool, "Candidate points per attack step")
      ->capture_default_str();
  eval_cmd->callback([&] {
    if (g.manifest.empty()) throw ConfigError("eval needs --manifest");
    auto cfg = to_config(g);
    if (t_grid.empty()) {
      t_grid.resize(t_max + 1);
      std::iota(t_grid.begin(), t_grid.end(), std::size_t{0});
    }
    cfg.t_grid = t_grid;
    cfg.run_attacks = with_attacks;
    cfg.candidate_pool = pool;
    const auto curve = evaluate(cfg, load_manifest(g.manifest));
    emit(g, format_results(curve, parse_result_format(g.format)));
  });

  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive soundness check");
  std::size_t instances = 500;
  std::size_t tmax = 3;
  oracle_cmd->add_option("--instances", instances)->capture_default_str();
  oracle_cmd->add_option("--tmax", tmax, "Largest enumerated budget (<= 3)")
      ->capture_default_str();
  int status = 0;
  oracle_cmd->callback([&] {
    const auto r = run_oracle_batch(instances, g.seed, tmax, g.threads);
    emit(g, dump({{"instances", r.instances},
                  {"attacks_enumerated", r.attacks_enumerated},
                  {"violations", r.violations}}));
    if (r.violations > 0) status = 1;
  });

  auto* tight_cmd = app.add_subcommand("tightness", "Build and verify tightness witnesses");
  std::size_t tight_instances = 200;
  tight_cmd->add_option("--instances", tight_instances, "Witnesses per attack type")
      ->capture_default_str();
  tight_cmd->callback([&] {
    const auto r = run_tightness_batch(tight_instances, g.seed, g.threads);
    emit(g, dump({{"constructed", r.witnesses_constructed},
                  {"verified", r.witnesses_verified}}));
    if (r.witnesses_verified != r.witnesses_constructed) status = 1;
  });

  auto* base_cmd = app.add_subcommand("baseline", "Comparison baselines");
  base_cmd->require_subcommand(1);
  auto* rs_cmd = base_cmd->add_subcommand("rs", "l2 radius to perturbation size");
  double gamma = 0.0;
  rs_cmd->add_option("--gamma", gamma, "Certified l2 radius")->required();
  rs_cmd->callback([&] {
    const auto size = rs_to_perturbation_size({gamma, g.eta});
    emit(g, std::to_string(size) + "\n");
  });
  auto* sub_cmd = base_cmd->add_subcommand(
      "subsample", "Fixed-seed subsampling vote with worst-case certificates");
  SubsampleBaseline base;
  sub_cmd->add_option("cloud", cloud_path, "Point cloud file")->required();
  sub_cmd->add_option("--k", base.k, "Points per subsample")->required();
  sub_cmd->add_option("--n", base.n, "Number of subsamples")->required();
  sub_cmd->callback([&] {
    base.seed = g.seed;
    const auto ens = build_ensemble(g);
    const auto cert = det_subsample_certify(read_cloud(cloud_path), base, ens.classifier());
    json sizes = json::object();
    for (auto type : kAllAttackTypes) {
      sizes[std::string(to_string(type))] = cert.size(type);
    }
    emit(g, dump({{"label", cert.label.value},
                  {"frequencies", cert.frequencies.counts},
                  {"gap", cert.gap},
                  {"max_containment", cert.max_containment},
                  {"certified", sizes}}));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pointcert::ClassifierBackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
