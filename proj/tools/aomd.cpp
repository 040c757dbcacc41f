// Command-line front end: synthetic data, training, evaluation, prediction,
// ablations, token clustering and annotation agreement.
//
// Exit codes: 0 success, 2 usage or configuration, 3 I/O or data, 4 numeric
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aomd/clustering.hpp"
#include "aomd/config.hpp"
#include "aomd/dataset.hpp"
#include "aomd/error.hpp"
#include "aomd/format.hpp"
#include "aomd/metrics.hpp"
#include "aomd/model.hpp"
#include "aomd/nn/checkpoint.hpp"
#include "aomd/synthetic.hpp"
#include "aomd/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct ConfigOptions {
  std::string config_file;
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigOptions& opts, const char* config_flag = "--config") {
  cmd->add_option(config_flag, opts.config_file, "JSON config file with sections")->check(CLI::ExistingFile);
  cmd->add_option("--set", opts.overrides, "Override a dotted config key: key=value");
}

aomd::RunConfig build_config(const ConfigOptions& opts) {
  aomd::RunConfig config;
  if (!opts.config_file.empty()) config = aomd::load_run_config(opts.config_file);
  for (const std::string& o : opts.overrides) aomd::apply_override(config, o);
  return config;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw aomd::LoadError("cannot create '" + dir.string() + "': " + ec.message());
}

struct LoadedData {
  aomd::Dataset dataset;
  aomd::EmbeddingTable embeddings;
};

LoadedData load_data(const std::string& manifest, const aomd::RunConfig& config) {
  LoadedData d;
  d.dataset = aomd::load_dataset(aomd::resolve_data_path(manifest), config.data);
  d.embeddings = aomd::load_embeddings(d.dataset.embedding_file());
  return d;
}

// The run config stored in a checkpoint, with any overrides applied on top.
aomd::RunConfig checkpoint_config(const aomd::nn::Checkpoint& ckpt, const ConfigOptions& opts) {
  aomd::RunConfig config;
  aomd::apply_json(config, ckpt.metadata);
  for (const std::string& o : opts.overrides) aomd::apply_override(config, o);
  return config;
}

void print_report(const aomd::EvalReport& r, std::ostream& os) {
  os << "accuracy " << r.accuracy << "  f1 " << r.f1 << "  kappa " << r.cohen_kappa << "  auc ";
  if (r.auc) {
    os << *r.auc;
  } else {
    os << "n/a";
  }
  os << "  (n=" << r.count << ", tp=" << r.confusion.tp << " fp=" << r.confusion.fp
     << " tn=" << r.confusion.tn << " fn=" << r.confusion.fn << ")\n";
}

// --- gen-synthetic -------------------------------------------------------

struct GenArgs {
  std::string spec;
  std::string out;
  std::vector<std::string> overrides;
};

int run_gen(const GenArgs& args) {
  aomd::RunConfig config;
  if (!args.spec.empty()) {
    const json spec = json::parse(aomd::read_text_file(args.spec), nullptr, false);
    if (spec.is_discarded() || !spec.is_object()) {
      throw aomd::ConfigError(args.spec + ": spec must be a JSON object");
    }
    // Either a bare synthetic section or a sectioned run config.
    const json wrapped = spec.contains("synthetic") ? spec : json{{"synthetic", spec}};
    aomd::apply_json(config, wrapped.dump());
  }
  for (const std::string& o : args.overrides) aomd::apply_override(config, o);
  config.synthetic.validate();
  const fs::path out(args.out);
  make_dir(out);
  const aomd::SyntheticData data = aomd::gen_synthetic(config.synthetic, out);
  std::size_t positives = 0;
  for (const auto& p : data.dataset.posts) positives += *p.label == 1 ? 1 : 0;
  std::cerr << "wrote " << data.dataset.posts.size() << " posts to " << out.string() << " ("
            << positives << " offensive)\n";
  return kExitOk;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string out;
  std::string resume;
  bool quiet = false;
  ConfigOptions config;
};

int run_train(const TrainArgs& args) {
  aomd::RunConfig config = build_config(args.config);
  const LoadedData data = load_data(args.data, config);
  config.model = aomd::resolve_model_config(config.model, data.dataset, data.embeddings);
  const aomd::AomdModel model(config.model);
  config.train.validate();

  std::optional<aomd::nn::ParameterStore> resume;
  if (!args.resume.empty()) resume = aomd::nn::load_checkpoint(args.resume).store;

  const fs::path out(args.out);
  make_dir(out);
  aomd::write_run_config(config, out / "config.json");

  const auto train_posts = aomd::prepare_split(model, data.dataset, data.embeddings, aomd::Split::Train);
  const auto val_posts = aomd::prepare_split(model, data.dataset, data.embeddings, aomd::Split::Val);
  auto on_epoch = [&](const aomd::EpochRecord& r) {
    if (args.quiet) return;
    std::fprintf(stderr, "epoch %3zu  loss %.5f  train_acc %.4f  val_acc %.4f  val_f1 %.4f\n", r.epoch,
                 r.train_loss, r.train_accuracy, r.val_accuracy, r.val_f1);
  };
  const aomd::TrainResult result = aomd::train(model, train_posts, val_posts, config.train,
                                               resume ? &*resume : nullptr, on_epoch);

  const std::string metadata = aomd::to_json(config);
  aomd::nn::save_checkpoint(out / "checkpoint.aomc", result.best, metadata);
  aomd::nn::save_checkpoint(out / "last.aomc", result.last, metadata);
  aomd::write_history(result.history, out / "history.csv");
  if (!args.quiet) {
    std::fprintf(stderr, "best val_f1 %.4f at epoch %zu; step %llu\n", result.best_val_f1,
                 result.best_epoch, static_cast<unsigned long long>(result.last.step()));
  }
  return kExitOk;
}

// --- eval / predict --------------------------------------------------------

struct EvalArgs {
  std::string data;
  std::string checkpoint;
  std::string split = "test";
  std::string out;
  std::string roc;
  std::optional<double> threshold;
  ConfigOptions config;
};

std::vector<aomd::MemePost> select_posts(const aomd::Dataset& ds, const std::string& split) {
  std::vector<aomd::MemePost> posts;
  if (split == "all") return ds.posts;
  for (std::size_t i : ds.indices(aomd::parse_split(split))) posts.push_back(ds.posts[i]);
  return posts;
}

int run_eval(const EvalArgs& args) {
  const aomd::nn::Checkpoint ckpt = aomd::nn::load_checkpoint(args.checkpoint);
  aomd::RunConfig config = checkpoint_config(ckpt, args.config);
  const LoadedData data = load_data(args.data, config);
  config.model = aomd::resolve_model_config(config.model, data.dataset, data.embeddings);
  const aomd::AomdModel model(config.model);
  const auto posts =
      aomd::prepare_posts(model, select_posts(data.dataset, args.split), data.embeddings);
  const double threshold = args.threshold.value_or(config.train.threshold);
  const aomd::EvalReport report = aomd::evaluate_posts(model, ckpt.store, posts, threshold);
  if (!args.out.empty()) {
    aomd::write_report(report, args.out);
  } else {
    std::cout << aomd::report_json(report);
  }
  if (!args.roc.empty()) aomd::write_roc_csv(report.roc, args.roc);
  print_report(report, std::cerr);
  return kExitOk;
}

struct PredictArgs {
  std::string data;
  std::string checkpoint;
  std::string out;
  std::string split = "all";
  bool affinity = false;
  ConfigOptions config;
};

int run_predict(const PredictArgs& args) {
  const aomd::nn::Checkpoint ckpt = aomd::nn::load_checkpoint(args.checkpoint);
  aomd::RunConfig config = checkpoint_config(ckpt, args.config);
  const LoadedData data = load_data(args.data, config);
  config.model = aomd::resolve_model_config(config.model, data.dataset, data.embeddings);
  const aomd::AomdModel model(config.model);
  const auto posts =
      aomd::prepare_posts(model, select_posts(data.dataset, args.split), data.embeddings);
  std::string lines;
  for (const aomd::PreparedPost& p : posts) {
    const aomd::ForwardTrace trace = model.forward(p, ckpt.store);
    ordered_json j;
    j["id"] = p.id;
    j["y_hat"] = trace.y_hat;
    j["prediction"] = trace.y_hat >= config.train.threshold ? 1 : 0;
    if (p.label) j["label"] = *p.label;
    j["alpha_v"] = trace.attention.alpha_visual;
    j["alpha_c"] = trace.attention.alpha_text;
    if (args.affinity) {
      const auto& e = trace.attention.affinity;
      ordered_json rows = ordered_json::array();
      for (std::size_t s = 0; e.rank() == 2 && s < e.rows(); ++s) {
        ordered_json row = ordered_json::array();
        for (std::size_t k = 0; k < e.cols(); ++k) row.push_back(e.at(s, k));
        rows.push_back(std::move(row));
      }
      j["affinity"] = std::move(rows);
    }
    lines += j.dump() + "\n";
  }
  aomd::write_text_file(args.out, lines);
  std::cerr << "wrote " << posts.size() << " predictions to " << args.out << "\n";
  return kExitOk;
}

// --- ablate ----------------------------------------------------------------

struct AblateArgs {
  std::string data;
  std::string out;
  ConfigOptions config;
};

int run_ablate(const AblateArgs& args) {
  aomd::RunConfig config = build_config(args.config);
  const LoadedData data = load_data(args.data, config);
  config.model = aomd::resolve_model_config(config.model, data.dataset, data.embeddings);
  config.train.validate();
  const fs::path out(args.out);
  make_dir(out);
  aomd::write_run_config(config, out / "config.json");

  auto progress = [](aomd::Ablation a, std::uint64_t seed, const aomd::EvalReport& r) {
    std::fprintf(stderr, "%-13s seed %-4llu acc %.4f  f1 %.4f  kappa %.4f\n",
                 std::string(aomd::to_string(a)).c_str(), static_cast<unsigned long long>(seed),
                 r.accuracy, r.f1, r.cohen_kappa);
  };
  const auto rows = aomd::run_ablation_suite(data.dataset, data.embeddings, config.model,
                                             config.train, config.ablation, progress);
  const std::string table = aomd::ablation_table_csv(rows);
  aomd::write_text_file(out / "ablation.csv", table);

  ordered_json j = ordered_json::array();
  for (const aomd::AblationRow& row : rows) {
    ordered_json r;
    r["variant"] = std::string(aomd::to_string(row.variant));
    r["accuracy"] = row.accuracy;
    r["f1"] = row.f1;
    r["cohen_kappa"] = row.cohen_kappa;
    ordered_json runs = ordered_json::array();
    for (std::size_t s = 0; s < row.seeds.size(); ++s) {
      const aomd::EvalReport& rep = row.reports[s];
      runs.push_back({{"seed", row.seeds[s]},
                      {"accuracy", rep.accuracy},
                      {"f1", rep.f1},
                      {"cohen_kappa", rep.cohen_kappa},
                      {"auc", rep.auc ? ordered_json(*rep.auc) : ordered_json(nullptr)}});
    }
    r["runs"] = std::move(runs);
    r["test_ids"] = row.test_ids;
    j.push_back(std::move(r));
  }
  aomd::write_text_file(out / "ablation.json", j.dump(2) + "\n");
  std::cout << table;
  return kExitOk;
}

// --- cluster-tokens --------------------------------------------------------

struct ClusterArgs {
  std::string in;
  std::string out;
  ConfigOptions config;
};

int run_cluster(const ClusterArgs& args) {
  const aomd::RunConfig config = build_config(args.config);
  const json input = json::parse(aomd::read_text_file(args.in), nullptr, false);
  if (input.is_discarded()) throw aomd::LoadError(args.in + ": not valid JSON");
  const json& list = input.is_object() && input.contains("tokens") ? input.at("tokens") : input;
  if (!list.is_array()) throw aomd::LoadError(args.in + ": expected a token list");
  std::vector<aomd::WordToken> tokens;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& t = list[i];
    try {
      const auto box = t.at("box").get<std::vector<double>>();
      if (box.size() != aomd::BoundingBox::kScalars) throw aomd::LoadError("box needs 8 numbers");
      std::array<double, aomd::BoundingBox::kScalars> v{};
      std::copy(box.begin(), box.end(), v.begin());
      tokens.emplace_back(t.at("word").get<std::string>(), aomd::BoundingBox(v));
    } catch (const json::exception& e) {
      throw aomd::LoadError(args.in + ": token " + std::to_string(i) + ": " + e.what());
    } catch (const aomd::Error& e) {
      throw aomd::LoadError(args.in + ": token " + std::to_string(i) + ": " + e.what());
    }
  }
  const auto clusters = aomd::cluster_tokens(tokens, config.model.cluster);
  ordered_json out = ordered_json::array();
  for (const aomd::TokenCluster& c : clusters) {
    ordered_json j;
    j["phrase"] = c.phrase();
    j["words"] = c.words;
    j["box"] = std::vector<double>(c.box.vertices().begin(), c.box.vertices().end());
    j["members"] = c.members;
    out.push_back(std::move(j));
  }
  const std::string text = ordered_json{{"clusters", std::move(out)}}.dump(2) + "\n";
  if (args.out.empty() || args.out == "-") {
    std::cout << text;
  } else {
    aomd::write_text_file(args.out, text);
  }
  return kExitOk;
}

// --- agreement -------------------------------------------------------------

int run_agreement(const std::string& path) {
  const std::string text = aomd::read_text_file(path);
  std::vector<aomd::AnnotationRecord> records;
  auto add = [&](const json& j, std::size_t line) {
    try {
      aomd::AnnotationRecord r;
      r.post_id = j.at("post_id").get<std::string>();
      r.ratings = j.at("ratings").get<std::vector<int>>();
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw aomd::LoadError(path + ":" + std::to_string(line) + ": " + e.what());
    }
  };
  const json whole = json::parse(text, nullptr, false);
  if (!whole.is_discarded() && whole.is_array()) {
    for (std::size_t i = 0; i < whole.size(); ++i) add(whole[i], i + 1);
  } else {
    std::istringstream in(text);
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) throw aomd::LoadError(path + ":" + std::to_string(n) + ": not valid JSON");
      add(j, n);
    }
  }
  const double kappa = aomd::fleiss_kappa(records);
  ordered_json out;
  out["records"] = records.size();
  out["raters"] = records.front().ratings.size();
  out["fleiss_kappa"] = kappa;
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analogy-aware offensive meme detection"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Generate a planted-analogy synthetic dataset");
  gen_cmd->add_option("--spec", gen.spec, "JSON synthetic spec")->check(CLI::ExistingFile);
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--set", gen.overrides, "Override a dotted config key: key=value");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--data", tr.data, "Dataset manifest")->required();
  train_cmd->add_option("--out", tr.out, "Output directory")->required();
  train_cmd->add_option("--resume", tr.resume, "Continue from a checkpoint");
  train_cmd->add_flag("--quiet", tr.quiet, "No per-epoch progress");
  add_config_options(train_cmd, tr.config);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on one split");
  eval_cmd->add_option("--data", ev.data, "Dataset manifest")->required();
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--split", ev.split, "train, val, test or all")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  eval_cmd->add_option("--out", ev.out, "Write the JSON report here instead of stdout");
  eval_cmd->add_option("--roc", ev.roc, "Write ROC points as CSV");
  eval_cmd->add_option("--threshold", ev.threshold, "Decision threshold")->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--set", ev.config.overrides, "Override a dotted config key: key=value");

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "Write per-post predictions as JSON lines");
  predict_cmd->add_option("--data", pr.data, "Dataset manifest")->required();
  predict_cmd->add_option("--checkpoint", pr.checkpoint, "Checkpoint file")->required();
  predict_cmd->add_option("--out", pr.out, "Output JSON-lines file")->required();
  predict_cmd->add_option("--split", pr.split, "train, val, test or all")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  predict_cmd->add_flag("--affinity", pr.affinity, "Include the affinity matrix");
  predict_cmd->add_option("--set", pr.config.overrides, "Override a dotted config key: key=value");

  AblateArgs ab;
  auto* ablate_cmd = app.add_subcommand("ablate", "Train and test every ablation variant");
  ablate_cmd->add_option("--data", ab.data, "Dataset manifest")->required();
  ablate_cmd->add_option("--out", ab.out, "Output directory")->required();
  add_config_options(ablate_cmd, ab.config);

  ClusterArgs cl;
  auto* cluster_cmd = app.add_subcommand("cluster-tokens", "Group OCR word tokens into phrases");
  cluster_cmd->add_option("--in", cl.in, "JSON token list")->required()->check(CLI::ExistingFile);
  cluster_cmd->add_option("--out", cl.out, "Output JSON file (default stdout)");
  add_config_options(cluster_cmd, cl.config);

  std::string annotations;
  auto* agree_cmd = app.add_subcommand("agreement", "Fleiss' kappa of annotation records");
  agree_cmd->add_option("--annotations", annotations, "JSON lines of {post_id, ratings}")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*train_cmd) return run_train(tr);
    if (*eval_cmd) return run_eval(ev);
    if (*predict_cmd) return run_predict(pr);
    if (*ablate_cmd) return run_ablate(ab);
    if (*cluster_cmd) return run_cluster(cl);
    if (*agree_cmd) return run_agreement(annotations);
  } catch (const aomd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const aomd::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const aomd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
