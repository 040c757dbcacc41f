#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "aomd/dataset.hpp"
#include "aomd/embedding.hpp"
#include "aomd/metrics.hpp"
#include "aomd/model.hpp"
#include "aomd/nn/optim.hpp"
#include "aomd/nn/params.hpp"

namespace aomd {

struct TrainConfig {
  std::size_t epochs = 200;
  // Stop after this many epochs without a strictly better validation F1.
  std::size_t patience = 20;
  std::uint64_t seed = 1;
  double threshold = 0.5;
  nn::OptimConfig optim;
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;      // mean over the epoch's samples, before each update
  double val_accuracy = 0.0;
  double val_f1 = 0.0;
  double train_accuracy = 0.0;  // running, same samples as train_loss
  bool operator==(const EpochRecord&) const = default;
};

struct TrainResult {
  nn::ParameterStore best;  // parameters after the epoch with the best validation F1
  nn::ParameterStore last;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_f1 = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Fills the zero-valued data widths of `config` from the dataset and the
// embedding table. Throws ConfigError when a set width disagrees.
ModelConfig resolve_model_config(ModelConfig config, const Dataset& dataset,
                                 const EmbeddingTable& table);

// Prepares the posts of one split; errors name the post.
std::vector<PreparedPost> prepare_split(const AomdModel& model, const Dataset& dataset,
                                        const EmbeddingTable& table, Split split);
std::vector<PreparedPost> prepare_posts(const AomdModel& model, const std::vector<MemePost>& posts,
                                        const EmbeddingTable& table);

// Minibatch AdamW on the mean cross-entropy with gradient clipping and early
// stopping on validation F1. Starts from `resume` when given (its step count
// carries on), otherwise from fresh parameters seeded with config.seed.
// Throws LoadError on an empty or unlabeled split and NumericError, naming
// the epoch and post, if a loss or gradient stops being finite.
TrainResult train(const AomdModel& model, const std::vector<PreparedPost>& train_posts,
                  const std::vector<PreparedPost>& val_posts, const TrainConfig& config,
                  const nn::ParameterStore* resume = nullptr, const EpochCallback& on_epoch = {});

std::vector<double> predict_scores(const AomdModel& model, const nn::ParameterStore& store,
                                   const std::vector<PreparedPost>& posts);
// Mean cross-entropy over labeled posts.
double mean_loss(const AomdModel& model, const nn::ParameterStore& store,
                 const std::vector<PreparedPost>& posts);
// Throws MetricError if a post has no label.
std::vector<int> labels_of(const std::vector<PreparedPost>& posts);
EvalReport evaluate_posts(const AomdModel& model, const nn::ParameterStore& store,
                          const std::vector<PreparedPost>& posts, double threshold = 0.5);

// epoch,train_loss,val_accuracy,val_f1,train_accuracy
std::string history_csv(const std::vector<EpochRecord>& history);
void write_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path);

struct AblationConfig {
  std::vector<Ablation> variants{kAllAblations.begin(), kAllAblations.end()};
  std::vector<std::uint64_t> seeds{1};
  // Runs (variant, seed) jobs in parallel; results do not depend on it.
  std::size_t threads = 1;
};

struct AblationRow {
  Ablation variant = Ablation::Full;
  std::vector<std::uint64_t> seeds;
  std::vector<EvalReport> reports;  // test split, one per seed
  std::vector<std::string> test_ids;
  double accuracy = 0.0;  // means over seeds
  double f1 = 0.0;
  double cohen_kappa = 0.0;
};

using AblationProgress = std::function<void(Ablation, std::uint64_t seed, const EvalReport&)>;

// Trains and tests every variant once per seed on the dataset's own splits;
// train_config.seed is replaced by each listed seed.
std::vector<AblationRow> run_ablation_suite(const Dataset& dataset, const EmbeddingTable& table,
                                            const ModelConfig& base, const TrainConfig& train_config,
                                            const AblationConfig& ablation,
                                            const AblationProgress& progress = {});

// variant,accuracy,f1,cohen_kappa with one row per variant.
std::string ablation_table_csv(const std::vector<AblationRow>& rows);

}  // namespace aomd
