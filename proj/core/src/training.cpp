#include "aomd/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "aomd/error.hpp"
#include "aomd/format.hpp"
#include "aomd/nn/ops.hpp"
#include "aomd/rng.hpp"

namespace aomd {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be at least 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("train.threshold must lie in [0, 1]");
  optim.validate();
}

ModelConfig resolve_model_config(ModelConfig config, const Dataset& dataset,
                                 const EmbeddingTable& table) {
  const std::pair<std::size_t*, std::pair<const char*, std::size_t>> dims[] = {
      {&config.object_dim, {"model.object_dim", dataset.header.feature_dim}},
      {&config.global_dim, {"model.global_dim", dataset.header.global_dim}},
      {&config.embedding_dim, {"model.embedding_dim", table.dim()}},
  };
  for (const auto& [field, source] : dims) {
    if (*field == 0) {
      *field = source.second;
    } else if (*field != source.second) {
      throw ConfigError(std::string(source.first) + " is " + std::to_string(*field) +
                        " but the data has " + std::to_string(source.second));
    }
  }
  return config;
}

std::vector<PreparedPost> prepare_posts(const AomdModel& model, const std::vector<MemePost>& posts,
                                        const EmbeddingTable& table) {
  std::vector<PreparedPost> out;
  out.reserve(posts.size());
  for (const MemePost& post : posts) {
    try {
      out.push_back(model.prepare(post, table));
    } catch (const ShapeError& e) {
      throw ShapeError("post '" + post.id + "': " + e.what());
    }
  }
  return out;
}

std::vector<PreparedPost> prepare_split(const AomdModel& model, const Dataset& dataset,
                                        const EmbeddingTable& table, Split split) {
  std::vector<MemePost> posts;
  for (std::size_t i : dataset.indices(split)) posts.push_back(dataset.posts[i]);
  return prepare_posts(model, posts, table);
}

std::vector<int> labels_of(const std::vector<PreparedPost>& posts) {
  std::vector<int> labels;
  labels.reserve(posts.size());
  for (const PreparedPost& p : posts) {
    if (!p.label) throw MetricError("post '" + p.id + "' has no label");
    labels.push_back(*p.label);
  }
  return labels;
}

std::vector<double> predict_scores(const AomdModel& model, const nn::ParameterStore& store,
                                   const std::vector<PreparedPost>& posts) {
  std::vector<double> scores;
  scores.reserve(posts.size());
  for (const PreparedPost& p : posts) scores.push_back(model.predict(p, store));
  return scores;
}

double mean_loss(const AomdModel& model, const nn::ParameterStore& store,
                 const std::vector<PreparedPost>& posts) {
  const std::vector<int> labels = labels_of(posts);
  double total = 0.0;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    nn::Tape tape(store);
    total += nn::binary_cross_entropy(model.build(tape, posts[i]).y_hat, labels[i]).value()[0];
  }
  return posts.empty() ? 0.0 : total / static_cast<double>(posts.size());
}

EvalReport evaluate_posts(const AomdModel& model, const nn::ParameterStore& store,
                          const std::vector<PreparedPost>& posts, double threshold) {
  return evaluate(predict_scores(model, store, posts), labels_of(posts), threshold);
}

TrainResult train(const AomdModel& model, const std::vector<PreparedPost>& train_posts,
                  const std::vector<PreparedPost>& val_posts, const TrainConfig& config,
                  const nn::ParameterStore* resume, const EpochCallback& on_epoch) {
  config.validate();
  if (train_posts.empty()) throw LoadError("training split is empty");
  if (val_posts.empty()) throw LoadError("validation split is empty");
  std::vector<int> train_labels, val_labels;
  try {
    train_labels = labels_of(train_posts);
    val_labels = labels_of(val_posts);
  } catch (const MetricError& e) {
    throw LoadError(std::string("cannot train on unlabeled data: ") + e.what());
  }

  TrainResult result;
  nn::ParameterStore store = resume != nullptr ? *resume : model.make_parameters(config.seed);
  result.best = store;
  double best_f1 = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  const std::size_t n = train_posts.size();
  const std::size_t batch = std::min(config.optim.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    // The schedule is keyed on the step count so a resumed run keeps drawing
    // fresh permutations.
    Rng shuffle_rng(mix64(config.seed) ^ mix64(store.step() + 1));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      const double weight = 1.0 / static_cast<double>(end - start);
      for (std::size_t j = start; j < end; ++j) {
        const PreparedPost& post = train_posts[order[j]];
        const int label = train_labels[order[j]];
        try {
          nn::Tape tape(&store);
          const nn::Var y_hat = model.build(tape, post).y_hat;
          const nn::Var loss = nn::binary_cross_entropy(y_hat, label);
          loss_sum += loss.value()[0];
          correct += ((y_hat.value()[0] >= config.threshold ? 1 : 0) == label) ? 1 : 0;
          tape.backward(loss, weight);
        } catch (const NumericError& e) {
          throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", post '" +
                             post.id + "': " + e.what());
        }
      }
      try {
        if (config.optim.clip_norm > 0.0) nn::clip_grad_norm(store, config.optim.clip_norm);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
      }
      nn::adamw_step(store, config.optim);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(n);
    record.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    const Confusion val =
        confusion_matrix(predict_scores(model, store, val_posts), val_labels, config.threshold);
    record.val_accuracy = accuracy(val);
    record.val_f1 = f1_score(val);
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);

    if (record.val_f1 > best_f1) {
      best_f1 = record.val_f1;
      result.best = store;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  result.best_val_f1 = best_f1;
  result.last = std::move(store);
  return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,train_loss,val_accuracy,val_f1,train_accuracy\n";
  for (const EpochRecord& r : history) {
    out += std::to_string(r.epoch) + "," + format_double(r.train_loss) + "," +
           format_double(r.val_accuracy) + "," + format_double(r.val_f1) + "," +
           format_double(r.train_accuracy) + "\n";
  }
  return out;
}

void write_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path) {
  write_text_file(path, history_csv(history));
}

std::vector<AblationRow> run_ablation_suite(const Dataset& dataset, const EmbeddingTable& table,
                                            const ModelConfig& base, const TrainConfig& train_config,
                                            const AblationConfig& ablation,
                                            const AblationProgress& progress) {
  if (ablation.variants.empty() || ablation.seeds.empty()) {
    throw ConfigError("ablation suite needs at least one variant and one seed");
  }
  const ModelConfig resolved = resolve_model_config(base, dataset, table);
  std::vector<std::string> test_ids;
  for (std::size_t i : dataset.indices(Split::Test)) test_ids.push_back(dataset.posts[i].id);

  struct Job {
    std::size_t row;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  std::vector<AblationRow> rows(ablation.variants.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rows[r].variant = ablation.variants[r];
    rows[r].seeds = ablation.seeds;
    rows[r].reports.resize(ablation.seeds.size());
    rows[r].test_ids = test_ids;
    for (std::size_t s = 0; s < ablation.seeds.size(); ++s) jobs.push_back({r, s});
  }

  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      try {
        const Job job = jobs[j];
        ModelConfig mc = resolved;
        mc.ablation = rows[job.row].variant;
        const AomdModel model(mc);
        TrainConfig tc = train_config;
        tc.seed = ablation.seeds[job.seed];
        const auto train_posts = prepare_split(model, dataset, table, Split::Train);
        const auto val_posts = prepare_split(model, dataset, table, Split::Val);
        const auto test_posts = prepare_split(model, dataset, table, Split::Test);
        const TrainResult result = train(model, train_posts, val_posts, tc);
        EvalReport report = evaluate_posts(model, result.best, test_posts, tc.threshold);
        std::lock_guard lock(progress_mutex);
        if (progress) progress(mc.ablation, tc.seed, report);
        rows[job.row].reports[job.seed] = std::move(report);
      } catch (...) {
        std::lock_guard lock(progress_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(ablation.threads, 1, jobs.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (AblationRow& row : rows) {
    const double count = static_cast<double>(row.reports.size());
    for (const EvalReport& r : row.reports) {
      row.accuracy += r.accuracy / count;
      row.f1 += r.f1 / count;
      row.cohen_kappa += r.cohen_kappa / count;
    }
  }
  return rows;
}

std::string ablation_table_csv(const std::vector<AblationRow>& rows) {
  std::string out = "variant,accuracy,f1,cohen_kappa\n";
  for (const AblationRow& r : rows) {
    out += std::string(to_string(r.variant)) + "," + format_double(r.accuracy) + "," +
           format_double(r.f1) + "," + format_double(r.cohen_kappa) + "\n";
  }
  return out;
}

}  // namespace aomd
