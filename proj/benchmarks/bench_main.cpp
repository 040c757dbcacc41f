#include <benchmark/benchmark.h>

#include "aomd/clustering.hpp"
#include "aomd/metrics.hpp"
#include "aomd/nn/lstm.hpp"
#include "aomd/nn/ops.hpp"
#include "aomd/rng.hpp"
#include "aomd/synthetic.hpp"
#include "aomd/training.hpp"

namespace {

using aomd::Rng;
using aomd::nn::Tape;
using aomd::nn::Tensor;

Tensor random_tensor(Rng& rng, std::vector<std::size_t> shape) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.normal();
  return t;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Tensor a = random_tensor(rng, {n, n}), b = random_tensor(rng, {n, n});
  for (auto _ : state) {
    Tape tape;
    benchmark::DoNotOptimize(aomd::nn::matmul(tape.constant(a), tape.constant(b)).value());
  }
}
BENCHMARK(BM_Matmul)->Arg(16)->Arg(64)->Arg(108);

void BM_LstmEncodeBackward(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  aomd::nn::ParameterStore store;
  aomd::nn::add_seq_encoder(store, "enc", 32, 100, rng);
  const Tensor inputs = random_tensor(rng, {steps, 32});
  for (auto _ : state) {
    Tape tape(&store);
    const auto params = aomd::nn::seq_encoder(tape, "enc", 32, 100);
    tape.backward(aomd::nn::sum(aomd::nn::lstm_encode(params, tape.constant(inputs))));
  }
}
BENCHMARK(BM_LstmEncodeBackward)->Arg(8)->Arg(32);

void BM_ClusterTokens(benchmark::State& state) {
  Rng rng(3);
  std::vector<aomd::WordToken> tokens;
  for (int i = 0; i < state.range(0); ++i) {
    const double x = rng.uniform(0, 600), y = rng.uniform(0, 400);
    tokens.emplace_back("w", aomd::BoundingBox::from_rect(x, y, x + rng.uniform(10, 60), y + 14));
  }
  for (auto _ : state) benchmark::DoNotOptimize(aomd::cluster_tokens(tokens));
}
BENCHMARK(BM_ClusterTokens)->Arg(10)->Arg(50)->Arg(200);

void BM_Evaluate(benchmark::State& state) {
  Rng rng(4);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < state.range(0); ++i) {
    scores.push_back(rng.uniform());
    labels.push_back(static_cast<int>(rng.below(2)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(aomd::evaluate(scores, labels));
}
BENCHMARK(BM_Evaluate)->Arg(100)->Arg(10000);

// One training step's worth of work for a single post at the default widths.
void BM_ModelForwardBackward(benchmark::State& state) {
  aomd::SyntheticSpec spec;
  spec.n_posts = 20;
  const aomd::SyntheticData data = aomd::generate_synthetic(spec);
  const aomd::AomdModel model(
      aomd::resolve_model_config(aomd::ModelConfig{}, data.dataset, data.embeddings));
  aomd::nn::ParameterStore store = model.make_parameters(1);
  const auto posts = aomd::prepare_posts(model, data.dataset.posts, data.embeddings);
  std::size_t i = 0;
  for (auto _ : state) {
    const aomd::PreparedPost& post = posts[i++ % posts.size()];
    Tape tape(&store);
    const aomd::ForwardVars vars = model.build(tape, post);
    tape.backward(aomd::nn::binary_cross_entropy(vars.y_hat, *post.label));
  }
}
BENCHMARK(BM_ModelForwardBackward);

}  // namespace

BENCHMARK_MAIN();
