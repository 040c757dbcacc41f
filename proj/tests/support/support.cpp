#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>

#include <unistd.h>

namespace aomd::testing {

TempDir::TempDir(const std::string& tag) {
  static std::uint64_t counter = 0;
  Rng rng(hash_string(tag, static_cast<std::uint64_t>(::getpid())) + counter++);
  path_ = std::filesystem::temp_directory_path() /
          ("aomd_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(rng.next() % 1000000));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

nn::ParameterStore random_store(Rng& rng) {
  nn::ParameterStore store;
  const std::size_t n = 1 + rng.below(5);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> shape{1 + rng.below(4)};
    if (rng.bernoulli(0.5)) shape.push_back(1 + rng.below(4));
    nn::Parameter& p = store.add("p" + std::to_string(rng.below(1000)) + "_" + std::to_string(i),
                             random_tensor(rng, shape, 3.0));
    p.adam_m = random_tensor(rng, shape);
    p.adam_v = random_tensor(rng, shape);
  }
  store.set_step(rng.below(100000));
  store.set_seed(rng.next());
  return store;
}

std::string file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string tree_bytes(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) {
    out += std::filesystem::relative(f, dir).string();
    out += '\0';
    out += file_bytes(f);
    out += '\0';
  }
  return out;
}

nn::Tensor random_tensor(Rng& rng, std::vector<std::size_t> shape, double scale) {
  nn::Tensor t(std::move(shape));
  for (double& v : t.values()) v = rng.uniform(-scale, scale);
  return t;
}

double relative_error(double analytic, double numeric, double floor) {
  const double den = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / den;
}

namespace {

void note(GradCheck& g, double rel, const std::string& where) {
  ++g.checked;
  if (rel > g.max_rel_error || std::isnan(rel)) {
    g.max_rel_error = std::isnan(rel) ? INFINITY : rel;
    g.worst = where;
  }
}

}  // namespace

GradCheck check_parameter_gradients(nn::ParameterStore& store,
                                    const std::function<nn::Var(nn::Tape&)>& loss_fn, double step) {
  store.zero_grad();
  {
    nn::Tape tape(&store);
    tape.backward(loss_fn(tape));
  }
  std::map<std::string, nn::Tensor> analytic;
  for (auto& [name, p] : store) analytic[name] = p.grad;
  store.zero_grad();

  auto eval = [&] {
    nn::Tape tape(&store, false);
    return loss_fn(tape).value()[0];
  };
  GradCheck g;
  for (auto& [name, p] : store) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + step;
      const double up = eval();
      p.value[i] = saved - step;
      const double down = eval();
      p.value[i] = saved;
      note(g, relative_error(analytic[name][i], (up - down) / (2 * step)),
           name + "[" + std::to_string(i) + "]");
    }
  }
  return g;
}

GradCheck check_input_gradients(
    std::vector<nn::Tensor> inputs,
    const std::function<nn::Var(nn::Tape&, const std::vector<nn::Var>&)>& loss_fn, double step) {
  std::vector<nn::Tensor> analytic;
  {
    nn::Tape tape;
    std::vector<nn::Var> vars;
    for (const auto& x : inputs) vars.push_back(tape.input(x));
    tape.backward(loss_fn(tape, vars));
    for (const auto& v : vars) analytic.push_back(v.grad().empty() ? nn::Tensor::zeros_like(v.value()) : v.grad());
  }
  auto eval = [&] {
    nn::Tape tape(nullptr, false);
    std::vector<nn::Var> vars;
    for (const auto& x : inputs) vars.push_back(tape.input(x));
    return loss_fn(tape, vars).value()[0];
  };
  GradCheck g;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    for (std::size_t i = 0; i < inputs[t].size(); ++i) {
      const double saved = inputs[t][i];
      inputs[t][i] = saved + step;
      const double up = eval();
      inputs[t][i] = saved - step;
      const double down = eval();
      inputs[t][i] = saved;
      note(g, relative_error(analytic[t][i], (up - down) / (2 * step)),
           "input" + std::to_string(t) + "[" + std::to_string(i) + "]");
    }
  }
  return g;
}

nn::Var probe(nn::Var out, std::uint64_t seed) {
  Rng rng(seed);
  nn::Tensor w(out.value().shape());
  for (double& v : w.values()) v = rng.uniform(-1.0, 1.0);
  return nn::sum(nn::mul(out, out.tape()->constant(std::move(w))));
}

WordToken token(const std::string& word, double x0, double y0, double x1, double y1) {
  return WordToken(word, BoundingBox::from_rect(x0, y0, x1, y1));
}

std::vector<WordToken> random_tokens(Rng& rng, std::size_t max_tokens) {
  const std::size_t n = static_cast<std::size_t>(rng.below(max_tokens + 1));
  std::vector<WordToken> tokens;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = 8.0 + static_cast<double>(rng.below(8));
    const double w = 10.0 + static_cast<double>(rng.below(40));
    const double x = static_cast<double>(rng.below(300));
    const double y = static_cast<double>(rng.below(300));
    tokens.push_back(token("t" + std::to_string(rng.below(20)), x, y, x + w, y + h));
  }
  return tokens;
}

MemePost random_post(Rng& rng, std::size_t index, std::size_t feature_dim, std::size_t global_dim,
                     std::size_t max_objects) {
  MemePost p;
  p.id = "post-" + std::to_string(index);
  p.image_size = {200.0 + static_cast<double>(rng.below(400)), 100.0 + static_cast<double>(rng.below(300))};
  // Feature files store f32, so generated values are f32-exact.
  auto f32 = [](double v) { return static_cast<double>(static_cast<float>(v)); };
  for (std::size_t i = 0; i < global_dim; ++i) p.global_feature.push_back(f32(rng.normal()));
  const std::size_t k = static_cast<std::size_t>(rng.below(max_objects + 1));
  for (std::size_t j = 0; j < k; ++j) {
    VisualObject o;
    for (std::size_t i = 0; i < feature_dim; ++i) o.feature.push_back(f32(rng.normal()));
    const double x = f32(rng.uniform(0, p.image_size.width - 20));
    const double y = f32(rng.uniform(0, p.image_size.height - 20));
    o.box = BoundingBox::from_rect(x, y, f32(x + 10.5), f32(y + 12.25));
    p.visual_objects.push_back(std::move(o));
  }
  const std::size_t tokens = static_cast<std::size_t>(rng.below(6));
  for (std::size_t j = 0; j < tokens; ++j) {
    const double x = rng.uniform(0, 150);
    const double y = rng.uniform(0, 80);
    p.word_tokens.push_back(token("w" + std::to_string(rng.below(50)), x, y, x + rng.uniform(1, 40), y + 10));
  }
  if (rng.bernoulli(0.7)) p.description = "some words here " + std::to_string(rng.below(100));
  const std::size_t comments = static_cast<std::size_t>(rng.below(3));
  for (std::size_t j = 0; j < comments; ++j) p.comments.push_back("comment \"" + std::to_string(j) + "\" ok");
  if (rng.bernoulli(0.9)) p.label = static_cast<int>(rng.below(2));
  return p;
}

}  // namespace aomd::testing
