#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "aomd/nn/ops.hpp"
#include "aomd/nn/params.hpp"
#include "aomd/nn/tape.hpp"
#include "aomd/rng.hpp"
#include "aomd/types.hpp"

namespace aomd::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string file_bytes(const std::filesystem::path& path);
// Concatenated relative names and bytes of every regular file under dir.
std::string tree_bytes(const std::filesystem::path& dir);

nn::Tensor random_tensor(Rng& rng, std::vector<std::size_t> shape, double scale = 1.0);

// A few named tensors of random shape with random values and Adam moments,
// step and seed.
nn::ParameterStore random_store(Rng& rng);

// Worst disagreement between reverse-mode and central-difference gradients.
struct GradCheck {
  double max_rel_error = 0.0;
  std::string worst;  // "<name>[index]"
  std::size_t checked = 0;
};

// |a - n| / max(|a|, |n|, floor)
double relative_error(double analytic, double numeric, double floor = 1e-6);

// Gradient of the scalar loss_fn with respect to every parameter entry.
GradCheck check_parameter_gradients(nn::ParameterStore& store,
                                    const std::function<nn::Var(nn::Tape&)>& loss_fn,
                                    double step = 1e-5);

// Gradient of loss_fn with respect to each input tensor.
GradCheck check_input_gradients(
    std::vector<nn::Tensor> inputs,
    const std::function<nn::Var(nn::Tape&, const std::vector<nn::Var>&)>& loss_fn,
    double step = 1e-5);

// sum(out * weights) with fixed pseudo-random weights: a scalar probe that
// sends a generic upstream gradient into `out`.
nn::Var probe(nn::Var out, std::uint64_t seed);

// Axis-aligned word token with pixel extents.
WordToken token(const std::string& word, double x0, double y0, double x1, double y1);

// Random token sets on a grid-ish canvas, sized to produce both isolated and
// chained tokens.
std::vector<WordToken> random_tokens(Rng& rng, std::size_t max_tokens);

// Random valid post with the given widths.
MemePost random_post(Rng& rng, std::size_t index, std::size_t feature_dim, std::size_t global_dim,
                     std::size_t max_objects = 5);

}  // namespace aomd::testing
