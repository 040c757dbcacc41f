#include "aomd/nn/lstm.hpp"

#include <cmath>
#include <memory>

#include "aomd/error.hpp"
#include "aomd/rng.hpp"
#include "kernels.hpp"

namespace aomd::nn {

void add_seq_encoder(ParameterStore& store, const std::string& prefix, std::size_t input_dim,
                     std::size_t hidden, Rng& rng) {
  // Each gate block is initialized as its own [h, d_e + h] matrix.
  Tensor w({4 * hidden, input_dim + hidden});
  const double limit = std::sqrt(6.0 / static_cast<double>(input_dim + 2 * hidden));
  for (double& v : w.values()) v = rng.uniform(-limit, limit);
  Tensor b({4 * hidden});
  for (std::size_t j = 0; j < hidden; ++j) {
    b[static_cast<std::size_t>(Gate::Forget) * hidden + j] = 1.0;
  }
  store.add(prefix + ".W", std::move(w));
  store.add(prefix + ".b", std::move(b));
}

SeqEncoderParams seq_encoder(Tape& tape, const std::string& prefix, std::size_t input_dim,
                             std::size_t hidden) {
  SeqEncoderParams p{tape.parameter(prefix + ".W"), tape.parameter(prefix + ".b"), hidden, input_dim};
  const auto& ws = p.weights.value().shape();
  if (ws.size() != 2 || ws[0] != 4 * hidden || ws[1] != input_dim + hidden ||
      p.bias.value().size() != 4 * hidden) {
    throw ShapeError("sequence encoder '" + prefix + "' has weights " +
                     p.weights.value().shape_string() + " and bias " +
                     p.bias.value().shape_string() + ", expected [" + std::to_string(4 * hidden) +
                     "x" + std::to_string(input_dim + hidden) + "]");
  }
  return p;
}

namespace {

struct StepCache {
  std::size_t steps = 0;
  // Per step: concatenated input z_t, gate activations (i, f, g, o) and c_t.
  std::vector<double> z;
  std::vector<double> gates;
  std::vector<double> cells;
};

}  // namespace

Var lstm_encode(const SeqEncoderParams& params, Var inputs) {
  Tape& tape = *params.weights.tape();
  const std::size_t h = params.hidden;
  const std::size_t de = params.input;
  const std::size_t width = de + h;
  const Tensor& x = inputs.value();
  if (x.rank() != 2 || (x.rows() > 0 && x.cols() != de)) {
    throw ShapeError("lstm_encode: inputs " + x.shape_string() + " do not match input width " +
                     std::to_string(de));
  }
  const std::size_t steps = x.rows();
  if (steps == 0) return tape.constant(Tensor({h}));

  const Tensor& w = params.weights.value();
  const Tensor& b = params.bias.value();
  auto cache = std::make_shared<StepCache>();
  cache->steps = steps;
  cache->z.resize(steps * width);
  cache->gates.resize(steps * 4 * h);
  cache->cells.resize(steps * h);

  std::vector<double> hidden(h, 0.0), cell(h, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    double* z = &cache->z[t * width];
    std::copy_n(&x.values()[t * de], de, z);
    std::copy(hidden.begin(), hidden.end(), z + de);
    double* a = &cache->gates[t * 4 * h];
    for (std::size_t r = 0; r < 4 * h; ++r) a[r] = b[r] + kernels::dot(&w.values()[r * width], z, width);
    double* c = &cache->cells[t * h];
    for (std::size_t j = 0; j < h; ++j) {
      const double ig = kernels::sigmoid(a[j]);
      const double fg = kernels::sigmoid(a[h + j]);
      const double cg = std::tanh(a[2 * h + j]);
      const double og = kernels::sigmoid(a[3 * h + j]);
      a[j] = ig;
      a[h + j] = fg;
      a[2 * h + j] = cg;
      a[3 * h + j] = og;
      c[j] = fg * cell[j] + ig * cg;
      hidden[j] = og * std::tanh(c[j]);
    }
    std::copy_n(c, h, cell.begin());
  }

  const auto iw = params.weights.id(), ib = params.bias.id(), ix = inputs.id();
  return tape.record(
      "lstm", Tensor::vector(hidden), {params.weights, params.bias, inputs},
      [cache, iw, ib, ix, h, de, width](Tape& t, std::uint32_t self) {
        const std::size_t steps = cache->steps;
        const Tensor& w = t.value(iw);
        const bool need_w = t.requires_grad(iw), need_b = t.requires_grad(ib),
                   need_x = t.requires_grad(ix);
        std::vector<double> dh(t.grad_view(self).values()), dc(h, 0.0), da(4 * h), dz(width);
        for (std::size_t s = steps; s-- > 0;) {
          const double* g = &cache->gates[s * 4 * h];
          const double* c = &cache->cells[s * h];
          const double* c_prev = s > 0 ? &cache->cells[(s - 1) * h] : nullptr;
          for (std::size_t j = 0; j < h; ++j) {
            const double ig = g[j], fg = g[h + j], cg = g[2 * h + j], og = g[3 * h + j];
            const double tc = std::tanh(c[j]);
            const double d_o = dh[j] * tc;
            dc[j] += dh[j] * og * (1.0 - tc * tc);
            const double d_i = dc[j] * cg;
            const double d_g = dc[j] * ig;
            const double d_f = c_prev != nullptr ? dc[j] * c_prev[j] : 0.0;
            da[j] = d_i * ig * (1.0 - ig);
            da[h + j] = d_f * fg * (1.0 - fg);
            da[2 * h + j] = d_g * (1.0 - cg * cg);
            da[3 * h + j] = d_o * og * (1.0 - og);
            dc[j] *= fg;
          }
          const double* z = &cache->z[s * width];
          if (need_w) {
            Tensor& gw = t.grad(iw);
            for (std::size_t r = 0; r < 4 * h; ++r) kernels::axpy(da[r], z, &gw.values()[r * width], width);
          }
          if (need_b) kernels::axpy(1.0, da.data(), t.grad(ib).values().data(), 4 * h);
          std::fill(dz.begin(), dz.end(), 0.0);
          for (std::size_t r = 0; r < 4 * h; ++r) kernels::axpy(da[r], &w.values()[r * width], dz.data(), width);
          if (need_x) kernels::axpy(1.0, dz.data(), &t.grad(ix).values()[s * de], de);
          std::copy(dz.begin() + static_cast<std::ptrdiff_t>(de), dz.end(), dh.begin());
        }
      });
}

Tensor embed_words(const std::vector<std::string>& words, const EmbeddingTable& table) {
  Tensor out({words.size(), table.dim()});
  for (std::size_t t = 0; t < words.size(); ++t) {
    auto row = table.lookup(words[t]);
    std::copy(row.begin(), row.end(), &out.values()[t * table.dim()]);
  }
  return out;
}

Var encode_sequence(const SeqEncoderParams& params, const std::vector<std::string>& words,
                    const EmbeddingTable& table) {
  if (table.dim() != params.input) {
    throw ShapeError("encode_sequence: embedding width " + std::to_string(table.dim()) +
                     " does not match encoder input width " + std::to_string(params.input));
  }
  Tape& tape = *params.weights.tape();
  return lstm_encode(params, tape.constant(embed_words(words, table)));
}

}  // namespace aomd::nn
