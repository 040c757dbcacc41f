#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "aomd/embedding.hpp"
#include "aomd/nn/tape.hpp"

namespace aomd::nn {

// Single-layer, left-to-right LSTM. The four gate maps are stacked row-wise
// in one [4h, d_e + h] weight matrix and one [4h] bias, in the order
// input, forget, cell candidate, output; each block acts on [x_t, h_{t-1}].
struct SeqEncoderParams {
  Var weights;
  Var bias;
  std::size_t hidden = 0;
  std::size_t input = 0;
};

enum class Gate : std::size_t { Input = 0, Forget = 1, Cell = 2, Output = 3 };

// Names and initial values registered by add_seq_encoder.
void add_seq_encoder(ParameterStore& store, const std::string& prefix, std::size_t input_dim,
                     std::size_t hidden, Rng& rng);
SeqEncoderParams seq_encoder(Tape& tape, const std::string& prefix, std::size_t input_dim,
                             std::size_t hidden);

// Final hidden state after running the cell over the rows of `inputs`
// ([T, d_e]). A sequence of length zero yields the zero vector.
Var lstm_encode(const SeqEncoderParams& params, Var inputs);

// Embedded words as a [T, d_e] matrix; unknown words use the table's mean row.
Tensor embed_words(const std::vector<std::string>& words, const EmbeddingTable& table);

Var encode_sequence(const SeqEncoderParams& params, const std::vector<std::string>& words,
                    const EmbeddingTable& table);

}  // namespace aomd::nn
