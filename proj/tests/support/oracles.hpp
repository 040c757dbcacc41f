#pragma once

// Independent reference implementations used by unit tests and the
// acceptance binary. They share no code with the library beyond plain data
// types: loops over std::vector, no tape, no Tensor arithmetic.

#include <cstddef>
#include <set>
#include <vector>

#include "aomd/metrics.hpp"
#include "aomd/types.hpp"

namespace aomd::oracle {

using Matrix = std::vector<std::vector<double>>;  // row-major, m[r][c]

// --- clustering ---

// Components of the padded-overlap graph, found by depth-first search over an
// explicit adjacency matrix. pad = pad_factor x median envelope height.
std::set<std::set<std::size_t>> token_components(const std::vector<WordToken>& tokens,
                                                 double pad_factor);

// Words of one component in line order: sort by vertical center, start a new
// line whenever the gap to the previous center reaches line_threshold, then
// read each line by ascending min-x.
std::vector<std::string> line_order(const std::vector<WordToken>& tokens,
                                    const std::set<std::size_t>& members, double line_threshold);

// --- co-attention ---

struct AttentionInputs {
  Matrix visual;  // d x K raw object features
  Matrix text;    // d x S raw cluster features
  std::vector<BoundingBox> visual_boxes;
  std::vector<BoundingBox> text_boxes;
  ImageSize image;
  Matrix w, w_v, w_c;             // (d+8) x (d+8)
  std::vector<double> s_v, s_c;   // d+8
};

struct AttentionResult {
  Matrix affinity;  // S x K
  std::vector<double> alpha_visual, alpha_text;
  std::vector<double> pooled_visual, pooled_text;
};

AttentionResult co_attention(const AttentionInputs& in);

// --- metrics ---

struct Metrics {
  double accuracy, precision, recall, f1, kappa;
};

// Counts the four cells with one pass per cell and applies the textbook
// formulas.
Metrics direct_metrics(const std::vector<double>& scores, const std::vector<int>& labels,
                       double threshold);

// Probability that a random positive outscores a random negative, ties
// counting one half. O(n^2).
double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace aomd::oracle
