#pragma once

#include <cstddef>
#include <vector>

#include "aomd/types.hpp"

namespace aomd {

struct ClusterConfig {
  // Envelopes are inflated by pad_factor x (median token height) before the
  // overlap test.
  double pad_factor = 0.5;
  // Beyond this many clusters the smallest-area cluster is merged into its
  // nearest neighbour until the cap holds.
  std::size_t max_clusters = 16;
  // Two tokens of a cluster share a text line when their vertical centers are
  // closer than line_factor x (median token height).
  double line_factor = 0.6;

  void validate() const;
};

// True iff the envelopes of a and b, each grown by pad on every side,
// intersect as closed intervals.
bool adjacent(const WordToken& a, const WordToken& b, double pad);

// Median envelope height over the tokens (0 for an empty list).
double median_token_height(const std::vector<WordToken>& tokens);

// Groups OCR word tokens into phrase clusters: connected components of the
// padded-overlap graph, with words inside each cluster placed in reading
// order (lines top to bottom, words left to right). Clusters are returned in
// reading order of their envelopes.
std::vector<TokenCluster> cluster_tokens(const std::vector<WordToken>& tokens,
                                         const ClusterConfig& config = {});

}  // namespace aomd
