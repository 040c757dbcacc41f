#include "aomd/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "aomd/error.hpp"

namespace aomd {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

struct Group {
  std::vector<std::size_t> members;
  Envelope env;
};

// Separation between two envelopes (0 when they overlap).
double gap(const Envelope& a, const Envelope& b) {
  const double dx = std::max({0.0, a.min_x - b.max_x, b.min_x - a.max_x});
  const double dy = std::max({0.0, a.min_y - b.max_y, b.min_y - a.max_y});
  return std::hypot(dx, dy);
}

// Deterministic key independent of input order, used to break ties.
auto group_key(const Group& g, const std::vector<WordToken>& tokens) {
  std::vector<std::string> words;
  for (std::size_t m : g.members) words.push_back(tokens[m].word);
  std::sort(words.begin(), words.end());
  return std::make_tuple(g.env.min_y, g.env.min_x, g.env.max_y, g.env.max_x, words);
}

void enforce_cap(std::vector<Group>& groups, const std::vector<WordToken>& tokens,
                 std::size_t cap) {
  while (groups.size() > cap && groups.size() > 1) {
    std::size_t smallest = 0;
    for (std::size_t i = 1; i < groups.size(); ++i) {
      const double a = groups[i].env.area();
      const double b = groups[smallest].env.area();
      if (a < b || (a == b && group_key(groups[i], tokens) < group_key(groups[smallest], tokens))) {
        smallest = i;
      }
    }
    std::size_t nearest = smallest == 0 ? 1 : 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (i == smallest) continue;
      const double d = gap(groups[smallest].env, groups[i].env);
      if (d < best || (d == best && group_key(groups[i], tokens) < group_key(groups[nearest], tokens))) {
        best = d;
        nearest = i;
      }
    }
    Group& into = groups[nearest];
    into.members.insert(into.members.end(), groups[smallest].members.begin(),
                        groups[smallest].members.end());
    into.env = into.env.united(groups[smallest].env);
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(smallest));
  }
}

TokenCluster order_words(const Group& g, const std::vector<WordToken>& tokens,
                         double line_threshold) {
  struct Item {
    Envelope env;
    std::size_t index;
  };
  std::vector<Item> items;
  for (std::size_t m : g.members) items.push_back({tokens[m].box.envelope(), m});
  auto word_order = [&](const Item& a, const Item& b) {
    return std::tie(a.env.min_x, a.env.min_y, a.env.max_x, a.env.max_y, tokens[a.index].word,
                    a.index) < std::tie(b.env.min_x, b.env.min_y, b.env.max_x, b.env.max_y,
                                        tokens[b.index].word, b.index);
  };
  std::sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
    if (a.env.center_y() != b.env.center_y()) return a.env.center_y() < b.env.center_y();
    return word_order(a, b);
  });

  // Lines are maximal runs whose consecutive vertical centers differ by less
  // than the threshold.
  std::vector<std::vector<Item>> lines;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i == 0 || items[i].env.center_y() - items[i - 1].env.center_y() >= line_threshold) {
      lines.emplace_back();
    }
    lines.back().push_back(items[i]);
  }

  TokenCluster cluster;
  for (auto& line : lines) {
    std::sort(line.begin(), line.end(), word_order);
    for (const Item& it : line) {
      cluster.words.push_back(tokens[it.index].word);
      cluster.members.push_back(it.index);
    }
  }
  cluster.box = BoundingBox::from_envelope(g.env);
  return cluster;
}

}  // namespace

void ClusterConfig::validate() const {
  if (!(pad_factor >= 0.0) || !std::isfinite(pad_factor)) {
    throw ConfigError("cluster.pad_factor must be a finite value >= 0");
  }
  if (max_clusters == 0) throw ConfigError("cluster.max_clusters must be positive");
  if (!(line_factor > 0.0)) throw ConfigError("cluster.line_factor must be positive");
}

bool adjacent(const WordToken& a, const WordToken& b, double pad) {
  return a.box.envelope().inflated(pad).intersects(b.box.envelope().inflated(pad));
}

double median_token_height(const std::vector<WordToken>& tokens) {
  if (tokens.empty()) return 0.0;
  std::vector<double> h;
  h.reserve(tokens.size());
  for (const auto& t : tokens) h.push_back(t.box.envelope().height());
  std::sort(h.begin(), h.end());
  const std::size_t n = h.size();
  return n % 2 == 1 ? h[n / 2] : 0.5 * (h[n / 2 - 1] + h[n / 2]);
}

std::vector<TokenCluster> cluster_tokens(const std::vector<WordToken>& tokens,
                                         const ClusterConfig& config) {
  config.validate();
  if (tokens.empty()) return {};
  const double height = median_token_height(tokens);
  const double pad = config.pad_factor * height;

  std::vector<Envelope> padded;
  padded.reserve(tokens.size());
  for (const auto& t : tokens) padded.push_back(t.box.envelope().inflated(pad));

  DisjointSets sets(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t j = i + 1; j < tokens.size(); ++j) {
      if (padded[i].intersects(padded[j])) sets.unite(i, j);
    }
  }

  std::vector<Group> groups;
  std::vector<std::size_t> slot(tokens.size(), SIZE_MAX);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] == SIZE_MAX) {
      slot[root] = groups.size();
      groups.push_back({{}, tokens[i].box.envelope()});
    }
    Group& g = groups[slot[root]];
    g.members.push_back(i);
    g.env = g.env.united(tokens[i].box.envelope());
  }

  enforce_cap(groups, tokens, config.max_clusters);

  std::sort(groups.begin(), groups.end(), [&](const Group& a, const Group& b) {
    return group_key(a, tokens) < group_key(b, tokens);
  });

  std::vector<TokenCluster> clusters;
  clusters.reserve(groups.size());
  for (const auto& g : groups) clusters.push_back(order_words(g, tokens, config.line_factor * height));
  return clusters;
}

}  // namespace aomd
