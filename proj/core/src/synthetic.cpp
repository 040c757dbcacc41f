#include "aomd/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "aomd/error.hpp"
#include "aomd/rng.hpp"

namespace aomd {

namespace {
constexpr double kFeatureScale = 0.5;
constexpr double kClassScale = 1.0;
constexpr double kEmbeddingScale = 0.5;
constexpr double kKeywordSpread = 0.5;
constexpr double kGlobalNoise = 0.1;
constexpr double kCharWidth = 12.0;
constexpr double kWordHeight = 20.0;
constexpr double kWordGap = 6.0;
// Description length is 1 + below(kDescriptionFill) filler words, and a post
// has below(kMaxComments) filler comments.
constexpr std::uint64_t kDescriptionFill = 2;
constexpr std::uint64_t kMaxComments = 2;
// Share of posts with one extra comment echoing a keyword of the post's class.
constexpr double kCommentHintRate = 0.25;

// Values round-trip through the f32 feature files unchanged.
double f32(double v) { return static_cast<double>(static_cast<float>(v)); }

std::vector<double> normal_vector(Rng& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal() * scale;
  return v;
}

double uniform_int(Rng& rng, int lo, int hi) {
  return static_cast<double>(lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))));
}

struct Vocabulary {
  std::vector<std::string> analog, offensive, benign, filler;
};

Vocabulary make_vocabulary(std::size_t size) {
  Vocabulary v;
  for (std::size_t i = 0; i < kSyntheticAnalogWords; ++i) v.analog.push_back("analog" + std::to_string(i));
  for (std::size_t i = 0; i < kSyntheticKeywords; ++i) {
    v.offensive.push_back("offkw" + std::to_string(i));
    v.benign.push_back("benkw" + std::to_string(i));
  }
  const std::size_t fillers = size - kSyntheticAnalogWords - 2 * kSyntheticKeywords;
  for (std::size_t i = 0; i < fillers; ++i) v.filler.push_back("w" + std::to_string(i));
  return v;
}

const std::string& pick(Rng& rng, const std::vector<std::string>& words) {
  return words[static_cast<std::size_t>(rng.below(words.size()))];
}

// Lays a phrase out left to right on one line, starting at (x, y).
void place_phrase(std::vector<WordToken>& tokens, const std::vector<std::string>& words, double x,
                  double y) {
  for (const std::string& w : words) {
    const double width = kCharWidth * static_cast<double>(w.size());
    tokens.emplace_back(w, BoundingBox::from_rect(x, y, x + width, y + kWordHeight));
    x += width + kWordGap;
  }
}

std::vector<std::string> filler_words(Rng& rng, const Vocabulary& vocab, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(pick(rng, vocab.filler));
  return out;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const std::string& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

BoundingBox object_box(double cx, double cy, double w, double h) {
  return BoundingBox::from_rect(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2);
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_posts < 10) throw ConfigError("synthetic.n_posts must be at least 10");
  if (d == 0 || d_g == 0 || embedding_dim == 0) {
    throw ConfigError("synthetic.d, synthetic.d_g and synthetic.embedding_dim must be positive");
  }
  const std::size_t reserved = kSyntheticAnalogWords + 2 * kSyntheticKeywords;
  if (vocab_size < reserved + 4) {
    throw ConfigError("synthetic.vocab_size must be at least " + std::to_string(reserved + 4));
  }
  const std::pair<const char*, double> rates[] = {{"synthetic.analogy_rate", analogy_rate},
                                                  {"synthetic.noise_rate", noise_rate},
                                                  {"synthetic.miss_rate", miss_rate},
                                                  {"synthetic.positive_rate", positive_rate}};
  for (const auto& [name, rate] : rates) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticData out;
  const Vocabulary vocab = make_vocabulary(spec.vocab_size);
  out.analog_words = vocab.analog;
  out.offensive_keywords = vocab.offensive;
  out.benign_keywords = vocab.benign;

  std::vector<std::string> words;
  for (const auto* group : {&vocab.analog, &vocab.offensive, &vocab.benign, &vocab.filler}) {
    words.insert(words.end(), group->begin(), group->end());
  }
  std::vector<double> matrix = normal_vector(rng, words.size() * spec.embedding_dim, kEmbeddingScale);
  // Keywords of one class sit around a shared direction, like related words
  // in a pretrained table.
  for (std::size_t c = 0; c < 2; ++c) {
    const std::vector<double> center = normal_vector(rng, spec.embedding_dim, kEmbeddingScale);
    const std::size_t first = kSyntheticAnalogWords + c * kSyntheticKeywords;
    for (std::size_t w = first; w < first + kSyntheticKeywords; ++w) {
      for (std::size_t r = 0; r < spec.embedding_dim; ++r) {
        double& x = matrix[w * spec.embedding_dim + r];
        x = center[r] + kKeywordSpread * x;
      }
    }
  }
  for (double& x : matrix) x = f32(x);
  out.embeddings = EmbeddingTable(words, std::move(matrix), spec.embedding_dim);

  // proto[c][a] = u_a + s_c: a shared word part plus a class offset.
  std::vector<std::vector<double>> word_part;
  for (std::size_t a = 0; a < kSyntheticAnalogWords; ++a) {
    word_part.push_back(normal_vector(rng, spec.d, kFeatureScale));
  }
  for (int c = 0; c < 2; ++c) {
    const std::vector<double> offset = normal_vector(rng, spec.d, kClassScale);
    for (std::size_t a = 0; a < kSyntheticAnalogWords; ++a) {
      std::vector<double> p(spec.d);
      for (std::size_t r = 0; r < spec.d; ++r) p[r] = f32(word_part[a][r] + offset[r]);
      out.prototypes[c].push_back(std::move(p));
    }
  }
  const std::vector<double> scene_map =
      normal_vector(rng, spec.d_g * spec.d, 1.0 / std::sqrt(static_cast<double>(spec.d)));

  Dataset& ds = out.dataset;
  ds.header.feature_dim = spec.d;
  ds.header.global_dim = spec.d_g;
  ds.header.split_seed = spec.seed;
  const int width_digits = static_cast<int>(std::to_string(spec.n_posts - 1).size());

  for (std::size_t i = 0; i < spec.n_posts; ++i) {
    MemePost post;
    PlantedInfo info;
    std::string index = std::to_string(i);
    post.id = "syn" + std::string(static_cast<std::size_t>(width_digits) - index.size(), '0') + index;
    post.image_size = {kSyntheticImageWidth, kSyntheticImageHeight};

    const int y = rng.bernoulli(spec.positive_rate) ? 1 : 0;
    info.clean_label = y;
    info.analogy = rng.bernoulli(spec.analogy_rate);
    std::vector<double> scene(spec.d, 0.0);
    std::string keyword;

    if (info.analogy) {
      const std::size_t a = static_cast<std::size_t>(rng.below(kSyntheticAnalogWords));
      const std::size_t b =
          (a + 1 + static_cast<std::size_t>(rng.below(kSyntheticAnalogWords - 1))) %
          kSyntheticAnalogWords;
      info.missed = rng.bernoulli(spec.miss_rate);
      info.planted_class = y;
      info.analog_word = vocab.analog[a];

      const bool planted_left = rng.bernoulli(0.5);
      const double left_x = uniform_int(rng, 100, 220);
      const double right_x = uniform_int(rng, 420, 540);
      const double planted_x = planted_left ? left_x : right_x;
      const double other_x = planted_left ? right_x : left_x;
      const double planted_y = uniform_int(rng, 150, 330);
      const double other_y = uniform_int(rng, 150, 330);
      VisualObject planted{out.prototypes[y][a],
                           object_box(planted_x, planted_y, uniform_int(rng, 80, 160),
                                      uniform_int(rng, 80, 160))};
      VisualObject distractor{out.prototypes[1 - y][b],
                              object_box(other_x, other_y, uniform_int(rng, 80, 160),
                                         uniform_int(rng, 80, 160))};
      for (std::size_t r = 0; r < spec.d; ++r) {
        scene[r] = planted.feature[r] + (info.missed ? 0.0 : distractor.feature[r]);
      }
      if (!info.missed) {
        if (rng.bernoulli(0.5)) std::swap(planted, distractor);
        post.visual_objects.push_back(std::move(planted));
        post.visual_objects.push_back(std::move(distractor));
      }
      // The analog word sits on its object's center, shifted by at most 10 px.
      const std::string& word = vocab.analog[a];
      const double w = kCharWidth * static_cast<double>(word.size());
      const double cx = planted_x + uniform_int(rng, -10, 10);
      const double cy = planted_y + uniform_int(rng, -10, 10);
      post.word_tokens.emplace_back(
          word, BoundingBox::from_rect(cx - w / 2, cy - kWordHeight / 2, cx + w / 2,
                                       cy + kWordHeight / 2));
    } else {
      keyword = pick(rng, y == 1 ? vocab.offensive : vocab.benign);
    }

    // A caption phrase in the top band, clear of the object area.
    const auto phrase = filler_words(rng, vocab, 1 + static_cast<std::size_t>(rng.below(3)));
    place_phrase(post.word_tokens, phrase, uniform_int(rng, 10, 300), 12.0);

    std::vector<double> global(spec.d_g);
    for (std::size_t r = 0; r < spec.d_g; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < spec.d; ++c) acc += scene_map[r * spec.d + c] * scene[c];
      global[r] = f32(acc + kGlobalNoise * rng.normal());
    }
    post.global_feature = std::move(global);

    auto description = filler_words(rng, vocab, 1 + static_cast<std::size_t>(rng.below(kDescriptionFill)));
    if (!keyword.empty()) {
      const auto at = static_cast<std::ptrdiff_t>(rng.below(description.size() + 1));
      description.insert(description.begin() + at, keyword);
    }
    post.description = join(description);
    const std::size_t comments = static_cast<std::size_t>(rng.below(kMaxComments));
    for (std::size_t c = 0; c < comments; ++c) {
      post.comments.push_back(join(filler_words(rng, vocab, 1 + static_cast<std::size_t>(rng.below(4)))));
    }
    if (rng.bernoulli(kCommentHintRate)) {
      auto reply = filler_words(rng, vocab, static_cast<std::size_t>(rng.below(3)));
      const auto at = static_cast<std::ptrdiff_t>(rng.below(reply.size() + 1));
      reply.insert(reply.begin() + at, pick(rng, y == 1 ? vocab.offensive : vocab.benign));
      post.comments.push_back(join(reply));
    }

    post.label = rng.bernoulli(spec.noise_rate) ? 1 - y : y;
    ds.posts.push_back(std::move(post));
    out.planted.push_back(std::move(info));
  }
  ds.splits = assign_splits(ds.posts, ds.header.split_seed, ds.header.split_fractions);
  return out;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw LoadError("cannot create '" + dir.string() + "': " + ec.message());
  save_dataset(data.dataset, dir);
  save_embeddings(data.embeddings, dir / data.dataset.header.embedding_path);
}

SyntheticData gen_synthetic(const SyntheticSpec& spec, const std::filesystem::path& dir) {
  SyntheticData data = generate_synthetic(spec);
  write_synthetic(data, dir);
  data.dataset.root = dir;
  return data;
}

}  // namespace aomd
