#include <gtest/gtest.h>

#include <set>

#include <json.hpp>

#include "aomd/config.hpp"
#include "aomd/error.hpp"
#include "aomd/format.hpp"
#include "support.hpp"

namespace aomd {
namespace {

TEST(Config, KeysAreUniqueAndSectioned) {
  const auto keys = config_keys();
  std::set<std::string> seen;
  const std::set<std::string> sections{"data", "model", "cluster", "train", "optim", "synthetic", "ablation"};
  for (const auto& k : keys) {
    EXPECT_TRUE(seen.insert(k).second) << k;
    EXPECT_EQ(sections.count(k.substr(0, k.find('.'))), 1u) << k;
  }
  EXPECT_EQ(seen.count("optim.learning_rate"), 1u);
}

TEST(Config, ApplyJsonSetsFields) {
  RunConfig c;
  apply_json(c, R"({"optim": {"learning_rate": 0.05, "batch_size": 8},
                    "model": {"ablation": "no_ocr", "dim": 16},
                    "cluster": {"pad_factor": 0.7},
                    "ablation": {"seeds": [3, 4]}})");
  EXPECT_EQ(c.train.optim.learning_rate, 0.05);
  EXPECT_EQ(c.train.optim.batch_size, 8u);
  EXPECT_EQ(c.model.ablation, Ablation::NoOcr);
  EXPECT_EQ(c.model.dim, 16u);
  EXPECT_EQ(c.model.cluster.pad_factor, 0.7);
  EXPECT_EQ(c.ablation.seeds, (std::vector<std::uint64_t>{3, 4}));
}

TEST(Config, ApplyJsonRejectsBadInput) {
  RunConfig c;
  EXPECT_THROW(apply_json(c, "{"), ConfigError);
  EXPECT_THROW(apply_json(c, "[1]"), ConfigError);
  EXPECT_THROW(apply_json(c, R"({"nope": {"x": 1}})"), ConfigError);
  EXPECT_THROW(apply_json(c, R"({"train": {"epoch": 1}})"), ConfigError);
  EXPECT_THROW(apply_json(c, R"({"train": 3})"), ConfigError);
  EXPECT_THROW(apply_json(c, R"({"train": {"epochs": -1}})"), ConfigError);
  EXPECT_THROW(apply_json(c, R"({"train": {"epochs": 1.5}})"), ConfigError);
  EXPECT_THROW(apply_json(c, R"({"optim": {"learning_rate": "fast"}})"), ConfigError);
  EXPECT_THROW(apply_json(c, R"({"model": {"ablation": "none"}})"), ConfigError);
}

TEST(Config, OverridesParseScalarsAndLists) {
  RunConfig c;
  apply_override(c, "train.epochs=7");
  apply_override(c, " optim.learning_rate = 1e-3");
  apply_override(c, "model.separator=||");
  apply_override(c, "ablation.seeds=1,2, 5");
  apply_override(c, "ablation.variants=full,no_attention");
  EXPECT_EQ(c.train.epochs, 7u);
  EXPECT_EQ(c.train.optim.learning_rate, 1e-3);
  EXPECT_EQ(c.model.separator, "||");
  EXPECT_EQ(c.ablation.seeds, (std::vector<std::uint64_t>{1, 2, 5}));
  EXPECT_EQ(c.ablation.variants, (std::vector<Ablation>{Ablation::Full, Ablation::NoAttention}));
  apply_override(c, "ablation.seeds=[9]");
  EXPECT_EQ(c.ablation.seeds, (std::vector<std::uint64_t>{9}));
  EXPECT_THROW(apply_override(c, "train.epochs"), ConfigError);
  EXPECT_THROW(apply_override(c, "=3"), ConfigError);
  EXPECT_THROW(apply_override(c, "train.epochs=many"), ConfigError);
  EXPECT_THROW(apply_override(c, "train.nothing=1"), ConfigError);
}

TEST(Config, JsonRoundTripAndFile) {
  RunConfig c;
  apply_override(c, "synthetic.analogy_rate=0.25");
  apply_override(c, "train.seed=12");
  apply_override(c, "ablation.variants=no_context");
  const std::string text = to_json(c);
  RunConfig back;
  apply_json(back, text);
  EXPECT_EQ(to_json(back), text);
  EXPECT_EQ(back.synthetic.analogy_rate, 0.25);

  testing::TempDir dir("config");
  write_run_config(c, dir / "run.json");
  EXPECT_EQ(to_json(load_run_config(dir / "run.json")), text);
  write_text_file(dir / "bad.json", R"({"train": {"bogus": 1}})");
  try {
    load_run_config(dir / "bad.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos);
  }
}

TEST(Config, EveryKeyAppearsInJson) {
  const auto j = nlohmann::json::parse(to_json(RunConfig{}));
  for (const auto& k : config_keys()) {
    const auto dot = k.find('.');
    EXPECT_TRUE(j.at(k.substr(0, dot)).contains(k.substr(dot + 1))) << k;
  }
}

}  // namespace
}  // namespace aomd
