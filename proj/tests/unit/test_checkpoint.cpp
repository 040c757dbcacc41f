#include <gtest/gtest.h>

#include "aomd/error.hpp"
#include "aomd/nn/checkpoint.hpp"
#include "support.hpp"

namespace aomd::nn {
namespace {

using testing::TempDir;
using testing::random_store;

TEST(Checkpoint, RoundTripIsExact) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const ParameterStore store = random_store(rng);
    const auto bytes = serialize_checkpoint(store, "{\"k\":1}");
    const Checkpoint back = deserialize_checkpoint(bytes);
    EXPECT_EQ(back.store, store);
    EXPECT_EQ(back.metadata, "{\"k\":1}");
    EXPECT_EQ(serialize_checkpoint(back.store, back.metadata), bytes);
  }
}

TEST(Checkpoint, GradientsAreNotStored) {
  Rng rng(2);
  ParameterStore store = random_store(rng);
  for (auto& [name, p] : store) p.grad.fill(7.0);
  const Checkpoint back = deserialize_checkpoint(serialize_checkpoint(store, ""));
  for (const auto& [name, p] : back.store) {
    for (double g : p.grad.values()) EXPECT_EQ(g, 0.0);
  }
}

TEST(Checkpoint, FileRoundTrip) {
  TempDir dir("ckpt");
  Rng rng(3);
  const ParameterStore store = random_store(rng);
  save_checkpoint(dir / "m.aomc", store, "meta");
  const Checkpoint back = load_checkpoint(dir / "m.aomc");
  EXPECT_EQ(back.store, store);
  EXPECT_EQ(back.metadata, "meta");
  EXPECT_THROW(load_checkpoint(dir / "missing.aomc"), LoadError);
}

TEST(Checkpoint, HeaderLayout) {
  ParameterStore store;
  store.add("a", Tensor::vector({1.5}));
  store.set_seed(0x0102030405060708ULL);
  store.set_step(9);
  const auto b = serialize_checkpoint(store, "xy");
  ASSERT_GE(b.size(), 30u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "AOMC");
  EXPECT_EQ(b[4], kCheckpointVersion);
  EXPECT_EQ(b[8], 0x08);  // seed, little endian
  EXPECT_EQ(b[15], 0x01);
  EXPECT_EQ(b[16], 9);  // step
  EXPECT_EQ(b[24], 2);  // metadata length
  EXPECT_EQ(b[28], 'x');
  // count + name + rank + extent + 3 doubles
  EXPECT_EQ(b.size(), 30u + 4 + (4 + 1) + 4 + 8 + 3 * 8);
}

TEST(Checkpoint, CorruptBytesRejected) {
  Rng rng(4);
  const auto good = serialize_checkpoint(random_store(rng), "m");
  auto bad = good;
  bad[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(bad), LoadError);
  bad = good;
  bad[4] = 99;
  EXPECT_THROW(deserialize_checkpoint(bad), LoadError);
  bad = good;
  bad.pop_back();
  EXPECT_THROW(deserialize_checkpoint(bad), LoadError);
  bad = good;
  bad.push_back(0);
  EXPECT_THROW(deserialize_checkpoint(bad), LoadError);
  for (std::size_t cut = 0; cut < good.size(); cut += 7) {
    EXPECT_THROW(deserialize_checkpoint({good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut)}),
                 LoadError)
        << cut;
  }
}

TEST(Checkpoint, DuplicateNamesRejected) {
  ParameterStore store;
  store.add("a", Tensor::vector({1}));
  EXPECT_THROW(store.add("a", Tensor::vector({2})), ConfigError);
}

}  // namespace
}  // namespace aomd::nn
