#include "aomd/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "aomd/error.hpp"

namespace aomd::nn {

namespace {

constexpr char kMagic[4] = {'A', 'O', 'M', 'C'};

class Writer {
 public:
  void u32(std::uint32_t v) { uint(v, 4); }
  void u64(std::uint64_t v) { uint(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
  }
  std::vector<unsigned char> out;

 private:
  void uint(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
};

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& in) : in_(in) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::uint64_t uint(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw LoadError("checkpoint is truncated");
  }
  const std::vector<unsigned char>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> serialize_checkpoint(const ParameterStore& store,
                                                const std::string& metadata) {
  Writer w;
  w.out.assign(std::begin(kMagic), std::end(kMagic));
  w.u32(kCheckpointVersion);
  w.u64(store.seed());
  w.u64(store.step());
  w.bytes(metadata);
  w.u32(static_cast<std::uint32_t>(store.size()));
  for (const auto& [name, p] : store) {
    w.bytes(name);
    w.u32(static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t e : p.value.shape()) w.u64(e);
    for (const Tensor* t : {&p.value, &p.adam_m, &p.adam_v}) {
      for (double v : t->values()) w.f64(v);
    }
  }
  return std::move(w.out);
}

Checkpoint deserialize_checkpoint(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw LoadError("checkpoint has a bad magic number");
  }
  std::vector<unsigned char> body(bytes.begin() + 4, bytes.end());
  Reader r(body);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw LoadError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.store.set_seed(r.u64());
  ck.store.set_step(r.u64());
  ck.metadata = r.bytes();
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.bytes();
    if (ck.store.contains(name)) throw LoadError("checkpoint repeats parameter '" + name + "'");
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw LoadError("checkpoint parameter '" + name + "' has rank " + std::to_string(rank));
    std::vector<std::size_t> shape(rank);
    std::size_t n = 1;
    for (auto& e : shape) {
      e = static_cast<std::size_t>(r.u64());
      // Each entry takes 24 bytes, so a larger extent cannot fit.
      if (e > r.remaining()) throw LoadError("checkpoint is truncated");
      n *= e;
      if (n > r.remaining()) throw LoadError("checkpoint is truncated");
    }
    if (n * 3 * 8 > r.remaining()) throw LoadError("checkpoint is truncated");
    Tensor value(shape), m(shape), v(shape);
    for (Tensor* t : {&value, &m, &v}) {
      for (double& x : t->values()) x = r.f64();
    }
    Parameter& p = ck.store.add(name, std::move(value));
    p.adam_m = std::move(m);
    p.adam_v = std::move(v);
  }
  if (!r.done()) throw LoadError("checkpoint has trailing bytes");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const ParameterStore& store,
                     const std::string& metadata) {
  const auto bytes = serialize_checkpoint(store, metadata);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LoadError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return deserialize_checkpoint(bytes);
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

}  // namespace aomd::nn
