#include "aomd/feature_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "aomd/error.hpp"

namespace aomd {

namespace {

constexpr std::array<char, 4> kMagic = {'A', 'O', 'M', 'F'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f32(std::vector<unsigned char>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

class Reader {
 public:
  Reader(const std::vector<unsigned char>& buf, const std::filesystem::path& path)
      : buf_(buf), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw LoadError("feature file " + path_.string() + " is truncated");
  }
  const std::vector<unsigned char>& buf_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_feature_file(const std::filesystem::path& path, const FeatureFile& file) {
  std::vector<unsigned char> buf(kMagic.begin(), kMagic.end());
  put_u32(buf, kFeatureFileVersion);
  put_u32(buf, static_cast<std::uint32_t>(file.global_feature.size()));
  put_u32(buf, static_cast<std::uint32_t>(file.objects.size()));
  put_u32(buf, static_cast<std::uint32_t>(file.object_dim));
  for (double v : file.global_feature) put_f32(buf, v);
  for (const auto& obj : file.objects) {
    if (obj.feature.size() != file.object_dim) {
      throw LoadError("object feature width " + std::to_string(obj.feature.size()) +
                      " does not match declared " + std::to_string(file.object_dim));
    }
    for (double v : obj.feature) put_f32(buf, v);
    for (double v : obj.box.vertices()) put_f32(buf, v);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write feature file " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw LoadError("failed writing feature file " + path.string());
}

FeatureFile read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("missing feature file " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < kMagic.size() || std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) {
    throw LoadError("feature file " + path.string() + " has a bad magic number");
  }
  std::vector<unsigned char> body(buf.begin() + kMagic.size(), buf.end());
  Reader r(body, path);
  const std::uint32_t version = r.u32();
  if (version != kFeatureFileVersion) {
    throw LoadError("feature file " + path.string() + " has unsupported version " +
                    std::to_string(version));
  }
  const std::uint32_t global_dim = r.u32();
  const std::uint32_t count = r.u32();
  const std::uint32_t dim = r.u32();
  const std::size_t expected =
      4ull * (global_dim + static_cast<std::size_t>(count) * (dim + BoundingBox::kScalars));
  if (r.remaining() != expected) {
    throw LoadError("feature file " + path.string() + " payload is " +
                    std::to_string(r.remaining()) + " bytes, header implies " +
                    std::to_string(expected));
  }
  FeatureFile file;
  file.object_dim = dim;
  file.global_feature.resize(global_dim);
  for (auto& v : file.global_feature) v = r.f32();
  file.objects.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    VisualObject obj;
    obj.feature.resize(dim);
    for (auto& v : obj.feature) v = r.f32();
    std::array<double, BoundingBox::kScalars> vertices{};
    for (auto& v : vertices) v = r.f32();
    try {
      obj.box = BoundingBox(vertices);
    } catch (const Error& e) {
      throw LoadError("feature file " + path.string() + " object " + std::to_string(k) + ": " +
                      e.what());
    }
    file.objects.push_back(std::move(obj));
  }
  return file;
}

}  // namespace aomd
