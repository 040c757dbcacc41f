#include "aomd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aomd/error.hpp"

namespace aomd {

Envelope Envelope::inflated(double pad) const {
  return {min_x - pad, min_y - pad, max_x + pad, max_y + pad};
}

bool Envelope::intersects(const Envelope& other) const {
  return min_x <= other.max_x && other.min_x <= max_x && min_y <= other.max_y &&
         other.min_y <= max_y;
}

Envelope Envelope::united(const Envelope& other) const {
  return {std::min(min_x, other.min_x), std::min(min_y, other.min_y),
          std::max(max_x, other.max_x), std::max(max_y, other.max_y)};
}

BoundingBox::BoundingBox(const std::array<double, kScalars>& vertices) : vertices_(vertices) {
  for (std::size_t i = 0; i < kScalars; ++i) {
    if (!std::isfinite(vertices_[i])) {
      throw GeometryError("bounding box coordinate " + std::to_string(i) + " is not finite");
    }
    if (vertices_[i] < 0.0) {
      throw GeometryError("bounding box coordinate " + std::to_string(i) + " is negative (" +
                          std::to_string(vertices_[i]) + ")");
    }
  }
}

BoundingBox BoundingBox::from_envelope(const Envelope& env) {
  return BoundingBox({env.min_x, env.min_y, env.max_x, env.min_y, env.max_x, env.max_y,
                      env.min_x, env.max_y});
}

Envelope BoundingBox::envelope() const {
  Envelope env{x(0), y(0), x(0), y(0)};
  for (std::size_t i = 1; i < 4; ++i) {
    env.min_x = std::min(env.min_x, x(i));
    env.max_x = std::max(env.max_x, x(i));
    env.min_y = std::min(env.min_y, y(i));
    env.max_y = std::max(env.max_y, y(i));
  }
  return env;
}

std::array<double, BoundingBox::kScalars> BoundingBox::normalized(double image_w,
                                                                  double image_h) const {
  if (!(image_w > 0.0) || !(image_h > 0.0) || !std::isfinite(image_w) || !std::isfinite(image_h)) {
    throw GeometryError("image dimensions must be positive, got " + std::to_string(image_w) +
                        "x" + std::to_string(image_h));
  }
  std::array<double, kScalars> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    out[2 * i] = std::clamp(x(i) / image_w, 0.0, 1.0);
    out[2 * i + 1] = std::clamp(y(i) / image_h, 0.0, 1.0);
  }
  return out;
}

BoundingBox BoundingBox::denormalized(const std::array<double, kScalars>& unit, double image_w,
                                      double image_h) {
  std::array<double, kScalars> v{};
  for (std::size_t i = 0; i < 4; ++i) {
    v[2 * i] = unit[2 * i] * image_w;
    v[2 * i + 1] = unit[2 * i + 1] * image_h;
  }
  return BoundingBox(v);
}

Envelope envelope(const BoundingBox& box) { return box.envelope(); }

std::array<double, BoundingBox::kScalars> normalize_box(const BoundingBox& box, double image_w,
                                                        double image_h) {
  return box.normalized(image_w, image_h);
}

}  // namespace aomd
