#pragma once

#include <array>
#include <cstddef>

namespace aomd {

// Axis-aligned bounds of a box: (min_x, min_y, max_x, max_y).
struct Envelope {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (min_x + max_x); }
  double center_y() const { return 0.5 * (min_y + max_y); }

  // Grown by pad on every side.
  Envelope inflated(double pad) const;
  // Closed-interval intersection test.
  bool intersects(const Envelope& other) const;
  // Smallest envelope containing both.
  Envelope united(const Envelope& other) const;

  bool operator==(const Envelope&) const = default;
};

// Quadrilateral given by four vertices (x1,y1,...,x4,y4), clockwise from the
// top-left corner, in pixel units. Rotated OCR boxes are representable; the
// axis-aligned envelope is always derived from the vertices.
class BoundingBox {
 public:
  static constexpr std::size_t kScalars = 8;

  BoundingBox() = default;
  // Throws GeometryError on a non-finite or negative coordinate.
  explicit BoundingBox(const std::array<double, kScalars>& vertices);

  // Axis-aligned rectangle with vertices in clockwise order from top-left.
  static BoundingBox from_envelope(const Envelope& env);
  static BoundingBox from_rect(double min_x, double min_y, double max_x, double max_y) {
    return from_envelope({min_x, min_y, max_x, max_y});
  }

  const std::array<double, kScalars>& vertices() const { return vertices_; }
  double x(std::size_t i) const { return vertices_[2 * i]; }
  double y(std::size_t i) const { return vertices_[2 * i + 1]; }

  Envelope envelope() const;

  // Each x divided by image_w and each y by image_h, clamped to [0, 1].
  // Throws GeometryError when either dimension is not positive.
  std::array<double, kScalars> normalized(double image_w, double image_h) const;

  // Inverse of normalized() for coordinates that were inside the image.
  static BoundingBox denormalized(const std::array<double, kScalars>& unit, double image_w,
                                  double image_h);

  bool operator==(const BoundingBox&) const = default;

 private:
  std::array<double, kScalars> vertices_{};
};

Envelope envelope(const BoundingBox& box);
std::array<double, BoundingBox::kScalars> normalize_box(const BoundingBox& box, double image_w,
                                                        double image_h);

}  // namespace aomd
