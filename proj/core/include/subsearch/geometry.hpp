#pragma once

#include <span>
#include <string>

namespace subsearch {

/// Axis-aligned rectangle in normalized frame coordinates.
///
/// The frame is the unit square with the origin at the top-left corner.
/// A valid rect has positive extent and lies fully inside the frame.
struct Rect {
  double left = 0.0;
  double top = 0.0;
  double width = 1.0;
  double height = 1.0;

  static constexpr Rect full_frame() { return {0.0, 0.0, 1.0, 1.0}; }

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double area() const { return width * height; }
  double center_x() const { return left + 0.5 * width; }
  double center_y() const { return top + 0.5 * height; }

  bool is_valid() const;

  friend bool operator==(const Rect&, const Rect&) = default;
};

// Slack allowed on the frame bounds when validating rects coming from
// arithmetic (e.g. 1/3 + 1/3 + 1/3 grid edges).
inline constexpr double kFrameTolerance = 1e-9;

/// Throws InvalidArgument naming `what` if `r` is not a valid rect.
void validate_rect(const Rect& r, const std::string& what = "rect");

/// Builds a normalized rect from pixel coordinates of a frame.
Rect rect_from_pixels(double left_px, double top_px, double width_px,
                      double height_px, int frame_width_px,
                      int frame_height_px);

std::string to_string(const Rect& r);

double intersection_area(const Rect& a, const Rect& b);

/// True iff the two rects share a region of positive area. Edge-touching
/// rects do not intersect.
bool intersects(const Rect& a, const Rect& b);

double iou(const Rect& a, const Rect& b);

// Geometric distances between two rects. All are symmetric, nonnegative and
// zero on identical inputs.
double area_distance(const Rect& a, const Rect& b);
double shape_distance(const Rect& a, const Rect& b);
double centroid_distance(const Rect& a, const Rect& b);
double iou_distance(const Rect& a, const Rect& b);

/// Exact area of the union of `rects` (coordinate-compression sweep).
double union_area(std::span<const Rect> rects);

/// Largest fraction of `target` covered by any single rect of `regions`.
double max_coverage(const Rect& target, std::span<const Rect> regions);

}  // namespace subsearch
