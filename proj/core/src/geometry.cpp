#include "subsearch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "subsearch/error.hpp"

namespace subsearch {

namespace {

double overlap_1d(double a_lo, double a_hi, double b_lo, double b_hi) {
  return std::min(a_hi, b_hi) - std::max(a_lo, b_lo);
}

}  // namespace

bool Rect::is_valid() const {
  if (!std::isfinite(left) || !std::isfinite(top) || !std::isfinite(width) ||
      !std::isfinite(height)) {
    return false;
  }
  return width > 0.0 && height > 0.0 && left >= 0.0 && top >= 0.0 &&
         left + width <= 1.0 + kFrameTolerance &&
         top + height <= 1.0 + kFrameTolerance;
}

void validate_rect(const Rect& r, const std::string& what) {
  if (!r.is_valid()) {
    throw InvalidArgument("invalid " + what + " " + to_string(r));
  }
}

Rect rect_from_pixels(double left_px, double top_px, double width_px,
                      double height_px, int frame_width_px,
                      int frame_height_px) {
  if (frame_width_px <= 0 || frame_height_px <= 0) {
    throw InvalidArgument("frame dimensions must be positive");
  }
  const double fw = frame_width_px;
  const double fh = frame_height_px;
  Rect r{left_px / fw, top_px / fh, width_px / fw, height_px / fh};
  validate_rect(r, "pixel rect");
  return r;
}

std::string to_string(const Rect& r) {
  std::ostringstream os;
  os << "(" << r.left << ", " << r.top << ", " << r.width << ", " << r.height
     << ")";
  return os.str();
}

double intersection_area(const Rect& a, const Rect& b) {
  const double w = overlap_1d(a.left, a.right(), b.left, b.right());
  if (w <= 0.0) return 0.0;
  const double h = overlap_1d(a.top, a.bottom(), b.top, b.bottom());
  if (h <= 0.0) return 0.0;
  return w * h;
}

bool intersects(const Rect& a, const Rect& b) {
  return overlap_1d(a.left, a.right(), b.left, b.right()) > 0.0 &&
         overlap_1d(a.top, a.bottom(), b.top, b.bottom()) > 0.0;
}

double iou(const Rect& a, const Rect& b) {
  if (a == b) return 1.0;
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

double area_distance(const Rect& a, const Rect& b) {
  return std::abs(a.area() - b.area());
}

double shape_distance(const Rect& a, const Rect& b) {
  return std::abs(a.width - b.width) + std::abs(a.height - b.height);
}

double centroid_distance(const Rect& a, const Rect& b) {
  return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

double iou_distance(const Rect& a, const Rect& b) { return 1.0 - iou(a, b); }

double union_area(std::span<const Rect> rects) {
  if (rects.empty()) return 0.0;

  std::vector<double> xs;
  xs.reserve(rects.size() * 2);
  for (const Rect& r : rects) {
    xs.push_back(r.left);
    xs.push_back(r.right());
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double total = 0.0;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i];
    const double x1 = xs[i + 1];
    spans.clear();
    for (const Rect& r : rects) {
      if (r.left <= x0 && r.right() >= x1) {
        spans.emplace_back(r.top, r.bottom());
      }
    }
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());

    double covered = 0.0;
    double lo = spans.front().first;
    double hi = spans.front().second;
    for (std::size_t k = 1; k < spans.size(); ++k) {
      if (spans[k].first > hi) {
        covered += hi - lo;
        lo = spans[k].first;
        hi = spans[k].second;
      } else {
        hi = std::max(hi, spans[k].second);
      }
    }
    covered += hi - lo;
    total += covered * (x1 - x0);
  }
  return total;
}

double max_coverage(const Rect& target, std::span<const Rect> regions) {
  double best = 0.0;
  for (const Rect& r : regions) {
    best = std::max(best, intersection_area(target, r));
  }
  return std::min(1.0, best / target.area());
}

}  // namespace subsearch
