#pragma once

#include <array>
#include <cmath>

namespace tsr {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned rectangle, (x0,y0) top-left inclusive, (x1,y1) bottom-right.
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const {
    double w = width(), h = height();
    return (w <= 0.0 || h <= 0.0) ? 0.0 : w * h;
  }
};

/// Cell quadrilateral. Corner order: top-left, top-right, bottom-right,
/// bottom-left.
struct SpatialQuad {
  std::array<Point, 4> corners{};

  static SpatialQuad from_rect(const Rect& r) {
    SpatialQuad q;
    q.corners = {Point{r.x0, r.y0}, Point{r.x1, r.y0}, Point{r.x1, r.y1},
                 Point{r.x0, r.y1}};
    return q;
  }

  Point center() const {
    Point c;
    for (const Point& p : corners) {
      c.x += p.x;
      c.y += p.y;
    }
    c.x *= 0.25;
    c.y *= 0.25;
    return c;
  }

  bool is_finite() const {
    for (const Point& p : corners) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    }
    return true;
  }

  /// True when no two non-adjacent edges intersect.
  bool is_simple() const;
};

Rect bounding_box(const SpatialQuad& q);

/// Intersection-over-union of two axis-aligned rectangles. Zero-area inputs
/// give 0.
double iou(const Rect& a, const Rect& b);

}  // namespace tsr
