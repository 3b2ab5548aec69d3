#include "tsr/geometry.hpp"

#include <algorithm>

namespace tsr {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Point& p, const Point& q, const Point& r) {
  return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
         std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1,
                        const Point& q2) {
  double d1 = cross(q1, q2, p1);
  double d2 = cross(q1, q2, p2);
  double d3 = cross(p1, p2, q1);
  double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(q1, p1, q2)) return true;
  if (d2 == 0 && on_segment(q1, p2, q2)) return true;
  if (d3 == 0 && on_segment(p1, q1, p2)) return true;
  if (d4 == 0 && on_segment(p1, q2, p2)) return true;
  return false;
}

}  // namespace

bool SpatialQuad::is_simple() const {
  if (!is_finite()) return false;
  // Opposite edge pairs (0-1 vs 2-3) and (1-2 vs 3-0) must not cross.
  const auto& c = corners;
  if (segments_intersect(c[0], c[1], c[2], c[3])) return false;
  if (segments_intersect(c[1], c[2], c[3], c[0])) return false;
  return true;
}

Rect bounding_box(const SpatialQuad& q) {
  Rect r{q.corners[0].x, q.corners[0].y, q.corners[0].x, q.corners[0].y};
  for (const Point& p : q.corners) {
    r.x0 = std::min(r.x0, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.x1 = std::max(r.x1, p.x);
    r.y1 = std::max(r.y1, p.y);
  }
  return r;
}

double iou(const Rect& a, const Rect& b) {
  double ix0 = std::max(a.x0, b.x0);
  double iy0 = std::max(a.y0, b.y0);
  double ix1 = std::min(a.x1, b.x1);
  double iy1 = std::min(a.y1, b.y1);
  double iw = ix1 - ix0;
  double ih = iy1 - iy0;
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  double inter = iw * ih;
  double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

}  // namespace tsr
