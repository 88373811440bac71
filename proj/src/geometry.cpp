#include "cxr/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace cxr {
namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(const Point& p, const Point& a, const Point& b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(const Point& a, const Point& b, const Point& c, const Point& d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

// Marks kept vertices of pts[first..last] (inclusive); endpoints are kept by the caller.
void douglas_peucker(const std::vector<Point>& pts, std::size_t first, std::size_t last, double eps,
                     std::vector<char>& keep) {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    stack.pop_back();
    if (j <= i + 1) continue;
    double best = -1.0;
    std::size_t idx = i;
    for (std::size_t k = i + 1; k < j; ++k) {
      const double dist = segment_distance(pts[k], pts[i], pts[j]);
      if (dist > best) {
        best = dist;
        idx = k;
      }
    }
    if (best > eps) {
      keep[idx] = 1;
      stack.emplace_back(i, idx);
      stack.emplace_back(idx, j);
    }
  }
}

}  // namespace

double signed_area(const Polygon& poly) {
  double s = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

double polygon_area(const Polygon& poly) { return std::abs(signed_area(poly)); }

double perimeter(const Polygon& poly) {
  double s = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    s += std::hypot(b.x - a.x, b.y - a.y);
  }
  return s;
}

BoxF bounding_box(const Polygon& poly) {
  if (poly.empty()) return {};
  double x0 = poly[0].x, x1 = poly[0].x, y0 = poly[0].y, y1 = poly[0].y;
  for (const auto& p : poly) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return {x0, y0, x1 - x0, y1 - y0};
}

bool is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    if (a == b) return false;
    // Consecutive edges must not fold back onto each other.
    const Point& c = poly[(i + 2) % n];
    if (cross(a, b, c) == 0.0 && (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y) < 0.0) return false;
  }
  if (n == 3) return polygon_area(poly) > 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // closing edge shares vertex 0
      if (segments_touch(a, b, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

Polygon simplify_closed(const Polygon& ring, double eps) {
  const std::size_t n = ring.size();
  if (eps <= 0.0 || n <= 3) return ring;
  std::size_t far = 0;
  double best = -1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double d = std::hypot(ring[k].x - ring[0].x, ring[k].y - ring[0].y);
    if (d > best) {
      best = d;
      far = k;
    }
  }
  std::vector<Point> pts(ring.begin(), ring.end());
  pts.push_back(ring[0]);
  std::vector<char> keep(pts.size(), 0);
  keep[0] = keep[far] = keep[n] = 1;
  douglas_peucker(pts, 0, far, eps, keep);
  douglas_peucker(pts, far, n, eps, keep);
  Polygon out;
  for (std::size_t k = 0; k < n; ++k) {
    if (keep[k]) out.push_back(pts[k]);
  }
  return out;
}

Polygon clip_to_rect(const Polygon& poly, double w, double h) {
  auto clip = [](const Polygon& in, auto inside, auto intersect) {
    Polygon out;
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& cur = in[i];
      const Point& prev = in[(i + n - 1) % n];
      const bool ci = inside(cur);
      const bool pi = inside(prev);
      if (ci) {
        if (!pi) out.push_back(intersect(prev, cur));
        out.push_back(cur);
      } else if (pi) {
        out.push_back(intersect(prev, cur));
      }
    }
    return out;
  };
  auto at_x = [](double x) {
    return [x](const Point& a, const Point& b) { return Point{x, a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)}; };
  };
  auto at_y = [](double y) {
    return [y](const Point& a, const Point& b) { return Point{a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y), y}; };
  };
  Polygon p = poly;
  p = clip(p, [](const Point& q) { return q.x >= 0.0; }, at_x(0.0));
  p = clip(p, [w](const Point& q) { return q.x <= w; }, at_x(w));
  p = clip(p, [](const Point& q) { return q.y >= 0.0; }, at_y(0.0));
  p = clip(p, [h](const Point& q) { return q.y <= h; }, at_y(h));
  return p;
}

}  // namespace cxr
