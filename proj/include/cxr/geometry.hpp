#pragma once

#include <cstddef>
#include <vector>

namespace cxr {

/// Continuous image coordinates: pixel (i, j) covers [i, i+1) x [j, j+1).
struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Closed ring; the closing edge from back() to front() is implicit.
using Polygon = std::vector<Point>;

struct BoxF {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

/// Shoelace area, positive for clockwise rings in y-down image coordinates.
double signed_area(const Polygon& poly);
double polygon_area(const Polygon& poly);
double perimeter(const Polygon& poly);
BoxF bounding_box(const Polygon& poly);

/// True when the ring has >= 3 distinct vertices and no two edges touch
/// except consecutive edges at their shared vertex.
bool is_simple(const Polygon& poly);

/// Douglas-Peucker on a closed ring, anchored at vertex 0 and the vertex
/// farthest from it. Returns the input unchanged when eps <= 0.
Polygon simplify_closed(const Polygon& ring, double eps);

/// Sutherland-Hodgman clip against [0, w] x [0, h].
Polygon clip_to_rect(const Polygon& poly, double w, double h);

}  // namespace cxr
