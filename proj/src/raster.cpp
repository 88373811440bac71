#include "cxr/raster.hpp"

#include <algorithm>
#include <cmath>

#include "cxr/error.hpp"

namespace cxr {

void rasterize_into(const Polygon& poly, BinaryMask& mask) {
  if (poly.size() < 3) throw Error(ErrorKind::DegeneratePolygon, "polygon has fewer than 3 vertices");
  const std::size_t n = poly.size();
  const auto bb = bounding_box(poly);
  const long y_first = std::max(0L, static_cast<long>(std::ceil(bb.y - 0.5)));
  const long y_last = std::min(static_cast<long>(mask.height), static_cast<long>(std::ceil(bb.y + bb.h - 0.5)));

  std::vector<double> xs;
  for (long row = y_first; row < y_last; ++row) {
    const double yc = static_cast<double>(row) + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = poly[i];
      const Point& b = poly[(i + 1) % n];
      // Half-open in y so a center on a vertex is counted once.
      if ((a.y <= yc && yc < b.y) || (b.y <= yc && yc < a.y)) {
        xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const long c0 = std::max(0L, static_cast<long>(std::ceil(xs[k] - 0.5)));
      const long c1 = std::min(static_cast<long>(mask.width), static_cast<long>(std::ceil(xs[k + 1] - 0.5)));
      for (long c = c0; c < c1; ++c) mask.bits[static_cast<std::size_t>(row) * mask.width + static_cast<std::size_t>(c)] = 1;
    }
  }
}

BinaryMask rasterize_polygon(const Polygon& poly, std::size_t width, std::size_t height) {
  BinaryMask m(width, height);
  rasterize_into(poly, m);
  return m;
}

BinaryMask rasterize_union(const std::vector<Polygon>& polys, std::size_t width, std::size_t height) {
  BinaryMask m(width, height);
  for (const auto& p : polys) rasterize_into(p, m);
  return m;
}

}  // namespace cxr
