#pragma once

#include <cstddef>
#include <vector>

#include "cxr/geometry.hpp"
#include "cxr/image.hpp"

namespace cxr {

/// Even-odd scan conversion: pixel (i, j) is set iff its center
/// (i + 0.5, j + 0.5) is inside. Centers exactly on an edge follow the
/// top-left rule (left and top edges inclusive, right and bottom exclusive).
/// Throws DegeneratePolygon for fewer than 3 vertices.
BinaryMask rasterize_polygon(const Polygon& poly, std::size_t width, std::size_t height);

/// ORs the polygon into an existing mask.
void rasterize_into(const Polygon& poly, BinaryMask& mask);

/// Union of all polygons.
BinaryMask rasterize_union(const std::vector<Polygon>& polys, std::size_t width, std::size_t height);

}  // namespace cxr
