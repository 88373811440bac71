#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cxr/geometry.hpp"
#include "cxr/image.hpp"

namespace cxr {

enum class Connectivity { Four = 4, Eight = 8 };

/// Per-pixel component ids: 0 is background, 1..count in raster order of
/// each component's first pixel.
struct ComponentMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::int32_t> labels;
  std::int32_t count = 0;

  std::int32_t label(std::size_t x, std::size_t y) const { return labels[y * width + x]; }
};

struct PixelBox {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t w = 0;
  std::size_t h = 0;
  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

struct ComponentStats {
  std::int32_t id = 0;
  std::size_t pixel_count = 0;
  PixelBox bbox;
};

struct LesionInstance {
  std::int32_t component_id = 0;
  std::size_t pixel_count = 0;
  PixelBox bbox;
  Polygon polygon;
};

struct LabelingConfig {
  Connectivity connectivity = Connectivity::Eight;
  std::size_t min_area = 16;
  std::size_t max_instances = 15;
  double simplify_eps = 1.0;
};

/// Iterative floodfill labeling.
ComponentMap connected_components(const BinaryMask& mask, Connectivity conn = Connectivity::Eight);

/// Area and tight bounding box of every component, indexed by id - 1.
std::vector<ComponentStats> component_stats(const ComponentMap& cm);

/// Outer boundary of component `id` as a lattice polygon (pixel-corner
/// vertices, collinear runs merged), clockwise on screen, starting at the
/// top-left corner of the component's first raster pixel. Where the
/// boundary touches itself at a corner the two visits are nudged apart by
/// kPinchOffset so the ring stays simple.
Polygon trace_boundary(const ComponentMap& cm, std::int32_t id, Connectivity conn = Connectivity::Eight);

inline constexpr double kPinchOffset = 1.0 / 16.0;

/// Traced boundary simplified with Douglas-Peucker. If simplification
/// produces a non-simple ring the tolerance is halved until it does not.
Polygon extract_polygon(const ComponentMap& cm, std::int32_t id, Connectivity conn = Connectivity::Eight,
                        double simplify_eps = 1.0);

/// Same, for a mask holding a single component.
Polygon extract_polygon(const BinaryMask& component, Connectivity conn = Connectivity::Eight, double simplify_eps = 1.0);

/// Drops components below min_area, keeps the max_instances largest;
/// ordered by descending area, then ascending id.
std::vector<ComponentStats> select_instances(const ComponentMap& cm, std::size_t min_area = 16,
                                             std::size_t max_instances = 15);

std::vector<LesionInstance> build_annotations(const BinaryMask& mask, const LabelingConfig& config = {});

}  // namespace cxr
