#include "cxr/labeling.hpp"

#include <algorithm>
#include <array>

#include "cxr/error.hpp"

namespace cxr {

ComponentMap connected_components(const BinaryMask& mask, Connectivity conn) {
  ComponentMap cm;
  cm.width = mask.width;
  cm.height = mask.height;
  cm.labels.assign(mask.width * mask.height, 0);

  static constexpr std::array<std::array<int, 2>, 8> kOffsets{
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1}}};
  const int neighbours = conn == Connectivity::Four ? 4 : 8;
  const auto w = static_cast<long>(mask.width);
  const auto h = static_cast<long>(mask.height);

  std::vector<std::size_t> stack;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const auto seed = static_cast<std::size_t>(y * w + x);
      if (!mask.bits[seed] || cm.labels[seed] != 0) continue;
      const std::int32_t id = ++cm.count;
      cm.labels[seed] = id;
      stack.push_back(seed);
      while (!stack.empty()) {
        const std::size_t p = stack.back();
        stack.pop_back();
        const long px = static_cast<long>(p) % w;
        const long py = static_cast<long>(p) / w;
        for (int k = 0; k < neighbours; ++k) {
          const long nx = px + kOffsets[k][0];
          const long ny = py + kOffsets[k][1];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const auto q = static_cast<std::size_t>(ny * w + nx);
          if (mask.bits[q] && cm.labels[q] == 0) {
            cm.labels[q] = id;
            stack.push_back(q);
          }
        }
      }
    }
  }
  return cm;
}

std::vector<ComponentStats> component_stats(const ComponentMap& cm) {
  struct Extent {
    std::size_t x0, y0, x1, y1, n;
  };
  std::vector<Extent> ext(static_cast<std::size_t>(cm.count), Extent{cm.width, cm.height, 0, 0, 0});
  for (std::size_t y = 0; y < cm.height; ++y) {
    for (std::size_t x = 0; x < cm.width; ++x) {
      const auto id = cm.label(x, y);
      if (id == 0) continue;
      auto& e = ext[static_cast<std::size_t>(id - 1)];
      e.x0 = std::min(e.x0, x);
      e.y0 = std::min(e.y0, y);
      e.x1 = std::max(e.x1, x);
      e.y1 = std::max(e.y1, y);
      ++e.n;
    }
  }
  std::vector<ComponentStats> out;
  out.reserve(ext.size());
  for (std::size_t i = 0; i < ext.size(); ++i) {
    const auto& e = ext[i];
    out.push_back({static_cast<std::int32_t>(i + 1), e.n, {e.x0, e.y0, e.x1 - e.x0 + 1, e.y1 - e.y0 + 1}});
  }
  return out;
}

namespace {

struct Dir {
  int x;
  int y;
  friend bool operator==(const Dir&, const Dir&) = default;
};

// Screen coordinates, y down: turning right from +x points down.
Dir right_of(Dir d) { return {-d.y, d.x}; }
Dir left_of(Dir d) { return {d.y, -d.x}; }

}  // namespace

Polygon trace_boundary(const ComponentMap& cm, std::int32_t id, Connectivity conn) {
  const auto w = static_cast<long>(cm.width);
  const auto h = static_cast<long>(cm.height);
  auto fg = [&](long x, long y) {
    return x >= 0 && y >= 0 && x < w && y < h && cm.labels[static_cast<std::size_t>(y * w + x)] == id;
  };

  long sx = -1;
  long sy = -1;
  for (long y = 0; y < h && sx < 0; ++y) {
    for (long x = 0; x < w; ++x) {
      if (fg(x, y)) {
        sx = x;
        sy = y;
        break;
      }
    }
  }
  if (sx < 0) throw Error(ErrorKind::InvariantViolation, "component " + std::to_string(id) + " has no pixels");

  // Walk pixel edges with the component on the right-hand side.
  const Dir start_dir{1, 0};
  long px = sx;
  long py = sy;
  Dir d = start_dir;
  Polygon ring;
  while (true) {
    px += d.x;
    py += d.y;
    const Dir r = right_of(d);
    const Dir l = left_of(d);
    // Pixel whose center is corner + (d + side) / 2.
    const bool ahead_right = fg(px + (d.x + r.x - 1) / 2, py + (d.y + r.y - 1) / 2);
    const bool ahead_left = fg(px + (d.x + l.x - 1) / 2, py + (d.y + l.y - 1) / 2);

    Dir next = d;
    bool pinch = false;
    if (conn == Connectivity::Eight) {
      if (ahead_left) {
        next = l;
        pinch = !ahead_right;
      } else if (!ahead_right) {
        next = r;
      }
    } else {
      if (ahead_right) {
        if (ahead_left) next = l;
      } else {
        next = r;
        pinch = ahead_left;
      }
    }

    if (!(next == d)) {
      Point v{static_cast<double>(px), static_cast<double>(py)};
      if (pinch) {
        // Nudge toward the pixel behind the turn on the outside of the bend.
        const Dir side = next == l ? l : r;
        v.x += kPinchOffset * (side.x - d.x);
        v.y += kPinchOffset * (side.y - d.y);
      }
      ring.push_back(v);
    }
    d = next;
    if (px == sx && py == sy && d == start_dir) break;
  }
  // The start corner is recorded last; rotate it to the front.
  std::rotate(ring.rbegin(), ring.rbegin() + 1, ring.rend());
  return ring;
}

Polygon extract_polygon(const ComponentMap& cm, std::int32_t id, Connectivity conn, double simplify_eps) {
  const Polygon traced = trace_boundary(cm, id, conn);
  for (double eps = simplify_eps; eps >= 1.0 / 8.0; eps *= 0.5) {
    Polygon p = simplify_closed(traced, eps);
    if (p.size() >= 3 && is_simple(p)) return p;
  }
  return traced;
}

Polygon extract_polygon(const BinaryMask& component, Connectivity conn, double simplify_eps) {
  const ComponentMap cm = connected_components(component, conn);
  if (cm.count == 0) throw Error(ErrorKind::InvariantViolation, "component mask is empty");
  return extract_polygon(cm, 1, conn, simplify_eps);
}

std::vector<ComponentStats> select_instances(const ComponentMap& cm, std::size_t min_area, std::size_t max_instances) {
  std::vector<ComponentStats> stats = component_stats(cm);
  std::erase_if(stats, [min_area](const ComponentStats& s) { return s.pixel_count < min_area; });
  std::stable_sort(stats.begin(), stats.end(), [](const ComponentStats& a, const ComponentStats& b) {
    if (a.pixel_count != b.pixel_count) return a.pixel_count > b.pixel_count;
    return a.id < b.id;
  });
  if (stats.size() > max_instances) stats.resize(max_instances);
  return stats;
}

std::vector<LesionInstance> build_annotations(const BinaryMask& mask, const LabelingConfig& config) {
  const ComponentMap cm = connected_components(mask, config.connectivity);
  std::vector<LesionInstance> out;
  for (const auto& s : select_instances(cm, config.min_area, config.max_instances)) {
    out.push_back({s.id, s.pixel_count, s.bbox, extract_polygon(cm, s.id, config.connectivity, config.simplify_eps)});
  }
  return out;
}

}  // namespace cxr
