#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "thermofrac/error.hpp"
#include "thermofrac/mesh.hpp"

namespace thermofrac {

namespace {

bool axis_aligned(const std::vector<Vec2>& poly) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 d = poly[(i + 1) % poly.size()] - poly[i];
    if (d.x() != 0.0 && d.y() != 0.0) return false;
  }
  return true;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

double polygon_distance(const Vec2& p, const std::vector<Vec2>& poly) {
  double d = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < poly.size(); ++i) d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

// Grid coordinates along one axis of [0, length].
std::vector<double> axis_coordinates(double length, double h, std::vector<double> breaks,
                                     std::optional<std::pair<double, double>> band, double h_fine, double grading) {
  const double tol = 1e-12 * length;
  breaks.push_back(0.0);
  breaks.push_back(length);
  for (double& b : breaks) b = std::clamp(b, 0.0, length);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> uniq;
  for (double b : breaks)
    if (uniq.empty() || b - uniq.back() > tol) uniq.push_back(b);
  uniq.back() = length;

  auto spacing = [&](double x) {
    if (!band) return h;
    const double d = x < band->first ? band->first - x : (x > band->second ? x - band->second : 0.0);
    return std::min(h, h_fine + grading * d);
  };

  std::vector<double> coords{uniq.front()};
  constexpr int kSamples = 2048;
  for (std::size_t k = 0; k + 1 < uniq.size(); ++k) {
    const double a = uniq[k], b = uniq[k + 1];
    // cumulative integral of 1/h(x) on [a,b]
    std::vector<double> cum(kSamples + 1, 0.0);
    const double dx = (b - a) / kSamples;
    for (int s = 0; s < kSamples; ++s) {
      const double x0 = a + s * dx;
      cum[s + 1] = cum[s] + 0.5 * dx * (1.0 / spacing(x0) + 1.0 / spacing(x0 + dx));
    }
    const int n = std::max(1, static_cast<int>(std::ceil(cum.back() - 1e-9)));
    for (int i = 1; i < n; ++i) {
      const double target = cum.back() * i / n;
      const auto it = std::lower_bound(cum.begin(), cum.end(), target);
      const auto s = static_cast<int>(std::distance(cum.begin(), it));
      const double f = (target - cum[s - 1]) / (cum[s] - cum[s - 1]);
      coords.push_back(a + (s - 1 + f) * dx);
    }
    coords.push_back(b);
  }
  return coords;
}

}  // namespace

Mesh generate_rect(const RectSpec& spec) {
  if (!(spec.width > 0) || !(spec.height > 0)) throw InvalidArgument("generate_rect: width and height must be positive");
  if (!(spec.h > 0)) throw InvalidArgument("generate_rect: h must be positive");
  if (spec.h > std::min(spec.width, spec.height) * (1 + 1e-12))
    throw InvalidArgument("generate_rect: h is larger than the domain");
  const Box domain{0, 0, spec.width, spec.height};
  const double tol = 1e-12 * std::hypot(spec.width, spec.height);

  std::vector<double> xb, yb;
  std::optional<std::pair<double, double>> bx, by;
  double h_fine = spec.h;
  if (spec.refine) {
    const auto& r = *spec.refine;
    if (!(r.h_fine > 0) || r.h_fine > spec.h) throw InvalidArgument("generate_rect: need 0 < h_fine <= h");
    if (!(r.box.x1 > r.box.x0) || !(r.box.y1 > r.box.y0)) throw InvalidArgument("generate_rect: empty refinement band");
    h_fine = r.h_fine;
    bx = {std::clamp(r.box.x0, 0.0, spec.width), std::clamp(r.box.x1, 0.0, spec.width)};
    by = {std::clamp(r.box.y0, 0.0, spec.height), std::clamp(r.box.y1, 0.0, spec.height)};
    xb.insert(xb.end(), {bx->first, bx->second});
    yb.insert(yb.end(), {by->first, by->second});
  }
  for (const auto& c : spec.cutouts) {
    if (c.polygon.size() < 3 || !(polygon_area(c.polygon) > tol * tol))
      throw InvalidArgument("generate_rect: degenerate notch polygon '" + c.tag + "'");
    for (const auto& p : c.polygon) {
      if (!domain.contains(p, tol)) throw InvalidArgument("generate_rect: notch polygon leaves the domain");
    }
    if (axis_aligned(c.polygon)) {
      for (const auto& p : c.polygon) {
        xb.push_back(p.x());
        yb.push_back(p.y());
      }
    }
  }
  for (const auto& r : spec.regions) {
    xb.insert(xb.end(), {r.box.x0, r.box.x1});
    yb.insert(yb.end(), {r.box.y0, r.box.y1});
  }

  const auto xs = axis_coordinates(spec.width, spec.h, xb, bx, h_fine, spec.grading);
  const auto ys = axis_coordinates(spec.height, spec.h, yb, by, h_fine, spec.grading);
  const auto nx = static_cast<Index>(xs.size()) - 1;
  const auto ny = static_cast<Index>(ys.size()) - 1;

  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (Index j = 0; j <= ny; ++j)
    for (Index i = 0; i <= nx; ++i) nodes.emplace_back(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)]);
  auto id = [&](Index i, Index j) { return j * (nx + 1) + i; };

  TagTable region_tags{{spec.default_region, 1}};
  for (const auto& r : spec.regions) region_tags.emplace(r.name, static_cast<int>(region_tags.size()) + 1);

  std::vector<Tri3> tris;
  auto add = [&](Index a, Index b, Index c) {
    const Vec2 centroid = (nodes[static_cast<std::size_t>(a)] + nodes[static_cast<std::size_t>(b)] +
                           nodes[static_cast<std::size_t>(c)]) / 3.0;
    for (const auto& cut : spec.cutouts)
      if (point_in_polygon(centroid, cut.polygon)) return;
    int region = 1;
    for (const auto& r : spec.regions) {
      if (r.box.contains(centroid)) {
        region = region_tags.at(r.name);
        break;
      }
    }
    tris.push_back({{a, b, c}, region});
  };
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        add(a, b, c);
        add(a, c, d);
      } else {
        add(a, b, d);
        add(b, c, d);
      }
    }
  }

  TagTable boundary_tags{{spec.edge_names.bottom, 1}, {spec.edge_names.right, 2}, {spec.edge_names.top, 3},
                         {spec.edge_names.left, 4}};
  for (const auto& c : spec.cutouts) boundary_tags.emplace(c.tag, static_cast<int>(boundary_tags.size()) + 1);

  std::unordered_map<std::uint64_t, std::pair<int, std::array<Index, 2>>> edge_use;
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) {
      Index a = t.nodes[k], b = t.nodes[(k + 1) % 3];
      const auto key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint64_t>(std::max(a, b));
      auto& slot = edge_use[key];
      if (slot.first++ == 0) slot.second = {a, b};
    }
  }
  std::vector<BoundaryEdge> edges;
  for (Index j = 0; j <= ny; ++j) {
    for (Index i = 0; i <= nx; ++i) {
      // Deterministic order: walk edges starting at each node.
      const Index a = id(i, j);
      for (Index b : {i < nx ? id(i + 1, j) : Index{-1}, j < ny ? id(i, j + 1) : Index{-1},
                      (i < nx && j < ny) ? id(i + 1, j + 1) : Index{-1}, (i > 0 && j < ny) ? id(i - 1, j + 1) : Index{-1}}) {
        if (b < 0) continue;
        const auto key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint64_t>(std::max(a, b));
        auto it = edge_use.find(key);
        if (it == edge_use.end() || it->second.first != 1) continue;
        const auto& v = it->second.second;
        const Vec2& p = nodes[static_cast<std::size_t>(v[0])];
        const Vec2& q = nodes[static_cast<std::size_t>(v[1])];
        int tag = 0;
        if (std::abs(p.y()) <= tol && std::abs(q.y()) <= tol) tag = 1;
        else if (std::abs(p.x() - spec.width) <= tol && std::abs(q.x() - spec.width) <= tol) tag = 2;
        else if (std::abs(p.y() - spec.height) <= tol && std::abs(q.y() - spec.height) <= tol) tag = 3;
        else if (std::abs(p.x()) <= tol && std::abs(q.x()) <= tol) tag = 4;
        else {
          const Vec2 mid = 0.5 * (p + q);
          double best = std::numeric_limits<double>::max();
          for (const auto& c : spec.cutouts) {
            const double d = polygon_distance(mid, c.polygon);
            if (d < best) {
              best = d;
              tag = boundary_tags.at(c.tag);
            }
          }
        }
        edges.push_back({v, tag});
      }
    }
  }

  return Mesh(std::move(nodes), std::move(tris), std::move(edges), std::move(boundary_tags), std::move(region_tags));
}

}  // namespace thermofrac
