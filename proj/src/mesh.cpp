#include "thermofrac/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "thermofrac/error.hpp"

namespace thermofrac {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

}  // namespace

Mesh::Mesh(std::vector<Vec2> nodes, std::vector<Tri3> elements, std::vector<BoundaryEdge> edges,
           TagTable boundary_tags, TagTable region_tags)
    : boundary_tags_(std::move(boundary_tags)), region_tags_(std::move(region_tags)) {
  const auto n_in = static_cast<Index>(nodes.size());
  for (const auto& p : nodes) {
    if (!std::isfinite(p.x()) || !std::isfinite(p.y()))
      throw InvalidArgument("mesh: non-finite node coordinate");
  }
  for (const auto& t : elements) {
    for (Index v : t.nodes) {
      if (v < 0 || v >= n_in) throw InvalidArgument("mesh: element references invalid node id " + std::to_string(v));
    }
  }
  for (const auto& e : edges) {
    for (Index v : e.nodes) {
      if (v < 0 || v >= n_in) throw InvalidArgument("mesh: edge references invalid node id " + std::to_string(v));
    }
  }

  // Compact to the nodes referenced by elements.
  std::vector<Index> remap(nodes.size(), -1);
  for (const auto& t : elements)
    for (Index v : t.nodes) remap[static_cast<std::size_t>(v)] = 0;
  Index next = 0;
  for (std::size_t i = 0; i < remap.size(); ++i) {
    if (remap[i] == 0) {
      remap[i] = next++;
      nodes_.push_back(nodes[i]);
    }
  }
  for (auto t : elements) {
    for (Index& v : t.nodes) v = remap[static_cast<std::size_t>(v)];
    const double a = signed_area(node(t.nodes[0]), node(t.nodes[1]), node(t.nodes[2]));
    if (a < 0) std::swap(t.nodes[1], t.nodes[2]);
    elements_.push_back(t);
  }

  const Box bb = bounding_box();
  const double diag = std::hypot(bb.width(), bb.height());
  for (Index e = 0; e < num_elements(); ++e) {
    if (!(element_area(e) > 1e-14 * diag * diag))
      throw InvalidArgument("mesh: degenerate element " + std::to_string(e));
  }

  // Duplicate-node check via lexicographic sort.
  {
    std::vector<Index> order(nodes_.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      return node(a).x() < node(b).x() || (node(a).x() == node(b).x() && node(a).y() < node(b).y());
    });
    const double tol = 1e-12 * diag;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t j = i + 1; j < order.size(); ++j) {
        if (node(order[j]).x() - node(order[i]).x() > tol) break;
        if ((node(order[j]) - node(order[i])).norm() <= tol)
          throw InvalidArgument("mesh: duplicate nodes " + std::to_string(order[i]) + " and " +
                                std::to_string(order[j]));
      }
    }
  }

  // Edge -> (count, owning element).
  std::unordered_map<std::uint64_t, std::pair<int, Index>> edge_use;
  for (Index e = 0; e < num_elements(); ++e) {
    const auto& v = elements_[static_cast<std::size_t>(e)].nodes;
    for (int k = 0; k < 3; ++k) {
      auto& slot = edge_use[edge_key(v[k], v[(k + 1) % 3])];
      if (slot.first++ == 0) slot.second = e;
    }
  }
  for (auto edge : edges) {
    for (Index& v : edge.nodes) {
      v = remap[static_cast<std::size_t>(v)];
      if (v < 0) throw InvalidArgument("mesh: boundary edge references a node outside every element");
    }
    auto it = edge_use.find(edge_key(edge.nodes[0], edge.nodes[1]));
    if (it == edge_use.end()) throw InvalidArgument("mesh: boundary edge is not an element edge");
    if (it->second.first != 1) throw InvalidArgument("mesh: boundary edge is shared by two elements");
    edges_.push_back(edge);
    edge_element_.push_back(it->second.second);
  }
}

double Mesh::element_area(Index e) const {
  const auto& v = element(e).nodes;
  return signed_area(node(v[0]), node(v[1]), node(v[2]));
}

Vec2 Mesh::element_centroid(Index e) const {
  const auto& v = element(e).nodes;
  return (node(v[0]) + node(v[1]) + node(v[2])) / 3.0;
}

double Mesh::total_area() const {
  double a = 0;
  for (Index e = 0; e < num_elements(); ++e) a += element_area(e);
  return a;
}

Box Mesh::bounding_box() const {
  if (nodes_.empty()) return {};
  Box b{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
        std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const auto& p : nodes_) {
    b.x0 = std::min(b.x0, p.x());
    b.y0 = std::min(b.y0, p.y());
    b.x1 = std::max(b.x1, p.x());
    b.y1 = std::max(b.y1, p.y());
  }
  return b;
}

int Mesh::boundary_tag(std::string_view name) const {
  auto it = boundary_tags_.find(name);
  if (it == boundary_tags_.end()) throw InvalidArgument("unknown boundary tag '" + std::string(name) + "'");
  return it->second;
}

int Mesh::region_tag(std::string_view name) const {
  auto it = region_tags_.find(name);
  if (it == region_tags_.end()) throw InvalidArgument("unknown region tag '" + std::string(name) + "'");
  return it->second;
}

std::string Mesh::region_name(int id) const {
  for (const auto& [name, tag] : region_tags_)
    if (tag == id) return name;
  return std::to_string(id);
}

Index Mesh::nearest_node(const Vec2& p) const {
  Index best = -1;
  double best_d = std::numeric_limits<double>::max();
  for (Index i = 0; i < num_nodes(); ++i) {
    const double d = (node(i) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::vector<Index> boundary_nodes(const Mesh& mesh, std::string_view tag_name) {
  const int tag = mesh.boundary_tag(tag_name);
  std::vector<Index> ids;
  for (const auto& e : mesh.boundary_edges()) {
    if (e.tag != tag) continue;
    ids.push_back(e.nodes[0]);
    ids.push_back(e.nodes[1]);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

Mesh scaled(const Mesh& mesh, double factor) {
  if (!(factor > 0)) throw InvalidArgument("scaled: factor must be positive");
  std::vector<Vec2> nodes = mesh.nodes();
  for (auto& p : nodes) p *= factor;
  return Mesh(std::move(nodes), mesh.elements(), mesh.boundary_edges(), mesh.boundary_tags(), mesh.region_tags());
}

double polygon_area(const std::vector<Vec2>& polygon) {
  double a = 0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2& p = polygon[i];
    const Vec2& q = polygon[(i + 1) % polygon.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * std::abs(a);
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& polygon) {
  bool inside = false;
  for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace thermofrac
