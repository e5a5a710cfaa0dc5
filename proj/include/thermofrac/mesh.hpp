#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace thermofrac {

using Index = Eigen::Index;
using Vec2 = Eigen::Vector2d;

/// 3-node triangle. Nodes are counter-clockwise once owned by a Mesh.
struct Tri3 {
  std::array<Index, 3> nodes;
  int region = 0;
};

struct BoundaryEdge {
  std::array<Index, 2> nodes;
  int tag = 0;
};

using TagTable = std::map<std::string, int, std::less<>>;

struct Box {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool contains(const Vec2& p, double tol = 0.0) const {
    return p.x() >= x0 - tol && p.x() <= x1 + tol && p.y() >= y0 - tol && p.y() <= y1 + tol;
  }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }

  bool operator==(const Box&) const = default;
};

/// Immutable conforming P1 triangulation with tagged boundary edges and regions.
///
/// Construction validates node ids, drops nodes no element references, flips
/// clockwise triangles and rejects duplicate nodes (closer than 1e-12 of the
/// bounding-box diagonal), zero-area triangles, and boundary edges that are
/// not exterior element edges.
class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Vec2> nodes, std::vector<Tri3> elements, std::vector<BoundaryEdge> edges,
       TagTable boundary_tags, TagTable region_tags);

  Index num_nodes() const { return static_cast<Index>(nodes_.size()); }
  Index num_elements() const { return static_cast<Index>(elements_.size()); }
  Index num_boundary_edges() const { return static_cast<Index>(edges_.size()); }

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const Vec2& node(Index i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const std::vector<Tri3>& elements() const { return elements_; }
  const Tri3& element(Index e) const { return elements_[static_cast<std::size_t>(e)]; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return edges_; }
  const TagTable& boundary_tags() const { return boundary_tags_; }
  const TagTable& region_tags() const { return region_tags_; }

  /// Element owning boundary edge `i`.
  Index edge_element(Index i) const { return edge_element_[static_cast<std::size_t>(i)]; }

  double element_area(Index e) const;
  Vec2 element_centroid(Index e) const;
  double total_area() const;
  Box bounding_box() const;

  /// Throws InvalidArgument naming the tag when it does not exist.
  int boundary_tag(std::string_view name) const;
  int region_tag(std::string_view name) const;
  std::string region_name(int id) const;

  Index nearest_node(const Vec2& p) const;

 private:
  std::vector<Vec2> nodes_;
  std::vector<Tri3> elements_;
  std::vector<BoundaryEdge> edges_;
  std::vector<Index> edge_element_;
  TagTable boundary_tags_;
  TagTable region_tags_;
};

/// Node ids incident to edges tagged `tag_name`, ascending and unique.
std::vector<Index> boundary_nodes(const Mesh& mesh, std::string_view tag_name);

/// Reads the MSH 2.2 ASCII subset: $MeshFormat, $PhysicalNames, $Nodes and
/// $Elements with element types 1 (line) and 2 (triangle); type 15 points are
/// skipped. Triangles become elements, lines become boundary edges.
Mesh load_gmsh(std::istream& in);
Mesh load_gmsh_file(const std::string& path);
void write_gmsh(const Mesh& mesh, std::ostream& out);

/// Copy with every coordinate multiplied by `factor`.
Mesh scaled(const Mesh& mesh, double factor);

// ---------------------------------------------------------------------------
// Structured generator

struct RefineBand {
  Box box;
  double h_fine = 0;

  bool operator==(const RefineBand&) const = default;
};

/// Polygonal hole. Triangles whose centroid falls inside are removed and the
/// exposed edges are tagged `tag`.
struct Cutout {
  std::vector<Vec2> polygon;
  std::string tag = "NotchEdge";

  bool operator==(const Cutout&) const = default;
};

struct RegionBox {
  std::string name;
  Box box;

  bool operator==(const RegionBox&) const = default;
};

struct EdgeNames {
  std::string bottom = "BottomEdge";
  std::string right = "RightEdge";
  std::string top = "TopEdge";
  std::string left = "LeftEdge";

  bool operator==(const EdgeNames&) const = default;
};

struct RectSpec {
  double width = 1;
  double height = 1;
  double h = 1;
  std::optional<RefineBand> refine;
  std::vector<Cutout> cutouts;
  EdgeNames edge_names;
  std::vector<RegionBox> regions;  // first match by element centroid wins
  std::string default_region = "Domain";
  double grading = 0.25;  // spacing growth per unit distance from the band

  bool operator==(const RectSpec&) const = default;
};

/// Tensor-product triangulation of [0,width]x[0,height]. Grid lines pass through
/// every cutout vertex and band/region corner, so axis-aligned cutouts are
/// represented exactly. Spacing is h_fine inside the band's x- and y-extent
/// and grows linearly with distance to h. Cells are split along alternating
/// diagonals.
Mesh generate_rect(const RectSpec& spec);

double polygon_area(const std::vector<Vec2>& polygon);
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& polygon);

}  // namespace thermofrac
