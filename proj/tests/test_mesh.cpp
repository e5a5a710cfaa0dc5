#include <gtest/gtest.h>

#include <map>
#include <set>
#include <random>
#include <sstream>

#include "thermofrac/error.hpp"
#include "thermofrac/mesh.hpp"

using namespace thermofrac;

namespace {

const std::string kFixtures = THERMOFRAC_FIXTURES;

double signed_area(const Mesh& m, Index e) {
  const auto& v = m.element(e).nodes;
  const Vec2 a = m.node(v[1]) - m.node(v[0]), b = m.node(v[2]) - m.node(v[0]);
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

// Each undirected edge with the number of incident triangles.
std::map<std::pair<Index, Index>, int> edge_use(const Mesh& m) {
  std::map<std::pair<Index, Index>, int> use;
  for (const auto& t : m.elements())
    for (int i = 0; i < 3; ++i) {
      Index a = t.nodes[static_cast<std::size_t>(i)], b = t.nodes[static_cast<std::size_t>((i + 1) % 3)];
      ++use[{std::min(a, b), std::max(a, b)}];
    }
  return use;
}

void expect_conforming(const Mesh& m) {
  const auto use = edge_use(m);
  std::set<std::pair<Index, Index>> boundary;
  for (const auto& e : m.boundary_edges()) boundary.insert({std::min(e.nodes[0], e.nodes[1]), std::max(e.nodes[0], e.nodes[1])});
  for (const auto& [edge, n] : use) {
    if (boundary.count(edge)) EXPECT_EQ(n, 1);
    else EXPECT_EQ(n, 2) << "edge " << edge.first << "-" << edge.second;
  }
  for (const auto& e : boundary) EXPECT_TRUE(use.count(e));
}

}  // namespace

TEST(Gmsh, SingleTriangle) {
  const Mesh m = load_gmsh_file(kFixtures + "/triangle.msh");
  EXPECT_EQ(m.num_nodes(), 3);
  EXPECT_EQ(m.num_elements(), 1);
  EXPECT_DOUBLE_EQ(m.total_area(), 0.5);
  EXPECT_EQ(m.num_boundary_edges(), 1);
  EXPECT_EQ(boundary_nodes(m, "BottomEdge").size(), 2u);
  EXPECT_EQ(m.region_name(m.element(0).region), "Domain");
}

TEST(Gmsh, ClockwiseTriangleIsReordered) {
  const Mesh m = load_gmsh_file(kFixtures + "/triangle_cw.msh");
  EXPECT_DOUBLE_EQ(m.total_area(), 0.5);
  EXPECT_GT(signed_area(m, 0), 0);
}

TEST(Gmsh, DanglingNodeReference) {
  try {
    load_gmsh_file(kFixtures + "/dangling.msh");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::DanglingReference);
    EXPECT_NE(std::string(e.what()).find("99"), std::string::npos);
  }
}

TEST(Gmsh, RejectsOtherVersions) {
  try {
    load_gmsh_file(kFixtures + "/version4.msh");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::UnsupportedVersion);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Gmsh, MissingSections) {
  std::istringstream in("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
  try {
    load_gmsh(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::MissingSection);
  }
}

TEST(Gmsh, MissingFile) { EXPECT_THROW(load_gmsh_file(kFixtures + "/nope.msh"), Error); }

TEST(Gmsh, RoundTripKeepsCountsAndTags) {
  RectSpec g;
  g.width = 3;
  g.height = 2;
  g.h = 0.5;
  g.refine = RefineBand{{1, 0.5, 2, 1.5}, 0.125};
  g.cutouts.push_back({{{0, 0.9}, {1.5, 0.9}, {1.5, 1.1}, {0, 1.1}}, "NotchEdge"});
  g.regions.push_back({"Lower", {0, 0, 3, 0.5}});
  const Mesh a = generate_rect(g);
  std::stringstream buf;
  write_gmsh(a, buf);
  const Mesh b = load_gmsh(buf);
  EXPECT_EQ(a.num_nodes(), b.num_nodes());
  EXPECT_EQ(a.num_elements(), b.num_elements());
  EXPECT_EQ(a.num_boundary_edges(), b.num_boundary_edges());
  EXPECT_EQ(a.boundary_tags(), b.boundary_tags());
  EXPECT_EQ(a.region_tags(), b.region_tags());
  for (const auto& [name, tag] : a.boundary_tags())
    EXPECT_EQ(boundary_nodes(a, name).size(), boundary_nodes(b, name).size()) << name;
  EXPECT_NEAR(a.total_area(), b.total_area(), 1e-12);
}

TEST(Generate, UnitSquareCounts) {
  RectSpec g;
  g.h = 1;
  Mesh m = generate_rect(g);
  EXPECT_EQ(m.num_elements(), 2);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-14);
  g.h = 0.5;
  m = generate_rect(g);
  EXPECT_EQ(m.num_elements(), 8);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-14);
}

TEST(Generate, NotchAreaBookkeeping) {
  RectSpec g;
  g.h = 0.05;
  g.cutouts.push_back({{{0, 0.45}, {0.5, 0.45}, {0.5, 0.55}, {0, 0.55}}, "NotchEdge"});
  const Mesh m = generate_rect(g);
  EXPECT_NEAR(m.total_area(), 0.95, 1e-10);
  EXPECT_FALSE(boundary_nodes(m, "NotchEdge").empty());
  expect_conforming(m);
}

TEST(Generate, BoundaryNodes) {
  RectSpec g;
  g.h = 1;
  const Mesh m = generate_rect(g);
  const auto bottom = boundary_nodes(m, "BottomEdge");
  ASSERT_EQ(bottom.size(), 2u);
  std::set<std::pair<double, double>> pts;
  for (Index n : bottom) pts.insert({m.node(n).x(), m.node(n).y()});
  EXPECT_EQ(pts, (std::set<std::pair<double, double>>{{0, 0}, {1, 0}}));
  EXPECT_THROW(boundary_nodes(m, "Left"), InvalidArgument);
}

TEST(Generate, RefinedTopRowCount) {
  RectSpec g;
  g.width = 2;
  g.height = 1;
  g.h = 0.25;
  g.refine = RefineBand{{0.5, 0, 1.0, 1}, 0.05};
  const Mesh m = generate_rect(g);
  std::set<double> xs;
  for (const auto& p : m.nodes())
    if (std::abs(p.y() - 1) < 1e-12) xs.insert(p.x());
  EXPECT_EQ(boundary_nodes(m, "TopEdge").size(), xs.size());
  EXPECT_GT(xs.size(), 2 * 4u + 10);
}

TEST(Generate, RegionsByCentroid) {
  RectSpec g;
  g.width = 4;
  g.height = 2;
  g.h = 0.5;
  g.regions.push_back({"Steel", {0, 0, 4, 1}});
  g.default_region = "Glass";
  const Mesh m = generate_rect(g);
  double steel = 0, glass = 0;
  for (Index e = 0; e < m.num_elements(); ++e) (m.element(e).region == m.region_tag("Steel") ? steel : glass) += m.element_area(e);
  EXPECT_NEAR(steel, 4, 1e-12);
  EXPECT_NEAR(glass, 4, 1e-12);
}

TEST(Generate, RejectsBadSpec) {
  RectSpec g;
  g.h = 0;
  EXPECT_THROW(generate_rect(g), InvalidArgument);
}

// Random notched rectangles: area bookkeeping, orientation and conformity.
TEST(GenerateProperty, AreaAndConformity) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 25; ++trial) {
    RectSpec g;
    g.width = 1 + 3 * u(rng);
    g.height = 0.5 + 2 * u(rng);
    g.h = std::min(g.width, g.height) / (3 + 10 * u(rng));
    if (trial % 2) {
      const double x0 = 0.2 * g.width * u(rng), y0 = 0.2 * g.height * u(rng);
      g.refine = RefineBand{{x0, y0, x0 + 0.5 * g.width, y0 + 0.5 * g.height}, g.h / (2 + 4 * u(rng))};
    }
    const double nw = 0.5 * g.width * u(rng) + 0.05, nh = 0.2 * g.height * u(rng) + 0.01;
    const double yc = g.height * (0.3 + 0.4 * u(rng));
    g.cutouts.push_back({{{0, yc - nh / 2}, {nw, yc - nh / 2}, {nw, yc + nh / 2}, {0, yc + nh / 2}}, "NotchEdge"});
    const Mesh m = generate_rect(g);
    const double expected = g.width * g.height - nw * nh;
    EXPECT_NEAR(m.total_area(), expected, 1e-10 * expected) << "trial " << trial;
    for (Index e = 0; e < m.num_elements(); ++e) ASSERT_GT(signed_area(m, e), 0);
    expect_conforming(m);
  }
}

TEST(Mesh, ScaledAndNearestNode) {
  RectSpec g;
  g.h = 0.5;
  const Mesh m = scaled(generate_rect(g), 1e-3);
  EXPECT_NEAR(m.total_area(), 1e-6, 1e-18);
  const Box b = m.bounding_box();
  EXPECT_DOUBLE_EQ(b.x1, 1e-3);
  const Index n = m.nearest_node({0.00049, 0.00051});
  EXPECT_NEAR(m.node(n).x(), 0.5e-3, 1e-15);
  EXPECT_NEAR(m.node(n).y(), 0.5e-3, 1e-15);
}
