#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "thermofrac/error.hpp"
#include "thermofrac/mesh.hpp"

namespace thermofrac {

namespace {

using Kind = ParseError::Kind;

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  std::string expect(const char* what) {
    std::string line;
    if (!next(line)) throw ParseError(Kind::Syntax, number_, std::string("unexpected end of file, expected ") + what);
    return line;
  }

  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::size_t read_count(LineReader& r, const char* section) {
  const std::string line = r.expect(section);
  std::istringstream ss(line);
  long long n = -1;
  if (!(ss >> n) || n < 0) throw ParseError(Kind::Syntax, r.number(), std::string("bad entry count in ") + section);
  return static_cast<std::size_t>(n);
}

void expect_end(LineReader& r, const std::string& end) {
  const std::string line = trim(r.expect(end.c_str()));
  if (line != end) throw ParseError(Kind::Syntax, r.number(), "expected " + end + ", found '" + line + "'");
}

}  // namespace

Mesh load_gmsh(std::istream& in) {
  LineReader r(in);
  bool have_format = false, have_nodes = false, have_elements = false;

  std::unordered_map<long long, Index> node_index;
  std::vector<Vec2> nodes;
  std::vector<Tri3> tris;
  std::vector<BoundaryEdge> edges;
  std::map<int, std::string> names_1d, names_2d;

  std::string line;
  while (r.next(line)) {
    const std::string head = trim(line);
    if (head == "$MeshFormat") {
      std::istringstream ss(r.expect("format line"));
      std::string version;
      int file_type = -1;
      ss >> version >> file_type;
      if (version.rfind("2.2", 0) != 0)
        throw ParseError(Kind::UnsupportedVersion, r.number(), "unsupported MSH version '" + version + "' (need 2.2)");
      if (file_type != 0) throw ParseError(Kind::UnsupportedVersion, r.number(), "binary MSH files are not supported");
      expect_end(r, "$EndMeshFormat");
      have_format = true;
    } else if (head == "$PhysicalNames") {
      const std::size_t n = read_count(r, "$PhysicalNames");
      for (std::size_t i = 0; i < n; ++i) {
        const std::string entry = r.expect("physical name");
        std::istringstream ss(entry);
        int dim = 0, tag = 0;
        if (!(ss >> dim >> tag)) throw ParseError(Kind::Syntax, r.number(), "bad physical name entry");
        const auto q0 = entry.find('"');
        const auto q1 = entry.rfind('"');
        if (q0 == std::string::npos || q1 == q0) throw ParseError(Kind::Syntax, r.number(), "unquoted physical name");
        const std::string name = entry.substr(q0 + 1, q1 - q0 - 1);
        if (dim == 1) names_1d[tag] = name;
        if (dim == 2) names_2d[tag] = name;
      }
      expect_end(r, "$EndPhysicalNames");
    } else if (head == "$Nodes") {
      if (!have_format) throw ParseError(Kind::MissingSection, r.number(), "$Nodes before $MeshFormat");
      const std::size_t n = read_count(r, "$Nodes");
      nodes.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::istringstream ss(r.expect("node"));
        long long id = 0;
        double x = 0, y = 0, z = 0;
        if (!(ss >> id >> x >> y >> z)) throw ParseError(Kind::Syntax, r.number(), "bad node entry");
        if (!node_index.emplace(id, static_cast<Index>(nodes.size())).second)
          throw ParseError(Kind::Syntax, r.number(), "duplicate node id " + std::to_string(id));
        nodes.emplace_back(x, y);
      }
      expect_end(r, "$EndNodes");
      have_nodes = true;
    } else if (head == "$Elements") {
      if (!have_nodes) throw ParseError(Kind::MissingSection, r.number(), "$Elements before $Nodes");
      const std::size_t n = read_count(r, "$Elements");
      for (std::size_t i = 0; i < n; ++i) {
        std::istringstream ss(r.expect("element"));
        long long id = 0;
        int type = 0, ntags = 0;
        if (!(ss >> id >> type >> ntags) || ntags < 0)
          throw ParseError(Kind::Syntax, r.number(), "bad element entry");
        std::vector<int> tags(static_cast<std::size_t>(ntags));
        for (int& t : tags)
          if (!(ss >> t)) throw ParseError(Kind::Syntax, r.number(), "bad element tags");
        const int physical = tags.empty() ? 0 : tags[0];
        int nv = 0;
        if (type == 1) nv = 2;
        else if (type == 2) nv = 3;
        else if (type == 15) continue;
        else throw ParseError(Kind::Syntax, r.number(), "unsupported element type " + std::to_string(type));
        std::array<Index, 3> v{};
        for (int k = 0; k < nv; ++k) {
          long long nid = 0;
          if (!(ss >> nid)) throw ParseError(Kind::Syntax, r.number(), "missing element node");
          auto it = node_index.find(nid);
          if (it == node_index.end())
            throw ParseError(Kind::DanglingReference, r.number(),
                             "element " + std::to_string(id) + " references undefined node " + std::to_string(nid));
          v[static_cast<std::size_t>(k)] = it->second;
        }
        if (type == 2) tris.push_back({v, physical});
        else edges.push_back({{v[0], v[1]}, physical});
      }
      expect_end(r, "$EndElements");
      have_elements = true;
    } else if (!head.empty() && head[0] == '$') {
      const std::string end = "$End" + head.substr(1);
      std::string skip;
      while (true) {
        if (!r.next(skip)) throw ParseError(Kind::Syntax, r.number(), "unterminated section " + head);
        if (trim(skip) == end) break;
      }
    } else {
      throw ParseError(Kind::Syntax, r.number(), "unexpected content '" + head + "'");
    }
  }
  if (!have_format) throw ParseError(Kind::MissingSection, r.number(), "missing $MeshFormat section");
  if (!have_nodes) throw ParseError(Kind::MissingSection, r.number(), "missing $Nodes section");
  if (!have_elements) throw ParseError(Kind::MissingSection, r.number(), "missing $Elements section");

  TagTable boundary, region;
  for (const auto& e : edges) boundary.emplace(names_1d.count(e.tag) ? names_1d[e.tag] : std::to_string(e.tag), e.tag);
  for (const auto& t : tris) region.emplace(names_2d.count(t.region) ? names_2d[t.region] : std::to_string(t.region), t.region);
  for (const auto& [tag, name] : names_1d) boundary.emplace(name, tag);
  for (const auto& [tag, name] : names_2d) region.emplace(name, tag);
  return Mesh(std::move(nodes), std::move(tris), std::move(edges), std::move(boundary), std::move(region));
}

Mesh load_gmsh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file '" + path + "'");
  return load_gmsh(in);
}

void write_gmsh(const Mesh& mesh, std::ostream& out) {
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$PhysicalNames\n" << mesh.boundary_tags().size() + mesh.region_tags().size() << "\n";
  for (const auto& [name, tag] : mesh.boundary_tags()) out << "1 " << tag << " \"" << name << "\"\n";
  for (const auto& [name, tag] : mesh.region_tags()) out << "2 " << tag << " \"" << name << "\"\n";
  out << "$EndPhysicalNames\n";
  out << "$Nodes\n" << mesh.num_nodes() << "\n" << std::setprecision(17);
  for (Index i = 0; i < mesh.num_nodes(); ++i)
    out << i + 1 << " " << mesh.node(i).x() << " " << mesh.node(i).y() << " 0\n";
  out << "$EndNodes\n";
  out << "$Elements\n" << mesh.num_boundary_edges() + mesh.num_elements() << "\n";
  Index id = 1;
  for (const auto& e : mesh.boundary_edges())
    out << id++ << " 1 2 " << e.tag << " " << e.tag << " " << e.nodes[0] + 1 << " " << e.nodes[1] + 1 << "\n";
  for (const auto& t : mesh.elements())
    out << id++ << " 2 2 " << t.region << " " << t.region << " " << t.nodes[0] + 1 << " " << t.nodes[1] + 1 << " "
        << t.nodes[2] + 1 << "\n";
  out << "$EndElements\n";
}

}  // namespace thermofrac
