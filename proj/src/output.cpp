#include "thermofrac/output.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "thermofrac/error.hpp"

namespace thermofrac {

namespace fs = std::filesystem;

void write_atomic(const std::string& path, const std::function<void(std::ostream&)>& body) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    body(out);
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error("cannot rename '" + tmp.string() + "' to '" + path + "': " + ec.message());
}

void write_vtk(std::ostream& out, const Mesh& mesh, const Vector& u, const FEField& s, const FEField& T) {
  const Index n = mesh.num_nodes();
  if (u.size() != 2 * n) throw InvalidArgument("write_vtk: displacement field has wrong length");
  if (s.size() != n) throw InvalidArgument("write_vtk: phase field has wrong length");
  if (T.size() != n) throw InvalidArgument("write_vtk: temperature field has wrong length");
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\nthermofrac\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  for (const auto& p : mesh.nodes()) out << p.x() << " " << p.y() << " 0\n";
  out << "CELLS " << mesh.num_elements() << " " << 4 * mesh.num_elements() << "\n";
  for (const auto& t : mesh.elements()) out << "3 " << t.nodes[0] << " " << t.nodes[1] << " " << t.nodes[2] << "\n";
  out << "CELL_TYPES " << mesh.num_elements() << "\n";
  for (Index e = 0; e < mesh.num_elements(); ++e) out << "5\n";
  out << "POINT_DATA " << n << "\n";
  out << "VECTORS u double\n";
  for (Index i = 0; i < n; ++i) out << u(2 * i) << " " << u(2 * i + 1) << " 0\n";
  out << "SCALARS s double 1\nLOOKUP_TABLE default\n";
  for (Index i = 0; i < n; ++i) out << s(i) << "\n";
  out << "SCALARS T double 1\nLOOKUP_TABLE default\n";
  for (Index i = 0; i < n; ++i) out << T(i) << "\n";
}

void write_vtk(const std::string& path, const Mesh& mesh, const Vector& u, const FEField& s, const FEField& T) {
  std::ostringstream buf;
  write_vtk(buf, mesh, u, s, T);
  write_atomic(path, [&](std::ostream& out) { out << buf.str(); });
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kCsvHeader << "\n" << std::setprecision(17);
  const std::vector<RunRecord> zero{RunRecord{}};
  for (const auto& r : records.empty() ? zero : records)
    out << r.t << "," << r.u_app << "," << r.T_app << "," << r.force.x() << "," << r.force.y() << "," << r.inner_iters
        << "," << r.rel_err << "\n";
}

void write_csv(const std::string& path, const std::vector<RunRecord>& records) {
  write_atomic(path, [&](std::ostream& out) { write_csv(out, records); });
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

void write_manifest(const std::string& path, const RunConfig& config, const Mesh& mesh, const ManifestInfo& info) {
  using json = nlohmann::json;
  const Box bb = mesh.bounding_box();
  json j;
  j["version"] = kVersion;
  j["started"] = info.started;
  if (!info.example.empty()) j["example"] = info.example;
  j["config"] = json::parse(serialize(config));
  j["mesh"] = {{"nodes", mesh.num_nodes()},
               {"elements", mesh.num_elements()},
               {"boundary_edges", mesh.num_boundary_edges()},
               {"area", mesh.total_area()},
               {"bounding_box", {bb.x0, bb.y0, bb.x1, bb.y1}}};
  j["steps"] = config.load.num_steps();
  j["records"] = info.csv_file;
  write_atomic(path, [&](std::ostream& out) { out << j.dump(2) << "\n"; });
}

}  // namespace thermofrac
