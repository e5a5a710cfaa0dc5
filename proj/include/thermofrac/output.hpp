#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "thermofrac/config.hpp"
#include "thermofrac/solver.hpp"

namespace thermofrac {

inline constexpr const char* kVersion = "0.1.0";

/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::string& path, const std::function<void(std::ostream&)>& body);

/// Legacy ASCII VTK unstructured grid with point data u (vector), s and T.
/// Field sizes are checked before anything is written.
void write_vtk(std::ostream& out, const Mesh& mesh, const Vector& u, const FEField& s, const FEField& T);
void write_vtk(const std::string& path, const Mesh& mesh, const Vector& u, const FEField& s, const FEField& T);

inline constexpr const char* kCsvHeader = "t,u_app,T_app,Fx,Fy,inner_iters,rel_err";

/// One row per record; an empty series still gets the zero row.
void write_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_csv(const std::string& path, const std::vector<RunRecord>& records);

struct ManifestInfo {
  std::string started;      // ISO-8601 UTC
  std::string csv_file;     // relative to the run directory, empty if none
  std::string example;      // built-in example name, if any
};

void write_manifest(const std::string& path, const RunConfig& config, const Mesh& mesh, const ManifestInfo& info);

std::string utc_timestamp();

}  // namespace thermofrac
