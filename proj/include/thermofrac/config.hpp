#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thermofrac/solver.hpp"

namespace thermofrac {

struct MeshSource {
  std::optional<std::string> gmsh;      // path, relative to the config file
  std::optional<RectSpec> generator;    // exactly one of the two is set

  bool operator==(const MeshSource&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  int vtk_every = 0;  // 0: no VTK snapshots
  bool csv = true;

  bool operator==(const OutputConfig&) const = default;
};

/// Everything a run needs. Lengths of the mesh (gmsh coordinates, generator
/// parameters and point-constraint locations) are multiplied by unit_scale;
/// every other quantity is SI.
struct RunConfig {
  MeshSource mesh;
  double unit_scale = 1;
  std::map<std::string, Material> materials;  // region name -> material, "*" matches any region
  std::vector<DisplacementBC> displacement_bcs;
  std::vector<PointConstraint> point_constraints;
  std::vector<TemperatureBC> temperature_bcs;
  LoadProgram load;
  StaggeredConfig staggered;
  OutputConfig output;
  std::string reaction_tag;
  std::optional<double> initial_temperature;

  bool operator==(const RunConfig&) const = default;
};

/// Strict parse: unknown keys, wrong types and missing required keys throw
/// ConfigError carrying the dotted key path.
RunConfig parse_config(std::string_view json_text);
/// Relative gmsh paths are resolved against the config file's directory.
RunConfig load_config_file(const std::string& path);

std::string serialize(const RunConfig& config);

/// Applies dotted `key=value` assignments (value parsed as JSON, else taken
/// as a string) to the serialized config and re-validates.
RunConfig apply_overrides(const RunConfig& config, const std::vector<std::string>& overrides);

/// Builds or loads the mesh (scaled by unit_scale).
Mesh build_mesh(const RunConfig& config);
Problem build_problem(const RunConfig& config);

}  // namespace thermofrac
