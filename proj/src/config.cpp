#include "thermofrac/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "thermofrac/error.hpp"

namespace thermofrac {

using json = nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Strict object reader: every key must be consumed before finish().
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) {
    if (!j_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  const json& raw(const std::string& key) {
    if (!has(key)) throw ConfigError(join(path_, key), "missing required key");
    return j_.at(key);
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) { return has(key) ? string(key) : fallback; }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v.get<bool>();
  }

  const json& array(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array");
    return v;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

Vec2 read_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(path, "expected [x, y]");
  return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
}

Box read_box(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) throw ConfigError(path, "expected [x0, y0, x1, y1]");
  Box b{as_number(v[0], path), as_number(v[1], path), as_number(v[2], path), as_number(v[3], path)};
  if (!(b.x1 >= b.x0) || !(b.y1 >= b.y0)) throw ConfigError(path, "box corners out of order");
  return b;
}

Prescribed read_prescribed(const json& v, const std::string& path) {
  if (v.is_number()) return Prescribed::fixed(v.get<double>());
  if (v.is_string()) {
    if (v.get<std::string>() == "program") return Prescribed::program();
    throw ConfigError(path, "expected a number, \"program\" or {base, rate}");
  }
  Obj o(v, path);
  const double base = o.number("base", 0.0);
  const double rate = o.number("rate");
  o.finish();
  return Prescribed::linear(base, rate);
}

json write_prescribed(const Prescribed& p) {
  switch (p.kind) {
    case Prescribed::Kind::Fixed: return p.value;
    case Prescribed::Kind::Program: return "program";
    case Prescribed::Kind::Rate: return json{{"base", p.value}, {"rate", p.rate}};
  }
  return nullptr;
}

RectSpec read_generator(const json& j, const std::string& path) {
  Obj o(j, path);
  RectSpec s;
  s.width = o.number("width");
  s.height = o.number("height");
  s.h = o.number("h");
  if (o.has("refine")) {
    Obj r(o.raw("refine"), o.path("refine"));
    s.refine = RefineBand{read_box(r.raw("box"), r.path("box")), r.number("h_fine")};
    r.finish();
  }
  if (o.has("cutouts")) {
    const json& arr = o.array("cutouts");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = o.path("cutouts") + "[" + std::to_string(i) + "]";
      Obj c(arr[i], p);
      Cutout cut;
      for (std::size_t k = 0; k < c.array("polygon").size(); ++k)
        cut.polygon.push_back(read_point(c.array("polygon")[k], c.path("polygon")));
      cut.tag = c.string("tag", cut.tag);
      c.finish();
      s.cutouts.push_back(std::move(cut));
    }
  }
  if (o.has("regions")) {
    const json& arr = o.array("regions");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj r(arr[i], o.path("regions") + "[" + std::to_string(i) + "]");
      s.regions.push_back({r.string("name"), read_box(r.raw("box"), r.path("box"))});
      r.finish();
    }
  }
  if (o.has("edge_names")) {
    Obj e(o.raw("edge_names"), o.path("edge_names"));
    s.edge_names.bottom = e.string("bottom", s.edge_names.bottom);
    s.edge_names.right = e.string("right", s.edge_names.right);
    s.edge_names.top = e.string("top", s.edge_names.top);
    s.edge_names.left = e.string("left", s.edge_names.left);
    e.finish();
  }
  s.default_region = o.string("default_region", s.default_region);
  s.grading = o.number("grading", s.grading);
  o.finish();
  if (!(s.width > 0) || !(s.height > 0) || !(s.h > 0)) throw ConfigError(path, "width, height and h must be positive");
  return s;
}

json write_box(const Box& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

json write_generator(const RectSpec& s) {
  json j{{"width", s.width}, {"height", s.height}, {"h", s.h}};
  if (s.refine) j["refine"] = {{"box", write_box(s.refine->box)}, {"h_fine", s.refine->h_fine}};
  j["cutouts"] = json::array();
  for (const auto& c : s.cutouts) {
    json poly = json::array();
    for (const auto& p : c.polygon) poly.push_back({p.x(), p.y()});
    j["cutouts"].push_back({{"polygon", poly}, {"tag", c.tag}});
  }
  j["regions"] = json::array();
  for (const auto& r : s.regions) j["regions"].push_back({{"name", r.name}, {"box", write_box(r.box)}});
  j["edge_names"] = {{"bottom", s.edge_names.bottom},
                     {"right", s.edge_names.right},
                     {"top", s.edge_names.top},
                     {"left", s.edge_names.left}};
  j["default_region"] = s.default_region;
  j["grading"] = s.grading;
  return j;
}

Material read_material(const json& j, const std::string& path) {
  Obj o(j, path);
  Material m;
  {
    Obj e(o.raw("elastic"), o.path("elastic"));
    m.elastic.E = e.number("E");
    m.elastic.nu = e.number("nu");
    const std::string mode = e.string("mode", "plane_strain");
    if (mode == "plane_strain") m.elastic.mode = PlanarMode::PlaneStrain;
    else if (mode == "plane_stress") m.elastic.mode = PlanarMode::PlaneStress;
    else throw ConfigError(e.path("mode"), "expected \"plane_stress\" or \"plane_strain\"");
    e.finish();
  }
  if (o.has("thermal")) {
    Obj t(o.raw("thermal"), o.path("thermal"));
    m.thermal.k0 = t.number("k0", m.thermal.k0);
    m.thermal.rho = t.number("rho", m.thermal.rho);
    m.thermal.c = t.number("c", m.thermal.c);
    m.thermal.alpha = t.number("alpha", m.thermal.alpha);
    m.thermal.T0 = t.number("T0", m.thermal.T0);
    t.finish();
  }
  {
    Obj f(o.raw("fracture"), o.path("fracture"));
    m.fracture.Gc = f.number("Gc");
    m.fracture.ls = f.number("ls");
    m.fracture.eta = f.number("eta", m.fracture.eta);
    f.finish();
  }
  m.degrade_conductivity = o.boolean("degrade_conductivity", m.degrade_conductivity);
  o.finish();
  try {
    validate(m);
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
  return m;
}

json write_material(const Material& m) {
  return {{"elastic",
           {{"E", m.elastic.E},
            {"nu", m.elastic.nu},
            {"mode", m.elastic.mode == PlanarMode::PlaneStress ? "plane_stress" : "plane_strain"}}},
          {"thermal",
           {{"k0", m.thermal.k0}, {"rho", m.thermal.rho}, {"c", m.thermal.c}, {"alpha", m.thermal.alpha}, {"T0", m.thermal.T0}}},
          {"fracture", {{"Gc", m.fracture.Gc}, {"ls", m.fracture.ls}, {"eta", m.fracture.eta}}},
          {"degrade_conductivity", m.degrade_conductivity}};
}

const std::map<std::string, RampKind>& ramp_names() {
  static const std::map<std::string, RampKind> names{{"smooth", RampKind::Smooth},
                                                      {"linear", RampKind::Linear},
                                                      {"prescribed_uniform", RampKind::PrescribedUniform},
                                                      {"none", RampKind::None}};
  return names;
}

std::string ramp_name(RampKind k) {
  for (const auto& [name, kind] : ramp_names())
    if (kind == k) return name;
  return "none";
}

template <class BC>
void read_components(Obj& o, BC& bc) {
  if (o.has("ux")) bc.ux = read_prescribed(o.raw("ux"), o.path("ux"));
  if (o.has("uy")) bc.uy = read_prescribed(o.raw("uy"), o.path("uy"));
  if (!bc.ux && !bc.uy) throw ConfigError(o.path("ux"), "constraint sets neither ux nor uy");
}

template <class BC>
void write_components(json& j, const BC& bc) {
  if (bc.ux) j["ux"] = write_prescribed(*bc.ux);
  if (bc.uy) j["uy"] = write_prescribed(*bc.uy);
}

RunConfig from_json(const json& root) {
  Obj o(root, "");
  RunConfig c;
  {
    Obj m(o.raw("mesh"), "mesh");
    const bool g = m.has("gmsh"), r = m.has("generator");
    if (g == r) throw ConfigError("mesh", "exactly one of \"gmsh\" or \"generator\" is required");
    if (g) c.mesh.gmsh = m.string("gmsh");
    if (r) c.mesh.generator = read_generator(m.raw("generator"), "mesh.generator");
    m.finish();
  }
  c.unit_scale = o.number("unit_scale", 1.0);
  if (!(c.unit_scale > 0)) throw ConfigError("unit_scale", "must be > 0");

  {
    Obj mats(o.raw("materials"), "materials");
    for (const auto& [name, value] : root.at("materials").items()) {
      mats.has(name);
      c.materials.emplace(name, read_material(value, "materials." + name));
    }
    if (c.materials.empty()) throw ConfigError("materials", "at least one material is required");
  }

  if (o.has("displacement_bcs")) {
    const json& arr = o.array("displacement_bcs");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj b(arr[i], "displacement_bcs[" + std::to_string(i) + "]");
      DisplacementBC bc;
      bc.tag = b.string("tag");
      read_components(b, bc);
      b.finish();
      c.displacement_bcs.push_back(std::move(bc));
    }
  }
  if (o.has("point_constraints")) {
    const json& arr = o.array("point_constraints");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj b(arr[i], "point_constraints[" + std::to_string(i) + "]");
      PointConstraint pc;
      pc.point = read_point(b.raw("point"), b.path("point"));
      read_components(b, pc);
      b.finish();
      c.point_constraints.push_back(std::move(pc));
    }
  }
  if (o.has("temperature_bcs")) {
    const json& arr = o.array("temperature_bcs");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj b(arr[i], "temperature_bcs[" + std::to_string(i) + "]");
      TemperatureBC bc;
      bc.tag = b.string("tag");
      bc.value = read_prescribed(b.raw("value"), b.path("value"));
      b.finish();
      c.temperature_bcs.push_back(std::move(bc));
    }
  }
  {
    Obj l(o.raw("load"), "load");
    auto& p = c.load;
    p.uMax = l.number("uMax", 0.0);
    p.tMax = l.number("tMax");
    p.delt = l.number("delt");
    p.uTran = l.number("uTran", 0.0);
    p.T0 = l.number("T0", 0.0);
    p.TAppMax = l.number("TAppMax", p.T0);
    const std::string ramp = l.string("ramp", "none");
    auto it = ramp_names().find(ramp);
    if (it == ramp_names().end())
      throw ConfigError("load.ramp", "expected one of smooth, linear, prescribed_uniform, none");
    p.ramp = it->second;
    if (l.has("schedule")) {
      const json& arr = l.array("schedule");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const Vec2 pt = read_point(arr[i], "load.schedule[" + std::to_string(i) + "]");
        p.schedule.emplace_back(pt.x(), pt.y());
      }
    }
    l.finish();
    try {
      validate(p);
    } catch (const InvalidArgument& e) {
      throw ConfigError("load", e.what());
    }
  }
  if (o.has("staggered")) {
    Obj s(o.raw("staggered"), "staggered");
    c.staggered.tol = s.number("tol", c.staggered.tol);
    c.staggered.inner_max = s.integer("inner_max", c.staggered.inner_max);
    s.finish();
    if (!(c.staggered.tol > 0)) throw ConfigError("staggered.tol", "must be > 0");
    if (c.staggered.inner_max < 1) throw ConfigError("staggered.inner_max", "must be >= 1");
  }
  if (o.has("output")) {
    Obj out(o.raw("output"), "output");
    c.output.dir = out.string("dir", c.output.dir);
    c.output.vtk_every = out.integer("vtk_every", c.output.vtk_every);
    c.output.csv = out.boolean("csv", c.output.csv);
    out.finish();
    if (c.output.vtk_every < 0) throw ConfigError("output.vtk_every", "must be >= 0");
  }
  c.reaction_tag = o.string("reaction_tag", "");
  if (o.has("initial_temperature")) c.initial_temperature = o.number("initial_temperature");
  o.finish();
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  if (c.mesh.gmsh) j["mesh"] = {{"gmsh", *c.mesh.gmsh}};
  else if (c.mesh.generator) j["mesh"] = {{"generator", write_generator(*c.mesh.generator)}};
  j["unit_scale"] = c.unit_scale;
  j["materials"] = json::object();
  for (const auto& [name, m] : c.materials) j["materials"][name] = write_material(m);
  j["displacement_bcs"] = json::array();
  for (const auto& bc : c.displacement_bcs) {
    json b{{"tag", bc.tag}};
    write_components(b, bc);
    j["displacement_bcs"].push_back(b);
  }
  j["point_constraints"] = json::array();
  for (const auto& pc : c.point_constraints) {
    json b{{"point", {pc.point.x(), pc.point.y()}}};
    write_components(b, pc);
    j["point_constraints"].push_back(b);
  }
  j["temperature_bcs"] = json::array();
  for (const auto& bc : c.temperature_bcs)
    j["temperature_bcs"].push_back({{"tag", bc.tag}, {"value", write_prescribed(bc.value)}});
  const auto& p = c.load;
  j["load"] = {{"uMax", p.uMax}, {"tMax", p.tMax}, {"delt", p.delt},       {"uTran", p.uTran},
               {"T0", p.T0},     {"TAppMax", p.TAppMax}, {"ramp", ramp_name(p.ramp)}};
  if (!p.schedule.empty()) {
    j["load"]["schedule"] = json::array();
    for (const auto& [t, T] : p.schedule) j["load"]["schedule"].push_back({t, T});
  }
  j["staggered"] = {{"tol", c.staggered.tol}, {"inner_max", c.staggered.inner_max}};
  j["output"] = {{"dir", c.output.dir}, {"vtk_every", c.output.vtk_every}, {"csv", c.output.csv}};
  j["reaction_tag"] = c.reaction_tag;
  if (c.initial_temperature) j["initial_temperature"] = *c.initial_temperature;
  return j;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  try {
    return from_json(parse_json(json_text));
  } catch (const json::exception& e) {
    throw ConfigError("", e.what());
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "': file not found or unreadable");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_config(ss.str());
  if (c.mesh.gmsh) {
    namespace fs = std::filesystem;
    fs::path mesh(*c.mesh.gmsh);
    if (mesh.is_relative()) c.mesh.gmsh = (fs::path(path).parent_path() / mesh).lexically_normal().string();
  }
  return c;
}

std::string serialize(const RunConfig& config) { return to_json(config).dump(2); }

RunConfig apply_overrides(const RunConfig& config, const std::vector<std::string>& overrides) {
  json root = to_json(config);
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("", "override '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    json* node = &root;
    std::stringstream parts(key);
    std::string part;
    std::vector<std::string> path;
    while (std::getline(parts, part, '.')) path.push_back(part);
    for (std::size_t i = 0; i < path.size(); ++i) {
      const std::string& p = path[i];
      const bool last = i + 1 == path.size();
      if (node->is_array()) {
        std::size_t idx = 0;
        try {
          idx = std::stoul(p);
        } catch (const std::exception&) {
          throw ConfigError(key, "expected an array index at '" + p + "'");
        }
        if (idx >= node->size()) throw ConfigError(key, "array index out of range");
        node = &(*node)[idx];
      } else {
        if (!node->is_object()) throw ConfigError(key, "cannot descend into a scalar");
        node = &(*node)[p];
      }
      if (last) *node = value;
    }
  }
  try {
    return from_json(root);
  } catch (const json::exception& e) {
    throw ConfigError("", e.what());
  }
}

Mesh build_mesh(const RunConfig& config) {
  Mesh mesh = config.mesh.gmsh ? load_gmsh_file(*config.mesh.gmsh) : generate_rect(*config.mesh.generator);
  return config.unit_scale == 1.0 ? mesh : scaled(mesh, config.unit_scale);
}

Problem build_problem(const RunConfig& config) {
  Problem p;
  auto mesh = std::make_shared<Mesh>(build_mesh(config));
  for (const auto& [name, m] : config.materials) {
    if (name != "*" && !mesh->region_tags().count(name))
      throw ConfigError("materials." + name, "no region with this name in the mesh");
  }
  for (const auto& [name, id] : mesh->region_tags()) {
    auto it = config.materials.find(name);
    if (it == config.materials.end()) it = config.materials.find("*");
    if (it == config.materials.end()) throw ConfigError("materials", "no material for region '" + name + "'");
    p.materials[id] = it->second;
  }
  auto check_tag = [&](const std::string& tag, const std::string& path) {
    if (!mesh->boundary_tags().count(tag)) throw ConfigError(path, "unknown boundary tag '" + tag + "'");
  };
  for (std::size_t i = 0; i < config.displacement_bcs.size(); ++i)
    check_tag(config.displacement_bcs[i].tag, "displacement_bcs[" + std::to_string(i) + "].tag");
  for (std::size_t i = 0; i < config.temperature_bcs.size(); ++i)
    check_tag(config.temperature_bcs[i].tag, "temperature_bcs[" + std::to_string(i) + "].tag");
  if (!config.reaction_tag.empty()) check_tag(config.reaction_tag, "reaction_tag");

  p.mesh = mesh;
  p.displacement_bcs = config.displacement_bcs;
  p.point_constraints = config.point_constraints;
  for (auto& pc : p.point_constraints) pc.point *= config.unit_scale;
  p.temperature_bcs = config.temperature_bcs;
  p.load = config.load;
  p.staggered = config.staggered;
  p.reaction_tag = config.reaction_tag;
  p.initial_temperature = config.initial_temperature;
  return p;
}

}  // namespace thermofrac
