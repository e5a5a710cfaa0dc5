#include "thermofrac/benchmarks.hpp"

#include <cmath>
#include <limits>

#include "thermofrac/error.hpp"

namespace thermofrac {

namespace {

constexpr double kMm = 1e-3;

Material make_material(double E, double nu, PlanarMode mode, double Gc, double ls, ThermalLaw thermal,
                       bool degrade_k = true) {
  Material m;
  m.elastic = {E, nu, mode};
  m.thermal = thermal;
  m.fracture = {Gc, ls, 1e-8};
  m.degrade_conductivity = degrade_k;
  return m;
}

DisplacementBC clamp(const std::string& tag) { return {tag, Prescribed::fixed(0), Prescribed::fixed(0)}; }

// 1 mm square, notch from the left edge to the centre, pulled at the top.
RunConfig sent(double scale) {
  const double ls = 3.33e-6 / scale;
  const double h_fine = ls / 4 / kMm;
  RunConfig c;
  RectSpec g;
  g.width = 1;
  g.height = 1;
  g.h = 0.02 / scale;
  g.refine = RefineBand{{0.45, 0.44, 1.0, 0.56}, h_fine};
  g.cutouts.push_back({{{0, 0.5 - h_fine}, {0.5, 0.5 - h_fine}, {0.5, 0.5 + h_fine}, {0, 0.5 + h_fine}}, "NotchEdge"});
  c.mesh.generator = g;
  c.unit_scale = kMm;

  const double T0 = 300;
  c.materials["*"] = make_material(340e9, 0.22, PlanarMode::PlaneStrain, 42.47, ls, {300, 2450, 0.775, 8e-6, T0});
  c.displacement_bcs = {clamp("BottomEdge"), {"TopEdge", std::nullopt, Prescribed::program()}};
  c.temperature_bcs = {{"BottomEdge", Prescribed::fixed(T0)}, {"TopEdge", Prescribed::program()}};
  c.load.uMax = 1.2e-6;
  c.load.tMax = 1;
  c.load.delt = 1e-2;
  c.load.uTran = 0.2 * c.load.uMax;
  c.load.T0 = T0;
  c.load.TAppMax = T0 + 50;
  c.load.ramp = RampKind::Smooth;
  c.reaction_tag = "TopEdge";
  c.output.dir = "out/sent";
  return c;
}

// Cross of arm width L inside [0, 2L]^2 with an inclined notch at the
// lower-right re-entrant corner.
RunConfig cruciform(double scale, const std::string& variant) {
  constexpr double L = 50;
  const double ls = 5e-4 / scale;
  const double h_fine = ls / 4 / kMm;
  RunConfig c;
  RectSpec g;
  g.width = 2 * L;
  g.height = 2 * L;
  g.h = 1.25 / scale;
  g.refine = RefineBand{{L / 2, L / 2, 1.5 * L, 1.5 * L}, h_fine};
  const double a = L / 2;
  g.cutouts = {{{{0, 0}, {a, 0}, {a, a}, {0, a}}, "Corner"},
               {{{2 * L - a, 0}, {2 * L, 0}, {2 * L, a}, {2 * L - a, a}}, "Corner"},
               {{{2 * L - a, 2 * L - a}, {2 * L, 2 * L - a}, {2 * L, 2 * L}, {2 * L - a, 2 * L}}, "Corner"},
               {{{0, 2 * L - a}, {a, 2 * L - a}, {a, 2 * L}, {0, 2 * L}}, "Corner"}};
  const Vec2 corner(1.5 * L, 0.5 * L);
  const Vec2 dir = Vec2(-1, 1).normalized();
  const Vec2 across = Vec2(1, 1).normalized() * (1.25 * h_fine);
  const Vec2 tip = corner + 0.2 * L * dir;
  const Vec2 base = corner - 2 * h_fine * dir;
  g.cutouts.push_back({{base - across, tip - across, tip + across, base + across}, "NotchEdge"});
  c.mesh.generator = g;
  c.unit_scale = kMm;

  c.materials["*"] = make_material(218400, 0.2, PlanarMode::PlaneStress, 2e-4, ls, {1, 0, 1, 6e-4, 0});
  c.load.T0 = 0;
  c.load.TAppMax = 0;
  c.load.ramp = RampKind::None;
  c.load.delt = 1;
  if (variant == "thermal") {
    // Held at the ends of the side arms, which stay at the reference temperature.
    c.displacement_bcs = {clamp("LeftEdge"), clamp("RightEdge")};
  } else {
    // Roller on the bottom arm, pinned in x at its midpoint.
    c.displacement_bcs = {{"BottomEdge", std::nullopt, Prescribed::fixed(0)}};
    c.point_constraints = {{{L, 0}, Prescribed::fixed(0), std::nullopt}};
  }
  if (variant == "mech") {
    c.displacement_bcs.push_back({"TopEdge", std::nullopt, Prescribed::linear(0, 3.5e-7)});
    c.temperature_bcs = {{"TopEdge", Prescribed::fixed(0)}, {"BottomEdge", Prescribed::fixed(0)}};
    c.load.tMax = 100;
  } else {
    const double dT = variant == "thermal" ? 0.1 : 0.06;
    if (variant == "combined") c.displacement_bcs.push_back({"TopEdge", std::nullopt, Prescribed::linear(0, 1.92e-7)});
    c.temperature_bcs = {{"TopEdge", Prescribed::linear(0, dT)},
                         {"BottomEdge", Prescribed::linear(0, -dT)},
                         {"LeftEdge", Prescribed::fixed(0)},
                         {"RightEdge", Prescribed::fixed(0)}};
    c.load.tMax = 80;
  }
  c.reaction_tag = "TopEdge";
  c.output.dir = "out/cruciform-" + variant;
  return c;
}

// Glass layer on a steel strip, notched from the top, cooled uniformly.
RunConfig bimaterial(double scale) {
  const double ls = 0.3e-3 / scale;
  const double h_fine = ls / 4 / kMm;
  RunConfig c;
  RectSpec g;
  g.width = 150;
  g.height = 30;
  g.h = 1.5 / scale;
  g.refine = RefineBand{{24, 6, 50, 30}, h_fine};
  g.cutouts.push_back({{{29.5, 15}, {30.5, 15}, {30.5, 30}, {29.5, 30}}, "NotchEdge"});
  g.regions.push_back({"Steel", {0, 0, 150, 10}});
  g.default_region = "Glass";
  c.mesh.generator = g;
  c.unit_scale = kMm;

  const double T0 = 300;
  c.materials["Glass"] = make_material(64e9, 0.2, PlanarMode::PlaneStress, 400, ls, {1, 0, 1, 3.25e-6, T0});
  c.materials["Steel"] = make_material(193e9, 0.29, PlanarMode::PlaneStress, 4e6, ls, {1, 0, 1, 193e-6, T0});
  c.point_constraints = {{{0, 0}, Prescribed::fixed(0), Prescribed::fixed(0)}, {{150, 0}, std::nullopt, Prescribed::fixed(0)}};
  c.load.T0 = T0;
  c.load.TAppMax = T0;
  c.load.ramp = RampKind::PrescribedUniform;
  c.load.schedule = {{0, T0}, {1, T0 - 30}};
  c.load.tMax = 1;
  c.load.delt = 1e-2;
  c.output.dir = "out/bimaterial";
  return c;
}

// Quarter of a hot ceramic slab quenched to 300 K on its bottom and right edges.
RunConfig quench(double scale, double T_init) {
  const double ls = 50e-3 / 250 / scale;
  RunConfig c;
  RectSpec g;
  g.width = 50;
  g.height = 4.9;
  g.h = ls / 2 / kMm;
  c.mesh.generator = g;
  c.unit_scale = kMm;

  c.materials["*"] = make_material(32e9, 0.2, PlanarMode::PlaneStress, 3, ls, {300, 2450, 0.775, 8e-6, T_init}, false);
  c.displacement_bcs = {{"RightEdge", Prescribed::fixed(0), std::nullopt}, {"TopEdge", std::nullopt, Prescribed::fixed(0)}};
  c.temperature_bcs = {{"BottomEdge", Prescribed::fixed(300)}, {"RightEdge", Prescribed::fixed(300)}};
  c.load.T0 = T_init;
  c.load.TAppMax = T_init;
  c.load.ramp = RampKind::None;
  c.load.delt = 1e-6;
  c.load.tMax = 100e-6;
  c.initial_temperature = T_init;
  c.output.dir = "out/quench-" + std::to_string(static_cast<int>(T_init));
  return c;
}

}  // namespace

const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names{"cruciform-mech", "cruciform-thermal", "cruciform-combined", "sent",
                                              "bimaterial",     "quench-680",        "quench-880"};
  return names;
}

RunConfig example_config(std::string_view name, double scale) {
  if (!(scale > 0 && scale <= 1)) throw InvalidArgument("scale must lie in (0, 1]");
  if (name == "sent") return sent(scale);
  if (name == "cruciform-mech") return cruciform(scale, "mech");
  if (name == "cruciform-thermal") return cruciform(scale, "thermal");
  if (name == "cruciform-combined") return cruciform(scale, "combined");
  if (name == "bimaterial") return bimaterial(scale);
  if (name == "quench-680") return quench(scale, 680);
  if (name == "quench-880") return quench(scale, 880);
  std::string list;
  for (const auto& n : example_names()) list += (list.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown example '" + std::string(name) + "'; valid names: " + list);
}

Vec2 example_notch_tip(std::string_view name) {
  if (name == "sent") return Vec2(0.5, 0.5) * kMm;
  if (name.substr(0, 9) == "cruciform") return (Vec2(75, 25) + 10 * Vec2(-1, 1).normalized()) * kMm;
  if (name == "bimaterial") return Vec2(30, 15) * kMm;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {nan, nan};
}

}  // namespace thermofrac
