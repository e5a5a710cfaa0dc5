// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thermofrac/benchmarks.hpp"
#include "thermofrac/config.hpp"
#include "thermofrac/postprocess.hpp"
#include "thermofrac/solver.hpp"

using namespace thermofrac;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, double runtime_limit, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (runtime_limit > 0 && secs > runtime_limit) {
    r.pass = false;
    r.detail += "; runtime limit exceeded";
  }
  if (!r.pass) ++failures;
  std::printf("%s  %2d  %s: %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", id, title.c_str(), r.detail.c_str(), secs);
  std::fflush(stdout);
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Material unit_material() {
  Material m;
  m.elastic = {1000, 0.25, PlanarMode::PlaneStrain};
  m.thermal = {1, 1, 1, 0, 0};
  m.fracture = {1, 1, 1e-8};
  return m;
}

MaterialTable table_for(const Mesh& mesh, const Material& m) {
  std::map<int, Material> by;
  for (const auto& [name, id] : mesh.region_tags()) by[id] = m;
  return MaterialTable(by);
}

// Bounds and irreversibility watched over every step of a benchmark run.
struct StepAudit {
  std::string name;
  QuadPointField prev_H;
  int steps = 0;
  int h_violations = 0;
  int s_violations = 0;
  int err_violations = 0;
  double s_min = 1, s_max = 1;

  void operator()(const SimState& st, const RunRecord& rec) {
    if (prev_H.size() != 0 && !(st.H.array() >= prev_H.array()).all()) ++h_violations;
    prev_H = st.H;
    if (st.step == 0) return;
    ++steps;
    s_min = std::min(s_min, st.s.minCoeff());
    s_max = std::max(s_max, st.s.maxCoeff());
    if (st.s.minCoeff() < -1e-6 || st.s.maxCoeff() > 1 + 1e-6) ++s_violations;
    if (rec.converged && !(rec.rel_err <= 1e-8)) ++err_violations;
  }

  bool ok() const { return steps > 0 && h_violations + s_violations + err_violations == 0; }
  std::string summary() const {
    return fmt("%s %d steps, s in [%.3g, %.6g], H drops %d, RelErr misses %d", name.c_str(), steps, s_min, s_max,
               h_violations, err_violations);
  }
};

std::vector<StepAudit> audits;

// ---------------------------------------------------------------------------

Outcome optimal_profile() {
  const double ls = 1;
  RectSpec g;
  g.width = 10 * ls;
  g.height = ls;
  g.h = ls / 8;
  const Mesh mesh = generate_rect(g);
  Material m = unit_material();
  m.fracture = {1, ls, 1e-8};
  const MaterialTable mats = table_for(mesh, m);
  LinearSystem sys = assemble_phase_field(mesh, mats, FEField::Zero(mesh.num_nodes()));
  const double xm = 5 * ls;
  DirichletSet bc;
  for (Index i = 0; i < mesh.num_nodes(); ++i)
    if (std::abs(mesh.node(i).x() - xm) < 1e-9 * ls) bc.add(i, 0);
  if (bc.size() == 0) return {false, "no nodes on the midline"};
  apply_dirichlet(sys, bc);
  const FEField s = solve(sys);
  double err = 0;
  for (Index i = 0; i < mesh.num_nodes(); ++i) {
    const double d = std::abs(mesh.node(i).x() - xm);
    err = std::max(err, std::abs(s(i) - (1 - std::exp(-d / ls))));
  }
  return {err <= 0.02, fmt("L_inf error %.3e (limit 2e-2), %zu clamped nodes", err, bc.size())};
}

Outcome homogeneous_damage() {
  RectSpec g;
  g.width = 2;
  g.height = 1;
  g.h = 0.1;
  g.refine = RefineBand{{0.8, 0, 1.2, 1}, 0.025};
  const Mesh mesh = generate_rect(g);
  const Material m = unit_material();
  const MaterialTable mats = table_for(mesh, m);
  const double Gc = m.fracture.Gc, ls = m.fracture.ls;
  double worst = 0;
  for (double ratio : {0.5, 1.0, 4.0}) {
    const double H0 = ratio * Gc / (2 * ls);
    const FEField s = solve(assemble_phase_field(mesh, mats, FEField::Constant(mesh.num_nodes(), H0)));
    const double exact = Gc / (Gc + 2 * ls * H0);
    worst = std::max(worst, (s.array() - exact).abs().maxCoeff());
  }
  return {worst <= 1e-8, fmt("max nodal deviation %.3e (limit 1e-8)", worst)};
}

Outcome patch_test() {
  RectSpec g;
  g.width = 2;
  g.height = 1;
  g.h = 0.1;
  g.refine = RefineBand{{0.7, 0.3, 1.3, 0.7}, 0.03};
  const Mesh mesh = generate_rect(g);
  Material m = unit_material();
  m.fracture.eta = 1e-14;
  m.thermal = {1, 1, 1, 1e-5, 20};
  const MaterialTable mats = table_for(mesh, m);
  const Eigen::Vector3d eps(1e-3, -4e-4, 3e-4);  // xx, yy, xy
  auto affine = [&](const Vec2& p) { return Vec2(eps(0) * p.x() + eps(2) * p.y(), eps(2) * p.x() + eps(1) * p.y()); };

  const Index nn = mesh.num_nodes();
  const Vector u0 = Vector::Zero(2 * nn);
  const FEField T = FEField::Constant(nn, m.thermal.T0);
  const FEField s = FEField::Ones(nn);
  const CoupledSystem sys = assemble_coupled(mesh, mats, {&u0, &T, &T, &s, 1.0});
  DirichletSet u_bc, T_bc;
  std::vector<bool> on_boundary(static_cast<std::size_t>(nn), false);
  for (const auto& e : mesh.boundary_edges())
    for (Index n : e.nodes) on_boundary[static_cast<std::size_t>(n)] = true;
  for (Index n = 0; n < nn; ++n) {
    T_bc.add(n, m.thermal.T0);
    if (!on_boundary[static_cast<std::size_t>(n)]) continue;
    const Vec2 v = affine(mesh.node(n));
    u_bc.add(displacement_dof(n, 0), v.x());
    u_bc.add(displacement_dof(n, 1), v.y());
  }
  CoupledSolver solver;
  const CoupledSolution sol = solver.solve(sys, u_bc, T_bc);
  double err = 0, scale = 0;
  for (Index n = 0; n < nn; ++n) {
    const Vec2 v = affine(mesh.node(n));
    scale = std::max(scale, v.norm());
    err = std::max(err, (sol.u.segment<2>(2 * n) - v).norm());
  }
  const double u_rel = err / scale;

  const Vec2 F = reaction_force(mesh, "TopEdge", physical_stress(mesh, mats, sol.u, s, sol.T));
  const Eigen::Vector3d sigma = elastic_tensor(m.elastic).apply(eps);
  const Vec2 F_ref = Vec2(sigma(2), sigma(1)) * g.width;
  const double f_rel = (F - F_ref).norm() / F_ref.norm();
  return {u_rel <= 1e-10 && f_rel <= 1e-8,
          fmt("displacement error %.2e (limit 1e-10), reaction error %.2e (limit 1e-8)", u_rel, f_rel)};
}

Outcome free_expansion() {
  RunConfig c;
  RectSpec g;
  g.width = 1;
  g.height = 1;
  g.h = 0.05;
  g.refine = RefineBand{{0.3, 0.3, 0.6, 0.6}, 0.02};
  c.mesh.generator = g;
  const double T0 = 300, dT = 50, alpha = 8e-6, E = 340e9;
  Material m;
  m.elastic = {E, 0.22, PlanarMode::PlaneStrain};
  m.thermal = {300, 2450, 0.775, alpha, T0};
  m.fracture = {42.47, 0.05, 1e-8};
  c.materials["*"] = m;
  c.point_constraints = {{{0, 0}, Prescribed::fixed(0), Prescribed::fixed(0)}, {{1, 0}, std::nullopt, Prescribed::fixed(0)}};
  c.load.T0 = T0;
  c.load.TAppMax = T0;
  c.load.ramp = RampKind::PrescribedUniform;
  c.load.schedule = {{0, T0 + dT}, {1, T0 + dT}};
  c.load.delt = 1;
  c.load.tMax = 1;
  Simulation sim(build_problem(c));
  sim.run();
  const auto& st = sim.state();
  const Mesh& mesh = sim.mesh();
  const StressEvaluator sigma = physical_stress(mesh, sim.materials(), st.u, st.s, st.T);
  const Eigen::Vector3d expected(alpha * dT, alpha * dT, 0);
  double smax = 0, eerr = 0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    smax = std::max(smax, sigma(e, Eigen::Vector3d::Constant(1.0 / 3)).cwiseAbs().maxCoeff());
    const Tri3Shape sh = shape_tri3(mesh, e);
    eerr = std::max(eerr, (element_strain(mesh, sh, e, st.u) - expected).cwiseAbs().maxCoeff());
  }
  const double s_rel = smax / (E * alpha * dT);
  const double e_rel = eerr / (alpha * dT);
  return {s_rel <= 1e-8 && e_rel <= 1e-8,
          fmt("max |sigma| / (E alpha dT) = %.2e, strain error %.2e (limits 1e-8)", s_rel, e_rel)};
}

// T(x, t) for a bar held at T_cold at x = 0, insulated at x = L, initially T_hot.
double bar_series(double x, double t, double L, double kappa, double T_hot, double T_cold) {
  double sum = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = 2 * k + 1;
    const double w = n * std::numbers::pi / (2 * L);
    sum += 4 / (n * std::numbers::pi) * std::sin(w * x) * std::exp(-w * w * kappa * t);
  }
  return T_cold + (T_hot - T_cold) * sum;
}

Outcome transient_heat() {
  const double L = 0.1, k0 = 2, rho = 1000, cap = 500, T_hot = 400, T_cold = 300;
  RunConfig c;
  RectSpec g;
  g.width = L;
  g.height = 2 * L / 100;
  g.h = L / 100;
  c.mesh.generator = g;
  Material m;
  m.elastic = {1e9, 0.2, PlanarMode::PlaneStress};
  m.thermal = {k0, rho, cap, 0, T_cold};
  m.fracture = {1, L, 1e-8};
  m.degrade_conductivity = false;
  c.materials["*"] = m;
  c.displacement_bcs = {{"LeftEdge", Prescribed::fixed(0), Prescribed::fixed(0)}};
  c.temperature_bcs = {{"LeftEdge", Prescribed::fixed(T_cold)}};
  c.initial_temperature = T_hot;
  c.load.T0 = T_cold;
  c.load.TAppMax = T_cold;
  c.load.delt = 1e-3 * rho * cap * L * L / k0;
  c.load.tMax = 500 * c.load.delt;
  const double kappa = k0 / (rho * cap);
  const std::vector<int> checkpoints{10, 50, 200, 500};
  double worst = 0;
  std::string per_step;
  Simulation sim(build_problem(c));
  sim.run([&](const SimState& st, const RunRecord&) {
    if (std::find(checkpoints.begin(), checkpoints.end(), st.step) == checkpoints.end()) return;
    double err = 0;
    for (Index i = 0; i < sim.mesh().num_nodes(); ++i) {
      const double ref = bar_series(sim.mesh().node(i).x(), st.t, L, kappa, T_hot, T_cold);
      err = std::max(err, std::abs(st.T(i) - ref) / (T_hot - T_cold));
    }
    per_step += fmt("%s%d: %.2e", per_step.empty() ? "" : ", ", st.step, err);
    worst = std::max(worst, err);
  });
  return {worst <= 0.01, fmt("L_inf error %.3e of the temperature drop (limit 1e-2); by step %s", worst, per_step.c_str())};
}

struct SentRun {
  double dT;
  double peak_u;
  double peak_F;
  double final_F;
};

Outcome sent_ordering() {
  std::vector<SentRun> runs;
  std::string detail;
  bool ok = true;
  for (double dT : {-75.0, 0.0, 75.0}) {
    RunConfig c = example_config("sent", 0.25);
    c.load.TAppMax = c.load.T0 + dT;
    StepAudit audit{fmt("sent dT=%+g:", dT)};
    Simulation sim(build_problem(c));
    const auto rec = sim.run(std::ref(audit));
    audits.push_back(audit);
    const auto& peak = rec[peak_record(rec)];
    runs.push_back({dT, peak.u_app, peak.force.y(), rec.back().force.y()});
    detail += fmt("dT=%+g peak at u=%.4g um; ", dT, peak.u_app * 1e6);
  }
  for (std::size_t i = 1; i < runs.size(); ++i) ok = ok && runs[i].peak_u > runs[i - 1].peak_u;
  return {ok, detail + "strictly increasing required"};
}

Outcome cruciform_direction() {
  const double scale = 0.25;
  const Vec2 tip = example_notch_tip("cruciform-mech");
  std::string detail;

  RunConfig mech = example_config("cruciform-mech", scale);
  StepAudit am{"cruciform-mech:"};
  Simulation sm(build_problem(mech));
  sm.run(std::ref(am));
  audits.push_back(am);
  const auto cm = damage_centroid(sm.mesh(), sm.state().s, 0.2);
  bool ok_mech = false;
  if (cm) {
    const Vec2 d = *cm - tip;
    const double angle = std::atan2(std::abs(d.y()), std::abs(d.x())) * 180 / std::numbers::pi;
    ok_mech = angle <= 15;
    detail += fmt("mechanical: offset (%.2f, %.2f) mm, %.1f deg from horizontal; ", d.x() * 1e3, d.y() * 1e3, angle);
  } else {
    detail += "mechanical: no damage; ";
  }

  RunConfig thermal = example_config("cruciform-thermal", scale);
  const double ls = thermal.materials.at("*").fracture.ls;
  StepAudit at{"cruciform-thermal:"};
  Simulation st(build_problem(thermal));
  std::optional<Vec2> initial;
  int initial_step = 0;
  st.run([&](const SimState& state, const RunRecord& rec) {
    at(state, rec);
    if (initial || damage_extent(st.mesh(), state.s, 0.2, tip) < 2 * ls) return;
    initial = damage_centroid(st.mesh(), state.s, 0.2);
    initial_step = state.step;
  });
  audits.push_back(at);
  bool ok_thermal = false;
  if (initial) {
    const Vec2 d = *initial - tip;
    ok_thermal = d.y() > 0;
    detail += fmt("thermal: offset (%.2f, %.2f) mm at step %d", d.x() * 1e3, d.y() * 1e3, initial_step);
  } else {
    detail += "thermal: damage never reached 2 ls";
  }
  return {ok_mech && ok_thermal, detail};
}

Outcome quench_trend() {
  const double scale = 0.25;
  CrackBands bands[2];
  const char* names[2] = {"quench-680", "quench-880"};
  for (int i = 0; i < 2; ++i) {
    RunConfig c = example_config(names[i], scale);
    const double ls = c.materials.at("*").fracture.ls;
    StepAudit audit{std::string(names[i]) + ":"};
    Simulation sim(build_problem(c));
    sim.run(std::ref(audit));
    audits.push_back(audit);
    const Box bb = sim.mesh().bounding_box();
    bands[i] = crack_bands(sim.mesh(), sim.state().s, bb.y0, bb.y0 + ls, 0.5 * (bb.y0 + bb.y1), 0.05);
  }
  const bool ok = bands[1].count >= bands[0].count && bands[1].mean_depth >= bands[0].mean_depth && bands[0].count > 0;
  return {ok, fmt("680 K: %d bands, mean depth %.3f mm; 880 K: %d bands, mean depth %.3f mm", bands[0].count,
                  bands[0].mean_depth * 1e3, bands[1].count, bands[1].mean_depth * 1e3)};
}

Outcome irreversibility() {
  {
    RunConfig c = example_config("bimaterial", 0.25);
    c.load.tMax = 0.2;
    StepAudit audit{"bimaterial (20 steps):"};
    Simulation sim(build_problem(c));
    sim.run(std::ref(audit));
    audits.push_back(audit);
  }
  bool ok = !audits.empty();
  std::string detail;
  for (const auto& a : audits) {
    ok = ok && a.ok();
    detail += a.summary() + "; ";
  }
  return {ok, detail};
}

Outcome stress_identity() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u01(0, 1);
  auto range = [&](double a, double b) { return a + (b - a) * u01(rng); };
  double worst = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    Material m;
    m.elastic = {range(1e3, 1e11), range(-0.5, 0.45), trial % 2 ? PlanarMode::PlaneStress : PlanarMode::PlaneStrain};
    m.thermal = {1, 1, 1, range(1e-6, 1e-3), range(0, 900)};
    m.fracture = {1, 1, range(1e-10, 1e-3)};
    const auto C = elastic_tensor(m.elastic);
    const SymTensor2<double> eps(range(-1e-2, 1e-2), range(-1e-2, 1e-2), range(-1e-2, 1e-2));
    const SymTensor2<double> prev(range(-1e-2, 1e-2), range(-1e-2, 1e-2), range(-1e-2, 1e-2));
    const double s = u01(rng), T = range(0, 1200), T_prev = range(0, 1200);
    const SymTensor2<double> sigma_T = stress_total(eps, prev, s, T, T_prev, m, C);
    const SymTensor2<double> sigma_F = -stress_thermal(prev, s, T_prev, m, C);
    const SymTensor2<double> sigma =
        stress(elastic_strain(eps, T, m.thermal), elastic_strain(prev, T_prev, m.thermal), s, C, m.fracture.eta);
    const double denom = std::max({sigma_T.norm(), sigma_F.norm(), sigma.norm()});
    worst = std::max(worst, (sigma_T + sigma_F - sigma).norm() / denom);
  }
  return {worst <= 1e-12, fmt("2000 random states, max relative mismatch %.2e (limit 1e-12)", worst)};
}

}  // namespace

int main() {
  report(1, "optimal 1D phase-field profile", 5, optimal_profile);
  report(2, "homogeneous damage", 1, homogeneous_damage);
  report(3, "patch test", 0, patch_test);
  report(4, "free thermal expansion", 0, free_expansion);
  report(5, "transient heat conduction", 30, transient_heat);
  report(10, "total/thermal stress consistency", 0, stress_identity);
  report(6, "SENT peak displacement ordering in dT", 600, sent_ordering);
  report(7, "cruciform crack direction", 0, cruciform_direction);
  report(8, "quenching crack density", 900, quench_trend);
  report(9, "irreversibility and bounds", 0, irreversibility);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
