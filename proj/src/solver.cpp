#include "thermofrac/solver.hpp"

#include <algorithm>
#include <cmath>

#include "thermofrac/error.hpp"

namespace thermofrac {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double ramp_smooth(double u_app, const LoadProgram& p) {
  const double hS = p.uMax / 10;
  if (!(hS > 0)) return p.TAppMax;
  // Indicator of [-4 hS, uTran] convolved with a Gaussian of width hS.
  const double lo = -4 * hS;
  const double hi = std::min(p.uTran, p.uMax);
  const double mass = normal_cdf((hi - u_app) / hS) - normal_cdf((lo - u_app) / hS);
  return p.TAppMax + (p.T0 - p.TAppMax) * mass;
}

double ramp_linear(double u_app, const LoadProgram& p) {
  if (u_app <= p.uTran && p.uTran > 0) return (p.TAppMax - p.T0) / p.uTran * u_app + p.T0;
  if (p.uTran <= 0 && u_app <= 0) return p.T0;
  return p.TAppMax;
}

double schedule_value(const std::vector<std::pair<double, double>>& schedule, double t) {
  if (schedule.empty()) throw InvalidArgument("temperature schedule is empty");
  if (t <= schedule.front().first) return schedule.front().second;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const auto& [t1, T1] = schedule[i];
    if (t <= t1) {
      const auto& [t0, T0] = schedule[i - 1];
      return t1 > t0 ? T0 + (T1 - T0) * (t - t0) / (t1 - t0) : T1;
    }
  }
  return schedule.back().second;
}

double LoadProgram::applied_temperature(double t) const {
  switch (ramp) {
    case RampKind::Smooth: return ramp_smooth(applied_displacement(t), *this);
    case RampKind::Linear: return ramp_linear(applied_displacement(t), *this);
    case RampKind::PrescribedUniform: return schedule_value(schedule, t);
    case RampKind::None: break;
  }
  return T0;
}

int LoadProgram::num_steps() const { return static_cast<int>(std::floor(tMax / delt * (1 + 1e-12))); }

void validate(const LoadProgram& p) {
  if (!(p.tMax > 0)) throw InvalidArgument("load.tMax must be > 0");
  if (!(p.delt > 0) || p.delt > p.tMax * (1 + 1e-12)) throw InvalidArgument("load.delt must lie in (0, tMax]");
  if (!std::isfinite(p.uMax)) throw InvalidArgument("load.uMax must be finite");
  if (p.ramp == RampKind::Smooth || p.ramp == RampKind::Linear) {
    if (!(p.uTran >= 0) || p.uTran > std::abs(p.uMax) * (1 + 1e-12))
      throw InvalidArgument("load.uTran must lie in [0, uMax]");
  }
  if (p.ramp == RampKind::PrescribedUniform) {
    if (p.schedule.empty()) throw InvalidArgument("load.schedule is required for prescribed_uniform");
    for (std::size_t i = 1; i < p.schedule.size(); ++i)
      if (p.schedule[i].first < p.schedule[i - 1].first) throw InvalidArgument("load.schedule times must be sorted");
  }
}

double Prescribed::at(double t, double program_value) const {
  switch (kind) {
    case Kind::Fixed: return value;
    case Kind::Rate: return value + rate * t;
    case Kind::Program: return program_value;
  }
  return value;
}

// ---------------------------------------------------------------------------

double rel_err(const FEField& s, const LinearSystem& pf) {
  const double bs = pf.b.dot(s);
  if (bs == 0) throw SolveError("rel_err: zero denominator (phase field vanishes)");
  return std::abs(s.dot(pf.A * s) - bs) / std::abs(bs);
}

double rel_err(const Mesh& mesh, const FEField& s, const FEField& H_nodal, const MaterialTable& mats) {
  return rel_err(s, assemble_phase_field(mesh, mats, H_nodal));
}

QuadPointField update_history(const QuadPointField& H, const QuadPointField& psi) {
  if (H.rows() != psi.rows()) throw InvalidArgument("update_history: size mismatch");
  return H.cwiseMax(psi);
}

// ---------------------------------------------------------------------------

Simulation::Simulation(Problem problem)
    : problem_(std::move(problem)),
      projector_(problem_.mesh ? *problem_.mesh : throw InvalidArgument("problem has no mesh")) {
  const Mesh& m = *problem_.mesh;
  validate(problem_.load);
  if (!(problem_.staggered.tol > 0)) throw InvalidArgument("staggered.tol must be > 0");
  if (problem_.staggered.inner_max < 1) throw InvalidArgument("staggered.inner_max must be >= 1");
  mats_ = MaterialTable(problem_.materials);
  for (Index e = 0; e < m.num_elements(); ++e) mats_.for_element(m, e);
  for (const auto& bc : problem_.displacement_bcs) m.boundary_tag(bc.tag);
  for (const auto& bc : problem_.temperature_bcs) m.boundary_tag(bc.tag);
  if (!problem_.reaction_tag.empty()) m.boundary_tag(problem_.reaction_tag);

  state_.u = Vector::Zero(2 * m.num_nodes());
  state_.s = FEField::Ones(m.num_nodes());
  state_.T = FEField::Constant(m.num_nodes(), problem_.initial_temperature.value_or(problem_.load.T0));
  state_.H = QuadPointField::Zero(m.num_elements(), 3);
  // Surface the constraint errors (conflicts, bad tags) before stepping.
  displacement_constraints(0);
  temperature_constraints(0);
}

DirichletSet Simulation::displacement_constraints(double t) const {
  const Mesh& m = mesh();
  const double program = problem_.load.applied_displacement(t);
  DirichletSet set;
  auto add = [&](Index node, const std::optional<Prescribed>& ux, const std::optional<Prescribed>& uy) {
    if (ux) set.add(displacement_dof(node, 0), ux->at(t, program));
    if (uy) set.add(displacement_dof(node, 1), uy->at(t, program));
  };
  for (const auto& bc : problem_.displacement_bcs)
    for (Index n : boundary_nodes(m, bc.tag)) add(n, bc.ux, bc.uy);
  for (const auto& pc : problem_.point_constraints) add(m.nearest_node(pc.point), pc.ux, pc.uy);
  return set;
}

DirichletSet Simulation::temperature_constraints(double t) const {
  const double program = problem_.load.applied_temperature(t);
  DirichletSet set;
  for (const auto& bc : problem_.temperature_bcs)
    for (Index n : boundary_nodes(mesh(), bc.tag)) set.add(n, bc.value.at(t, program));
  return set;
}

RunRecord Simulation::step() {
  const Mesh& m = mesh();
  const auto& load = problem_.load;
  const auto& cfg = problem_.staggered;
  SimState& st = state_;

  st.step += 1;
  st.t = st.step * load.delt;
  RunRecord rec;
  rec.t = st.t;
  rec.u_app = load.applied_displacement(st.t);
  rec.T_app = load.applied_temperature(st.t);

  const DirichletSet u_bc = displacement_constraints(st.t);
  const DirichletSet T_bc = temperature_constraints(st.t);
  const bool uniform_T = load.ramp == RampKind::PrescribedUniform;
  const FEField T_uniform = FEField::Constant(m.num_nodes(), rec.T_app);
  const FEField T_n = st.T;

  rec.converged = false;
  for (int inner = 1; inner <= cfg.inner_max; ++inner) {
    if (history_override_) st.H = *history_override_;
    FEField H_nodal = projector_.project(st.H).cwiseMax(0.0);
    const LinearSystem pf = assemble_phase_field(m, mats_, H_nodal);
    rec.rel_err = rel_err(st.s, pf);
    rec.inner_iters = inner;
    st.s = pf_solver_.solve(pf);

    CoupledInputs in;
    in.u_branch = &st.u;
    in.T_branch = &st.T;
    in.T_old = &T_n;
    in.s = &st.s;
    in.dt = load.delt;
    const CoupledSystem sys = assemble_coupled(m, mats_, in);
    CoupledSolution sol = coupled_solver_.solve(sys, u_bc, T_bc, uniform_T ? &T_uniform : nullptr);
    st.u = std::move(sol.u);
    st.T = std::move(sol.T);

    st.H = update_history(st.H, psi_plus_field(m, mats_, st.u, st.T));
    if (rec.rel_err < cfg.tol) {
      rec.converged = true;
      break;
    }
  }

  if (!problem_.reaction_tag.empty())
    rec.force = reaction_force(m, problem_.reaction_tag, physical_stress(m, mats_, st.u, st.s, st.T));
  return rec;
}

std::vector<RunRecord> Simulation::run(const StepObserver& observer) {
  std::vector<RunRecord> records{RunRecord{}};
  records.front().T_app = problem_.load.applied_temperature(0);
  const int n = problem_.load.num_steps();
  for (int i = 0; i < n; ++i) {
    RunRecord rec;
    try {
      rec = step();
    } catch (const SolveError& e) {
      throw SolveError("step " + std::to_string(state_.step) + ": " + e.what());
    }
    records.push_back(rec);
    if (observer) observer(state_, rec);
  }
  return records;
}

}  // namespace thermofrac
