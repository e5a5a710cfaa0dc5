#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thermofrac/fem.hpp"

namespace thermofrac {

enum class RampKind { Smooth, Linear, PrescribedUniform, None };

struct LoadProgram {
  double uMax = 0;
  double tMax = 1;
  double delt = 1;
  double uTran = 0;
  double TAppMax = 0;
  double T0 = 0;
  RampKind ramp = RampKind::None;
  // (t, T) breakpoints of the uniform temperature history, linear in between.
  std::vector<std::pair<double, double>> schedule;

  double rate() const { return uMax / tMax; }
  double applied_displacement(double t) const { return rate() * t; }
  double applied_temperature(double t) const;
  int num_steps() const;

  bool operator==(const LoadProgram&) const = default;
};

/// Gaussian-mollified step from T0 (below uTran) to TAppMax, width uMax/10.
double ramp_smooth(double u_app, const LoadProgram& prog);
/// T0 + (TAppMax - T0) u / uTran up to uTran, TAppMax afterwards.
double ramp_linear(double u_app, const LoadProgram& prog);
double schedule_value(const std::vector<std::pair<double, double>>& schedule, double t);

void validate(const LoadProgram& prog);

struct StaggeredConfig {
  double tol = 1e-8;
  int inner_max = 10;

  bool operator==(const StaggeredConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Boundary data

/// A prescribed value: constant, base + rate * t, or driven by the load program.
struct Prescribed {
  enum class Kind { Fixed, Rate, Program };
  Kind kind = Kind::Fixed;
  double value = 0;  // fixed value or base for Rate
  double rate = 0;

  static Prescribed fixed(double v) { return {Kind::Fixed, v, 0}; }
  static Prescribed linear(double base, double rate) { return {Kind::Rate, base, rate}; }
  static Prescribed program() { return {Kind::Program, 0, 0}; }

  double at(double t, double program_value) const;
  bool operator==(const Prescribed&) const = default;
};

struct DisplacementBC {
  std::string tag;
  std::optional<Prescribed> ux, uy;
  bool operator==(const DisplacementBC&) const = default;
};

/// Constrains the node nearest to `point`.
struct PointConstraint {
  Vec2 point = Vec2::Zero();
  std::optional<Prescribed> ux, uy;
  bool operator==(const PointConstraint&) const = default;
};

struct TemperatureBC {
  std::string tag;
  Prescribed value;
  bool operator==(const TemperatureBC&) const = default;
};

struct Problem {
  std::shared_ptr<const Mesh> mesh;
  std::map<int, Material> materials;  // region id -> material
  std::vector<DisplacementBC> displacement_bcs;
  std::vector<PointConstraint> point_constraints;
  std::vector<TemperatureBC> temperature_bcs;
  LoadProgram load;
  StaggeredConfig staggered;
  std::string reaction_tag;                  // empty: no reaction force
  std::optional<double> initial_temperature;  // default load.T0
};

// ---------------------------------------------------------------------------

struct SimState {
  Vector u;           // 2 per node
  FEField s;
  FEField T;
  QuadPointField H;
  double t = 0;
  int step = 0;
};

struct RunRecord {
  double t = 0;
  double u_app = 0;
  double T_app = 0;
  Vec2 force = Vec2::Zero();
  int inner_iters = 0;
  double rel_err = 0;
  bool converged = true;
};

/// |s.(A s) - b.s| / |b.s| for the phase-field system built from H_nodal.
double rel_err(const FEField& s, const LinearSystem& pf);
double rel_err(const Mesh& mesh, const FEField& s, const FEField& H_nodal, const MaterialTable& mats);

/// Pointwise max.
QuadPointField update_history(const QuadPointField& H, const QuadPointField& psi_plus_now);

using StepObserver = std::function<void(const SimState&, const RunRecord&)>;

class Simulation {
 public:
  explicit Simulation(Problem problem);

  const Problem& problem() const { return problem_; }
  const Mesh& mesh() const { return *problem_.mesh; }
  const MaterialTable& materials() const { return mats_; }
  const SimState& state() const { return state_; }
  SimState& mutable_state() { return state_; }

  /// Advances one load step through the staggered loop.
  RunRecord step();

  /// All steps; the returned series starts with the zero record.
  std::vector<RunRecord> run(const StepObserver& observer = {});

  DirichletSet displacement_constraints(double t) const;
  DirichletSet temperature_constraints(double t) const;

  /// Hook for tests: forces H at every quadrature point before each
  /// phase-field solve.
  void set_history_override(std::optional<QuadPointField> H) { history_override_ = std::move(H); }

 private:
  Problem problem_;
  MaterialTable mats_;
  SimState state_;
  L2Projector projector_;
  SpdSolver pf_solver_;
  CoupledSolver coupled_solver_;
  std::optional<QuadPointField> history_override_;
};

}  // namespace thermofrac
