#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "thermofrac/materials.hpp"
#include "thermofrac/mesh.hpp"

namespace thermofrac {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// One scalar per node.
using FEField = Eigen::VectorXd;
/// One scalar per (element, quadrature point); rows are elements.
using QuadPointField = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

// Degree-of-freedom layout. The displacement block numbers dofs 2*node + c,
// the scalar blocks (phase field, temperature) use the node id, and the
// monolithic coupled layout interleaves (u1, u2, T) per node.
constexpr Index displacement_dof(Index node, int component) { return 2 * node + component; }
constexpr Index coupled_dof(Index node, int field) { return 3 * node + field; }

// ---------------------------------------------------------------------------
// Reference element

struct QuadRule {
  std::vector<Eigen::Vector3d> barycentric;
  std::vector<double> weights;  // fractions of the element area, summing to 1
};

/// Degree-2 rule: the three edge midpoints with weight 1/3 each.
const QuadRule& quad_rule(int degree);

struct Tri3Shape {
  Eigen::Matrix<double, 3, 2> grad;  // row i = grad N_i, constant per element
  double area = 0;
  Eigen::Matrix3d n_at_quad;  // (q, i) = N_i at quadrature point q
};

/// Throws InvalidArgument for non-positive area.
Tri3Shape shape_tri3(const Mesh& mesh, Index element);

/// Strain-displacement matrix mapping the 6 element displacement dofs to
/// tensor strain components (xx, yy, xy).
Eigen::Matrix<double, 3, 6> strain_matrix(const Tri3Shape& shape);

SymTensor2<double> element_strain(const Mesh& mesh, const Tri3Shape& shape, Index element, const Vector& u);

// ---------------------------------------------------------------------------
// Materials by region

/// Region id -> material, with the elasticity tensor cached.
class MaterialTable {
 public:
  struct Entry {
    Material material;
    SymTensor4<double> C;
  };

  MaterialTable() = default;
  explicit MaterialTable(const std::map<int, Material>& by_region);

  const Entry& at(int region) const;
  const Entry& for_element(const Mesh& mesh, Index e) const { return at(mesh.element(e).region); }

 private:
  std::map<int, Entry> entries_;
};

// ---------------------------------------------------------------------------
// Linear systems

struct LinearSystem {
  SparseMatrix A;
  Vector b;

  Index size() const { return b.size(); }
};

/// Dirichlet constraint set dof -> value. Adding a different value to an
/// already constrained dof throws InvalidArgument.
class DirichletSet {
 public:
  void add(Index dof, double value);
  const std::map<Index, double>& values() const { return values_; }
  bool contains(Index dof) const { return values_.count(dof) != 0; }
  std::size_t size() const { return values_.size(); }

 private:
  std::map<Index, double> values_;
};

/// Symmetric elimination: b -= A[:,c] v_c, row and column c zeroed (the
/// sparsity pattern is kept), A(c,c) = 1, b(c) = v_c.
void apply_dirichlet(LinearSystem& system, const DirichletSet& constraints);

/// Sparse Cholesky solver that reuses the symbolic analysis while the matrix
/// pattern is unchanged. Throws SolveError on a non-SPD or singular matrix.
class SpdSolver {
 public:
  SpdSolver();
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  Vector solve(const LinearSystem& system);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot SPD solve; the relative residual is checked against 1e-10.
Vector solve(const LinearSystem& system);

/// Sparse LU for the unsymmetric monolithic coupled system.
Vector solve_general(const LinearSystem& system);

// ---------------------------------------------------------------------------
// Phase-field system

/// a(s, phi) = int Gc ls grad s . grad phi + 2 H s phi + (Gc/ls) s phi,
/// b(phi) = int (Gc/ls) phi, with H given at the nodes. The zero-order terms
/// are integrated with the vertex rule (diagonal).
LinearSystem assemble_phase_field(const Mesh& mesh, const MaterialTable& mats, const FEField& H_nodal);

// ---------------------------------------------------------------------------
// Coupled displacement-temperature system

struct CoupledInputs {
  const Vector* u_branch = nullptr;  // displacement of the previous iterate (branch state)
  const FEField* T_branch = nullptr;  // temperature of the previous iterate (branch state)
  const FEField* T_old = nullptr;     // temperature at the start of the time step
  const FEField* s = nullptr;         // current phase field
  double dt = 1;
};

/// Block form of the coupled system
///
///   [ K_uu  K_uT ] [u]   [f_u]
///   [  0    K_TT ] [T] = [f_T]
///
/// K_uu and K_TT are symmetric; the heat equation does not see u, so the
/// system is solved temperature first.
struct CoupledSystem {
  LinearSystem elastic;  // K_uu, f_u (2 dofs per node)
  LinearSystem heat;     // K_TT, f_T (1 dof per node)
  SparseMatrix coupling;  // K_uT
};

CoupledSystem assemble_coupled(const Mesh& mesh, const MaterialTable& mats, const CoupledInputs& in);

/// Interleaved (u1, u2, T) monolithic system assembled from the blocks.
LinearSystem monolithic(const CoupledSystem& blocks);

struct CoupledSolution {
  Vector u;
  FEField T;
};

class CoupledSolver {
 public:
  /// Solves heat then elasticity. When `prescribed_T` is set the heat block
  /// is skipped and that field is used directly.
  CoupledSolution solve(const CoupledSystem& sys, const DirichletSet& u_bc, const DirichletSet& T_bc,
                        const FEField* prescribed_T = nullptr);

 private:
  SpdSolver elastic_;
  SpdSolver heat_;
};

// ---------------------------------------------------------------------------
// Projection and post-processing

/// Continuous P1 L2 projection with the consistent mass matrix (factored once).
class L2Projector {
 public:
  explicit L2Projector(const Mesh& mesh);
  FEField project(const QuadPointField& q) const;

 private:
  const Mesh* mesh_;
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

FEField l2_project(const QuadPointField& q, const Mesh& mesh);

/// Stress at barycentric point `xi` of element `e`.
using StressEvaluator = std::function<SymTensor2<double>(Index e, const Eigen::Vector3d& xi)>;

/// int_Gamma sigma n dGamma over edges tagged `tag` (2-point Gauss per edge).
Vec2 reaction_force(const Mesh& mesh, std::string_view tag, const StressEvaluator& stress);

/// Physical stress C_mod(eps^elas) eps^elas with eps^elas = eps(u) - alpha (T - T0) I.
StressEvaluator physical_stress(const Mesh& mesh, const MaterialTable& mats, const Vector& u, const FEField& s,
                                const FEField& T);

/// psi+ of eps(u) - alpha (T - T0) I at every quadrature point.
QuadPointField psi_plus_field(const Mesh& mesh, const MaterialTable& mats, const Vector& u, const FEField& T);

/// int (k / T) |grad T|^2 dOmega.
double entropy_production(const Mesh& mesh, const MaterialTable& mats, const FEField& s, const FEField& T);

/// int f dOmega for a nodal field.
double integrate(const Mesh& mesh, const FEField& f);

// ---------------------------------------------------------------------------

/// Worker threads for element loops: THERMOFRAC_THREADS, 0 or unset = hardware.
int assembly_threads();

}  // namespace thermofrac
