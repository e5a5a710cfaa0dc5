#include "thermofrac/fem.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "parallel.hpp"
#include "thermofrac/error.hpp"

namespace thermofrac {

const QuadRule& quad_rule(int degree) {
  static const QuadRule midpoint{
      {Eigen::Vector3d(0.5, 0.5, 0.0), Eigen::Vector3d(0.0, 0.5, 0.5), Eigen::Vector3d(0.5, 0.0, 0.5)},
      {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  if (degree < 0 || degree > 2) throw InvalidArgument("quad_rule: unsupported degree " + std::to_string(degree));
  return midpoint;
}

Tri3Shape shape_tri3(const Mesh& mesh, Index element) {
  const auto& v = mesh.element(element).nodes;
  const Vec2& p0 = mesh.node(v[0]);
  const Vec2& p1 = mesh.node(v[1]);
  const Vec2& p2 = mesh.node(v[2]);
  const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
  if (!(det > 0)) throw InvalidArgument("shape_tri3: element " + std::to_string(element) + " has non-positive area");
  Tri3Shape s;
  s.area = 0.5 * det;
  s.grad << p1.y() - p2.y(), p2.x() - p1.x(),  //
      p2.y() - p0.y(), p0.x() - p2.x(),         //
      p0.y() - p1.y(), p1.x() - p0.x();
  s.grad /= det;
  const auto& rule = quad_rule(2);
  for (int q = 0; q < 3; ++q) s.n_at_quad.row(q) = rule.barycentric[static_cast<std::size_t>(q)].transpose();
  return s;
}

Eigen::Matrix<double, 3, 6> strain_matrix(const Tri3Shape& shape) {
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    const double dx = shape.grad(i, 0), dy = shape.grad(i, 1);
    B(0, 2 * i) = dx;
    B(1, 2 * i + 1) = dy;
    B(2, 2 * i) = 0.5 * dy;
    B(2, 2 * i + 1) = 0.5 * dx;
  }
  return B;
}

SymTensor2<double> element_strain(const Mesh& mesh, const Tri3Shape& shape, Index element, const Vector& u) {
  const auto& v = mesh.element(element).nodes;
  Eigen::Matrix<double, 6, 1> ue;
  for (int i = 0; i < 3; ++i) {
    ue(2 * i) = u(displacement_dof(v[static_cast<std::size_t>(i)], 0));
    ue(2 * i + 1) = u(displacement_dof(v[static_cast<std::size_t>(i)], 1));
  }
  return strain_matrix(shape) * ue;
}

MaterialTable::MaterialTable(const std::map<int, Material>& by_region) {
  for (const auto& [region, m] : by_region) {
    validate(m);
    entries_.emplace(region, Entry{m, elastic_tensor<double>(m.elastic)});
  }
}

const MaterialTable::Entry& MaterialTable::at(int region) const {
  auto it = entries_.find(region);
  if (it == entries_.end()) throw InvalidArgument("no material assigned to region " + std::to_string(region));
  return it->second;
}

// ---------------------------------------------------------------------------

void DirichletSet::add(Index dof, double value) {
  if (dof < 0) throw InvalidArgument("DirichletSet: negative dof");
  if (!std::isfinite(value)) throw InvalidArgument("DirichletSet: non-finite value for dof " + std::to_string(dof));
  auto [it, inserted] = values_.emplace(dof, value);
  if (!inserted) {
    const double scale = std::max({std::abs(it->second), std::abs(value), 1e-300});
    if (std::abs(it->second - value) > 1e-12 * scale)
      throw InvalidArgument("DirichletSet: conflicting values " + std::to_string(it->second) + " and " +
                            std::to_string(value) + " for dof " + std::to_string(dof));
  }
}

void apply_dirichlet(LinearSystem& system, const DirichletSet& constraints) {
  auto& A = system.A;
  const Index n = A.rows();
  if (A.cols() != n || system.b.size() != n) throw InvalidArgument("apply_dirichlet: size mismatch");
  if (constraints.size() == 0) return;
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  Vector x = Vector::Zero(n);
  for (const auto& [dof, value] : constraints.values()) {
    if (dof >= n) throw InvalidArgument("apply_dirichlet: dof " + std::to_string(dof) + " out of range");
    fixed[static_cast<std::size_t>(dof)] = 1;
    x(dof) = value;
  }
  A.makeCompressed();
  system.b -= A * x;
  for (Index c = 0; c < A.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) {
      const bool row_fixed = fixed[static_cast<std::size_t>(it.row())];
      const bool col_fixed = fixed[static_cast<std::size_t>(it.col())];
      if (row_fixed || col_fixed) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    }
  }
  for (const auto& [dof, value] : constraints.values()) {
    if (A.coeff(dof, dof) != 1.0) A.coeffRef(dof, dof) = 1.0;
    system.b(dof) = value;
  }
}

// ---------------------------------------------------------------------------

namespace {

void check_residual(const LinearSystem& s, const Vector& x) {
  if (!x.allFinite()) throw SolveError("linear solve produced non-finite values");
  const double bn = s.b.norm();
  const double r = (s.A * x - s.b).norm();
  const double rel = bn > 0 ? r / bn : r;
  if (rel > 1e-10) throw SolveError("linear solve residual " + std::to_string(rel) + " exceeds 1e-10");
}

}  // namespace

struct SpdSolver::Impl {
  Eigen::SimplicialLLT<SparseMatrix> llt;
  std::vector<SparseMatrix::StorageIndex> outer, inner;
  bool analyzed = false;

  bool same_pattern(const SparseMatrix& A) const {
    if (!analyzed || static_cast<Index>(outer.size()) != A.outerSize() + 1) return false;
    if (static_cast<Index>(inner.size()) != A.nonZeros()) return false;
    return std::equal(outer.begin(), outer.end(), A.outerIndexPtr()) &&
           std::equal(inner.begin(), inner.end(), A.innerIndexPtr());
  }
};

SpdSolver::SpdSolver() : impl_(std::make_unique<Impl>()) {}
SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

Vector SpdSolver::solve(const LinearSystem& system) {
  SparseMatrix A = system.A;
  A.makeCompressed();
  if (A.rows() != A.cols() || A.rows() != system.b.size()) throw InvalidArgument("solve: size mismatch");
  if (A.rows() == 0) return Vector();
  for (Index i = 0; i < A.rows(); ++i)
    if (!(A.coeff(i, i) > 0)) throw SolveError("solve: non-positive diagonal at row " + std::to_string(i));
  auto& d = *impl_;
  if (!d.same_pattern(A)) {
    d.llt.analyzePattern(A);
    d.outer.assign(A.outerIndexPtr(), A.outerIndexPtr() + A.outerSize() + 1);
    d.inner.assign(A.innerIndexPtr(), A.innerIndexPtr() + A.nonZeros());
    d.analyzed = true;
  }
  d.llt.factorize(A);
  if (d.llt.info() != Eigen::Success) throw SolveError("solve: matrix is not symmetric positive definite");
  Vector x = d.llt.solve(system.b);
  const LinearSystem compressed{A, system.b};
  // One refinement sweep before the residual check.
  const Vector r = system.b - A * x;
  x += d.llt.solve(r);
  check_residual(compressed, x);
  return x;
}

Vector solve(const LinearSystem& system) {
  SpdSolver s;
  return s.solve(system);
}

Vector solve_general(const LinearSystem& system) {
  SparseMatrix A = system.A;
  A.makeCompressed();
  if (A.rows() != A.cols() || A.rows() != system.b.size()) throw InvalidArgument("solve_general: size mismatch");
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolveError("solve_general: factorization failed: " + lu.lastErrorMessage());
  Vector x = lu.solve(system.b);
  const Vector r = system.b - A * x;
  x += lu.solve(r);
  check_residual({A, system.b}, x);
  return x;
}

// ---------------------------------------------------------------------------

struct L2Projector::Impl {
  Eigen::SimplicialLLT<SparseMatrix> llt;
};

L2Projector::L2Projector(const Mesh& mesh) : mesh_(&mesh), impl_(std::make_shared<Impl>()) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(9 * mesh.num_elements()));
  const auto& rule = quad_rule(2);
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const double area = mesh.element_area(e);
    Eigen::Matrix3d Me = Eigen::Matrix3d::Zero();
    for (std::size_t q = 0; q < rule.weights.size(); ++q)
      Me += rule.weights[q] * area * rule.barycentric[q] * rule.barycentric[q].transpose();
    const auto& v = mesh.element(e).nodes;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)], Me(i, j));
  }
  SparseMatrix M(mesh.num_nodes(), mesh.num_nodes());
  M.setFromTriplets(trip.begin(), trip.end());
  impl_->llt.compute(M);
  if (impl_->llt.info() != Eigen::Success) throw SolveError("L2Projector: mass matrix factorization failed");
}

FEField L2Projector::project(const QuadPointField& q) const {
  const Mesh& mesh = *mesh_;
  if (q.rows() != mesh.num_elements()) throw InvalidArgument("l2_project: quadrature field size mismatch");
  const auto& rule = quad_rule(2);
  Vector rhs = Vector::Zero(mesh.num_nodes());
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const double area = mesh.element_area(e);
    Eigen::Vector3d be = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < rule.weights.size(); ++k)
      be += rule.weights[k] * area * q(e, static_cast<Index>(k)) * rule.barycentric[k];
    const auto& v = mesh.element(e).nodes;
    for (int i = 0; i < 3; ++i) rhs(v[static_cast<std::size_t>(i)]) += be(i);
  }
  return impl_->llt.solve(rhs);
}

FEField l2_project(const QuadPointField& q, const Mesh& mesh) { return L2Projector(mesh).project(q); }

// ---------------------------------------------------------------------------

Vec2 reaction_force(const Mesh& mesh, std::string_view tag, const StressEvaluator& stress) {
  const int id = mesh.boundary_tag(tag);
  const double g = 0.5 / std::sqrt(3.0);
  Vec2 f = Vec2::Zero();
  for (Index i = 0; i < mesh.num_boundary_edges(); ++i) {
    const auto& edge = mesh.boundary_edges()[static_cast<std::size_t>(i)];
    if (edge.tag != id) continue;
    const Index e = mesh.edge_element(i);
    const auto& v = mesh.element(e).nodes;
    int la = -1, lb = -1;
    for (int k = 0; k < 3; ++k) {
      if (v[static_cast<std::size_t>(k)] == edge.nodes[0]) la = k;
      if (v[static_cast<std::size_t>(k)] == edge.nodes[1]) lb = k;
    }
    const Vec2& a = mesh.node(edge.nodes[0]);
    const Vec2& b = mesh.node(edge.nodes[1]);
    const Vec2 d = b - a;
    const double len = d.norm();
    Vec2 n(d.y(), -d.x());
    n /= len;
    if (n.dot(0.5 * (a + b) - mesh.element_centroid(e)) < 0) n = -n;
    for (double t : {0.5 - g, 0.5 + g}) {
      Eigen::Vector3d xi = Eigen::Vector3d::Zero();
      xi(la) = 1 - t;
      xi(lb) = t;
      const SymTensor2<double> s = stress(e, xi);
      f += 0.5 * len * Vec2(s(0) * n.x() + s(2) * n.y(), s(2) * n.x() + s(1) * n.y());
    }
  }
  return f;
}

namespace {

Eigen::Vector3d gather(const Mesh& mesh, Index e, const FEField& f) {
  const auto& v = mesh.element(e).nodes;
  return {f(v[0]), f(v[1]), f(v[2])};
}

}  // namespace

StressEvaluator physical_stress(const Mesh& mesh, const MaterialTable& mats, const Vector& u, const FEField& s,
                                const FEField& T) {
  return [&mesh, &mats, &u, &s, &T](Index e, const Eigen::Vector3d& xi) -> SymTensor2<double> {
    const auto& entry = mats.for_element(mesh, e);
    const Tri3Shape shape = shape_tri3(mesh, e);
    const SymTensor2<double> eps = element_strain(mesh, shape, e, u);
    const double sq = xi.dot(gather(mesh, e, s));
    const double Tq = xi.dot(gather(mesh, e, T));
    const SymTensor2<double> ee = elastic_strain(eps, Tq, entry.material.thermal);
    return stress(ee, ee, sq, entry.C, entry.material.fracture.eta);
  };
}

QuadPointField psi_plus_field(const Mesh& mesh, const MaterialTable& mats, const Vector& u, const FEField& T) {
  QuadPointField out(mesh.num_elements(), 3);
  const auto& rule = quad_rule(2);
  const int chunks = detail::chunk_count(mesh.num_elements());
  detail::parallel_chunks(mesh.num_elements(), chunks, [&](int, Index b, Index end) {
    for (Index e = b; e < end; ++e) {
      const auto& entry = mats.for_element(mesh, e);
      const Tri3Shape shape = shape_tri3(mesh, e);
      const SymTensor2<double> eps = element_strain(mesh, shape, e, u);
      const Eigen::Vector3d Te = gather(mesh, e, T);
      for (int q = 0; q < 3; ++q) {
        const double Tq = rule.barycentric[static_cast<std::size_t>(q)].dot(Te);
        out(e, q) = psi_plus(elastic_strain(eps, Tq, entry.material.thermal), entry.C);
      }
    }
  });
  return out;
}

double entropy_production(const Mesh& mesh, const MaterialTable& mats, const FEField& s, const FEField& T) {
  const auto& rule = quad_rule(2);
  double total = 0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto& m = mats.for_element(mesh, e).material;
    const Tri3Shape shape = shape_tri3(mesh, e);
    const Eigen::Vector3d Te = gather(mesh, e, T);
    const Eigen::Vector3d se = gather(mesh, e, s);
    const double grad2 = (shape.grad.transpose() * Te).squaredNorm();
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const double Tq = rule.barycentric[q].dot(Te);
      if (!(Tq > 0)) throw InvalidArgument("entropy_production: temperature must be positive");
      const double k = conductivity(rule.barycentric[q].dot(se), m.thermal, m.fracture.eta, m.degrade_conductivity);
      total += rule.weights[q] * shape.area * k / Tq * grad2;
    }
  }
  return total;
}

double integrate(const Mesh& mesh, const FEField& f) {
  if (f.size() != mesh.num_nodes()) throw InvalidArgument("integrate: field size mismatch");
  double total = 0;
  for (Index e = 0; e < mesh.num_elements(); ++e) total += mesh.element_area(e) * gather(mesh, e, f).sum() / 3.0;
  return total;
}

int assembly_threads() {
  int n = 0;
  if (const char* env = std::getenv("THERMOFRAC_THREADS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

}  // namespace thermofrac
