#include <array>

#include "parallel.hpp"
#include "thermofrac/error.hpp"
#include "thermofrac/fem.hpp"

namespace thermofrac {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::Vector3d gather(const Mesh& mesh, Index e, const FEField& f) {
  const auto& v = mesh.element(e).nodes;
  return {f(v[0]), f(v[1]), f(v[2])};
}

Eigen::Matrix<double, 6, 1> gather_u(const Mesh& mesh, Index e, const Vector& u) {
  const auto& v = mesh.element(e).nodes;
  Eigen::Matrix<double, 6, 1> ue;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 2; ++c) ue(2 * i + c) = u(displacement_dof(v[static_cast<std::size_t>(i)], c));
  return ue;
}

// Runs `local(e, triplets, rhs_slot)` over all elements in parallel chunks;
// per-element rhs contributions are buffered and scattered serially.
template <int Dofs, class Local, class DofOf>
void assemble(const Mesh& mesh, Local&& local, DofOf&& dof_of, Triplets& out,
              std::vector<Eigen::Matrix<double, Dofs, 1>>& rhs) {
  const Index ne = mesh.num_elements();
  const int chunks = detail::chunk_count(ne);
  std::vector<Triplets> parts(static_cast<std::size_t>(chunks));
  rhs.assign(static_cast<std::size_t>(ne), Eigen::Matrix<double, Dofs, 1>::Zero());
  detail::parallel_chunks(ne, chunks, [&](int c, Index b, Index end) {
    auto& trip = parts[static_cast<std::size_t>(c)];
    trip.reserve(static_cast<std::size_t>((end - b) * Dofs * Dofs));
    Eigen::Matrix<double, Dofs, Dofs> Ke;
    std::array<Index, Dofs> dofs;
    for (Index e = b; e < end; ++e) {
      Ke.setZero();
      local(e, Ke, rhs[static_cast<std::size_t>(e)]);
      dof_of(e, dofs);
      for (int i = 0; i < Dofs; ++i)
        for (int j = 0; j < Dofs; ++j) trip.emplace_back(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)], Ke(i, j));
    }
  });
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  out.reserve(total);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
}

template <int Dofs, class DofOf>
Vector scatter(const Mesh& mesh, Index n, const std::vector<Eigen::Matrix<double, Dofs, 1>>& rhs, DofOf&& dof_of) {
  Vector b = Vector::Zero(n);
  std::array<Index, Dofs> dofs;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    dof_of(e, dofs);
    for (int i = 0; i < Dofs; ++i) b(dofs[static_cast<std::size_t>(i)]) += rhs[static_cast<std::size_t>(e)](i);
  }
  return b;
}

void check_nodal(const Mesh& mesh, const FEField* f, const char* what) {
  if (f == nullptr) throw InvalidArgument(std::string("assemble_coupled: missing ") + what);
  if (f->size() != mesh.num_nodes()) throw InvalidArgument(std::string("assemble_coupled: wrong size for ") + what);
}

}  // namespace

LinearSystem assemble_phase_field(const Mesh& mesh, const MaterialTable& mats, const FEField& H) {
  if (H.size() != mesh.num_nodes()) throw InvalidArgument("assemble_phase_field: history field size mismatch");
  auto dof_of = [&](Index e, std::array<Index, 3>& d) {
    const auto& v = mesh.element(e).nodes;
    d = {v[0], v[1], v[2]};
  };
  auto local = [&](Index e, Eigen::Matrix3d& Ke, Eigen::Vector3d& be) {
    const auto& f = mats.for_element(mesh, e).material.fracture;
    const Tri3Shape shape = shape_tri3(mesh, e);
    const Eigen::Vector3d He = gather(mesh, e, H);
    Ke = f.Gc * f.ls * shape.area * shape.grad * shape.grad.transpose();
    // Reaction and source terms use vertex quadrature: the matrix stays an
    // M-matrix on non-obtuse meshes, which keeps s inside [0, 1].
    const double w = shape.area / 3;
    for (int i = 0; i < 3; ++i) {
      Ke(i, i) += w * (2 * He(i) + f.Gc / f.ls);
      be(i) += w * f.Gc / f.ls;
    }
  };
  Triplets trip;
  std::vector<Eigen::Vector3d> rhs;
  assemble<3>(mesh, local, dof_of, trip, rhs);
  LinearSystem sys;
  sys.A.resize(mesh.num_nodes(), mesh.num_nodes());
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.b = scatter<3>(mesh, mesh.num_nodes(), rhs, dof_of);
  return sys;
}

CoupledSystem assemble_coupled(const Mesh& mesh, const MaterialTable& mats, const CoupledInputs& in) {
  if (!(in.dt > 0)) throw InvalidArgument("assemble_coupled: time step must be positive");
  check_nodal(mesh, in.T_branch, "branch temperature");
  check_nodal(mesh, in.T_old, "previous temperature");
  check_nodal(mesh, in.s, "phase field");
  if (in.u_branch == nullptr || in.u_branch->size() != 2 * mesh.num_nodes())
    throw InvalidArgument("assemble_coupled: displacement size mismatch");

  const Index nn = mesh.num_nodes();
  const auto& rule = quad_rule(2);
  const Eigen::Matrix3d metric = Eigen::Vector3d(1, 1, 2).asDiagonal();
  const Index ne = mesh.num_elements();

  // The element kernel produces all three blocks at once; they are stored
  // into one 9x9 buffer laid out as the monolithic element matrix.
  auto local = [&](Index e, Eigen::Matrix<double, 9, 9>& Ke, Eigen::Matrix<double, 9, 1>& be) {
    const auto& entry = mats.for_element(mesh, e);
    const Material& m = entry.material;
    const Tri3Shape shape = shape_tri3(mesh, e);
    const Eigen::Matrix<double, 3, 6> B = strain_matrix(shape);
    const SymTensor2<double> eps_prev = B * gather_u(mesh, e, *in.u_branch);
    const Eigen::Vector3d Tb = gather(mesh, e, *in.T_branch);
    const Eigen::Vector3d To = gather(mesh, e, *in.T_old);
    const Eigen::Vector3d se = gather(mesh, e, *in.s);
    const double cap = m.thermal.rho * m.thermal.c / in.dt;
    const SymTensor2<double> I = identity2<double>();

    Eigen::Matrix<double, 6, 6> Kuu = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 3> KuT = Eigen::Matrix<double, 6, 3>::Zero();
    Eigen::Matrix3d KTT = Eigen::Matrix3d::Zero();
    Eigen::Matrix<double, 6, 1> fu = Eigen::Matrix<double, 6, 1>::Zero();
    Eigen::Vector3d fT = Eigen::Vector3d::Zero();
    const Eigen::Matrix3d GG = shape.grad * shape.grad.transpose();
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Eigen::Vector3d& N = rule.barycentric[q];
      const double w = rule.weights[q] * shape.area;
      const double sq = N.dot(se);
      const SymTensor2<double> branch = elastic_strain(eps_prev, N.dot(Tb), m.thermal);
      const Operator3<double> Cm = modified_stiffness(entry.C, branch_of(branch), sq, m.fracture.eta);
      const Eigen::Matrix<double, 6, 3> BtD = B.transpose() * metric;
      const SymTensor2<double> thermal = Cm * (m.thermal.alpha * I);
      Kuu += w * BtD * Cm * B;
      KuT -= w * (BtD * thermal) * N.transpose();
      fu -= w * m.thermal.T0 * (BtD * thermal);
      const double k = conductivity(sq, m.thermal, m.fracture.eta, m.degrade_conductivity);
      KTT += w * (k * GG + cap * N * N.transpose());
      fT += w * cap * N.dot(To) * N;
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        Ke.block<2, 2>(3 * i, 3 * j) = Kuu.block<2, 2>(2 * i, 2 * j);
        Ke.block<2, 1>(3 * i, 3 * j + 2) = KuT.block<2, 1>(2 * i, j);
        Ke(3 * i + 2, 3 * j + 2) = KTT(i, j);
      }
      be.segment<2>(3 * i) = fu.segment<2>(2 * i);
      be(3 * i + 2) = fT(i);
    }
  };
  auto dof_of = [&](Index e, std::array<Index, 9>& d) {
    const auto& v = mesh.element(e).nodes;
    for (int i = 0; i < 3; ++i)
      for (int f = 0; f < 3; ++f) d[static_cast<std::size_t>(3 * i + f)] = coupled_dof(v[static_cast<std::size_t>(i)], f);
  };

  Triplets trip;
  std::vector<Eigen::Matrix<double, 9, 1>> rhs;
  assemble<9>(mesh, local, dof_of, trip, rhs);
  const Vector b = scatter<9>(mesh, 3 * nn, rhs, dof_of);

  // Split the interleaved element triplets into the three blocks. The
  // lower-left block is structurally zero and dropped.
  Triplets tu, tT, tc;
  tu.reserve(static_cast<std::size_t>(36 * ne));
  tT.reserve(static_cast<std::size_t>(9 * ne));
  tc.reserve(static_cast<std::size_t>(18 * ne));
  for (const auto& t : trip) {
    const Index r = t.row(), c = t.col();
    const Index rn = r / 3, cn = c / 3;
    const int rf = static_cast<int>(r % 3), cf = static_cast<int>(c % 3);
    if (rf < 2 && cf < 2) tu.emplace_back(displacement_dof(rn, rf), displacement_dof(cn, cf), t.value());
    else if (rf < 2) tc.emplace_back(displacement_dof(rn, rf), cn, t.value());
    else if (cf == 2) tT.emplace_back(rn, cn, t.value());
  }
  CoupledSystem sys;
  sys.elastic.A.resize(2 * nn, 2 * nn);
  sys.elastic.A.setFromTriplets(tu.begin(), tu.end());
  sys.heat.A.resize(nn, nn);
  sys.heat.A.setFromTriplets(tT.begin(), tT.end());
  sys.coupling.resize(2 * nn, nn);
  sys.coupling.setFromTriplets(tc.begin(), tc.end());
  sys.elastic.b.resize(2 * nn);
  sys.heat.b.resize(nn);
  for (Index i = 0; i < nn; ++i) {
    sys.elastic.b(2 * i) = b(3 * i);
    sys.elastic.b(2 * i + 1) = b(3 * i + 1);
    sys.heat.b(i) = b(3 * i + 2);
  }
  return sys;
}

LinearSystem monolithic(const CoupledSystem& blocks) {
  const Index nn = blocks.heat.size();
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(blocks.elastic.A.nonZeros() + blocks.heat.A.nonZeros() + blocks.coupling.nonZeros()));
  for (Index c = 0; c < blocks.elastic.A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(blocks.elastic.A, c); it; ++it)
      trip.emplace_back(coupled_dof(it.row() / 2, static_cast<int>(it.row() % 2)),
                        coupled_dof(it.col() / 2, static_cast<int>(it.col() % 2)), it.value());
  for (Index c = 0; c < blocks.coupling.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(blocks.coupling, c); it; ++it)
      trip.emplace_back(coupled_dof(it.row() / 2, static_cast<int>(it.row() % 2)), coupled_dof(it.col(), 2), it.value());
  for (Index c = 0; c < blocks.heat.A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(blocks.heat.A, c); it; ++it)
      trip.emplace_back(coupled_dof(it.row(), 2), coupled_dof(it.col(), 2), it.value());
  LinearSystem sys;
  sys.A.resize(3 * nn, 3 * nn);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.b.resize(3 * nn);
  for (Index i = 0; i < nn; ++i) {
    sys.b(coupled_dof(i, 0)) = blocks.elastic.b(2 * i);
    sys.b(coupled_dof(i, 1)) = blocks.elastic.b(2 * i + 1);
    sys.b(coupled_dof(i, 2)) = blocks.heat.b(i);
  }
  return sys;
}

CoupledSolution CoupledSolver::solve(const CoupledSystem& sys, const DirichletSet& u_bc, const DirichletSet& T_bc,
                                     const FEField* prescribed_T) {
  CoupledSolution out;
  if (prescribed_T != nullptr) {
    if (prescribed_T->size() != sys.heat.size()) throw InvalidArgument("CoupledSolver: prescribed temperature size");
    out.T = *prescribed_T;
  } else {
    LinearSystem heat = sys.heat;
    apply_dirichlet(heat, T_bc);
    out.T = heat_.solve(heat);
  }
  LinearSystem elastic = sys.elastic;
  elastic.b -= sys.coupling * out.T;
  apply_dirichlet(elastic, u_bc);
  out.u = elastic_.solve(elastic);
  return out;
}

}  // namespace thermofrac
