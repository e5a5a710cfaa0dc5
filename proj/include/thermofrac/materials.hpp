#pragma once

// Constitutive kernels for the thermo-elastic phase-field model.
//
// Symmetric 2x2 tensors are stored as tensor components (xx, yy, xy); the
// shear entry is the tensor component, not the engineering strain. Fourth
// order tensors act on that layout through `apply` and are returned as 3x3
// matrices by `matrix()`, so `a : (C b) == contract(a, C.matrix() * b)`.

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "thermofrac/error.hpp"

namespace thermofrac {

enum class PlanarMode { PlaneStress, PlaneStrain };

struct ElasticLaw {
  double E = 1;
  double nu = 0;
  PlanarMode mode = PlanarMode::PlaneStrain;

  double lambda() const { return E * nu / ((1 + nu) * (1 - 2 * nu)); }
  double mu() const { return E / (2 * (1 + nu)); }

  bool operator==(const ElasticLaw&) const = default;
};

struct ThermalLaw {
  double k0 = 0;     // W/(m K)
  double rho = 0;    // kg/m^3
  double c = 1;      // J/(kg K)
  double alpha = 0;  // 1/K
  double T0 = 0;     // K, strain-free reference

  bool operator==(const ThermalLaw&) const = default;
};

struct FractureLaw {
  double Gc = 1;  // N/m
  double ls = 1;  // m
  double eta = 1e-8;

  bool operator==(const FractureLaw&) const = default;
};

struct Material {
  ElasticLaw elastic;
  ThermalLaw thermal;
  FractureLaw fracture;
  bool degrade_conductivity = true;

  bool operator==(const Material&) const = default;
};

template <typename Scalar>
using SymTensor2 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Operator3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
struct SymTensor4 {
  Scalar c1111{}, c1112{}, c1122{}, c1212{}, c2212{}, c2222{};

  Operator3<Scalar> matrix() const {
    Operator3<Scalar> m;
    m << c1111, c1122, 2 * c1112,  //
        c1122, c2222, 2 * c2212,   //
        c1112, c2212, 2 * c1212;
    return m;
  }

  SymTensor2<Scalar> apply(const SymTensor2<Scalar>& e) const { return matrix() * e; }
};

template <typename Scalar>
SymTensor2<Scalar> identity2() {
  return SymTensor2<Scalar>(Scalar(1), Scalar(1), Scalar(0));
}

template <typename Derived>
typename Derived::Scalar trace(const Eigen::MatrixBase<Derived>& e) {
  return e(0) + e(1);
}

/// Double contraction a : b of two symmetric tensors.
template <typename DA, typename DB>
typename DA::Scalar contract(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  return a(0) * b(0) + a(1) * b(1) + 2 * a(2) * b(2);
}

/// Volumetric projector (1/3) I (x) I. The 1/3 factor is kept in 2D.
template <typename Scalar>
Operator3<Scalar> volumetric_projector() {
  Operator3<Scalar> p = Operator3<Scalar>::Zero();
  p.template topLeftCorner<2, 2>().setConstant(Scalar(1) / Scalar(3));
  return p;
}

template <typename Scalar>
Operator3<Scalar> deviatoric_projector() {
  return Operator3<Scalar>::Identity() - volumetric_projector<Scalar>();
}

template <typename Scalar = double>
SymTensor4<Scalar> elastic_tensor(const ElasticLaw& law) {
  const Scalar E = law.E, nu = law.nu;
  SymTensor4<Scalar> c;
  if (law.mode == PlanarMode::PlaneStress) {
    c.c1111 = E / (1 - nu * nu);
    c.c1122 = nu * E / (1 - nu * nu);
    c.c2222 = c.c1111;
  } else {
    const Scalar d = 1 - nu - 2 * nu * nu;
    if (d == Scalar(0)) throw InvalidArgument("elastic_tensor: nu = 0.5 is singular in plane strain");
    c.c1111 = E * (1 - nu * nu) / ((1 + nu) * d);
    c.c1122 = nu * E / d;
    c.c2222 = E * (1 - nu) / d;
  }
  c.c1212 = E / (2 * (1 + nu));
  return c;
}

template <typename Scalar>
struct VolDev {
  SymTensor2<Scalar> vol;
  SymTensor2<Scalar> dev;
};

template <typename Derived>
VolDev<typename Derived::Scalar> project(const Eigen::MatrixBase<Derived>& eps) {
  using Scalar = typename Derived::Scalar;
  VolDev<Scalar> out;
  out.vol = volumetric_projector<Scalar>() * eps;
  out.dev = eps - out.vol;
  return out;
}

template <typename Scalar>
Scalar degradation(Scalar s, Scalar eta) {
  return s * s + eta;
}

template <typename Derived>
SymTensor2<typename Derived::Scalar> elastic_strain(const Eigen::MatrixBase<Derived>& eps,
                                                    typename Derived::Scalar T, const ThermalLaw& th) {
  using Scalar = typename Derived::Scalar;
  return eps - Scalar(th.alpha) * (T - Scalar(th.T0)) * identity2<Scalar>();
}

enum class Branch { Tension, Compression };

/// Tension when tr(strain) >= 0.
template <typename Derived>
Branch branch_of(const Eigen::MatrixBase<Derived>& strain) {
  return trace(strain) >= 0 ? Branch::Tension : Branch::Compression;
}

/// Damage-modified stiffness: g(s) C in tension, g(s) Pdev C + Pvol C in compression.
template <typename Scalar>
Operator3<Scalar> modified_stiffness(const SymTensor4<Scalar>& C, Branch branch, Scalar s, Scalar eta) {
  const Scalar g = degradation(s, eta);
  const Operator3<Scalar> c = C.matrix();
  if (branch == Branch::Tension) return g * c;
  return g * (deviatoric_projector<Scalar>() * c) + volumetric_projector<Scalar>() * c;
}

template <typename DE, typename DB>
SymTensor2<typename DE::Scalar> stress(const Eigen::MatrixBase<DE>& eps_elas, const Eigen::MatrixBase<DB>& branch_strain,
                                       typename DE::Scalar s, const SymTensor4<typename DE::Scalar>& C,
                                       typename DE::Scalar eta) {
  return modified_stiffness(C, branch_of(branch_strain), s, eta) * eps_elas;
}

/// Bilinear-form stress: C_mod (eps - alpha T I) with absolute T, branch
/// frozen at the previous iterate.
template <typename Scalar>
SymTensor2<Scalar> stress_total(const SymTensor2<Scalar>& eps, const SymTensor2<Scalar>& eps_prev, Scalar s, Scalar T,
                                Scalar T_prev, const Material& m, const SymTensor4<Scalar>& C) {
  const SymTensor2<Scalar> branch = elastic_strain(eps_prev, T_prev, m.thermal);
  const SymTensor2<Scalar> arg = eps - Scalar(m.thermal.alpha) * T * identity2<Scalar>();
  return stress(arg, branch, s, C, Scalar(m.fracture.eta));
}

/// Load-side thermal pre-stress: -C_mod (alpha T0 I), same branch rule as
/// stress_total, so stress_total - stress_thermal is the physical stress.
template <typename Scalar>
SymTensor2<Scalar> stress_thermal(const SymTensor2<Scalar>& eps_prev, Scalar s, Scalar T_prev, const Material& m,
                                  const SymTensor4<Scalar>& C) {
  const SymTensor2<Scalar> branch = elastic_strain(eps_prev, T_prev, m.thermal);
  const SymTensor2<Scalar> arg = Scalar(m.thermal.alpha) * Scalar(m.thermal.T0) * identity2<Scalar>();
  return -stress(arg, branch, s, C, Scalar(m.fracture.eta));
}

/// Tensile elastic energy density driving the history field.
template <typename Derived>
typename Derived::Scalar psi_plus(const Eigen::MatrixBase<Derived>& eps_elas,
                                  const SymTensor4<typename Derived::Scalar>& C) {
  using Scalar = typename Derived::Scalar;
  const SymTensor2<Scalar> sigma = C.apply(eps_elas);
  if (trace(eps_elas) >= 0) return Scalar(0.5) * contract(eps_elas, sigma);
  const Operator3<Scalar> pdev = deviatoric_projector<Scalar>();
  return Scalar(0.5) * contract(pdev * sigma, pdev * eps_elas);
}

template <typename Scalar>
Scalar conductivity(Scalar s, const ThermalLaw& th, Scalar eta, bool degrade) {
  return degrade ? degradation(s, eta) * Scalar(th.k0) : Scalar(th.k0);
}

/// Throws InvalidArgument naming the first violated parameter bound.
inline void validate(const Material& m) {
  const auto& e = m.elastic;
  if (!(e.E > 0)) throw InvalidArgument("elastic.E must be > 0");
  if (!(e.nu > -1 && e.nu < 0.5)) throw InvalidArgument("elastic.nu must lie in (-1, 0.5)");
  if (!std::isfinite(e.lambda()) || !std::isfinite(e.mu())) throw InvalidArgument("elastic: Lame parameters not finite");
  const auto& t = m.thermal;
  if (!(t.k0 >= 0)) throw InvalidArgument("thermal.k0 must be >= 0");
  if (!(t.rho >= 0)) throw InvalidArgument("thermal.rho must be >= 0");
  if (!(t.c > 0)) throw InvalidArgument("thermal.c must be > 0");
  if (!std::isfinite(t.alpha) || !std::isfinite(t.T0)) throw InvalidArgument("thermal: alpha and T0 must be finite");
  const auto& f = m.fracture;
  if (!(f.Gc > 0)) throw InvalidArgument("fracture.Gc must be > 0");
  if (!(f.ls > 0)) throw InvalidArgument("fracture.ls must be > 0");
  if (!(f.eta > 0 && f.eta < 1)) throw InvalidArgument("fracture.eta must lie in (0, 1)");
}

}  // namespace thermofrac
