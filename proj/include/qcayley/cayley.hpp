#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "qcayley/linalg.hpp"
#include "qcayley/types.hpp"

namespace qcayley {

// f(theta) = (1 + i theta) / (1 - i theta), a bijection from the reals onto
// the unit circle minus {-1}.
template <class Real>
ComplexT<Real> cayley_fn(const Real& theta) {
  const ComplexT<Real> num(Real(1), theta);
  const ComplexT<Real> den(Real(1), -theta);
  return num / den;
}

inline Complex cayley_fn(double theta) { return cayley_fn<double>(theta); }

inline double wrap_phase(double a) {
  double w = std::remainder(a, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

// Spectral application of f to a Hermitian matrix; the resulting unitary has
// eigenphases 2*atan(h_alpha).
inline CMatrix cayley_fn_hermitian(const CMatrix& h) {
  HermitianEigen eig = eig_hermitian(h);
  CMatrix out = CMatrix::Zero(h.rows(), h.cols());
  for (Eigen::Index a = 0; a < eig.values.size(); ++a)
    out += cayley_fn(eig.values(a)) * (eig.vectors.col(a) * eig.vectors.col(a).adjoint());
  return out;
}

// h = f^{-1}(W): Hermitian with eigenvalues tan(phi_alpha / 2). Undefined when
// W has an eigenvalue at -1, and numerically hopeless nearby, so eigenphases
// within eta of pi are a hard error; callers resample their random input.
inline CMatrix cayley_inverse_unitary(const CMatrix& w,
                                      double eta = tol::eigenphase_pi_gap) {
  UnitaryEigen eig = eig_unitary(w);
  CMatrix h = CMatrix::Zero(w.rows(), w.cols());
  for (Eigen::Index a = 0; a < eig.phases.size(); ++a) {
    const double gap_to_pi = std::numbers::pi - std::abs(eig.phases(a));
    if (gap_to_pi < eta)
      throw EigenvalueNearMinusOne("cayley_inverse_unitary: eigenphase within " +
                                   std::to_string(eta) + " of pi");
    h += std::tan(eig.phases(a) / 2.0) * (eig.vectors.col(a) * eig.vectors.col(a).adjoint());
  }
  return ((h + h.adjoint()) / 2.0).eval();
}

// Frozen eigen-data of one two-qubit gate's Cayley path. The path is
//   U(x) = base * f((1-x) h),   h = f^{-1}(base^dag target),
// so x = 1 is the base circuit's gate and x = 0 the target's. Everything
// downstream (gate evaluation, |Q|^2 factors) is polynomial or rational in x
// with these numbers as frozen coefficients, at any scalar precision.
struct GatePath {
  Mat4 base;
  Mat4 psi;  // orthonormal eigenvector columns of h
  std::array<double, 4> h_alphas{};
  std::array<double, 4> r_alphas{};  // sqrt(1 + h^2)
  std::array<double, 4> u_alphas{};  // atan(h)
  int q1 = 0;
  int q2 = 1;
};

inline GatePath make_gate_path(const CMatrix& base, const CMatrix& target,
                               std::pair<int, int> qubits) {
  if (base.rows() != 4 || base.cols() != 4 || target.rows() != 4 || target.cols() != 4)
    throw BadShape("make_gate_path: paths are defined for 4x4 gates");
  if (!is_unitary(base)) throw NotUnitary("make_gate_path: base gate");
  if (!is_unitary(target)) throw NotUnitary("make_gate_path: target gate");

  UnitaryEigen eig = eig_unitary(base.adjoint() * target);
  GatePath path;
  path.base = base;
  path.psi = eig.vectors;
  path.q1 = qubits.first;
  path.q2 = qubits.second;
  for (int a = 0; a < 4; ++a) {
    const double phi = eig.phases(a);
    if (std::numbers::pi - std::abs(phi) < tol::eigenphase_pi_gap)
      throw EigenvalueNearMinusOne("make_gate_path: base^dag*target has eigenphase near pi");
    const double h = std::tan(phi / 2.0);
    path.h_alphas[static_cast<std::size_t>(a)] = h;
    path.r_alphas[static_cast<std::size_t>(a)] = std::sqrt(1.0 + h * h);
    path.u_alphas[static_cast<std::size_t>(a)] = std::atan(h);
  }
  return path;
}

inline double h_inf_norm(const GatePath& path) {
  double m = 0.0;
  for (double h : path.h_alphas) m = std::max(m, std::abs(h));
  return m;
}

template <class Real>
Mat4T<Real> gate_at(const GatePath& path, const Real& x) {
  const Real one(1);
  Mat4T<Real> diag = Mat4T<Real>::Zero();
  bool at_base = true;
  for (int a = 0; a < 4; ++a) {
    const Real theta = (one - x) * Real(path.h_alphas[static_cast<std::size_t>(a)]);
    const ComplexT<Real> f = cayley_fn(theta);
    if (f != ComplexT<Real>(one, Real(0))) at_base = false;
    diag(a, a) = f;
  }
  const Mat4T<Real> base = widen<Real>(path.base);
  if (at_base) return base;  // x = 1: skip the psi*psi^dag roundoff entirely
  const Mat4T<Real> psi = widen<Real>(path.psi);
  return base * (psi * diag * psi.adjoint());
}

inline Mat4 gate_at(const GatePath& path, double x) { return gate_at<double>(path, x); }

// One gate's contribution to |Q(x)|^2 from Eq-style factors
// |1 + i x (h/r) e^{iu}|^2 with r = sqrt(1+h^2), u = atan(h). Expanding with
// e^{iu} = (1 + ih)/r collapses each factor to (1 + (1-x)^2 h^2) / (1 + h^2),
// which is what we evaluate: one rational expression per alpha, exact in Real
// arithmetic given the frozen h, and manifestly positive.
template <class Real>
Real q_factor_sq(const GatePath& path, const Real& x) {
  const Real one(1);
  Real out = one;
  for (double h_d : path.h_alphas) {
    const Real h(h_d);
    const Real hh = h * h;
    const Real s = (one - x) * h;
    out *= (one + s * s) / (one + hh);
  }
  return out;
}

inline double q_factor_sq(const GatePath& path, double x) { return q_factor_sq<double>(path, x); }

struct PhaseAlignment {
  double phi = 0.0;
  CMatrix c_aligned;
};

// Pick e^{i phi} so every eigenphase of U^dag (e^{i phi} C) lands in
// [-3pi/4, 3pi/4]. Rotating the midpoint of the largest circular gap of the
// spectrum onto pi always works at dim <= 4: four points leave some gap of
// width >= pi/2, exactly the forbidden arc around -1.
inline PhaseAlignment phase_align(const CMatrix& u, const CMatrix& c) {
  if (u.rows() != c.rows() || u.cols() != c.cols())
    throw BadShape("phase_align: dimension mismatch");
  if (!is_unitary(u)) throw NotUnitary("phase_align: U");
  if (!is_unitary(c)) throw NotUnitary("phase_align: C");

  const UnitaryEigen eig = eig_unitary(u.adjoint() * c);
  const Eigen::Index n = eig.phases.size();
  double best_gap = -1.0;
  double mid = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = eig.phases(k);
    const double b = (k + 1 < n) ? eig.phases(k + 1) : eig.phases(0) + 2.0 * std::numbers::pi;
    if (b - a > best_gap) {
      best_gap = b - a;
      mid = (a + b) / 2.0;
    }
  }
  const double phi = wrap_phase(std::numbers::pi - mid);

  PhaseAlignment out;
  out.phi = phi;
  out.c_aligned = (std::polar(1.0, phi) * c).eval();
  const UnitaryEigen post = eig_unitary(u.adjoint() * out.c_aligned);
  const double worst = post.phases.cwiseAbs().maxCoeff();
  if (worst > 3.0 * std::numbers::pi / 4.0 + tol::phase_window_slack)
    throw NoValidPhase("phase_align: worst aligned eigenphase " + std::to_string(worst));
  return out;
}

}  // namespace qcayley
