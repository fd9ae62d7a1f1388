#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qcayley/types.hpp"

namespace qcayley {

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // orthonormal columns, vectors.col(k) pairs with values(k)
};

struct UnitaryEigen {
  Eigen::VectorXd phases;  // in (-pi, pi], ascending
  CVector values;          // exp(i*phases), unit modulus by construction
  CMatrix vectors;         // orthonormal columns
};

inline bool is_hermitian(const CMatrix& h, double tolerance = tol::hermitian_symmetry) {
  return max_abs_diff(h, h.adjoint()) <= tolerance;
}

inline bool is_unitary(const CMatrix& u, double tolerance = tol::unitarity) {
  if (u.rows() != u.cols()) return false;
  CMatrix gram = u.adjoint() * u;
  return max_abs_diff(gram, CMatrix::Identity(u.rows(), u.cols())) <= tolerance;
}

inline HermitianEigen eig_hermitian(const CMatrix& h) {
  if (h.rows() != h.cols()) throw BadShape("eig_hermitian: matrix is not square");
  if (!is_hermitian(h)) throw NotHermitian("eig_hermitian: symmetry defect exceeds tolerance");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw NoConvergence("eig_hermitian: solver did not converge");
  HermitianEigen out{solver.eigenvalues(), solver.eigenvectors()};
  if (max_abs_diff(out.vectors * out.values.asDiagonal() * out.vectors.adjoint(), h) >
      tol::reconstruction * std::max(1.0, max_abs(h)))
    throw NoConvergence("eig_hermitian: reconstruction defect exceeds tolerance");
  return out;
}

// Eigensystem of a unitary through a Hermitian combination
//   M(gamma) = (U + U^dag)/2 + gamma * (U - U^dag)/(2i).
// U and M(gamma) share eigenvectors; the eigenvalue map
// e^{i phi} -> cos phi + gamma sin phi is injective on the spectrum for
// generic gamma, so a handful of candidates with a residual check suffices.
inline UnitaryEigen eig_unitary(const CMatrix& u) {
  if (u.rows() != u.cols()) throw BadShape("eig_unitary: matrix is not square");
  if (!is_unitary(u)) throw NotUnitary("eig_unitary: unitarity defect exceeds tolerance");
  const auto n = u.rows();
  const CMatrix re_part = (u + u.adjoint()) / 2.0;
  const CMatrix im_part = (u - u.adjoint()) * Complex(0.0, -0.5);

  // Irrational-leaning spreads make accidental cos+gamma*sin collisions
  // between distinct eigenphases vanishingly unlikely.
  const double candidates[] = {0.6180339887498949, 1.4142135623730951, 0.3183098861837907,
                               2.2360679774997896, 0.7071067811865476, 1.0, 0.0};

  double best_residual = std::numeric_limits<double>::infinity();
  for (double gamma : candidates) {
    CMatrix m = re_part + gamma * im_part;
    m = (m + m.adjoint().eval()) / 2.0;  // scrub roundoff asymmetry
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    if (solver.info() != Eigen::Success) continue;
    const CMatrix& vecs = solver.eigenvectors();

    UnitaryEigen out;
    out.vectors = vecs;
    out.values.resize(n);
    out.phases.resize(n);
    double residual = 0.0;
    bool modulus_ok = true;
    for (Eigen::Index k = 0; k < n; ++k) {
      const CVector v = vecs.col(k);
      const CVector uv = u * v;
      Complex lambda = v.dot(uv);  // Eigen's dot conjugates the left argument
      residual = std::max(residual, (uv - lambda * v).cwiseAbs().maxCoeff());
      if (std::abs(std::abs(lambda) - 1.0) > tol::unit_modulus) modulus_ok = false;
      lambda /= std::abs(lambda);
      out.values(k) = lambda;
      double phase = std::atan2(lambda.imag(), lambda.real());
      if (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;  // report in (-pi, pi]
      out.phases(k) = phase;
    }
    best_residual = std::min(best_residual, residual);
    if (!modulus_ok || residual > 1e-8) continue;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return out.phases(a) < out.phases(b);
    });
    UnitaryEigen sorted;
    sorted.phases.resize(n);
    sorted.values.resize(n);
    sorted.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      sorted.phases(k) = out.phases(order[static_cast<std::size_t>(k)]);
      sorted.values(k) = out.values(order[static_cast<std::size_t>(k)]);
      sorted.vectors.col(k) = out.vectors.col(order[static_cast<std::size_t>(k)]);
    }
    return sorted;
  }
  throw NoConvergence("eig_unitary: no gamma candidate separated the spectrum (best residual " +
                      std::to_string(best_residual) + ")");
}

inline double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  CMatrix gram = a.adjoint() * a;
  gram = (gram + gram.adjoint().eval()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram);
  if (solver.info() != Eigen::Success)
    throw NoConvergence("spectral_norm: Gram eigensolve did not converge");
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

}  // namespace qcayley
