#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <complex>
#include <stdexcept>
#include <string>

namespace qcayley {

// Real scalars. The whole evaluation pipeline (gate evaluation, statevector
// simulation, |Q|^2 products, Lagrange extrapolation) is templated on the
// real type; eigendecompositions always run in double and their output is
// frozen into path data, so only arithmetic is ever needed at high precision.
using Big256 = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;
using Big512 = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<512, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

template <class Real>
using ComplexT = std::complex<Real>;

using Complex = ComplexT<double>;

template <class Real>
using Mat4T = Eigen::Matrix<ComplexT<Real>, 4, 4>;
template <class Real>
using MatT = Eigen::Matrix<ComplexT<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using VecT = Eigen::Matrix<ComplexT<Real>, Eigen::Dynamic, 1>;

using Mat4 = Mat4T<double>;
using Mat2 = Eigen::Matrix2cd;
using CMatrix = MatT<double>;
using CVector = VecT<double>;

// Precision policy in one place. The proofs assume exact reals; every
// numerical slack the artifact grants itself is listed here.
namespace tol {
inline constexpr double hermitian_symmetry = 1e-10;  // ||H - H^dag||_max gate
inline constexpr double unitarity = 1e-10;           // ||U^dag U - I||_max gate
inline constexpr double reconstruction = 1e-10;      // eigensystem multiply-back
inline constexpr double orthonormality = 1e-10;      // |<psi_a|psi_b> - delta|
inline constexpr double unit_modulus = 1e-9;         // ||lambda| - 1| for unitary eigenvalues
inline constexpr double eigenphase_pi_gap = 1e-9;    // eta: reject phases this close to pi
inline constexpr double path_unitarity = 1e-9;       // unitarity along a Cayley path
inline constexpr double path_endpoint = 1e-9;        // gate_at(1) vs base, gate_at(0) vs target
inline constexpr double statevector_norm = 1e-9;     // ||amps||_2 drift per circuit
inline constexpr double lp_feasibility = 1e-9;       // phase-1 objective counted as zero
inline constexpr double fit_condition_limit = 1e14;  // normal-equation condition gate
inline constexpr double phase_window_slack = 1e-12;  // phase_align acceptance slack
}  // namespace tol

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define QCAYLEY_DEFINE_ERROR(name)                          \
  struct name : Error {                                     \
    explicit name(const std::string& msg) : Error(msg) {}   \
  }

QCAYLEY_DEFINE_ERROR(NotHermitian);
QCAYLEY_DEFINE_ERROR(NotUnitary);
QCAYLEY_DEFINE_ERROR(NoConvergence);
QCAYLEY_DEFINE_ERROR(EigenvalueNearMinusOne);
QCAYLEY_DEFINE_ERROR(NoValidPhase);
QCAYLEY_DEFINE_ERROR(BadShape);
QCAYLEY_DEFINE_ERROR(ParseError);
QCAYLEY_DEFINE_ERROR(TooManyQubits);
QCAYLEY_DEFINE_ERROR(DuplicateNodes);
QCAYLEY_DEFINE_ERROR(IllConditioned);
QCAYLEY_DEFINE_ERROR(DomainError);
QCAYLEY_DEFINE_ERROR(TooLarge);
QCAYLEY_DEFINE_ERROR(NoFeasiblePolynomial);
QCAYLEY_DEFINE_ERROR(TooManyWitnessBits);
QCAYLEY_DEFINE_ERROR(Ambiguous);

#undef QCAYLEY_DEFINE_ERROR

// Rebuild a double-precision complex matrix at scalar type Real. Entries are
// widened exactly (binary64 embeds in every supported Real), so identities
// proved for the frozen data survive the precision change.
template <class Real, class Derived>
MatT<Real> widen(const Eigen::MatrixBase<Derived>& m) {
  MatT<Real> out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Complex z(m(i, j));
      out(i, j) = ComplexT<Real>(Real(z.real()), Real(z.imag()));
    }
  return out;
}

// Entrywise max-abs distance, the workhorse closeness check for small gates.
template <class DerivedA, class DerivedB>
double max_abs_diff(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.cwiseAbs().maxCoeff();
}

}  // namespace qcayley
