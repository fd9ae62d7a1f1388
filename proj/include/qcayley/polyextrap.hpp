#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "qcayley/types.hpp"

namespace qcayley {

template <class Real>
struct SampleSetT {
  std::vector<Real> x;
  std::vector<Real> y;

  void add(const Real& xi, const Real& yi) {
    x.push_back(xi);
    y.push_back(yi);
  }
  std::size_t size() const { return x.size(); }
};

using SampleSet = SampleSetT<double>;

// --- node generators ------------------------------------------------------
// Written so the symmetry x_j + x_{d-j} = 0 holds exactly in floating point:
// the numerator is an integer and negation of a quotient is exact.

inline std::vector<double> nodes_equispaced(int d, double Delta) {
  if (d < 1) throw DomainError("nodes_equispaced: d must be >= 1");
  std::vector<double> nodes(static_cast<std::size_t>(d) + 1);
  for (int j = 0; j <= d; ++j)
    nodes[static_cast<std::size_t>(j)] =
        Delta * (static_cast<double>(2 * j - d) / static_cast<double>(d));
  return nodes;
}

inline std::vector<double> nodes_grid(int L, double Delta) {
  if (L < 2) throw DomainError("nodes_grid: L must be >= 2");
  std::vector<double> nodes(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i)
    nodes[static_cast<std::size_t>(i)] =
        Delta * (static_cast<double>(2 * i - L + 1) / static_cast<double>(L - 1));
  return nodes;
}

// Extrema of T_d(x/Delta), listed descending from +Delta to -Delta; mirrored
// so the set is exactly antisymmetric.
inline std::vector<double> nodes_chebyshev_extrema(int d, double Delta) {
  if (d < 1) throw DomainError("nodes_chebyshev_extrema: d must be >= 1");
  std::vector<double> nodes(static_cast<std::size_t>(d) + 1);
  for (int j = 0; 2 * j <= d; ++j) {
    const double c = Delta * std::cos(static_cast<double>(j) * std::numbers::pi /
                                      static_cast<double>(d));
    nodes[static_cast<std::size_t>(j)] = c;
    nodes[static_cast<std::size_t>(d - j)] = -c;
  }
  if (d % 2 == 0) nodes[static_cast<std::size_t>(d / 2)] = 0.0;
  return nodes;
}

// --- Chebyshev ------------------------------------------------------------

template <class Real>
Real chebyshev_T(int d, const Real& x) {
  if (d < 0) throw DomainError("chebyshev_T: negative degree");
  if (d == 0) return Real(1);
  using std::abs;
  using std::acosh;
  using std::cosh;
  if (abs(x) > Real(1)) {
    // closed form 1/2[(x+sqrt(x^2-1))^d + (x-sqrt(x^2-1))^d] = cosh(d acosh|x|)
    Real v = cosh(Real(d) * acosh(abs(x)));
    if (x < Real(0) && d % 2 == 1) v = -v;
    return v;
  }
  Real prev(1);
  Real cur = x;
  for (int k = 2; k <= d; ++k) {
    const Real next = Real(2) * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

inline double chebyshev_T(int d, double x) { return chebyshev_T<double>(d, x); }

// log T_d(y) for y >= 1, overflow-free.
inline double log_chebyshev_T(int d, double y) {
  if (d < 0) throw DomainError("log_chebyshev_T: negative degree");
  if (y < 1.0) throw DomainError("log_chebyshev_T: argument below 1");
  const double a = static_cast<double>(d) * std::acosh(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// --- interpolation --------------------------------------------------------

// First-form Lagrange evaluation: each basis value is a product of distance
// ratios, so it stays relatively accurate even when the query point sits far
// outside a tightly clustered node set. The second barycentric form is
// unusable there: its denominator cancels to ~1/(l(x) w_max), far below the
// rounding floor of its O(1) terms.
template <class Real>
Real lagrange_extrapolate(const SampleSetT<Real>& s, const Real& x_star) {
  const std::size_t n = s.size();
  if (n == 0) throw BadShape("lagrange_extrapolate: empty sample set");
  if (s.y.size() != n) throw BadShape("lagrange_extrapolate: x/y length mismatch");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (s.x[i] == s.x[j]) throw DuplicateNodes("lagrange_extrapolate: repeated node");
  for (std::size_t i = 0; i < n; ++i)
    if (x_star == s.x[i]) return s.y[i];

  Real acc(0);
  for (std::size_t j = 0; j < n; ++j) {
    Real basis(1);
    for (std::size_t l = 0; l < n; ++l)
      if (l != j) basis *= (x_star - s.x[l]) / (s.x[j] - s.x[l]);
    acc += basis * s.y[j];
  }
  return acc;
}

inline double lagrange_extrapolate(const SampleSet& s, double x_star) {
  return lagrange_extrapolate<double>(s, x_star);
}

template <class Real>
Real eval_poly(const std::vector<double>& coeffs_ascending, const Real& x) {
  Real acc(0);
  for (std::size_t k = coeffs_ascending.size(); k-- > 0;)
    acc = acc * x + Real(coeffs_ascending[k]);
  return acc;
}

struct FitResult {
  std::vector<double> coeffs;  // monomial, ascending powers, size d+1
  double residual_l2 = 0.0;
  double cond_estimate = 0.0;  // of the orthogonal-basis design matrix
};

// Least-squares degree-d fit. Internally a Chebyshev basis on the node span
// keeps the design well conditioned; the result converts back to monomial
// coefficients, which is what a W certificate is made of.
inline FitResult fit_polynomial(const SampleSet& s, int d) {
  const std::size_t npts = s.size();
  if (d < 0) throw DomainError("fit_polynomial: negative degree");
  if (npts < static_cast<std::size_t>(d) + 1)
    throw BadShape("fit_polynomial: need at least d+1 samples");
  for (std::size_t i = 0; i < npts; ++i)
    for (std::size_t j = i + 1; j < npts; ++j)
      if (s.x[i] == s.x[j]) throw DuplicateNodes("fit_polynomial: repeated node");

  const double a = *std::min_element(s.x.begin(), s.x.end());
  const double b = *std::max_element(s.x.begin(), s.x.end());
  const double span = b - a;
  // alpha*x + beta maps [a, b] onto [-1, 1]; degenerate only for npts == 1
  const double alpha = span > 0.0 ? 2.0 / span : 1.0;
  const double beta = span > 0.0 ? -(a + b) / span : -a;

  Eigen::MatrixXd design(npts, d + 1);
  Eigen::VectorXd rhs(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    const double t = alpha * s.x[i] + beta;
    for (int j = 0; j <= d; ++j) design(static_cast<Eigen::Index>(i), j) = chebyshev_T(j, t);
    rhs(static_cast<Eigen::Index>(i)) = s.y[i];
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double cond = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
  if (cond * cond > tol::fit_condition_limit)
    throw IllConditioned("fit_polynomial: normal-equation condition estimate " +
                         std::to_string(cond * cond));
  const Eigen::VectorXd c = svd.solve(rhs);

  FitResult out;
  out.cond_estimate = cond;
  out.residual_l2 = (design * c - rhs).norm();

  // Monomial coefficients of each T_j(alpha*x + beta) by the same recurrence,
  // run over coefficient vectors.
  std::vector<std::vector<double>> basis(static_cast<std::size_t>(d) + 1);
  basis[0] = {1.0};
  if (d >= 1) basis[1] = {beta, alpha};
  for (int j = 2; j <= d; ++j) {
    const auto& p1 = basis[static_cast<std::size_t>(j - 1)];
    const auto& p2 = basis[static_cast<std::size_t>(j - 2)];
    std::vector<double> next(static_cast<std::size_t>(j) + 1, 0.0);
    for (std::size_t k = 0; k < p1.size(); ++k) {
      next[k] += 2.0 * beta * p1[k];
      next[k + 1] += 2.0 * alpha * p1[k];
    }
    for (std::size_t k = 0; k < p2.size(); ++k) next[k] -= p2[k];
    basis[static_cast<std::size_t>(j)] = std::move(next);
  }
  out.coeffs.assign(static_cast<std::size_t>(d) + 1, 0.0);
  for (int j = 0; j <= d; ++j)
    for (std::size_t k = 0; k < basis[static_cast<std::size_t>(j)].size(); ++k)
      out.coeffs[k] += c(j) * basis[static_cast<std::size_t>(j)][k];
  return out;
}

// --- extrapolation bound calculators --------------------------------------
// All in log space; exp[d(1 + log ...)] clears double range near m = 30.

struct LogBound {
  double log_value = 0.0;  // natural log
  double value = 0.0;      // exp(log_value) when representable, else +inf
  bool representable = true;
};

inline LogBound make_log_bound(double log_value) {
  LogBound b;
  b.log_value = log_value;
  if (log_value < 700.0) {
    b.value = std::exp(log_value);
    b.representable = true;
  } else {
    b.value = std::numeric_limits<double>::infinity();
    b.representable = false;
  }
  return b;
}

struct BoundQuery {
  int d = 1;
  double Delta = 0.5;
  double epsilon = 1.0;
  std::optional<int> L;

  void validate(bool need_L = false) const {
    if (d < 1) throw DomainError("bound query: d must be >= 1");
    if (!(Delta > 0.0 && Delta < 1.0)) throw DomainError("bound query: Delta must be in (0,1)");
    if (!(epsilon > 0.0)) throw DomainError("bound query: epsilon must be positive");
    if (need_L) {
      if (!L) throw DomainError("bound query: L required");
      if (*L < d + 1) throw DomainError("bound query: L must be >= d+1");
    }
  }
};

// Lemma 2: eps * exp[2d(1 + 1/Delta)]
inline LogBound bound_paturi(const BoundQuery& q) {
  q.validate();
  return make_log_bound(std::log(q.epsilon) + 2.0 * q.d * (1.0 + 1.0 / q.Delta));
}

// Lemma 3: eps * (2/Delta)^d
inline LogBound bound_cheb(const BoundQuery& q) {
  q.validate();
  return make_log_bound(std::log(q.epsilon) + q.d * std::log(2.0 / q.Delta));
}

// Lemma 4: eps * exp[d(1 + log(1/Delta))] / sqrt(2 pi d)
inline LogBound bound_lagrange_equispaced(const BoundQuery& q) {
  q.validate();
  return make_log_bound(std::log(q.epsilon) + q.d * (1.0 + std::log(1.0 / q.Delta)) -
                        0.5 * std::log(2.0 * std::numbers::pi * q.d));
}

// Lemma 5: eps * exp[d(1 + log((1 + 1/Delta)(L-1)/d))] / sqrt(2 pi d)
inline LogBound bound_lagrange_subset(const BoundQuery& q) {
  q.validate(true);
  const double inner = (1.0 + 1.0 / q.Delta) * static_cast<double>(*q.L - 1) / q.d;
  return make_log_bound(std::log(q.epsilon) + q.d * (1.0 + std::log(inner)) -
                        0.5 * std::log(2.0 * std::numbers::pi * q.d));
}

// Corollary 1 multiplier |T_d(1 + (|x| - Delta)/Delta)| = T_d(|x|/Delta);
// the caller supplies the eps factor.
inline LogBound bound_paturi_corollary(int d, double Delta, double x) {
  if (d < 1) throw DomainError("bound_paturi_corollary: d must be >= 1");
  if (!(Delta > 0.0 && Delta < 1.0))
    throw DomainError("bound_paturi_corollary: Delta must be in (0,1)");
  if (std::abs(x) < Delta)
    throw DomainError("bound_paturi_corollary: |x| < Delta is outside the corollary");
  return make_log_bound(log_chebyshev_T(d, 1.0 + (std::abs(x) - Delta) / Delta));
}

}  // namespace qcayley
