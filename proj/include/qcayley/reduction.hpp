#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "qcayley/circuits.hpp"
#include "qcayley/polyextrap.hpp"
#include "qcayley/simplex.hpp"
#include "qcayley/simulator.hpp"
#include "qcayley/types.hpp"

namespace qcayley {

enum class NoiseKind { Exact, Uniform, ChebyshevAdversary, BernoulliCorrupt };

// Simulated oracle for |<0^n|C|0^n>|^2. The inner value is the simulator's;
// the noise channel sits on top. ChebyshevAdversary needs to know the path
// parameter x of the queried circuit (the circuit alone does not carry it),
// so query takes an x hint that other models ignore.
template <class Real>
struct NoisyOracleT {
  NoiseKind kind = NoiseKind::Exact;
  double epsilon = 0.0;     // Uniform / ChebyshevAdversary amplitude
  int cheb_d = 8;           // ChebyshevAdversary shape
  double cheb_Delta = 0.1;  // ChebyshevAdversary shape
  double q_fail = 0.0;      // BernoulliCorrupt failure probability
  bool correlated = false;  // BernoulliCorrupt: one coin for the whole trial
  std::mt19937_64 rng{0};

  std::optional<bool> trial_coin;  // memo for the correlated mode

  Real query(const CircuitT<Real>& c,
             double x_hint = std::numeric_limits<double>::quiet_NaN()) {
    const ComplexT<Real> a = amplitude_zero<Real>(c);
    const Real truth = a.real() * a.real() + a.imag() * a.imag();
    switch (kind) {
      case NoiseKind::Exact:
        return truth;
      case NoiseKind::Uniform: {
        std::uniform_real_distribution<double> noise(-epsilon, epsilon);
        return truth + Real(noise(rng));
      }
      case NoiseKind::ChebyshevAdversary: {
        if (std::isnan(x_hint))
          throw DomainError("oracle: ChebyshevAdversary needs the path parameter x");
        return truth + Real(epsilon * chebyshev_T(cheb_d, x_hint / cheb_Delta));
      }
      case NoiseKind::BernoulliCorrupt: {
        bool fail;
        if (correlated) {
          if (!trial_coin)
            trial_coin = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < q_fail;
          fail = *trial_coin;
        } else {
          fail = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < q_fail;
        }
        if (!fail) return truth;
        return Real(std::uniform_real_distribution<double>(0.0, 2.0)(rng));
      }
    }
    throw DomainError("oracle: unknown noise kind");
  }
};

using NoisyOracle = NoisyOracleT<double>;

template <class Real>
Real query(NoisyOracleT<Real>& o, const CircuitT<Real>& c,
           double x_hint = std::numeric_limits<double>::quiet_NaN()) {
  return o.query(c, x_hint);
}

struct ReductionConfig {
  double Delta = 0.1;    // extrapolation range
  double delta = 0.1;    // weak oracle's majority margin
  double epsilon = 0.0;  // assumed per-query oracle error
  int d = 8;             // polynomial degree, 8m
  int L = 0;             // weak grid size; 0 means ceil((d+1)/delta)
  int binary_iters = 128;
  int precision_bits = 53;
};

// The paper wants Delta = Theta(m^-k), k > 2; this is that prescription with
// k = 3 and constant 1/2.
inline double default_delta(int m) {
  if (m < 1) throw DomainError("default_delta: m must be positive");
  return 1.0 / (2.0 * static_cast<double>(m) * m * m);
}

// --- strong reduction (direct extrapolation) ------------------------------

struct StrongResult {
  double estimate = 0.0;      // extrapolated p_e(1) / |Q(1)|^2
  double estimate_alt = 0.0;  // same numerator / |Q(1+Delta)|^2 (see note)
  double extrapolated = 0.0;  // raw extrapolated value at x = 1
  double q1_sq = 0.0;         // |Q(1)|^2
  double q1pd_sq = 0.0;       // |Q(1+Delta)|^2
  double max_q_sq_nodes = 0.0;
  double direct_p0_1 = 0.0;   // simulator value of p0 at x = 1, same family
};

// Lemma 6 shape: sample y_i = oracle(C(x_i)) * |Q(x_i)|^2 at the 8m+1
// equispaced nodes in [-Delta, Delta], extrapolate the degree-8m polynomial
// to x = 1, undo the |Q|^2 normalization. The proof's error chain divides by
// |Q(1+Delta)|^2 where the evaluation point is 1; both scalings are reported
// and `estimate` uses |Q(1)|^2.
template <class Real>
StrongResult reduce_strong(const Circuit& worst, NoisyOracleT<Real>& o,
                           const ReductionConfig& cfg, std::mt19937_64& rng) {
  const int m = static_cast<int>(worst.gates.size());
  if (cfg.d != 8 * m) throw DomainError("reduce_strong: cfg.d must equal 8m");
  if (!(cfg.Delta > 0.0 && cfg.Delta < 1.0))
    throw DomainError("reduce_strong: Delta must be in (0,1)");

  const ParamCircuit pc = make_param_circuit(worst, rng);
  const std::vector<double> nodes = nodes_equispaced(cfg.d, cfg.Delta);

  SampleSetT<Real> s;
  Real max_q(0);
  for (double xj : nodes) {
    const Real x(xj);
    const Real q_sq = q_squared<Real>(pc, x);
    const Real y = o.query(at_x<Real>(pc, x), xj) * q_sq;
    s.add(x, y);
    if (q_sq > max_q) max_q = q_sq;
  }
  const Real extrapolated = lagrange_extrapolate<Real>(s, Real(1));
  const Real q1 = q_squared<Real>(pc, Real(1));
  const Real q1pd = q_squared<Real>(pc, Real(1) + Real(cfg.Delta));

  StrongResult out;
  out.extrapolated = static_cast<double>(extrapolated);
  out.q1_sq = static_cast<double>(q1);
  out.q1pd_sq = static_cast<double>(q1pd);
  out.max_q_sq_nodes = static_cast<double>(max_q);
  out.estimate = static_cast<double>(extrapolated / q1);
  out.estimate_alt = static_cast<double>(extrapolated / q1pd);
  out.direct_p0_1 = static_cast<double>(p0<Real>(pc, Real(1)));
  return out;
}

// --- the W oracle ---------------------------------------------------------

struct WInstance {
  int d = 0;
  SampleSet samples;          // the L grid pairs
  std::vector<double> tol_i;  // per-point inlier tolerance, |Q(x_i)|^2 * eps
  int threshold = 0;          // ceil((1+delta) L / 2)
  double l = 0.0;
  double r = 2.0;

  void validate() const {
    if (d < 0) throw DomainError("W instance: negative degree");
    if (samples.size() == 0) throw DomainError("W instance: empty sample set");
    if (samples.size() != tol_i.size()) throw DomainError("W instance: tolerance count mismatch");
    for (double t : tol_i)
      if (!(t >= 0.0)) throw DomainError("W instance: tolerances must be nonnegative");
    if (threshold < 1 || threshold > static_cast<int>(samples.size()))
      throw DomainError("W instance: threshold out of range");
    if (!(l < r)) throw DomainError("W instance: need l < r");
  }
};

struct WDecision {
  bool accepted = false;
  std::vector<double> witness;  // monomial coefficients a_0..a_d when accepted
};

namespace detail {

// |p(x_i) - y_i| <= tol_i for i in subset, and l <= p(1) <= r - margin, as
// one A a <= b system over the d+1 monomial coefficients.
inline LpFeasibility subset_feasible(const WInstance& w, const std::vector<int>& subset,
                                     double margin) {
  const int nv = w.d + 1;
  const int rows = 2 * static_cast<int>(subset.size()) + 2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, nv);
  Eigen::VectorXd b(rows);
  int row = 0;
  for (int i : subset) {
    const double xi = w.samples.x[static_cast<std::size_t>(i)];
    double pw = 1.0;
    for (int j = 0; j < nv; ++j) {
      a(row, j) = pw;
      a(row + 1, j) = -pw;
      pw *= xi;
    }
    b(row) = w.samples.y[static_cast<std::size_t>(i)] + w.tol_i[static_cast<std::size_t>(i)];
    b(row + 1) = -(w.samples.y[static_cast<std::size_t>(i)] - w.tol_i[static_cast<std::size_t>(i)]);
    row += 2;
  }
  for (int j = 0; j < nv; ++j) {
    a(row, j) = 1.0;
    a(row + 1, j) = -1.0;
  }
  b(row) = w.r - margin;
  b(row + 1) = -w.l;
  return lp_feasible(a, b);
}

}  // namespace detail

// Exact decision by enumerating every size-threshold subset and testing LP
// feasibility. The half-open right end is handled by a relative margin:
// p(1) <= r - 2^-60 (r - l).
inline WDecision w_oracle_exact(const WInstance& w) {
  w.validate();
  const int L = static_cast<int>(w.samples.size());
  if (L > 24)
    throw TooLarge("w_oracle_exact: L = " + std::to_string(L) +
                   " exceeds the enumeration guard of 24; use RANSAC mode");
  if (w.threshold < w.d + 1)
    throw TooLarge("w_oracle_exact: threshold below d+1 breaks the exactness guard");

  const double margin = std::ldexp(w.r - w.l, -60);
  std::vector<int> subset(static_cast<std::size_t>(w.threshold));
  for (int i = 0; i < w.threshold; ++i) subset[static_cast<std::size_t>(i)] = i;

  WDecision out;
  while (true) {
    const LpFeasibility lp = detail::subset_feasible(w, subset, margin);
    if (lp.feasible) {
      out.accepted = true;
      out.witness = lp.witness;
      return out;
    }
    // next combination in lexicographic order
    int k = w.threshold - 1;
    while (k >= 0 && subset[static_cast<std::size_t>(k)] == L - w.threshold + k) --k;
    if (k < 0) break;
    ++subset[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < w.threshold; ++j)
      subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

// One-sided randomized stand-in. Each iteration interpolates a random
// (d+1)-subset to propose a candidate inlier set (collected with a slackened
// residual, since an interpolant through noisy points overshoots the
// tolerance elsewhere), then certifies the candidates with the same LP the
// exact oracle uses: true tolerances plus the interval constraint. True
// always comes with a checked certificate; false may be a false negative.
inline WDecision w_oracle_ransac(const WInstance& w, int iters, std::mt19937_64& rng) {
  w.validate();
  const int L = static_cast<int>(w.samples.size());
  if (w.d + 1 > L) return {};
  std::vector<int> order(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i) order[static_cast<std::size_t>(i)] = i;

  const double margin = std::ldexp(w.r - w.l, -60);
  std::set<std::vector<int>> certified_infeasible;

  WDecision out;
  for (int it = 0; it < iters; ++it) {
    std::shuffle(order.begin(), order.end(), rng);
    SampleSet sub;
    for (int j = 0; j <= w.d; ++j) {
      const int i = order[static_cast<std::size_t>(j)];
      sub.add(w.samples.x[static_cast<std::size_t>(i)], w.samples.y[static_cast<std::size_t>(i)]);
    }
    FitResult fit;
    try {
      fit = fit_polynomial(sub, w.d);
    } catch (const IllConditioned&) {
      continue;
    }
    std::vector<std::pair<double, int>> candidates;  // (residual slack ratio, index)
    for (int i = 0; i < L; ++i) {
      const double pv = eval_poly(fit.coeffs, w.samples.x[static_cast<std::size_t>(i)]);
      const double resid = std::abs(pv - w.samples.y[static_cast<std::size_t>(i)]);
      const double cap = 3.0 * w.tol_i[static_cast<std::size_t>(i)] +
                         tol::lp_feasibility *
                             std::max(1.0, std::abs(w.samples.y[static_cast<std::size_t>(i)]));
      if (resid <= cap) candidates.emplace_back(resid / std::max(cap, 1e-300), i);
    }
    if (static_cast<int>(candidates.size()) < w.threshold) continue;
    std::sort(candidates.begin(), candidates.end());

    // drop the worst-slack candidates one at a time down to the threshold
    for (int size = static_cast<int>(candidates.size()); size >= w.threshold; --size) {
      std::vector<int> subset(static_cast<std::size_t>(size));
      for (int j = 0; j < size; ++j) subset[static_cast<std::size_t>(j)] = candidates[static_cast<std::size_t>(j)].second;
      std::sort(subset.begin(), subset.end());
      if (certified_infeasible.contains(subset)) continue;
      const LpFeasibility lp = detail::subset_feasible(w, subset, margin);
      if (lp.feasible) {
        out.accepted = true;
        out.witness = lp.witness;
        return out;
      }
      certified_infeasible.insert(std::move(subset));
    }
  }
  return out;
}

enum class WImpl { Exact, Ransac };

// --- weak reduction (Algorithm 1) -----------------------------------------

struct WeakResult {
  double l = 0.0;         // the returned binary-search floor, approx p_e(1)
  double estimate = 0.0;  // l / |Q(1)|^2
  double q1_sq = 0.0;
  double max_q_sq_nodes = 0.0;
  std::vector<double> certificate;  // witness of the last accepting W call
  int w_calls = 0;
  int w_accepts = 0;
};

namespace detail {

inline WDecision w_decide(const WInstance& w, WImpl impl, int ransac_iters,
                          std::mt19937_64& rng) {
  return impl == WImpl::Exact ? w_oracle_exact(w) : w_oracle_ransac(w, ransac_iters, rng);
}

// Binary search over [0, 2) maintaining the invariant that the current
// interval admits a certificate; the witness of the most recent accepting
// call always has p(1) inside the current interval.
inline WeakResult weak_binary_search(WInstance w, int binary_iters, WImpl impl,
                                     int ransac_iters, std::mt19937_64& rng) {
  WeakResult out;
  w.l = 0.0;
  w.r = 2.0;
  WDecision first = w_decide(w, impl, ransac_iters, rng);
  ++out.w_calls;
  if (!first.accepted)
    throw NoFeasiblePolynomial(
        "weak reduction: no inlier-majority polynomial lands in [0, 2)");
  ++out.w_accepts;
  out.certificate = first.witness;

  double lo = 0.0;
  double hi = 2.0;
  for (int it = 0; it < binary_iters; ++it) {
    const double mid = (lo + hi) / 2.0;
    if (mid <= lo || mid >= hi) break;  // double resolution floor
    w.l = lo;
    w.r = mid;
    const WDecision dec = w_decide(w, impl, ransac_iters, rng);
    ++out.w_calls;
    if (dec.accepted) {
      ++out.w_accepts;
      out.certificate = dec.witness;
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.l = lo;
  return out;
}

}  // namespace detail

template <class Real>
WeakResult reduce_weak(const Circuit& worst, NoisyOracleT<Real>& o, const ReductionConfig& cfg,
                       WImpl impl, std::mt19937_64& rng, int ransac_iters = 200) {
  const int m = static_cast<int>(worst.gates.size());
  if (cfg.d != 8 * m) throw DomainError("reduce_weak: cfg.d must equal 8m");
  if (!(cfg.Delta > 0.0 && cfg.Delta < 1.0))
    throw DomainError("reduce_weak: Delta must be in (0,1)");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw DomainError("reduce_weak: delta must be in (0,1)");

  const int L = cfg.L > 0
                    ? cfg.L
                    : static_cast<int>(std::ceil(static_cast<double>(cfg.d + 1) / cfg.delta));
  if (L < cfg.d + 1) throw DomainError("reduce_weak: L must be at least d+1");

  const ParamCircuit pc = make_param_circuit(worst, rng);
  const std::vector<double> nodes = nodes_grid(L, cfg.Delta);

  WInstance w;
  w.d = cfg.d;
  w.threshold = static_cast<int>(std::ceil((1.0 + cfg.delta) * L / 2.0));
  double max_q = 0.0;
  for (double xi : nodes) {
    const Real x(xi);
    const Real q_sq = q_squared<Real>(pc, x);
    const Real y = o.query(at_x<Real>(pc, x), xi) * q_sq;
    w.samples.add(xi, static_cast<double>(y));
    w.tol_i.push_back(static_cast<double>(q_sq) * cfg.epsilon);
    max_q = std::max(max_q, static_cast<double>(q_sq));
  }

  WeakResult out = detail::weak_binary_search(w, cfg.binary_iters, impl, ransac_iters, rng);
  out.q1_sq = static_cast<double>(q_squared<Real>(pc, Real(1)));
  out.max_q_sq_nodes = max_q;
  out.estimate = out.l / out.q1_sq;
  return out;
}

// Synthetic entry point: run Algorithm 1's search on an externally built
// sample set (known-polynomial studies, corruption experiments).
inline WeakResult reduce_weak_samples(const WInstance& instance, int binary_iters, WImpl impl,
                                      std::mt19937_64& rng, int ransac_iters = 200) {
  WInstance w = instance;
  w.validate();
  return detail::weak_binary_search(w, binary_iters, impl, ransac_iters, rng);
}

inline bool intersection_size_check(const std::vector<int>& s1, const std::vector<int>& s2,
                                    int L, double /*delta*/, int d) {
  for (int i : s1)
    if (i < 0 || i >= L) throw DomainError("intersection_size_check: index out of range");
  for (int i : s2)
    if (i < 0 || i >= L) throw DomainError("intersection_size_check: index out of range");
  std::vector<bool> in1(static_cast<std::size_t>(L), false);
  for (int i : s1) in1[static_cast<std::size_t>(i)] = true;
  int common = 0;
  std::vector<bool> seen(static_cast<std::size_t>(L), false);
  for (int i : s2)
    if (in1[static_cast<std::size_t>(i)] && !seen[static_cast<std::size_t>(i)]) {
      seen[static_cast<std::size_t>(i)] = true;
      ++common;
    }
  return common >= d + 1;
}

}  // namespace qcayley
