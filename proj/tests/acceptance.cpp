// Acceptance gate: one function per criterion, each printing a single
// [PASS]/[FAIL] verdict line. Run with no arguments for the full gate or
// with a criterion number (1..11) for one criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "qcayley/cayley.hpp"
#include "qcayley/circuits.hpp"
#include "qcayley/experiments.hpp"
#include "qcayley/linalg.hpp"
#include "qcayley/polyextrap.hpp"
#include "qcayley/reduction.hpp"
#include "qcayley/sharp_p.hpp"
#include "qcayley/simulator.hpp"
#include "qcayley/types.hpp"

using namespace qcayley;

namespace {

#define REQUIRE(cond, ...)                                       \
  do {                                                           \
    if (!(cond)) {                                               \
      std::fprintf(stderr, "[FAIL] %s:%d ", __FILE__, __LINE__); \
      std::fprintf(stderr, __VA_ARGS__);                         \
      std::fprintf(stderr, "\n");                                \
      return false;                                              \
    }                                                            \
  } while (0)

Architecture arch_for(int m, int max_n) {
  Architecture a;
  if (max_n <= 4) {
    static const std::vector<std::vector<std::pair<int, int>>> slots = {
        {{0, 1}},
        {{0, 1}, {1, 2}},
        {{0, 1}, {2, 3}, {1, 2}},
        {{0, 1}, {2, 3}, {1, 2}, {0, 1}},
    };
    a.slots = slots[static_cast<std::size_t>(m - 1)];
  } else {
    static const std::vector<std::vector<std::pair<int, int>>> slots = {
        {{0, 1}},
        {{0, 1}, {2, 3}},
        {{0, 1}, {2, 3}, {4, 5}},
        {{0, 1}, {2, 3}, {4, 5}, {1, 2}},
    };
    a.slots = slots[static_cast<std::size_t>(m - 1)];
  }
  a.n = 0;
  for (const auto& s : a.slots) a.n = std::max({a.n, s.first + 1, s.second + 1});
  return a;
}

double big_to_double(const Big256& v) { return static_cast<double>(v); }

Big256 big_abs(const Big256& v) { return v < 0 ? Big256(-v) : v; }

// --- criterion 1 -----------------------------------------------------------

bool criterion_1() {
  std::mt19937_64 rng(0xACC0001);
  for (int t = 0; t < 1000; ++t) {
    GatePath path;
    CMatrix base, target;
    for (int attempt = 0;; ++attempt) {
      base = haar_unitary(4, rng);
      target = haar_unitary(4, rng);
      try {
        path = make_gate_path(base, target, {0, 1});
        break;
      } catch (const EigenvalueNearMinusOne&) {
        REQUIRE(attempt < 8, "trial %d: persistent eigenphase-pi rejections", t);
      }
    }
    const double at_base = max_abs_diff(gate_at(path, 1.0), Mat4(base));
    const double at_target = max_abs_diff(gate_at(path, 0.0), Mat4(target));
    REQUIRE(at_base <= 1e-9, "trial %d: |U(1) - base| = %.3e", t, at_base);
    REQUIRE(at_target <= 1e-9, "trial %d: |U(0) - target| = %.3e", t, at_target);
  }
  return true;
}

// --- criterion 2 -----------------------------------------------------------

bool criterion_2() {
  for (int m = 1; m <= 4; ++m) {
    const Architecture arch = arch_for(m, 4);
    const int d = 8 * m;
    const auto nodes = nodes_chebyshev_extrema(d, 0.5);
    for (int seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(0xACC0002u + 1000u * static_cast<unsigned>(m) +
                          static_cast<unsigned>(seed));
      const Circuit worst = sample_circuit(arch, rng);
      const ParamCircuit pc = make_param_circuit(worst, rng);
      SampleSetT<Big256> s;
      for (double xn : nodes) {
        const Big256 xb(xn);
        s.add(xb, p_e<Big256>(pc, xb));
      }
      std::uniform_real_distribution<double> fresh(-0.49, 0.49);
      for (int k = 0; k < 10; ++k) {
        const Big256 x(fresh(rng));
        const Big256 interp = lagrange_extrapolate<Big256>(s, x);
        const Big256 direct = p_e<Big256>(pc, x);
        const Big256 denom = std::max(big_abs(direct), Big256(1e-300));
        const double rel = big_to_double(big_abs(interp - direct) / denom);
        REQUIRE(rel <= 1e-7, "m=%d seed=%d: relative interpolation error %.3e", m, seed, rel);
      }
    }
  }
  return true;
}

// --- criterion 3 -----------------------------------------------------------

bool criterion_3() {
  int pairs = 0;
  for (int fam = 0; fam < 100; ++fam) {
    const int m = 1 + fam % 3;
    std::mt19937_64 rng(0xACC0003u + static_cast<unsigned>(fam));
    const Circuit worst = sample_circuit(arch_for(m, 4), rng);
    const ParamCircuit pc = make_param_circuit(worst, rng);
    const double q0 = q_squared(pc, 0.0);
    REQUIRE(q0 == 1.0, "family %d: |Q(0)|^2 = %.17g is not exactly 1", fam, q0);
    std::uniform_real_distribution<double> xs(-0.5, 0.5);
    for (int k = 0; k < 10; ++k) {
      const double x = xs(rng);
      const double q = q_squared(pc, x);
      const double lo = std::pow(1.0 - std::abs(x), 8.0 * m);
      const double hi = std::pow(1.0 + std::abs(x), 8.0 * m);
      REQUIRE(q >= lo * (1.0 - 1e-12) && q <= hi * (1.0 + 1e-12),
              "family %d x=%.4f: |Q|^2 = %.17g outside [%.17g, %.17g]", fam, x, q, lo, hi);
      ++pairs;
    }
  }
  REQUIRE(pairs == 1000, "expected 1000 (family, x) pairs, got %d", pairs);
  return true;
}

// --- criterion 4 -----------------------------------------------------------

bool criterion_4() {
  std::mt19937_64 rng(0xACC0004);
  std::uniform_int_distribution<int> ds(1, 16);
  std::uniform_real_distribution<double> deltas(0.05, 0.5);
  std::uniform_real_distribution<double> logeps(-9.0, -2.0);
  std::uniform_real_distribution<double> cs(-1.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const int d = ds(rng);
    const double Delta = deltas(rng);
    const double eps = std::pow(10.0, logeps(rng));
    const auto nodes = nodes_equispaced(d, Delta);
    std::vector<double> coeffs(static_cast<std::size_t>(d) + 1);
    for (auto& c : coeffs) c = cs(rng);
    double peak = 0.0;
    for (double xn : nodes) peak = std::max(peak, std::abs(eval_poly(coeffs, xn)));
    if (peak == 0.0) coeffs[0] = peak = 1.0;
    for (auto& c : coeffs) c *= eps / peak;  // now max_i |p(x_i)| = eps exactly

    SampleSet s;
    for (double xn : nodes) s.add(xn, eval_poly(coeffs, xn));
    const double p1 = lagrange_extrapolate(s, 1.0);
    const LogBound bound = bound_lagrange_equispaced({d, Delta, eps, {}});
    REQUIRE(bound.representable, "trial %d: bound not representable at d=%d", t, d);
    REQUIRE(std::abs(p1) <= bound.value,
            "trial %d: |p(1)| = %.6e exceeds Lemma 4 bound %.6e (d=%d Delta=%.3f)", t,
            std::abs(p1), bound.value, d, Delta);
  }

  // Chebyshev adversary saturates the Lemma 3 value through plain
  // extrapolation. Node conditioning is T_d(1/Delta), about 3e20 at d=16 and
  // Delta=0.1, so the identity is checked at 256 bits.
  for (int d : {2, 4, 8, 16}) {
    for (double Delta : {0.1, 0.3}) {
      const double eps = 1e-3;
      SampleSetT<Big256> s;
      for (double xn : nodes_chebyshev_extrema(d, Delta))
        s.add(Big256(xn), Big256(eps) * chebyshev_T<Big256>(d, Big256(xn) / Big256(Delta)));
      const double extrap = static_cast<double>(lagrange_extrapolate<Big256>(s, Big256(1)));
      const double target =
          static_cast<double>(Big256(eps) * chebyshev_T<Big256>(d, Big256(1) / Big256(Delta)));
      REQUIRE(extrap >= 0.5 * target,
              "d=%d Delta=%.2f: extrapolated %.6e below half of eps*T_d(1/Delta) = %.6e", d,
              Delta, extrap, target);
      REQUIRE(extrap <= target * (1.0 + 1e-6), "d=%d Delta=%.2f: saturation overshoot", d, Delta);
    }
  }
  return true;
}

// --- criterion 5 -----------------------------------------------------------

bool criterion_5() {
  std::mt19937_64 rng(0xACC0005);
  std::uniform_int_distribution<int> ds(1, 16);
  std::uniform_real_distribution<double> deltas(0.05, 0.5);
  std::uniform_real_distribution<double> cs(-1.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const int d = ds(rng);
    std::uniform_int_distribution<int> ls(d + 1, 40);
    const int L = ls(rng);
    const double Delta = deltas(rng);
    const double eps = 1e-4;
    const auto grid = nodes_grid(L, Delta);

    std::vector<int> order(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> coeffs(static_cast<std::size_t>(d) + 1);
    for (auto& c : coeffs) c = cs(rng);
    double peak = 0.0;
    for (int j = 0; j <= d; ++j)
      peak = std::max(peak,
                      std::abs(eval_poly(coeffs, grid[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])])));
    if (peak == 0.0) coeffs[0] = peak = 1.0;
    for (auto& c : coeffs) c *= eps / peak;

    SampleSet s;
    for (int j = 0; j <= d; ++j) {
      const double xn = grid[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
      s.add(xn, eval_poly(coeffs, xn));
    }
    const double p1 = lagrange_extrapolate(s, 1.0);
    const LogBound bound = bound_lagrange_subset({d, Delta, eps, L});
    REQUIRE(bound.representable, "trial %d: subset bound not representable", t);
    REQUIRE(std::abs(p1) <= bound.value,
            "trial %d: |p(1)| = %.6e exceeds Lemma 5 bound %.6e (d=%d L=%d Delta=%.3f)", t,
            std::abs(p1), bound.value, d, L, Delta);
  }
  return true;
}

// --- criterion 6 -----------------------------------------------------------

bool criterion_6() {
  // exact oracle at 256-bit precision: relative 1e-10 against direct p0(1)
  for (int seed = 0; seed < 50; ++seed) {
    const int m = 1 + seed % 4;
    std::mt19937_64 rng(0xACC0006u + static_cast<unsigned>(seed));
    const Circuit worst = sample_circuit(arch_for(m, 6), rng);
    ReductionConfig cfg;
    cfg.Delta = 0.2;
    cfg.d = 8 * m;
    cfg.precision_bits = 256;
    NoisyOracleT<Big256> o;
    const StrongResult res = reduce_strong<Big256>(worst, o, cfg, rng);
    const double rel =
        std::abs(res.estimate - res.direct_p0_1) / std::max(std::abs(res.direct_p0_1), 1e-300);
    REQUIRE(rel <= 1e-10, "seed %d (m=%d): relative error %.3e", seed, m, rel);
  }

  // uniform noise, m = 1, Delta = 0.3: per-trial error inside the Lemma 4 chain
  const double eps = 1e-12;
  for (int trial = 0; trial < 500; ++trial) {
    std::mt19937_64 rng(0xACC1006u + static_cast<unsigned>(trial));
    const Circuit worst = sample_circuit(arch_for(1, 6), rng);
    ReductionConfig cfg;
    cfg.Delta = 0.3;
    cfg.d = 8;
    cfg.epsilon = eps;
    NoisyOracle o;
    o.kind = NoiseKind::Uniform;
    o.epsilon = eps;
    o.rng = std::mt19937_64(0xACC2006u + static_cast<unsigned>(trial));
    const StrongResult res = reduce_strong<double>(worst, o, cfg, rng);
    const double bound =
        bound_lagrange_equispaced({8, 0.3, eps * res.max_q_sq_nodes, {}}).value / res.q1_sq;
    const double err = std::abs(res.estimate - res.direct_p0_1);
    REQUIRE(err <= bound, "trial %d: error %.3e exceeds noise chain bound %.3e", trial, err,
            bound);
  }
  return true;
}

// --- criterion 7 -----------------------------------------------------------

WInstance degree4_instance(double Delta, double delta, double eps, double noise_frac,
                           int corrupt, int L, int d, std::vector<double>& coeffs,
                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> cs(-0.1, 0.1);
  coeffs.assign(static_cast<std::size_t>(d) + 1, 0.0);
  for (auto& c : coeffs) c = cs(rng);
  const double p1 = eval_poly(coeffs, 1.0);
  if (p1 < 0.1) coeffs[0] += 0.1 - p1;

  WInstance w;
  w.d = d;
  w.threshold = static_cast<int>(std::ceil((1.0 + delta) * L / 2.0));
  std::uniform_real_distribution<double> noise(-noise_frac * eps, noise_frac * eps);
  std::vector<int> idx(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto grid = nodes_grid(L, Delta);
  for (int i = 0; i < L; ++i) {
    double y = eval_poly(coeffs, grid[static_cast<std::size_t>(i)]) + noise(rng);
    for (int c = 0; c < corrupt; ++c)
      if (idx[static_cast<std::size_t>(c)] == i) y += 0.7;
    w.samples.add(grid[static_cast<std::size_t>(i)], y);
    w.tol_i.push_back(eps);
  }
  return w;
}

bool criterion_7() {
  const double Delta = 0.4;
  const double eps = 1e-6;

  // synthetic degree-4 instances, 2 corrupted points, exact W, 100/100
  for (int t = 0; t < 100; ++t) {
    std::mt19937_64 rng(0xACC0007u + static_cast<unsigned>(t));
    std::vector<double> coeffs;
    WInstance w = degree4_instance(Delta, 0.5, eps, 0.4, 2, 10, 4, coeffs, rng);
    std::mt19937_64 wrng(0xACC1007u + static_cast<unsigned>(t));
    const WeakResult res = reduce_weak_samples(w, 128, WImpl::Exact, wrng);
    const double truth = eval_poly(coeffs, 1.0);
    const double bound =
        bound_lagrange_subset({4, Delta, 2.0 * eps, 10}).value + std::ldexp(1.0, -120);
    const double err = std::abs(res.l - truth);
    REQUIRE(err <= bound, "instance %d: |l - p_e(1)| = %.6e exceeds %.6e", t, err, bound);
  }

  // RANSAC W against exact W on 1000 small instances
  int true_to_false = 0;
  for (int t = 0; t < 1000; ++t) {
    std::mt19937_64 rng(0xACC2007u + static_cast<unsigned>(t));
    std::vector<double> coeffs;
    WInstance w = degree4_instance(Delta, 0.2, eps, 0.4, t % 5, 10, 2, coeffs, rng);
    std::uniform_real_distribution<double> ls(-0.2, 1.2);
    const double l = ls(rng);
    w.l = l;
    w.r = l + 0.4;
    const bool exact = w_oracle_exact(w).accepted;
    std::mt19937_64 wrng(0xACC3007u + static_cast<unsigned>(t));
    const bool ransac = w_oracle_ransac(w, 400, wrng).accepted;
    REQUIRE(!(ransac && !exact), "instance %d: ransac accepted what exact W rejects", t);
    if (exact && !ransac) ++true_to_false;
  }
  REQUIRE(true_to_false <= 1, "%d true-to-false ransac disagreements (allowed 1)",
          true_to_false);
  return true;
}

// --- criterion 8 -----------------------------------------------------------

CountingInstance instance_from_bits(int p, std::uint64_t bits) {
  CountingInstance inst;
  inst.p = p;
  inst.table.resize(std::size_t{1} << p);
  for (std::size_t y = 0; y < inst.table.size(); ++y)
    inst.table[y] = static_cast<unsigned char>((bits >> y) & 1u);
  return inst;
}

bool criterion_8() {
  NoisyOracle exact;
  long circuits = 0;
  for (int p = 1; p <= 4; ++p) {
    const std::uint64_t tables = std::uint64_t{1} << (std::size_t{1} << p);
    for (std::uint64_t bits = 0; bits < tables; ++bits) {
      const CountingInstance inst = instance_from_bits(p, bits);
      const double f = static_cast<double>(inst.count());

      const Complex amp = amplitude_zero(build_fenner_circuit(inst));
      const double want = 1.0 - f / std::ldexp(1.0, p - 1);
      ++circuits;
      REQUIRE(std::abs(amp - Complex(want, 0.0)) <= 1e-12,
              "p=%d table %llu: base amplitude off by %.3e", p,
              static_cast<unsigned long long>(bits), std::abs(amp - Complex(want, 0.0)));

      const CountingInstance aug = g_augment(inst);
      const Complex aamp = amplitude_zero(build_fenner_circuit(aug));
      const double awant = 1.0 - static_cast<double>(aug.count()) / std::ldexp(1.0, aug.p - 1);
      ++circuits;
      REQUIRE(std::abs(aamp - Complex(awant, 0.0)) <= 1e-12,
              "p=%d table %llu: augmented amplitude off by %.3e", p,
              static_cast<unsigned long long>(bits), std::abs(aamp - Complex(awant, 0.0)));

      const std::int64_t got = solve_counting(inst, exact, 1.0);
      REQUIRE(got == inst.count(), "p=%d table %llu: recovered %lld, expected %lld", p,
              static_cast<unsigned long long>(bits), static_cast<long long>(got),
              static_cast<long long>(inst.count()));
    }
  }
  std::fprintf(stderr, "       criterion 8 note: exhaustive p <= 4 exercised %ld circuits\n",
               circuits);

  // identity padding leaves the probability unchanged for k up to 64
  std::mt19937_64 rng(0xACC0008);
  std::bernoulli_distribution bit(0.5);
  for (int t = 0; t < 20; ++t) {
    CountingInstance inst;
    inst.p = 4;
    inst.table.resize(16);
    for (auto& v : inst.table) v = bit(rng) ? 1 : 0;
    const Circuit c = build_fenner_circuit(inst);
    const double before = std::norm(amplitude_zero(c));
    for (int k : {1, 16, 64}) {
      const double after = std::norm(amplitude_zero(pad_identity(c, k)));
      REQUIRE(std::abs(after - before) <= 1e-12, "padding k=%d changed probability by %.3e", k,
              std::abs(after - before));
    }
  }

  // uniform oracle noise below the decoding radius: exact recovery, p = 3
  for (int t = 0; t < 1000; ++t) {
    std::mt19937_64 trng(0xACC1008u + static_cast<unsigned>(t));
    CountingInstance inst;
    inst.p = 3;
    inst.table.resize(8);
    for (auto& v : inst.table) v = bit(trng) ? 1 : 0;
    const int n = inst.p + 1;
    NoisyOracle o;
    o.kind = NoiseKind::Uniform;
    o.epsilon = std::ldexp(1.0, -2 * n);
    o.rng = std::mt19937_64(0xACC2008u + static_cast<unsigned>(t));
    const std::int64_t got = solve_counting(inst, o, 1.0);
    REQUIRE(got == inst.count(), "noisy trial %d: recovered %lld, expected %lld", t,
            static_cast<long long>(got), static_cast<long long>(inst.count()));
  }
  return true;
}

// --- criterion 9 -----------------------------------------------------------

bool criterion_9() {
  std::mt19937_64 rng(0xACC0009);
  const int trials = 100000;
  for (double delta : {0.05, 0.1, 0.2, 0.24}) {
    for (int L : {11, 41, 101}) {
      const double p_good = 0.75 + delta;
      const int threshold = static_cast<int>(std::ceil((1.0 + delta) * L / 2.0));
      const double exact = binomial_tail(L, p_good, threshold);
      const double floor = markov_floor(delta, 0.0, 1, 0.0);
      REQUIRE(exact >= floor, "delta=%.2f L=%d: exact tail %.6f below floor %.6f", delta, L,
              exact, floor);

      std::binomial_distribution<int> bin(L, p_good);
      long hits = 0;
      for (int t = 0; t < trials; ++t)
        if (bin(rng) >= threshold) ++hits;
      const double mc = static_cast<double>(hits) / trials;
      const double sigma = std::sqrt(std::max(exact * (1.0 - exact), 0.0) / trials);
      const double slack = 3.0 * sigma + 2.0 / trials;  // counting resolution
      REQUIRE(std::abs(mc - exact) <= slack,
              "delta=%.2f L=%d: monte carlo %.6f vs exact %.6f (slack %.2e)", delta, L, mc,
              exact, slack);
    }
  }
  return true;
}

// --- criterion 10 ----------------------------------------------------------

bool criterion_10() {
  const double window = 3.0 * std::numbers::pi / 4.0;
  const double h_cap = std::tan(3.0 * std::numbers::pi / 8.0);
  const double Delta = 0.01;
  std::mt19937_64 rng(0xACC000A);
  std::uniform_real_distribution<double> thetas(0.0, Delta);
  for (int t = 0; t < 1000; ++t) {
    const CMatrix u = haar_unitary(4, rng);
    const CMatrix c = haar_unitary(4, rng);
    const PhaseAlignment al = phase_align(u, c);

    const UnitaryEigen post = eig_unitary((u.adjoint() * al.c_aligned).eval());
    const double worst_phase = post.phases.cwiseAbs().maxCoeff();
    REQUIRE(worst_phase <= window + 1e-12, "pair %d: aligned eigenphase %.12f outside window",
            t, worst_phase);

    const GatePath path = make_gate_path(u, al.c_aligned, {0, 1});
    const double hnorm = h_inf_norm(path);
    REQUIRE(hnorm <= h_cap + 1e-9, "pair %d: ||h||_inf = %.12f exceeds tan(3pi/8)", t, hnorm);

    for (double theta : {Delta, thetas(rng)}) {
      const double move = max_abs_diff(gate_at(path, 1.0), gate_at(path, 1.0 - theta));
      REQUIRE(move <= 2.0 * Delta * hnorm + 1e-9,
              "pair %d theta=%.4f: gate moved %.3e, cap %.3e", t, theta, move,
              2.0 * Delta * hnorm + 1e-9);
    }
  }
  return true;
}

// --- criterion 11 ----------------------------------------------------------

bool criterion_11() {
  ExperimentConfig cfg;
  cfg.experiment = "tvd-proxy";
  cfg.trials = 100000;
  cfg.seed = 0xACC000B;
  cfg.jobs = static_cast<int>(std::max(1u, std::min(4u, std::thread::hardware_concurrency())));
  const ExperimentOutcome out = run_experiment(cfg);
  REQUIRE(out.pass, "tvd-proxy experiment reported failure (zero point or monotonicity)");
  REQUIRE(out.records.is_array() && !out.records.empty(), "tvd-proxy emitted no records");
  return true;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  bool (*fn)();
};

const Criterion kCriteria[] = {
    {1, "cayley path endpoints", 10.0, criterion_1},
    {2, "degree-8m interpolation identity", 120.0, criterion_2},
    {3, "|Q(x)|^2 envelope", 30.0, criterion_3},
    {4, "equispaced extrapolation bound and chebyshev saturation", 60.0, criterion_4},
    {5, "grid-subset extrapolation bound", 60.0, criterion_5},
    {6, "strong reduction", 300.0, criterion_6},
    {7, "weak reduction", 600.0, criterion_7},
    {8, "sharp-p encoding", 300.0, criterion_8},
    {9, "binomial concentration", 60.0, criterion_9},
    {10, "phase alignment", 60.0, criterion_10},
    {11, "tvd proxy trend", 300.0, criterion_11},
};

}  // namespace

int main(int argc, char** argv) {
  int which = 0;
  if (argc > 1) {
    which = std::atoi(argv[1]);
    if (which < 1 || which > 11) {
      std::fprintf(stderr, "usage: %s [criterion 1..11]\n", argv[0]);
      return 2;
    }
  }

  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (which != 0 && c.id != which) continue;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      std::fprintf(stderr, "[FAIL] criterion %d threw: %s\n", c.id, e.what());
      ok = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && secs > c.limit_seconds) {
      std::fprintf(stderr, "[FAIL] criterion %d exceeded the %.0f s budget (took %.1f s)\n",
                   c.id, c.limit_seconds, secs);
      ok = false;
    }
    std::printf("[%s] criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", c.id, c.name, secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
