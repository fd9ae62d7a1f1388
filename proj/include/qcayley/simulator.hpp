#pragma once

#include <cstddef>
#include <vector>

#include "qcayley/circuits.hpp"
#include "qcayley/types.hpp"

namespace qcayley {

inline constexpr int kMaxQubits = 24;

// Dense statevector over qubit-indexed bits (qubit q is bit q of the array
// index). Single-owner mutable scratch; gates touch strided 4-groups in place.
template <class Real>
struct StatevectorT {
  int n = 0;
  std::vector<ComplexT<Real>> amps;

  static StatevectorT zero_state(int n_qubits) {
    if (n_qubits < 1) throw BadShape("statevector: need at least one qubit");
    if (n_qubits > kMaxQubits)
      throw TooManyQubits("statevector: " + std::to_string(n_qubits) + " qubits exceeds guard of " +
                          std::to_string(kMaxQubits));
    StatevectorT sv;
    sv.n = n_qubits;
    sv.amps.assign(std::size_t{1} << n_qubits, ComplexT<Real>(Real(0), Real(0)));
    sv.amps[0] = ComplexT<Real>(Real(1), Real(0));
    return sv;
  }

  // Local gate index l = 2*bit(q1) + bit(q2): q1 carries the high bit.
  void apply_gate(const Mat4T<Real>& g, int q1, int q2) {
    if (q1 == q2 || q1 < 0 || q2 < 0 || q1 >= n || q2 >= n)
      throw BadShape("apply_gate: invalid qubit pair");
    const int lo = q1 < q2 ? q1 : q2;
    const int hi = q1 < q2 ? q2 : q1;
    const std::size_t stride1 = std::size_t{1} << q1;
    const std::size_t stride2 = std::size_t{1} << q2;
    const std::size_t groups = amps.size() >> 2;
    for (std::size_t i = 0; i < groups; ++i) {
      std::size_t base = ((i >> lo) << (lo + 1)) | (i & ((std::size_t{1} << lo) - 1));
      base = ((base >> hi) << (hi + 1)) | (base & ((std::size_t{1} << hi) - 1));
      const std::size_t idx[4] = {base, base | stride2, base | stride1,
                                  base | stride1 | stride2};
      ComplexT<Real> in[4];
      for (int l = 0; l < 4; ++l) in[l] = amps[idx[l]];
      for (int l = 0; l < 4; ++l) {
        ComplexT<Real> acc(Real(0), Real(0));
        for (int lp = 0; lp < 4; ++lp) acc += g(l, lp) * in[lp];
        amps[idx[l]] = acc;
      }
    }
  }

  Real norm_sq() const {
    Real acc(0);
    for (const auto& a : amps) acc += a.real() * a.real() + a.imag() * a.imag();
    return acc;
  }
};

using Statevector = StatevectorT<double>;

template <class Real>
ComplexT<Real> amplitude_zero(const CircuitT<Real>& c) {
  validate_arch(c.arch);
  if (c.gates.size() != c.arch.slots.size())
    throw BadShape("amplitude_zero: gate count does not match slots");
  auto sv = StatevectorT<Real>::zero_state(c.arch.n);
  for (std::size_t k = 0; k < c.gates.size(); ++k)
    sv.apply_gate(c.gates[k], c.arch.slots[k].first, c.arch.slots[k].second);
  return sv.amps[0];
}

inline Complex amplitude_zero(const Circuit& c) { return amplitude_zero<double>(c); }

template <class Real>
Real p0(const ParamCircuit& pc, const Real& x) {
  const ComplexT<Real> a = amplitude_zero(at_x<Real>(pc, x));
  return a.real() * a.real() + a.imag() * a.imag();
}

template <class Real>
Real q_squared(const ParamCircuit& pc, const Real& x) {
  Real out(1);
  for (const GatePath& p : pc.paths) out *= q_factor_sq<Real>(p, x);
  return out;
}

// p_e(x) = |Q(x)|^2 p0(x), the exactly-degree-8m polynomial of Eq. (14).
template <class Real>
Real p_e(const ParamCircuit& pc, const Real& x) {
  return q_squared<Real>(pc, x) * p0<Real>(pc, x);
}

inline double p0(const ParamCircuit& pc, double x) { return p0<double>(pc, x); }
inline double q_squared(const ParamCircuit& pc, double x) { return q_squared<double>(pc, x); }
inline double p_e(const ParamCircuit& pc, double x) { return p_e<double>(pc, x); }

}  // namespace qcayley
