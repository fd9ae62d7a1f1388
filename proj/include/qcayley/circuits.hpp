#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qcayley/cayley.hpp"
#include "qcayley/linalg.hpp"
#include "qcayley/types.hpp"

namespace qcayley {

struct Architecture {
  int n = 0;
  std::vector<std::pair<int, int>> slots;
};

inline void validate_arch(const Architecture& arch) {
  if (arch.n <= 0) throw BadShape("architecture: qubit count must be positive");
  if (arch.slots.empty()) throw BadShape("architecture: needs at least one slot");
  for (const auto& [q1, q2] : arch.slots) {
    if (q1 < 0 || q2 < 0 || q1 >= arch.n || q2 >= arch.n || q1 == q2)
      throw BadShape("architecture: slot (" + std::to_string(q1) + "," + std::to_string(q2) +
                     ") out of range for n=" + std::to_string(arch.n));
  }
}

template <class Real>
struct CircuitT {
  Architecture arch;
  std::vector<Mat4T<Real>> gates;  // aligned with arch.slots, applied in slot order
};

using Circuit = CircuitT<double>;

// Family of circuits along per-gate Cayley paths. x = 1 reproduces the fixed
// worst-case circuit, x = 0 is Haar-distributed over the architecture.
struct ParamCircuit {
  Architecture arch;
  std::vector<GatePath> paths;
};

// Ginibre draw, thin QR, then divide out the R-diagonal phases. This is the
// standard exact-Haar construction; plain QR alone is biased.
inline CMatrix haar_unitary(int dim, std::mt19937_64& rng) {
  if (dim != 2 && dim != 4) throw BadShape("haar_unitary: dim must be 2 or 4");
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) z(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= (mag > 0.0) ? (d / mag) : Complex(1.0, 0.0);
  }
  return q;
}

// u2 acting on the pair's first qubit (on_first) or second, as a 4x4 gate in
// the local-index convention l = 2*bit(q1) + bit(q2).
inline Mat4 embed_one_qubit(const Mat2& u2, bool on_first) {
  Mat4 out = Mat4::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int ap = 0; ap < 2; ++ap)
        for (int bp = 0; bp < 2; ++bp) {
          const Complex val = on_first ? (u2(a, ap) * static_cast<double>(b == bp))
                                       : (u2(b, bp) * static_cast<double>(a == ap));
          out(2 * a + b, 2 * ap + bp) = val;
        }
  return out;
}

inline Circuit sample_circuit(const Architecture& arch, std::mt19937_64& rng) {
  validate_arch(arch);
  Circuit c;
  c.arch = arch;
  c.gates.reserve(arch.slots.size());
  for (std::size_t k = 0; k < arch.slots.size(); ++k) c.gates.push_back(haar_unitary(4, rng));
  return c;
}

// Per slot: target = C_k * H_k with fresh Haar H_k, so h_k = f^{-1}(H_k).
// A Haar draw whose eigenphase grazes pi (probability ~ eta) gets one
// phase-alignment retry, which pushes all eigenphases into [-3pi/4, 3pi/4].
inline ParamCircuit make_param_circuit(const Circuit& worst, std::mt19937_64& rng) {
  validate_arch(worst.arch);
  if (worst.gates.size() != worst.arch.slots.size())
    throw BadShape("make_param_circuit: gate count does not match slots");
  ParamCircuit pc;
  pc.arch = worst.arch;
  pc.paths.reserve(worst.gates.size());
  for (std::size_t k = 0; k < worst.gates.size(); ++k) {
    const CMatrix& base = worst.gates[k];
    if (!is_unitary(base)) throw NotUnitary("make_param_circuit: worst gate " + std::to_string(k));
    const CMatrix target = base * haar_unitary(4, rng);
    const auto slot = worst.arch.slots[k];
    try {
      pc.paths.push_back(make_gate_path(base, target, slot));
    } catch (const EigenvalueNearMinusOne&) {
      const PhaseAlignment al = phase_align(base, target);
      pc.paths.push_back(make_gate_path(base, al.c_aligned, slot));
    }
  }
  return pc;
}

template <class Real>
CircuitT<Real> at_x(const ParamCircuit& pc, const Real& x) {
  CircuitT<Real> c;
  c.arch = pc.arch;
  c.gates.reserve(pc.paths.size());
  for (const GatePath& p : pc.paths) c.gates.push_back(gate_at<Real>(p, x));
  return c;
}

inline Circuit at_x(const ParamCircuit& pc, double x) { return at_x<double>(pc, x); }

// line-brickwork: alternate even pairs (0,1),(2,3),... and odd pairs
// (1,2),(3,4),... per layer. grid: row-major s x s lattice, each layer lists
// all horizontal edges then all vertical edges.
inline Architecture preset_arch(const std::string& kind, int n, int depth) {
  if (n < 2) throw BadShape("preset_arch: need at least two qubits");
  if (depth < 1) throw BadShape("preset_arch: depth must be positive");
  Architecture arch;
  arch.n = n;
  if (kind == "line-brickwork") {
    for (int layer = 0; layer < depth; ++layer) {
      const int start = layer % 2;
      for (int q = start; q + 1 < n; q += 2) arch.slots.emplace_back(q, q + 1);
    }
  } else if (kind == "grid") {
    const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (s * s != n) throw BadShape("preset_arch: grid requires square qubit count");
    if (s < 2) throw BadShape("preset_arch: grid side must be at least 2");
    for (int layer = 0; layer < depth; ++layer) {
      for (int row = 0; row < s; ++row)
        for (int col = 0; col + 1 < s; ++col)
          arch.slots.emplace_back(row * s + col, row * s + col + 1);
      for (int row = 0; row + 1 < s; ++row)
        for (int col = 0; col < s; ++col)
          arch.slots.emplace_back(row * s + col, (row + 1) * s + col);
    }
  } else {
    throw BadShape("preset_arch: unknown kind '" + kind + "'");
  }
  validate_arch(arch);
  return arch;
}

}  // namespace qcayley
