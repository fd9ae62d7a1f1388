#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "qcayley/circuits.hpp"
#include "qcayley/reduction.hpp"
#include "qcayley/types.hpp"

namespace qcayley {

// A #P instance with the input x baked in: the truth table of M(x, .) over
// the p witness bits. Index y uses bit i of the integer for witness bit i.
struct CountingInstance {
  int p = 0;
  std::vector<unsigned char> table;  // 2^p entries, each 0 or 1

  void validate() const {
    if (p < 1 || p > 16) throw DomainError("counting instance: p must be in [1, 16]");
    if (table.size() != (std::size_t{1} << p))
      throw BadShape("counting instance: table must hold 2^p entries");
    for (unsigned char v : table)
      if (v > 1) throw DomainError("counting instance: table entries must be 0 or 1");
  }

  std::int64_t count() const {
    std::int64_t f = 0;
    for (unsigned char v : table) f += v;
    return f;
  }
};

// One line of 2^p characters in {0,1}; position i is M(y) for y = i with the
// usual big-endian integer notation.
inline CountingInstance parse_table_line(const std::string& raw) {
  std::string line = raw;
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == ' '))
    line.pop_back();
  if (line.empty()) throw ParseError("truth table: empty line");
  const std::size_t len = line.size();
  if ((len & (len - 1)) != 0 || len < 2)
    throw ParseError("truth table: length " + std::to_string(len) + " is not a power of two >= 2");
  CountingInstance inst;
  inst.p = 0;
  for (std::size_t l = len; l > 1; l >>= 1) ++inst.p;
  inst.table.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    if (line[i] != '0' && line[i] != '1')
      throw ParseError("truth table: character '" + std::string(1, line[i]) + "' at position " +
                       std::to_string(i) + " is not 0/1");
    inst.table[i] = static_cast<unsigned char>(line[i] - '0');
  }
  return inst;
}

namespace detail {

inline Mat4 cnot_gate() {
  Mat4 g = Mat4::Zero();  // control is the slot's first qubit (high local bit)
  g(0, 0) = 1.0;
  g(1, 1) = 1.0;
  g(2, 3) = 1.0;
  g(3, 2) = 1.0;
  return g;
}

inline Mat2 hadamard2() {
  Mat2 h;
  h << 1.0, 1.0, 1.0, -1.0;
  return h / std::numbers::sqrt2;
}

}  // namespace detail

// Fenner-style encoding: H^{x p} V H^{x p} with V = sum_y (-1)^{M(y)} |y><y|,
// so <0|C|0> = 1 - f / 2^{p-1}. V is synthesized exactly in the two-qubit
// gate model through its Walsh spectrum: with phases phi(y) = pi M(y) and
// c_s = 2^{-p} sum_y phi(y) (-1)^{s.y},
//   V = e^{i c_0} prod_{s != 0} exp(i c_s (-1)^{parity_s(y)}),
// and each factor is a CNOT parity chain around a single-qubit phase gate.
inline Circuit build_fenner_circuit(const CountingInstance& inst) {
  inst.validate();
  if (inst.p > 12)
    throw TooManyWitnessBits("build_fenner_circuit: p = " + std::to_string(inst.p) +
                             " exceeds the simulability guard of 12");
  const int p = inst.p;
  const int nq = std::max(p, 2);
  const std::size_t size = std::size_t{1} << p;

  Circuit c;
  c.arch.n = nq;
  const auto add = [&c](const Mat4& g, int a, int b) {
    c.arch.slots.emplace_back(a, b);
    c.gates.push_back(g);
  };
  const Mat4 had_embedded = embed_one_qubit(detail::hadamard2(), true);
  const Mat4 cnot = detail::cnot_gate();

  for (int i = 0; i < p; ++i) add(had_embedded, i, (i + 1) % nq);

  // integer Walsh-Hadamard transform of the table; c_s = pi * walsh[s] / 2^p
  std::vector<std::int64_t> walsh(size);
  for (std::size_t y = 0; y < size; ++y) walsh[y] = inst.table[y];
  for (std::size_t len = 1; len < size; len <<= 1)
    for (std::size_t i = 0; i < size; i += len << 1)
      for (std::size_t j = i; j < i + len; ++j) {
        const std::int64_t a = walsh[j];
        const std::int64_t b = walsh[j + len];
        walsh[j] = a + b;
        walsh[j + len] = a - b;
      }

  if (walsh[0] != 0) {
    const double c0 = std::numbers::pi * static_cast<double>(walsh[0]) / static_cast<double>(size);
    add(std::polar(1.0, c0) * Mat4::Identity(), 0, 1);
  }
  for (std::size_t s = 1; s < size; ++s) {
    if (walsh[s] == 0) continue;
    const double cs = std::numbers::pi * static_cast<double>(walsh[s]) / static_cast<double>(size);
    int target = -1;
    std::vector<int> others;
    for (int bit = 0; bit < p; ++bit)
      if (s & (std::size_t{1} << bit)) {
        if (target < 0)
          target = bit;
        else
          others.push_back(bit);
      }
    for (int b : others) add(cnot, b, target);
    Mat2 phase = Mat2::Zero();
    phase(0, 0) = std::polar(1.0, cs);
    phase(1, 1) = std::polar(1.0, -cs);
    add(embed_one_qubit(phase, true), target, (target + 1) % nq);
    for (std::size_t k = others.size(); k-- > 0;) add(cnot, others[k], target);
  }

  for (int i = 0; i < p; ++i) add(had_embedded, i, (i + 1) % nq);
  return c;
}

// g = f + 2^p via G(y, z) = z or M(y), with z the appended low bit; the count
// becomes sign-unambiguous: 1 - g/2^{n-1} <= 0 always.
inline CountingInstance g_augment(const CountingInstance& inst) {
  inst.validate();
  if (inst.p > 11) throw TooManyWitnessBits("g_augment: p must be at most 11");
  CountingInstance out;
  out.p = inst.p + 1;
  out.table.resize(std::size_t{1} << out.p);
  for (std::size_t y = 0; y < inst.table.size(); ++y) {
    out.table[(y << 1) | 0] = inst.table[y];
    out.table[(y << 1) | 1] = 1;
  }
  return out;
}

inline Circuit pad_identity(const Circuit& c, int k) {
  if (k < 0) throw DomainError("pad_identity: negative k");
  Circuit out = c;
  for (int i = 0; i < k; ++i) {
    out.arch.slots.emplace_back(0, 1);
    out.gates.push_back(Mat4::Identity());
  }
  return out;
}

// The unique g in [2^{n-1}, 2^n] with |(1 - g/2^{n-1})^2 - prob| < 2^{-(2n-1)}.
// Adjacent candidates are at least 2^{-(2n-2)} apart, so the windows are
// disjoint and enumeration doubles as the uniqueness check.
inline std::int64_t decode_count(double prob, int nbits) {
  if (nbits < 1 || nbits > 24) throw DomainError("decode_count: n out of range");
  if (!(prob > -0.5 && prob < 1.5))
    throw DomainError("decode_count: probability " + std::to_string(prob) + " far outside [0,1]");
  const double half = std::ldexp(1.0, nbits - 1);
  const double radius = std::ldexp(1.0, -(2 * nbits - 1));
  const std::int64_t g_lo = std::int64_t{1} << (nbits - 1);
  const std::int64_t g_hi = std::int64_t{1} << nbits;
  std::int64_t found = -1;
  int hits = 0;
  for (std::int64_t g = g_lo; g <= g_hi; ++g) {
    const double a = 1.0 - static_cast<double>(g) / half;
    if (std::abs(a * a - prob) < radius) {
      ++hits;
      found = g;
    }
  }
  if (hits != 1)
    throw Ambiguous("decode_count: " + std::to_string(hits) +
                    " candidates within the decoding radius");
  return found;
}

// Lemma 9 end to end: augment, encode, pad to m = m0 + ceil((2n)^{1/mu})
// gates, ask the oracle once, decode, subtract 2^p.
inline std::int64_t solve_counting(const CountingInstance& inst, NoisyOracle& o, double mu) {
  if (!(mu > 0.0)) throw DomainError("solve_counting: mu must be positive");
  const CountingInstance aug = g_augment(inst);
  const int n = aug.p;
  Circuit c = build_fenner_circuit(aug);
  const int k =
      static_cast<int>(std::ceil(std::pow(2.0 * static_cast<double>(n), 1.0 / mu)));
  c = pad_identity(c, k);
  const double prob = o.query(c);
  const std::int64_t g = decode_count(prob, n);
  return g - (std::int64_t{1} << inst.p);
}

}  // namespace qcayley
