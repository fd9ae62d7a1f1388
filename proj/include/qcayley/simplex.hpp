#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "qcayley/types.hpp"

namespace qcayley {

struct LpFeasibility {
  bool feasible = false;
  double phase1_objective = 0.0;
  std::vector<double> witness;  // one value per free variable when feasible
};

// Is there a free vector x with A x <= b? Phase-1 simplex on the standard
// form A(x+ - x-) + s = b, minimizing the artificial sum, with Bland's rule
// so no cycling. Sized for the W oracle's instances (tens of rows), not for
// general LP work.
inline LpFeasibility lp_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index nfree = a.cols();
  if (b.size() != rows) throw BadShape("lp_feasible: rhs length mismatch");

  const Eigen::Index nsplit = 2 * nfree;          // x+ then x-
  const Eigen::Index nslack = rows;
  Eigen::Index nart = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    if (b(i) < 0.0) ++nart;

  const Eigen::Index ncols = nsplit + nslack + nart;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(rows, ncols + 1);
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
  std::vector<bool> is_artificial(static_cast<std::size_t>(ncols), false);

  Eigen::Index art_next = nsplit + nslack;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < nfree; ++j) {
      t(i, j) = sign * a(i, j);
      t(i, nfree + j) = -sign * a(i, j);
    }
    t(i, nsplit + i) = sign;  // slack
    t(i, ncols) = sign * b(i);
    if (sign < 0.0) {
      t(i, art_next) = 1.0;
      is_artificial[static_cast<std::size_t>(art_next)] = true;
      basis[static_cast<std::size_t>(i)] = art_next++;
    } else {
      basis[static_cast<std::size_t>(i)] = nsplit + i;
    }
  }

  const auto objective = [&](Eigen::VectorXd& obj) -> double {
    obj.setZero(ncols);
    double w = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i)
      if (is_artificial[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])]) {
        obj += t.row(i).head(ncols).transpose();
        w += t(i, ncols);
      }
    return w;
  };

  constexpr double pivot_tol = 1e-11;
  constexpr int max_iters = 20000;
  Eigen::VectorXd obj(ncols);
  double w = objective(obj);
  for (int iter = 0; iter < max_iters; ++iter) {
    if (w <= tol::lp_feasibility) break;
    // Bland: smallest-index improving, non-artificial entering column.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < ncols; ++j) {
      if (is_artificial[static_cast<std::size_t>(j)]) continue;
      if (obj(j) > pivot_tol) {
        bool basic = false;
        for (Eigen::Index i = 0; i < rows; ++i)
          if (basis[static_cast<std::size_t>(i)] == j) basic = true;
        if (!basic) {
          enter = j;
          break;
        }
      }
    }
    if (enter < 0) break;  // optimal; w > 0 means infeasible

    Eigen::Index leave = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (t(i, enter) <= pivot_tol) continue;
      const double ratio = t(i, ncols) / t(i, enter);
      if (leave < 0 || ratio < best_ratio - 1e-15 ||
          (ratio < best_ratio + 1e-15 &&
           basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]))
        leave = i, best_ratio = ratio;
    }
    if (leave < 0) break;  // phase-1 objective is bounded below; defensive

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i < rows; ++i)
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    basis[static_cast<std::size_t>(leave)] = enter;
    w = objective(obj);
  }

  LpFeasibility out;
  out.phase1_objective = w;
  out.feasible = w <= tol::lp_feasibility;
  if (out.feasible) {
    std::vector<double> plus(static_cast<std::size_t>(nfree), 0.0);
    std::vector<double> minus(static_cast<std::size_t>(nfree), 0.0);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Eigen::Index v = basis[static_cast<std::size_t>(i)];
      if (v < nfree)
        plus[static_cast<std::size_t>(v)] = t(i, ncols);
      else if (v < nsplit)
        minus[static_cast<std::size_t>(v - nfree)] = t(i, ncols);
    }
    out.witness.resize(static_cast<std::size_t>(nfree));
    for (Eigen::Index j = 0; j < nfree; ++j)
      out.witness[static_cast<std::size_t>(j)] =
          plus[static_cast<std::size_t>(j)] - minus[static_cast<std::size_t>(j)];
  }
  return out;
}

}  // namespace qcayley
