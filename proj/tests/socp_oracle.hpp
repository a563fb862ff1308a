#pragma once

// Test-only reference solver for small cone programs: a primal log-barrier
// method with damped Newton steps. It shares no code with the library's
// interior-point solver and works directly on the rotated cones.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "riscf/conic.hpp"

namespace riscf::testing {

struct OracleResult {
  bool ok = false;
  Eigen::VectorXd x;
  double objective = 0.0;  // natural units
};

namespace detail {

inline bool block_interior(conic::ConeKind kind, const Eigen::VectorXd& u) {
  using conic::ConeKind;
  switch (kind) {
    case ConeKind::Nonnegative: return (u.array() > 0.0).all();
    case ConeKind::SecondOrder: return u[0] > 0.0 && u[0] * u[0] - u.tail(u.size() - 1).squaredNorm() > 0.0;
    case ConeKind::RotatedSecondOrder:
      return u[0] > 0.0 && u[1] > 0.0 && 2.0 * u[0] * u[1] - u.tail(u.size() - 2).squaredNorm() > 0.0;
  }
  return false;
}

// Barrier value, gradient and Hessian in the block's own coordinates.
inline double block_barrier(conic::ConeKind kind, const Eigen::VectorXd& u, Eigen::VectorXd& grad,
                            Eigen::MatrixXd& hess) {
  using conic::ConeKind;
  const Eigen::Index k = u.size();
  if (kind == ConeKind::Nonnegative) {
    grad = -u.cwiseInverse();
    hess = u.cwiseInverse().cwiseAbs2().asDiagonal();
    return -u.array().log().sum();
  }
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k, k);
  if (kind == ConeKind::SecondOrder) {
    q(0, 0) = 1.0;
    for (Eigen::Index i = 1; i < k; ++i) q(i, i) = -1.0;
  } else {
    q(0, 1) = q(1, 0) = 1.0;
    for (Eigen::Index i = 2; i < k; ++i) q(i, i) = -1.0;
  }
  const Eigen::VectorXd qu = q * u;
  const double d = u.dot(qu);
  grad = -2.0 * qu / d;
  hess = -2.0 * q / d + 4.0 * qu * qu.transpose() / (d * d);
  return -std::log(d);
}

inline double barrier_degree(const conic::ConeProgram& prog) {
  double m = 0.0;
  for (const auto& cone : prog.cones)
    m += cone.kind == conic::ConeKind::Nonnegative ? static_cast<double>(cone.size()) : 2.0;
  return m;
}

}  // namespace detail

/// Maximizes the program starting from a strictly feasible `x0`.
/// Equality constraints are not supported by this oracle.
inline OracleResult barrier_oracle(const conic::ConeProgram& prog, Eigen::VectorXd x0, double gap_tol = 1e-11) {
  OracleResult res;
  const Eigen::Index n = prog.num_variables();
  auto interior = [&](const Eigen::VectorXd& x) {
    for (const auto& cone : prog.cones)
      if (!detail::block_interior(cone.kind, cone.map * x + cone.offset)) return false;
    return true;
  };
  if (!interior(x0)) return res;

  auto eval = [&](const Eigen::VectorXd& x, double t, Eigen::VectorXd* g, Eigen::MatrixXd* h) {
    double f = -t * prog.objective.dot(x);
    if (g) *g = -t * prog.objective;
    if (h) h->setZero(n, n);
    for (const auto& cone : prog.cones) {
      const Eigen::MatrixXd fm(cone.map);
      Eigen::VectorXd gu;
      Eigen::MatrixXd hu;
      f += detail::block_barrier(cone.kind, fm * x + cone.offset, gu, hu);
      if (g) *g += fm.transpose() * gu;
      if (h) *h += fm.transpose() * hu * fm;
    }
    return f;
  };

  const double m = detail::barrier_degree(prog);
  Eigen::VectorXd x = std::move(x0);
  for (double t = 1.0; m / t > gap_tol; t *= 8.0) {
    for (int newton = 0; newton < 200; ++newton) {
      Eigen::VectorXd g;
      Eigen::MatrixXd h;
      const double f = eval(x, t, &g, &h);
      const Eigen::VectorXd dx = -h.ldlt().solve(g);
      const double decrement = -g.dot(dx);
      if (decrement / 2.0 <= 1e-13) break;
      double step = 1.0;
      while (step > 1e-14) {
        const Eigen::VectorXd trial = x + step * dx;
        if (interior(trial) && eval(trial, t, nullptr, nullptr) <= f - 0.25 * step * decrement) break;
        step *= 0.5;
      }
      if (step <= 1e-14) break;
      x += step * dx;
    }
  }
  res.ok = true;
  res.objective = prog.natural_objective(x);
  res.x = std::move(x);
  return res;
}

struct RandomSocp {
  conic::ConeProgram program;
  Eigen::VectorXd interior_point;
};

/// Random bounded program in `n` variables with a known strictly feasible
/// point: a bounding ball, one or two general second-order cones, an
/// occasional rotated cone and a few half-spaces.
inline RandomSocp random_socp(std::mt19937_64& rng, Eigen::Index n) {
  using conic::AffineRows;
  using conic::ConeKind;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto randn = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd a(r, c);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
    return a;
  };

  RandomSocp out;
  auto& prog = out.program;
  prog.objective = randn(n, 1).col(0);
  Eigen::VectorXd xbar(n);
  for (Eigen::Index i = 0; i < n; ++i) xbar[i] = 2.0 * unit(rng) - 1.0;
  out.interior_point = xbar;

  {
    AffineRows ball(n);
    ball.add_row(xbar.norm() + 0.5 + 2.0 * unit(rng));
    for (Eigen::Index i = 0; i < n; ++i) ball.add(ball.add_row(0.0), i, 1.0);
    prog.cones.push_back(std::move(ball).finish(ConeKind::SecondOrder, "ball"));
  }

  const int socs = 1 + static_cast<int>(unit(rng) * 2.0);
  for (int c = 0; c < socs; ++c) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(unit(rng) * 3.0);
    const Eigen::MatrixXd f = randn(k, n);
    Eigen::VectorXd g = randn(k, 1).col(0);
    const Eigen::VectorXd u = f * xbar + g;
    g[0] += u.tail(k - 1).norm() - u[0] + 0.1 + unit(rng);
    AffineRows rows(n);
    for (Eigen::Index r = 0; r < k; ++r) {
      const Eigen::Index row = rows.add_row(g[r]);
      for (Eigen::Index j = 0; j < n; ++j) rows.add(row, j, f(r, j));
    }
    prog.cones.push_back(std::move(rows).finish(ConeKind::SecondOrder, "soc"));
  }

  if (unit(rng) < 0.5) {
    const Eigen::Index k = 3 + static_cast<Eigen::Index>(unit(rng) * 2.0);
    const Eigen::MatrixXd f = randn(k, n);
    Eigen::VectorXd g = randn(k, 1).col(0);
    Eigen::VectorXd u = f * xbar + g;
    // Make u[0], u[1] positive with slack in 2 u0 u1 >= ||rest||^2.
    g[0] += std::abs(u[0]) + 0.5 - u[0] + unit(rng);
    u = f * xbar + g;
    const double need = u.tail(k - 2).squaredNorm() / (2.0 * u[0]);
    g[1] += std::max(0.0, need - u[1]) + 0.2 + unit(rng);
    AffineRows rows(n);
    for (Eigen::Index r = 0; r < k; ++r) {
      const Eigen::Index row = rows.add_row(g[r]);
      for (Eigen::Index j = 0; j < n; ++j) rows.add(row, j, f(r, j));
    }
    prog.cones.push_back(std::move(rows).finish(ConeKind::RotatedSecondOrder, "rsoc"));
  }

  const int halfspaces = 1 + static_cast<int>(unit(rng) * 3.0);
  AffineRows lin(n);
  for (int h = 0; h < halfspaces; ++h) {
    const Eigen::VectorXd a = randn(n, 1).col(0);
    const double margin = 0.05 + unit(rng);
    const Eigen::Index row = lin.add_row(-a.dot(xbar) + margin);
    for (Eigen::Index j = 0; j < n; ++j) lin.add(row, j, a[j]);
  }
  prog.cones.push_back(std::move(lin).finish(ConeKind::Nonnegative, "halfspaces"));
  return out;
}

}  // namespace riscf::testing
