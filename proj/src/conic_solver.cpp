// Homogeneous self-dual interior-point method for
//
//   minimize c'x  s.t.  A x = b,  G x + s = h,  s in K
//
// where K is a product of nonnegative rays and second-order cones. Rotated
// cones are mapped onto standard ones with the orthogonal map
// (u, v, x) -> ((u + v)/sqrt2, (u - v)/sqrt2, x). Search directions use
// Nesterov-Todd scaling and a Mehrotra predictor-corrector; the reduced KKT
// system is formed densely from per-block Gram matrices (rank-two updates for
// second-order blocks) and factored with a Cholesky decomposition.

#include "riscf/conic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace riscf::conic {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kStepFraction = 0.99;
constexpr double kMinStep = 1e-11;
constexpr double kSigmaMin = 1e-4;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Block {
  bool soc = false;
  Index start = 0;
  Index size = 0;
  std::vector<Index> support;  // columns touched by this block
  SparseColMatrix local;       // size x support.size()
  SparseColMatrix gram;        // local' * local
};

struct StandardForm {
  Index n = 0, m = 0, p = 0;
  // Original data (rotated blocks already mapped), used for reporting.
  SparseColMatrix G0, A0;
  VectorXd h0, b0, c0;
  // Equilibrated data the iteration runs on.
  SparseColMatrix G, A;
  VectorXd h, b, c;
  std::vector<Block> blocks;
  Index degree = 0;
  VectorXd col_scale, row_scale_g, row_scale_a;
  double cost_scale = 1.0;
};

void rotate_pair(VectorXd& v, Index start) {
  const double u = v[start], w = v[start + 1];
  v[start] = (u + w) * kInvSqrt2;
  v[start + 1] = (u - w) * kInvSqrt2;
}

StandardForm to_standard_form(const ConeProgram& prog) {
  StandardForm sf;
  sf.n = prog.num_variables();
  sf.m = prog.num_cone_rows();
  sf.p = prog.eq_rhs.size();

  std::vector<Eigen::Triplet<double>> g_trip;
  sf.h0.resize(sf.m);
  Index row = 0;
  for (const auto& cone : prog.cones) {
    const Index k = cone.size();
    const bool rotated = cone.kind == ConeKind::RotatedSecondOrder;
    for (Index r = 0; r < k; ++r) {
      for (SparseRowMatrix::InnerIterator it(cone.map, r); it; ++it) {
        const double v = -it.value();
        if (rotated && r == 0) {
          g_trip.emplace_back(row, it.col(), v * kInvSqrt2);
          g_trip.emplace_back(row + 1, it.col(), v * kInvSqrt2);
        } else if (rotated && r == 1) {
          g_trip.emplace_back(row, it.col(), v * kInvSqrt2);
          g_trip.emplace_back(row + 1, it.col(), -v * kInvSqrt2);
        } else {
          g_trip.emplace_back(row + r, it.col(), v);
        }
      }
    }
    sf.h0.segment(row, k) = cone.offset;
    if (rotated) rotate_pair(sf.h0, row);

    if (cone.kind == ConeKind::Nonnegative) {
      for (Index r = 0; r < k; ++r) {
        Block blk;
        blk.start = row + r;
        blk.size = 1;
        sf.blocks.push_back(std::move(blk));
      }
      sf.degree += k;
    } else {
      Block blk;
      blk.soc = true;
      blk.start = row;
      blk.size = k;
      sf.blocks.push_back(std::move(blk));
      sf.degree += 1;
    }
    row += k;
  }
  sf.G0.resize(sf.m, sf.n);
  sf.G0.setFromTriplets(g_trip.begin(), g_trip.end());
  sf.G0.prune(0.0);
  sf.A0.resize(sf.p, sf.n);
  if (sf.p > 0) sf.A0 = SparseColMatrix(prog.eq_matrix);
  sf.b0 = prog.eq_rhs;
  sf.c0 = -prog.objective;
  return sf;
}

// Ruiz equilibration with one common factor per second-order block so the
// scaled slack stays in the same cone.
void equilibrate(StandardForm& sf) {
  sf.G = sf.G0;
  sf.A = sf.A0;
  sf.col_scale = VectorXd::Ones(sf.n);
  sf.row_scale_g = VectorXd::Ones(sf.m);
  sf.row_scale_a = VectorXd::Ones(sf.p);

  for (int pass = 0; pass < 20; ++pass) {
    VectorXd col_max = VectorXd::Zero(sf.n);
    VectorXd row_g = VectorXd::Zero(sf.m);
    VectorXd row_a = VectorXd::Zero(sf.p);
    for (Index j = 0; j < sf.n; ++j) {
      for (SparseColMatrix::InnerIterator it(sf.G, j); it; ++it) {
        const double a = std::abs(it.value());
        col_max[j] = std::max(col_max[j], a);
        row_g[it.row()] = std::max(row_g[it.row()], a);
      }
      for (SparseColMatrix::InnerIterator it(sf.A, j); it; ++it) {
        const double a = std::abs(it.value());
        col_max[j] = std::max(col_max[j], a);
        row_a[it.row()] = std::max(row_a[it.row()], a);
      }
    }
    for (const auto& blk : sf.blocks) {
      if (!blk.soc) continue;
      const double mx = row_g.segment(blk.start, blk.size).maxCoeff();
      row_g.segment(blk.start, blk.size).setConstant(mx);
    }
    auto factor = [](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 1.0; };
    VectorXd d = col_max.unaryExpr(factor);
    VectorXd eg = row_g.unaryExpr(factor);
    VectorXd ea = row_a.unaryExpr(factor);

    double spread = 0.0;
    for (Index j = 0; j < sf.n; ++j)
      if (col_max[j] > 0) spread = std::max(spread, std::abs(1.0 - col_max[j]));
    for (Index i = 0; i < sf.m; ++i)
      if (row_g[i] > 0) spread = std::max(spread, std::abs(1.0 - row_g[i]));
    for (Index i = 0; i < sf.p; ++i)
      if (row_a[i] > 0) spread = std::max(spread, std::abs(1.0 - row_a[i]));
    if (spread < 0.05) break;

    // Keep cumulative factors inside a sane range.
    for (Index j = 0; j < sf.n; ++j) {
      const double target = std::clamp(sf.col_scale[j] * d[j], 1e-8, 1e8);
      d[j] = target / sf.col_scale[j];
    }
    sf.col_scale.array() *= d.array();
    sf.row_scale_g.array() *= eg.array();
    sf.row_scale_a.array() *= ea.array();
    sf.G = eg.asDiagonal() * sf.G * d.asDiagonal();
    if (sf.p > 0) sf.A = ea.asDiagonal() * sf.A * d.asDiagonal();
  }
  sf.h = sf.row_scale_g.cwiseProduct(sf.h0);
  sf.b = sf.row_scale_a.cwiseProduct(sf.b0);
  sf.c = sf.col_scale.cwiseProduct(sf.c0);
  const double cmax = sf.c.size() ? sf.c.cwiseAbs().maxCoeff() : 0.0;
  sf.cost_scale = cmax > 0.0 ? 1.0 / cmax : 1.0;
  sf.c *= sf.cost_scale;
}

void build_blocks(StandardForm& sf) {
  const SparseRowMatrix g_rows(sf.G);
  for (auto& blk : sf.blocks) {
    std::vector<Index> cols;
    for (Index r = blk.start; r < blk.start + blk.size; ++r)
      for (SparseRowMatrix::InnerIterator it(g_rows, r); it; ++it) cols.push_back(it.col());
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    std::vector<Index> position(static_cast<std::size_t>(sf.n), -1);
    for (std::size_t k = 0; k < cols.size(); ++k) position[static_cast<std::size_t>(cols[k])] = static_cast<Index>(k);

    std::vector<Eigen::Triplet<double>> trip;
    for (Index r = blk.start; r < blk.start + blk.size; ++r)
      for (SparseRowMatrix::InnerIterator it(g_rows, r); it; ++it)
        trip.emplace_back(r - blk.start, position[static_cast<std::size_t>(it.col())], it.value());
    blk.local.resize(blk.size, static_cast<Index>(cols.size()));
    blk.local.setFromTriplets(trip.begin(), trip.end());
    blk.gram = SparseColMatrix(blk.local.transpose() * blk.local);
    blk.support = std::move(cols);
  }
}

// ---------------------------------------------------------------------------
// Cone arithmetic on stacked vectors.

double soc_det(const VectorXd& u, Index start, Index size) {
  const double t = u[start];
  const double r = u.segment(start + 1, size - 1).norm();
  return (t - r) * (t + r);
}

double min_eig(const StandardForm& sf, const VectorXd& u) {
  double worst = kInf;
  for (const auto& blk : sf.blocks) {
    if (!blk.soc) {
      worst = std::min(worst, u[blk.start]);
    } else {
      worst = std::min(worst, u[blk.start] - u.segment(blk.start + 1, blk.size - 1).norm());
    }
  }
  return worst;
}

void add_identity(const StandardForm& sf, VectorXd& u, double alpha) {
  for (const auto& blk : sf.blocks) u[blk.start] += alpha;
}

VectorXd jordan_product(const StandardForm& sf, const VectorXd& u, const VectorXd& v) {
  VectorXd out(u.size());
  for (const auto& blk : sf.blocks) {
    const Index s = blk.start, k = blk.size;
    if (!blk.soc) {
      out[s] = u[s] * v[s];
    } else {
      out[s] = u.segment(s, k).dot(v.segment(s, k));
      out.segment(s + 1, k - 1) = u[s] * v.segment(s + 1, k - 1) + v[s] * u.segment(s + 1, k - 1);
    }
  }
  return out;
}

// Solves lambda o x = d.
VectorXd jordan_divide(const StandardForm& sf, const VectorXd& lambda, const VectorXd& d) {
  VectorXd out(d.size());
  for (const auto& blk : sf.blocks) {
    const Index s = blk.start, k = blk.size;
    if (!blk.soc) {
      out[s] = d[s] / lambda[s];
    } else {
      const double l0 = lambda[s];
      const auto l1 = lambda.segment(s + 1, k - 1);
      const double det = soc_det(lambda, s, k);
      const double x0 = (l0 * d[s] - l1.dot(d.segment(s + 1, k - 1))) / det;
      out[s] = x0;
      out.segment(s + 1, k - 1) = (d.segment(s + 1, k - 1) - x0 * l1) / l0;
    }
  }
  return out;
}

// Largest alpha with u + alpha d in the cone (u interior).
double max_step(const StandardForm& sf, const VectorXd& u, const VectorXd& d) {
  double alpha = kInf;
  for (const auto& blk : sf.blocks) {
    const Index s = blk.start, k = blk.size;
    if (!blk.soc) {
      if (d[s] < 0.0) alpha = std::min(alpha, -u[s] / d[s]);
      continue;
    }
    const double d0 = d[s];
    const auto d1 = d.segment(s + 1, k - 1);
    const auto u1 = u.segment(s + 1, k - 1);
    const double dn = d1.norm();
    if (d0 >= dn) continue;  // direction inside the cone
    const double qa = (d0 - dn) * (d0 + dn);
    const double qb = 2.0 * (u[s] * d0 - u1.dot(d1));
    const double qc = std::max(soc_det(u, s, k), 0.0);
    double root = kInf;
    if (qa == 0.0) {
      if (qb < 0.0) root = -qc / qb;
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
        const double r1 = q / qa;
        const double r2 = q != 0.0 ? qc / q : kInf;
        for (double r : {r1, r2})
          if (r >= 0.0) root = std::min(root, r);
      }
    }
    alpha = std::min(alpha, root);
  }
  return alpha;
}

// Nesterov-Todd scaling point per block.
struct Scaling {
  std::vector<double> beta;      // LP: sqrt(s/z); SOC: (det s / det z)^(1/4)
  std::vector<VectorXd> wbar;    // SOC only
  VectorXd lambda;
};

Scaling identity_scaling(const StandardForm& sf) {
  Scaling sc;
  sc.beta.assign(sf.blocks.size(), 1.0);
  sc.wbar.resize(sf.blocks.size());
  for (std::size_t i = 0; i < sf.blocks.size(); ++i) {
    if (!sf.blocks[i].soc) continue;
    sc.wbar[i] = VectorXd::Zero(sf.blocks[i].size);
    sc.wbar[i][0] = 1.0;
  }
  return sc;
}

bool compute_scaling(const StandardForm& sf, const VectorXd& s, const VectorXd& z, Scaling& sc) {
  sc.beta.assign(sf.blocks.size(), 1.0);
  sc.wbar.resize(sf.blocks.size());
  sc.lambda.resize(s.size());
  for (std::size_t i = 0; i < sf.blocks.size(); ++i) {
    const auto& blk = sf.blocks[i];
    const Index st = blk.start, k = blk.size;
    if (!blk.soc) {
      if (!(s[st] > 0.0) || !(z[st] > 0.0)) return false;
      sc.beta[i] = std::sqrt(s[st] / z[st]);
      sc.lambda[st] = std::sqrt(s[st] * z[st]);
      continue;
    }
    const double sdet = soc_det(s, st, k);
    const double zdet = soc_det(z, st, k);
    if (!(sdet > 0.0) || !(zdet > 0.0) || s[st] <= 0.0 || z[st] <= 0.0) return false;
    const VectorXd sn = s.segment(st, k) / std::sqrt(sdet);
    VectorXd zn = z.segment(st, k) / std::sqrt(zdet);
    const double gamma = std::sqrt(0.5 * (1.0 + sn.dot(zn)));
    zn.tail(k - 1) *= -1.0;  // J zn
    VectorXd w = (sn + zn) / (2.0 * gamma);
    // W = beta (2 v v' - J) with v = (w + e) / sqrt(2 (w0 + 1)).
    w[0] += 1.0;
    w /= std::sqrt(2.0 * w[0]);
    sc.beta[i] = std::pow(sdet / zdet, 0.25);
    // lambda = W z
    const VectorXd zb = z.segment(st, k);
    VectorXd jz = zb;
    jz.tail(k - 1) *= -1.0;
    sc.lambda.segment(st, k) = sc.beta[i] * (2.0 * w.dot(zb) * w - jz);
    sc.wbar[i] = std::move(w);
  }
  return sc.lambda.allFinite();
}

VectorXd apply_w(const StandardForm& sf, const Scaling& sc, const VectorXd& v) {
  VectorXd out(v.size());
  for (std::size_t i = 0; i < sf.blocks.size(); ++i) {
    const auto& blk = sf.blocks[i];
    const Index st = blk.start, k = blk.size;
    if (!blk.soc) {
      out[st] = sc.beta[i] * v[st];
      continue;
    }
    const auto& w = sc.wbar[i];
    const auto u = v.segment(st, k);
    out.segment(st, k) = 2.0 * w.dot(u) * w;
    out[st] -= u[0];
    out.segment(st + 1, k - 1) += u.tail(k - 1);
    out.segment(st, k) *= sc.beta[i];
  }
  return out;
}

VectorXd apply_w_inv(const StandardForm& sf, const Scaling& sc, const VectorXd& v) {
  VectorXd out(v.size());
  for (std::size_t i = 0; i < sf.blocks.size(); ++i) {
    const auto& blk = sf.blocks[i];
    const Index st = blk.start, k = blk.size;
    if (!blk.soc) {
      out[st] = v[st] / sc.beta[i];
      continue;
    }
    VectorXd jw = sc.wbar[i];
    jw.tail(k - 1) *= -1.0;
    const auto u = v.segment(st, k);
    out.segment(st, k) = 2.0 * jw.dot(u) * jw;
    out[st] -= u[0];
    out.segment(st + 1, k - 1) += u.tail(k - 1);
    out.segment(st, k) /= sc.beta[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reduced KKT system
//   [ 0  A'  G'  ] [dx]   [bx]
//   [ A  0   0   ] [dy] = [by]
//   [ G  0  -W'W ] [dz]   [bz]

class Kkt {
 public:
  explicit Kkt(const StandardForm& sf) : sf_(sf) {}

  bool factor(const Scaling& sc) {
    sc_ = &sc;
    const Index n = sf_.n;
    H_.setZero(n, n);
    for (std::size_t i = 0; i < sf_.blocks.size(); ++i) {
      const auto& blk = sf_.blocks[i];
      const auto& sup = blk.support;
      const Index ks = static_cast<Index>(sup.size());
      if (ks == 0) continue;
      const double coef = 1.0 / (sc.beta[i] * sc.beta[i]);
      for (Index j = 0; j < blk.gram.outerSize(); ++j)
        for (SparseColMatrix::InnerIterator it(blk.gram, j); it; ++it)
          H_(sup[static_cast<std::size_t>(it.row())], sup[static_cast<std::size_t>(j)]) += coef * it.value();
      if (!blk.soc) continue;
      const VectorXd& w = sc.wbar[i];
      VectorXd jw = w;
      jw.tail(w.size() - 1) *= -1.0;
      const VectorXd pv = blk.local.transpose() * jw;
      const VectorXd qv = blk.local.transpose() * w;
      const double ww4 = 4.0 * w.squaredNorm();
      for (Index b = 0; b < ks; ++b) {
        const Index cb = sup[static_cast<std::size_t>(b)];
        const double pb = pv[b], qb = qv[b];
        for (Index a = 0; a < ks; ++a) {
          H_(sup[static_cast<std::size_t>(a)], cb) +=
              coef * (ww4 * pv[a] * pb - 2.0 * (pv[a] * qb + qv[a] * pb));
        }
      }
    }

    // Diagonal-relative regularization; refinement removes its effect.
    double reg = 1e-13;
    for (int attempt = 0; attempt < 8; ++attempt, reg *= 100.0) {
      Hreg_ = H_;
      const double floor = reg * std::max(1.0, H_.diagonal().cwiseAbs().maxCoeff());
      for (Index j = 0; j < n; ++j) Hreg_(j, j) += reg * std::abs(H_(j, j)) + floor;
      llt_.compute(Hreg_);
      if (llt_.info() != Eigen::Success) continue;
      if (sf_.p == 0) return true;
      HinvAt_ = llt_.solve(MatrixXd(sf_.A.transpose()));
      MatrixXd S = sf_.A * HinvAt_;
      const double sfloor = reg * std::max(1.0, S.diagonal().cwiseAbs().maxCoeff());
      S.diagonal().array() += sfloor;
      llt_s_.compute(S);
      if (llt_s_.info() == Eigen::Success) return true;
    }
    return false;
  }

  void solve(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd& dx, VectorXd& dy,
             VectorXd& dz) const {
    solve_once(bx, by, bz, dx, dy, dz);
    const double scale = 1.0 + std::max({bx.lpNorm<Eigen::Infinity>(), by.size() ? by.lpNorm<Eigen::Infinity>() : 0.0,
                                         bz.lpNorm<Eigen::Infinity>()});
    for (int it = 0; it < 6; ++it) {
      const VectorXd ex = bx - sf_.A.transpose() * dy - sf_.G.transpose() * dz;
      const VectorXd ey = by - sf_.A * dx;
      const VectorXd ez = bz - sf_.G * dx + w2(dz);
      const double err = std::max({ex.lpNorm<Eigen::Infinity>(), ey.size() ? ey.lpNorm<Eigen::Infinity>() : 0.0,
                                   ez.lpNorm<Eigen::Infinity>()});
      if (err <= 1e-14 * scale) break;
      VectorXd cx, cy, cz;
      solve_once(ex, ey, ez, cx, cy, cz);
      dx += cx;
      dy += cy;
      dz += cz;
    }
  }

 private:
  VectorXd w2(const VectorXd& v) const { return apply_w(sf_, *sc_, apply_w(sf_, *sc_, v)); }
  VectorXd w2_inv(const VectorXd& v) const { return apply_w_inv(sf_, *sc_, apply_w_inv(sf_, *sc_, v)); }

  void solve_once(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd& dx, VectorXd& dy,
                  VectorXd& dz) const {
    const VectorXd r1 = bx + sf_.G.transpose() * w2_inv(bz);
    if (sf_.p == 0) {
      dx = llt_.solve(r1);
      dy.resize(0);
    } else {
      const VectorXd hr = llt_.solve(r1);
      dy = llt_s_.solve(sf_.A * hr - by);
      dx = hr - HinvAt_ * dy;
    }
    dz = w2_inv(sf_.G * dx - bz);
  }

  const StandardForm& sf_;
  const Scaling* sc_ = nullptr;
  MatrixXd H_, Hreg_, HinvAt_;
  Eigen::LLT<MatrixXd> llt_, llt_s_;
};

struct Iterate {
  VectorXd x, y, z, s;
  double tau = 1.0, kappa = 1.0;
};

struct Metrics {
  double pres = kInf, dres = kInf, gap = kInf;
  double pcost = 0.0, dcost = 0.0;
  bool infeasible = false, unbounded = false;
};

Metrics evaluate(const StandardForm& sf, const Iterate& it, double infeas_tol) {
  Metrics mt;
  const VectorXd x = sf.col_scale.cwiseProduct(it.x);
  const VectorXd s = it.s.cwiseQuotient(sf.row_scale_g);
  const VectorXd y = sf.row_scale_a.cwiseProduct(it.y) / sf.cost_scale;
  const VectorXd z = sf.row_scale_g.cwiseProduct(it.z) / sf.cost_scale;
  const double tau = it.tau;

  const double nb = sf.p ? sf.b0.norm() : 0.0;
  const double nh = sf.h0.norm();
  const double nc = sf.c0.norm();
  const double rp_eq = sf.p ? (sf.A0 * x - tau * sf.b0).norm() / tau : 0.0;
  const double rp_cone = (sf.G0 * x + s - tau * sf.h0).norm() / tau;
  mt.pres = std::max(rp_eq / (1.0 + nb), rp_cone / (1.0 + nh));
  VectorXd rd = sf.G0.transpose() * z + tau * sf.c0;
  if (sf.p) rd += sf.A0.transpose() * y;
  mt.dres = rd.norm() / tau / (1.0 + nc);
  mt.pcost = sf.c0.dot(x) / tau;
  mt.dcost = -(sf.p ? sf.b0.dot(y) : 0.0) / tau - sf.h0.dot(z) / tau;
  mt.gap = (mt.pcost - mt.dcost) / std::max(1.0, std::min(std::abs(mt.pcost), std::abs(mt.dcost)));

  if (it.kappa > it.tau) {
    const double by_hz = (sf.p ? sf.b0.dot(y) : 0.0) + sf.h0.dot(z);
    if (by_hz < 0.0) {
      VectorXd ray = sf.G0.transpose() * z;
      if (sf.p) ray += sf.A0.transpose() * y;
      mt.infeasible = ray.norm() / (-by_hz) <= infeas_tol;
    }
    const double cx = sf.c0.dot(x);
    if (cx < 0.0) {
      const double ax = sf.p ? (sf.A0 * x).norm() : 0.0;
      const double gx = (sf.G0 * x + s).norm();
      mt.unbounded = std::max(ax, gx) / (-cx) <= infeas_tol;
    }
  }
  return mt;
}

void fill_report(const ConeProgram& prog, const StandardForm& sf, const Iterate& it, const Metrics& mt,
                 SolveReport& rep) {
  const double tau = (rep.status == SolveStatus::Optimal || rep.status == SolveStatus::MaxIters ||
                      rep.status == SolveStatus::NumericalFailure)
                         ? it.tau
                         : 1.0;
  rep.primal = sf.col_scale.cwiseProduct(it.x) / tau;
  rep.eq_dual = sf.row_scale_a.cwiseProduct(it.y) / (sf.cost_scale * tau);
  VectorXd z = sf.row_scale_g.cwiseProduct(it.z) / (sf.cost_scale * tau);
  Index row = 0;
  for (const auto& cone : prog.cones) {
    if (cone.kind == ConeKind::RotatedSecondOrder) rotate_pair(z, row);
    row += cone.size();
  }
  rep.cone_dual = std::move(z);
  rep.objective_value = prog.natural_objective(rep.primal);
  rep.primal_residual = mt.pres;
  rep.dual_residual = mt.dres;
  rep.duality_gap = mt.gap;
}

}  // namespace

SolveReport solve(const ConeProgram& prog, const SolverSettings& settings) {
  if (auto defects = validate(prog); !defects.empty())
    throw std::invalid_argument("conic::solve: malformed program: " + defects.front());

  StandardForm sf = to_standard_form(prog);
  equilibrate(sf);
  build_blocks(sf);

  SolveReport rep;
  Kkt kkt(sf);
  Iterate it;

  // Starting point: least-squares primal and dual estimates shifted into
  // the cone interior.
  {
    const Scaling id = identity_scaling(sf);
    if (!kkt.factor(id)) {
      rep.status = SolveStatus::NumericalFailure;
      return rep;
    }
    VectorXd x, y, z;
    kkt.solve(VectorXd::Zero(sf.n), sf.b, sf.h, x, y, z);
    it.x = x;
    it.s = -z;
    kkt.solve(-sf.c, VectorXd::Zero(sf.p), VectorXd::Zero(sf.m), x, y, z);
    it.y = y;
    it.z = z;
    const double ap = -min_eig(sf, it.s);
    if (ap >= 0.0) add_identity(sf, it.s, 1.0 + ap);
    const double ad = -min_eig(sf, it.z);
    if (ad >= 0.0) add_identity(sf, it.z, 1.0 + ad);
    it.tau = 1.0;
    it.kappa = 1.0;
  }

  const double deg = static_cast<double>(sf.degree) + 1.0;
  Scaling sc;
  Metrics mt;
  Iterate best;
  Metrics best_mt;
  double best_err = kInf;
  int iter = 0;
  for (;; ++iter) {
    mt = evaluate(sf, it, settings.infeasibility_tol);
    if (const double err = std::max({mt.pres, mt.dres, std::abs(mt.gap)}); err < best_err) {
      best_err = err;
      best = it;
      best_mt = mt;
    }
    if (settings.verbose) {
      std::cerr << std::scientific << std::setprecision(3) << "  it " << std::setw(3) << iter << " pcost "
                << mt.pcost << " dcost " << mt.dcost << " gap " << mt.gap << " pres " << mt.pres << " dres "
                << mt.dres << " tau " << it.tau << " kappa " << it.kappa << '\n';
    }
    if (!std::isfinite(mt.pres) || !std::isfinite(mt.dres) || !std::isfinite(mt.gap)) {
      rep.status = SolveStatus::NumericalFailure;
      break;
    }
    if (mt.pres <= settings.tol && mt.dres <= settings.tol && std::abs(mt.gap) <= settings.tol) {
      rep.status = SolveStatus::Optimal;
      break;
    }
    if (mt.infeasible) {
      rep.status = SolveStatus::Infeasible;
      break;
    }
    if (mt.unbounded) {
      rep.status = SolveStatus::Unbounded;
      break;
    }
    if (iter >= settings.max_iters) {
      rep.status = SolveStatus::MaxIters;
      break;
    }
    if (!compute_scaling(sf, it.s, it.z, sc) || !kkt.factor(sc)) {
      rep.status = SolveStatus::NumericalFailure;
      break;
    }

    const VectorXd rx = -(sf.G.transpose() * it.z + it.tau * sf.c + (sf.p ? VectorXd(sf.A.transpose() * it.y)
                                                                          : VectorXd::Zero(sf.n)));
    const VectorXd ry = sf.p ? VectorXd(sf.A * it.x - it.tau * sf.b) : VectorXd(0);
    const VectorXd rz = -(it.s + sf.G * it.x - it.tau * sf.h);
    const double rt =
        -(it.kappa + sf.c.dot(it.x) + (sf.p ? sf.b.dot(it.y) : 0.0) + sf.h.dot(it.z));
    const double mu = (it.s.dot(it.z) + it.tau * it.kappa) / deg;

    VectorXd x1, y1, z1;
    kkt.solve(-sf.c, sf.b, sf.h, x1, y1, z1);
    const double denom_base = sf.c.dot(x1) + (sf.p ? sf.b.dot(y1) : 0.0) + sf.h.dot(z1);

    struct Direction {
      VectorXd dx, dy, dz, ds_scaled, dz_scaled, ds;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto direction = [&](double d, const VectorXd& target, double dk) {
      Direction dir;
      const VectorXd ldiv = jordan_divide(sf, sc.lambda, target);
      const VectorXd bz = d * rz - apply_w(sf, sc, ldiv);
      VectorXd x2, y2, z2;
      kkt.solve(d * rx, sf.p ? VectorXd(-d * ry) : VectorXd(0), bz, x2, y2, z2);
      const double num = d * rt - dk / it.tau - (sf.c.dot(x2) + (sf.p ? sf.b.dot(y2) : 0.0) + sf.h.dot(z2));
      dir.dtau = num / (denom_base - it.kappa / it.tau);
      dir.dx = x2 + dir.dtau * x1;
      dir.dy = sf.p ? VectorXd(y2 + dir.dtau * y1) : VectorXd(0);
      dir.dz = z2 + dir.dtau * z1;
      dir.dz_scaled = apply_w(sf, sc, dir.dz);
      dir.ds_scaled = ldiv - dir.dz_scaled;
      dir.ds = apply_w(sf, sc, dir.ds_scaled);
      dir.dkappa = (dk - it.kappa * dir.dtau) / it.tau;
      return dir;
    };
    auto step_length = [&](const Direction& dir) {
      double a = std::min(max_step(sf, sc.lambda, dir.ds_scaled), max_step(sf, sc.lambda, dir.dz_scaled));
      if (dir.dtau < 0.0) a = std::min(a, -it.tau / dir.dtau);
      if (dir.dkappa < 0.0) a = std::min(a, -it.kappa / dir.dkappa);
      return a;
    };

    const VectorXd ll = jordan_product(sf, sc.lambda, sc.lambda);
    const Direction aff = direction(1.0, -ll, -it.tau * it.kappa);
    const double alpha_aff = std::min(1.0, step_length(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), kSigmaMin, 1.0);

    VectorXd target = -ll - jordan_product(sf, aff.ds_scaled, aff.dz_scaled);
    add_identity(sf, target, sigma * mu);
    const double dk = -it.tau * it.kappa - aff.dtau * aff.dkappa + sigma * mu;
    const Direction dir = direction(1.0 - sigma, target, dk);
    const double alpha = std::min(1.0, kStepFraction * step_length(dir));
    if (!(alpha > kMinStep) || !dir.dx.allFinite()) {
      rep.status = SolveStatus::NumericalFailure;
      break;
    }
    it.x += alpha * dir.dx;
    if (sf.p) it.y += alpha * dir.dy;
    it.z += alpha * dir.dz;
    it.s += alpha * dir.ds;
    it.tau += alpha * dir.dtau;
    it.kappa += alpha * dir.dkappa;
  }
  rep.iterations = iter;
  if ((rep.status == SolveStatus::NumericalFailure || rep.status == SolveStatus::MaxIters) &&
      best_err <= settings.reduced_tol) {
    rep.status = SolveStatus::Optimal;
    rep.reduced_accuracy = true;
    fill_report(prog, sf, best, best_mt, rep);
    return rep;
  }
  fill_report(prog, sf, it, mt, rep);
  return rep;
}

}  // namespace riscf::conic
