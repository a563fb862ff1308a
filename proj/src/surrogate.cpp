#include "riscf/surrogate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace riscf {

namespace {

using conic::AffineRows;
using conic::ConeKind;
using conic::ConeProgram;
using Eigen::MatrixXcd;
using Eigen::RowVectorXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

BoundCoefficients from_gamma(double gamma, double z0) {
  BoundCoefficients bc;
  const double lg = std::log1p(gamma);
  bc.a = 2.0 * lg / z0 + gamma / (z0 * (1.0 + gamma));
  bc.b = gamma * gamma / (z0 * (1.0 + gamma));
  bc.c = lg / (z0 * z0);
  return bc;
}

// Real affine function of the program variables.
struct Form {
  std::vector<std::pair<Index, double>> terms;
  double constant = 0.0;
};

struct ComplexForm {
  Form re, im;
};

// h w_j over the interleaved w_j variables.
ComplexForm gain_of_w(const RowVectorXcd& h, const BeamformingLayout& lay, Index j) {
  ComplexForm f;
  f.re.terms.reserve(static_cast<std::size_t>(2 * h.size()));
  f.im.terms.reserve(static_cast<std::size_t>(2 * h.size()));
  for (Index i = 0; i < h.size(); ++i) {
    const double hr = h[i].real(), hi = h[i].imag();
    const Index c = lay.w(j, i);
    f.re.terms.emplace_back(c, hr);
    f.re.terms.emplace_back(c + 1, -hi);
    f.im.terms.emplace_back(c, hi);
    f.im.terms.emplace_back(c + 1, hr);
  }
  return f;
}

// a + b^T psi over the interleaved psi variables.
ComplexForm gain_of_psi(std::complex<double> a, const VectorXcd& b, const PhaseLayout& lay) {
  ComplexForm f;
  f.re.constant = a.real();
  f.im.constant = a.imag();
  for (Index i = 0; i < b.size(); ++i) {
    const double br = b[i].real(), bi = b[i].imag();
    if (br == 0.0 && bi == 0.0) continue;
    const Index c = lay.psi(i);
    f.re.terms.emplace_back(c, br);
    f.re.terms.emplace_back(c + 1, -bi);
    f.im.terms.emplace_back(c, bi);
    f.im.terms.emplace_back(c + 1, br);
  }
  return f;
}

void add_terms(AffineRows& rows, Index row, const Form& f, double scale) {
  for (const auto& [col, v] : f.terms) rows.add(row, col, scale * v);
}

Index push(AffineRows& rows, const Form& f, double scale = 1.0, double extra = 0.0) {
  const Index row = rows.add_row(scale * f.constant + extra);
  add_terms(rows, row, f, scale);
  return row;
}

// Data shared by the builders, in noise-normalized units.
struct Instance {
  Index L = 0;
  Index n = 0;                                 // program variable count
  std::vector<std::vector<ComplexForm>> gain;  // gain[l][j] = h^_l w_j / sigma
  MatrixXcd gains0;
  VectorXd x0;
  VectorXd phi0;
  VectorXd r0;  // SINR at the expansion point
};

Instance make_instance(const SurrogateCoefficients& coeffs, double noise_power_w, Index num_vars) {
  Instance in;
  const double sigma = std::sqrt(noise_power_w);
  in.L = coeffs.gains.rows();
  in.n = num_vars;
  in.gains0 = coeffs.gains / sigma;
  in.x0 = coeffs.signal / sigma;
  in.phi0 = coeffs.interference / noise_power_w;
  in.r0.resize(in.L);
  for (Index l = 0; l < in.L; ++l) in.r0[l] = std::norm(coeffs.gains(l, l)) / coeffs.interference[l];
  return in;
}

// t * Omega_l >= beta * phi_l, written as a rotated cone whose two leading
// entries are balanced at the expansion point.
void add_epigraph(ConeProgram& prog, const Instance& in, Index l, Index t_col, double beta, double gamma) {
  AffineRows rows(in.n);
  const double x0 = in.x0[l];
  const double s = beta * std::sqrt(2.0 / gamma) / x0;
  rows.add(rows.add_row(), t_col, 1.0 / s);
  const double vs = s / (2.0 * beta);
  push(rows, in.gain[l][l].re, 2.0 * x0 * vs, -x0 * x0 * vs);
  for (Index j = 0; j < in.L; ++j) {
    if (j == l) continue;
    push(rows, in.gain[l][j].re);
    push(rows, in.gain[l][j].im);
  }
  rows.add_row(1.0);
  prog.cones.push_back(std::move(rows).finish(ConeKind::RotatedSecondOrder, "epigraph[" + std::to_string(l) + "]"));
}

// |h^_l w_l|^2 <= r_l * linearized phi_l.
void add_sinr_cone(ConeProgram& prog, const Instance& in, Index l, Index r_col) {
  AffineRows rows(in.n);
  const double s = in.r0[l] > 0.0 ? std::sqrt(2.0 * in.r0[l] / in.phi0[l]) : 1.0;
  rows.add(rows.add_row(), r_col, 1.0 / s);
  double constant = 1.0;
  for (Index j = 0; j < in.L; ++j) {
    if (j == l) continue;
    const auto g0 = in.gains0(l, j);
    constant += 2.0 * (g0.real() * in.gain[l][j].re.constant + g0.imag() * in.gain[l][j].im.constant) - std::norm(g0);
  }
  const Index v = rows.add_row(0.5 * s * constant);
  for (Index j = 0; j < in.L; ++j) {
    if (j == l) continue;
    const auto g0 = in.gains0(l, j);
    add_terms(rows, v, in.gain[l][j].re, s * g0.real());
    add_terms(rows, v, in.gain[l][j].im, s * g0.imag());
  }
  push(rows, in.gain[l][l].re);
  push(rows, in.gain[l][l].im);
  prog.cones.push_back(std::move(rows).finish(ConeKind::RotatedSecondOrder, "sinr[" + std::to_string(l) + "]"));
}

void add_backhaul_rows(AffineRows& lin, const SystemParams& params, const Instance& in,
                       const std::vector<Index>& r_cols) {
  double base = 0.0;
  for (Index l = 0; l < in.L; ++l) base += std::log1p(in.r0[l]) - in.r0[l] / (1.0 + in.r0[l]);
  const VectorXd limit = params.backhaul_limit();
  for (Index m = 0; m < limit.size(); ++m) {
    const Index row = lin.add_row(limit[m] - base);
    for (Index l = 0; l < in.L; ++l) lin.add(row, r_cols[static_cast<std::size_t>(l)], -1.0 / (1.0 + in.r0[l]));
  }
}

template <class Layout>
std::vector<Index> r_columns(const Layout& lay) {
  std::vector<Index> cols;
  for (Index l = 0; l < lay.L; ++l) cols.push_back(lay.r(l));
  return cols;
}

void check_shapes(const ChannelSet& cs, const SystemParams& params, const SurrogateCoefficients& coeffs) {
  const Dims& d = cs.dims;
  if (!(params.dims == d)) throw std::invalid_argument("surrogate: parameter and channel dimensions differ");
  if (coeffs.gains.rows() != d.L || coeffs.gains.cols() != d.L || coeffs.expansion.w.rows() != d.MK() ||
      coeffs.expansion.w.cols() != d.L || coeffs.expansion.psi.size() != d.NR())
    throw std::invalid_argument("surrogate: coefficient dimensions do not match the channel set");
}

std::vector<std::string> beamforming_names(const BeamformingLayout& lay) {
  std::vector<std::string> names(static_cast<std::size_t>(lay.size()));
  for (Index l = 0; l < lay.L; ++l)
    for (Index i = 0; i < lay.MK; ++i) {
      const std::string base = "w[" + std::to_string(l) + "][" + std::to_string(i) + "]";
      names[static_cast<std::size_t>(lay.w(l, i))] = base + ".re";
      names[static_cast<std::size_t>(lay.w(l, i) + 1)] = base + ".im";
    }
  names[static_cast<std::size_t>(lay.rho())] = "rho";
  for (Index l = 0; l < lay.L; ++l) {
    names[static_cast<std::size_t>(lay.r(l))] = "r[" + std::to_string(l) + "]";
    names[static_cast<std::size_t>(lay.t(l))] = "t[" + std::to_string(l) + "]";
  }
  return names;
}

// Constraints shared by the beamforming and feasibility programs. The
// epigraph variable of UE l bounds beta_l * phi_l / Omega_l.
void add_beamforming_constraints(ConeProgram& prog, const ChannelSet& cs, const SystemParams& params,
                                 const SurrogateCoefficients& coeffs, const Instance& in,
                                 const BeamformingLayout& lay, AffineRows& lin, const VectorXd& beta) {
  const Dims& d = cs.dims;
  for (Index l = 0; l < d.L; ++l) {
    const bool active = coeffs.gamma[l] > 0.0;
    if (active) {
      add_epigraph(prog, in, l, lay.t(l), beta[l], coeffs.gamma[l]);
      push(lin, in.gain[l][l].re, 2.0 * in.x0[l], -in.x0[l] * in.x0[l] - kOmegaFloor);
    } else {
      lin.add(lin.add_row(), lay.t(l), 1.0);
    }
    push(lin, in.gain[l][l].re);
    add_sinr_cone(prog, in, l, lay.r(l));
  }
  add_backhaul_rows(lin, params, in, r_columns(lay));

  for (Index m = 0; m < d.M; ++m) {
    AffineRows rows(in.n);
    rows.add_row(std::sqrt(params.pmax_w[m]));
    for (Index l = 0; l < d.L; ++l)
      for (Index k = 0; k < d.K; ++k) {
        const Index c = lay.w(l, m * d.K + k);
        rows.add(rows.add_row(), c, 1.0);
        rows.add(rows.add_row(), c + 1, 1.0);
      }
    prog.cones.push_back(std::move(rows).finish(ConeKind::SecondOrder, "power[" + std::to_string(m) + "]"));
  }

  AffineRows total(in.n);
  total.add(total.add_row(-static_power(params)), lay.rho(), 1.0);
  total.add_row(0.5);
  for (Index m = 0; m < d.M; ++m) {
    const double sx = std::sqrt(params.pa_inefficiency[m]);
    for (Index l = 0; l < d.L; ++l)
      for (Index k = 0; k < d.K; ++k) {
        const Index c = lay.w(l, m * d.K + k);
        total.add(total.add_row(), c, sx);
        total.add(total.add_row(), c + 1, sx);
      }
  }
  prog.cones.push_back(std::move(total).finish(ConeKind::RotatedSecondOrder, "total_power"));
}

Instance beamforming_instance(const ChannelSet& cs, const SystemParams& params, const SurrogateCoefficients& coeffs,
                              const BeamformingLayout& lay, Index num_vars) {
  Instance in = make_instance(coeffs, params.noise_power_w, num_vars);
  const MatrixXcd hn = equivalent_channels(cs, coeffs.expansion.psi) / std::sqrt(params.noise_power_w);
  in.gain.resize(static_cast<std::size_t>(in.L));
  for (Index l = 0; l < in.L; ++l)
    for (Index j = 0; j < in.L; ++j) in.gain[static_cast<std::size_t>(l)].push_back(gain_of_w(hn.row(l), lay, j));
  return in;
}

}  // namespace

BoundCoefficients bound_coefficients(double x0, double y0, double z0) {
  if (!(x0 > 0.0 && y0 > 0.0 && z0 > 0.0)) throw std::invalid_argument("bound_coefficients: arguments must be positive");
  return from_gamma(x0 * x0 / y0, z0);
}

double rate_power_bound(double x, double y, double z, double x0, double y0, double z0) {
  if (!(x > 0.0 && y > 0.0 && z > 0.0)) throw std::invalid_argument("rate_power_bound: arguments must be positive");
  const BoundCoefficients bc = bound_coefficients(x0, y0, z0);
  return bc.a - bc.b * y / (x * x) - bc.c * z;
}

Beamformers rotate_beamformers(const ChannelSet& cs, const NetworkState& state) {
  Beamformers w = state.w;
  const MatrixXcd h = equivalent_channels(cs, state.psi);
  for (Index l = 0; l < cs.dims.L; ++l) {
    const std::complex<double> g = (h.row(l) * w.col(l)).value();
    const double mag = std::abs(g);
    if (mag == 0.0) continue;
    w.col(l) *= std::conj(g) / mag;
  }
  return w;
}

SurrogateCoefficients compute_coefficients(const ChannelSet& cs, const SystemParams& params,
                                           const NetworkState& expansion) {
  const Dims& d = cs.dims;
  if (!(expansion.rho > 0.0)) throw std::invalid_argument("compute_coefficients: rho must be positive");
  SurrogateCoefficients sc;
  sc.expansion = expansion;
  sc.gains = link_gains(cs, expansion.psi, expansion.w);
  sc.gamma.resize(d.L);
  sc.a_ee.resize(d.L);
  sc.b_ee.resize(d.L);
  sc.c_ee.resize(d.L);
  sc.a_bar.resize(d.L);
  sc.b_bar.resize(d.L);
  sc.signal.resize(d.L);
  sc.interference.resize(d.L);
  sc.expansion.r_aux.resize(d.L);
  for (Index l = 0; l < d.L; ++l) {
    const std::complex<double> g = sc.gains(l, l);
    if (g.real() < -1e-12 * std::abs(g) || (g.real() <= 0.0 && std::abs(g) > 0.0))
      throw std::invalid_argument("compute_coefficients: invalid expansion point, Re{h^_l w_l} <= 0 for UE " +
                                  std::to_string(l));
    const double x0 = std::max(g.real(), 0.0);
    const double phi = sc.gains.row(l).squaredNorm() - std::norm(g) + params.noise_power_w;
    const double gamma = x0 * x0 / phi;
    const BoundCoefficients ee = from_gamma(gamma, expansion.rho);
    const BoundCoefficients rate = from_gamma(gamma, 1.0);
    sc.signal[l] = x0;
    sc.interference[l] = phi;
    sc.gamma[l] = gamma;
    sc.a_ee[l] = ee.a;
    sc.b_ee[l] = ee.b;
    sc.c_ee[l] = ee.c;
    sc.a_bar[l] = rate.a - std::log1p(gamma);
    sc.b_bar[l] = rate.b;
    sc.expansion.r_aux[l] = std::norm(g) / phi;
  }
  return sc;
}

conic::ConeProgram build_beamforming_subproblem(const ChannelSet& cs, const SystemParams& params,
                                                const SurrogateCoefficients& coeffs) {
  check_shapes(cs, params, coeffs);
  const Dims& d = cs.dims;
  const BeamformingLayout lay{d.MK(), d.L};
  ConeProgram prog;
  prog.objective = VectorXd::Zero(lay.size());
  prog.objective_scale = params.bandwidth_hz;
  prog.objective_offset = coeffs.a_ee.sum();
  prog.objective[lay.rho()] = -coeffs.c_ee.sum();
  for (Index l = 0; l < d.L; ++l) prog.objective[lay.t(l)] = -1.0;
  prog.variable_names = beamforming_names(lay);

  const Instance in = beamforming_instance(cs, params, coeffs, lay, lay.size());
  AffineRows lin(lay.size());
  add_beamforming_constraints(prog, cs, params, coeffs, in, lay, lin, coeffs.b_ee);
  for (Index l = 0; l < d.L; ++l) {
    // Abar - Bbar phi/Omega >= Rmin with Bbar = rho0 * B.
    const Index row = lin.add_row(coeffs.a_bar[l] - params.rmin_nats[l]);
    if (coeffs.gamma[l] > 0.0) lin.add(row, lay.t(l), -coeffs.b_bar[l] / coeffs.b_ee[l]);
  }
  prog.cones.push_back(std::move(lin).finish(ConeKind::Nonnegative, "linear"));
  return prog;
}

conic::ConeProgram build_feasibility_subproblem(const ChannelSet& cs, const SystemParams& params,
                                                const SurrogateCoefficients& coeffs) {
  check_shapes(cs, params, coeffs);
  const Dims& d = cs.dims;
  const BeamformingLayout lay{d.MK(), d.L};
  const Index margin = lay.size();
  ConeProgram prog;
  prog.objective = VectorXd::Zero(lay.size() + 1);
  prog.objective[margin] = 1.0;
  prog.variable_names = beamforming_names(lay);
  prog.variable_names.emplace_back("margin");

  const Instance in = beamforming_instance(cs, params, coeffs, lay, lay.size() + 1);
  AffineRows lin(lay.size() + 1);
  add_beamforming_constraints(prog, cs, params, coeffs, in, lay, lin, coeffs.b_bar);
  for (Index l = 0; l < d.L; ++l) {
    const Index row = lin.add_row(coeffs.a_bar[l] - params.rmin_nats[l]);
    lin.add(row, lay.t(l), -1.0);
    lin.add(row, margin, -1.0);
  }
  const double cap = static_power(params) + params.pa_inefficiency.dot(params.pmax_w);
  lin.add(lin.add_row(cap), lay.rho(), -1.0);
  prog.cones.push_back(std::move(lin).finish(ConeKind::Nonnegative, "linear"));
  return prog;
}

conic::ConeProgram build_phase_subproblem(const ChannelSet& cs, const SystemParams& params,
                                          const SurrogateCoefficients& coeffs, const Beamformers& w_fixed) {
  check_shapes(cs, params, coeffs);
  const Dims& d = cs.dims;
  if (w_fixed.rows() != d.MK() || w_fixed.cols() != d.L)
    throw std::invalid_argument("build_phase_subproblem: beamformer shape");
  const PhaseLayout lay{d.NR(), d.L};
  const double eta = params.penalty / params.bandwidth_hz;
  const VectorXcd& psi0 = coeffs.expansion.psi;

  ConeProgram prog;
  prog.objective = VectorXd::Zero(lay.size());
  prog.objective_scale = params.bandwidth_hz;
  prog.objective_offset = coeffs.a_bar.sum() - eta * (psi0.squaredNorm() + static_cast<double>(d.NR()));
  for (Index i = 0; i < d.NR(); ++i) {
    prog.objective[lay.psi(i)] = 2.0 * eta * psi0[i].real();
    prog.objective[lay.psi(i) + 1] = 2.0 * eta * psi0[i].imag();
  }
  for (Index l = 0; l < d.L; ++l) prog.objective[lay.t(l)] = -1.0;
  prog.variable_names.resize(static_cast<std::size_t>(lay.size()));
  for (Index i = 0; i < d.NR(); ++i) {
    prog.variable_names[static_cast<std::size_t>(lay.psi(i))] = "psi[" + std::to_string(i) + "].re";
    prog.variable_names[static_cast<std::size_t>(lay.psi(i) + 1)] = "psi[" + std::to_string(i) + "].im";
  }
  for (Index l = 0; l < d.L; ++l) {
    prog.variable_names[static_cast<std::size_t>(lay.r(l))] = "r[" + std::to_string(l) + "]";
    prog.variable_names[static_cast<std::size_t>(lay.t(l))] = "t[" + std::to_string(l) + "]";
  }

  Instance in = make_instance(coeffs, params.noise_power_w, lay.size());
  const double inv_sigma = 1.0 / std::sqrt(params.noise_power_w);
  in.gain.resize(static_cast<std::size_t>(d.L));
  for (Index l = 0; l < d.L; ++l) {
    const RowVectorXcd a = cs.direct.row(l) * w_fixed * inv_sigma;
    const MatrixXcd b = cs.cascade[static_cast<std::size_t>(l)] * w_fixed * inv_sigma;
    for (Index j = 0; j < d.L; ++j) in.gain[static_cast<std::size_t>(l)].push_back(gain_of_psi(a[j], b.col(j), lay));
  }

  AffineRows lin(lay.size());
  for (Index l = 0; l < d.L; ++l) {
    const Index qos = lin.add_row(coeffs.a_bar[l] - params.rmin_nats[l]);
    if (coeffs.gamma[l] > 0.0) {
      add_epigraph(prog, in, l, lay.t(l), coeffs.b_bar[l], coeffs.gamma[l]);
      push(lin, in.gain[l][l].re, 2.0 * in.x0[l], -in.x0[l] * in.x0[l] - kOmegaFloor);
      lin.add(qos, lay.t(l), -1.0);
    } else {
      lin.add(lin.add_row(), lay.t(l), 1.0);
    }
    push(lin, in.gain[l][l].re);
    add_sinr_cone(prog, in, l, lay.r(l));
  }
  add_backhaul_rows(lin, params, in, r_columns(lay));
  prog.cones.push_back(std::move(lin).finish(ConeKind::Nonnegative, "linear"));

  for (Index i = 0; i < d.NR(); ++i) {
    AffineRows rows(lay.size());
    rows.add_row(1.0);
    rows.add(rows.add_row(), lay.psi(i), 1.0);
    rows.add(rows.add_row(), lay.psi(i) + 1, 1.0);
    prog.cones.push_back(std::move(rows).finish(ConeKind::SecondOrder, "modulus[" + std::to_string(i) + "]"));
  }
  return prog;
}

Eigen::VectorXd lift_beamforming(const ChannelSet& cs, const SystemParams&, const SurrogateCoefficients& coeffs) {
  const Dims& d = cs.dims;
  const BeamformingLayout lay{d.MK(), d.L};
  VectorXd x = VectorXd::Zero(lay.size());
  for (Index l = 0; l < d.L; ++l)
    for (Index i = 0; i < d.MK(); ++i) {
      x[lay.w(l, i)] = coeffs.expansion.w(i, l).real();
      x[lay.w(l, i) + 1] = coeffs.expansion.w(i, l).imag();
    }
  x[lay.rho()] = coeffs.expansion.rho;
  for (Index l = 0; l < d.L; ++l) {
    x[lay.r(l)] = coeffs.expansion.r_aux[l];
    x[lay.t(l)] = coeffs.gamma[l] > 0.0 ? coeffs.b_ee[l] / coeffs.gamma[l] : 0.0;
  }
  return x;
}

Eigen::VectorXd lift_phase(const ChannelSet& cs, const SystemParams&, const SurrogateCoefficients& coeffs) {
  const Dims& d = cs.dims;
  const PhaseLayout lay{d.NR(), d.L};
  VectorXd x = VectorXd::Zero(lay.size());
  for (Index i = 0; i < d.NR(); ++i) {
    x[lay.psi(i)] = coeffs.expansion.psi[i].real();
    x[lay.psi(i) + 1] = coeffs.expansion.psi[i].imag();
  }
  for (Index l = 0; l < d.L; ++l) {
    x[lay.r(l)] = coeffs.expansion.r_aux[l];
    x[lay.t(l)] = coeffs.gamma[l] > 0.0 ? coeffs.b_bar[l] / coeffs.gamma[l] : 0.0;
  }
  return x;
}

BeamformingSolution extract_beamforming(const Dims& dims, const Eigen::VectorXd& x) {
  const BeamformingLayout lay{dims.MK(), dims.L};
  if (x.size() < lay.size()) throw std::invalid_argument("extract_beamforming: vector too short");
  BeamformingSolution sol;
  sol.w.resize(dims.MK(), dims.L);
  for (Index l = 0; l < dims.L; ++l)
    for (Index i = 0; i < dims.MK(); ++i) sol.w(i, l) = {x[lay.w(l, i)], x[lay.w(l, i) + 1]};
  sol.rho = x[lay.rho()];
  sol.r.resize(dims.L);
  for (Index l = 0; l < dims.L; ++l) sol.r[l] = x[lay.r(l)];
  return sol;
}

Eigen::VectorXcd extract_phase(const Dims& dims, const Eigen::VectorXd& x) {
  const PhaseLayout lay{dims.NR(), dims.L};
  if (x.size() < lay.size()) throw std::invalid_argument("extract_phase: vector too short");
  VectorXcd psi(dims.NR());
  for (Index i = 0; i < dims.NR(); ++i) psi[i] = {x[lay.psi(i)], x[lay.psi(i) + 1]};
  return psi;
}

Eigen::VectorXd surrogate_rates(const SurrogateCoefficients& coeffs, const Eigen::MatrixXcd& gains,
                                double noise_power_w) {
  const Index L = gains.rows();
  VectorXd out(L);
  for (Index l = 0; l < L; ++l) {
    if (!(coeffs.gamma[l] > 0.0)) {
      out[l] = 0.0;
      continue;
    }
    const double x0 = coeffs.signal[l];
    const double phi = gains.row(l).squaredNorm() - std::norm(gains(l, l)) + noise_power_w;
    const double omega = 2.0 * x0 * gains(l, l).real() - x0 * x0;
    out[l] = omega > 0.0 ? coeffs.a_bar[l] - coeffs.b_bar[l] * phi / omega : -std::numeric_limits<double>::infinity();
  }
  return out;
}

double beamforming_surrogate_value(const ChannelSet& cs, const SystemParams& params,
                                   const SurrogateCoefficients& coeffs, const Beamformers& w, double rho) {
  const MatrixXcd gains = link_gains(cs, coeffs.expansion.psi, w);
  double total = 0.0;
  for (Index l = 0; l < cs.dims.L; ++l) {
    if (!(coeffs.gamma[l] > 0.0)) continue;
    const double x0 = coeffs.signal[l];
    const double phi = gains.row(l).squaredNorm() - std::norm(gains(l, l)) + params.noise_power_w;
    const double omega = 2.0 * x0 * gains(l, l).real() - x0 * x0;
    if (!(omega > 0.0)) return -std::numeric_limits<double>::infinity();
    total += coeffs.a_ee[l] - coeffs.b_ee[l] * phi / omega - coeffs.c_ee[l] * rho;
  }
  return params.bandwidth_hz * total;
}

double beamforming_true_value(const ChannelSet& cs, const SystemParams& params, const Eigen::VectorXcd& psi,
                              const Beamformers& w, double rho) {
  NetworkState st{w, psi, rho, {}};
  return params.bandwidth_hz * rates_nats(cs, st, params.noise_power_w).sum() / rho;
}

double phase_surrogate_value(const ChannelSet& cs, const SystemParams& params, const SurrogateCoefficients& coeffs,
                             const Eigen::VectorXcd& psi) {
  const MatrixXcd gains = link_gains(cs, psi, coeffs.expansion.w);
  const VectorXcd& psi0 = coeffs.expansion.psi;
  const double linearized = 2.0 * psi0.dot(psi).real() - psi0.squaredNorm();
  return params.bandwidth_hz * surrogate_rates(coeffs, gains, params.noise_power_w).sum() +
         params.penalty * (linearized - static_cast<double>(cs.dims.NR()));
}

double phase_true_value(const ChannelSet& cs, const SystemParams& params, const Beamformers& w,
                        const Eigen::VectorXcd& psi) {
  NetworkState st{w, psi, 1.0, {}};
  return params.bandwidth_hz * rates_nats(cs, st, params.noise_power_w).sum() +
         params.penalty * (psi.squaredNorm() - static_cast<double>(cs.dims.NR()));
}

}  // namespace riscf
