#include "riscf/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "riscf/surrogate.hpp"

namespace riscf {

namespace {

using Clock = std::chrono::steady_clock;
using Eigen::VectorXcd;
using Eigen::VectorXd;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double sum_rate(const ChannelSet& cs, const SystemParams& params, const NetworkState& st) {
  return rates_nats(cs, st, params.noise_power_w).sum();
}

void refresh(const ChannelSet& cs, const SystemParams& params, NetworkState& st) {
  st.rho = total_power(params, st.w);
  st.r_aux = sinrs(cs, st, params.noise_power_w);
}

IterationRecord snapshot(const ChannelSet& cs, const SystemParams& params, const NetworkState& st, bool ris) {
  IterationRecord rec;
  rec.sum_rate = sum_rate(cs, params, st);
  rec.power = total_power(params, st.w);
  rec.ee = params.bandwidth_hz * rec.sum_rate / std::numbers::ln2 / rec.power;
  const Residuals res = constraint_residuals(params, cs, st);
  rec.max_violation = std::max(0.0, -res.worst_margin());
  rec.max_modulus_deviation = ris ? res.max_modulus_deviation() : 0.0;
  return rec;
}

Beamformers matched_filter(const ChannelSet& cs, const SystemParams& params, const VectorXcd& psi) {
  const Dims& d = cs.dims;
  const Eigen::MatrixXcd h = equivalent_channels(cs, psi);
  Beamformers w = Beamformers::Zero(d.MK(), d.L);
  for (Index m = 0; m < d.M; ++m) {
    const double per_ue = std::sqrt(params.pmax_w[m] / static_cast<double>(d.L));
    for (Index l = 0; l < d.L; ++l) {
      const Eigen::RowVectorXcd hm = h.row(l).segment(m * d.K, d.K);
      const double norm = hm.norm();
      if (norm > 0.0) w.col(l).segment(m * d.K, d.K) = hm.adjoint() * (per_ue / norm);
    }
  }
  return w;
}

conic::SolveReport solve_step(const conic::ConeProgram& prog, const AlgoConfig& config, const char* what,
                              int iteration, Trace& trace) {
  if (config.program_sink) config.program_sink(what, iteration, prog);
  conic::SolveReport rep = conic::solve(prog, config.solver);
  if (rep.reduced_accuracy) ++trace.reduced_accuracy_solves;
  if (rep.status != conic::SolveStatus::Optimal)
    throw SolverFailure(std::string(what) + " step at outer iteration " + std::to_string(iteration) + ": " +
                            conic::to_string(rep.status),
                        iteration);
  return rep;
}

}  // namespace

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::RisCf: return "ris_cf";
    case Scheme::CfNoRis: return "cf_no_ris";
    case Scheme::CollocatedRis: return "collocated_ris";
    case Scheme::CollocatedNoRis: return "collocated_no_ris";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::RisCf, Scheme::CfNoRis, Scheme::CollocatedRis, Scheme::CollocatedNoRis})
    if (name == to_string(s)) return s;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

bool uses_ris(Scheme scheme) { return scheme == Scheme::RisCf || scheme == Scheme::CollocatedRis; }
bool is_collocated(Scheme scheme) { return scheme == Scheme::CollocatedRis || scheme == Scheme::CollocatedNoRis; }

Scenario make_scenario(const Dims& dims, double region_radius, const FadingParams& fading) {
  Scenario sc;
  sc.fading = fading;
  sc.layout = generate_layout(dims.M, dims.N, dims.L, region_radius, splitmix(fading.seed));
  sc.draws = draw_fading(dims, splitmix(fading.seed + 1));
  sc.channels = compose_channels(sc.layout, fading, sc.draws);
  return sc;
}

SystemParams collocated_params(const SystemParams& params) {
  SystemParams p = params;
  p.dims.M = 1;
  p.dims.K = params.dims.MK();
  p.pmax_w = VectorXd::Constant(1, params.pmax_w.sum());
  p.pa_inefficiency = VectorXd::Constant(1, params.pa_inefficiency.mean());
  p.p_ap_w = VectorXd::Constant(1, params.p_ap_w.sum());
  p.p_bh_w = params.p_bh_w * static_cast<double>(params.dims.M);
  p.backhaul_cap_nats = params.backhaul_cap_nats.head(1);
  p.backhaul_scale = params.backhaul_scale.head(1);
  return p;
}

NetworkState initialize(const ChannelSet& cs, const SystemParams& params, const AlgoConfig& config, Trace* trace) {
  const Dims& d = cs.dims;
  NetworkState st;
  st.psi = VectorXcd::Zero(d.NR());
  if (uses_ris(config.scheme)) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (Index i = 0; i < d.NR(); ++i) st.psi[i] = std::polar(1.0, angle(rng));
  }
  st.w = matched_filter(cs, params, st.psi);
  if (st.w.isZero(0.0)) throw InfeasibleInstance("all equivalent channels vanish");

  // Common down-scaling until the backhaul limits hold.
  const double limit = params.backhaul_limit().minCoeff();
  double scale = 1.0;
  if (sum_rate(cs, params, st) > limit) {
    const Beamformers w0 = st.w;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      st.w = mid * w0;
      (sum_rate(cs, params, st) <= limit * (1.0 - 1e-9) ? lo : hi) = mid;
    }
    scale = lo;
    st.w = lo * w0;
  }
  if (trace) trace->initial_scale = scale;
  refresh(cs, params, st);

  int feas_iters = 0;
  double best_margin = constraint_residuals(params, cs, st).rate.minCoeff();
  while (best_margin < 0.0) {
    if (feas_iters >= config.max_feasibility_iters)
      throw InfeasibleInstance("feasibility phase reached its iteration cap with rate margin " +
                               std::to_string(best_margin));
    ++feas_iters;
    NetworkState exp = st;
    exp.w = rotate_beamformers(cs, st);
    exp.rho = total_power(params, exp.w);
    if ((exp.w.colwise().norm().array() == 0.0).any())
      throw InfeasibleInstance("a user has a vanishing equivalent channel");
    const SurrogateCoefficients coeffs = compute_coefficients(cs, params, exp);
    const conic::ConeProgram prog = build_feasibility_subproblem(cs, params, coeffs);
    if (config.program_sink) config.program_sink("feasibility", feas_iters, prog);
    const conic::SolveReport rep = conic::solve(prog, config.solver);
    if (rep.status == conic::SolveStatus::Infeasible)
      throw InfeasibleInstance("feasibility subproblem is infeasible");
    if (rep.status != conic::SolveStatus::Optimal)
      throw SolverFailure(std::string("feasibility step: ") + conic::to_string(rep.status), 0);
    if (rep.reduced_accuracy && trace) ++trace->reduced_accuracy_solves;
    st.w = extract_beamforming(d, rep.primal).w;
    refresh(cs, params, st);
    const double margin = constraint_residuals(params, cs, st).rate.minCoeff();
    const double gained = margin - best_margin;
    best_margin = margin;
    if (margin < 0.0 && gained <= 1e-9 * std::max(1.0, std::abs(margin)))
      throw InfeasibleInstance("feasibility phase stalled with rate margin " + std::to_string(margin));
  }
  if (trace) trace->feasibility_iters = feas_iters;
  return st;
}

RunResult run(const ChannelSet& cs, const SystemParams& params, const AlgoConfig& config) {
  if (auto bad = check(params); !bad.empty()) throw std::invalid_argument("invalid parameters: " + bad.front());
  if (!(params.dims == cs.dims)) throw std::invalid_argument("parameter and channel dimensions differ");
  if (config.max_outer_iters < 1 || !(config.ee_rel_tol > 0.0) || !(config.unit_modulus_tol > 0.0))
    throw std::invalid_argument("invalid algorithm configuration");

  const bool ris = uses_ris(config.scheme) && cs.dims.NR() > 0;
  RunResult out;
  Trace& trace = out.trace;
  auto start = Clock::now();
  NetworkState st = initialize(cs, params, config, &trace);

  IterationRecord rec0 = snapshot(cs, params, st, ris);
  rec0.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  trace.records.push_back(rec0);
  double prev = rec0.ee;

  for (int kappa = 1; kappa <= config.max_outer_iters; ++kappa) {
    start = Clock::now();
    IterationRecord rec;

    NetworkState exp = st;
    exp.w = rotate_beamformers(cs, st);
    exp.rho = total_power(params, exp.w);
    const SurrogateCoefficients bc = compute_coefficients(cs, params, exp);
    const conic::ConeProgram bprog = build_beamforming_subproblem(cs, params, bc);
    if (config.audit)
      rec.beamforming_tightness = relative(bprog.natural_objective(lift_beamforming(cs, params, bc)),
                                           beamforming_true_value(cs, params, exp.psi, exp.w, exp.rho));
    const conic::SolveReport brep = solve_step(bprog, config, "beamforming", kappa, trace);
    rec.beamforming_status = brep.status;
    rec.beamforming_solver_iters = brep.iterations;
    st.w = extract_beamforming(cs.dims, brep.primal).w;
    refresh(cs, params, st);

    if (ris) {
      NetworkState pexp = st;
      pexp.w = rotate_beamformers(cs, st);
      const SurrogateCoefficients pc = compute_coefficients(cs, params, pexp);
      const conic::ConeProgram pprog = build_phase_subproblem(cs, params, pc, pexp.w);
      if (config.audit)
        rec.phase_tightness = relative(pprog.natural_objective(lift_phase(cs, params, pc)),
                                       phase_true_value(cs, params, pexp.w, pexp.psi));
      const conic::SolveReport prep = solve_step(pprog, config, "phase", kappa, trace);
      rec.phase_status = prep.status;
      rec.phase_solver_iters = prep.iterations;
      NetworkState cand = pexp;
      cand.psi = extract_phase(cs.dims, prep.primal);
      refresh(cs, params, cand);
      // Keep the previous phases when the relaxed step lowers the true EE.
      if (energy_efficiency(params, cs, cand) >= energy_efficiency(params, cs, pexp)) {
        st = cand;
      } else {
        st = pexp;
        rec.phase_step_kept = false;
        ++trace.phase_steps_rejected;
      }
    }

    const IterationRecord snap = snapshot(cs, params, st, ris);
    rec.iteration = kappa;
    rec.ee = snap.ee;
    rec.sum_rate = snap.sum_rate;
    rec.power = snap.power;
    rec.max_violation = snap.max_violation;
    rec.max_modulus_deviation = snap.max_modulus_deviation;
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    trace.records.push_back(rec);

    if (rec.ee < prev - config.monotone_tol * std::abs(prev))
      throw MonotonicityViolation("EE decreased from " + std::to_string(prev) + " to " + std::to_string(rec.ee) +
                                  " at outer iteration " + std::to_string(kappa));
    const bool done = rec.ee - prev <= config.ee_rel_tol * std::abs(prev);
    prev = std::max(prev, rec.ee);
    if (done) {
      trace.converged = true;
      break;
    }
  }

  if (ris) {
    trace.pre_projection_modulus_deviation = (st.psi.cwiseAbs().array() - 1.0).abs().maxCoeff();
    const double before = energy_efficiency(params, cs, st);
    for (Index i = 0; i < st.psi.size(); ++i) {
      const double mag = std::abs(st.psi[i]);
      st.psi[i] = mag > 0.0 ? st.psi[i] / mag : std::complex<double>(1.0, 0.0);
    }
    refresh(cs, params, st);
    trace.projection_ee_change = relative(energy_efficiency(params, cs, st), before);
  }
  out.state = st;
  out.residuals = constraint_residuals(params, cs, st);
  if (!ris) out.residuals.modulus.resize(0);
  out.ee = energy_efficiency(params, cs, st);
  out.sum_rate = sum_rate(cs, params, st);
  out.power = total_power(params, st.w);
  trace.closing_check_ok = out.residuals.worst_margin() >= -kClosingTol &&
                           trace.projection_ee_change <= 10.0 * config.unit_modulus_tol;
  return out;
}

RunResult run_baseline(const Scenario& scenario, const SystemParams& params, const AlgoConfig& config) {
  if (!is_collocated(config.scheme)) return run(scenario.channels, params, config);
  const ChannelSet cs = compose_channels(collocated_layout(scenario.layout), scenario.fading,
                                         collocated_draws(scenario.draws));
  return run(cs, collocated_params(params), config);
}

}  // namespace riscf
