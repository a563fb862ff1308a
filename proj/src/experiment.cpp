#include "riscf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <thread>

#include <json.hpp>

namespace riscf {

namespace {

namespace fs = std::filesystem;

std::mutex log_mutex;

void log_line(const std::string& s) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << s << '\n';
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

struct Point {
  std::string sweep;
  double value = 0.0;
  SystemParams params;
};

std::vector<Point> sweep_points(const ExperimentSpec& spec) {
  std::vector<Point> pts;
  switch (spec.experiment) {
    case Experiment::Single:
      pts.push_back({"none", 0.0, spec.params});
      break;
    case Experiment::Convergence:
      for (Index k : spec.k_list) {
        Point p{"k", static_cast<double>(k), spec.params};
        p.params.dims.K = k;
        pts.push_back(std::move(p));
      }
      break;
    case Experiment::EeVsPmax:
      for (double v : spec.pmax_list_dbm) {
        Point p{"pmax_dbm", v, spec.params};
        p.params.pmax_w.setConstant(dbm_to_w(v));
        pts.push_back(std::move(p));
      }
      break;
    case Experiment::EeVsBackhaul:
      for (double v : spec.cmax_list_bps_hz) {
        Point p{"cmax_bps_hz", v, spec.params};
        p.params.backhaul_cap_nats.setConstant(v * std::numbers::ln2);
        pts.push_back(std::move(p));
      }
      break;
  }
  return pts;
}

struct Job {
  std::size_t point = 0;
  Scheme scheme = Scheme::RisCf;
  int trial = 0;
};

nlohmann::json record_json(const IterationRecord& r) {
  return {{"iteration", r.iteration},
          {"ee", r.ee},
          {"sum_rate_nats", r.sum_rate},
          {"power_w", r.power},
          {"max_violation", r.max_violation},
          {"max_modulus_deviation", r.max_modulus_deviation},
          {"beamforming_status", conic::to_string(r.beamforming_status)},
          {"phase_status", conic::to_string(r.phase_status)},
          {"beamforming_solver_iters", r.beamforming_solver_iters},
          {"phase_solver_iters", r.phase_solver_iters},
          {"beamforming_tightness", r.beamforming_tightness},
          {"phase_tightness", r.phase_tightness},
          {"phase_step_kept", r.phase_step_kept},
          {"wall_seconds", r.wall_seconds}};
}

std::ofstream open_out(const fs::path& path, ExperimentSummary& summary) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  summary.files.push_back(path.string());
  return out;
}

}  // namespace

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe m;
  m.n = values.size();
  if (values.empty()) return m;
  double s = 0.0;
  for (double v : values) s += v;
  m.mean = s / static_cast<double>(m.n);
  if (m.n < 2) return m;
  double q = 0.0;
  for (double v : values) q += (v - m.mean) * (v - m.mean);
  m.se = std::sqrt(q / static_cast<double>(m.n - 1) / static_cast<double>(m.n));
  return m;
}

TrialOutcome run_trial(const SystemParams& params, const FadingParams& fading, double region_radius_m,
                       Scheme scheme, std::uint64_t seed, const AlgoConfig& algo) {
  TrialOutcome out;
  out.seed = seed;
  FadingParams fp = fading;
  fp.seed = seed;
  AlgoConfig cfg = algo;
  cfg.scheme = scheme;
  cfg.seed = seed;
  try {
    const Scenario sc = make_scenario(params.dims, region_radius_m, fp);
    out.result = run_baseline(sc, params, cfg);
    const RunResult& r = out.result;
    out.ee = r.ee;
    out.sum_rate = r.sum_rate;
    out.power = r.power;
    out.max_violation = std::max(0.0, -r.residuals.worst_margin());
    if (out.max_violation > kRowViolationTol) {
      out.status = "constraint_violation";
      out.message = "residual violation " + num(out.max_violation);
    } else if (!r.trace.closing_check_ok) {
      out.status = "constraint_violation";
      out.message = "closing projection changed EE by " + num(r.trace.projection_ee_change);
    } else if (r.trace.pre_projection_modulus_deviation > cfg.unit_modulus_tol) {
      out.status = "constraint_violation";
      out.message = "unit-modulus deviation " + num(r.trace.pre_projection_modulus_deviation) + " before projection";
    }
  } catch (const InfeasibleInstance& e) {
    out.status = "infeasible";
    out.message = e.what();
  } catch (const SolverFailure& e) {
    out.status = "solver_failure";
    out.message = e.what();
  } catch (const MonotonicityViolation& e) {
    out.status = "monotonicity_violation";
    out.message = e.what();
  } catch (const std::exception& e) {
    out.status = "error";
    out.message = e.what();
  }
  return out;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ExperimentSummary run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  if (spec.schemes.empty()) throw std::invalid_argument("no schemes selected");
  const std::vector<Point> points = sweep_points(spec);
  if (points.empty()) throw std::invalid_argument("empty sweep list");
  const int trials = spec.experiment == Experiment::Single ? 1 : spec.trials;
  const std::string name = to_string(spec.experiment);

  std::vector<Job> jobs;
  for (std::size_t p = 0; p < points.size(); ++p)
    for (Scheme s : spec.schemes)
      for (int t = 0; t < trials; ++t) jobs.push_back({p, s, t});

  if (!options.dump_dir.empty()) fs::create_directories(options.dump_dir);
  std::vector<TrialOutcome> outcomes(jobs.size());
  parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    const Point& pt = points[job.point];
    AlgoConfig algo = spec.algo;
    if (options.verbosity >= 3) algo.solver.verbose = true;
    if (!options.dump_dir.empty()) {
      const std::string stem = name + "_p" + std::to_string(job.point) + "_" + to_string(job.scheme) + "_t" +
                               std::to_string(job.trial);
      algo.program_sink = [stem, dir = options.dump_dir](const std::string& step, int it,
                                                         const conic::ConeProgram& prog) {
        std::ofstream f(fs::path(dir) / (stem + "_" + step + "_" + std::to_string(it) + ".cone"));
        conic::write_program(f, prog);
      };
    }
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(job.trial);
    outcomes[i] = run_trial(pt.params, spec.fading, spec.region_radius_m, job.scheme, seed, algo);
    const TrialOutcome& o = outcomes[i];
    if (options.verbosity >= 1) {
      std::string line = name + " " + pt.sweep + "=" + num(pt.value) + " " + to_string(job.scheme) + " trial " +
                         std::to_string(job.trial) + ": " + o.status;
      if (o.ok()) line += " ee=" + num(o.ee) + " iters=" + std::to_string(o.result.trace.records.size() - 1);
      else line += " (" + o.message + ")";
      log_line(line);
    }
    if (options.verbosity >= 2 && !o.result.trace.records.empty())
      for (const auto& r : o.result.trace.records)
        log_line("  iter " + std::to_string(r.iteration) + " ee=" + num(r.ee) + " power=" + num(r.power) +
                 " viol=" + num(r.max_violation));
  });

  fs::create_directories(options.output_dir);
  const fs::path dir(options.output_dir);
  ExperimentSummary summary;

  {
    std::ofstream trials_csv = open_out(dir / (name + "_trials.csv"), summary);
    trials_csv << "experiment,sweep,value,scheme,trial,seed,status,ee_bits_per_joule,sum_rate_nats,total_power_w,"
                  "outer_iters,feasibility_iters,max_violation,pre_projection_modulus_dev,phase_steps_rejected,"
                  "reduced_accuracy_solves,message\n";
    std::ofstream traces = open_out(dir / (name + "_traces.jsonl"), summary);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const Job& job = jobs[i];
      const Point& pt = points[job.point];
      const TrialOutcome& o = outcomes[i];
      const Trace& tr = o.result.trace;
      const bool has_run = !tr.records.empty();
      trials_csv << name << ',' << pt.sweep << ',' << num(pt.value) << ',' << to_string(job.scheme) << ','
                 << job.trial << ',' << o.seed << ',' << o.status << ',' << num(o.ee) << ',' << num(o.sum_rate)
                 << ',' << num(o.power) << ',' << (has_run ? std::to_string(tr.records.size() - 1) : "0") << ','
                 << tr.feasibility_iters << ',' << num(o.max_violation) << ','
                 << num(has_run ? tr.pre_projection_modulus_deviation : std::nan("")) << ','
                 << tr.phase_steps_rejected << ',' << tr.reduced_accuracy_solves << ',' << quoted(o.message)
                 << '\n';
      for (const auto& r : tr.records) {
        nlohmann::json j = {{"experiment", name}, {"sweep", pt.sweep},  {"value", pt.value},
                            {"scheme", to_string(job.scheme)}, {"trial", job.trial}, {"seed", o.seed}};
        j.update(record_json(r));
        traces << j.dump() << '\n';
      }
    }
  }

  {
    std::ofstream csv = open_out(dir / (name + ".csv"), summary);
    csv << "experiment,sweep,value,scheme,trials,trials_ok,ee_mean,ee_stderr,sum_rate_mean,power_mean,"
           "outer_iters_mean,max_violation,status\n";
    for (std::size_t p = 0; p < points.size(); ++p)
      for (Scheme s : spec.schemes) {
        std::vector<double> ee, rate, power, iters;
        double worst = 0.0;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
          if (jobs[i].point != p || jobs[i].scheme != s || !outcomes[i].ok()) continue;
          const TrialOutcome& o = outcomes[i];
          ee.push_back(o.ee);
          rate.push_back(o.sum_rate);
          power.push_back(o.power);
          iters.push_back(static_cast<double>(o.result.trace.records.size() - 1));
          worst = std::max(worst, o.max_violation);
        }
        const MeanSe e = mean_se(ee);
        const int ok = static_cast<int>(ee.size());
        const char* status = ok == trials ? "ok" : ok == 0 ? "failed" : "partial";
        csv << name << ',' << points[p].sweep << ',' << num(points[p].value) << ',' << to_string(s) << ','
            << trials << ',' << ok << ',' << num(e.mean) << ',' << num(e.se) << ',' << num(mean_se(rate).mean)
            << ',' << num(mean_se(power).mean) << ',' << num(mean_se(iters).mean) << ','
            << num(ok ? worst : std::nan("")) << ',' << status << '\n';
        ++summary.rows;
        if (ok == trials) ++summary.rows_ok;
      }
  }

  if (spec.experiment == Experiment::Convergence) {
    std::ofstream csv = open_out(dir / "convergence_curve.csv", summary);
    csv << "k,scheme,iteration,trials_ok,ee_mean,ee_stderr\n";
    for (std::size_t p = 0; p < points.size(); ++p)
      for (Scheme s : spec.schemes) {
        std::vector<const Trace*> runs;
        std::size_t longest = 0;
        for (std::size_t i = 0; i < jobs.size(); ++i)
          if (jobs[i].point == p && jobs[i].scheme == s && outcomes[i].ok()) {
            runs.push_back(&outcomes[i].result.trace);
            longest = std::max(longest, outcomes[i].result.trace.records.size());
          }
        // Finished runs hold their last value.
        for (std::size_t it = 0; it < longest; ++it) {
          std::vector<double> v;
          for (const Trace* t : runs) v.push_back(t->records[std::min(it, t->records.size() - 1)].ee);
          const MeanSe m = mean_se(v);
          csv << num(points[p].value) << ',' << to_string(s) << ',' << it << ',' << runs.size() << ','
              << num(m.mean) << ',' << num(m.se) << '\n';
        }
      }
  }

  if (spec.experiment == Experiment::Single) {
    std::ofstream csv = open_out(dir / "single_residuals.csv", summary);
    csv << "scheme,trial,family,index,value\n";
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const TrialOutcome& o = outcomes[i];
      if (o.result.trace.records.empty()) continue;
      const Residuals& r = o.result.residuals;
      const std::pair<const char*, const Eigen::VectorXd*> fams[] = {
          {"power", &r.power}, {"rate", &r.rate}, {"backhaul", &r.backhaul}, {"modulus", &r.modulus}};
      for (const auto& [fam, vec] : fams)
        for (Index k = 0; k < vec->size(); ++k)
          csv << to_string(jobs[i].scheme) << ',' << jobs[i].trial << ',' << fam << ',' << k << ',' << num((*vec)[k]) << '\n';
    }
  }
  return summary;
}

}  // namespace riscf
