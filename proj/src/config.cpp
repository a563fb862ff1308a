#include "riscf/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace riscf {

namespace {

struct Entry {
  std::string key;
  std::optional<Index> index;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  Entry split(const std::string& raw, int line) const {
    const auto eq = raw.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    Entry e;
    e.line = line;
    e.key = trim(raw.substr(0, eq));
    e.value = trim(raw.substr(eq + 1));
    if (e.key.empty()) fail(line, "missing key");
    if (e.value.empty()) fail(line, "missing value for '" + e.key + "'");
    if (const auto open = e.key.find('['); open != std::string::npos) {
      if (e.key.back() != ']') fail(line, "malformed index in '" + e.key + "'");
      const std::string idx = e.key.substr(open + 1, e.key.size() - open - 2);
      long long v = -1;
      const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), v);
      if (ec != std::errc{} || ptr != idx.data() + idx.size() || v < 0)
        fail(line, "index of '" + e.key + "' must be a nonnegative integer");
      e.index = static_cast<Index>(v);
      e.key = trim(e.key.substr(0, open));
    }
    return e;
  }

  double number(const Entry& e, const std::string& text) const {
    double v = 0.0;
    const std::string t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v))
      fail(e.line, "'" + e.key + "' expects a number, got '" + t + "'");
    return v;
  }
  double number(const Entry& e) const { return number(e, e.value); }

  long long integer(const Entry& e, const std::string& text) const {
    long long v = 0;
    const std::string t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
      fail(e.line, "'" + e.key + "' expects an integer, got '" + t + "'");
    return v;
  }
  long long integer(const Entry& e) const { return integer(e, e.value); }

  std::vector<std::string> items(const Entry& e) const {
    std::vector<std::string> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) fail(e.line, "empty item in list '" + e.key + "'");
      out.push_back(item);
    }
    return out;
  }

  std::vector<double> numbers(const Entry& e) const {
    std::vector<double> out;
    for (const auto& s : items(e)) out.push_back(number(e, s));
    return out;
  }

  void require(bool ok, const Entry& e, const std::string& what) const {
    if (!ok) fail(e.line, "'" + e.key + "' " + what);
  }

 private:
  std::string source_;
};

enum class Scope { Scalar, PerAp, PerUe };

const std::map<std::string, Scope>& param_keys() {
  static const std::map<std::string, Scope> keys{
      {"bandwidth_mhz", Scope::Scalar}, {"noise_dbm", Scope::Scalar},  {"pmax_dbm", Scope::PerAp},
      {"xi", Scope::PerAp},             {"p_ap_dbw", Scope::PerAp},    {"p_ue_dbm", Scope::PerUe},
      {"p_ris_dbm", Scope::Scalar},     {"p_bh_dbw", Scope::Scalar},   {"cmax_bps_hz", Scope::PerAp},
      {"omega", Scope::PerAp},          {"rmin_bps_hz", Scope::PerUe}, {"penalty", Scope::Scalar},
  };
  return keys;
}

const std::vector<std::string>& dim_keys() {
  static const std::vector<std::string> keys{"M", "N", "L", "K", "R"};
  return keys;
}

void apply_param(const Parser& ps, const Entry& e, SystemParams& p) {
  const double v = ps.number(e);
  auto set = [&](Eigen::VectorXd& vec, double value) {
    if (e.index) {
      ps.require(*e.index < vec.size(), e, "index " + std::to_string(*e.index) + " out of range (size " +
                                              std::to_string(vec.size()) + ")");
      vec[*e.index] = value;
    } else {
      vec.setConstant(value);
    }
  };
  const std::string& k = e.key;
  if (k == "bandwidth_mhz") {
    ps.require(v > 0.0, e, "must be positive");
    p.bandwidth_hz = v * 1e6;
  } else if (k == "noise_dbm") {
    p.noise_power_w = dbm_to_w(v);
  } else if (k == "pmax_dbm") {
    set(p.pmax_w, dbm_to_w(v));
  } else if (k == "xi") {
    ps.require(v >= 1.0, e, "(amplifier inefficiency) must be >= 1");
    set(p.pa_inefficiency, v);
  } else if (k == "p_ap_dbw") {
    set(p.p_ap_w, dbw_to_w(v));
  } else if (k == "p_ue_dbm") {
    set(p.p_ue_w, dbm_to_w(v));
  } else if (k == "p_ris_dbm") {
    p.p_ris_elem_w = dbm_to_w(v);
  } else if (k == "p_bh_dbw") {
    p.p_bh_w = dbw_to_w(v);
  } else if (k == "cmax_bps_hz") {
    ps.require(v > 0.0, e, "must be positive");
    set(p.backhaul_cap_nats, v * std::numbers::ln2);
  } else if (k == "omega") {
    ps.require(v >= 1.0, e, "must be >= 1");
    set(p.backhaul_scale, v);
  } else if (k == "rmin_bps_hz") {
    ps.require(v >= 0.0, e, "must be >= 0");
    set(p.rmin_nats, v * std::numbers::ln2);
  } else if (k == "penalty") {
    ps.require(v > 0.0, e, "must be positive");
    p.penalty = v;
  }
}

void apply_other(const Parser& ps, const Entry& e, ExperimentSpec& spec) {
  const std::string& k = e.key;
  if (k == "experiment") {
    try {
      spec.experiment = parse_experiment(e.value);
    } catch (const std::invalid_argument& ex) {
      ps.fail(e.line, ex.what());
    }
  } else if (k == "schemes") {
    spec.schemes.clear();
    for (const auto& s : ps.items(e)) {
      try {
        spec.schemes.push_back(parse_scheme(s));
      } catch (const std::invalid_argument& ex) {
        ps.fail(e.line, ex.what());
      }
    }
  } else if (k == "trials") {
    const long long v = ps.integer(e);
    ps.require(v >= 1, e, "must be >= 1");
    spec.trials = static_cast<int>(v);
  } else if (k == "seed") {
    const long long v = ps.integer(e);
    ps.require(v >= 0, e, "must be >= 0");
    spec.seed = static_cast<std::uint64_t>(v);
  } else if (k == "region_radius_m") {
    spec.region_radius_m = ps.number(e);
    ps.require(spec.region_radius_m > 0.0, e, "must be positive");
  } else if (k == "shadow_std_db") {
    spec.fading.shadow_std_db = ps.number(e);
    ps.require(spec.fading.shadow_std_db >= 0.0, e, "must be >= 0");
  } else if (k == "d0_m") {
    spec.fading.ref_dist_0 = ps.number(e);
  } else if (k == "d1_m") {
    spec.fading.ref_dist_1 = ps.number(e);
  } else if (k == "pmax_list_dbm") {
    spec.pmax_list_dbm = ps.numbers(e);
  } else if (k == "cmax_list_bps_hz") {
    spec.cmax_list_bps_hz = ps.numbers(e);
    for (double v : spec.cmax_list_bps_hz) ps.require(v > 0.0, e, "entries must be positive");
  } else if (k == "k_list") {
    spec.k_list.clear();
    for (const auto& s : ps.items(e)) {
      const long long v = ps.integer(e, s);
      ps.require(v >= 1, e, "entries must be >= 1");
      spec.k_list.push_back(static_cast<Index>(v));
    }
  } else if (k == "max_outer_iters") {
    const long long v = ps.integer(e);
    ps.require(v >= 1, e, "must be >= 1");
    spec.algo.max_outer_iters = static_cast<int>(v);
  } else if (k == "max_feasibility_iters") {
    const long long v = ps.integer(e);
    ps.require(v >= 0, e, "must be >= 0");
    spec.algo.max_feasibility_iters = static_cast<int>(v);
  } else if (k == "ee_rel_tol") {
    spec.algo.ee_rel_tol = ps.number(e);
    ps.require(spec.algo.ee_rel_tol > 0.0, e, "must be positive");
  } else if (k == "unit_modulus_tol") {
    spec.algo.unit_modulus_tol = ps.number(e);
    ps.require(spec.algo.unit_modulus_tol > 0.0, e, "must be positive");
  } else if (k == "solver_tol") {
    spec.algo.solver.tol = ps.number(e);
    ps.require(spec.algo.solver.tol > 0.0, e, "must be positive");
  } else if (k == "solver_max_iters") {
    const long long v = ps.integer(e);
    ps.require(v >= 1, e, "must be >= 1");
    spec.algo.solver.max_iters = static_cast<int>(v);
  } else {
    ps.fail(e.line, "unknown key '" + k + "'");
  }
}

}  // namespace

const char* to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::Single: return "single";
    case Experiment::Convergence: return "convergence";
    case Experiment::EeVsPmax: return "ee_vs_pmax";
    case Experiment::EeVsBackhaul: return "ee_vs_backhaul";
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (Experiment e : {Experiment::Single, Experiment::Convergence, Experiment::EeVsPmax, Experiment::EeVsBackhaul})
    if (name == to_string(e)) return e;
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

ExperimentSpec default_spec() {
  ExperimentSpec spec;
  spec.params = default_params(Dims{4, 4, 8, 8, 8});
  return spec;
}

ExperimentSpec parse_config(std::istream& in, const std::string& source) {
  const Parser ps(source);
  std::vector<Entry> entries;
  std::map<std::string, int> seen;
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    if (trim(raw).empty()) continue;
    Entry e = ps.split(raw, line);
    const std::string id = e.key + (e.index ? "[" + std::to_string(*e.index) + "]" : "");
    if (auto it = seen.find(id); it != seen.end())
      ps.fail(line, "duplicate key '" + id + "' (first set on line " + std::to_string(it->second) + ")");
    seen[id] = line;
    entries.push_back(std::move(e));
  }

  ExperimentSpec spec = default_spec();
  Dims dims = spec.params.dims;
  const auto& pk = param_keys();
  for (const auto& e : entries) {
    const auto d = std::find(dim_keys().begin(), dim_keys().end(), e.key);
    if (d == dim_keys().end()) continue;
    ps.require(!e.index, e, "does not take an index");
    const long long v = ps.integer(e);
    ps.require(v >= 1, e, "must be >= 1");
    Index* slot[] = {&dims.M, &dims.N, &dims.L, &dims.K, &dims.R};
    *slot[d - dim_keys().begin()] = static_cast<Index>(v);
  }
  spec.params = default_params(dims);

  // Homogeneous values first, then per-index overrides, whatever the line order.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& e : entries) {
      if (std::find(dim_keys().begin(), dim_keys().end(), e.key) != dim_keys().end()) continue;
      const auto it = pk.find(e.key);
      if (it == pk.end()) {
        if (pass == 0) {
          ps.require(!e.index, e, "does not take an index");
          apply_other(ps, e, spec);
        }
        continue;
      }
      if (e.index.has_value() != (pass == 1)) continue;
      if (e.index && it->second == Scope::Scalar) ps.fail(e.line, "'" + e.key + "' does not take an index");
      apply_param(ps, e, spec.params);
    }
  }

  auto line_of = [&](const std::string& key) {
    auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  if (!(spec.fading.ref_dist_0 > 0.0 && spec.fading.ref_dist_0 < spec.fading.ref_dist_1))
    ps.fail(std::max(line_of("d0_m"), line_of("d1_m")), "reference distances must satisfy 0 < d0_m < d1_m");
  if (auto bad = check(spec.params); !bad.empty()) ps.fail(0, "invalid parameters: " + bad.front());
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  return parse_config(in, path);
}

}  // namespace riscf
