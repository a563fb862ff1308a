#include <doctest.h>

#include <cmath>
#include <sstream>

#include "riscf/config.hpp"

using namespace riscf;

namespace {

ExperimentSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "t.cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("empty config gives the reference configuration") {
  const ExperimentSpec s = parse("# nothing\n\n");
  const ExperimentSpec d = default_spec();
  CHECK(s.params.dims.M == 4);
  CHECK(s.params.dims.L == 8);
  CHECK(s.params.dims.R == 8);
  CHECK(s.params.pmax_w.isApprox(d.params.pmax_w));
  CHECK(s.params.noise_power_w == doctest::Approx(d.params.noise_power_w));
  CHECK(s.trials == d.trials);
  CHECK(s.schemes.size() == 4);
}

TEST_CASE("units are converted") {
  const ExperimentSpec s = parse("pmax_dbm = 20\nrmin_bps_hz = 1\nbandwidth_mhz = 10\n");
  CHECK(s.params.pmax_w[0] == doctest::Approx(0.1));
  CHECK(s.params.rmin_nats[3] == doctest::Approx(std::log(2.0)));
  CHECK(s.params.bandwidth_hz == doctest::Approx(1e7));
}

TEST_CASE("dims resize per-AP vectors before values are applied") {
  const ExperimentSpec s = parse("pmax_dbm = 30\nM = 2\nL = 3\npmax_dbm[1] = 20\n");
  REQUIRE(s.params.pmax_w.size() == 2);
  CHECK(s.params.pmax_w[0] == doctest::Approx(1.0));
  CHECK(s.params.pmax_w[1] == doctest::Approx(0.1));
  CHECK(s.params.rmin_nats.size() == 3);
}

TEST_CASE("experiment keys") {
  const ExperimentSpec s =
      parse("experiment = ee_vs_backhaul\nschemes = ris_cf, cf_no_ris\ntrials = 3\nseed = 7\n"
            "cmax_list_bps_hz = 1, 2\nk_list = 2\n");
  CHECK(s.experiment == Experiment::EeVsBackhaul);
  CHECK(s.schemes == std::vector<Scheme>{Scheme::RisCf, Scheme::CfNoRis});
  CHECK(s.trials == 3);
  CHECK(s.seed == 7);
  CHECK(s.cmax_list_bps_hz == std::vector<double>{1.0, 2.0});
  CHECK(s.k_list == std::vector<Index>{2});
}

TEST_CASE("errors carry the source line") {
  CHECK(error_of("M = 2\nxi = 0.5\n").rfind("t.cfg:2:", 0) == 0);
  CHECK(error_of("foo = 1\n").find("unknown key") != std::string::npos);
  CHECK(error_of("pmax_dbm = abc\n").find("expects a number") != std::string::npos);
  CHECK(error_of("M = 2\npmax_dbm[2] = 1\n").find("out of range") != std::string::npos);
  CHECK(error_of("trials = 1\ntrials = 2\n").find("duplicate key") != std::string::npos);
  CHECK(error_of("penalty[0] = 2\n").find("does not take an index") != std::string::npos);
  CHECK(error_of("just words\n").find("expected 'key = value'") != std::string::npos);
  CHECK(error_of("d0_m = 60\n") != "");
  CHECK(error_of("experiment = sweep\n") != "");
  CHECK(error_of("schemes = ris_cf, dense\n") != "");
}

TEST_CASE("shipped configs parse") {
  const ExperimentSpec t = load_config(RISCF_SOURCE_DIR "/configs/reference.cfg");
  CHECK(t.params.dims.K == 8);
  CHECK(t.experiment == Experiment::EeVsPmax);
  const ExperimentSpec d = load_config(RISCF_SOURCE_DIR "/configs/desk.cfg");
  CHECK(d.params.dims.M == 2);
  CHECK_THROWS_AS(load_config(RISCF_SOURCE_DIR "/configs/missing.cfg"), std::exception);
}
