#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "qkdnet/config.hpp"
#include "qkdnet/errors.hpp"

using namespace qkdnet;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("empty text yields the defaults") {
  const ScenarioConfig cfg = parse_config("");
  CHECK(cfg.duration_s == 30.0);
  CHECK(cfg.path.n_users == 8);
  CHECK(cfg.path.transmittance == 0.19);
  CHECK(cfg.detector.efficiency == 0.6);
  CHECK(cfg.frames.bits_per_symbol == 4);
  CHECK(cfg.m_subnets == 16);
  CHECK(cfg.plan().combos.size() == 16);
}

TEST_CASE("values land in their blocks, comments and spacing are ignored") {
  const ScenarioConfig cfg = parse_config(
      "# leading comment\n"
      "[run]\n"
      "duration_s = 2.5   ; trailing comment\n"
      "\n"
      "[path]\n"
      "  n_users=4\n"
      "transmittance = 0.5\n"
      "[detector]\n"
      "dark_rate_hz = 0\n"
      "[topology]\n"
      "m_subnets = 3\n");
  CHECK(cfg.duration_s == 2.5);
  CHECK(cfg.path.n_users == 4);
  CHECK(cfg.path.transmittance == 0.5);
  CHECK(cfg.detector.dark_rate_hz == 0.0);
  CHECK(cfg.m_subnets == 3);
}

TEST_CASE("parse errors carry the offending line number") {
  CHECK(error_of("[nope]\n") == "line 1: unknown section [nope]");
  CHECK(error_of("[run]\nwat = 1\n") == "line 2: unknown key 'wat' in [run]");
  CHECK(error_of("x = 1\n") == "line 1: key before any [section]");
  CHECK(error_of("[run]\nduration_s\n") == "line 2: expected 'key = value'");
  CHECK(error_of("[run]\nduration_s =\n") == "line 2: empty value for 'duration_s'");
  CHECK(error_of("[run]\n= 3\n") == "line 2: empty key");
  CHECK(error_of("[run\n") == "line 1: unterminated section header");
  CHECK(error_of("[run]\n\nduration_s = abc\n") ==
        "line 3: not a number: 'abc'");
  CHECK(error_of("[path]\nn_users = 3.5\n") == "line 2: not an integer: '3.5'");
}

TEST_CASE("out-of-range values are rejected where they appear") {
  const std::string bad_eff = error_of("[detector]\nefficiency = 1.5\n");
  CHECK(bad_eff.find("line 2:") == 0);
  CHECK(bad_eff.find("efficiency") != std::string::npos);

  const std::string bad_dur = error_of("[run]\nduration_s = -2\n");
  CHECK(bad_dur.find("line 2:") == 0);

  const std::string bad_t = error_of("[path]\ntransmittance = 2\n");
  CHECK(bad_t.find("line 2:") == 0);
}

TEST_CASE("cross-field validation runs at the end") {
  // Both users parse fine on their own lines; the clash is global.
  const std::string same_pair = error_of("[run]\npair_user_a = 3\npair_user_b = 3\n");
  CHECK(same_pair == "pair users must differ");
  const std::string too_many = error_of("[topology]\nm_subnets = 17\n");
  CHECK(too_many == "m_subnets exceeds the channel plan's combo count");
  const std::string out_user = error_of("[run]\npair_user_b = 12\n");
  CHECK(out_user.find("outside") != std::string::npos);
}

TEST_CASE("canonical text round-trips") {
  ScenarioConfig cfg;
  cfg.duration_s = 12.25;
  cfg.path.transmittance = 0.31;
  cfg.detector.dark_rate_hz = 12345.0;
  cfg.frames.bits_per_symbol = 3;
  cfg.policy.eve_information_bits = 0.25;
  cfg.m_subnets = 5;
  const std::string text = to_config_text(cfg);
  const ScenarioConfig back = parse_config(text);
  CHECK(to_config_text(back) == text);
  CHECK(back.duration_s == cfg.duration_s);
  CHECK(back.path.transmittance == cfg.path.transmittance);
  CHECK(back.frames.bits_per_symbol == 3);
  CHECK(back.m_subnets == 5);
}

TEST_CASE("session window overrides only the match stage") {
  const ScenarioConfig cfg = parse_config("[session]\nmatch_window_bins = 7\n");
  const SessionConfig sc = cfg.session_config();
  CHECK(sc.match.window_bins == 7);
  CHECK(cfg.analysis.window_bins == 80);
  CHECK(sc.match.bin_ps == cfg.analysis.bin_ps);
}

TEST_CASE("scenario names") {
  CHECK(scenario_name_known("channels"));
  CHECK(scenario_name_known("subnet-coincidence"));
  CHECK(scenario_name_known("bases"));
  CHECK(scenario_name_known("keyrates"));
  CHECK(scenario_name_known("network"));
  CHECK(scenario_name_known("custom"));
  CHECK(!scenario_name_known("Channels"));
  CHECK(!scenario_name_known(""));
  CHECK(!scenario_name_known("everything"));
}

TEST_CASE("missing config file is a config error") {
  CHECK_THROWS_AS(load_config_file("/nonexistent/path/sim.cfg"), ConfigError);
}
