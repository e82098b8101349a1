#include "qkdnet/config.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qkdnet/errors.hpp"
#include "qkdnet/format.hpp"

namespace qkdnet {

ChannelPlan ScenarioConfig::plan() const {
  return build_plan(pump_channel, signal_lo, signal_hi);
}

SessionConfig ScenarioConfig::session_config() const {
  SessionConfig sc;
  sc.match = analysis;
  sc.match.window_bins = session_match_window_bins;
  sc.frames = frames;
  sc.policy = policy;
  return sc;
}

void ScenarioConfig::validate() const {
  try {
    const ChannelPlan p = plan();
    source.validate(p.grid_spacing_thz * 1000.0);
    path.validate();
    detector.validate();
    analysis.validate();
    frames.validate();
    policy.validate(frames.bits_per_symbol);
    session_config().match.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (duration_s <= 0.0) throw ConfigError("duration_s must be > 0");
  if (session_match_window_bins < 1)
    throw ConfigError("session match_window_bins must be >= 1");
  if (pair_user_a == pair_user_b) throw ConfigError("pair users must differ");
  for (int u : {pair_user_a, pair_user_b}) {
    if (u < 0 || u >= path.n_users)
      throw ConfigError("pair user " + std::to_string(u) + " outside [0, n_users)");
  }
  if (m_subnets < 1) throw ConfigError("m_subnets must be >= 1");
  if (m_subnets > static_cast<int>(plan().combos.size()))
    throw ConfigError("m_subnets exceeds the channel plan's combo count");
  if (relay_key_bits < 1) throw ConfigError("relay_key_bits must be >= 1");
  if (path.n_users < 2)
    throw ConfigError("n_users must be >= 2 (central member plus an end user)");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + v + "'", line);
  }
}

int parse_int(const std::string& v, int line) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("not an integer: '" + v + "'", line);
  return out;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, int)>;

// Each setter re-validates the owning parameter block so a bad value is
// reported on the line that introduced it.
const std::map<std::string, Setter>& setter_table() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto guarded = [](auto assign) {
      return [assign](ScenarioConfig& c, const std::string& v, int line) {
        try {
          assign(c, v, line);
        } catch (const ConfigError&) {
          throw;
        } catch (const std::exception& e) {
          throw ConfigError(e.what(), line);
        }
      };
    };

    t["run.duration_s"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.duration_s = parse_double(v, l);
      if (c.duration_s <= 0.0) throw std::invalid_argument("duration_s must be > 0");
    });
    t["run.pair_user_a"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.pair_user_a = parse_int(v, l);
    });
    t["run.pair_user_b"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.pair_user_b = parse_int(v, l);
    });

    t["plan.pump_channel"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.pump_channel = parse_int(v, l);
    });
    t["plan.signal_lo"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.signal_lo = parse_int(v, l);
    });
    t["plan.signal_hi"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.signal_hi = parse_int(v, l);
    });

    t["source.pair_rate_hz"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.source.pair_rate_hz = parse_double(v, l);
      c.source.validate();
    });
    t["source.detuning_sigma_ghz"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.source.detuning_sigma_ghz = parse_double(v, l);
          c.source.validate();
        });
    t["source.correlation_sigma_ps"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.source.correlation_sigma_ps = parse_double(v, l);
          c.source.validate();
        });

    t["path.n_users"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.path.n_users = parse_int(v, l);
      c.path.validate();
    });
    t["path.dispersion_ps_per_ghz"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.path.dispersion_ps_per_ghz = parse_double(v, l);
          c.path.validate();
        });
    t["path.transmittance"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.path.transmittance = parse_double(v, l);
      c.path.validate();
    });
    t["path.signal_noise_ps"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.path.signal_noise_ps = parse_double(v, l);
      c.path.validate();
    });

    t["detector.efficiency"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.detector.efficiency = parse_double(v, l);
      c.detector.validate();
    });
    t["detector.jitter_sigma_ps"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.detector.jitter_sigma_ps = parse_double(v, l);
          c.detector.validate();
        });
    t["detector.dark_rate_hz"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.detector.dark_rate_hz = parse_double(v, l);
      c.detector.validate();
    });
    t["detector.dead_time_ps"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.detector.dead_time_ps = parse_double(v, l);
      c.detector.validate();
    });

    t["coincidence.bin_ps"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.analysis.bin_ps = parse_double(v, l);
      c.analysis.validate();
    });
    t["coincidence.window_bins"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.analysis.window_bins = parse_int(v, l);
          c.analysis.validate();
        });
    t["coincidence.peak_halfwidth_bins"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.analysis.peak_halfwidth_bins = parse_int(v, l);
          c.analysis.validate();
        });
    t["coincidence.accidental_offset_bins"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.analysis.accidental_offset_bins = parse_int(v, l);
          c.analysis.validate();
        });
    t["coincidence.accidental_width_bins"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.analysis.accidental_width_bins = parse_int(v, l);
          c.analysis.validate();
        });

    t["session.match_window_bins"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.session_match_window_bins = parse_int(v, l);
          if (c.session_match_window_bins < 1)
            throw std::invalid_argument("match_window_bins must be >= 1");
        });

    t["frame.bin_ps"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.frames.bin_ps = parse_double(v, l);
      c.frames.validate();
    });
    t["frame.bits_per_symbol"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.frames.bits_per_symbol = parse_int(v, l);
      c.frames.validate();
    });

    t["security.variance_threshold_ps2"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.policy.variance_threshold_ps2 = parse_double(v, l);
          c.policy.validate(c.frames.bits_per_symbol);
        });
    t["security.eve_information_bits"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.policy.eve_information_bits = parse_double(v, l);
          c.policy.validate(c.frames.bits_per_symbol);
        });
    t["security.ec_efficiency"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.policy.ec_efficiency = parse_double(v, l);
          c.policy.validate(c.frames.bits_per_symbol);
        });

    t["topology.m_subnets"] = guarded([](ScenarioConfig& c, const std::string& v, int l) {
      c.m_subnets = parse_int(v, l);
      if (c.m_subnets < 1) throw std::invalid_argument("m_subnets must be >= 1");
    });
    t["topology.relay_key_bits"] =
        guarded([](ScenarioConfig& c, const std::string& v, int l) {
          c.relay_key_bits = parse_int(v, l);
          if (c.relay_key_bits < 1)
            throw std::invalid_argument("relay_key_bits must be >= 1");
        });
    return t;
  }();
  return table;
}

constexpr std::array<const char*, 10> kSections = {
    "run",     "plan",    "source",   "path",     "detector",
    "coincidence", "session", "frame", "security", "topology"};

bool known_section(const std::string& s) {
  for (const char* k : kSections) {
    if (s == k) return true;
  }
  return false;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t comment = raw.find_first_of("#;");
    if (comment != std::string::npos) raw.erase(comment);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section))
        throw ConfigError("unknown section [" + section + "]", line_no);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError("key before any [section]", line_no);
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
    const auto it = setter_table().find(section + "." + key);
    if (it == setter_table().end())
      throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
    it->second(cfg, value, line_no);
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config_file(const std::string& file_path) {
  std::ifstream in(file_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + file_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_config_text(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "[run]\n";
  out << "duration_s = " << fmt_double(c.duration_s) << "\n";
  out << "pair_user_a = " << c.pair_user_a << "\n";
  out << "pair_user_b = " << c.pair_user_b << "\n";
  out << "\n[plan]\n";
  out << "pump_channel = " << c.pump_channel << "\n";
  out << "signal_lo = " << c.signal_lo << "\n";
  out << "signal_hi = " << c.signal_hi << "\n";
  out << "\n[source]\n";
  out << "pair_rate_hz = " << fmt_double(c.source.pair_rate_hz) << "\n";
  out << "detuning_sigma_ghz = " << fmt_double(c.source.detuning_sigma_ghz) << "\n";
  out << "correlation_sigma_ps = " << fmt_double(c.source.correlation_sigma_ps) << "\n";
  out << "\n[path]\n";
  out << "n_users = " << c.path.n_users << "\n";
  out << "dispersion_ps_per_ghz = " << fmt_double(c.path.dispersion_ps_per_ghz) << "\n";
  out << "transmittance = " << fmt_double(c.path.transmittance) << "\n";
  out << "signal_noise_ps = " << fmt_double(c.path.signal_noise_ps) << "\n";
  out << "\n[detector]\n";
  out << "efficiency = " << fmt_double(c.detector.efficiency) << "\n";
  out << "jitter_sigma_ps = " << fmt_double(c.detector.jitter_sigma_ps) << "\n";
  out << "dark_rate_hz = " << fmt_double(c.detector.dark_rate_hz) << "\n";
  out << "dead_time_ps = " << fmt_double(c.detector.dead_time_ps) << "\n";
  out << "\n[coincidence]\n";
  out << "bin_ps = " << fmt_double(c.analysis.bin_ps) << "\n";
  out << "window_bins = " << c.analysis.window_bins << "\n";
  out << "peak_halfwidth_bins = " << c.analysis.peak_halfwidth_bins << "\n";
  out << "accidental_offset_bins = " << c.analysis.accidental_offset_bins << "\n";
  out << "accidental_width_bins = " << c.analysis.accidental_width_bins << "\n";
  out << "\n[session]\n";
  out << "match_window_bins = " << c.session_match_window_bins << "\n";
  out << "\n[frame]\n";
  out << "bin_ps = " << fmt_double(c.frames.bin_ps) << "\n";
  out << "bits_per_symbol = " << c.frames.bits_per_symbol << "\n";
  out << "\n[security]\n";
  out << "variance_threshold_ps2 = " << fmt_double(c.policy.variance_threshold_ps2) << "\n";
  out << "eve_information_bits = " << fmt_double(c.policy.eve_information_bits) << "\n";
  out << "ec_efficiency = " << fmt_double(c.policy.ec_efficiency) << "\n";
  out << "\n[topology]\n";
  out << "m_subnets = " << c.m_subnets << "\n";
  out << "relay_key_bits = " << c.relay_key_bits << "\n";
  return out.str();
}

bool scenario_name_known(const std::string& name) {
  return name == "channels" || name == "subnet-coincidence" || name == "bases" ||
         name == "keyrates" || name == "network" || name == "custom";
}

}  // namespace qkdnet
