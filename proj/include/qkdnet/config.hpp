#pragma once

#include <cstdint>
#include <string>

#include "qkdnet/doqkd_protocol.hpp"
#include "qkdnet/optical_path.hpp"
#include "qkdnet/source_model.hpp"

namespace qkdnet {

/// Everything a scenario run needs. File-settable parameters live in the
/// named sections below; scenario, seed, output directory, worker count
/// and blind mode come from the command line.
///
/// Sections/keys:
///   [run]         duration_s, pair_user_a, pair_user_b
///   [plan]        pump_channel, signal_lo, signal_hi
///   [source]      pair_rate_hz, detuning_sigma_ghz, correlation_sigma_ps
///   [path]        n_users, dispersion_ps_per_ghz, transmittance,
///                 signal_noise_ps
///   [detector]    efficiency, jitter_sigma_ps, dark_rate_hz, dead_time_ps
///   [coincidence] bin_ps, window_bins, peak_halfwidth_bins,
///                 accidental_offset_bins, accidental_width_bins
///   [session]     match_window_bins
///   [frame]       bin_ps, bits_per_symbol
///   [security]    variance_threshold_ps2, eve_information_bits,
///                 ec_efficiency
///   [topology]    m_subnets, relay_key_bits
///
/// Users per subnet equals path.n_users; the subnet splitter defines it.
struct ScenarioConfig {
  // command-line side
  std::string scenario = "keyrates";
  std::uint64_t seed = 1;
  std::string out_dir;
  int workers = 1;
  bool blind = false;

  // [run]
  double duration_s = 30.0;
  int pair_user_a = 0;
  int pair_user_b = 1;

  // [plan]
  int pump_channel = 40;
  int signal_lo = 44;
  int signal_hi = 59;

  SourceParams source;
  PathParams path;
  DetectorParams detector;

  // [coincidence]: analysis/histogram settings (wide search window)
  CoincidenceConfig analysis;

  // [session]: the narrower matching window used inside key sessions
  int session_match_window_bins = 10;

  FrameConfig frames;
  SecurityPolicy policy;

  // [topology]
  int m_subnets = 16;
  int relay_key_bits = 256;

  ChannelPlan plan() const;
  /// Session matcher settings: analysis windows with the session search
  /// half-width.
  SessionConfig session_config() const;
  /// Cross-field invariants. Throws ConfigError (no line info).
  void validate() const;
};

/// Strict parse: unknown sections or keys, malformed numbers and
/// out-of-range values are ConfigErrors carrying the 1-based line number.
/// Empty text gives the defaults.
ScenarioConfig parse_config(const std::string& text);

/// Reads and parses a config file. Missing file -> ConfigError.
ScenarioConfig load_config_file(const std::string& file_path);

/// Canonical text form listing every file-settable parameter;
/// parse_config(to_config_text(c)) reproduces c exactly.
std::string to_config_text(const ScenarioConfig& cfg);

bool scenario_name_known(const std::string& name);

}  // namespace qkdnet
