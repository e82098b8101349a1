#include "qkdnet/scenario.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "qkdnet/coincidence.hpp"
#include "qkdnet/errors.hpp"
#include "qkdnet/format.hpp"
#include "qkdnet/network_relay.hpp"

namespace qkdnet {

namespace fs = std::filesystem;
using nlohmann::json;

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t use =
      std::min(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (use <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto drain = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(use);
  for (std::size_t w = 0; w < use; ++w) pool.emplace_back(drain);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

SubnetStreams simulate_subnet(const ScenarioConfig& cfg, int combo_id) {
  const int n = cfg.path.n_users;
  const auto combo = static_cast<std::uint64_t>(combo_id);
  std::vector<std::array<std::vector<RoutedPhoton>, 2>> arrivals(
      static_cast<std::size_t>(n));

  Rng transport_rng = substream(cfg.seed, Stream::Transport, combo);
  EmissionGenerator gen(cfg.source, combo_id, cfg.duration_s,
                        substream(cfg.seed, Stream::Emission, combo));
  while (auto e = gen.next()) {
    const TransportedPair tp = transport_pair(*e, cfg.path, transport_rng);
    for (int i = 0; i < tp.count; ++i) {
      const RoutedPhoton& p = tp.photons[i];
      arrivals[static_cast<std::size_t>(p.user)][static_cast<int>(p.arm)].push_back(p);
    }
  }

  SubnetStreams out;
  out.grid.n_users = n;
  out.grid.streams.resize(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    for (ArmKind arm : {ArmKind::ND, ArmKind::AD}) {
      Rng det_rng = substream(cfg.seed, Stream::Detector, combo,
                              static_cast<std::uint64_t>(u),
                              static_cast<std::uint64_t>(arm));
      out.grid.streams[static_cast<std::size_t>(u)][static_cast<int>(arm)] =
          detect(std::move(arrivals[static_cast<std::size_t>(u)][static_cast<int>(arm)]),
                 cfg.detector, cfg.duration_s, u, arm, det_rng);
    }
  }
  out.per_user.resize(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) out.per_user[static_cast<std::size_t>(u)] = out.grid.merged_user(u);
  return out;
}

namespace {

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string histogram_csv(const DelayHistogram& h) {
  std::ostringstream out;
  out << "bin_index,delay_ps_center,counts\n";
  for (int b = h.lo_bin(); b <= h.hi_bin(); ++b) {
    out << b << ',' << fmt_double(h.bin_center_ps(b)) << ',' << h.at(b) << '\n';
  }
  return out.str();
}

DelayHistogram histogram_of(const std::vector<Coincidence>& coincidences,
                            const CoincidenceConfig& cfg) {
  DelayHistogram h = DelayHistogram::make(cfg.bin_ps, cfg.window_bins);
  for (const Coincidence& c : coincidences) {
    int bin = delay_bin(c.delay_ps, cfg.bin_ps);
    bin = std::clamp(bin, h.lo_bin(), h.hi_bin());
    h.add(bin);
  }
  return h;
}

std::string car_field(const DelayHistogram& hist, const CoincidenceConfig& cfg) {
  try {
    return fmt_double(car(hist, cfg));
  } catch (const InsufficientDataError&) {
    return "nan";
  }
}

json report_to_json(const SessionReport& r) {
  json j;
  j["user_a"] = r.user_a;
  j["user_b"] = r.user_b;
  j["total_coincidences"] = r.total_coincidences;
  j["kk_count"] = r.kk_count;
  j["ss_count"] = r.ss_count;
  j["discarded_count"] = r.discarded_count;
  j["kk_kept"] = r.kk_kept;
  j["qber"] = r.qber;
  j["ss_variance_ps2"] = r.ss_variance_ps2;
  j["security_pass"] = r.security_pass;
  j["raw_bits"] = r.raw_bits;
  j["secure_bits"] = r.secure_bits;
  j["duration_s"] = r.duration_s;
  j["raw_rate_bps"] = r.raw_rate_bps;
  j["secure_rate_bps"] = r.secure_rate_bps;
  j["bits_per_symbol"] = r.bits_per_symbol;
  j["encoding_bin_ps"] = r.encoding_bin_ps;
  j["variance_threshold_ps2"] = r.variance_threshold_ps2;
  j["eve_information_bits"] = r.eve_information_bits;
  j["ec_efficiency"] = r.ec_efficiency;
  return j;
}

std::vector<std::pair<int, int>> user_pairs(int n_users) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n_users) * (n_users - 1) / 2);
  for (int i = 0; i < n_users; ++i) {
    for (int j = i + 1; j < n_users; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

std::string key_file_name(int user_a, int user_b, const char* kind) {
  return "keys/u" + std::to_string(user_a) + "-u" + std::to_string(user_b) + "." +
         kind + ".hex";
}

void write_session_keys(const fs::path& out_dir, const SessionResult& s,
                        std::vector<std::string>& files) {
  const int a = s.report.user_a;
  const int b = s.report.user_b;
  const std::array<std::pair<const char*, const KeyBits*>, 3> parts = {
      {{"raw_a", &s.raw_a}, {"raw_b", &s.raw_b}, {"secure", &s.secure_key}}};
  for (const auto& [kind, bits] : parts) {
    const std::string name = key_file_name(a, b, kind);
    write_text_file(out_dir / name, bits->hex() + "\n");
    files.push_back(name);
  }
}

// ---- channels ----------------------------------------------------------

struct ComboOutcome {
  std::uint64_t singles_signal = 0;
  std::uint64_t singles_idler = 0;
  std::uint64_t dark_signal = 0;
  std::uint64_t dark_idler = 0;
  std::uint64_t both_detected = 0;
  MatchResult match;
};

ComboOutcome run_combo(const ScenarioConfig& cfg, int combo_id) {
  const auto combo = static_cast<std::uint64_t>(combo_id);
  std::vector<RoutedPhoton> signal_arrivals;
  std::vector<RoutedPhoton> idler_arrivals;

  Rng transport_rng = substream(cfg.seed, Stream::Transport, combo);
  EmissionGenerator gen(cfg.source, combo_id, cfg.duration_s,
                        substream(cfg.seed, Stream::Emission, combo));
  // Channel characterization taps the demultiplexer outputs straight into
  // two detectors; no splitter or dispersion arm is in this path.
  while (auto e = gen.next()) {
    const bool signal_alive = transport_rng.uniform01() < cfg.path.transmittance;
    const bool idler_alive = transport_rng.uniform01() < cfg.path.transmittance;
    if (signal_alive) {
      RoutedPhoton p;
      p.t_ps = e->t_ps + e->skew_ps;
      p.user = 0;
      p.arm = ArmKind::ND;
      p.role = PhotonRole::Signal;
      p.detuning_ghz = e->detuning_ghz;
      p.combo_id = combo_id;
      p.emission_id = e->emission_id;
      signal_arrivals.push_back(p);
    }
    if (idler_alive) {
      RoutedPhoton p;
      p.t_ps = e->t_ps;
      p.user = 1;
      p.arm = ArmKind::AD;
      p.role = PhotonRole::Idler;
      p.detuning_ghz = -e->detuning_ghz;
      p.combo_id = combo_id;
      p.emission_id = e->emission_id;
      idler_arrivals.push_back(p);
    }
  }

  const std::vector<DetectionEvent> clicks_signal =
      [&] {
        Rng r = substream(cfg.seed, Stream::Detector, combo, 0, 0);
        return detect(std::move(signal_arrivals), cfg.detector, cfg.duration_s, 0,
                      ArmKind::ND, r);
      }();
  const std::vector<DetectionEvent> clicks_idler =
      [&] {
        Rng r = substream(cfg.seed, Stream::Detector, combo, 1, 1);
        return detect(std::move(idler_arrivals), cfg.detector, cfg.duration_s, 1,
                      ArmKind::AD, r);
      }();

  ComboOutcome out;
  out.singles_signal = clicks_signal.size();
  out.singles_idler = clicks_idler.size();
  std::unordered_set<std::int64_t> signal_emissions;
  for (const DetectionEvent& ev : clicks_signal) {
    if (ev.origin.kind == Origin::Kind::Dark) {
      ++out.dark_signal;
    } else {
      signal_emissions.insert(ev.origin.emission_id);
    }
  }
  for (const DetectionEvent& ev : clicks_idler) {
    if (ev.origin.kind == Origin::Kind::Dark) {
      ++out.dark_idler;
    } else if (signal_emissions.count(ev.origin.emission_id) != 0) {
      ++out.both_detected;
    }
  }
  out.match = find_coincidences(clicks_signal, clicks_idler, cfg.analysis);
  return out;
}

std::vector<std::string> run_channels(const ScenarioConfig& cfg, const fs::path& out_dir) {
  const ChannelPlan plan = cfg.plan();
  const std::size_t n = plan.combos.size();
  std::vector<ComboOutcome> outcomes(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    outcomes[i] = run_combo(cfg, static_cast<int>(i));
  });

  std::vector<std::string> files;
  std::ostringstream csv;
  csv << "combo_id,signal_channel,idler_channel,signal_freq_thz,idler_freq_thz,"
         "signal_wavelength_nm,idler_wavelength_nm,singles_signal,singles_idler,"
         "coincidences,car";
  if (!cfg.blind) csv << ",dark_signal,dark_idler,both_detected_true_pairs";
  csv << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [signal, idler] = plan.combos[i];
    const ComboOutcome& oc = outcomes[i];
    csv << i << ",C" << signal.index << ",C" << idler.index << ','
        << fmt_double(channel_frequency_thz(signal, plan)) << ','
        << fmt_double(channel_frequency_thz(idler, plan)) << ','
        << fmt_double(channel_wavelength_nm(signal, plan)) << ','
        << fmt_double(channel_wavelength_nm(idler, plan)) << ','
        << oc.singles_signal << ',' << oc.singles_idler << ','
        << oc.match.histogram.total_pairs << ','
        << car_field(oc.match.histogram, cfg.analysis);
    if (!cfg.blind) {
      csv << ',' << oc.dark_signal << ',' << oc.dark_idler << ',' << oc.both_detected;
    }
    csv << '\n';

    std::string tag = std::to_string(i);
    if (tag.size() < 2) tag.insert(0, "0");
    const std::string hist_name = "channels_hist_" + tag + ".csv";
    write_text_file(out_dir / hist_name, histogram_csv(oc.match.histogram));
    files.push_back(hist_name);
  }
  write_text_file(out_dir / "channels_summary.csv", csv.str());
  files.push_back("channels_summary.csv");
  return files;
}

// ---- subnet-coincidence -------------------------------------------------

std::vector<std::string> run_subnet_coincidence(const ScenarioConfig& cfg,
                                                const fs::path& out_dir) {
  const SubnetStreams streams = simulate_subnet(cfg, 0);
  const auto pairs = user_pairs(cfg.path.n_users);

  struct PairOutcome {
    std::uint64_t coincidences = 0;
    std::string car;
  };
  std::vector<PairOutcome> outcomes(pairs.size());
  parallel_for(pairs.size(), cfg.workers, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const MatchResult m =
        find_coincidences(streams.per_user[static_cast<std::size_t>(i)],
                          streams.per_user[static_cast<std::size_t>(j)], cfg.analysis);
    outcomes[k].coincidences = m.histogram.total_pairs;
    outcomes[k].car = car_field(m.histogram, cfg.analysis);
  });

  // Ground truth: emissions whose two photons were detected at two users.
  std::map<std::pair<int, int>, std::uint64_t> true_pairs;
  if (!cfg.blind) {
    std::unordered_map<std::int64_t, std::array<int, 2>> landed;
    for (int u = 0; u < cfg.path.n_users; ++u) {
      for (const DetectionEvent& ev : streams.per_user[static_cast<std::size_t>(u)]) {
        if (ev.origin.kind != Origin::Kind::Photon) continue;
        auto [it, inserted] =
            landed.try_emplace(ev.origin.emission_id, std::array<int, 2>{-1, -1});
        it->second[static_cast<int>(ev.origin.role)] = u;
      }
    }
    for (const auto& [emission, users] : landed) {
      const int us = users[0];
      const int ui = users[1];
      if (us < 0 || ui < 0 || us == ui) continue;
      true_pairs[{std::min(us, ui), std::max(us, ui)}] += 1;
    }
  }

  std::ostringstream csv;
  csv << "user_a,user_b,coincidences,car";
  if (!cfg.blind) csv << ",true_pairs";
  csv << '\n';
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    csv << i << ',' << j << ',' << outcomes[k].coincidences << ',' << outcomes[k].car;
    if (!cfg.blind) {
      const auto it = true_pairs.find({i, j});
      csv << ',' << (it == true_pairs.end() ? 0 : it->second);
    }
    csv << '\n';
  }
  write_text_file(out_dir / "subnet_pairs.csv", csv.str());
  return {"subnet_pairs.csv"};
}

// ---- bases --------------------------------------------------------------

constexpr std::array<const char*, 4> kBaseLabels = {"K1K2", "K1S2", "S1K2", "S1S2"};

std::vector<std::string> run_bases(const ScenarioConfig& cfg, const fs::path& out_dir) {
  const SubnetStreams streams = simulate_subnet(cfg, 0);
  const int a = std::min(cfg.pair_user_a, cfg.pair_user_b);
  const int b = std::max(cfg.pair_user_a, cfg.pair_user_b);
  const MatchResult m =
      find_coincidences(streams.per_user[static_cast<std::size_t>(a)],
                        streams.per_user[static_cast<std::size_t>(b)], cfg.analysis);
  const BasisAssignment assignment = assign_bases(a, b);

  std::array<std::vector<Coincidence>, 4> classes;
  for (const Coincidence& c : m.coincidences) {
    const bool a_key = c.arm_a == assignment.k_arm_a();
    const bool b_key = c.arm_b == assignment.k_arm_b();
    const int idx = a_key ? (b_key ? 0 : 1) : (b_key ? 2 : 3);
    classes[static_cast<std::size_t>(idx)].push_back(c);
  }

  std::vector<std::string> files;
  json summary;
  summary["pair"] = {{"user_a", a}, {"user_b", b}};
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const DelayHistogram hist = histogram_of(classes[i], cfg.analysis);
    const std::string name = std::string("bases_") + kBaseLabels[i] + ".csv";
    write_text_file(out_dir / name, histogram_csv(hist));
    files.push_back(name);

    json cls;
    cls["count"] = classes[i].size();
    try {
      const double var = delay_variance(
          adaptive_peak_delays(classes[i], hist, cfg.analysis.bin_ps,
                               cfg.analysis.peak_halfwidth_bins));
      cls["variance_ps2"] = var;
      cls["std_ps"] = std::sqrt(var);
    } catch (const InsufficientDataError&) {
      cls["variance_ps2"] = nullptr;
      cls["std_ps"] = nullptr;
    }
    summary["classes"][kBaseLabels[i]] = cls;
  }
  write_text_file(out_dir / "bases_summary.json", summary.dump(2) + "\n");
  files.push_back("bases_summary.json");
  return files;
}

// ---- keyrates -----------------------------------------------------------

std::vector<std::string> run_keyrates(const ScenarioConfig& cfg, const fs::path& out_dir) {
  const SubnetStreams streams = simulate_subnet(cfg, 0);
  const auto pairs = user_pairs(cfg.path.n_users);
  std::vector<SessionResult> sessions(pairs.size());
  const SessionConfig session_cfg = cfg.session_config();
  parallel_for(pairs.size(), cfg.workers, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    sessions[k] = run_pair_session(i, j, streams.per_user[static_cast<std::size_t>(i)],
                                   streams.per_user[static_cast<std::size_t>(j)],
                                   session_cfg, cfg.duration_s);
  });

  std::vector<std::string> files;
  fs::create_directories(out_dir / "keys");

  json reports = json::array();
  std::ostringstream csv;
  csv << "user_a,user_b,total_coincidences,kk_kept,qber,ss_variance_ps2,"
         "security_pass,raw_bits,secure_bits,raw_rate_bps,secure_rate_bps\n";
  for (const SessionResult& s : sessions) {
    reports.push_back(report_to_json(s.report));
    const SessionReport& r = s.report;
    csv << r.user_a << ',' << r.user_b << ',' << r.total_coincidences << ','
        << r.kk_kept << ',' << fmt_double(r.qber) << ','
        << fmt_double(r.ss_variance_ps2) << ',' << (r.security_pass ? 1 : 0) << ','
        << r.raw_bits << ',' << r.secure_bits << ',' << fmt_double(r.raw_rate_bps)
        << ',' << fmt_double(r.secure_rate_bps) << '\n';
    write_session_keys(out_dir, s, files);
  }
  write_text_file(out_dir / "session_reports.json", reports.dump(2) + "\n");
  files.push_back("session_reports.json");
  write_text_file(out_dir / "keyrates.csv", csv.str());
  files.push_back("keyrates.csv");
  return files;
}

// ---- custom -------------------------------------------------------------

std::vector<std::string> run_custom(const ScenarioConfig& cfg, const fs::path& out_dir) {
  const SubnetStreams streams = simulate_subnet(cfg, 0);
  const int a = cfg.pair_user_a;
  const int b = cfg.pair_user_b;
  const SessionResult session =
      run_pair_session(a, b, streams.per_user[static_cast<std::size_t>(a)],
                       streams.per_user[static_cast<std::size_t>(b)],
                       cfg.session_config(), cfg.duration_s);

  std::vector<std::string> files;
  fs::create_directories(out_dir / "keys");
  write_text_file(out_dir / "session_report.json",
                  report_to_json(session.report).dump(2) + "\n");
  files.push_back("session_report.json");
  write_session_keys(out_dir, session, files);
  return files;
}

// ---- network ------------------------------------------------------------

std::vector<std::string> run_network(const ScenarioConfig& cfg, const fs::path& out_dir) {
  const Topology topo = build_topology(cfg.m_subnets, cfg.path.n_users);
  const auto pairs = user_pairs(cfg.path.n_users);
  std::vector<std::vector<SessionResult>> subnet_sessions(
      static_cast<std::size_t>(topo.m_subnets));
  const SessionConfig session_cfg = cfg.session_config();

  parallel_for(static_cast<std::size_t>(topo.m_subnets), cfg.workers,
               [&](std::size_t s) {
                 const SubnetStreams streams =
                     simulate_subnet(cfg, static_cast<int>(s));
                 auto& sessions = subnet_sessions[s];
                 sessions.resize(pairs.size());
                 for (std::size_t k = 0; k < pairs.size(); ++k) {
                   const auto [i, j] = pairs[k];
                   sessions[k] = run_pair_session(
                       i, j, streams.per_user[static_cast<std::size_t>(i)],
                       streams.per_user[static_cast<std::size_t>(j)], session_cfg,
                       cfg.duration_s);
                 }
               });

  KeyStore store;
  std::ostringstream sessions_csv;
  sessions_csv << "subnet,user_a,user_b,total_coincidences,kk_kept,qber,"
                  "security_pass,secure_bits,raw_rate_bps,secure_rate_bps\n";
  for (int s = 0; s < topo.m_subnets; ++s) {
    for (const SessionResult& r : subnet_sessions[static_cast<std::size_t>(s)]) {
      const SessionReport& rep = r.report;
      sessions_csv << s << ',' << rep.user_a << ',' << rep.user_b << ','
                   << rep.total_coincidences << ',' << rep.kk_kept << ','
                   << fmt_double(rep.qber) << ',' << (rep.security_pass ? 1 : 0) << ','
                   << rep.secure_bits << ',' << fmt_double(rep.raw_rate_bps) << ','
                   << fmt_double(rep.secure_rate_bps) << '\n';
      store.put(UserId{s, rep.user_a}, UserId{s, rep.user_b}, r.secure_key,
                Provenance::Direct);
    }
  }

  std::ostringstream report_csv;
  report_csv << "u_subnet,u_index,v_subnet,v_index,provenance,key_bits,"
                "relay_message_bits,keys_agree\n";
  std::uint64_t established = 0;
  for (int su = 0; su < topo.m_subnets; ++su) {
    for (int iu = 0; iu < topo.n_users_per_subnet; ++iu) {
      for (int sv = su; sv < topo.m_subnets; ++sv) {
        for (int iv = (sv == su ? iu + 1 : 0); iv < topo.n_users_per_subnet; ++iv) {
          const UserId u{su, iu};
          const UserId v{sv, iv};
          const EndToEndKey k = establish_end_to_end(u, v, topo, store, cfg.seed,
                                                     static_cast<std::size_t>(
                                                         cfg.relay_key_bits));
          ++established;
          report_csv << su << ',' << iu << ',' << sv << ',' << iv << ','
                     << to_string(k.route.provenance) << ',' << k.route.key_bits << ','
                     << k.route.relay_message.size() << ','
                     << (k.key_u == k.key_v ? 1 : 0) << '\n';
        }
      }
    }
  }

  json topo_json;
  topo_json["m_subnets"] = topo.m_subnets;
  topo_json["n_users_per_subnet"] = topo.n_users_per_subnet;
  topo_json["end_users"] = topo.end_users();
  topo_json["central_members"] = topo.central_members();
  topo_json["total_users"] = topo.total_users();
  topo_json["established_pairs"] = established;

  std::vector<std::string> files;
  write_text_file(out_dir / "network_topology.json", topo_json.dump(2) + "\n");
  files.push_back("network_topology.json");
  write_text_file(out_dir / "network_sessions.csv", sessions_csv.str());
  files.push_back("network_sessions.csv");
  write_text_file(out_dir / "network_report.csv", report_csv.str());
  files.push_back("network_report.csv");
  return files;
}

}  // namespace

std::vector<std::string> run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  if (!scenario_name_known(cfg.scenario))
    throw ConfigError("unknown scenario: " + cfg.scenario);
  if (cfg.out_dir.empty()) throw ConfigError("output directory not set");
  const fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir);

  std::vector<std::string> files;
  if (cfg.scenario == "channels") {
    files = run_channels(cfg, out_dir);
  } else if (cfg.scenario == "subnet-coincidence") {
    files = run_subnet_coincidence(cfg, out_dir);
  } else if (cfg.scenario == "bases") {
    files = run_bases(cfg, out_dir);
  } else if (cfg.scenario == "keyrates") {
    files = run_keyrates(cfg, out_dir);
  } else if (cfg.scenario == "custom") {
    files = run_custom(cfg, out_dir);
  } else {
    files = run_network(cfg, out_dir);
  }

  json manifest;
  manifest["scenario"] = cfg.scenario;
  manifest["seed"] = cfg.seed;
  manifest["blind"] = cfg.blind;
  manifest["config_text"] = to_config_text(cfg);
  std::vector<std::string> sorted_files = files;
  std::sort(sorted_files.begin(), sorted_files.end());
  manifest["files"] = sorted_files;
  write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  files.push_back("manifest.json");
  return files;
}

}  // namespace qkdnet
