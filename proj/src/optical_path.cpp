#include "qkdnet/optical_path.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace qkdnet {

void PathParams::validate() const {
  if (n_users < 1) throw std::invalid_argument("n_users must be >= 1");
  if (dispersion_ps_per_ghz < 0.0)
    throw std::invalid_argument("dispersion_ps_per_ghz must be >= 0");
  if (transmittance < 0.0 || transmittance > 1.0)
    throw std::invalid_argument("transmittance must lie in [0, 1]");
  if (signal_noise_ps < 0.0) throw std::invalid_argument("signal_noise_ps must be >= 0");
}

void DetectorParams::validate() const {
  if (efficiency < 0.0 || efficiency > 1.0)
    throw std::invalid_argument("efficiency must lie in [0, 1]");
  if (jitter_sigma_ps < 0.0) throw std::invalid_argument("jitter_sigma_ps must be >= 0");
  if (dark_rate_hz < 0.0) throw std::invalid_argument("dark_rate_hz must be >= 0");
  if (dead_time_ps < 0.0) throw std::invalid_argument("dead_time_ps must be >= 0");
}

int route_to_user(int n_users, Rng& rng) {
  if (n_users < 1) throw std::invalid_argument("n_users must be >= 1");
  if (n_users == 1) return 0;
  return static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(n_users)));
}

double apply_dispersion(double t_ps, double detuning_ghz, ArmKind arm,
                        double dispersion_ps_per_ghz) {
  const double shift = dispersion_ps_per_ghz * detuning_ghz;
  return arm == ArmKind::ND ? t_ps + shift : t_ps - shift;
}

TransportedPair transport_pair(const PairEmission& emission, const PathParams& path,
                               Rng& rng) {
  TransportedPair out;
  // Fixed draw order per photon keeps the stream aligned regardless of
  // survival outcomes: survive, user, arm, for signal then idler.
  for (PhotonRole role : {PhotonRole::Signal, PhotonRole::Idler}) {
    const bool survives = rng.uniform01() < path.transmittance;
    const int user = route_to_user(path.n_users, rng);
    const ArmKind arm = rng.bernoulli(0.5) ? ArmKind::AD : ArmKind::ND;
    double noise = 0.0;
    if (role == PhotonRole::Signal && path.signal_noise_ps > 0.0) {
      noise = rng.gaussian(path.signal_noise_ps);
    }
    if (!survives) continue;

    RoutedPhoton p;
    p.role = role;
    p.user = user;
    p.arm = arm;
    p.combo_id = emission.combo_id;
    p.emission_id = emission.emission_id;
    const double detuning =
        role == PhotonRole::Signal ? emission.detuning_ghz : -emission.detuning_ghz;
    p.detuning_ghz = detuning;
    double t = emission.t_ps;
    if (role == PhotonRole::Signal) t += emission.skew_ps + noise;
    t += path.delay_for_user(user);
    p.t_ps = apply_dispersion(t, detuning, arm, path.dispersion_ps_per_ghz);
    out.photons[out.count++] = p;
  }
  return out;
}

std::vector<DetectionEvent> detect(std::vector<RoutedPhoton> arrivals,
                                   const DetectorParams& det, double duration_s,
                                   int user, ArmKind arm, Rng& rng) {
  if (duration_s <= 0.0) throw std::invalid_argument("duration_s must be > 0");
  det.validate();

  // Deterministic processing order independent of upstream pipeline order.
  std::sort(arrivals.begin(), arrivals.end(), [](const RoutedPhoton& a, const RoutedPhoton& b) {
    if (a.t_ps != b.t_ps) return a.t_ps < b.t_ps;
    return a.emission_id < b.emission_id;
  });

  std::vector<DetectionEvent> clicks;
  clicks.reserve(arrivals.size());
  for (const RoutedPhoton& p : arrivals) {
    if (!(rng.uniform01() < det.efficiency)) continue;
    DetectionEvent ev;
    ev.t_ps = p.t_ps + rng.gaussian(det.jitter_sigma_ps);
    ev.user = user;
    ev.arm = arm;
    ev.origin = Origin{Origin::Kind::Photon, p.combo_id, p.emission_id, p.role};
    clicks.push_back(ev);
  }

  if (det.dark_rate_hz > 0.0) {
    const double horizon_ps = duration_s * 1e12;
    const double mean_gap_ps = 1e12 / det.dark_rate_hz;
    for (double t = rng.exponential(mean_gap_ps); t < horizon_ps;
         t += rng.exponential(mean_gap_ps)) {
      DetectionEvent ev;
      ev.t_ps = t;
      ev.user = user;
      ev.arm = arm;
      ev.origin = Origin{Origin::Kind::Dark, -1, -1, PhotonRole::Signal};
      clicks.push_back(ev);
    }
  }

  std::sort(clicks.begin(), clicks.end(), [](const DetectionEvent& a, const DetectionEvent& b) {
    if (a.t_ps != b.t_ps) return a.t_ps < b.t_ps;
    return a.origin.emission_id < b.origin.emission_id;
  });

  // Non-paralyzable dead time: each accepted click opens a blackout;
  // dropped clicks do not extend it.
  if (det.dead_time_ps > 0.0 && !clicks.empty()) {
    std::vector<DetectionEvent> kept;
    kept.reserve(clicks.size());
    double last_accepted = -std::numeric_limits<double>::infinity();
    for (const DetectionEvent& ev : clicks) {
      if (ev.t_ps - last_accepted < det.dead_time_ps) continue;
      kept.push_back(ev);
      last_accepted = ev.t_ps;
    }
    clicks = std::move(kept);
  }
  return clicks;
}

std::vector<DetectionEvent> DetectorGrid::merged_user(int user) const {
  const auto& nd = streams[user][0];
  const auto& ad = streams[user][1];
  std::vector<DetectionEvent> merged;
  merged.resize(nd.size() + ad.size());
  std::merge(nd.begin(), nd.end(), ad.begin(), ad.end(), merged.begin(),
             [](const DetectionEvent& a, const DetectionEvent& b) { return a.t_ps < b.t_ps; });
  return merged;
}

DetectorGrid detect_all(const std::vector<RoutedPhoton>& routed,
                        const DetectorParams& det, double duration_s, int n_users,
                        const std::function<Rng(int, ArmKind)>& rng_for) {
  DetectorGrid grid;
  grid.n_users = n_users;
  grid.streams.resize(static_cast<std::size_t>(n_users));

  std::vector<std::array<std::vector<RoutedPhoton>, 2>> arrivals(
      static_cast<std::size_t>(n_users));
  for (const RoutedPhoton& p : routed) {
    arrivals[static_cast<std::size_t>(p.user)][static_cast<int>(p.arm)].push_back(p);
  }
  for (int u = 0; u < n_users; ++u) {
    for (ArmKind arm : {ArmKind::ND, ArmKind::AD}) {
      Rng rng = rng_for(u, arm);
      grid.streams[static_cast<std::size_t>(u)][static_cast<int>(arm)] =
          detect(std::move(arrivals[static_cast<std::size_t>(u)][static_cast<int>(arm)]),
                 det, duration_s, u, arm, rng);
    }
  }
  return grid;
}

}  // namespace qkdnet
