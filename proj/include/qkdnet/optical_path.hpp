#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "qkdnet/rng.hpp"
#include "qkdnet/source_model.hpp"

namespace qkdnet {

/// The two dispersion arms inside every user. ND adds +D*dv group delay
/// per unit detuning, AD adds -D*dv.
enum class ArmKind : std::uint8_t { ND = 0, AD = 1 };

enum class PhotonRole : std::uint8_t { Signal = 0, Idler = 1 };

inline const char* to_string(ArmKind arm) { return arm == ArmKind::ND ? "ND" : "AD"; }
inline ArmKind other_arm(ArmKind arm) { return arm == ArmKind::ND ? ArmKind::AD : ArmKind::ND; }

/// Everything between the source and the detectors: splitter fan-out,
/// dispersion strength, and lumped insertion loss. The intrinsic 1/N of
/// the splitter is NOT part of transmittance; routing accounts for it.
struct PathParams {
  int n_users = 8;
  double dispersion_ps_per_ghz = 40.0;
  double transmittance = 0.19;
  /// Extra Gaussian delay noise applied to the signal channel only
  /// (disturbance/adversary injection). 0 disables it.
  double signal_noise_ps = 0.0;
  /// Optional constant fiber delay per user; missing entries mean 0.
  std::vector<double> user_delay_ps;

  void validate() const;
  double delay_for_user(int user) const {
    return user < static_cast<int>(user_delay_ps.size()) ? user_delay_ps[user] : 0.0;
  }
};

struct DetectorParams {
  double efficiency = 0.6;
  double jitter_sigma_ps = 40.0;
  double dark_rate_hz = 150.0;
  double dead_time_ps = 50000.0;

  void validate() const;
};

/// Ground-truth provenance of a click. Never exported to the protocol
/// layer; sessions see only (t, user, arm).
struct Origin {
  enum class Kind : std::uint8_t { Photon, Dark };
  Kind kind = Kind::Dark;
  int combo_id = -1;
  std::int64_t emission_id = -1;
  PhotonRole role = PhotonRole::Signal;
};

struct DetectionEvent {
  double t_ps = 0.0;
  int user = 0;
  ArmKind arm = ArmKind::ND;
  Origin origin;
};

/// A photon after the splitter and arm coupler, before its detector.
struct RoutedPhoton {
  double t_ps = 0.0;
  int user = 0;
  ArmKind arm = ArmKind::ND;
  PhotonRole role = PhotonRole::Signal;
  double detuning_ghz = 0.0;  // signed: +detuning for signal, -detuning for idler
  int combo_id = -1;
  std::int64_t emission_id = -1;
};

/// Uniform splitter output in [0, n_users).
int route_to_user(int n_users, Rng& rng);

/// Group-delay shift of one photon: ND gives t + D*dv, AD gives t - D*dv,
/// where dv is the photon's own signed detuning.
double apply_dispersion(double t_ps, double detuning_ghz, ArmKind arm,
                        double dispersion_ps_per_ghz);

/// Routes the two photons of one emission independently: survival with
/// probability `transmittance`, uniform user, fair 50/50 arm, then the
/// dispersion shift of the chosen arm. Returns the survivors (0..2).
/// Always consumes the same amount of randomness per emission.
struct TransportedPair {
  std::array<RoutedPhoton, 2> photons;
  int count = 0;
};
TransportedPair transport_pair(const PairEmission& emission, const PathParams& path,
                               Rng& rng);

/// Detector response for ONE detector: Bernoulli(efficiency) per arrival,
/// Gaussian timing jitter, a dark-count Poisson process over [0, duration),
/// then non-paralyzable dead-time filtering of the merged click stream.
/// Output is sorted by time. `arrivals` need not be sorted.
std::vector<DetectionEvent> detect(std::vector<RoutedPhoton> arrivals,
                                   const DetectorParams& det, double duration_s,
                                   int user, ArmKind arm, Rng& rng);

/// Per-(user, arm) detection record of a whole subnet.
struct DetectorGrid {
  int n_users = 0;
  /// streams[user][arm] sorted by time.
  std::vector<std::array<std::vector<DetectionEvent>, 2>> streams;

  const std::vector<DetectionEvent>& stream(int user, ArmKind arm) const {
    return streams[user][static_cast<int>(arm)];
  }
  /// Both arms of one user merged into a single time-sorted stream.
  std::vector<DetectionEvent> merged_user(int user) const;
};

/// Runs detect() for every (user, arm), with an independent random
/// substream per detector supplied by `rng_for`.
DetectorGrid detect_all(const std::vector<RoutedPhoton>& routed,
                        const DetectorParams& det, double duration_s, int n_users,
                        const std::function<Rng(int, ArmKind)>& rng_for);

}  // namespace qkdnet
