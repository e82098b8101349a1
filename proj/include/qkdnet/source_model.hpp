#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qkdnet/rng.hpp"

namespace qkdnet {

/// One ITU C-band DWDM grid slot, addressed by its channel number.
struct ItuChannel {
  int index = 0;
  friend bool operator==(const ItuChannel&, const ItuChannel&) = default;
};

/// Pump channel plus the ordered list of frequency-conjugate
/// (signal, idler) channel combinations it feeds.
///
/// Invariants (checked by validate()):
///  - every channel lies inside [grid_lo, grid_hi]
///  - signal.index + idler.index == 2 * pump.index for every combo
///  - no channel appears twice, and the pump appears in no combo
struct ChannelPlan {
  ItuChannel pump{40};
  std::vector<std::pair<ItuChannel, ItuChannel>> combos;  // (signal, idler)
  double grid_anchor_thz = 190.0;  // frequency of channel 0
  double grid_spacing_thz = 0.1;
  int grid_lo = 21;
  int grid_hi = 60;

  void validate() const;  // throws std::invalid_argument
};

/// Pair-source statistics for one channel combination.
struct SourceParams {
  double pair_rate_hz = 2.0e5;        // mean pair emissions per second per combo
  double detuning_sigma_ghz = 15.0;   // within-channel spectral detuning spread
  double correlation_sigma_ps = 2.0;  // intrinsic signal-idler emission-time width

  /// Throws std::invalid_argument. The detuning spread must stay inside
  /// half the DWDM passband so photons remain in their channel.
  void validate(double grid_spacing_ghz = 100.0) const;
};

/// One entangled-pair emission. The signal photon carries detuning
/// +detuning_ghz from its channel center, the idler carries the negative
/// (energy conservation), which is what makes opposite-sign dispersion
/// cancel nonlocally downstream.
struct PairEmission {
  double t_ps = 0.0;
  int combo_id = 0;
  std::int64_t emission_id = -1;  // sequence number within the combo's stream
  double detuning_ghz = 0.0;
  double skew_ps = 0.0;  // signal-minus-idler emission-time offset
};

/// Mirror channel of `ch` about `pump` on the ITU grid
/// (index = 2*pump - ch). Throws std::out_of_range if an input or the
/// result leaves [grid_lo, grid_hi].
ItuChannel conjugate_channel(ItuChannel ch, ItuChannel pump, int grid_lo = 21,
                             int grid_hi = 60);

/// Center frequency of a channel on the plan's grid, in THz.
double channel_frequency_thz(ItuChannel ch, const ChannelPlan& plan);

/// Vacuum wavelength of the channel center, in nm.
double channel_wavelength_nm(ItuChannel ch, const ChannelPlan& plan);

/// Pump C40; signals C44..C59 paired with idlers C36..C21; 16 combos.
ChannelPlan build_default_plan();

/// General constructor: pairs [signal_lo, signal_hi] with their conjugates.
ChannelPlan build_plan(int pump, int signal_lo, int signal_hi,
                       double grid_anchor_thz = 190.0, double grid_spacing_thz = 0.1,
                       int grid_lo = 21, int grid_hi = 60);

/// Sequential homogeneous-Poisson emission stream over [0, duration).
/// Emission times are strictly increasing; the stream is exhausted once
/// next() returns nullopt. Identical (params, seed) give identical streams.
class EmissionGenerator {
public:
  EmissionGenerator(const SourceParams& params, int combo_id, double duration_s,
                    Rng rng);

  std::optional<PairEmission> next();

private:
  SourceParams params_;
  int combo_id_;
  double horizon_ps_;
  double mean_gap_ps_;
  double t_ps_ = 0.0;
  std::int64_t next_id_ = 0;
  bool done_ = false;
  Rng rng_;
};

/// Drains an EmissionGenerator into a vector. duration_s must be > 0.
std::vector<PairEmission> generate_pair_emissions(const SourceParams& params,
                                                  int combo_id, double duration_s,
                                                  Rng rng);

}  // namespace qkdnet
