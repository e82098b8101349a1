#pragma once

#include <cstdint>
#include <vector>

#include "qkdnet/optical_path.hpp"

namespace qkdnet {

/// Timing-analysis knobs. The peak and accidental windows are expressed in
/// histogram bins relative to the located peak bin.
struct CoincidenceConfig {
  double bin_ps = 192.0;
  int window_bins = 80;             // search half-width, in bins
  int peak_halfwidth_bins = 2;      // peak window = peak_bin +/- this
  int accidental_offset_bins = 50;  // first accidental bin sits this far from the peak
  int accidental_width_bins = 20;   // total accidental bins, split across both sides

  /// Throws std::invalid_argument. Disjointness of the peak and accidental
  /// windows requires accidental_offset_bins > peak_halfwidth_bins.
  void validate() const;
};

/// One matched pair of clicks. delay_ps = t_b_ps - t_a_ps.
struct Coincidence {
  double t_a_ps = 0.0;
  double t_b_ps = 0.0;
  ArmKind arm_a = ArmKind::ND;
  ArmKind arm_b = ArmKind::ND;
  double delay_ps = 0.0;
};

/// Signed delay bin of a coincidence: floor(delay / bin_ps).
int delay_bin(double delay_ps, double bin_ps);

/// Counts of matched delays over the signed bin range
/// [-window_bins, +window_bins].
struct DelayHistogram {
  double bin_ps = 192.0;
  int window_bins = 0;
  std::vector<std::uint64_t> counts;  // counts[bin + window_bins]
  std::uint64_t total_pairs = 0;

  static DelayHistogram make(double bin_ps, int window_bins);

  int lo_bin() const { return -window_bins; }
  int hi_bin() const { return window_bins; }
  std::uint64_t at(int bin) const { return counts[static_cast<std::size_t>(bin + window_bins)]; }
  void add(int bin);
  double bin_center_ps(int bin) const { return (bin + 0.5) * bin_ps; }

  /// Bin index holding the maximum count (lowest index wins ties).
  /// Throws InsufficientDataError when the histogram is empty.
  int peak_bin() const;
};

struct MatchResult {
  std::vector<Coincidence> coincidences;
  DelayHistogram histogram;
};

/// Greedy nearest-neighbor matching between two time-sorted click streams.
/// A-events are scanned in time order; each is paired with the closest
/// unconsumed B-event within +/- window_bins*bin_ps (ties: earlier B).
/// Every event is used at most once. Throws ContractViolation on unsorted
/// input.
MatchResult find_coincidences(const std::vector<DetectionEvent>& stream_a,
                              const std::vector<DetectionEvent>& stream_b,
                              const CoincidenceConfig& cfg);

/// Coincidence-to-accidental ratio: (peak-window count) divided by
/// (mean accidental count per bin * number of peak-window bins). Returns
/// +infinity when the accidental windows are empty of counts. Throws
/// InsufficientDataError on an empty histogram or when no accidental bin
/// falls inside the histogram range.
double car(const DelayHistogram& hist, const CoincidenceConfig& cfg);

/// Unbiased sample variance of delays. Throws InsufficientDataError for
/// fewer than two samples.
double delay_variance(const std::vector<double>& delays_ps);

/// Delays of the coincidences whose bin lies in the peak window of `hist`.
std::vector<double> peak_window_delays(const std::vector<Coincidence>& coincidences,
                                       const DelayHistogram& hist,
                                       const CoincidenceConfig& cfg);

/// Peak-window delays with the half-width grown to fit the peak itself:
/// starting from min_halfwidth_bins, the window is widened until it spans
/// n_sigma times the sample std of the delays it contains. Keeps a narrow
/// peak clean of flat background while not truncating a broad one. Throws
/// InsufficientDataError when fewer than two delays fall in the window.
std::vector<double> adaptive_peak_delays(const std::vector<Coincidence>& coincidences,
                                         const DelayHistogram& hist, double bin_ps,
                                         int min_halfwidth_bins = 2,
                                         double n_sigma = 4.0);

}  // namespace qkdnet
