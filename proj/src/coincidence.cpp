#include "qkdnet/coincidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qkdnet/errors.hpp"

namespace qkdnet {

void CoincidenceConfig::validate() const {
  if (bin_ps <= 0.0) throw std::invalid_argument("bin_ps must be > 0");
  if (window_bins < 1) throw std::invalid_argument("window_bins must be >= 1");
  if (peak_halfwidth_bins < 0)
    throw std::invalid_argument("peak_halfwidth_bins must be >= 0");
  if (accidental_width_bins < 1)
    throw std::invalid_argument("accidental_width_bins must be >= 1");
  if (accidental_offset_bins <= peak_halfwidth_bins)
    throw std::invalid_argument(
        "accidental window must be disjoint from the peak window "
        "(accidental_offset_bins > peak_halfwidth_bins)");
}

int delay_bin(double delay_ps, double bin_ps) {
  return static_cast<int>(std::floor(delay_ps / bin_ps));
}

DelayHistogram DelayHistogram::make(double bin_ps, int window_bins) {
  DelayHistogram h;
  h.bin_ps = bin_ps;
  h.window_bins = window_bins;
  h.counts.assign(static_cast<std::size_t>(2 * window_bins + 1), 0);
  return h;
}

void DelayHistogram::add(int bin) {
  counts[static_cast<std::size_t>(bin + window_bins)] += 1;
  total_pairs += 1;
}

int DelayHistogram::peak_bin() const {
  if (total_pairs == 0) throw InsufficientDataError("peak of an empty histogram");
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return static_cast<int>(best) - window_bins;
}

namespace {

void require_sorted(const std::vector<DetectionEvent>& stream, const char* which) {
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (stream[i].t_ps < stream[i - 1].t_ps) {
      throw ContractViolation(std::string("detection stream ") + which +
                              " is not sorted by time");
    }
  }
}

}  // namespace

MatchResult find_coincidences(const std::vector<DetectionEvent>& stream_a,
                              const std::vector<DetectionEvent>& stream_b,
                              const CoincidenceConfig& cfg) {
  cfg.validate();
  require_sorted(stream_a, "A");
  require_sorted(stream_b, "B");

  const double window_ps = cfg.window_bins * cfg.bin_ps;
  MatchResult out;
  out.histogram = DelayHistogram::make(cfg.bin_ps, cfg.window_bins);

  std::vector<char> consumed(stream_b.size(), 0);
  std::size_t first_alive = 0;  // lowest index that may still be unconsumed

  for (const DetectionEvent& a : stream_a) {
    const double lo = a.t_ps - window_ps;
    const double hi = a.t_ps + window_ps;
    // A times are nondecreasing, so B-events already consumed or below the
    // current window can never match a later A-event either.
    while (first_alive < stream_b.size() &&
           (consumed[first_alive] || stream_b[first_alive].t_ps < lo)) {
      ++first_alive;
    }
    std::size_t best = stream_b.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = first_alive; j < stream_b.size(); ++j) {
      if (stream_b[j].t_ps > hi) break;
      if (consumed[j]) continue;
      const double dist = std::abs(stream_b[j].t_ps - a.t_ps);
      if (dist < best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    if (best == stream_b.size()) continue;

    consumed[best] = 1;
    const DetectionEvent& b = stream_b[best];
    Coincidence c;
    c.t_a_ps = a.t_ps;
    c.t_b_ps = b.t_ps;
    c.arm_a = a.arm;
    c.arm_b = b.arm;
    c.delay_ps = b.t_ps - a.t_ps;
    int bin = delay_bin(c.delay_ps, cfg.bin_ps);
    // Rounding at delay == +-window_ps can land one bin past either edge;
    // fold those back in.
    if (bin > cfg.window_bins) bin = cfg.window_bins;
    if (bin < -cfg.window_bins) bin = -cfg.window_bins;
    out.histogram.add(bin);
    out.coincidences.push_back(c);
  }
  return out;
}

double car(const DelayHistogram& hist, const CoincidenceConfig& cfg) {
  cfg.validate();
  if (hist.total_pairs == 0) throw InsufficientDataError("CAR of an empty histogram");

  const int peak = hist.peak_bin();
  const int plo = std::max(hist.lo_bin(), peak - cfg.peak_halfwidth_bins);
  const int phi = std::min(hist.hi_bin(), peak + cfg.peak_halfwidth_bins);
  double peak_sum = 0.0;
  const int n_peak_bins = phi - plo + 1;
  for (int b = plo; b <= phi; ++b) peak_sum += static_cast<double>(hist.at(b));

  const int per_side = cfg.accidental_width_bins - cfg.accidental_width_bins / 2;
  double acc_sum = 0.0;
  int n_acc_bins = 0;
  for (int j = 0; j < per_side; ++j) {
    for (int b : {peak - cfg.accidental_offset_bins - j,
                  peak + cfg.accidental_offset_bins + j}) {
      if (b < hist.lo_bin() || b > hist.hi_bin()) continue;
      acc_sum += static_cast<double>(hist.at(b));
      ++n_acc_bins;
    }
  }
  if (n_acc_bins == 0) {
    throw InsufficientDataError("accidental window lies outside the histogram range");
  }
  const double acc_mean = acc_sum / n_acc_bins;
  if (acc_mean == 0.0) return std::numeric_limits<double>::infinity();
  return peak_sum / (acc_mean * n_peak_bins);
}

double delay_variance(const std::vector<double>& delays_ps) {
  const std::size_t n = delays_ps.size();
  if (n < 2) throw InsufficientDataError("delay variance needs at least two samples");
  double mean = 0.0;
  for (double d : delays_ps) mean += d;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double d : delays_ps) {
    const double r = d - mean;
    ss += r * r;
  }
  return ss / static_cast<double>(n - 1);
}

namespace {

std::vector<double> delays_near_peak(const std::vector<Coincidence>& coincidences,
                                     const DelayHistogram& hist, int halfwidth_bins) {
  const int peak = hist.peak_bin();
  std::vector<double> out;
  out.reserve(coincidences.size());
  for (const Coincidence& c : coincidences) {
    int bin = delay_bin(c.delay_ps, hist.bin_ps);
    if (bin > hist.hi_bin()) bin = hist.hi_bin();
    if (std::abs(bin - peak) <= halfwidth_bins) out.push_back(c.delay_ps);
  }
  return out;
}

}  // namespace

std::vector<double> peak_window_delays(const std::vector<Coincidence>& coincidences,
                                       const DelayHistogram& hist,
                                       const CoincidenceConfig& cfg) {
  return delays_near_peak(coincidences, hist, cfg.peak_halfwidth_bins);
}

std::vector<double> adaptive_peak_delays(const std::vector<Coincidence>& coincidences,
                                         const DelayHistogram& hist, double bin_ps,
                                         int min_halfwidth_bins, double n_sigma) {
  int halfwidth = min_halfwidth_bins;
  std::vector<double> picked;
  for (int iter = 0; iter < 16; ++iter) {
    picked = delays_near_peak(coincidences, hist, halfwidth);
    if (picked.size() < 2) throw InsufficientDataError("too few delays near the peak");
    const double sd = std::sqrt(delay_variance(picked));
    const int wanted = std::max(
        min_halfwidth_bins, static_cast<int>(std::ceil(n_sigma * sd / bin_ps)));
    if (wanted <= halfwidth || halfwidth >= hist.window_bins) break;
    halfwidth = std::min(wanted, hist.window_bins);
  }
  return picked;
}

}  // namespace qkdnet
