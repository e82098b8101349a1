#include "qkdnet/source_model.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace qkdnet {

namespace {
constexpr double kSpeedOfLightNmThz = 299792.458;  // c in nm * THz

void require_in_grid(ItuChannel ch, int lo, int hi, const char* what) {
  if (ch.index < lo || ch.index > hi) {
    throw std::out_of_range(std::string(what) + " C" + std::to_string(ch.index) +
                            " outside grid C" + std::to_string(lo) + "-C" +
                            std::to_string(hi));
  }
}
}  // namespace

void ChannelPlan::validate() const {
  if (grid_spacing_thz <= 0.0) throw std::invalid_argument("grid_spacing_thz must be > 0");
  if (grid_lo > grid_hi) throw std::invalid_argument("empty grid range");
  require_in_grid(pump, grid_lo, grid_hi, "pump channel");
  std::set<int> seen;
  for (const auto& [signal, idler] : combos) {
    require_in_grid(signal, grid_lo, grid_hi, "signal channel");
    require_in_grid(idler, grid_lo, grid_hi, "idler channel");
    if (signal.index + idler.index != 2 * pump.index) {
      throw std::invalid_argument("combo (C" + std::to_string(signal.index) + ", C" +
                                  std::to_string(idler.index) +
                                  ") is not frequency-conjugate about the pump");
    }
    for (int idx : {signal.index, idler.index}) {
      if (idx == pump.index) throw std::invalid_argument("pump channel used in a combo");
      if (!seen.insert(idx).second) {
        throw std::invalid_argument("channel C" + std::to_string(idx) +
                                    " appears in more than one combo");
      }
    }
  }
}

void SourceParams::validate(double grid_spacing_ghz) const {
  if (pair_rate_hz < 0.0) throw std::invalid_argument("pair_rate_hz must be >= 0");
  if (detuning_sigma_ghz < 0.0) throw std::invalid_argument("detuning_sigma_ghz must be >= 0");
  if (correlation_sigma_ps < 0.0) throw std::invalid_argument("correlation_sigma_ps must be >= 0");
  if (detuning_sigma_ghz >= 0.5 * grid_spacing_ghz) {
    throw std::invalid_argument("detuning_sigma_ghz must stay below half the channel spacing");
  }
}

ItuChannel conjugate_channel(ItuChannel ch, ItuChannel pump, int grid_lo, int grid_hi) {
  require_in_grid(ch, grid_lo, grid_hi, "channel");
  require_in_grid(pump, grid_lo, grid_hi, "pump channel");
  ItuChannel conj{2 * pump.index - ch.index};
  require_in_grid(conj, grid_lo, grid_hi, "conjugate channel");
  return conj;
}

double channel_frequency_thz(ItuChannel ch, const ChannelPlan& plan) {
  require_in_grid(ch, plan.grid_lo, plan.grid_hi, "channel");
  return plan.grid_anchor_thz + plan.grid_spacing_thz * ch.index;
}

double channel_wavelength_nm(ItuChannel ch, const ChannelPlan& plan) {
  return kSpeedOfLightNmThz / channel_frequency_thz(ch, plan);
}

ChannelPlan build_default_plan() { return build_plan(40, 44, 59); }

ChannelPlan build_plan(int pump, int signal_lo, int signal_hi, double grid_anchor_thz,
                       double grid_spacing_thz, int grid_lo, int grid_hi) {
  ChannelPlan plan;
  plan.pump = ItuChannel{pump};
  plan.grid_anchor_thz = grid_anchor_thz;
  plan.grid_spacing_thz = grid_spacing_thz;
  plan.grid_lo = grid_lo;
  plan.grid_hi = grid_hi;
  if (signal_lo > signal_hi) throw std::invalid_argument("empty signal channel range");
  for (int s = signal_lo; s <= signal_hi; ++s) {
    ItuChannel signal{s};
    ItuChannel idler = conjugate_channel(signal, plan.pump, grid_lo, grid_hi);
    plan.combos.emplace_back(signal, idler);
  }
  plan.validate();
  return plan;
}

EmissionGenerator::EmissionGenerator(const SourceParams& params, int combo_id,
                                     double duration_s, Rng rng)
    : params_(params),
      combo_id_(combo_id),
      horizon_ps_(duration_s * 1e12),
      mean_gap_ps_(params.pair_rate_hz > 0.0 ? 1e12 / params.pair_rate_hz : 0.0),
      rng_(rng) {
  if (duration_s <= 0.0) throw std::invalid_argument("duration_s must be > 0");
  params_.validate();
  if (params_.pair_rate_hz == 0.0) done_ = true;
}

std::optional<PairEmission> EmissionGenerator::next() {
  if (done_) return std::nullopt;
  t_ps_ += rng_.exponential(mean_gap_ps_);
  if (t_ps_ >= horizon_ps_) {
    done_ = true;
    return std::nullopt;
  }
  PairEmission e;
  e.t_ps = t_ps_;
  e.combo_id = combo_id_;
  e.emission_id = next_id_++;
  e.detuning_ghz = rng_.gaussian(params_.detuning_sigma_ghz);
  e.skew_ps = rng_.gaussian(params_.correlation_sigma_ps);
  return e;
}

std::vector<PairEmission> generate_pair_emissions(const SourceParams& params,
                                                  int combo_id, double duration_s,
                                                  Rng rng) {
  EmissionGenerator gen(params, combo_id, duration_s, rng);
  std::vector<PairEmission> out;
  if (params.pair_rate_hz > 0.0) {
    out.reserve(static_cast<std::size_t>(params.pair_rate_hz * duration_s * 1.05) + 16);
  }
  while (auto e = gen.next()) out.push_back(*e);
  return out;
}

}  // namespace qkdnet
