#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <stdexcept>

#include "qkdnet/source_model.hpp"

using namespace qkdnet;

TEST_CASE("default plan pairs C44..C59 with C36..C21 around pump C40") {
  const ChannelPlan plan = build_default_plan();
  CHECK(plan.pump.index == 40);
  REQUIRE(plan.combos.size() == 16);
  for (std::size_t i = 0; i < plan.combos.size(); ++i) {
    const auto& [signal, idler] = plan.combos[i];
    CHECK(signal.index == 44 + static_cast<int>(i));
    CHECK(idler.index == 36 - static_cast<int>(i));
    CHECK(signal.index + idler.index == 2 * plan.pump.index);
  }
  CHECK_NOTHROW(plan.validate());
}

TEST_CASE("plan channels are unique and exclude the pump") {
  const ChannelPlan plan = build_default_plan();
  std::set<int> seen;
  for (const auto& [signal, idler] : plan.combos) {
    CHECK(seen.insert(signal.index).second);
    CHECK(seen.insert(idler.index).second);
    CHECK(signal.index != plan.pump.index);
    CHECK(idler.index != plan.pump.index);
  }
}

TEST_CASE("grid frequencies are 190 + 0.1 * index THz") {
  const ChannelPlan plan = build_default_plan();
  CHECK(channel_frequency_thz(plan.pump, plan) == doctest::Approx(194.0).epsilon(1e-12));
  CHECK(channel_frequency_thz(ItuChannel{44}, plan) == doctest::Approx(194.4).epsilon(1e-12));
  CHECK(channel_frequency_thz(ItuChannel{21}, plan) == doctest::Approx(192.1).epsilon(1e-12));
  CHECK(channel_frequency_thz(ItuChannel{60}, plan) == doctest::Approx(196.0).epsilon(1e-12));
}

TEST_CASE("wavelengths follow lambda = c / f") {
  const ChannelPlan plan = build_default_plan();
  CHECK(channel_wavelength_nm(plan.pump, plan) ==
        doctest::Approx(299792.458 / 194.0).epsilon(1e-12));
  // Signal and idler of one combo straddle the pump wavelength.
  const auto& [signal, idler] = plan.combos.front();
  CHECK(channel_wavelength_nm(signal, plan) < channel_wavelength_nm(plan.pump, plan));
  CHECK(channel_wavelength_nm(idler, plan) > channel_wavelength_nm(plan.pump, plan));
}

TEST_CASE("conjugate_channel mirrors about the pump") {
  CHECK(conjugate_channel(ItuChannel{44}, ItuChannel{40}).index == 36);
  CHECK(conjugate_channel(ItuChannel{59}, ItuChannel{40}).index == 21);
  CHECK(conjugate_channel(ItuChannel{40}, ItuChannel{40}).index == 40);
  CHECK_THROWS_AS(conjugate_channel(ItuChannel{60}, ItuChannel{40}),
                  std::out_of_range);  // 2*40-60 = 20 < grid_lo
  CHECK_THROWS_AS(conjugate_channel(ItuChannel{61}, ItuChannel{40}), std::out_of_range);
}

TEST_CASE("build_plan rejects a pump inside the signal band") {
  CHECK_THROWS_AS(build_plan(50, 44, 59), std::invalid_argument);
}

TEST_CASE("build_plan rejects signals whose conjugate leaves the grid") {
  CHECK_THROWS_AS(build_plan(40, 44, 60), std::out_of_range);  // C60 -> C20
}

TEST_CASE("source parameter validation") {
  SourceParams p;
  CHECK_NOTHROW(p.validate());
  p.pair_rate_hz = -1.0;  // zero is legal: a dark-count-only run
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SourceParams{};
  p.detuning_sigma_ghz = 60.0;  // would leak past the 100 GHz passband half-width
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SourceParams{};
  p.correlation_sigma_ps = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("emission stream is strictly increasing, bounded, sequentially numbered") {
  SourceParams p;
  p.pair_rate_hz = 5.0e4;
  const double duration_s = 0.02;
  EmissionGenerator gen(p, 7, duration_s, substream(123, Stream::Test, 1));
  double last_t = -1.0;
  std::int64_t expected_id = 0;
  std::size_t n = 0;
  while (auto e = gen.next()) {
    CHECK(e->t_ps > last_t);
    CHECK(e->t_ps < duration_s * 1e12);
    CHECK(e->combo_id == 7);
    CHECK(e->emission_id == expected_id);
    last_t = e->t_ps;
    ++expected_id;
    ++n;
  }
  // Poisson(1000): +-5 sigma.
  CHECK(n > 1000 - 5 * 32);
  CHECK(n < 1000 + 5 * 32);
  CHECK(!gen.next().has_value());  // stays exhausted
}

TEST_CASE("emission count tracks rate * duration") {
  SourceParams p;
  const double duration_s = 0.005;
  const auto emissions =
      generate_pair_emissions(p, 0, duration_s, substream(9, Stream::Test, 2));
  const double expect = p.pair_rate_hz * duration_s;  // 1000
  CHECK(std::abs(static_cast<double>(emissions.size()) - expect) < 5 * std::sqrt(expect));
}

TEST_CASE("detuning and skew sample moments match their parameters") {
  SourceParams p;
  p.pair_rate_hz = 1.0e6;
  const auto emissions =
      generate_pair_emissions(p, 0, 0.05, substream(42, Stream::Test, 3));
  REQUIRE(emissions.size() > 10000);
  double sum_d = 0, sum_d2 = 0, sum_s = 0, sum_s2 = 0;
  for (const auto& e : emissions) {
    sum_d += e.detuning_ghz;
    sum_d2 += e.detuning_ghz * e.detuning_ghz;
    sum_s += e.skew_ps;
    sum_s2 += e.skew_ps * e.skew_ps;
  }
  const double n = static_cast<double>(emissions.size());
  const double mean_d = sum_d / n;
  const double std_d = std::sqrt(sum_d2 / n - mean_d * mean_d);
  const double mean_s = sum_s / n;
  const double std_s = std::sqrt(sum_s2 / n - mean_s * mean_s);
  CHECK(std::abs(mean_d) < 5 * p.detuning_sigma_ghz / std::sqrt(n));
  CHECK(std_d == doctest::Approx(p.detuning_sigma_ghz).epsilon(0.05));
  CHECK(std::abs(mean_s) < 5 * p.correlation_sigma_ps / std::sqrt(n));
  CHECK(std_s == doctest::Approx(p.correlation_sigma_ps).epsilon(0.05));
}

TEST_CASE("identical seeds give identical streams, different seeds differ") {
  SourceParams p;
  const auto a = generate_pair_emissions(p, 3, 0.002, substream(77, Stream::Emission, 3));
  const auto b = generate_pair_emissions(p, 3, 0.002, substream(77, Stream::Emission, 3));
  const auto c = generate_pair_emissions(p, 3, 0.002, substream(78, Stream::Emission, 3));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].t_ps == b[i].t_ps);
    CHECK(a[i].detuning_ghz == b[i].detuning_ghz);
    CHECK(a[i].skew_ps == b[i].skew_ps);
  }
  bool same = a.size() == c.size();
  if (same) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].t_ps != c[i].t_ps) same = false;
    }
  }
  CHECK(!same);
}

TEST_CASE("nonpositive duration is rejected") {
  SourceParams p;
  CHECK_THROWS_AS(EmissionGenerator(p, 0, 0.0, substream(1, Stream::Test)),
                  std::invalid_argument);
  CHECK_THROWS_AS(EmissionGenerator(p, 0, -1.0, substream(1, Stream::Test)),
                  std::invalid_argument);
}
