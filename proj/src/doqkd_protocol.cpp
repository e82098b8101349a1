#include "qkdnet/doqkd_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkdnet/errors.hpp"

namespace qkdnet {

BasisAssignment assign_bases(int user_x, int user_y) {
  if (user_x == user_y) throw std::invalid_argument("a user cannot pair with itself");
  BasisAssignment a;
  a.user_a = std::min(user_x, user_y);
  a.user_b = std::max(user_x, user_y);
  a.s_arm_a = ArmKind::ND;
  a.s_arm_b = ArmKind::AD;
  return a;
}

SiftResult sift(const std::vector<Coincidence>& coincidences,
                const BasisAssignment& assignment) {
  SiftResult out;
  const ArmKind ka = assignment.k_arm_a();
  const ArmKind kb = assignment.k_arm_b();
  for (const Coincidence& c : coincidences) {
    const bool a_key = c.arm_a == ka;
    const bool b_key = c.arm_b == kb;
    if (a_key && b_key) {
      out.kk.push_back(c);
    } else if (!a_key && !b_key) {
      out.ss.push_back(c);
    } else {
      out.discarded += 1;
    }
  }
  return out;
}

void FrameConfig::validate() const {
  if (bin_ps <= 0.0) throw std::invalid_argument("encoding bin_ps must be > 0");
  if (bits_per_symbol < 1 || bits_per_symbol > 24)
    throw std::invalid_argument("bits_per_symbol must lie in [1, 24]");
}

namespace {

int bin_in_frame(double t_ps, double epoch_ps, const FrameConfig& frames,
                 std::int64_t& frame_index) {
  const double frame = frames.frame_ps();
  const double pos = t_ps - epoch_ps;
  const double fl = std::floor(pos / frame);
  frame_index = static_cast<std::int64_t>(fl);
  int sym = static_cast<int>(std::floor((pos - fl * frame) / frames.bin_ps));
  if (sym < 0) sym = 0;
  if (sym >= frames.symbols()) sym = frames.symbols() - 1;
  return sym;
}

}  // namespace

std::vector<SymbolPair> encode_symbols(const std::vector<Coincidence>& kk,
                                       const FrameConfig& frames, double epoch_a_ps,
                                       double epoch_b_ps) {
  frames.validate();
  std::vector<SymbolPair> out;
  out.reserve(kk.size());
  for (const Coincidence& c : kk) {
    std::int64_t frame_a = 0;
    std::int64_t frame_b = 0;
    SymbolPair p;
    p.a = bin_in_frame(c.t_a_ps, epoch_a_ps, frames, frame_a);
    p.b = bin_in_frame(c.t_b_ps, epoch_b_ps, frames, frame_b);
    if (frame_a == frame_b) out.push_back(p);
  }
  return out;
}

double qber(const std::vector<SymbolPair>& pairs) {
  if (pairs.empty()) throw InsufficientDataError("QBER of an empty symbol list");
  std::uint64_t errors = 0;
  for (const SymbolPair& p : pairs) {
    if (p.a != p.b) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(pairs.size());
}

void SecurityPolicy::validate(int bits_per_symbol) const {
  if (variance_threshold_ps2 <= 0.0)
    throw std::invalid_argument("variance_threshold_ps2 must be > 0");
  if (eve_information_bits < 0.0 ||
      eve_information_bits > static_cast<double>(bits_per_symbol))
    throw std::invalid_argument("eve_information_bits must lie in [0, bits_per_symbol]");
  if (ec_efficiency < 1.0) throw std::invalid_argument("ec_efficiency must be >= 1");
}

SecurityResult security_test(const std::vector<Coincidence>& ss,
                             const SecurityPolicy& policy,
                             const CoincidenceConfig& ccfg) {
  if (ss.size() < 2) throw InsufficientDataError("security test needs >= 2 SS events");
  DelayHistogram hist = DelayHistogram::make(ccfg.bin_ps, ccfg.window_bins);
  for (const Coincidence& c : ss) {
    int bin = delay_bin(c.delay_ps, ccfg.bin_ps);
    if (bin > hist.hi_bin()) bin = hist.hi_bin();
    if (bin < hist.lo_bin()) bin = hist.lo_bin();
    hist.add(bin);
  }
  SecurityResult r;
  r.variance_ps2 = delay_variance(peak_window_delays(ss, hist, ccfg));
  r.pass = r.variance_ps2 <= policy.variance_threshold_ps2;
  return r;
}

double binary_entropy(double e) {
  if (e <= 0.0 || e >= 1.0) return 0.0;
  return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

double conditional_entropy_bits(double e, int bits_per_symbol) {
  const double alphabet = std::pow(2.0, bits_per_symbol);
  return binary_entropy(e) + e * std::log2(alphabet - 1.0);
}

SessionReport key_accounting(const SessionCounts& counts, double e,
                             const FrameConfig& frames, const SecurityPolicy& policy,
                             const SecurityResult& security, double duration_s) {
  if (e < 0.0 || e > 1.0) throw std::invalid_argument("error rate outside [0, 1]");
  if (duration_s <= 0.0) throw std::invalid_argument("duration_s must be > 0");
  frames.validate();
  policy.validate(frames.bits_per_symbol);

  SessionReport r;
  r.total_coincidences = counts.total;
  r.kk_count = counts.kk;
  r.ss_count = counts.ss;
  r.discarded_count = counts.discarded;
  r.kk_kept = counts.kk_kept;
  r.qber = e;
  r.ss_variance_ps2 = security.variance_ps2;
  r.security_pass = security.pass;
  r.duration_s = duration_s;

  const int d = frames.bits_per_symbol;
  r.raw_bits = static_cast<std::uint64_t>(d) * counts.kk_kept;
  if (security.pass) {
    const double per_symbol =
        std::max(0.0, static_cast<double>(d) -
                          policy.ec_efficiency * conditional_entropy_bits(e, d) -
                          policy.eve_information_bits);
    r.secure_bits = static_cast<std::uint64_t>(
        std::floor(per_symbol * static_cast<double>(counts.kk_kept)));
  } else {
    r.secure_bits = 0;
  }
  r.raw_rate_bps = static_cast<double>(r.raw_bits) / duration_s;
  r.secure_rate_bps = static_cast<double>(r.secure_bits) / duration_s;

  r.bits_per_symbol = d;
  r.encoding_bin_ps = frames.bin_ps;
  r.variance_threshold_ps2 = policy.variance_threshold_ps2;
  r.eve_information_bits = policy.eve_information_bits;
  r.ec_efficiency = policy.ec_efficiency;
  return r;
}

void KeyBits::append_bit(int bit) { bits_.push_back(bit ? 1 : 0); }

void KeyBits::append_symbol(int symbol, int bits) {
  for (int i = bits - 1; i >= 0; --i) bits_.push_back((symbol >> i) & 1);
}

KeyBits KeyBits::truncated(std::size_t n_bits) const {
  KeyBits out;
  const std::size_t n = std::min(n_bits, bits_.size());
  out.bits_.assign(bits_.begin(), bits_.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

std::string KeyBits::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve((bits_.size() + 3) / 4);
  for (std::size_t i = 0; i < bits_.size(); i += 4) {
    int nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      nibble <<= 1;
      if (i + j < bits_.size()) nibble |= bits_[i + j];
    }
    out.push_back(digits[nibble]);
  }
  return out;
}

namespace {

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

SessionResult run_pair_session(int user_x, int user_y,
                               const std::vector<DetectionEvent>& stream_x,
                               const std::vector<DetectionEvent>& stream_y,
                               const SessionConfig& cfg, double duration_s) {
  if (user_x == user_y) throw std::invalid_argument("a user cannot pair with itself");
  if (duration_s <= 0.0) throw std::invalid_argument("duration_s must be > 0");
  const bool swapped = user_x > user_y;
  const auto& stream_a = swapped ? stream_y : stream_x;
  const auto& stream_b = swapped ? stream_x : stream_y;

  const BasisAssignment assignment = assign_bases(user_x, user_y);
  const MatchResult matched = find_coincidences(stream_a, stream_b, cfg.match);
  const SiftResult sifted = sift(matched.coincidences, assignment);

  double epoch_b = 0.0;
  if (!sifted.kk.empty()) {
    std::vector<double> delays;
    delays.reserve(sifted.kk.size());
    for (const Coincidence& c : sifted.kk) delays.push_back(c.delay_ps);
    epoch_b = median(std::move(delays));
  }
  const std::vector<SymbolPair> symbols =
      encode_symbols(sifted.kk, cfg.frames, 0.0, epoch_b);
  const double e = symbols.empty() ? 0.0 : qber(symbols);

  SecurityResult security;
  try {
    security = security_test(sifted.ss, cfg.policy, cfg.match);
  } catch (const InsufficientDataError&) {
    security = SecurityResult{false, -1.0};
  }

  SessionCounts counts;
  counts.total = matched.coincidences.size();
  counts.kk = sifted.kk.size();
  counts.ss = sifted.ss.size();
  counts.discarded = sifted.discarded;
  counts.kk_kept = symbols.size();

  SessionResult out;
  out.report = key_accounting(counts, e, cfg.frames, cfg.policy, security, duration_s);
  out.report.user_a = assignment.user_a;
  out.report.user_b = assignment.user_b;

  KeyBits pool;
  for (const SymbolPair& p : symbols) {
    out.raw_a.append_symbol(p.a, cfg.frames.bits_per_symbol);
    out.raw_b.append_symbol(p.b, cfg.frames.bits_per_symbol);
    if (p.a == p.b) pool.append_symbol(p.a, cfg.frames.bits_per_symbol);
  }
  if (out.report.secure_bits > pool.size()) {
    out.report.secure_bits = pool.size();
    out.report.secure_rate_bps =
        static_cast<double>(out.report.secure_bits) / duration_s;
  }
  out.secure_key = pool.truncated(out.report.secure_bits);
  return out;
}

}  // namespace qkdnet
