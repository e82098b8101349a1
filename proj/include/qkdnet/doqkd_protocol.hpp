#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkdnet/coincidence.hpp"

namespace qkdnet {

/// Predefined per-pair arm roles. Each user measures its S arm for the
/// security test and its K arm (the other one) for key generation; the two
/// users' S arms are opposite kinds so that both the KK and SS combinations
/// pair normal with anomalous dispersion.
struct BasisAssignment {
  int user_a = 0;  // lower index
  int user_b = 1;
  ArmKind s_arm_a = ArmKind::ND;
  ArmKind s_arm_b = ArmKind::AD;

  ArmKind k_arm_a() const { return other_arm(s_arm_a); }
  ArmKind k_arm_b() const { return other_arm(s_arm_b); }
};

/// Deterministic convention: the lower-index user takes ND as its S arm.
/// Argument order does not matter. Throws std::invalid_argument when both
/// users are the same.
BasisAssignment assign_bases(int user_x, int user_y);

struct SiftResult {
  std::vector<Coincidence> kk;
  std::vector<Coincidence> ss;
  std::uint64_t discarded = 0;
};

/// Partition by arm combination: KK (both key arms) keeps key material,
/// SS (both security arms) feeds the security test, the two mixed
/// combinations are discarded. Coincidence arm_a must belong to
/// assignment.user_a.
SiftResult sift(const std::vector<Coincidence>& coincidences,
                const BasisAssignment& assignment);

/// Time-bin encoding geometry: a frame of 2^bits_per_symbol bins, one
/// symbol per coincidence.
struct FrameConfig {
  double bin_ps = 1536.0;
  int bits_per_symbol = 4;

  int symbols() const { return 1 << bits_per_symbol; }
  double frame_ps() const { return bin_ps * static_cast<double>(symbols()); }

  /// Throws std::invalid_argument (bin_ps > 0, 1 <= bits_per_symbol <= 24).
  void validate() const;
};

struct SymbolPair {
  int a = 0;
  int b = 0;
};

/// Each side bins its own click against its own epoch: frame index
/// fl = floor((t - epoch)/frame_ps), symbol = bin within the frame. Frame
/// indices count as publicly reconciled, so only coincidences where both
/// sides land in the same frame are kept.
std::vector<SymbolPair> encode_symbols(const std::vector<Coincidence>& kk,
                                       const FrameConfig& frames, double epoch_a_ps,
                                       double epoch_b_ps);

/// Fraction of symbol pairs that disagree. Throws InsufficientDataError on
/// empty input.
double qber(const std::vector<SymbolPair>& pairs);

struct SecurityPolicy {
  double variance_threshold_ps2 = 10000.0;  // max allowed S-base delay variance
  double eve_information_bits = 0.50;       // charged per symbol when the test passes
  double ec_efficiency = 1.15;              // error-correction inefficiency f >= 1

  /// Throws std::invalid_argument; eve_information_bits must not exceed
  /// bits_per_symbol.
  void validate(int bits_per_symbol) const;
};

struct SecurityResult {
  bool pass = false;
  double variance_ps2 = -1.0;
};

/// Delay variance of the SS coincidences, restricted to the peak window of
/// their own delay histogram, compared against the policy threshold.
/// Throws InsufficientDataError when fewer than two SS delays survive the
/// peak-window restriction.
SecurityResult security_test(const std::vector<Coincidence>& ss,
                             const SecurityPolicy& policy,
                             const CoincidenceConfig& ccfg);

double binary_entropy(double e);

/// Fano-form conditional entropy for a d-bit symbol alphabet:
/// h2(e) + e*log2(2^d - 1).
double conditional_entropy_bits(double e, int bits_per_symbol);

struct SessionCounts {
  std::uint64_t total = 0;
  std::uint64_t kk = 0;
  std::uint64_t ss = 0;
  std::uint64_t discarded = 0;
  std::uint64_t kk_kept = 0;  // KK coincidences surviving frame reconciliation
};

struct SessionReport {
  int user_a = 0;
  int user_b = 0;
  std::uint64_t total_coincidences = 0;
  std::uint64_t kk_count = 0;
  std::uint64_t ss_count = 0;
  std::uint64_t discarded_count = 0;
  std::uint64_t kk_kept = 0;
  double qber = 0.0;
  double ss_variance_ps2 = -1.0;  // -1 when not measurable
  bool security_pass = false;
  std::uint64_t raw_bits = 0;
  std::uint64_t secure_bits = 0;
  double duration_s = 0.0;
  double raw_rate_bps = 0.0;
  double secure_rate_bps = 0.0;
  // parameter echoes for auditability
  int bits_per_symbol = 0;
  double encoding_bin_ps = 0.0;
  double variance_threshold_ps2 = 0.0;
  double eve_information_bits = 0.0;
  double ec_efficiency = 0.0;
};

/// Key accounting: raw_bits = d * kk_kept; when the security test passed,
/// secure bits per symbol r = max(0, d - f*H_d(e) - eve_information_bits)
/// and secure_bits = floor(r * kk_kept), else secure_bits = 0. Rates divide
/// by duration. Throws std::invalid_argument for e outside [0, 1].
SessionReport key_accounting(const SessionCounts& counts, double e,
                             const FrameConfig& frames, const SecurityPolicy& policy,
                             const SecurityResult& security, double duration_s);

/// Bit string with MSB-first symbol packing and hex export.
class KeyBits {
public:
  void append_bit(int bit);
  void append_symbol(int symbol, int bits);
  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int bit(std::size_t i) const { return bits_[i]; }
  KeyBits truncated(std::size_t n_bits) const;

  /// MSB-first nibble packing; trailing pad bits are zero.
  std::string hex() const;

  friend bool operator==(const KeyBits&, const KeyBits&) = default;

private:
  std::vector<std::uint8_t> bits_;
};

struct SessionConfig {
  CoincidenceConfig match;
  FrameConfig frames;
  SecurityPolicy policy;
};

struct SessionResult {
  SessionReport report;
  KeyBits raw_a;
  KeyBits raw_b;
  KeyBits secure_key;
};

/// One full session: match -> sift -> peak-center the encoding epoch on the
/// KK delay median -> encode -> QBER -> security test -> accounting. The
/// emitted secure key is the first secure_bits bits of the matched
/// (error-free) symbol material, and secure_bits is capped by what that
/// pool holds. Streams must be the two users' merged detection streams,
/// time-sorted, in the same order as (user_x, user_y). Throws
/// std::invalid_argument when user_x == user_y.
SessionResult run_pair_session(int user_x, int user_y,
                               const std::vector<DetectionEvent>& stream_x,
                               const std::vector<DetectionEvent>& stream_y,
                               const SessionConfig& cfg, double duration_s);

}  // namespace qkdnet
