#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qkdnet/doqkd_protocol.hpp"
#include "qkdnet/rng.hpp"

namespace qkdnet {

/// Network address of a user: subnet number plus position inside the
/// subnet. Index 0 is the subnet's member residing in the central node.
struct UserId {
  int subnet = 0;
  int index = 0;

  friend bool operator==(const UserId&, const UserId&) = default;
  friend auto operator<=>(const UserId&, const UserId&) = default;
};

std::string to_string(UserId u);

struct Topology {
  int m_subnets = 16;
  int n_users_per_subnet = 8;

  int end_users() const { return m_subnets * (n_users_per_subnet - 1); }
  int central_members() const { return m_subnets; }
  int total_users() const { return m_subnets * n_users_per_subnet; }
  UserId central_of(int subnet) const { return UserId{subnet, 0}; }
  bool contains(UserId u) const {
    return u.subnet >= 0 && u.subnet < m_subnets && u.index >= 0 &&
           u.index < n_users_per_subnet;
  }
  /// Stable per-user code for seeding and serialization.
  std::uint64_t user_code(UserId u) const {
    return static_cast<std::uint64_t>(u.subnet) *
               static_cast<std::uint64_t>(n_users_per_subnet) +
           static_cast<std::uint64_t>(u.index);
  }
};

/// Throws std::invalid_argument unless m_subnets >= 1 and
/// n_users_per_subnet >= 2 (a subnet needs its central member plus at
/// least one end user).
Topology build_topology(int m_subnets, int n_users_per_subnet);

enum class Provenance : std::uint8_t { Direct, RelayedViaCentral };

std::string to_string(Provenance p);

struct StoredKey {
  KeyBits key;
  Provenance provenance = Provenance::Direct;
};

/// Registry of established keys per unordered user pair. Both endpoints of
/// a pair hold the same bits by construction, so one record per pair.
class KeyStore {
public:
  /// Insert or replace. Throws std::invalid_argument when u == v.
  void put(UserId u, UserId v, KeyBits key, Provenance provenance);

  /// Null when the pair has no key.
  const StoredKey* find(UserId u, UserId v) const;

  std::size_t size() const { return keys_.size(); }

private:
  std::map<std::pair<UserId, UserId>, StoredKey> keys_;
};

/// Bitwise XOR of two equal-length keys. Throws std::invalid_argument on a
/// length mismatch; callers truncate to the shorter key first.
KeyBits xor_relay(const KeyBits& key_ac, const KeyBits& key_bc);

struct RouteRecord {
  UserId u;
  UserId v;
  Provenance provenance = Provenance::Direct;
  std::vector<std::pair<UserId, UserId>> sessions_used;
  KeyBits relay_message;  // empty unless a public XOR was broadcast
  std::size_t key_bits = 0;
};

struct EndToEndKey {
  KeyBits key_u;  // as derived at endpoint u
  KeyBits key_v;  // as derived at endpoint v
  RouteRecord route;
};

/// End-to-end key establishment. Same subnet: the direct session key.
/// Different subnets: the central node XORs the two users' central-session
/// keys (truncated to the shorter) and broadcasts the combination; the
/// receiving endpoint XORs it away, leaving both with the first user's
/// key bits. A central member's own leg is vacuous (it already sits in the
/// central node); two central members draw fresh bits from the relay
/// substream of `master_seed`. Throws UnavailableRouteError when a needed
/// direct session key is missing, std::invalid_argument for u == v or
/// users outside the topology.
EndToEndKey establish_end_to_end(UserId u, UserId v, const Topology& topology,
                                 const KeyStore& direct_sessions,
                                 std::uint64_t master_seed,
                                 std::size_t relay_key_bits = 256);

}  // namespace qkdnet
