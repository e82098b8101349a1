#include "qkdnet/network_relay.hpp"

#include <algorithm>
#include <stdexcept>

#include "qkdnet/errors.hpp"

namespace qkdnet {

std::string to_string(UserId u) {
  return "S" + std::to_string(u.subnet) + "U" + std::to_string(u.index);
}

Topology build_topology(int m_subnets, int n_users_per_subnet) {
  if (m_subnets < 1) throw std::invalid_argument("m_subnets must be >= 1");
  if (n_users_per_subnet < 2)
    throw std::invalid_argument(
        "n_users_per_subnet must be >= 2 (central member plus an end user)");
  Topology t;
  t.m_subnets = m_subnets;
  t.n_users_per_subnet = n_users_per_subnet;
  return t;
}

std::string to_string(Provenance p) {
  return p == Provenance::Direct ? "direct" : "relayed-via-central";
}

namespace {

std::pair<UserId, UserId> ordered_pair(UserId u, UserId v) {
  return u < v ? std::pair{u, v} : std::pair{v, u};
}

}  // namespace

void KeyStore::put(UserId u, UserId v, KeyBits key, Provenance provenance) {
  if (u == v) throw std::invalid_argument("a user cannot hold a key with itself");
  keys_[ordered_pair(u, v)] = StoredKey{std::move(key), provenance};
}

const StoredKey* KeyStore::find(UserId u, UserId v) const {
  auto it = keys_.find(ordered_pair(u, v));
  return it == keys_.end() ? nullptr : &it->second;
}

KeyBits xor_relay(const KeyBits& key_ac, const KeyBits& key_bc) {
  if (key_ac.size() != key_bc.size())
    throw std::invalid_argument("xor_relay requires equal-length keys");
  KeyBits out;
  for (std::size_t i = 0; i < key_ac.size(); ++i) {
    out.append_bit(key_ac.bit(i) ^ key_bc.bit(i));
  }
  return out;
}

namespace {

const KeyBits& require_session(const KeyStore& store, UserId a, UserId b) {
  const StoredKey* k = store.find(a, b);
  if (k == nullptr) {
    throw UnavailableRouteError("no direct session key between " + to_string(a) +
                                " and " + to_string(b));
  }
  return k->key;
}

}  // namespace

EndToEndKey establish_end_to_end(UserId u, UserId v, const Topology& topology,
                                 const KeyStore& direct_sessions,
                                 std::uint64_t master_seed,
                                 std::size_t relay_key_bits) {
  if (!topology.contains(u) || !topology.contains(v))
    throw std::invalid_argument("user outside the topology");
  if (u == v) throw std::invalid_argument("a user cannot key with itself");

  EndToEndKey out;
  out.route.u = u;
  out.route.v = v;

  if (u.subnet == v.subnet) {
    const KeyBits& key = require_session(direct_sessions, u, v);
    out.key_u = key;
    out.key_v = key;
    out.route.provenance = Provenance::Direct;
    out.route.sessions_used.push_back(ordered_pair(u, v));
    out.route.key_bits = key.size();
    return out;
  }

  out.route.provenance = Provenance::RelayedViaCentral;
  const UserId cu = topology.central_of(u.subnet);
  const UserId cv = topology.central_of(v.subnet);
  const bool u_central = u == cu;
  const bool v_central = v == cv;

  if (u_central && v_central) {
    // Both endpoints live in the central node; the relay hands them fresh
    // local bits and nothing crosses a quantum link.
    Rng rng = substream(master_seed, Stream::Relay, topology.user_code(u),
                        topology.user_code(v));
    KeyBits key;
    for (std::size_t i = 0; i < relay_key_bits; ++i) {
      key.append_bit(static_cast<int>(rng.next_u64() & 1u));
    }
    out.key_u = key;
    out.key_v = key;
    out.route.key_bits = key.size();
    return out;
  }

  if (u_central || v_central) {
    // One endpoint is co-located with the relay, so the far leg's session
    // key is already shared between them; no public message is needed.
    const UserId far = u_central ? v : u;
    const UserId far_central = u_central ? cv : cu;
    const KeyBits& key = require_session(direct_sessions, far, far_central);
    out.key_u = key;
    out.key_v = key;
    out.route.sessions_used.push_back(ordered_pair(far, far_central));
    out.route.key_bits = key.size();
    return out;
  }

  const KeyBits& k_u = require_session(direct_sessions, u, cu);
  const KeyBits& k_v = require_session(direct_sessions, v, cv);
  const std::size_t n = std::min(k_u.size(), k_v.size());
  const KeyBits ku_t = k_u.truncated(n);
  const KeyBits kv_t = k_v.truncated(n);
  out.route.relay_message = xor_relay(ku_t, kv_t);
  out.key_u = ku_t;
  out.key_v = xor_relay(out.route.relay_message, kv_t);  // v recovers u's bits
  out.route.sessions_used.push_back(ordered_pair(u, cu));
  out.route.sessions_used.push_back(ordered_pair(v, cv));
  out.route.key_bits = n;
  return out;
}

}  // namespace qkdnet
