#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace ibprf {

struct ResilienceSample {
  std::uint64_t captured = 0;
  double compromised_fraction = 0.0;
};

/// Run counters. All fields only ever grow within a run.
///
/// messages_sent counts protocol messages of the establishment phases (claims, relay hops,
/// key-id lists). Route discovery for path establishment is not modeled and not counted.
/// storage_max counts pre-distributed key material per node.
struct Metrics {
  std::uint64_t messages_sent = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t prf_ops = 0;
  std::uint64_t direct_keys = 0;
  std::uint64_t path_keys = 0;
  std::uint64_t storage_max = 0;
  std::uint64_t establish_attempts = 0;
  // key / polynomial ids sent in the clear by pool-based schemes
  std::uint64_t ids_sent = 0;
  std::vector<ResilienceSample> resilience_samples;

  void record_message(std::uint64_t bytes) {
    ++messages_sent;
    bytes_sent += bytes;
  }
  void observe_storage(std::uint64_t keys) { storage_max = std::max(storage_max, keys); }

  friend bool operator==(const Metrics& a, const Metrics& b) {
    return a.messages_sent == b.messages_sent && a.bytes_sent == b.bytes_sent &&
           a.prf_ops == b.prf_ops && a.direct_keys == b.direct_keys &&
           a.path_keys == b.path_keys && a.storage_max == b.storage_max &&
           a.establish_attempts == b.establish_attempts && a.ids_sent == b.ids_sent &&
           a.resilience_samples.size() == b.resilience_samples.size() &&
           std::equal(a.resilience_samples.begin(), a.resilience_samples.end(),
                      b.resilience_samples.begin(), [](const auto& x, const auto& y) {
                        return x.captured == y.captured &&
                               x.compromised_fraction == y.compromised_fraction;
                      });
  }
};

}  // namespace ibprf
