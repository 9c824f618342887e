#include "ibprf/crypto/random.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace ibprf {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  return mix_seed(mix_seed(master) ^ mix_seed(index + 1));
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: empty range");
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % bound;
}

double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::uint64_t> sample_without_replacement(Rng& rng, std::uint64_t bound,
                                                      std::uint64_t count) {
  if (count > bound) throw std::invalid_argument("sample larger than population");
  std::vector<std::uint64_t> out;
  out.reserve(count);
  if (count * 4 >= bound) {
    // Dense case: partial Fisher-Yates over the whole range.
    std::vector<std::uint64_t> all(bound);
    for (std::uint64_t i = 0; i < bound; ++i) all[i] = i;
    for (std::uint64_t i = 0; i < count; ++i) {
      std::uint64_t j = i + uniform_below(rng, bound - i);
      std::swap(all[i], all[j]);
      out.push_back(all[i]);
    }
  } else if (bound <= (std::uint64_t{1} << 26)) {
    // Floyd's algorithm with a bitmap for membership.
    std::vector<bool> chosen(bound, false);
    for (std::uint64_t j = bound - count; j < bound; ++j) {
      std::uint64_t t = uniform_below(rng, j + 1);
      if (chosen[t]) t = j;
      chosen[t] = true;
      out.push_back(t);
    }
  } else {
    std::unordered_set<std::uint64_t> chosen;
    for (std::uint64_t j = bound - count; j < bound; ++j) {
      std::uint64_t t = uniform_below(rng, j + 1);
      if (!chosen.insert(t).second) {
        t = j;
        chosen.insert(t);
      }
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

template <typename KeyT>
KeyT draw_key(Rng& rng) {
  KeyT key;
  for (std::size_t half = 0; half < 2; ++half) {
    std::uint64_t word = rng();
    for (std::size_t i = 0; i < 8; ++i) {
      key.bytes[half * 8 + i] = static_cast<std::uint8_t>(word >> (56 - 8 * i));
    }
  }
  return key;
}

}  // namespace

PairwiseKey random_key(Rng& rng) { return draw_key<PairwiseKey>(rng); }

MasterKey random_master_key(Rng& rng) { return draw_key<MasterKey>(rng); }

}  // namespace ibprf
