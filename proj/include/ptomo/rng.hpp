#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ptomo {

std::uint64_t splitmix64(std::uint64_t x);

// Stream seed for a work item keyed by (master, k1, k2, ...).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

inline std::mt19937_64 derive_stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  return std::mt19937_64(derive_seed(master, keys));
}

}  // namespace ptomo
