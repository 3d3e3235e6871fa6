#pragma once

#include <cstdint>
#include <string_view>

namespace icmt {

// Execution mode for the batch kernels (per-sentence metric statistics,
// bootstrap resampling, bulk retrieval scoring).  Parallel uses OpenMP when
// the build has it and must produce bit-identical results to Serial; tests
// compare the two paths directly.
enum class Exec { Serial, Parallel };

// splitmix64: tiny, well-distributed generator used to derive independent
// per-task seeds so parallel loops stay deterministic regardless of schedule.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, for hashing strings into seed material.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

}  // namespace icmt
