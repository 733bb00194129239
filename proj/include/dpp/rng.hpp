#ifndef DPP_RNG_HPP
#define DPP_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace dpp {

// Splittable seeding: every consumer derives an independent stream from
// (root seed, label, index) so batches parallelize reproducibly and a rerun
// of any one subcommand sees the same draws.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                                 std::uint64_t index = 0) {
  std::uint64_t s = splitmix64(root ^ hash_label(label));
  return splitmix64(s ^ splitmix64(index));
}

using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t root, std::string_view label,
                       std::uint64_t index = 0) {
  return Rng(derive_seed(root, label, index));
}

}  // namespace dpp

#endif
