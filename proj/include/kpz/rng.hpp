#pragma once

// Counter-based pseudo-random streams.
//
// Every stream is a pure function of a 64-bit key and a counter, so a value can
// be regenerated from coordinates alone: same key + same counter -> same value,
// independent of what was drawn elsewhere.  Keys are derived by absorbing
// (base_seed, replica, row[, column]) through the SplitMix64 finalizer, which
// gives well-scrambled, effectively independent streams for distinct inputs.

#include <cmath>
#include <cstdint>

namespace kpz::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t sm64_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Absorb one word into a running key.
inline std::uint64_t absorb(std::uint64_t key, std::uint64_t word) {
  return sm64_finalize((key + kGolden) ^ sm64_finalize(word + kGolden));
}

// Identifies the random environment of one replica.
struct SeedSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t replica = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

inline std::uint64_t replica_key(const SeedSpec& s) {
  return absorb(absorb(0x6b707a6c61747431ULL, s.base_seed), s.replica);
}

// Key of the stream that fills lattice row `row` (row indices may be negative).
inline std::uint64_t row_key(const SeedSpec& s, std::int64_t row) {
  return absorb(replica_key(s), static_cast<std::uint64_t>(row));
}

inline std::uint64_t cell_key(std::uint64_t row_k, std::int64_t column) {
  return absorb(row_k, static_cast<std::uint64_t>(column));
}

// Strictly inside (0,1): 52 random bits centered in the unit cell.
inline double to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52;
}

// Sequential view of a keyed counter stream.  Copying it forks the position;
// the underlying values depend only on (key, position).
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_bits() { return sm64_finalize(key_ + (++pos_) * kGolden); }
  double uniform() { return to_unit(next_bits()); }

  // Standard normal via the polar method (no trig, exact rejection).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t pos_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace kpz::rng
