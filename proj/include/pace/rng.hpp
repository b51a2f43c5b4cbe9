// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

namespace pace {

/// Stable 64-bit FNV-1a hash of a byte string. Used for seed derivation so
/// that adding or reordering unrelated work never perturbs another task's
/// random draws.
std::uint64_t fnv1a64(std::string_view bytes);

/// Mixes two 64-bit values into a well-spread seed.
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

/// Deterministic counter-based random stream (splitmix64 core).
///
/// Identical seed gives a bit-identical draw sequence. Substreams are derived
/// from the root seed, not from the current state, so they are independent of
/// how many draws the parent has made.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// Uniform draw strictly inside (0, 1).
  double uniform();

  /// Standard normal draw (Box-Muller, one value per call).
  double normal();

  /// Standard Gumbel draw.
  double gumbel();

  RngStream substream(std::uint64_t index) const {
    return RngStream(mix64(seed_, index));
  }
  RngStream substream(std::string_view label) const {
    return RngStream(mix64(seed_, fnv1a64(label)));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace pace
