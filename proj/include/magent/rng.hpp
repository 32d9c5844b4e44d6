#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "magent/bytes.hpp"

namespace magent {

using Seed = std::array<std::uint8_t, 32>;

Seed seed_from_u64(std::uint64_t value);
Seed seed_from_bytes(const Bytes& data);  // throws DecodeError unless 32 bytes

// Derives an independent child seed from a parent seed and a label. Distinct
// labels give unrelated streams, which is how one scenario seed fans out to
// per-host keys, freshness nonces and registry challenges.
Seed derive_seed(const Seed& parent, std::string_view label);

// Deterministic byte stream (ChaCha20 keyed by the seed, call counter as the
// nonce). Every consumer of randomness in the toolkit draws from one of
// these, so a scenario replays bit-exactly from its seed.
class Rng {
public:
    explicit Rng(const Seed& seed) : key_(seed) {}

    Bytes bytes(std::size_t n);
    Seed seed32();
    std::uint64_t next_u64();
    std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound), bound > 0

private:
    Seed key_;
    std::uint64_t counter_ = 0;
};

}  // namespace magent
