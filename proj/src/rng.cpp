#include "magent/rng.hpp"

#include <sodium.h>

namespace magent {

Seed seed_from_u64(std::uint64_t value) {
    std::uint8_t raw[8];
    for (int i = 0; i < 8; ++i) raw[i] = static_cast<std::uint8_t>(value >> (8 * (7 - i)));
    Seed seed{};
    crypto_generichash(seed.data(), seed.size(), raw, sizeof raw, nullptr, 0);
    return seed;
}

Seed seed_from_bytes(const Bytes& data) {
    if (data.size() != 32) throw DecodeError("seed must be exactly 32 bytes");
    Seed seed{};
    std::copy(data.begin(), data.end(), seed.begin());
    return seed;
}

Seed derive_seed(const Seed& parent, std::string_view label) {
    Seed child{};
    crypto_generichash(child.data(), child.size(),
                       reinterpret_cast<const unsigned char*>(label.data()), label.size(),
                       parent.data(), parent.size());
    return child;
}

Bytes Rng::bytes(std::size_t n) {
    std::uint8_t nonce[crypto_stream_chacha20_NONCEBYTES] = {};
    for (int i = 0; i < 8; ++i) nonce[i] = static_cast<std::uint8_t>(counter_ >> (8 * (7 - i)));
    ++counter_;
    Bytes out(n, 0);
    if (n > 0) crypto_stream_chacha20(out.data(), n, nonce, key_.data());
    return out;
}

Seed Rng::seed32() {
    Bytes raw = bytes(32);
    Seed seed{};
    std::copy(raw.begin(), raw.end(), seed.begin());
    return seed;
}

std::uint64_t Rng::next_u64() {
    Bytes raw = bytes(8);
    std::uint64_t value = 0;
    for (std::uint8_t b : raw) value = (value << 8) | b;
    return value;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    // rejection sampling keeps the draw unbiased
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t value;
    do {
        value = next_u64();
    } while (value >= limit);
    return value % bound;
}

}  // namespace magent
