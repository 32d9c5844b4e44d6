#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace magent {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(const Bytes& b) { return std::string(b.begin(), b.end()); }

struct DecodeError : std::runtime_error {
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

std::string hex_encode(const Bytes& data);
Bytes hex_decode(std::string_view hex);  // throws DecodeError on odd length / bad digit

// Canonical wire encoding: every field is a 4-byte big-endian length followed
// by the field bytes, concatenated in declared field order. Integers are
// fixed-width big-endian payloads; lists are a u32 count followed by one
// field per element. All persistent formats in this project go through this.
class Encoder {
public:
    Encoder& field(const Bytes& data);
    Encoder& field(std::string_view data);
    Encoder& u32(std::uint32_t value);
    Encoder& u64(std::uint64_t value);

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

class Decoder {
public:
    explicit Decoder(const Bytes& data) : data_(data) {}

    Bytes field();
    std::string str();
    std::uint32_t u32();
    std::uint64_t u64();

    bool empty() const { return pos_ == data_.size(); }
    void finish();  // throws DecodeError unless the buffer is fully consumed

private:
    Bytes take(std::size_t n);

    const Bytes& data_;
    std::size_t pos_ = 0;
};

}  // namespace magent
