#include "magent/bytes.hpp"

namespace magent {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string hex_encode(const Bytes& data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

Bytes hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0) throw DecodeError("hex string has odd length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_value(hex[i]);
        int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0) throw DecodeError("hex string has a non-hex digit");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

Encoder& Encoder::field(const Bytes& data) {
    if (data.size() > 0xffffffffu) throw DecodeError("field too large to encode");
    auto len = static_cast<std::uint32_t>(data.size());
    out_.push_back(static_cast<std::uint8_t>(len >> 24));
    out_.push_back(static_cast<std::uint8_t>(len >> 16));
    out_.push_back(static_cast<std::uint8_t>(len >> 8));
    out_.push_back(static_cast<std::uint8_t>(len));
    out_.insert(out_.end(), data.begin(), data.end());
    return *this;
}

Encoder& Encoder::field(std::string_view data) { return field(to_bytes(data)); }

Encoder& Encoder::u32(std::uint32_t value) {
    Bytes payload(4);
    for (int i = 0; i < 4; ++i) payload[i] = static_cast<std::uint8_t>(value >> (8 * (3 - i)));
    return field(payload);
}

Encoder& Encoder::u64(std::uint64_t value) {
    Bytes payload(8);
    for (int i = 0; i < 8; ++i) payload[i] = static_cast<std::uint8_t>(value >> (8 * (7 - i)));
    return field(payload);
}

Bytes Decoder::take(std::size_t n) {
    if (data_.size() - pos_ < n) throw DecodeError("field runs past end of buffer");
    Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
              data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
}

Bytes Decoder::field() {
    Bytes len_bytes = take(4);
    std::uint32_t len = (std::uint32_t{len_bytes[0]} << 24) | (std::uint32_t{len_bytes[1]} << 16) |
                        (std::uint32_t{len_bytes[2]} << 8) | std::uint32_t{len_bytes[3]};
    return take(len);
}

std::string Decoder::str() { return to_string(field()); }

std::uint32_t Decoder::u32() {
    Bytes payload = field();
    if (payload.size() != 4) throw DecodeError("u32 field has wrong width");
    std::uint32_t value = 0;
    for (std::uint8_t b : payload) value = (value << 8) | b;
    return value;
}

std::uint64_t Decoder::u64() {
    Bytes payload = field();
    if (payload.size() != 8) throw DecodeError("u64 field has wrong width");
    std::uint64_t value = 0;
    for (std::uint8_t b : payload) value = (value << 8) | b;
    return value;
}

void Decoder::finish() {
    if (!empty()) throw DecodeError("trailing bytes after last field");
}

}  // namespace magent
