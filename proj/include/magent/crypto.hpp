#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "magent/bytes.hpp"
#include "magent/rng.hpp"
#include "magent/verdict.hpp"

namespace magent {

// Everything in this header is stateless; all functions are safe to call
// concurrently from any number of threads.

using HostId = std::string;
using Signature = Bytes;
using Ciphertext = Bytes;
using Digest = std::array<std::uint8_t, 32>;

Bytes to_bytes(const Digest& d);

struct KeyError : std::runtime_error {
    explicit KeyError(const std::string& what) : std::runtime_error(what) {}
};

/// Public half of a host key pair: an Ed25519 verification key plus an
/// X25519 encryption key, carried together as one opaque unit.
struct PublicKey {
    Bytes sign_key;  // 32 bytes
    Bytes box_key;   // 32 bytes

    Bytes encode() const;
    static PublicKey decode(const Bytes& data);

    friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

struct PrivateKey {
    Bytes sign_key;  // 64 bytes (Ed25519 secret, embeds the public half)
    Bytes box_key;   // 32 bytes (X25519 secret)

    Bytes encode() const;
    static PrivateKey decode(const Bytes& data);

    friend bool operator==(const PrivateKey&, const PrivateKey&) = default;
};

struct KeyPair {
    PublicKey pub;
    PrivateKey priv;
    HostId owner;
};

/// CA-signed binding of a host identity to its public key.
struct Certificate {
    HostId subject;
    PublicKey subject_key;
    Signature ca_signature;

    Bytes encode() const;
    static Certificate decode(const Bytes& data);
    Bytes signed_payload() const;

    friend bool operator==(const Certificate&, const Certificate&) = default;
};

// Deterministic: one seed, one key pair. Signing and encryption keys are
// derived from the seed under distinct labels.
KeyPair generate_keypair(const Seed& seed, HostId owner = {});

// Recovers the public half from a private key.
PublicKey public_of(const PrivateKey& priv);  // throws KeyError on malformed key

Signature sign(const PrivateKey& priv, const Bytes& message);  // throws KeyError on malformed key
bool verify(const PublicKey& pub, const Bytes& message, const Signature& sig);  // malformed input -> false

// Hybrid envelope (sealed box): an ephemeral X25519 key agreement wraps a
// symmetric AEAD over the payload, so message length is unbounded. The
// ephemeral key comes from the caller's RNG; two calls never produce the
// same ciphertext.
Ciphertext pk_encrypt(const PublicKey& pub, const Bytes& message, Rng& rng);
std::optional<Bytes> pk_decrypt(const PrivateKey& priv, const Ciphertext& c);  // nullopt = DecryptError

Digest digest(const Bytes& message);  // 32-byte BLAKE2b

Certificate ca_issue(const PrivateKey& ca_priv, const HostId& subject, const PublicKey& key);
bool ca_verify(const PublicKey& ca_pub, const Certificate& cert);

}  // namespace magent
