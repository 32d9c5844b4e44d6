#pragma once

#include <variant>

#include "magent/agent.hpp"

namespace magent {

/// Per-message uniqueness token: a random nonce plus the providing host's
/// monotonic counter. An honest host never reuses one, across agents
/// included.
struct FreshnessField {
    Bytes nonce;  // 16 bytes
    std::uint64_t counter = 0;

    Bytes encode() const;
    static FreshnessField decode(const Bytes& data);

    friend bool operator==(const FreshnessField&, const FreshnessField&) = default;
};

/// Binds a message to the agent it was provided to: digests of the server
/// public key and of the server's code signature, plus a freshness field.
struct CrcBlock {
    Digest key_crc{};       // digest of the carried server public key
    Digest code_sig_crc{};  // digest of the agent's code signature
    FreshnessField fresh;

    Bytes encode() const;
    static CrcBlock decode(const Bytes& data);

    friend bool operator==(const CrcBlock&, const CrcBlock&) = default;
};

/// One freshness stream per logical host; calls must be serialized per host.
class FreshnessSource {
public:
    explicit FreshnessSource(const Seed& seed) : rng_(seed) {}

    FreshnessField next();

private:
    Rng rng_;
    std::uint64_t counter_ = 0;
};

CrcBlock make_crc_block(const Agent& agent, FreshnessSource& fresh);

// The five protection schemes. Payload layouts:
//   PlainSigned       m readable, signature by the provider
//   BasicEncrypted    encrypt(signed blob) for the server only
//   ImprovedSigned    crc block + m, jointly signed
//   ImprovedEncrypted encrypt(crc block + m, jointly signed) for the server
//   PartialEncrypted  crc block + encrypt(m), jointly signed - any host
//                     verifies, only the server reads m
struct PlainSigned {
    Bytes message;
    Signature signature;
    friend bool operator==(const PlainSigned&, const PlainSigned&) = default;
};
struct BasicEncrypted {
    Ciphertext ciphertext;
    friend bool operator==(const BasicEncrypted&, const BasicEncrypted&) = default;
};
struct ImprovedSigned {
    CrcBlock crc;
    Bytes message;
    Signature signature;
    friend bool operator==(const ImprovedSigned&, const ImprovedSigned&) = default;
};
struct ImprovedEncrypted {
    Ciphertext ciphertext;
    friend bool operator==(const ImprovedEncrypted&, const ImprovedEncrypted&) = default;
};
struct PartialEncrypted {
    CrcBlock crc;
    Ciphertext inner;
    Signature signature;
    friend bool operator==(const PartialEncrypted&, const PartialEncrypted&) = default;
};

struct ProtectedEntry {
    std::variant<PlainSigned, BasicEncrypted, ImprovedSigned, ImprovedEncrypted, PartialEncrypted>
        body;

    EntryMode mode() const;
    Bytes encode() const;  // 1-byte mode tag, then canonical fields
    static ProtectedEntry decode(const Bytes& data);

    friend bool operator==(const ProtectedEntry&, const ProtectedEntry&) = default;
};

/// Verdict plus recovered plaintext for the decrypting checks.
struct Opened {
    Verdict verdict;
    Bytes plaintext;
};

// --- plain digital signature -------------------------------------------

ProtectedEntry sign_plain(const KeyPair& host, const Bytes& m);
Verdict verify_plain(const ProtectedEntry& entry, const PublicKey& provider_key);
Verdict verify_plain(const ProtectedEntry& entry, const Certificate& provider_cert,
                     const PublicKey& ca_pub);

// --- basic encryption: sign, then encrypt the signed blob ---------------

ProtectedEntry encrypt_basic(const KeyPair& host, const PublicKey& server_pub, const Bytes& m,
                             Rng& rng);
Opened decrypt_basic(const ProtectedEntry& entry, const PrivateKey& server_priv,
                     const PublicKey& provider_key);
Opened decrypt_basic(const ProtectedEntry& entry, const PrivateKey& server_priv,
                     const Certificate& provider_cert, const PublicKey& ca_pub);

// --- improved schemes: the crc block travels inside the signed content --
// The freshness check needs the provider's registered fields; pass nullptr
// when no record is available and the verdict is flagged instead.

ProtectedEntry improved_sign(const KeyPair& host, const Agent& agent, const Bytes& m,
                             FreshnessSource& fresh);
ProtectedEntry improved_sign(const KeyPair& host, const Bytes& m, const CrcBlock& crc);
Verdict improved_verify(const ProtectedEntry& entry, const Agent& agent,
                        const PublicKey& provider_key,
                        const std::vector<FreshnessField>* registered);
Verdict improved_verify(const ProtectedEntry& entry, const Agent& agent,
                        const Certificate& provider_cert, const PublicKey& ca_pub,
                        const std::vector<FreshnessField>* registered);

ProtectedEntry improved_encrypt(const KeyPair& host, const Agent& agent,
                                const PublicKey& server_pub, const Bytes& m,
                                FreshnessSource& fresh, Rng& rng);
ProtectedEntry improved_encrypt(const KeyPair& host, const PublicKey& server_pub, const Bytes& m,
                                const CrcBlock& crc, Rng& rng);
Opened improved_decrypt(const ProtectedEntry& entry, const Agent& agent,
                        const PrivateKey& server_priv, const PublicKey& provider_key,
                        const std::vector<FreshnessField>* registered);
Opened improved_decrypt(const ProtectedEntry& entry, const Agent& agent,
                        const PrivateKey& server_priv, const Certificate& provider_cert,
                        const PublicKey& ca_pub, const std::vector<FreshnessField>* registered);

// --- partial encryption: integrity public, payload server-only ----------

ProtectedEntry partial_encrypt(const KeyPair& host, const Agent& agent,
                               const PublicKey& server_pub, const Bytes& m,
                               FreshnessSource& fresh, Rng& rng);
ProtectedEntry partial_encrypt(const KeyPair& host, const PublicKey& server_pub, const Bytes& m,
                               const CrcBlock& crc, Rng& rng);
Verdict partial_verify(const ProtectedEntry& entry, const Agent& agent,
                       const PublicKey& provider_key,
                       const std::vector<FreshnessField>* registered);
Verdict partial_verify(const ProtectedEntry& entry, const Agent& agent,
                       const Certificate& provider_cert, const PublicKey& ca_pub,
                       const std::vector<FreshnessField>* registered);
Opened partial_decrypt(const ProtectedEntry& entry, const PrivateKey& server_priv);

}  // namespace magent
