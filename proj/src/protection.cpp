#include "magent/protection.hpp"

#include <algorithm>

namespace magent {

namespace {

constexpr std::size_t kNonceLen = 16;

Bytes signed_improved_content(const CrcBlock& crc, const Bytes& m) {
    return Encoder{}.field(crc.encode()).field(m).take();
}

Bytes signed_partial_content(const CrcBlock& crc, const Ciphertext& inner) {
    return Encoder{}.field(crc.encode()).field(inner).take();
}

Digest digest_of(const Bytes& data) { return digest(data); }

// The three agent-binding checks shared by the improved and partial paths:
// both digests match the agent actually carried, and the freshness field is
// present in the provider's registered list (when one is available).
Verdict check_crc_block(const CrcBlock& crc, const Agent& agent,
                        const std::vector<FreshnessField>* registered) {
    if (crc.key_crc != digest_of(agent.server_pub.encode()))
        return Verdict::fail(FailReason::CrcMismatch);
    if (crc.code_sig_crc != digest_of(agent.code_signature))
        return Verdict::fail(FailReason::CrcMismatch);
    if (registered == nullptr) {
        Verdict v = Verdict::pass();
        v.freshness_unchecked = true;
        return v;
    }
    if (std::find(registered->begin(), registered->end(), crc.fresh) == registered->end())
        return Verdict::fail(FailReason::StaleField);
    return Verdict::pass();
}

}  // namespace

Bytes FreshnessField::encode() const { return Encoder{}.field(nonce).u64(counter).take(); }

FreshnessField FreshnessField::decode(const Bytes& data) {
    Decoder dec(data);
    FreshnessField f;
    f.nonce = dec.field();
    f.counter = dec.u64();
    dec.finish();
    if (f.nonce.size() != kNonceLen) throw DecodeError("freshness nonce has wrong width");
    return f;
}

Bytes CrcBlock::encode() const {
    return Encoder{}.field(to_bytes(key_crc)).field(to_bytes(code_sig_crc)).field(fresh.encode()).take();
}

CrcBlock CrcBlock::decode(const Bytes& data) {
    Decoder dec(data);
    CrcBlock block;
    Bytes key_crc = dec.field();
    Bytes code_sig_crc = dec.field();
    if (key_crc.size() != block.key_crc.size() || code_sig_crc.size() != block.code_sig_crc.size())
        throw DecodeError("crc digest has wrong width");
    std::copy(key_crc.begin(), key_crc.end(), block.key_crc.begin());
    std::copy(code_sig_crc.begin(), code_sig_crc.end(), block.code_sig_crc.begin());
    block.fresh = FreshnessField::decode(dec.field());
    dec.finish();
    return block;
}

FreshnessField FreshnessSource::next() {
    FreshnessField f;
    f.nonce = rng_.bytes(kNonceLen);
    f.counter = ++counter_;
    return f;
}

CrcBlock make_crc_block(const Agent& agent, FreshnessSource& fresh) {
    CrcBlock block;
    block.key_crc = digest_of(agent.server_pub.encode());
    block.code_sig_crc = digest_of(agent.code_signature);
    block.fresh = fresh.next();
    return block;
}

EntryMode ProtectedEntry::mode() const {
    return static_cast<EntryMode>(static_cast<std::uint8_t>(body.index()) + 1);
}

Bytes ProtectedEntry::encode() const {
    Bytes out;
    out.push_back(static_cast<std::uint8_t>(mode()));
    Encoder enc;
    std::visit(
        [&enc](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, PlainSigned>) {
                enc.field(b.message).field(b.signature);
            } else if constexpr (std::is_same_v<T, BasicEncrypted>) {
                enc.field(b.ciphertext);
            } else if constexpr (std::is_same_v<T, ImprovedSigned>) {
                enc.field(b.crc.encode()).field(b.message).field(b.signature);
            } else if constexpr (std::is_same_v<T, ImprovedEncrypted>) {
                enc.field(b.ciphertext);
            } else {
                enc.field(b.crc.encode()).field(b.inner).field(b.signature);
            }
        },
        body);
    Bytes fields = enc.take();
    out.insert(out.end(), fields.begin(), fields.end());
    return out;
}

ProtectedEntry ProtectedEntry::decode(const Bytes& data) {
    if (data.empty()) throw DecodeError("protected entry is empty");
    Bytes fields(data.begin() + 1, data.end());
    Decoder dec(fields);
    ProtectedEntry entry;
    switch (data[0]) {
        case 1: {
            PlainSigned b;
            b.message = dec.field();
            b.signature = dec.field();
            entry.body = std::move(b);
            break;
        }
        case 2: {
            BasicEncrypted b;
            b.ciphertext = dec.field();
            entry.body = std::move(b);
            break;
        }
        case 3: {
            ImprovedSigned b;
            b.crc = CrcBlock::decode(dec.field());
            b.message = dec.field();
            b.signature = dec.field();
            entry.body = std::move(b);
            break;
        }
        case 4: {
            ImprovedEncrypted b;
            b.ciphertext = dec.field();
            entry.body = std::move(b);
            break;
        }
        case 5: {
            PartialEncrypted b;
            b.crc = CrcBlock::decode(dec.field());
            b.inner = dec.field();
            b.signature = dec.field();
            entry.body = std::move(b);
            break;
        }
        default:
            throw DecodeError("protected entry has unknown mode tag");
    }
    dec.finish();
    return entry;
}

// --- plain ---------------------------------------------------------------

ProtectedEntry sign_plain(const KeyPair& host, const Bytes& m) {
    PlainSigned b;
    b.message = m;
    b.signature = sign(host.priv, m);
    return ProtectedEntry{std::move(b)};
}

Verdict verify_plain(const ProtectedEntry& entry, const PublicKey& provider_key) {
    const auto* b = std::get_if<PlainSigned>(&entry.body);
    if (b == nullptr) return Verdict::fail(FailReason::BadSignature);
    if (!verify(provider_key, b->message, b->signature))
        return Verdict::fail(FailReason::BadSignature);
    return Verdict::pass();
}

Verdict verify_plain(const ProtectedEntry& entry, const Certificate& provider_cert,
                     const PublicKey& ca_pub) {
    if (!ca_verify(ca_pub, provider_cert)) return Verdict::fail(FailReason::BadCertificate);
    return verify_plain(entry, provider_cert.subject_key);
}

// --- basic ---------------------------------------------------------------

ProtectedEntry encrypt_basic(const KeyPair& host, const PublicKey& server_pub, const Bytes& m,
                             Rng& rng) {
    Signature sig = sign(host.priv, m);
    Bytes blob = Encoder{}.field(m).field(sig).take();
    BasicEncrypted b;
    b.ciphertext = pk_encrypt(server_pub, blob, rng);
    return ProtectedEntry{std::move(b)};
}

Opened decrypt_basic(const ProtectedEntry& entry, const PrivateKey& server_priv,
                     const PublicKey& provider_key) {
    const auto* b = std::get_if<BasicEncrypted>(&entry.body);
    if (b == nullptr) return {Verdict::fail(FailReason::DecryptError), {}};
    std::optional<Bytes> blob = pk_decrypt(server_priv, b->ciphertext);
    if (!blob) return {Verdict::fail(FailReason::DecryptError), {}};
    Bytes m;
    Signature sig;
    try {
        Decoder dec(*blob);
        m = dec.field();
        sig = dec.field();
        dec.finish();
    } catch (const DecodeError&) {
        return {Verdict::fail(FailReason::DecryptError), {}};
    }
    if (!verify(provider_key, m, sig)) return {Verdict::fail(FailReason::BadSignature), {}};
    return {Verdict::pass(), std::move(m)};
}

Opened decrypt_basic(const ProtectedEntry& entry, const PrivateKey& server_priv,
                     const Certificate& provider_cert, const PublicKey& ca_pub) {
    if (!ca_verify(ca_pub, provider_cert)) return {Verdict::fail(FailReason::BadCertificate), {}};
    return decrypt_basic(entry, server_priv, provider_cert.subject_key);
}

// --- improved signature --------------------------------------------------

ProtectedEntry improved_sign(const KeyPair& host, const Agent& agent, const Bytes& m,
                             FreshnessSource& fresh) {
    return improved_sign(host, m, make_crc_block(agent, fresh));
}

ProtectedEntry improved_sign(const KeyPair& host, const Bytes& m, const CrcBlock& crc) {
    ImprovedSigned b;
    b.crc = crc;
    b.message = m;
    b.signature = sign(host.priv, signed_improved_content(crc, m));
    return ProtectedEntry{std::move(b)};
}

Verdict improved_verify(const ProtectedEntry& entry, const Agent& agent,
                        const PublicKey& provider_key,
                        const std::vector<FreshnessField>* registered) {
    const auto* b = std::get_if<ImprovedSigned>(&entry.body);
    if (b == nullptr) return Verdict::fail(FailReason::BadSignature);
    if (!verify(provider_key, signed_improved_content(b->crc, b->message), b->signature))
        return Verdict::fail(FailReason::BadSignature);
    return check_crc_block(b->crc, agent, registered);
}

Verdict improved_verify(const ProtectedEntry& entry, const Agent& agent,
                        const Certificate& provider_cert, const PublicKey& ca_pub,
                        const std::vector<FreshnessField>* registered) {
    if (!ca_verify(ca_pub, provider_cert)) return Verdict::fail(FailReason::BadCertificate);
    return improved_verify(entry, agent, provider_cert.subject_key, registered);
}

// --- improved encryption --------------------------------------------------

ProtectedEntry improved_encrypt(const KeyPair& host, const Agent& agent,
                                const PublicKey& server_pub, const Bytes& m,
                                FreshnessSource& fresh, Rng& rng) {
    return improved_encrypt(host, server_pub, m, make_crc_block(agent, fresh), rng);
}

ProtectedEntry improved_encrypt(const KeyPair& host, const PublicKey& server_pub, const Bytes& m,
                                const CrcBlock& crc, Rng& rng) {
    Signature sig = sign(host.priv, signed_improved_content(crc, m));
    Bytes blob = Encoder{}.field(crc.encode()).field(m).field(sig).take();
    ImprovedEncrypted b;
    b.ciphertext = pk_encrypt(server_pub, blob, rng);
    return ProtectedEntry{std::move(b)};
}

Opened improved_decrypt(const ProtectedEntry& entry, const Agent& agent,
                        const PrivateKey& server_priv, const PublicKey& provider_key,
                        const std::vector<FreshnessField>* registered) {
    const auto* b = std::get_if<ImprovedEncrypted>(&entry.body);
    if (b == nullptr) return {Verdict::fail(FailReason::DecryptError), {}};
    std::optional<Bytes> blob = pk_decrypt(server_priv, b->ciphertext);
    if (!blob) return {Verdict::fail(FailReason::DecryptError), {}};
    CrcBlock crc;
    Bytes m;
    Signature sig;
    try {
        Decoder dec(*blob);
        crc = CrcBlock::decode(dec.field());
        m = dec.field();
        sig = dec.field();
        dec.finish();
    } catch (const DecodeError&) {
        return {Verdict::fail(FailReason::DecryptError), {}};
    }
    if (!verify(provider_key, signed_improved_content(crc, m), sig))
        return {Verdict::fail(FailReason::BadSignature), {}};
    Verdict v = check_crc_block(crc, agent, registered);
    if (!v) return {v, {}};
    return {v, std::move(m)};
}

Opened improved_decrypt(const ProtectedEntry& entry, const Agent& agent,
                        const PrivateKey& server_priv, const Certificate& provider_cert,
                        const PublicKey& ca_pub, const std::vector<FreshnessField>* registered) {
    if (!ca_verify(ca_pub, provider_cert)) return {Verdict::fail(FailReason::BadCertificate), {}};
    return improved_decrypt(entry, agent, server_priv, provider_cert.subject_key, registered);
}

// --- partial encryption ----------------------------------------------------

ProtectedEntry partial_encrypt(const KeyPair& host, const Agent& agent,
                               const PublicKey& server_pub, const Bytes& m,
                               FreshnessSource& fresh, Rng& rng) {
    return partial_encrypt(host, server_pub, m, make_crc_block(agent, fresh), rng);
}

ProtectedEntry partial_encrypt(const KeyPair& host, const PublicKey& server_pub, const Bytes& m,
                               const CrcBlock& crc, Rng& rng) {
    PartialEncrypted b;
    b.crc = crc;
    b.inner = pk_encrypt(server_pub, m, rng);
    b.signature = sign(host.priv, signed_partial_content(crc, b.inner));
    return ProtectedEntry{std::move(b)};
}

Verdict partial_verify(const ProtectedEntry& entry, const Agent& agent,
                       const PublicKey& provider_key,
                       const std::vector<FreshnessField>* registered) {
    const auto* b = std::get_if<PartialEncrypted>(&entry.body);
    if (b == nullptr) return Verdict::fail(FailReason::BadSignature);
    if (!verify(provider_key, signed_partial_content(b->crc, b->inner), b->signature))
        return Verdict::fail(FailReason::BadSignature);
    return check_crc_block(b->crc, agent, registered);
}

Verdict partial_verify(const ProtectedEntry& entry, const Agent& agent,
                       const Certificate& provider_cert, const PublicKey& ca_pub,
                       const std::vector<FreshnessField>* registered) {
    if (!ca_verify(ca_pub, provider_cert)) return Verdict::fail(FailReason::BadCertificate);
    return partial_verify(entry, agent, provider_cert.subject_key, registered);
}

Opened partial_decrypt(const ProtectedEntry& entry, const PrivateKey& server_priv) {
    const auto* b = std::get_if<PartialEncrypted>(&entry.body);
    if (b == nullptr) return {Verdict::fail(FailReason::DecryptError), {}};
    std::optional<Bytes> m = pk_decrypt(server_priv, b->inner);
    if (!m) return {Verdict::fail(FailReason::DecryptError), {}};
    return {Verdict::pass(), std::move(*m)};
}

}  // namespace magent
