#include "magent/crypto.hpp"

#include <sodium.h>

namespace magent {

namespace {

struct SodiumInit {
    SodiumInit() {
        if (sodium_init() < 0) throw std::runtime_error("libsodium failed to initialize");
    }
};
const SodiumInit sodium_init_once;

void seal_nonce(std::uint8_t* nonce, const std::uint8_t* epk, const std::uint8_t* rpk) {
    crypto_generichash_state st;
    crypto_generichash_init(&st, nullptr, 0, crypto_box_NONCEBYTES);
    crypto_generichash_update(&st, epk, crypto_box_PUBLICKEYBYTES);
    crypto_generichash_update(&st, rpk, crypto_box_PUBLICKEYBYTES);
    crypto_generichash_final(&st, nonce, crypto_box_NONCEBYTES);
}

}  // namespace

Bytes to_bytes(const Digest& d) { return Bytes(d.begin(), d.end()); }

Bytes PublicKey::encode() const { return Encoder{}.field(sign_key).field(box_key).take(); }

PublicKey PublicKey::decode(const Bytes& data) {
    Decoder dec(data);
    PublicKey key;
    key.sign_key = dec.field();
    key.box_key = dec.field();
    dec.finish();
    if (key.sign_key.size() != crypto_sign_PUBLICKEYBYTES || key.box_key.size() != crypto_box_PUBLICKEYBYTES)
        throw DecodeError("public key component has wrong width");
    return key;
}

Bytes PrivateKey::encode() const { return Encoder{}.field(sign_key).field(box_key).take(); }

PrivateKey PrivateKey::decode(const Bytes& data) {
    Decoder dec(data);
    PrivateKey key;
    key.sign_key = dec.field();
    key.box_key = dec.field();
    dec.finish();
    if (key.sign_key.size() != crypto_sign_SECRETKEYBYTES || key.box_key.size() != crypto_box_SECRETKEYBYTES)
        throw DecodeError("private key component has wrong width");
    return key;
}

Bytes Certificate::signed_payload() const {
    return Encoder{}.field(subject).field(subject_key.encode()).take();
}

Bytes Certificate::encode() const {
    return Encoder{}.field(subject).field(subject_key.encode()).field(ca_signature).take();
}

Certificate Certificate::decode(const Bytes& data) {
    Decoder dec(data);
    Certificate cert;
    cert.subject = dec.str();
    cert.subject_key = PublicKey::decode(dec.field());
    cert.ca_signature = dec.field();
    dec.finish();
    return cert;
}

KeyPair generate_keypair(const Seed& seed, HostId owner) {
    Seed sign_seed = derive_seed(seed, "keygen/ed25519");
    Seed box_seed = derive_seed(seed, "keygen/x25519");

    KeyPair kp;
    kp.owner = std::move(owner);
    kp.pub.sign_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.priv.sign_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.pub.sign_key.data(), kp.priv.sign_key.data(), sign_seed.data());

    kp.pub.box_key.resize(crypto_box_PUBLICKEYBYTES);
    kp.priv.box_key.resize(crypto_box_SECRETKEYBYTES);
    crypto_box_seed_keypair(kp.pub.box_key.data(), kp.priv.box_key.data(), box_seed.data());
    return kp;
}

PublicKey public_of(const PrivateKey& priv) {
    if (priv.sign_key.size() != crypto_sign_SECRETKEYBYTES ||
        priv.box_key.size() != crypto_box_SECRETKEYBYTES)
        throw KeyError("private key component has wrong width");
    PublicKey pub;
    pub.sign_key.resize(crypto_sign_PUBLICKEYBYTES);
    crypto_sign_ed25519_sk_to_pk(pub.sign_key.data(), priv.sign_key.data());
    pub.box_key.resize(crypto_box_PUBLICKEYBYTES);
    crypto_scalarmult_base(pub.box_key.data(), priv.box_key.data());
    return pub;
}

Signature sign(const PrivateKey& priv, const Bytes& message) {
    if (priv.sign_key.size() != crypto_sign_SECRETKEYBYTES)
        throw KeyError("signing key has wrong width");
    Signature sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), priv.sign_key.data());
    return sig;
}

bool verify(const PublicKey& pub, const Bytes& message, const Signature& sig) {
    if (pub.sign_key.size() != crypto_sign_PUBLICKEYBYTES || sig.size() != crypto_sign_BYTES)
        return false;
    return crypto_sign_verify_detached(sig.data(), message.data(), message.size(),
                                       pub.sign_key.data()) == 0;
}

Ciphertext pk_encrypt(const PublicKey& pub, const Bytes& message, Rng& rng) {
    if (pub.box_key.size() != crypto_box_PUBLICKEYBYTES)
        throw KeyError("encryption key has wrong width");

    // Sealed-box layout (ephemeral pk || box), with the ephemeral key drawn
    // from the caller's RNG so encryption replays under a fixed seed.
    Seed eseed = rng.seed32();
    std::uint8_t epk[crypto_box_PUBLICKEYBYTES];
    std::uint8_t esk[crypto_box_SECRETKEYBYTES];
    crypto_box_seed_keypair(epk, esk, eseed.data());

    std::uint8_t nonce[crypto_box_NONCEBYTES];
    seal_nonce(nonce, epk, pub.box_key.data());

    Ciphertext out(crypto_box_PUBLICKEYBYTES + message.size() + crypto_box_MACBYTES);
    std::copy(epk, epk + crypto_box_PUBLICKEYBYTES, out.begin());
    if (crypto_box_easy(out.data() + crypto_box_PUBLICKEYBYTES, message.data(), message.size(),
                        nonce, pub.box_key.data(), esk) != 0)
        throw KeyError("encryption failed");
    sodium_memzero(esk, sizeof esk);
    return out;
}

std::optional<Bytes> pk_decrypt(const PrivateKey& priv, const Ciphertext& c) {
    if (priv.box_key.size() != crypto_box_SECRETKEYBYTES) return std::nullopt;
    if (c.size() < crypto_box_SEALBYTES) return std::nullopt;

    std::uint8_t rpk[crypto_box_PUBLICKEYBYTES];
    crypto_scalarmult_base(rpk, priv.box_key.data());

    Bytes out(c.size() - crypto_box_SEALBYTES);
    if (crypto_box_seal_open(out.data(), c.data(), c.size(), rpk, priv.box_key.data()) != 0)
        return std::nullopt;
    return out;
}

Digest digest(const Bytes& message) {
    Digest d{};
    crypto_generichash(d.data(), d.size(), message.data(), message.size(), nullptr, 0);
    return d;
}

Certificate ca_issue(const PrivateKey& ca_priv, const HostId& subject, const PublicKey& key) {
    Certificate cert;
    cert.subject = subject;
    cert.subject_key = key;
    cert.ca_signature = sign(ca_priv, cert.signed_payload());
    return cert;
}

bool ca_verify(const PublicKey& ca_pub, const Certificate& cert) {
    return verify(ca_pub, cert.signed_payload(), cert.ca_signature);
}

}  // namespace magent
