#include "magent/registry.hpp"

#include <sstream>

namespace magent {

namespace {

constexpr std::size_t kChallengeNonceLen = 32;

std::string hex_arg(const Bytes& payload) { return hex_encode(payload); }

}  // namespace

Bytes FieldRecord::signed_payload() const {
    Encoder enc;
    enc.field(agent_id.encode()).field(provider);
    enc.u32(static_cast<std::uint32_t>(fields.size()));
    for (const FreshnessField& f : fields) enc.field(f.encode());
    return enc.take();
}

Bytes FieldRecord::encode() const {
    Bytes out = signed_payload();
    Bytes sig_field = Encoder{}.field(signature).take();
    out.insert(out.end(), sig_field.begin(), sig_field.end());
    return out;
}

FieldRecord FieldRecord::decode(const Bytes& data) {
    Decoder dec(data);
    FieldRecord record;
    record.agent_id = AgentId::decode(dec.field());
    record.provider = dec.str();
    std::uint32_t count = dec.u32();
    record.fields.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i)
        record.fields.push_back(FreshnessField::decode(dec.field()));
    record.signature = dec.field();
    dec.finish();
    return record;
}

FieldRecord build_field_record(const KeyPair& host, const AgentId& agent_id,
                               std::vector<FreshnessField> fields) {
    if (fields.empty()) throw std::invalid_argument("field record needs at least one field");
    for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t j = i + 1; j < fields.size(); ++j)
            if (fields[i] == fields[j])
                throw DuplicateFieldError("field record has a duplicate freshness field");
    FieldRecord record;
    record.agent_id = agent_id;
    record.provider = host.owner;
    record.fields = std::move(fields);
    record.signature = sign(host.priv, record.signed_payload());
    return record;
}

Verdict verify_field_record(const FieldRecord& record, const PublicKey& provider_key) {
    if (!verify(provider_key, record.signed_payload(), record.signature))
        return Verdict::fail(FailReason::BadSignature);
    return Verdict::pass();
}

Verdict verify_field_record(const FieldRecord& record, const Certificate& provider_cert,
                            const PublicKey& ca_pub) {
    if (!ca_verify(ca_pub, provider_cert)) return Verdict::fail(FailReason::BadCertificate);
    if (provider_cert.subject != record.provider) return Verdict::fail(FailReason::BadCertificate);
    return verify_field_record(record, provider_cert.subject_key);
}

std::size_t expected_count(const FieldRecord& record) { return record.fields.size(); }

Bytes Challenge::encode() const {
    return Encoder{}.field(nonce).field(issued_to).field(agent_id.encode()).take();
}

Challenge Challenge::decode(const Bytes& data) {
    Decoder dec(data);
    Challenge c;
    c.nonce = dec.field();
    c.issued_to = dec.str();
    c.agent_id = AgentId::decode(dec.field());
    dec.finish();
    if (c.nonce.size() != kChallengeNonceLen) throw DecodeError("challenge nonce has wrong width");
    return c;
}

Challenge RegistryState::open_challenge(const HostId& host, const AgentId& agent) {
    auto key = std::make_pair(host, agent);
    if (pending_.contains(key))
        throw ChallengeInFlight("a challenge is already open for " + host);
    Challenge c;
    c.nonce = rng_.bytes(kChallengeNonceLen);
    c.issued_to = host;
    c.agent_id = agent;
    pending_.emplace(key, c);
    return c;
}

Verdict RegistryState::submit(const FieldRecord& record, const Signature& challenge_sig,
                              const PublicKey& provider_key) {
    auto key = std::make_pair(record.provider, record.agent_id);
    auto pending = pending_.find(key);
    if (pending == pending_.end()) return Verdict::fail(FailReason::BadChallenge);
    if (!verify(provider_key, pending->second.nonce, challenge_sig))
        return Verdict::fail(FailReason::BadChallenge);
    if (Verdict v = verify_field_record(record, provider_key); !v) return v;
    records_[std::make_pair(record.agent_id, record.provider)] = Stored{record, next_seq_++};
    pending_.erase(pending);
    return Verdict::pass();
}

Verdict RegistryState::submit(const FieldRecord& record, const Signature& challenge_sig,
                              const Certificate& provider_cert, const PublicKey& ca_pub) {
    if (!ca_verify(ca_pub, provider_cert)) return Verdict::fail(FailReason::BadCertificate);
    if (provider_cert.subject != record.provider) return Verdict::fail(FailReason::BadCertificate);
    return submit(record, challenge_sig, provider_cert.subject_key);
}

std::optional<FieldRecord> RegistryState::query(const AgentId& agent, const HostId& host) const {
    auto it = records_.find(std::make_pair(agent, host));
    if (it == records_.end()) return std::nullopt;
    return it->second.record;
}

std::optional<HostId> RegistryState::last_registrant(const AgentId& agent) const {
    std::optional<HostId> latest;
    std::uint64_t best = 0;
    for (const auto& [key, stored] : records_) {
        if (key.first == agent && stored.seq > best) {
            best = stored.seq;
            latest = key.second;
        }
    }
    return latest;
}

Digest RegistryState::state_hash() const {
    Encoder enc;
    enc.u32(static_cast<std::uint32_t>(records_.size()));
    for (const auto& [key, stored] : records_) {
        enc.field(key.first.encode()).field(key.second).u64(stored.seq).field(stored.record.encode());
    }
    enc.u32(static_cast<std::uint32_t>(pending_.size()));
    for (const auto& [key, challenge] : pending_) {
        enc.field(key.first).field(challenge.encode());
    }
    return digest(enc.take());
}

std::vector<std::pair<AgentId, HostId>> compare_registries(const RegistryState& a,
                                                           const RegistryState& b) {
    std::vector<std::pair<AgentId, HostId>> diverged;
    for (const auto& [key, stored] : a.records()) {
        auto it = b.records().find(key);
        if (it == b.records().end() || !(it->second.record == stored.record))
            diverged.push_back(key);
    }
    for (const auto& [key, stored] : b.records()) {
        if (!a.records().contains(key)) diverged.push_back(key);
    }
    return diverged;
}

// --- transcript --------------------------------------------------------

LoggedRegistry::LoggedRegistry(const Seed& seed) : rs_(seed) {
    lines_.push_back("rs-seed " + hex_encode(Bytes(seed.begin(), seed.end())));
}

Challenge LoggedRegistry::open_challenge(const HostId& host, const AgentId& agent) {
    lines_.push_back("> open_challenge " +
                     hex_arg(Encoder{}.field(host).field(agent.encode()).take()));
    try {
        Challenge c = rs_.open_challenge(host, agent);
        lines_.push_back("< ok " + hex_arg(c.encode()));
        return c;
    } catch (const ChallengeInFlight&) {
        lines_.push_back("< err ChallengeInFlight");
        throw;
    }
}

namespace {

Bytes submit_payload(const FieldRecord& record, const Signature& challenge_sig,
                     std::uint32_t auth_kind, const Bytes& auth_bytes) {
    return Encoder{}.field(record.encode()).field(challenge_sig).u32(auth_kind).field(auth_bytes).take();
}

std::string verdict_line(const Verdict& v) {
    if (v.ok) return "< verdict pass";
    return "< verdict fail " + to_string(*v.reason);
}

}  // namespace

Verdict LoggedRegistry::submit(const FieldRecord& record, const Signature& challenge_sig,
                               const PublicKey& provider_key) {
    lines_.push_back("> submit " +
                     hex_arg(submit_payload(record, challenge_sig, 0, provider_key.encode())));
    Verdict v = rs_.submit(record, challenge_sig, provider_key);
    lines_.push_back(verdict_line(v));
    return v;
}

Verdict LoggedRegistry::submit(const FieldRecord& record, const Signature& challenge_sig,
                               const Certificate& provider_cert, const PublicKey& ca_pub) {
    lines_.push_back("> submit " +
                     hex_arg(submit_payload(record, challenge_sig, 1, provider_cert.encode())));
    Verdict v = rs_.submit(record, challenge_sig, provider_cert, ca_pub);
    lines_.push_back(verdict_line(v));
    return v;
}

std::optional<FieldRecord> LoggedRegistry::query(const AgentId& agent, const HostId& host) {
    lines_.push_back("> query " + hex_arg(Encoder{}.field(agent.encode()).field(host).take()));
    std::optional<FieldRecord> record = rs_.query(agent, host);
    if (record)
        lines_.push_back("< record " + hex_arg(record->encode()));
    else
        lines_.push_back("< absent");
    return record;
}

ReplayResult replay_registry(const std::vector<std::string>& lines,
                             const std::optional<PublicKey>& ca_pub) {
    if (lines.empty() || lines[0].rfind("rs-seed ", 0) != 0)
        throw DecodeError("registry transcript is missing its seed header");
    Seed seed = seed_from_bytes(hex_decode(lines[0].substr(8)));

    ReplayResult result{RegistryState(seed), {}};
    std::size_t i = 1;
    auto next_response = [&]() -> const std::string& {
        if (i >= lines.size() || lines[i].rfind("< ", 0) != 0)
            throw DecodeError("registry transcript request has no response line");
        return lines[i++];
    };

    while (i < lines.size()) {
        std::istringstream req(lines[i]);
        std::string marker, op, payload_hex;
        req >> marker >> op >> payload_hex;
        if (marker != ">") throw DecodeError("registry transcript has a malformed request line");
        ++i;
        Bytes payload = hex_decode(payload_hex);
        Decoder dec(payload);

        std::string recorded;
        if (op == "open_challenge") {
            HostId host = dec.str();
            AgentId agent = AgentId::decode(dec.field());
            dec.finish();
            try {
                Challenge c = result.state.open_challenge(host, agent);
                recorded = "< ok " + hex_arg(c.encode());
            } catch (const ChallengeInFlight&) {
                recorded = "< err ChallengeInFlight";
            }
        } else if (op == "submit") {
            FieldRecord record = FieldRecord::decode(dec.field());
            Signature challenge_sig = dec.field();
            std::uint32_t auth_kind = dec.u32();
            Bytes auth = dec.field();
            dec.finish();
            Verdict v;
            if (auth_kind == 0) {
                v = result.state.submit(record, challenge_sig, PublicKey::decode(auth));
            } else if (auth_kind == 1) {
                if (!ca_pub)
                    throw DecodeError("transcript has certificate submissions but no CA key given");
                v = result.state.submit(record, challenge_sig, Certificate::decode(auth), *ca_pub);
            } else {
                throw DecodeError("submit has unknown auth kind");
            }
            if (!v) result.rejections.push_back({record.agent_id, record.provider, *v.reason});
            recorded = verdict_line(v);
        } else if (op == "query") {
            AgentId agent = AgentId::decode(dec.field());
            HostId host = dec.str();
            dec.finish();
            std::optional<FieldRecord> record = result.state.query(agent, host);
            recorded = record ? "< record " + hex_arg(record->encode()) : "< absent";
        } else {
            throw DecodeError("registry transcript has unknown operation: " + op);
        }

        if (next_response() != recorded)
            throw DecodeError("registry transcript replay diverged at operation " + op);
    }
    return result;
}

}  // namespace magent
