#include "magent/agent.hpp"

namespace magent {

Bytes AgentId::encode() const { return Encoder{}.field(server_id).u64(serial).take(); }

AgentId AgentId::decode(const Bytes& data) {
    Decoder dec(data);
    AgentId id;
    id.server_id = dec.str();
    id.serial = dec.u64();
    dec.finish();
    return id;
}

Bytes CodeArea::encode() const {
    return Encoder{}.field(code).field(id.encode()).field(rs_id).take();
}

CodeArea CodeArea::decode(const Bytes& data) {
    Decoder dec(data);
    CodeArea area;
    area.code = dec.field();
    area.id = AgentId::decode(dec.field());
    area.rs_id = dec.str();
    dec.finish();
    return area;
}

std::string to_string(EntryMode mode) {
    switch (mode) {
        case EntryMode::PlainSigned: return "plain_signed";
        case EntryMode::BasicEncrypted: return "basic_encrypted";
        case EntryMode::ImprovedSigned: return "improved_signed";
        case EntryMode::ImprovedEncrypted: return "improved_encrypted";
        case EntryMode::PartialEncrypted: return "partial_encrypted";
    }
    return "unknown";
}

EntryMode entry_mode_from_string(std::string_view name) {
    for (EntryMode mode : kAllModes)
        if (to_string(mode) == name) return mode;
    throw DecodeError("unknown entry mode: " + std::string(name));
}

Bytes DataEntry::encode() const {
    return Encoder{}
        .field(provider)
        .u64(msg_index)
        .u32(static_cast<std::uint32_t>(mode))
        .field(payload)
        .take();
}

DataEntry DataEntry::decode(const Bytes& data) {
    Decoder dec(data);
    DataEntry entry;
    entry.provider = dec.str();
    entry.msg_index = dec.u64();
    std::uint32_t mode = dec.u32();
    if (mode < 1 || mode > 5) throw DecodeError("data entry has unknown mode tag");
    entry.mode = static_cast<EntryMode>(mode);
    entry.payload = dec.field();
    dec.finish();
    return entry;
}

Bytes Agent::encode() const {
    Encoder enc;
    enc.field(code_area.encode()).field(code_signature).field(server_pub.encode()).u32(trip);
    enc.u32(static_cast<std::uint32_t>(data_area.size()));
    for (const DataEntry& entry : data_area) enc.field(entry.encode());
    return enc.take();
}

Agent Agent::decode(const Bytes& data) {
    Decoder dec(data);
    Agent agent;
    agent.code_area = CodeArea::decode(dec.field());
    agent.code_signature = dec.field();
    agent.server_pub = PublicKey::decode(dec.field());
    agent.trip = dec.u32();
    std::uint32_t count = dec.u32();
    agent.data_area.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i)
        agent.data_area.push_back(DataEntry::decode(dec.field()));
    dec.finish();
    return agent;
}

std::uint64_t Agent::max_index(const HostId& provider) const {
    std::uint64_t max = 0;
    for (const DataEntry& entry : data_area)
        if (entry.provider == provider && entry.msg_index > max) max = entry.msg_index;
    return max;
}

Agent AgentMint::mint(const Bytes& code, std::uint64_t serial, std::uint32_t trip) {
    if (!used_serials_.insert(serial).second)
        throw DuplicateIdError("agent serial already used by this server: " + std::to_string(serial));
    Agent agent;
    agent.code_area.code = code;
    agent.code_area.id = AgentId{keys_.owner, serial};
    agent.code_area.rs_id = rs_id_;
    agent.server_pub = keys_.pub;
    agent.trip = trip;
    agent.code_signature = sign(keys_.priv, agent.code_area.encode());
    return agent;
}

Verdict verify_code(const Agent& agent, const Certificate& server_cert, const PublicKey& ca_pub) {
    if (!ca_verify(ca_pub, server_cert)) return Verdict::fail(FailReason::BadCertificate);
    if (server_cert.subject != agent.code_area.id.server_id)
        return Verdict::fail(FailReason::BadCertificate);
    if (server_cert.subject_key != agent.server_pub)
        return Verdict::fail(FailReason::KeyMismatch);
    if (!verify(agent.server_pub, agent.code_area.encode(), agent.code_signature))
        return Verdict::fail(FailReason::CodeTampered);
    return Verdict::pass();
}

Verdict verify_code(const Agent& agent, const PublicKey& trusted_server_key) {
    if (trusted_server_key != agent.server_pub) return Verdict::fail(FailReason::KeyMismatch);
    if (!verify(agent.server_pub, agent.code_area.encode(), agent.code_signature))
        return Verdict::fail(FailReason::CodeTampered);
    return Verdict::pass();
}

Agent append_entry(Agent agent, DataEntry entry) {
    std::uint64_t expected = agent.max_index(entry.provider) + 1;
    if (entry.msg_index != expected)
        throw IndexError("entry index " + std::to_string(entry.msg_index) + " for " +
                         entry.provider + ", expected " + std::to_string(expected));
    agent.data_area.push_back(std::move(entry));
    return agent;
}

std::map<AgentId, std::size_t> count_clones(const std::vector<Agent>& observed) {
    std::map<AgentId, std::size_t> counts;
    for (const Agent& agent : observed) ++counts[agent.code_area.id];
    return counts;
}

}  // namespace magent
