#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "magent/crypto.hpp"

namespace magent {

struct DuplicateIdError : std::runtime_error {
    explicit DuplicateIdError(const std::string& what) : std::runtime_error(what) {}
};

struct IndexError : std::runtime_error {
    explicit IndexError(const std::string& what) : std::runtime_error(what) {}
};

/// Globally unique agent identity: the minting server's network id plus a
/// serial the server never reuses.
struct AgentId {
    HostId server_id;
    std::uint64_t serial = 0;

    Bytes encode() const;
    static AgentId decode(const Bytes& data);

    auto operator<=>(const AgentId&) const = default;
};

/// The signed region of an agent: program payload, the agent id, and the
/// route server the data-area protocol reports to. Anything in here is
/// covered by the server's code signature.
struct CodeArea {
    Bytes code;
    AgentId id;
    HostId rs_id;

    Bytes encode() const;
    static CodeArea decode(const Bytes& data);

    friend bool operator==(const CodeArea&, const CodeArea&) = default;
};

enum class EntryMode : std::uint8_t {
    PlainSigned = 1,
    BasicEncrypted = 2,
    ImprovedSigned = 3,
    ImprovedEncrypted = 4,
    PartialEncrypted = 5,
};

std::string to_string(EntryMode mode);
EntryMode entry_mode_from_string(std::string_view name);  // throws DecodeError
constexpr EntryMode kAllModes[] = {EntryMode::PlainSigned, EntryMode::BasicEncrypted,
                                   EntryMode::ImprovedSigned, EntryMode::ImprovedEncrypted,
                                   EntryMode::PartialEncrypted};

/// One protected message as stored in the agent's data area. provider,
/// msg_index and mode ride in the clear so a reader can pick the right
/// certificate; payload is the serialized protected entry itself.
struct DataEntry {
    HostId provider;
    std::uint64_t msg_index = 0;  // 1-based, contiguous per provider
    EntryMode mode = EntryMode::PlainSigned;
    Bytes payload;

    Bytes encode() const;
    static DataEntry decode(const Bytes& data);

    friend bool operator==(const DataEntry&, const DataEntry&) = default;
};

struct Agent {
    CodeArea code_area;
    Signature code_signature;  // server signature over code_area.encode()
    PublicKey server_pub;      // carried by the agent itself
    std::uint32_t trip = 0;    // route index r
    std::vector<DataEntry> data_area;

    Bytes encode() const;
    static Agent decode(const Bytes& data);

    std::uint64_t max_index(const HostId& provider) const;

    friend bool operator==(const Agent&, const Agent&) = default;
};

struct Route {
    std::vector<HostId> hosts;  // may revisit a host
    std::uint32_t trip = 0;
};

/// Mints agents for one server, refusing to reuse a serial.
class AgentMint {
public:
    AgentMint(KeyPair server_keys, HostId rs_id)
        : keys_(std::move(server_keys)), rs_id_(std::move(rs_id)) {}

    Agent mint(const Bytes& code, std::uint64_t serial, std::uint32_t trip);  // throws DuplicateIdError

    const KeyPair& keys() const { return keys_; }

private:
    KeyPair keys_;
    HostId rs_id_;
    std::set<std::uint64_t> used_serials_;
};

// Code-area authentication: CA-certified server key matches the key the
// agent carries, and the code signature verifies under it.
Verdict verify_code(const Agent& agent, const Certificate& server_cert, const PublicKey& ca_pub);
// Trust comes from an out-of-band copy of the server key instead of a CA.
Verdict verify_code(const Agent& agent, const PublicKey& trusted_server_key);

// Appends one entry, enforcing per-provider index contiguity. Existing
// entries are never reordered or rewritten.
Agent append_entry(Agent agent, DataEntry entry);  // throws IndexError

// Multiplicity of each agent id among the observed agents (clone counting).
std::map<AgentId, std::size_t> count_clones(const std::vector<Agent>& observed);

}  // namespace magent
