#pragma once

#include <map>
#include <optional>
#include <utility>

#include "magent/protection.hpp"

namespace magent {

struct DuplicateFieldError : std::runtime_error {
    explicit DuplicateFieldError(const std::string& what) : std::runtime_error(what) {}
};

struct ChallengeInFlight : std::runtime_error {
    explicit ChallengeInFlight(const std::string& what) : std::runtime_error(what) {}
};

/// Signed list of one host's freshness fields for one agent. The signature
/// is the provider's, over (agent_id, provider, fields); the RS stores it
/// verbatim and is trusted for availability only.
struct FieldRecord {
    AgentId agent_id;
    HostId provider;
    std::vector<FreshnessField> fields;
    Signature signature;

    Bytes signed_payload() const;
    Bytes encode() const;
    static FieldRecord decode(const Bytes& data);

    friend bool operator==(const FieldRecord&, const FieldRecord&) = default;
};

FieldRecord build_field_record(const KeyPair& host, const AgentId& agent_id,
                               std::vector<FreshnessField> fields);  // throws DuplicateFieldError
Verdict verify_field_record(const FieldRecord& record, const PublicKey& provider_key);
Verdict verify_field_record(const FieldRecord& record, const Certificate& provider_cert,
                            const PublicKey& ca_pub);

/// Message count the provider has vouched for (m_i for this agent).
std::size_t expected_count(const FieldRecord& record);

/// Single-use random challenge gating a record submission.
struct Challenge {
    Bytes nonce;  // 32 bytes
    HostId issued_to;
    AgentId agent_id;

    Bytes encode() const;
    static Challenge decode(const Bytes& data);

    friend bool operator==(const Challenge&, const Challenge&) = default;
};

/// One route server. Mutations are gated by challenge-response: a submit
/// replaces the (agent, host) record only if the submitter signed a live
/// challenge nonce with the provider key. Rejected submits leave the state
/// untouched, pending challenges included.
class RegistryState {
public:
    explicit RegistryState(const Seed& seed) : rng_(seed) {}

    Challenge open_challenge(const HostId& host, const AgentId& agent);  // throws ChallengeInFlight

    Verdict submit(const FieldRecord& record, const Signature& challenge_sig,
                   const PublicKey& provider_key);
    Verdict submit(const FieldRecord& record, const Signature& challenge_sig,
                   const Certificate& provider_cert, const PublicKey& ca_pub);

    std::optional<FieldRecord> query(const AgentId& agent, const HostId& host) const;

    /// Provider of the most recent accepted submission for this agent.
    std::optional<HostId> last_registrant(const AgentId& agent) const;

    Digest state_hash() const;

    struct Stored {
        FieldRecord record;
        std::uint64_t seq = 0;
    };
    const std::map<std::pair<AgentId, HostId>, Stored>& records() const { return records_; }

private:
    Rng rng_;
    std::map<std::pair<AgentId, HostId>, Stored> records_;
    std::map<std::pair<HostId, AgentId>, Challenge> pending_;
    std::uint64_t next_seq_ = 1;
};

/// Replicated-RS divergence check: keys whose records differ (or exist on
/// one side only). Divergence is reported, never resolved.
std::vector<std::pair<AgentId, HostId>> compare_registries(const RegistryState& a,
                                                           const RegistryState& b);

// --- line-delimited request/response transcript ---------------------------
//
// Every operation is logged as "> <op> <hex payload>" followed by one
// "< ..." response line; the first line pins the registry seed. Replaying
// the transcript rebuilds the registry bit-exactly and surfaces every
// rejected submission, so the transcript doubles as the RS export format.

class LoggedRegistry {
public:
    explicit LoggedRegistry(const Seed& seed);

    Challenge open_challenge(const HostId& host, const AgentId& agent);
    Verdict submit(const FieldRecord& record, const Signature& challenge_sig,
                   const PublicKey& provider_key);
    Verdict submit(const FieldRecord& record, const Signature& challenge_sig,
                   const Certificate& provider_cert, const PublicKey& ca_pub);
    std::optional<FieldRecord> query(const AgentId& agent, const HostId& host);

    const RegistryState& state() const { return rs_; }
    const std::vector<std::string>& log() const { return lines_; }

private:
    RegistryState rs_;
    std::vector<std::string> lines_;
};

struct RejectedSubmit {
    AgentId agent_id;
    HostId provider;
    FailReason reason = FailReason::BadChallenge;
};

struct ReplayResult {
    RegistryState state;
    std::vector<RejectedSubmit> rejections;
};

// Re-executes a transcript against a fresh registry, checking every recorded
// response byte-for-byte. Throws DecodeError on any mismatch or malformed
// line. ca_pub is needed when the transcript contains certificate-backed
// submissions.
ReplayResult replay_registry(const std::vector<std::string>& lines,
                             const std::optional<PublicKey>& ca_pub);

}  // namespace magent
