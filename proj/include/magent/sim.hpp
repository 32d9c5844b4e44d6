#pragma once

#include <optional>

#include "magent/registry.hpp"

namespace magent {

struct SetupError : std::runtime_error {
    explicit SetupError(const std::string& what) : std::runtime_error(what) {}
};

// The attack catalog. Every kind maps to one designated detection verdict;
// the acceptance suite pins the full table.
enum class AttackKind {
    RemoveMessage,      // erase one entry; caught by the RS count
    ReplaceWithOld,     // splice a superseded entry back; caught by freshness
    CrossAgentReplay,   // splice an entry minted for another agent; caught by the code-signature crc
    TamperCodeResign,   // rewrite code, re-sign under own key; caught by key/cert checks
    Brainwash,          // wipe the data area and take over the code area
    KillAgent,          // destroy the agent; RS names the last registrant
    CloneAgent,         // release k copies; caught by id multiplicity
    MiddlemanKeySwap,   // substitute a provider's key in the distribution channel
    StaleRecordReplay,  // push an obsolete field record at the RS
    ColludingKeyTheft,  // two hosts share captured material to forge a victim's entry
};

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(std::string_view name);  // throws DecodeError

struct AttackSpec {
    AttackKind kind = AttackKind::RemoveMessage;
    HostId target_provider;          // victim, for provider-scoped kinds
    std::uint64_t target_index = 1;  // victim entry index
    std::uint32_t clone_count = 0;   // CloneAgent
    HostId partner;                  // ColludingKeyTheft
    bool swap_certificate = false;   // TamperCodeResign/Brainwash: also poison the directory

    friend bool operator==(const AttackSpec&, const AttackSpec&) = default;
};

struct HostStrategy {
    std::optional<AttackSpec> attack;  // nullopt = honest
    bool update_on_revisit = false;    // replace own earlier message instead of appending
    bool preshared_server_key = false; // knows the genuine server key out of band

    bool honest() const { return !attack.has_value(); }
    friend bool operator==(const HostStrategy&, const HostStrategy&) = default;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    EntryMode mode = EntryMode::ImprovedSigned;
    bool ca_enabled = true;
    HostId server_id = "S";
    HostId rs_id = "RS";
    std::uint32_t trip = 1;
    Bytes agent_code;  // empty: derived from the seed
    std::vector<HostId> route;
    std::map<HostId, HostStrategy> hosts;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Key distribution as the network sees it: a CA-backed certificate
/// directory, or raw keys when the CA is disabled. This is the attackable
/// channel a middleman poisons.
struct TrustBundle {
    bool ca_enabled = true;
    std::optional<PublicKey> ca_pub;
    std::map<HostId, Certificate> certs;  // used when ca_enabled
    std::map<HostId, PublicKey> keys;     // used otherwise

    struct Resolved {
        Verdict verdict;
        PublicKey key;
    };
    Resolved resolve(const HostId& host) const;

    friend bool operator==(const TrustBundle&, const TrustBundle&) = default;
};

struct SecretBundle {
    std::optional<PrivateKey> ca_priv;
    std::map<HostId, PrivateKey> host_priv;  // includes the server

    friend bool operator==(const SecretBundle&, const SecretBundle&) = default;
};

/// Ground-truth record of one attack action, for attribution checks.
struct AttackEvent {
    AttackKind kind = AttackKind::RemoveMessage;
    HostId by;
    HostId provider;          // attacked provider when provider-scoped
    std::uint64_t index = 0;  // attacked index when entry-scoped
    bool agent_scope = false; // the whole agent context was invalidated
};

struct Transcript {
    std::uint64_t seed = 0;
    std::vector<std::string> lines;
    std::vector<AttackEvent> attacks;
    std::vector<std::string> rs_lines;

    std::string serialize() const;
};

// --- audit report ---------------------------------------------------------

struct EntryVerdict {
    HostId provider;
    std::uint64_t index = 0;
    EntryMode mode = EntryMode::PlainSigned;
    Verdict verdict;
    bool unchecked = false;  // encrypted entry and no server key available
};

struct CountCheck {
    HostId provider;
    std::size_t expected = 0;
    std::size_t present = 0;
    bool ok = false;
};

struct Anomaly {
    std::string kind;  // code_failure, entry_failure, count_mismatch, erased_provider,
                       // clone_count, non_return, rejected_submit
    HostId host;
    std::uint64_t index = 0;
    std::string detail;

    friend bool operator==(const Anomaly&, const Anomaly&) = default;
};

struct BranchReport {
    AgentId id;
    Verdict code;
    std::vector<EntryVerdict> entries;
    std::vector<CountCheck> counts;
    std::vector<HostId> erased_providers;
};

struct NonReturn {
    AgentId id;
    std::optional<HostId> last_registrant;
};

struct CloneCount {
    AgentId id;
    std::size_t count = 0;
};

struct ScenarioReport {
    std::vector<BranchReport> branches;
    std::vector<CloneCount> clones;
    std::vector<NonReturn> non_returned;
    std::vector<RejectedSubmit> rejected;
    std::vector<Anomaly> anomalies;

    bool clean() const { return anomalies.empty(); }
    std::string to_json() const;  // sorted keys, no timestamps: diff-friendly
};

/// Everything the offline auditor gets: returned agents, the RS transcript,
/// the key directory, and optionally the server's private key.
struct AuditInputs {
    std::vector<Agent> observed;
    std::vector<std::string> rs_log;
    TrustBundle bundle;
    std::optional<PrivateKey> server_priv;
};

// Replays the RS transcript, then checks every observed agent: code area,
// per-entry verdicts, per-provider counts against the registered field
// records, erasure evidence, clone multiplicity, and non-returned agents.
// Every anomaly becomes a report item; nothing throws for bad protocol data.
ScenarioReport final_audit(const AuditInputs& inputs);

// --- scenario execution ------------------------------------------------

struct KeyMaterial {
    KeyPair ca;
    std::map<HostId, KeyPair> hosts;  // includes the server
};

// One seed, one reproducible set of host key pairs plus a CA pair. The CLI
// keygen and the scenario runner share this derivation.
KeyMaterial derive_key_material(const Seed& master, const std::vector<HostId>& host_ids);
TrustBundle make_bundle(const KeyMaterial& keys, bool ca_enabled);
SecretBundle make_secrets(const KeyMaterial& keys);
KeyMaterial key_material_from_bundles(const TrustBundle& bundle,
                                      const SecretBundle& secrets);  // throws SetupError

struct ScenarioOutcome {
    AgentId agent_id;
    Transcript transcript;
    std::vector<Agent> observed;
    TrustBundle bundle;   // post-scenario view (a middleman may have poisoned it)
    SecretBundle secrets;
    ScenarioReport report;
};

// Walks the agent along the route: honest hosts verify code, audit the data
// area, append one protected message and register their field record under
// challenge; attackers run their strategy. Deterministic for a fixed config.
ScenarioOutcome run_scenario(const ScenarioConfig& config);
ScenarioOutcome run_scenario(const ScenarioConfig& config, const KeyMaterial& keys);

}  // namespace magent
