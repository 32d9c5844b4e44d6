#include "magent/sim.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace magent {

namespace {

using nlohmann::json;

std::string short_digest(const Bytes& data) { return hex_encode(to_bytes(digest(data))).substr(0, 16); }

std::string agent_label(const AgentId& id) {
    return "(" + id.server_id + "," + std::to_string(id.serial) + ")";
}

json agent_json(const AgentId& id) {
    return json{{"serial", id.serial}, {"server", id.server_id}};
}

}  // namespace

std::string to_string(AttackKind kind) {
    switch (kind) {
        case AttackKind::RemoveMessage: return "remove_message";
        case AttackKind::ReplaceWithOld: return "replace_with_old";
        case AttackKind::CrossAgentReplay: return "cross_agent_replay";
        case AttackKind::TamperCodeResign: return "tamper_code_resign";
        case AttackKind::Brainwash: return "brainwash";
        case AttackKind::KillAgent: return "kill_agent";
        case AttackKind::CloneAgent: return "clone_agent";
        case AttackKind::MiddlemanKeySwap: return "middleman_key_swap";
        case AttackKind::StaleRecordReplay: return "stale_record_replay";
        case AttackKind::ColludingKeyTheft: return "colluding_key_theft";
    }
    return "unknown";
}

AttackKind attack_kind_from_string(std::string_view name) {
    for (AttackKind kind :
         {AttackKind::RemoveMessage, AttackKind::ReplaceWithOld, AttackKind::CrossAgentReplay,
          AttackKind::TamperCodeResign, AttackKind::Brainwash, AttackKind::KillAgent,
          AttackKind::CloneAgent, AttackKind::MiddlemanKeySwap, AttackKind::StaleRecordReplay,
          AttackKind::ColludingKeyTheft}) {
        if (to_string(kind) == name) return kind;
    }
    throw DecodeError("unknown attack kind: " + std::string(name));
}

TrustBundle::Resolved TrustBundle::resolve(const HostId& host) const {
    if (ca_enabled) {
        if (!ca_pub) return {Verdict::fail(FailReason::BadCertificate), {}};
        auto it = certs.find(host);
        if (it == certs.end()) return {Verdict::fail(FailReason::BadCertificate), {}};
        if (it->second.subject != host || !ca_verify(*ca_pub, it->second))
            return {Verdict::fail(FailReason::BadCertificate), {}};
        return {Verdict::pass(), it->second.subject_key};
    }
    auto it = keys.find(host);
    if (it == keys.end()) return {Verdict::fail(FailReason::BadCertificate), {}};
    return {Verdict::pass(), it->second};
}

std::string Transcript::serialize() const {
    std::string out = "# magent transcript\n";
    for (const std::string& line : lines) out += line + "\n";
    out += "# registry\n";
    for (const std::string& line : rs_lines) out += line + "\n";
    return out;
}

// --- audit -----------------------------------------------------------------

namespace {

Verdict audit_code(const Agent& agent, const TrustBundle& bundle,
                   const std::optional<PrivateKey>& server_priv) {
    const HostId& sid = agent.code_area.id.server_id;
    Verdict v;
    if (bundle.ca_enabled) {
        auto it = bundle.certs.find(sid);
        if (!bundle.ca_pub || it == bundle.certs.end())
            v = Verdict::fail(FailReason::BadCertificate);
        else
            v = verify_code(agent, it->second, *bundle.ca_pub);
    } else {
        auto it = bundle.keys.find(sid);
        v = (it == bundle.keys.end()) ? Verdict::fail(FailReason::BadCertificate)
                                      : verify_code(agent, it->second);
    }
    // the originating server recognizes its own key regardless of the
    // distribution channel
    if (v.ok && server_priv) v = verify_code(agent, public_of(*server_priv));
    return v;
}

EntryVerdict audit_entry(const DataEntry& e, const Agent& agent, const TrustBundle& bundle,
                         const RegistryState& rs, const std::optional<PrivateKey>& server_priv) {
    EntryVerdict ev;
    ev.provider = e.provider;
    ev.index = e.msg_index;
    ev.mode = e.mode;

    ProtectedEntry pe;
    try {
        pe = ProtectedEntry::decode(e.payload);
    } catch (const DecodeError&) {
        ev.verdict = Verdict::fail(FailReason::BadSignature);
        return ev;
    }
    if (pe.mode() != e.mode) {
        ev.verdict = Verdict::fail(FailReason::BadSignature);
        return ev;
    }

    TrustBundle::Resolved res = bundle.resolve(e.provider);
    if (!res.verdict.ok) {
        ev.verdict = res.verdict;
        return ev;
    }

    const std::vector<FreshnessField>* fields = nullptr;
    std::vector<FreshnessField> fields_copy;
    if (std::optional<FieldRecord> record = rs.query(agent.code_area.id, e.provider);
        record && verify_field_record(*record, res.key).ok) {
        fields_copy = record->fields;
        fields = &fields_copy;
    }

    switch (e.mode) {
        case EntryMode::PlainSigned:
            ev.verdict = verify_plain(pe, res.key);
            break;
        case EntryMode::BasicEncrypted:
            if (server_priv)
                ev.verdict = decrypt_basic(pe, *server_priv, res.key).verdict;
            else
                ev.unchecked = true;
            break;
        case EntryMode::ImprovedSigned:
            ev.verdict = improved_verify(pe, agent, res.key, fields);
            break;
        case EntryMode::ImprovedEncrypted:
            if (server_priv)
                ev.verdict = improved_decrypt(pe, agent, *server_priv, res.key, fields).verdict;
            else
                ev.unchecked = true;
            break;
        case EntryMode::PartialEncrypted:
            ev.verdict = partial_verify(pe, agent, res.key, fields);
            if (ev.verdict.ok && server_priv) {
                Opened opened = partial_decrypt(pe, *server_priv);
                if (!opened.verdict.ok) ev.verdict = opened.verdict;
            }
            break;
    }
    return ev;
}

}  // namespace

ScenarioReport final_audit(const AuditInputs& in) {
    ScenarioReport report;

    std::optional<PublicKey> ca = in.bundle.ca_enabled ? in.bundle.ca_pub : std::nullopt;
    ReplayResult replay = replay_registry(in.rs_log, ca);
    report.rejected = replay.rejections;
    for (const RejectedSubmit& r : replay.rejections) {
        report.anomalies.push_back({"rejected_submit", r.provider, 0,
                                    "record for agent " + agent_label(r.agent_id) +
                                        " rejected: " + to_string(r.reason)});
    }

    std::map<AgentId, std::size_t> clones = count_clones(in.observed);
    for (const auto& [id, n] : clones) {
        report.clones.push_back({id, n});
        if (n > 1)
            report.anomalies.push_back({"clone_count", id.server_id, n,
                                        "agent " + agent_label(id) + " observed " +
                                            std::to_string(n) + " times"});
    }

    std::set<AgentId> registered_ids;
    for (const auto& [key, stored] : replay.state.records()) registered_ids.insert(key.first);
    for (const AgentId& id : registered_ids) {
        if (clones.contains(id)) continue;
        std::optional<HostId> last = replay.state.last_registrant(id);
        report.non_returned.push_back({id, last});
        report.anomalies.push_back({"non_return", last.value_or(""), 0,
                                    "agent " + agent_label(id) +
                                        " never returned; last registrant: " +
                                        last.value_or("<none>")});
    }

    for (const Agent& agent : in.observed) {
        BranchReport br;
        br.id = agent.code_area.id;
        br.code = audit_code(agent, in.bundle, in.server_priv);
        if (!br.code.ok)
            report.anomalies.push_back(
                {"code_failure", br.id.server_id, 0, br.code.describe()});

        std::map<HostId, std::size_t> present;
        for (const DataEntry& e : agent.data_area) {
            ++present[e.provider];
            EntryVerdict ev = audit_entry(e, agent, in.bundle, replay.state, in.server_priv);
            br.entries.push_back(ev);
            if (!ev.unchecked && !ev.verdict.ok)
                report.anomalies.push_back(
                    {"entry_failure", e.provider, e.msg_index, ev.verdict.describe()});
        }

        std::set<HostId> providers;
        for (const auto& [p, n] : present) providers.insert(p);
        for (const auto& [key, stored] : replay.state.records())
            if (key.first == br.id) providers.insert(key.second);

        for (const HostId& provider : providers) {
            std::size_t expected = 0;
            bool have_record = false;
            if (std::optional<FieldRecord> record = replay.state.query(br.id, provider)) {
                TrustBundle::Resolved res = in.bundle.resolve(provider);
                if (res.verdict.ok && verify_field_record(*record, res.key).ok) {
                    expected = expected_count(*record);
                    have_record = true;
                }
            }
            std::size_t got = present.contains(provider) ? present[provider] : 0;
            CountCheck cc{provider, expected, got, expected == got};
            br.counts.push_back(cc);
            if (!cc.ok)
                report.anomalies.push_back({"count_mismatch", provider, 0,
                                            "expected " + std::to_string(expected) +
                                                " entries, found " + std::to_string(got)});
            if (have_record && got == 0) {
                br.erased_providers.push_back(provider);
                report.anomalies.push_back({"erased_provider", provider, 0,
                                            "registered record but no surviving entries"});
            }
        }
        report.branches.push_back(std::move(br));
    }
    return report;
}

std::string ScenarioReport::to_json() const {
    json j;
    j["anomalies"] = json::array();
    for (const Anomaly& a : anomalies)
        j["anomalies"].push_back(
            {{"detail", a.detail}, {"host", a.host}, {"index", a.index}, {"kind", a.kind}});

    j["branches"] = json::array();
    for (const BranchReport& br : branches) {
        json entries = json::array();
        for (const EntryVerdict& ev : br.entries)
            entries.push_back({{"index", ev.index},
                               {"mode", to_string(ev.mode)},
                               {"provider", ev.provider},
                               {"verdict", ev.unchecked ? "unchecked" : ev.verdict.describe()}});
        json counts = json::array();
        for (const CountCheck& cc : br.counts)
            counts.push_back({{"expected", cc.expected},
                              {"ok", cc.ok},
                              {"present", cc.present},
                              {"provider", cc.provider}});
        j["branches"].push_back({{"agent", agent_json(br.id)},
                                 {"code", br.code.describe()},
                                 {"counts", counts},
                                 {"entries", entries},
                                 {"erased_providers", br.erased_providers}});
    }

    j["clones"] = json::array();
    for (const CloneCount& c : clones)
        j["clones"].push_back({{"agent", agent_json(c.id)}, {"count", c.count}});

    j["non_returned"] = json::array();
    for (const NonReturn& nr : non_returned) {
        json item{{"agent", agent_json(nr.id)}};
        item["last_registrant"] = nr.last_registrant ? json(*nr.last_registrant) : json(nullptr);
        j["non_returned"].push_back(item);
    }

    j["rejected_submits"] = json::array();
    for (const RejectedSubmit& r : rejected)
        j["rejected_submits"].push_back({{"agent", agent_json(r.agent_id)},
                                         {"provider", r.provider},
                                         {"reason", to_string(r.reason)}});

    return j.dump(2) + "\n";
}

// --- scenario execution ------------------------------------------------

KeyMaterial derive_key_material(const Seed& master, const std::vector<HostId>& host_ids) {
    KeyMaterial km;
    km.ca = generate_keypair(derive_seed(master, "key/ca"), "CA");
    std::set<HostId> all(host_ids.begin(), host_ids.end());
    for (const HostId& h : all)
        km.hosts.emplace(h, generate_keypair(derive_seed(master, "key/host/" + h), h));
    return km;
}

TrustBundle make_bundle(const KeyMaterial& keys, bool ca_enabled) {
    TrustBundle bundle;
    bundle.ca_enabled = ca_enabled;
    if (ca_enabled) bundle.ca_pub = keys.ca.pub;
    for (const auto& [host, kp] : keys.hosts) {
        if (ca_enabled)
            bundle.certs[host] = ca_issue(keys.ca.priv, host, kp.pub);
        else
            bundle.keys[host] = kp.pub;
    }
    return bundle;
}

SecretBundle make_secrets(const KeyMaterial& keys) {
    SecretBundle secrets;
    secrets.ca_priv = keys.ca.priv;
    for (const auto& [host, kp] : keys.hosts) secrets.host_priv[host] = kp.priv;
    return secrets;
}

KeyMaterial key_material_from_bundles(const TrustBundle& bundle, const SecretBundle& secrets) {
    KeyMaterial km;
    if (!secrets.ca_priv) throw SetupError("secrets bundle is missing the CA private key");
    km.ca = KeyPair{public_of(*secrets.ca_priv), *secrets.ca_priv, "CA"};
    if (bundle.ca_enabled) {
        if (!bundle.ca_pub || !(*bundle.ca_pub == km.ca.pub))
            throw SetupError("bundle and secrets disagree on the CA key");
    }
    for (const auto& [host, priv] : secrets.host_priv) {
        PublicKey pub = public_of(priv);
        if (bundle.ca_enabled) {
            auto it = bundle.certs.find(host);
            if (it == bundle.certs.end() || !(it->second.subject_key == pub))
                throw SetupError("bundle and secrets disagree for host " + host);
        } else if (auto it = bundle.keys.find(host);
                   it == bundle.keys.end() || !(it->second == pub)) {
            throw SetupError("bundle and secrets disagree for host " + host);
        }
        km.hosts.emplace(host, KeyPair{pub, priv, host});
    }
    return km;
}

namespace {

struct HostRuntime {
    KeyPair kp;
    std::optional<Certificate> cert;
    HostStrategy strategy;
    FreshnessSource fresh;
    Rng msg_rng;
    Rng seal_rng;
    Rng atk_rng;
    std::map<AgentId, std::vector<FreshnessField>> fields;
    std::optional<DataEntry> stash_entry;
    std::optional<FieldRecord> stash_record;

    HostRuntime(KeyPair keypair, std::optional<Certificate> certificate, HostStrategy strat,
                const Seed& master, const HostId& host)
        : kp(std::move(keypair)),
          cert(std::move(certificate)),
          strategy(std::move(strat)),
          fresh(derive_seed(master, "fresh/" + host)),
          msg_rng(derive_seed(master, "msg/" + host)),
          seal_rng(derive_seed(master, "seal/" + host)),
          atk_rng(derive_seed(master, "atk/" + host)) {}
};

struct ProtectedMessage {
    Bytes payload;
    FreshnessField fresh;
};

ProtectedMessage protect_with(const KeyPair& signer, FreshnessSource& fresh, Rng& seal_rng,
                              const Agent& agent, EntryMode mode, const Bytes& m) {
    switch (mode) {
        case EntryMode::PlainSigned:
            return {sign_plain(signer, m).encode(), fresh.next()};
        case EntryMode::BasicEncrypted:
            return {encrypt_basic(signer, agent.server_pub, m, seal_rng).encode(), fresh.next()};
        case EntryMode::ImprovedSigned: {
            CrcBlock crc = make_crc_block(agent, fresh);
            return {improved_sign(signer, m, crc).encode(), crc.fresh};
        }
        case EntryMode::ImprovedEncrypted: {
            CrcBlock crc = make_crc_block(agent, fresh);
            return {improved_encrypt(signer, agent.server_pub, m, crc, seal_rng).encode(),
                    crc.fresh};
        }
        case EntryMode::PartialEncrypted: {
            CrcBlock crc = make_crc_block(agent, fresh);
            return {partial_encrypt(signer, agent.server_pub, m, crc, seal_rng).encode(),
                    crc.fresh};
        }
    }
    throw SetupError("unknown protection mode");
}

class ScenarioRunner {
public:
    ScenarioRunner(const ScenarioConfig& config, const KeyMaterial& keys)
        : config_(config), keys_(keys), master_(seed_from_u64(config.seed)),
          rs_(derive_seed(master_, "rs/" + config.rs_id)) {}

    ScenarioOutcome run();

private:
    void validate() const;
    void setup();
    void prepare_replay_sources();
    void walk(const Route& route);
    void honest_visit(const HostId& host, HostRuntime& rt);
    bool attack_visit(const HostId& host, HostRuntime& rt);  // true = stop the route

    Verdict host_code_check(const HostRuntime& rt) const;
    std::optional<Verdict> peer_check_entry(const DataEntry& e);
    void register_fields(const HostId& host, HostRuntime& rt);
    DataEntry* find_entry(const HostId& provider, std::uint64_t index);
    void poison_server_key(HostRuntime& rt);

    void line(const std::string& text) { transcript_.lines.push_back(text); }
    void attack_line(const AttackSpec& atk, const HostId& by, const std::string& extra) {
        std::string text = "attack kind=" + to_string(atk.kind) + " by=" + by;
        if (!extra.empty()) text += " " + extra;
        line(text);
    }

    const ScenarioConfig& config_;
    const KeyMaterial& keys_;
    Seed master_;
    LoggedRegistry rs_;
    Transcript transcript_;
    TrustBundle bundle_;
    SecretBundle secrets_;
    std::map<HostId, HostRuntime> hosts_;
    std::map<HostId, Bytes> colluder_channel_;
    std::optional<AgentMint> mint_;
    Agent agent_;
    std::uint64_t next_serial_ = 1;
    std::vector<Agent> observed_;
    bool killed_ = false;
    std::vector<Agent> branches_;
};

void ScenarioRunner::validate() const {
    if (config_.route.empty()) throw SetupError("route is empty");
    if (!keys_.hosts.contains(config_.server_id))
        throw SetupError("no key material for server " + config_.server_id);
    for (const HostId& h : config_.route) {
        if (h == config_.server_id) throw SetupError("server cannot appear on its own route");
        if (!config_.hosts.contains(h)) throw SetupError("no behavior configured for host " + h);
    }
    for (const auto& [host, strategy] : config_.hosts) {
        if (!keys_.hosts.contains(host)) throw SetupError("no key material for host " + host);
        if (!strategy.attack) continue;
        const AttackSpec& atk = *strategy.attack;
        switch (atk.kind) {
            case AttackKind::RemoveMessage:
            case AttackKind::ReplaceWithOld:
            case AttackKind::CrossAgentReplay:
            case AttackKind::MiddlemanKeySwap:
            case AttackKind::StaleRecordReplay:
                if (!config_.hosts.contains(atk.target_provider))
                    throw SetupError("attack target " + atk.target_provider + " is not a host");
                break;
            case AttackKind::CloneAgent:
                if (atk.clone_count < 1) throw SetupError("clone_agent needs clone_count >= 1");
                break;
            case AttackKind::ColludingKeyTheft:
                if (!config_.hosts.contains(atk.target_provider))
                    throw SetupError("attack target " + atk.target_provider + " is not a host");
                if (!config_.hosts.contains(atk.partner))
                    throw SetupError("colluding partner " + atk.partner + " is not a host");
                break;
            default:
                break;
        }
    }
}

void ScenarioRunner::setup() {
    bundle_.ca_enabled = config_.ca_enabled;
    secrets_.ca_priv = keys_.ca.priv;
    if (config_.ca_enabled) bundle_.ca_pub = keys_.ca.pub;

    std::set<HostId> all{config_.server_id};
    for (const auto& [host, strategy] : config_.hosts) all.insert(host);
    for (const HostId& host : all) {
        const KeyPair& kp = keys_.hosts.at(host);
        secrets_.host_priv[host] = kp.priv;
        if (config_.ca_enabled)
            bundle_.certs[host] = ca_issue(keys_.ca.priv, host, kp.pub);
        else
            bundle_.keys[host] = kp.pub;
    }

    for (const auto& [host, strategy] : config_.hosts) {
        std::optional<Certificate> cert;
        if (config_.ca_enabled) cert = bundle_.certs.at(host);
        hosts_.emplace(std::piecewise_construct, std::forward_as_tuple(host),
                       std::forward_as_tuple(keys_.hosts.at(host), cert, strategy, master_, host));
    }

    mint_.emplace(keys_.hosts.at(config_.server_id), config_.rs_id);
    Bytes code = config_.agent_code;
    if (code.empty()) code = Rng(derive_seed(master_, "code/")).bytes(48);
    agent_ = mint_->mint(code, next_serial_++, config_.trip);

    transcript_.seed = config_.seed;
    std::string route_line = "route";
    for (const HostId& h : config_.route) route_line += " " + h;
    line("scenario seed=" + std::to_string(config_.seed) + " mode=" + to_string(config_.mode) +
         " ca=" + (config_.ca_enabled ? std::string("1") : std::string("0")) +
         " server=" + config_.server_id + " rs=" + config_.rs_id +
         " trip=" + std::to_string(config_.trip));
    line(route_line);
    line("mint serial=" + std::to_string(agent_.code_area.id.serial) +
         " code_digest=" + short_digest(agent_.code_area.code));
}

// A cross-agent replay needs an entry the victim signed for a different
// agent in the past; run that interaction up front against a throwaway RS.
void ScenarioRunner::prepare_replay_sources() {
    for (auto& [host, rt] : hosts_) {
        if (!rt.strategy.attack || rt.strategy.attack->kind != AttackKind::CrossAgentReplay)
            continue;
        const AttackSpec& atk = *rt.strategy.attack;
        HostRuntime& victim = hosts_.at(atk.target_provider);
        Agent old_agent = mint_->mint(agent_.code_area.code, next_serial_++, config_.trip);
        Bytes m = to_bytes("report from " + atk.target_provider + " #1 " +
                           hex_encode(victim.msg_rng.bytes(4)));
        ProtectedMessage pm =
            protect_with(victim.kp, victim.fresh, victim.seal_rng, old_agent, config_.mode, m);
        rt.stash_entry = DataEntry{atk.target_provider, 1, config_.mode, pm.payload};
        line("prerun source_serial=" + std::to_string(old_agent.code_area.id.serial) +
             " victim=" + atk.target_provider);
    }
}

Verdict ScenarioRunner::host_code_check(const HostRuntime& rt) const {
    if (!bundle_.ca_enabled && rt.strategy.preshared_server_key)
        return verify_code(agent_, keys_.hosts.at(config_.server_id).pub);
    const HostId& sid = agent_.code_area.id.server_id;
    if (bundle_.ca_enabled) {
        auto it = bundle_.certs.find(sid);
        if (!bundle_.ca_pub || it == bundle_.certs.end())
            return Verdict::fail(FailReason::BadCertificate);
        return verify_code(agent_, it->second, *bundle_.ca_pub);
    }
    auto it = bundle_.keys.find(sid);
    if (it == bundle_.keys.end()) return Verdict::fail(FailReason::BadCertificate);
    return verify_code(agent_, it->second);
}

std::optional<Verdict> ScenarioRunner::peer_check_entry(const DataEntry& e) {
    ProtectedEntry pe;
    try {
        pe = ProtectedEntry::decode(e.payload);
    } catch (const DecodeError&) {
        return Verdict::fail(FailReason::BadSignature);
    }
    if (pe.mode() != e.mode) return Verdict::fail(FailReason::BadSignature);
    if (e.mode == EntryMode::BasicEncrypted || e.mode == EntryMode::ImprovedEncrypted)
        return std::nullopt;  // opaque to peers, only the server can check

    TrustBundle::Resolved res = bundle_.resolve(e.provider);
    if (!res.verdict.ok) return res.verdict;

    if (e.mode == EntryMode::PlainSigned) return verify_plain(pe, res.key);

    const std::vector<FreshnessField>* fields = nullptr;
    std::vector<FreshnessField> fields_copy;
    if (std::optional<FieldRecord> record = rs_.query(agent_.code_area.id, e.provider);
        record && verify_field_record(*record, res.key).ok) {
        fields_copy = record->fields;
        fields = &fields_copy;
    }
    if (e.mode == EntryMode::ImprovedSigned)
        return improved_verify(pe, agent_, res.key, fields);
    return partial_verify(pe, agent_, res.key, fields);
}

void ScenarioRunner::register_fields(const HostId& host, HostRuntime& rt) {
    const AgentId& id = agent_.code_area.id;
    FieldRecord record = build_field_record(rt.kp, id, rt.fields.at(id));
    Verdict verdict;
    try {
        Challenge challenge = rs_.open_challenge(host, id);
        Signature challenge_sig = sign(rt.kp.priv, challenge.nonce);
        verdict = bundle_.ca_enabled
                      ? rs_.submit(record, challenge_sig, *rt.cert, keys_.ca.pub)
                      : rs_.submit(record, challenge_sig, rt.kp.pub);
    } catch (const ChallengeInFlight&) {
        // someone left a challenge dangling in our name; skip this round
        verdict = Verdict::fail(FailReason::BadChallenge);
    }
    line("register host=" + host + " fields=" + std::to_string(record.fields.size()) +
         " verdict=" + verdict.describe());
}

DataEntry* ScenarioRunner::find_entry(const HostId& provider, std::uint64_t index) {
    for (DataEntry& e : agent_.data_area)
        if (e.provider == provider && e.msg_index == index) return &e;
    return nullptr;
}

void ScenarioRunner::honest_visit(const HostId& host, HostRuntime& rt) {
    Verdict code = host_code_check(rt);
    line("code_check host=" + host + " verdict=" + code.describe());
    if (!code.ok) {
        line("refuse host=" + host);
        return;
    }

    for (const DataEntry& e : agent_.data_area) {
        if (std::optional<Verdict> v = peer_check_entry(e))
            line("peer_audit host=" + host + " provider=" + e.provider +
                 " index=" + std::to_string(e.msg_index) + " verdict=" + v->describe());
    }

    const AgentId& id = agent_.code_area.id;
    std::vector<FreshnessField>& fields = rt.fields[id];
    std::uint64_t mine = agent_.max_index(host);

    DataEntry* own_first = find_entry(host, 1);
    if (mine > 0 && rt.strategy.update_on_revisit && own_first != nullptr) {
        Bytes m = to_bytes("update from " + host + " #1 " + hex_encode(rt.msg_rng.bytes(4)));
        ProtectedMessage pm = protect_with(rt.kp, rt.fresh, rt.seal_rng, agent_, config_.mode, m);
        own_first->mode = config_.mode;
        own_first->payload = pm.payload;
        fields[0] = pm.fresh;
        line("update host=" + host + " index=1 mode=" + to_string(config_.mode) +
             " payload_digest=" + short_digest(pm.payload));
    } else {
        std::uint64_t idx = mine + 1;
        Bytes m = to_bytes("report from " + host + " #" + std::to_string(idx) + " " +
                           hex_encode(rt.msg_rng.bytes(4)));
        ProtectedMessage pm = protect_with(rt.kp, rt.fresh, rt.seal_rng, agent_, config_.mode, m);
        agent_ = append_entry(std::move(agent_), DataEntry{host, idx, config_.mode, pm.payload});
        fields.push_back(pm.fresh);
        line("append host=" + host + " index=" + std::to_string(idx) +
             " mode=" + to_string(config_.mode) + " payload_digest=" + short_digest(pm.payload));
    }

    register_fields(host, rt);
}

void ScenarioRunner::poison_server_key(HostRuntime& rt) {
    const AttackSpec& atk = *rt.strategy.attack;
    if (!atk.swap_certificate) return;
    if (bundle_.ca_enabled) {
        KeyPair rogue_ca = generate_keypair(rt.atk_rng.seed32(), "rogue-ca");
        bundle_.certs[config_.server_id] = ca_issue(rogue_ca.priv, config_.server_id, rt.kp.pub);
    } else {
        bundle_.keys[config_.server_id] = rt.kp.pub;
    }
}

bool ScenarioRunner::attack_visit(const HostId& host, HostRuntime& rt) {
    const AttackSpec& atk = *rt.strategy.attack;
    switch (atk.kind) {
        case AttackKind::RemoveMessage: {
            DataEntry* target = find_entry(atk.target_provider, atk.target_index);
            if (target == nullptr) {
                attack_line(atk, host, "target_missing=1");
                return false;
            }
            agent_.data_area.erase(agent_.data_area.begin() +
                                   (target - agent_.data_area.data()));
            attack_line(atk, host, "provider=" + atk.target_provider +
                                       " index=" + std::to_string(atk.target_index));
            transcript_.attacks.push_back(
                {atk.kind, host, atk.target_provider, atk.target_index, false});
            return false;
        }
        case AttackKind::ReplaceWithOld: {
            DataEntry* target = find_entry(atk.target_provider, atk.target_index);
            if (target == nullptr) {
                attack_line(atk, host, "target_missing=1");
                return false;
            }
            if (!rt.stash_entry) {
                rt.stash_entry = *target;
                attack_line(atk, host, "phase=stash provider=" + atk.target_provider +
                                           " index=" + std::to_string(atk.target_index));
                return false;
            }
            target->mode = rt.stash_entry->mode;
            target->payload = rt.stash_entry->payload;
            attack_line(atk, host, "phase=splice provider=" + atk.target_provider +
                                       " index=" + std::to_string(atk.target_index));
            transcript_.attacks.push_back(
                {atk.kind, host, atk.target_provider, atk.target_index, false});
            return false;
        }
        case AttackKind::CrossAgentReplay: {
            DataEntry* target = find_entry(atk.target_provider, atk.target_index);
            if (target == nullptr || !rt.stash_entry) {
                attack_line(atk, host, "target_missing=1");
                return false;
            }
            target->mode = rt.stash_entry->mode;
            target->payload = rt.stash_entry->payload;
            attack_line(atk, host, "provider=" + atk.target_provider +
                                       " index=" + std::to_string(atk.target_index));
            transcript_.attacks.push_back(
                {atk.kind, host, atk.target_provider, atk.target_index, false});
            return false;
        }
        case AttackKind::TamperCodeResign: {
            Bytes patch = to_bytes(" [patched by " + host + "]");
            agent_.code_area.code.insert(agent_.code_area.code.end(), patch.begin(), patch.end());
            agent_.server_pub = rt.kp.pub;
            agent_.code_signature = sign(rt.kp.priv, agent_.code_area.encode());
            poison_server_key(rt);
            attack_line(atk, host,
                        atk.swap_certificate ? "swap_certificate=1" : "swap_certificate=0");
            transcript_.attacks.push_back({atk.kind, host, {}, 0, true});
            return false;
        }
        case AttackKind::Brainwash: {
            agent_.data_area.clear();
            Bytes patch = to_bytes(" [rereleased by " + host + "]");
            agent_.code_area.code.insert(agent_.code_area.code.end(), patch.begin(), patch.end());
            agent_.server_pub = rt.kp.pub;
            agent_.code_signature = sign(rt.kp.priv, agent_.code_area.encode());
            poison_server_key(rt);
            attack_line(atk, host,
                        atk.swap_certificate ? "swap_certificate=1" : "swap_certificate=0");
            transcript_.attacks.push_back({atk.kind, host, {}, 0, true});
            return false;
        }
        case AttackKind::KillAgent: {
            honest_visit(host, rt);  // masquerade as a normal hop, then destroy
            attack_line(atk, host, "");
            transcript_.attacks.push_back({atk.kind, host, {}, 0, true});
            killed_ = true;
            return true;
        }
        case AttackKind::CloneAgent: {
            for (std::uint32_t i = 0; i < atk.clone_count; ++i) branches_.push_back(agent_);
            attack_line(atk, host, "count=" + std::to_string(atk.clone_count));
            transcript_.attacks.push_back({atk.kind, host, {}, 0, true});
            return true;
        }
        case AttackKind::MiddlemanKeySwap: {
            const HostId& victim = atk.target_provider;
            KeyPair rogue = generate_keypair(rt.atk_rng.seed32(), victim);

            DataEntry* target = find_entry(victim, atk.target_index);
            if (target == nullptr) {
                attack_line(atk, host, "target_missing=1");
                return false;
            }
            Bytes m = to_bytes("forged for " + victim + " by " + host + " " +
                               hex_encode(rt.atk_rng.bytes(4)));
            ProtectedMessage pm =
                protect_with(rogue, rt.fresh, rt.seal_rng, agent_, config_.mode, m);
            target->mode = config_.mode;
            target->payload = pm.payload;

            // swap the victim's key in the distribution channel
            if (bundle_.ca_enabled) {
                KeyPair rogue_ca = generate_keypair(rt.atk_rng.seed32(), "rogue-ca");
                bundle_.certs[victim] = ca_issue(rogue_ca.priv, victim, rogue.pub);
            } else {
                bundle_.keys[victim] = rogue.pub;
            }

            // try to pass the rogue fields off as the victim's at the RS
            const AgentId& id = agent_.code_area.id;
            std::vector<FreshnessField> forged_fields;
            if (std::optional<FieldRecord> current = rs_.query(id, victim)) {
                forged_fields = current->fields;
                if (atk.target_index >= 1 && atk.target_index <= forged_fields.size())
                    forged_fields[atk.target_index - 1] = pm.fresh;
                else
                    forged_fields.push_back(pm.fresh);
            } else {
                forged_fields.push_back(pm.fresh);
            }
            KeyPair rogue_as_victim = rogue;
            rogue_as_victim.owner = victim;
            FieldRecord forged_record = build_field_record(rogue_as_victim, id, forged_fields);
            Verdict sub;
            try {
                Challenge challenge = rs_.open_challenge(victim, id);
                Signature challenge_sig = sign(rogue.priv, challenge.nonce);
                if (bundle_.ca_enabled)
                    sub = rs_.submit(forged_record, challenge_sig, bundle_.certs.at(victim),
                                     keys_.ca.pub);
                else
                    sub = rs_.submit(forged_record, challenge_sig, rogue.pub);
            } catch (const ChallengeInFlight&) {
                sub = Verdict::fail(FailReason::BadChallenge);
            }
            attack_line(atk, host, "provider=" + victim + " index=" +
                                       std::to_string(atk.target_index) +
                                       " rs_verdict=" + sub.describe());
            transcript_.attacks.push_back({atk.kind, host, victim, atk.target_index, false});
            return false;
        }
        case AttackKind::StaleRecordReplay: {
            const HostId& victim = atk.target_provider;
            const AgentId& id = agent_.code_area.id;
            if (!rt.stash_record) {
                if (std::optional<FieldRecord> record = rs_.query(id, victim)) {
                    rt.stash_record = record;
                    attack_line(atk, host, "phase=stash provider=" + victim);
                } else {
                    attack_line(atk, host, "target_missing=1");
                }
                return false;
            }
            // straight replay, no live challenge: the RS must bounce it
            Signature junk_sig = sign(rt.kp.priv, rt.stash_record->signature);
            Verdict sub;
            if (bundle_.ca_enabled)
                sub = rs_.submit(*rt.stash_record, junk_sig, bundle_.certs.at(victim),
                                 keys_.ca.pub);
            else
                sub = rs_.submit(*rt.stash_record, junk_sig, bundle_.keys.at(victim));
            attack_line(atk, host,
                        "phase=replay provider=" + victim + " rs_verdict=" + sub.describe());
            transcript_.attacks.push_back({atk.kind, host, victim, 0, false});
            return false;
        }
        case AttackKind::ColludingKeyTheft: {
            if (auto stolen = colluder_channel_.find(host); stolen != colluder_channel_.end()) {
                // second colluder: all it ever received is public material,
                // so the forgery has to be signed with its own key
                const HostId& victim = atk.target_provider;
                DataEntry* target = find_entry(victim, atk.target_index);
                if (target == nullptr) {
                    attack_line(atk, host, "target_missing=1");
                    return false;
                }
                Bytes m = to_bytes("forged for " + victim + " by " + host + " " +
                                   hex_encode(rt.atk_rng.bytes(4)));
                ProtectedMessage pm =
                    protect_with(rt.kp, rt.fresh, rt.seal_rng, agent_, config_.mode, m);
                target->mode = config_.mode;
                target->payload = pm.payload;
                attack_line(atk, host, "phase=forge provider=" + victim +
                                           " index=" + std::to_string(atk.target_index));
                transcript_.attacks.push_back(
                    {atk.kind, host, victim, atk.target_index, false});
            } else {
                colluder_channel_[atk.partner] = agent_.encode();
                attack_line(atk, host, "phase=capture partner=" + atk.partner);
            }
            return false;
        }
    }
    return false;
}

void ScenarioRunner::walk(const Route& route) {
    for (std::size_t hop = 0; hop < route.hosts.size(); ++hop) {
        const HostId& host = route.hosts[hop];
        HostRuntime& rt = hosts_.at(host);
        line("arrival hop=" + std::to_string(hop + 1) + " host=" + host);
        if (rt.strategy.honest()) {
            honest_visit(host, rt);
        } else if (attack_visit(host, rt)) {
            break;
        }
    }
    if (killed_)
        observed_.clear();
    else if (!branches_.empty())
        observed_ = branches_;
    else
        observed_ = {agent_};
    line("return agents=" + std::to_string(observed_.size()));
}

ScenarioOutcome ScenarioRunner::run() {
    validate();
    setup();
    prepare_replay_sources();
    walk(Route{config_.route, config_.trip});

    AuditInputs inputs{observed_, rs_.log(), bundle_,
                       secrets_.host_priv.at(config_.server_id)};
    ScenarioReport report = final_audit(inputs);

    line("audit anomalies=" + std::to_string(report.anomalies.size()));
    for (const Anomaly& a : report.anomalies)
        line("anomaly kind=" + a.kind + " host=" + a.host + " index=" + std::to_string(a.index) +
             " detail=" + a.detail);
    transcript_.rs_lines = rs_.log();

    ScenarioOutcome outcome;
    outcome.agent_id = AgentId{config_.server_id, 1};
    outcome.transcript = std::move(transcript_);
    outcome.observed = std::move(observed_);
    outcome.bundle = std::move(bundle_);
    outcome.secrets = std::move(secrets_);
    outcome.report = std::move(report);
    return outcome;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& config, const KeyMaterial& keys) {
    ScenarioRunner runner(config, keys);
    return runner.run();
}

ScenarioOutcome run_scenario(const ScenarioConfig& config) {
    Seed master = seed_from_u64(config.seed);
    std::vector<HostId> ids{config.server_id};
    for (const auto& [host, strategy] : config.hosts) ids.push_back(host);
    KeyMaterial keys = derive_key_material(master, ids);
    return run_scenario(config, keys);
}

}  // namespace magent
