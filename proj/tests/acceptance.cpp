// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Everything is seeded, so a failure reproduces exactly.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "magent/scenario.hpp"

using namespace magent;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int num, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", num, name, detail.c_str());
    if (!ok) ++g_failures;
}

ScenarioConfig honest_config(std::uint64_t seed, EntryMode mode, std::size_t n_hosts) {
    ScenarioConfig c;
    c.seed = seed;
    c.mode = mode;
    for (std::size_t i = 1; i <= n_hosts; ++i) {
        HostId h = "H" + std::to_string(i);
        c.route.push_back(h);
        c.hosts[h] = HostStrategy{};
    }
    return c;
}

HostStrategy attacker(AttackSpec spec) {
    HostStrategy s;
    s.attack = std::move(spec);
    return s;
}

bool attributable(const ScenarioReport& r, const std::vector<AttackEvent>& attacks) {
    for (const Anomaly& a : r.anomalies) {
        bool covered = false;
        for (const AttackEvent& ev : attacks)
            if (ev.agent_scope || ev.provider == a.host) covered = true;
        if (!covered) return false;
    }
    return true;
}

bool has_anomaly(const ScenarioReport& r, const std::string& kind, const std::string& detail) {
    for (const Anomaly& a : r.anomalies)
        if (a.kind == kind && (detail.empty() || a.detail == detail)) return true;
    return false;
}

// ---- criterion 1: per-mode round trips ------------------------------------

void criterion_round_trips() {
    int bad = 0, total = 0;
    for (EntryMode mode : kAllModes) {
        for (std::uint64_t trial = 0; trial < 200; ++trial) {
            Seed base = derive_seed(seed_from_u64(trial), "c1/" + to_string(mode));
            Rng rng(base);
            KeyPair server = generate_keypair(derive_seed(base, "server"), "S");
            KeyPair host = generate_keypair(derive_seed(base, "host"), "H");
            AgentMint mint(server, "RS");
            Agent agent = mint.mint(rng.bytes(1 + rng.below(64)), 1 + rng.below(1000), 1);
            Bytes m = rng.bytes(rng.below(1025));
            FreshnessSource fresh(derive_seed(base, "fresh"));

            ++total;
            bool ok = false;
            switch (mode) {
                case EntryMode::PlainSigned: {
                    ProtectedEntry e = sign_plain(host, m);
                    ok = verify_plain(e, host.pub).ok &&
                         std::get<PlainSigned>(e.body).message == m;
                    break;
                }
                case EntryMode::BasicEncrypted: {
                    ProtectedEntry e = encrypt_basic(host, server.pub, m, rng);
                    Opened o = decrypt_basic(e, server.priv, host.pub);
                    ok = o.verdict.ok && o.plaintext == m;
                    break;
                }
                case EntryMode::ImprovedSigned: {
                    ProtectedEntry e = improved_sign(host, agent, m, fresh);
                    std::vector<FreshnessField> reg{std::get<ImprovedSigned>(e.body).crc.fresh};
                    Verdict v = improved_verify(e, agent, host.pub, &reg);
                    ok = v.ok && !v.freshness_unchecked &&
                         std::get<ImprovedSigned>(e.body).message == m;
                    break;
                }
                case EntryMode::ImprovedEncrypted: {
                    CrcBlock crc = make_crc_block(agent, fresh);
                    ProtectedEntry e = improved_encrypt(host, server.pub, m, crc, rng);
                    std::vector<FreshnessField> reg{crc.fresh};
                    Opened o = improved_decrypt(e, agent, server.priv, host.pub, &reg);
                    ok = o.verdict.ok && o.plaintext == m;
                    break;
                }
                case EntryMode::PartialEncrypted: {
                    CrcBlock crc = make_crc_block(agent, fresh);
                    ProtectedEntry e = partial_encrypt(host, server.pub, m, crc, rng);
                    std::vector<FreshnessField> reg{crc.fresh};
                    Opened o = partial_decrypt(e, server.priv);
                    ok = partial_verify(e, agent, host.pub, &reg).ok && o.verdict.ok &&
                         o.plaintext == m;
                    break;
                }
            }
            if (!ok) ++bad;
        }
    }
    report(1, "round-trip suite, 200 triples per mode", bad == 0,
           std::to_string(total - bad) + "/" + std::to_string(total) + " recovered byte-exact");
}

// ---- criterion 2: basic scheme vs stepwise composition ---------------------

void criterion_oracle_equivalence() {
    int bad = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        Seed base = derive_seed(seed_from_u64(trial), "c2");
        Rng rng(base);
        KeyPair server = generate_keypair(derive_seed(base, "server"), "S");
        KeyPair host = generate_keypair(derive_seed(base, "host"), "H");
        Bytes m = rng.bytes(rng.below(512));

        Rng scheme_rng(derive_seed(base, "seal"));
        Rng manual_rng(derive_seed(base, "seal"));

        ProtectedEntry e = encrypt_basic(host, server.pub, m, scheme_rng);
        const Ciphertext& c = std::get<BasicEncrypted>(e.body).ciphertext;

        Signature sig = sign(host.priv, m);
        Bytes blob = Encoder{}.field(m).field(sig).take();
        Ciphertext manual = pk_encrypt(server.pub, blob, manual_rng);

        bool ok = c == manual;
        std::optional<Bytes> unwrapped = pk_decrypt(server.priv, c);
        ok = ok && unwrapped && *unwrapped == blob;
        if (ok) {
            Decoder dec(*unwrapped);
            Bytes m2 = dec.field();
            Signature sig2 = dec.field();
            ok = m2 == m && sig2 == sig && verify(host.pub, m2, sig2) &&
                 decrypt_basic(e, server.priv, host.pub).plaintext == m;
        }
        if (!ok) ++bad;
    }
    report(2, "basic scheme equals stepwise primitive composition", bad == 0,
           std::to_string(100 - bad) + "/100 byte-compared at every stage");
}

// ---- criterion 3: binding sweep -------------------------------------------

void criterion_binding_sweep() {
    int detected = 0, total = 0;
    for (EntryMode mode : {EntryMode::ImprovedSigned, EntryMode::PartialEncrypted}) {
        for (int mutation = 0; mutation < 6; ++mutation) {
            for (std::uint64_t trial = 0; trial < 50; ++trial) {
                Seed base = derive_seed(seed_from_u64(trial * 6 + mutation),
                                        "c3/" + to_string(mode));
                Rng rng(base);
                KeyPair ca = generate_keypair(derive_seed(base, "ca"), "CA");
                KeyPair server = generate_keypair(derive_seed(base, "server"), "S");
                KeyPair host = generate_keypair(derive_seed(base, "host"), "H");
                Certificate server_cert = ca_issue(ca.priv, "S", server.pub);
                AgentMint mint(server, "RS");
                Agent agent = mint.mint(rng.bytes(8 + rng.below(32)), 1 + rng.below(100), 1);
                Bytes m = rng.bytes(1 + rng.below(256));
                FreshnessSource fresh(derive_seed(base, "fresh"));

                CrcBlock crc = make_crc_block(agent, fresh);
                ProtectedEntry entry = mode == EntryMode::ImprovedSigned
                                           ? improved_sign(host, m, crc)
                                           : partial_encrypt(host, server.pub, m, crc, rng);
                std::vector<FreshnessField> reg{crc.fresh};

                Agent a = agent;
                ProtectedEntry e = entry;
                switch (mutation) {
                    case 0: a.code_area.code[rng.below(a.code_area.code.size())] ^= 0x01; break;
                    case 1: a.code_area.id.serial ^= (1ull << rng.below(16)); break;
                    case 2:
                        a.server_pub = generate_keypair(derive_seed(base, "other")).pub;
                        break;
                    case 3: a.code_signature[rng.below(a.code_signature.size())] ^= 0x01; break;
                    case 4:
                        if (mode == EntryMode::ImprovedSigned)
                            std::get<ImprovedSigned>(e.body).crc.fresh.nonce[rng.below(16)] ^= 1;
                        else
                            std::get<PartialEncrypted>(e.body).crc.fresh.nonce[rng.below(16)] ^= 1;
                        break;
                    default:
                        if (mode == EntryMode::ImprovedSigned) {
                            auto& b = std::get<ImprovedSigned>(e.body);
                            b.message[rng.below(b.message.size())] ^= 0x01;
                        } else {
                            auto& b = std::get<PartialEncrypted>(e.body);
                            b.inner[rng.below(b.inner.size())] ^= 0x01;
                        }
                        break;
                }

                bool code_ok = verify_code(a, server_cert, ca.pub).ok;
                Verdict entry_v = mode == EntryMode::ImprovedSigned
                                      ? improved_verify(e, a, host.pub, &reg)
                                      : partial_verify(e, a, host.pub, &reg);
                ++total;
                if (!(code_ok && entry_v.ok)) ++detected;
            }
        }
    }
    report(3, "binding sweep, 6 mutation classes x 50 trials x 2 modes", detected == total,
           std::to_string(detected) + "/" + std::to_string(total) + " mutations detected");
}

// ---- criterion 4: the attack catalog ---------------------------------------

constexpr EntryMode kCrcModes[] = {EntryMode::ImprovedSigned, EntryMode::ImprovedEncrypted,
                                   EntryMode::PartialEncrypted};

void criterion_attack_catalog() {
    struct Row {
        const char* name;
        int hits = 0;
    };
    std::vector<Row> rows;
    bool all_ok = true;
    const int kTrials = 20;

    auto tally = [&](const char* name, auto scenario_of, auto detected) {
        Row row{name, 0};
        for (std::uint64_t t = 0; t < kTrials; ++t) {
            ScenarioOutcome out = run_scenario(scenario_of(t));
            if (detected(out) && attributable(out.report, out.transcript.attacks)) ++row.hits;
        }
        if (row.hits != kTrials) all_ok = false;
        rows.push_back(row);
    };

    tally(
        "remove_message",
        [](std::uint64_t t) {
            ScenarioConfig c = honest_config(9100 + t, kAllModes[t % 5], 2);
            c.route = {"H1", "M", "H2"};
            c.hosts["M"] = attacker({AttackKind::RemoveMessage, "H1", 1, 0, "", false});
            return c;
        },
        [](const ScenarioOutcome& o) { return has_anomaly(o.report, "count_mismatch", ""); });

    tally(
        "replace_with_old",
        [](std::uint64_t t) {
            ScenarioConfig c = honest_config(9200 + t, kCrcModes[t % 3], 1);
            c.route = {"V", "M", "V", "M"};
            c.hosts.clear();
            HostStrategy victim;
            victim.update_on_revisit = true;
            c.hosts["V"] = victim;
            c.hosts["M"] = attacker({AttackKind::ReplaceWithOld, "V", 1, 0, "", false});
            return c;
        },
        [](const ScenarioOutcome& o) {
            return has_anomaly(o.report, "entry_failure", "fail:StaleField");
        });

    tally(
        "cross_agent_replay",
        [](std::uint64_t t) {
            ScenarioConfig c = honest_config(9300 + t, kCrcModes[t % 3], 2);
            c.route = {"V", "M", "H2"};
            c.hosts["V"] = HostStrategy{};
            c.hosts["M"] = attacker({AttackKind::CrossAgentReplay, "V", 1, 0, "", false});
            return c;
        },
        [](const ScenarioOutcome& o) {
            return has_anomaly(o.report, "entry_failure", "fail:CrcMismatch");
        });

    tally(
        "tamper_code_resign",
        [](std::uint64_t t) {
            ScenarioConfig c = honest_config(9400 + t, kAllModes[t % 5], 2);
            c.route = {"H1", "M", "H2"};
            c.hosts["M"] = attacker({AttackKind::TamperCodeResign, "", 1, 0, "", t % 2 == 1});
            return c;
        },
        [](const ScenarioOutcome& o) {
            return has_anomaly(o.report, "code_failure", "fail:KeyMismatch") ||
                   has_anomaly(o.report, "code_failure", "fail:BadCertificate");
        });

    tally(
        "brainwash",
        [](std::uint64_t t) {
            ScenarioConfig c = honest_config(9500 + t, kAllModes[t % 5], 3);
            c.route = {"H1", "M", "H2", "H3"};
            c.hosts["M"] = attacker({AttackKind::Brainwash, "", 1, 0, "", false});
            return c;
        },
        [](const ScenarioOutcome& o) {
            bool refused_at_next_hop = false;
            for (const std::string& l : o.transcript.lines)
                if (l.rfind("code_check host=H2 verdict=fail", 0) == 0) refused_at_next_hop = true;
            return refused_at_next_hop && has_anomaly(o.report, "code_failure", "") &&
                   has_anomaly(o.report, "erased_provider", "");
        });

    tally(
        "kill_agent",
        [](std::uint64_t t) {
            ScenarioConfig c = honest_config(9600 + t, kAllModes[t % 5], 3);
            c.route = {"H1", "M", "H2", "H3"};
            c.hosts["M"] = attacker({AttackKind::KillAgent, "", 1, 0, "", false});
            return c;
        },
        [](const ScenarioOutcome& o) {
            return o.observed.empty() && o.report.non_returned.size() == 1 &&
                   o.report.non_returned[0].last_registrant == "M";
        });

    tally(
        "clone_agent",
        [](std::uint64_t t) {
            ScenarioConfig c = honest_config(9700 + t, kAllModes[t % 5], 2);
            c.route = {"H1", "M", "H2"};
            c.hosts["M"] = attacker(
                {AttackKind::CloneAgent, "", 1, static_cast<std::uint32_t>(2 + t % 4), "", false});
            return c;
        },
        [](const ScenarioOutcome& o) {
            std::size_t k = o.observed.size();
            return k >= 2 && o.report.clones.size() == 1 && o.report.clones[0].count == k &&
                   has_anomaly(o.report, "clone_count", "");
        });

    tally(
        "middleman_key_swap (CA on)",
        [](std::uint64_t t) {
            ScenarioConfig c = honest_config(9800 + t, kCrcModes[t % 3], 2);
            c.route = {"V", "M", "H2"};
            c.hosts["V"] = HostStrategy{};
            c.hosts["M"] = attacker({AttackKind::MiddlemanKeySwap, "V", 1, 0, "", false});
            return c;
        },
        [](const ScenarioOutcome& o) {
            return has_anomaly(o.report, "entry_failure", "fail:BadCertificate") &&
                   !o.report.rejected.empty() &&
                   o.report.rejected[0].reason == FailReason::BadCertificate;
        });

    tally(
        "stale_record_replay",
        [](std::uint64_t t) {
            ScenarioConfig c = honest_config(9900 + t, kCrcModes[t % 3], 1);
            c.route = {"V", "M", "V", "M"};
            c.hosts.clear();
            HostStrategy victim;
            victim.update_on_revisit = true;
            c.hosts["V"] = victim;
            c.hosts["M"] = attacker({AttackKind::StaleRecordReplay, "V", 1, 0, "", false});
            return c;
        },
        [](const ScenarioOutcome& o) {
            // the rejected replay is the only anomaly: the registry still
            // serves the current record and every entry verifies against it
            bool registry_intact = true;
            for (const BranchReport& br : o.report.branches) {
                for (const EntryVerdict& ev : br.entries)
                    if (!ev.unchecked && !ev.verdict.ok) registry_intact = false;
                for (const CountCheck& cc : br.counts)
                    if (!cc.ok) registry_intact = false;
            }
            return o.report.rejected.size() == 1 &&
                   o.report.rejected[0].reason == FailReason::BadChallenge && registry_intact &&
                   o.report.anomalies.size() == 1;
        });

    tally(
        "colluding_key_theft",
        [](std::uint64_t t) {
            ScenarioConfig c = honest_config(10000 + t, kAllModes[t % 5], 2);
            c.route = {"H1", "C1", "V", "C2", "H2"};
            c.hosts["V"] = HostStrategy{};
            c.hosts["C1"] = attacker({AttackKind::ColludingKeyTheft, "V", 1, 0, "C2", false});
            c.hosts["C2"] = attacker({AttackKind::ColludingKeyTheft, "V", 1, 0, "C1", false});
            return c;
        },
        [](const ScenarioOutcome& o) {
            // zero forged-entry acceptance, and both the earlier and the
            // later honest messages still verify
            bool forged_rejected = false, honest_ok = true;
            for (const BranchReport& br : o.report.branches) {
                for (const EntryVerdict& ev : br.entries) {
                    if (ev.provider == "V") {
                        if (!ev.unchecked && !ev.verdict.ok) forged_rejected = true;
                    } else if (!ev.unchecked && !ev.verdict.ok) {
                        honest_ok = false;
                    }
                }
            }
            return forged_rejected && honest_ok;
        });

    std::string detail;
    for (const Row& row : rows)
        detail += std::string(row.name) + " " + std::to_string(row.hits) + "/20; ";
    report(4, "attack catalog, 20 seeded trials per kind", all_ok, detail);
}

// ---- criterion 5: the CA necessity demonstration ---------------------------

void criterion_ca_necessity() {
    int good = 0;
    const int kTrials = 10;
    for (std::uint64_t t = 0; t < kTrials; ++t) {
        ScenarioConfig c = honest_config(11000 + t, kCrcModes[t % 3], 2);
        c.route = {"V", "M", "H2"};
        c.hosts["V"] = HostStrategy{};
        c.hosts["M"] = attacker({AttackKind::MiddlemanKeySwap, "V", 1, 0, "", false});

        c.ca_enabled = false;
        ScenarioOutcome off = run_scenario(c);
        bool forged_passes = off.report.clean();
        for (const BranchReport& br : off.report.branches)
            for (const EntryVerdict& ev : br.entries)
                if (ev.provider == "V" && !ev.unchecked && !ev.verdict.ok) forged_passes = false;

        c.ca_enabled = true;
        ScenarioOutcome on = run_scenario(c);
        bool caught = has_anomaly(on.report, "entry_failure", "fail:BadCertificate");

        if (forged_passes && caught) ++good;
    }
    report(5, "middleman forgery passes without a CA, fails with one", good == kTrials,
           std::to_string(good) + "/" + std::to_string(kTrials) + " seed pairs demonstrated");
}

// ---- criterion 6: honest soundness -----------------------------------------

void criterion_honest_soundness() {
    int clean_runs = 0, total = 0;
    for (EntryMode mode : kAllModes) {
        for (std::size_t len = 1; len <= 6; ++len) {
            for (std::uint64_t s = 0; s < 25; ++s) {
                Seed base = derive_seed(seed_from_u64(12000 + s), "c6/" + to_string(mode) + "/" +
                                                                      std::to_string(len));
                Rng rng(base);
                std::size_t pool = 1 + rng.below(len);  // small pools force revisits
                ScenarioConfig c;
                c.seed = 12000 + s * 131 + len;
                c.mode = mode;
                for (std::size_t i = 0; i < pool; ++i) c.hosts["H" + std::to_string(i + 1)] = {};
                for (std::size_t i = 0; i < len; ++i)
                    c.route.push_back("H" + std::to_string(1 + rng.below(pool)));

                ScenarioOutcome out = run_scenario(c);
                ++total;
                if (out.report.clean() && out.transcript.attacks.empty()) ++clean_runs;
            }
        }
    }
    report(6, "honest soundness, all modes x lengths 1-6 x 25 seeds", clean_runs == total,
           std::to_string(clean_runs) + "/" + std::to_string(total) +
               " runs with zero anomalies and zero false attributions");
}

// ---- criterion 7: byte-identical replay through the CLI --------------------

int run_cli(const std::string& args) {
    std::string cmd = std::string(MAGENT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

void criterion_determinism() {
    fs::path dir = fs::temp_directory_path() / ("magent_accept_" + std::to_string(getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);

    std::vector<ScenarioConfig> configs;
    configs.push_back(honest_config(13001, EntryMode::ImprovedEncrypted, 4));
    {
        ScenarioConfig c = honest_config(13002, EntryMode::PartialEncrypted, 2);
        c.route = {"H1", "M", "H2"};
        c.hosts["M"] = attacker({AttackKind::KillAgent, "", 1, 0, "", false});
        configs.push_back(c);
    }
    {
        ScenarioConfig c = honest_config(13003, EntryMode::ImprovedSigned, 2);
        c.route = {"H1", "M", "H2"};
        c.hosts["M"] = attacker({AttackKind::CloneAgent, "", 1, 3, "", false});
        configs.push_back(c);
    }
    {
        ScenarioConfig c = honest_config(13004, EntryMode::ImprovedSigned, 2);
        c.route = {"V", "M", "H2"};
        c.hosts["V"] = HostStrategy{};
        c.hosts["M"] = attacker({AttackKind::MiddlemanKeySwap, "V", 1, 0, "", false});
        configs.push_back(c);
    }

    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        fs::path cfg = dir / ("config" + std::to_string(i) + ".json");
        write_file(cfg, serialize_config(configs[i]));
        fs::path one = dir / ("one" + std::to_string(i));
        fs::path two = dir / ("two" + std::to_string(i));
        int rc1 = run_cli("run --config " + cfg.string() + " --out-dir " + one.string());
        int rc2 = run_cli("run --config " + cfg.string() + " --out-dir " + two.string());
        if (rc1 < 0 || rc2 < 0 || rc1 != rc2) ok = false;

        std::size_t files = 0;
        for (const auto& entry : fs::directory_iterator(one)) {
            fs::path other = two / entry.path().filename();
            if (!fs::exists(other) || read_file(entry.path()) != read_file(other)) ok = false;
            ++files;
        }
        detail += std::to_string(files) + " files; ";
    }
    fs::remove_all(dir);
    report(7, "re-runs produce byte-identical transcript and report files", ok, detail);
}

// ---- criterion 8: registry soundness under invalid submissions -------------

void criterion_registry_soundness() {
    Seed base = seed_from_u64(14000);
    KeyPair ca = generate_keypair(derive_seed(base, "ca"), "CA");
    std::vector<KeyPair> hosts;
    std::vector<Certificate> certs;
    for (int i = 0; i < 50; ++i) {
        HostId id = "H" + std::to_string(i);
        hosts.push_back(generate_keypair(derive_seed(base, "host/" + id), id));
        certs.push_back(ca_issue(ca.priv, id, hosts.back().pub));
    }
    KeyPair rogue = generate_keypair(derive_seed(base, "rogue"), "H0");

    RegistryState rs(derive_seed(base, "rs"));
    FreshnessSource fresh(derive_seed(base, "fresh"));
    AgentId agent{"S", 1};

    // seed with one honest record so there is real state to protect
    {
        FieldRecord r = build_field_record(hosts[0], agent, {fresh.next()});
        Challenge c = rs.open_challenge("H0", agent);
        if (!rs.submit(r, sign(hosts[0].priv, c.nonce), certs[0], ca.pub).ok) {
            report(8, "registry soundness", false, "failed to seed the registry");
            return;
        }
    }

    Rng rng(derive_seed(base, "mix"));
    int unchanged = 0;
    const int kAttempts = 10000;
    for (int i = 0; i < kAttempts; ++i) {
        std::size_t h = rng.below(hosts.size());
        FieldRecord r = build_field_record(hosts[h], agent, {fresh.next()});
        Verdict v;
        Digest before{};
        switch (rng.below(4)) {
            case 0:  // absent challenge
                before = rs.state_hash();
                v = rs.submit(r, sign(hosts[h].priv, r.signature), certs[h], ca.pub);
                break;
            case 1: {  // live challenge, wrong signer
                try {
                    rs.open_challenge(hosts[h].owner, agent);
                } catch (const ChallengeInFlight&) {
                }
                before = rs.state_hash();
                Bytes junk = rng.bytes(32);
                v = rs.submit(r, sign(rogue.priv, junk), certs[h], ca.pub);
                break;
            }
            case 2: {  // tampered record under a live challenge
                Challenge c{};
                try {
                    c = rs.open_challenge(hosts[h].owner, agent);
                } catch (const ChallengeInFlight&) {
                    before = rs.state_hash();
                    v = rs.submit(r, sign(hosts[h].priv, r.signature), certs[h], ca.pub);
                    break;
                }
                r.fields.push_back(fresh.next());  // tamper after signing
                before = rs.state_hash();
                v = rs.submit(r, sign(hosts[h].priv, c.nonce), certs[h], ca.pub);
                break;
            }
            default:  // certificate from the wrong authority
                before = rs.state_hash();
                v = rs.submit(r, sign(hosts[h].priv, r.signature),
                              ca_issue(rogue.priv, hosts[h].owner, hosts[h].pub), ca.pub);
                break;
        }
        if (!v.ok && rs.state_hash() == before) ++unchanged;
    }
    report(8, "10^4 invalid submissions leave the registry state hash unchanged",
           unchanged == kAttempts,
           std::to_string(unchanged) + "/" + std::to_string(kAttempts) + " rejected untouched");
}

}  // namespace

int main() {
    criterion_round_trips();
    criterion_oracle_equivalence();
    criterion_binding_sweep();
    criterion_attack_catalog();
    criterion_ca_necessity();
    criterion_honest_soundness();
    criterion_determinism();
    criterion_registry_soundness();

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
