// magent: key setup, scenario execution and offline auditing for the
// mobile-agent data protection toolkit.

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "magent/scenario.hpp"

namespace fs = std::filesystem;
using namespace magent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;     // setup / input problems
constexpr int kExitAnomaly = 2;   // attack detected

std::vector<std::string> split_hosts(const std::string& csv) {
    std::vector<std::string> hosts;
    std::string current;
    for (char c : csv) {
        if (c == ',') {
            if (!current.empty()) hosts.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) hosts.push_back(current);
    return hosts;
}

int cmd_keygen(std::uint64_t seed, const std::string& hosts_csv, const fs::path& out_dir,
               bool no_ca) {
    std::vector<std::string> hosts = split_hosts(hosts_csv);
    if (hosts.empty()) {
        std::cerr << "keygen: --hosts needs at least one host id\n";
        return kExitError;
    }
    fs::create_directories(out_dir);
    KeyMaterial keys = derive_key_material(seed_from_u64(seed), hosts);
    write_file(out_dir / "bundle.json", serialize_bundle(make_bundle(keys, !no_ca)));
    write_file(out_dir / "secrets.json", serialize_secrets(make_secrets(keys)));
    std::cout << "wrote " << (out_dir / "bundle.json").string() << " and "
              << (out_dir / "secrets.json").string() << " (" << hosts.size() << " hosts)\n";
    return kExitOk;
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir,
            const std::optional<fs::path>& bundle_path,
            const std::optional<fs::path>& secrets_path, bool no_ca,
            std::optional<std::uint64_t> seed_override) {
    ScenarioConfig config = parse_config(to_string(read_file(config_path)));
    if (no_ca) config.ca_enabled = false;
    if (seed_override) config.seed = *seed_override;

    ScenarioOutcome outcome;
    if (bundle_path) {
        fs::path secrets_file = secrets_path.value_or(bundle_path->parent_path() / "secrets.json");
        TrustBundle bundle = parse_bundle(to_string(read_file(*bundle_path)));
        SecretBundle secrets = parse_secrets(to_string(read_file(secrets_file)));
        outcome = run_scenario(config, key_material_from_bundles(bundle, secrets));
    } else {
        outcome = run_scenario(config);
    }

    fs::create_directories(out_dir);
    write_file(out_dir / "transcript.txt", outcome.transcript.serialize());
    std::string rs_text;
    for (const std::string& line : outcome.transcript.rs_lines) rs_text += line + "\n";
    write_file(out_dir / "rs_transcript.txt", rs_text);
    for (std::size_t i = 0; i < outcome.observed.size(); ++i)
        write_file(out_dir / ("agent_" + std::to_string(i) + ".bin"),
                   outcome.observed[i].encode());
    write_file(out_dir / "bundle.json", serialize_bundle(outcome.bundle));
    write_file(out_dir / "secrets.json", serialize_secrets(outcome.secrets));
    write_file(out_dir / "report.json", outcome.report.to_json());

    std::cout << "agents returned: " << outcome.observed.size()
              << ", anomalies: " << outcome.report.anomalies.size() << "\n";
    return outcome.report.clean() ? kExitOk : kExitAnomaly;
}

int cmd_audit(const std::vector<fs::path>& agent_paths, const fs::path& rs_path,
              const fs::path& bundle_path, const std::optional<fs::path>& secrets_path,
              const std::optional<fs::path>& out_path) {
    AuditInputs inputs;
    for (const fs::path& p : agent_paths) inputs.observed.push_back(Agent::decode(read_file(p)));
    inputs.rs_log = read_lines(rs_path);
    inputs.bundle = parse_bundle(to_string(read_file(bundle_path)));

    if (secrets_path) {
        SecretBundle secrets = parse_secrets(to_string(read_file(*secrets_path)));
        // the server is whoever minted the audited agents; fall back to the
        // registry's records when no agent came back
        std::optional<HostId> server_id;
        if (!inputs.observed.empty()) {
            server_id = inputs.observed.front().code_area.id.server_id;
        } else {
            std::optional<PublicKey> ca =
                inputs.bundle.ca_enabled ? inputs.bundle.ca_pub : std::nullopt;
            ReplayResult replay = replay_registry(inputs.rs_log, ca);
            if (!replay.state.records().empty())
                server_id = replay.state.records().begin()->first.first.server_id;
        }
        if (server_id && secrets.host_priv.contains(*server_id))
            inputs.server_priv = secrets.host_priv.at(*server_id);
    }

    ScenarioReport report = final_audit(inputs);
    std::string text = report.to_json();
    if (out_path)
        write_file(*out_path, text);
    else
        std::cout << text;
    if (out_path)
        std::cout << "anomalies: " << report.anomalies.size() << "\n";
    return report.clean() ? kExitOk : kExitAnomaly;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mobile-agent data protection toolkit"};
    app.require_subcommand(1);

    // keygen
    auto* keygen = app.add_subcommand("keygen", "derive a key/certificate bundle from a seed");
    std::uint64_t kg_seed = 0;
    std::string kg_hosts;
    std::string kg_out = ".";
    bool kg_no_ca = false;
    keygen->add_option("--seed", kg_seed, "master seed")->required();
    keygen->add_option("--hosts", kg_hosts, "comma-separated host ids")->required();
    keygen->add_option("--out-dir", kg_out, "output directory");
    keygen->add_flag("--no-ca", kg_no_ca, "emit raw keys instead of certificates");

    // run
    auto* run = app.add_subcommand("run", "execute a scenario and audit the outcome");
    std::string run_config;
    std::string run_out = ".";
    std::string run_bundle, run_secrets;
    bool run_no_ca = false;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false;
    run->add_option("--config", run_config, "scenario config file")->required();
    run->add_option("--out-dir", run_out, "output directory");
    run->add_option("--bundle", run_bundle, "load keys from this bundle instead of the seed");
    run->add_option("--secrets", run_secrets, "secrets file for --bundle");
    run->add_flag("--no-ca", run_no_ca, "disable the certificate authority");
    run->add_option("--seed", run_seed, "override the config seed")
        ->each([&run_seed_set](const std::string&) { run_seed_set = true; });

    // audit
    auto* audit = app.add_subcommand("audit", "re-audit run outputs offline");
    std::vector<std::string> audit_agents;
    std::string audit_rs, audit_bundle, audit_secrets, audit_out;
    audit->add_option("agents", audit_agents, "agent files");
    audit->add_option("--rs", audit_rs, "RS transcript file")->required();
    audit->add_option("--bundle", audit_bundle, "key directory file")->required();
    audit->add_option("--secrets", audit_secrets, "secrets file (enables decrypting checks)");
    audit->add_option("--out", audit_out, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);  // prints the usage message; 0 for --help
        return rc == 0 ? kExitOk : kExitError;
    }

    try {
        if (keygen->parsed()) return cmd_keygen(kg_seed, kg_hosts, kg_out, kg_no_ca);
        if (run->parsed()) {
            std::optional<fs::path> bundle, secrets;
            if (!run_bundle.empty()) bundle = run_bundle;
            if (!run_secrets.empty()) secrets = run_secrets;
            std::optional<std::uint64_t> seed;
            if (run_seed_set) seed = run_seed;
            return cmd_run(run_config, run_out, bundle, secrets, run_no_ca, seed);
        }
        if (audit->parsed()) {
            std::vector<fs::path> agents(audit_agents.begin(), audit_agents.end());
            std::optional<fs::path> secrets, out;
            if (!audit_secrets.empty()) secrets = audit_secrets;
            if (!audit_out.empty()) out = audit_out;
            return cmd_audit(agents, audit_rs, audit_bundle, secrets, out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
