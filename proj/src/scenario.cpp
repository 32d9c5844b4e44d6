#include "magent/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace magent {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DecodeError("malformed JSON");
    return j;
}

// missing keys and type errors surface as DecodeError like every other
// malformed input
template <typename F>
auto decoding(const char* what, F&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw DecodeError(std::string(what) + ": " + e.what());
    }
}

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known) throw DecodeError("unknown key \"" + key + "\" in " + where);
    }
}

json strategy_to_json(const HostStrategy& strategy) {
    json j;
    if (!strategy.attack) {
        j["strategy"] = "honest";
        if (strategy.update_on_revisit) j["update_on_revisit"] = true;
        if (strategy.preshared_server_key) j["preshared_server_key"] = true;
        return j;
    }
    const AttackSpec& atk = *strategy.attack;
    j["strategy"] = to_string(atk.kind);
    switch (atk.kind) {
        case AttackKind::RemoveMessage:
        case AttackKind::ReplaceWithOld:
        case AttackKind::CrossAgentReplay:
        case AttackKind::MiddlemanKeySwap:
            j["target_provider"] = atk.target_provider;
            j["target_index"] = atk.target_index;
            break;
        case AttackKind::StaleRecordReplay:
            j["target_provider"] = atk.target_provider;
            break;
        case AttackKind::TamperCodeResign:
        case AttackKind::Brainwash:
            if (atk.swap_certificate) j["swap_certificate"] = true;
            break;
        case AttackKind::KillAgent:
            break;
        case AttackKind::CloneAgent:
            j["clone_count"] = atk.clone_count;
            break;
        case AttackKind::ColludingKeyTheft:
            j["target_provider"] = atk.target_provider;
            j["target_index"] = atk.target_index;
            j["partner"] = atk.partner;
            break;
    }
    return j;
}

HostStrategy strategy_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw DecodeError(where + " must be an object");
    if (!j.contains("strategy") || !j["strategy"].is_string())
        throw DecodeError(where + " needs a \"strategy\" string");
    std::string name = j["strategy"].get<std::string>();

    HostStrategy strategy;
    if (name == "honest") {
        require_keys(j, {"strategy", "update_on_revisit", "preshared_server_key"}, where);
        if (j.contains("update_on_revisit"))
            strategy.update_on_revisit = j["update_on_revisit"].get<bool>();
        if (j.contains("preshared_server_key"))
            strategy.preshared_server_key = j["preshared_server_key"].get<bool>();
        return strategy;
    }

    AttackSpec atk;
    atk.kind = attack_kind_from_string(name);
    switch (atk.kind) {
        case AttackKind::RemoveMessage:
        case AttackKind::ReplaceWithOld:
        case AttackKind::CrossAgentReplay:
        case AttackKind::MiddlemanKeySwap:
            require_keys(j, {"strategy", "target_provider", "target_index"}, where);
            atk.target_provider = j.at("target_provider").get<std::string>();
            if (j.contains("target_index")) atk.target_index = j["target_index"].get<std::uint64_t>();
            break;
        case AttackKind::StaleRecordReplay:
            require_keys(j, {"strategy", "target_provider"}, where);
            atk.target_provider = j.at("target_provider").get<std::string>();
            break;
        case AttackKind::TamperCodeResign:
        case AttackKind::Brainwash:
            require_keys(j, {"strategy", "swap_certificate"}, where);
            if (j.contains("swap_certificate"))
                atk.swap_certificate = j["swap_certificate"].get<bool>();
            break;
        case AttackKind::KillAgent:
            require_keys(j, {"strategy"}, where);
            break;
        case AttackKind::CloneAgent:
            require_keys(j, {"strategy", "clone_count"}, where);
            atk.clone_count = j.at("clone_count").get<std::uint32_t>();
            break;
        case AttackKind::ColludingKeyTheft:
            require_keys(j, {"strategy", "target_provider", "target_index", "partner"}, where);
            atk.target_provider = j.at("target_provider").get<std::string>();
            if (j.contains("target_index")) atk.target_index = j["target_index"].get<std::uint64_t>();
            atk.partner = j.at("partner").get<std::string>();
            break;
    }
    strategy.attack = atk;
    return strategy;
}

}  // namespace

std::string serialize_config(const ScenarioConfig& config) {
    json j;
    j["seed"] = config.seed;
    j["mode"] = to_string(config.mode);
    j["ca_enabled"] = config.ca_enabled;
    j["server"] = config.server_id;
    j["rs"] = config.rs_id;
    j["trip"] = config.trip;
    if (!config.agent_code.empty()) j["code"] = hex_encode(config.agent_code);
    j["route"] = config.route;
    json hosts = json::object();
    for (const auto& [host, strategy] : config.hosts) hosts[host] = strategy_to_json(strategy);
    j["hosts"] = hosts;
    return j.dump(2) + "\n";
}

ScenarioConfig parse_config(const std::string& text) {
    return decoding("config", [&] {
        json j = parse_json(text);
        if (!j.is_object()) throw DecodeError("config must be a JSON object");
        require_keys(j,
                     {"seed", "mode", "ca_enabled", "server", "rs", "trip", "code", "route",
                      "hosts"},
                     "config");

        ScenarioConfig config;
        config.seed = j.at("seed").get<std::uint64_t>();
        config.mode = entry_mode_from_string(j.at("mode").get<std::string>());
        if (j.contains("ca_enabled")) config.ca_enabled = j["ca_enabled"].get<bool>();
        if (j.contains("server")) config.server_id = j["server"].get<std::string>();
        if (j.contains("rs")) config.rs_id = j["rs"].get<std::string>();
        if (j.contains("trip")) config.trip = j["trip"].get<std::uint32_t>();
        if (j.contains("code")) config.agent_code = hex_decode(j["code"].get<std::string>());
        config.route = j.at("route").get<std::vector<std::string>>();
        if (!j.contains("hosts") || !j["hosts"].is_object())
            throw DecodeError("config needs a \"hosts\" object");
        for (const auto& [host, value] : j["hosts"].items())
            config.hosts[host] = strategy_from_json(value, "hosts." + host);
        return config;
    });
}

std::string serialize_bundle(const TrustBundle& bundle) {
    json j;
    j["ca_enabled"] = bundle.ca_enabled;
    if (bundle.ca_enabled) {
        if (!bundle.ca_pub) throw DecodeError("bundle with CA enabled is missing the CA key");
        j["ca_public"] = hex_encode(bundle.ca_pub->encode());
        json hosts = json::object();
        for (const auto& [host, cert] : bundle.certs) {
            if (cert.subject != host)
                throw DecodeError("certificate subject does not match its directory slot");
            hosts[host] = {{"public", hex_encode(cert.subject_key.encode())},
                           {"ca_signature", hex_encode(cert.ca_signature)}};
        }
        j["hosts"] = hosts;
    } else {
        json hosts = json::object();
        for (const auto& [host, key] : bundle.keys)
            hosts[host] = {{"public", hex_encode(key.encode())}};
        j["hosts"] = hosts;
    }
    return j.dump(2) + "\n";
}

TrustBundle parse_bundle(const std::string& text) {
    return decoding("bundle", [&] {
        json j = parse_json(text);
        if (!j.is_object()) throw DecodeError("bundle must be a JSON object");
        require_keys(j, {"ca_enabled", "ca_public", "hosts"}, "bundle");

        TrustBundle bundle;
        bundle.ca_enabled = j.at("ca_enabled").get<bool>();
        if (!j.contains("hosts") || !j["hosts"].is_object())
            throw DecodeError("bundle needs a \"hosts\" object");
        if (bundle.ca_enabled) {
            bundle.ca_pub = PublicKey::decode(hex_decode(j.at("ca_public").get<std::string>()));
            for (const auto& [host, value] : j["hosts"].items()) {
                require_keys(value, {"public", "ca_signature"}, "bundle host " + host);
                Certificate cert;
                cert.subject = host;
                cert.subject_key =
                    PublicKey::decode(hex_decode(value.at("public").get<std::string>()));
                cert.ca_signature = hex_decode(value.at("ca_signature").get<std::string>());
                bundle.certs[host] = cert;
            }
        } else {
            if (j.contains("ca_public"))
                throw DecodeError("bundle without CA cannot carry a CA key");
            for (const auto& [host, value] : j["hosts"].items()) {
                require_keys(value, {"public"}, "bundle host " + host);
                bundle.keys[host] =
                    PublicKey::decode(hex_decode(value.at("public").get<std::string>()));
            }
        }
        return bundle;
    });
}

std::string serialize_secrets(const SecretBundle& secrets) {
    json j;
    if (secrets.ca_priv) j["ca_private"] = hex_encode(secrets.ca_priv->encode());
    json hosts = json::object();
    for (const auto& [host, priv] : secrets.host_priv) hosts[host] = hex_encode(priv.encode());
    j["hosts"] = hosts;
    return j.dump(2) + "\n";
}

SecretBundle parse_secrets(const std::string& text) {
    return decoding("secrets", [&] {
        json j = parse_json(text);
        if (!j.is_object()) throw DecodeError("secrets must be a JSON object");
        require_keys(j, {"ca_private", "hosts"}, "secrets");

        SecretBundle secrets;
        if (j.contains("ca_private"))
            secrets.ca_priv = PrivateKey::decode(hex_decode(j["ca_private"].get<std::string>()));
        if (j.contains("hosts")) {
            for (const auto& [host, value] : j["hosts"].items())
                secrets.host_priv[host] = PrivateKey::decode(hex_decode(value.get<std::string>()));
        }
        return secrets;
    });
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string data = buf.str();
    return Bytes(data.begin(), data.end());
}

void write_file(const std::filesystem::path& path, const Bytes& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    write_file(path, Bytes(text.begin(), text.end()));
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    Bytes raw = read_file(path);
    std::vector<std::string> lines;
    std::string current;
    for (std::uint8_t b : raw) {
        if (b == '\n') {
            lines.push_back(current);
            current.clear();
        } else {
            current.push_back(static_cast<char>(b));
        }
    }
    if (!current.empty()) lines.push_back(current);
    return lines;
}

}  // namespace magent
