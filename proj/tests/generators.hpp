// Shared helpers for the test suites: seeded generators so every property
// check is reproducible.
#pragma once

#include "magent/registry.hpp"
#include "magent/sim.hpp"

namespace testgen {

using namespace magent;

inline Seed tseed(std::uint64_t n) { return seed_from_u64(n); }

inline KeyPair keys(std::uint64_t n, HostId owner = "host") {
    return generate_keypair(tseed(n), std::move(owner));
}

inline Bytes random_bytes(Rng& rng, std::size_t max_len) {
    return rng.bytes(static_cast<std::size_t>(rng.below(max_len + 1)));
}

// A minted agent plus the server keys behind it.
struct TestAgent {
    KeyPair server;
    Agent agent;
};

inline TestAgent agent(std::uint64_t n, std::uint64_t serial = 1) {
    TestAgent t{generate_keypair(derive_seed(tseed(n), "server"), "S"), {}};
    AgentMint mint(t.server, "RS");
    Rng rng(derive_seed(tseed(n), "code"));
    t.agent = mint.mint(rng.bytes(40), serial, 1);
    return t;
}

inline FreshnessSource fresh_source(std::uint64_t n) {
    return FreshnessSource(derive_seed(tseed(n), "fresh"));
}

}  // namespace testgen
