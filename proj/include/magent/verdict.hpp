#pragma once

#include <optional>
#include <string>

namespace magent {

enum class FailReason {
    BadCertificate,
    KeyMismatch,
    CodeTampered,
    BadSignature,
    CrcMismatch,
    StaleField,
    BadChallenge,
    DecryptError,
};

std::string to_string(FailReason reason);
std::optional<FailReason> fail_reason_from_string(std::string_view name);

// Checks report a verdict instead of throwing: a failed verification is a
// normal outcome on every auditing path.
struct Verdict {
    bool ok = false;
    std::optional<FailReason> reason;
    bool freshness_unchecked = false;  // no RS record was available for the check

    static Verdict pass() { return Verdict{true, std::nullopt, false}; }
    static Verdict fail(FailReason r) { return Verdict{false, r, false}; }

    explicit operator bool() const { return ok; }
    std::string describe() const;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

}  // namespace magent
