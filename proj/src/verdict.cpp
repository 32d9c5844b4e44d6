#include "magent/verdict.hpp"

namespace magent {

std::string to_string(FailReason reason) {
    switch (reason) {
        case FailReason::BadCertificate: return "BadCertificate";
        case FailReason::KeyMismatch: return "KeyMismatch";
        case FailReason::CodeTampered: return "CodeTampered";
        case FailReason::BadSignature: return "BadSignature";
        case FailReason::CrcMismatch: return "CrcMismatch";
        case FailReason::StaleField: return "StaleField";
        case FailReason::BadChallenge: return "BadChallenge";
        case FailReason::DecryptError: return "DecryptError";
    }
    return "Unknown";
}

std::optional<FailReason> fail_reason_from_string(std::string_view name) {
    for (FailReason r : {FailReason::BadCertificate, FailReason::KeyMismatch,
                         FailReason::CodeTampered, FailReason::BadSignature,
                         FailReason::CrcMismatch, FailReason::StaleField,
                         FailReason::BadChallenge, FailReason::DecryptError}) {
        if (to_string(r) == name) return r;
    }
    return std::nullopt;
}

std::string Verdict::describe() const {
    if (ok) return freshness_unchecked ? "pass (freshness unchecked)" : "pass";
    std::string out = "fail";
    if (reason) out += ":" + to_string(*reason);
    return out;
}

}  // namespace magent
