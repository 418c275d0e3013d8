#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace obscura {

enum class Errc {
    IdentityNotSerializable,
    WrongLength,
    NotOnCurve,
    CoordinateOutOfRange,
    ZeroScalar,
    IndexMismatch,
    BadIndex,
    LengthMismatch,
    DuplicateMember,
    IdentityMember,
    RingTooLarge,
    TruncatedPayload,
    MalformedChallenge,
    NonCanonicalScalar,
    InsufficientPool,
    MalformedDocument,
    ScriptError,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}
    explicit Error(Errc code) : std::runtime_error(std::string(errc_name(code))), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace obscura
