// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace motionrep {

enum class ErrorCode {
    InvalidArgument,
    InvalidPose,
    CameraEscapedEnvelope,
    ParseError,
    BadMagic,
    Truncated,
    VersionUnsupported,
    SemanticError,
    MissingDepth,
    OutOfFrame,
    NotFound,
    IoError,
};

/// Stable machine-readable name, used by the CLI error line and the service.
std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. The code distinguishes
/// the failure classes; the message carries location detail (byte offset,
/// line, field path, frame index) where one exists.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &message) {
    throw Error(code, message);
}

} // namespace motionrep
