// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace paftrack {

// File-format and validation failure with a position (byte offset, line, or
// document path) baked into the message.
class IoError : public std::runtime_error {
 public:
    enum class Kind {
        syntax,      // unparseable text
        schema,      // parseable but structurally wrong
        validation,  // well-formed but violates annotation invariants
        bad_magic,
        bad_version,
        truncated,
        trailing,  // bytes left over after the last record
    };

    IoError(Kind kind, std::string position, const std::string& message)
        : std::runtime_error(position.empty() ? message : position + ": " + message),
          kind_(kind),
          position_(std::move(position)) {}

    Kind kind() const { return kind_; }
    const std::string& position() const { return position_; }

 private:
    Kind kind_;
    std::string position_;
};

}  // namespace paftrack
