#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tokaudit {

// Bad input: malformed files, unparseable patterns, invalid configuration.
// The CLI maps these to exit code 1; everything else exits 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A regex construct outside the restricted secret-pattern grammar.
class UnsupportedConstructError : public ValidationError {
public:
    explicit UnsupportedConstructError(const std::string& construct)
        : ValidationError("unsupported regex construct: " + construct), construct_(construct) {}
    const std::string& construct() const { return construct_; }

private:
    std::string construct_;
};

// A tokenizer definition file this tool cannot represent (no merge list etc.).
class UnsupportedFormatError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Text that cannot be encoded under the given vocabulary.
class EncodeError : public ValidationError {
public:
    EncodeError(const std::string& msg, std::size_t offset)
        : ValidationError(msg + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_ = 0;
};

}  // namespace tokaudit
