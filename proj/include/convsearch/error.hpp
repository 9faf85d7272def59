#pragma once

#include <stdexcept>
#include <string>

namespace convsearch {

// Malformed input files (bad JSON, bad TREC lines, bad binary headers).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that violates a data invariant
// (duplicate ids, turn-index gaps, unknown passage references).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration values or unsatisfied operation preconditions.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem trouble: unreadable path, failed write.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace convsearch
