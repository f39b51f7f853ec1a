#pragma once

#include <stdexcept>
#include <string>

namespace heron {

// Error taxonomy used across the library. All carry a human-readable message
// naming the offending quantity (client id, probe index, config key, ...).

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error("numeric error: " + msg) {}
};

struct StateError : std::runtime_error {
    explicit StateError(const std::string& msg) : std::runtime_error("state error: " + msg) {}
};

struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& msg) : std::runtime_error("protocol error: " + msg) {}
};

struct PartitionError : std::runtime_error {
    explicit PartitionError(const std::string& msg) : std::runtime_error("partition error: " + msg) {}
};

struct ReconcileError : std::runtime_error {
    explicit ReconcileError(const std::string& msg) : std::runtime_error("ledger reconciliation failed: " + msg) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error("parse error: " + msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io error: " + msg) {}
};

} // namespace heron
