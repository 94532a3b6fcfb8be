#pragma once

#include <stdexcept>
#include <string>

namespace wcp {

// Configuration / input errors (CLI exit code 2).
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          pos(position) {}
    std::size_t pos;
};

struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedAlpha : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A run labeled sub/supercritical that is not (CLI exit code 3).
struct GuardTripped : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failures (CLI exit code 4).
struct NotSupercritical : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// step() called on an already-absorbed state.
struct Extinct : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace wcp
