#pragma once

#include <stdexcept>
#include <string>

namespace tap {

// Invalid arguments, malformed configs, mismatched artifacts. CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public InputError {
public:
    ParseError(const std::string &msg, std::size_t line)
        : InputError(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A documented precondition was broken by the caller.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Instance exceeds a configured enumeration or time budget. CLI exit code 3.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Expensive precondition checks default to on outside of release builds.
inline constexpr bool kContractChecks =
#ifdef NDEBUG
    false;
#else
    true;
#endif

} // namespace tap
