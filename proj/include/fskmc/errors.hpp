#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fskmc {

/// Invalid construction parameters or run configuration. Carries every
/// offending key so callers can report them together.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& message)
        : std::invalid_argument(message), issues_{message} {}
    explicit ConfigError(std::vector<std::string> issues);

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// A call that violates an operation's precondition (bad tag, negative time, ...).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Request exceeds a hard resource cap (e.g. oracle state-space size).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fskmc
