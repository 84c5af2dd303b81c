#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace heatctl {

// Argument outside the mathematical domain of an operation (negative mode
// index, position outside [0,1], N <= N0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A documented precondition of the model does not hold. Carries the offending
// index when there is one (e.g. the first c_n that vanishes).
class PreconditionError : public std::invalid_argument {
public:
    PreconditionError(const std::string& what, int index = -1)
        : std::invalid_argument(what), index_(index) {}
    [[nodiscard]] int index() const noexcept { return index_; }

private:
    int index_;
};

// Malformed or inconsistent user configuration; `path` is a JSON pointer.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// Numerical breakdown inside the semidefinite solver or a synthesis routine.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(const std::string&)>;

// Replaces the process-wide warning sink (stderr by default) and returns the
// previous handler. Calls into the handler are serialized.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace heatctl
