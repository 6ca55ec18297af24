#pragma once

#include <stdexcept>
#include <string>

namespace suitesim {

/// Raised for bad inputs: malformed files, violated preconditions,
/// inconsistent configuration. The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an internal invariant breaks. The CLI maps these to exit code 3.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ValidationError(message);
}

inline void ensure(bool condition, const std::string& message) {
    if (!condition) throw InternalError(message);
}

}  // namespace suitesim
