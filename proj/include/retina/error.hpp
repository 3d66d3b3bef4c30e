#pragma once

#include <stdexcept>
#include <string>

namespace retina {

// Bad user input: malformed files, invalid arguments, graphs that fail
// validation. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal invariant. The CLI maps this to exit code 3.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

inline void require_input(bool cond, const std::string& msg) {
    if (!cond) throw InputError(msg);
}

inline void require_internal(bool cond, const std::string& msg) {
    if (!cond) throw InternalError(msg);
}

} // namespace retina
