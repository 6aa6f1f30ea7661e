#pragma once

#include <stdexcept>
#include <string>

namespace fracgrad {

// Raised when an operation is called outside its documented domain
// (invalid order, empty set, misaligned cube, ...). The CLI maps this to
// exit status 2.
class precondition_error : public std::invalid_argument {
public:
    explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw precondition_error(what);
}

} // namespace fracgrad
