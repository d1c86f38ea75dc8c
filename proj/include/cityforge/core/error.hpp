#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cityforge {

/// Base of every exception thrown by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An Error tagged with a module-specific kind enum.
template <typename Kind>
class CodedError : public Error {
public:
    CodedError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace cityforge
