#pragma once

#include <stdexcept>
#include <string>

namespace kpsb {

// Base class for all library errors. The CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments, inconsistent dimensions, violated preconditions.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Non-finite values, rank deficiency, non-convergence.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

namespace detail {

[[noreturn]] inline void fail_dims(const std::string& where, const std::string& what)
{
    throw ValidationError(where + ": " + what);
}

} // namespace detail

} // namespace kpsb
