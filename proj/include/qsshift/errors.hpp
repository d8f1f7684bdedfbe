#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace qss {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A matrix/vector dimension does not conform to the operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

// An argument value is outside the accepted domain (not a size issue).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A serialized document cannot be understood.
class ParseError : public Error {
public:
    using Error::Error;
};

// A test-scale-only path was invoked beyond its configured size guard.
class GuardExceeded : public Error {
public:
    using Error::Error;
};

// A triangular or dense solve hit a pivot below the singularity tolerance.
class SingularDiagonal : public Error {
public:
    SingularDiagonal(std::size_t entry, const std::string& what)
        : Error(what), entry_(entry) {}
    std::size_t entry() const { return entry_; }

private:
    std::size_t entry_ = 0;
};

// A shifted system A + sigma*I is numerically singular.  `block` is the
// block index whose triangular pivot failed; `shift_index` identifies the
// offending shift inside a multi-shift call (npos when not applicable).
class SingularShift : public Error {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    SingularShift(std::size_t shift_index, std::size_t block, const std::string& what)
        : Error(what), shift_index_(shift_index), block_(block) {}
    std::size_t shift_index() const { return shift_index_; }
    std::size_t block() const { return block_; }

private:
    std::size_t shift_index_ = npos;
    std::size_t block_ = 0;
};

}  // namespace qss
