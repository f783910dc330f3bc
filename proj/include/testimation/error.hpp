#pragma once

#include <stdexcept>
#include <string>

namespace testimation {

/// A numeric argument is outside its admissible range (q outside (0,1), j0 too large, ...).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data does not have the required shape or content.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A filter or signal name that is not in the built-in tables.
class UnsupportedName : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace testimation
