#pragma once

#include <stdexcept>
#include <string>

namespace adelic {

// Every library failure derives from Error so callers can map categories onto
// exit codes: UsageError -> 2, PrecisionError / ResourceError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid arguments, malformed configuration, mixed filtrations.
class UsageError : public Error {
public:
    using Error::Error;
};

// A requested accuracy cannot be certified inside the configured window.
class PrecisionError : public Error {
public:
    using Error::Error;
};

// Big-integer budget or index window exhausted.
class ResourceError : public Error {
public:
    using Error::Error;
};

}  // namespace adelic
