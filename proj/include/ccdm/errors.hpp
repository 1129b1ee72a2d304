#pragma once

#include <stdexcept>
#include <string>

namespace ccdm {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Scheme definition problems: config syntax, duplicate ids, bad references.
class SchemeError : public Error {
public:
    using Error::Error;
};

/// Panel input problems: malformed CSV, unknown ids, duplicate cells, gaps.
class DataError : public Error {
public:
    using Error::Error;
};

/// Contract or numeric failures in the computation stages.
class ComputeError : public Error {
public:
    using Error::Error;
};

} // namespace ccdm
