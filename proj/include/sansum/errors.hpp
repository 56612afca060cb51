#pragma once

#include <stdexcept>
#include <string>

namespace sansum {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input bytes are not valid UTF-8.
class DecodeError : public Error {
public:
    using Error::Error;
};

// A document has no sentences after cleaning and segmentation.
class EmptyDocumentError : public Error {
public:
    using Error::Error;
};

// A parameter is outside its documented range.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Vector or matrix dimensions do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Not enough data points for the requested operation.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// A required key was not found (token lookup under policy=error).
class LookupError : public Error {
public:
    using Error::Error;
};

// An embedding or model file could not be parsed.
class LoadError : public Error {
public:
    using Error::Error;
};

// A zero vector was passed where a direction is required (cosine distance,
// unit normalization).
class DegenerateVectorError : public Error {
public:
    using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sansum
