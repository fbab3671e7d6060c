#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace occlusion {

// Root of every error the library throws. Callers that only need to know
// "did this input fail" catch this; everything below is a refinement.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter is out of its documented range or irrelevant for the kind.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Two buffers that must agree in dimensions do not.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Structurally valid arguments that violate an operation's precondition
// (missing radar sensors, schema mismatch, count mismatch).
class InputError : public Error {
public:
    using Error::Error;
};

class MalformedFileError : public Error {
public:
    MalformedFileError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
    explicit MalformedFileError(const std::string& what) : Error(what) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_ = 0;
};

class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Rejected path or manifest content (e.g. "../" in a relpath).
class ValidationError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class PairingError : public Error {
public:
    using Error::Error;
};

}  // namespace occlusion
