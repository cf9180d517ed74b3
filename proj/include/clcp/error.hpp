// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace clcp {

/// Failure categories; the CLI maps each one to a fixed exit status.
enum class ErrorKind { Validation = 1, Io = 2, Mismatch = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// A verified quantity disagreed with its reference.
class MismatchError : public Error {
public:
    explicit MismatchError(const std::string& what) : Error(ErrorKind::Mismatch, what) {}
};

}  // namespace clcp
