// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace binmoire {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor shapes or vector lengths do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A value lies outside the domain an operation accepts (non-±1 pack input,
/// gate outside (0,1], ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration: bad group override, unreachable shortcut shape,
/// malformed config document.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents (pixmap header, truncated payload, corrupt
/// checkpoint manifest).
class FormatError : public Error {
public:
    using Error::Error;
};

class ChecksumError : public Error {
public:
    using Error::Error;
};

class VersionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Non-finite gradients or loss during training.
class TrainingError : public Error {
public:
    using Error::Error;
};

} // namespace binmoire
