// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace spadfab {

/// Base class for all spadfab errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A bit chain does not have the length required by the decoder.
class WrongLength : public Error {
public:
  using Error::Error;
};

/// Programming clock frequency is zero or negative.
class InvalidClock : public Error {
public:
  using Error::Error;
};

/// A combinator spec violates its invariants (e.g. coincidence k too large).
class InvalidSpec : public Error {
public:
  using Error::Error;
};

/// Interpolation query outside the table domain.
class OutOfRange : public Error {
public:
  using Error::Error;
};

/// Array region outside the 32x32 grid.
class OutOfBounds : public Error {
public:
  using Error::Error;
};

/// Histogram operation on a histogram with no counts.
class EmptyHistogram : public Error {
public:
  using Error::Error;
};

/// An edge stream violates ordering or polarity alternation.
class MalformedStream : public Error {
public:
  using Error::Error;
};

/// Configuration document error (bad key, bad value, missing file).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Text parse error carrying source position and the offending token;
/// both are part of the message.
class ParseError : public Error {
public:
  ParseError(const std::string& what, int line, std::string token = {})
      : Error(render(what, line, token)),
        line_(line),
        token_(std::move(token)) {}

  int line() const { return line_; }
  const std::string& token() const { return token_; }

private:
  static std::string render(const std::string& what, int line,
                            const std::string& token) {
    std::string s = what + " (line " + std::to_string(line);
    if (!token.empty()) s += ", near '" + token + "'";
    s += ")";
    return s;
  }

  int line_;
  std::string token_;
};

}  // namespace spadfab
