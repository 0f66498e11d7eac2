// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace wtbs {

/// Malformed input text (CSV rows, config lines). `line` is 1-based, 0 if unknown.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line), detail_(message) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  std::size_t line_;
  std::string detail_;
};

/// A well-formed input that violates a semantic constraint (missing file,
/// out-of-range option, inconsistent scenario).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input error attributed to a file (and line, when known). Message reads
/// "file:line: detail".
class InputError : public ConfigError {
public:
  InputError(std::string file, std::size_t line, const std::string& detail)
      : ConfigError(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + detail),
        file_(std::move(file)), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string file_;
  std::size_t line_;
};

/// Argument outside a function's mathematical domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Failure while running a simulation on otherwise valid input.
class SimulationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NoActiveBsError : public SimulationError {
public:
  NoActiveBsError() : SimulationError("no active BS") {}
};

} // namespace wtbs
