// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <stdexcept>
#include <string>

namespace gridspread {

enum class ErrorKind {
  config,     // bad or inconsistent configuration
  extent,     // coordinate outside the grid extent
  geometry,   // degenerate or unusable geometry
  input,      // malformed input value
  integrity,  // cross-reference or conservation violation
  io,         // file system failure
  unsolvable  // problem has no labeled rows
};

const char* to_string(ErrorKind kind);

/// Exception carrying the error category and, once known, the pipeline
/// stage that raised it.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message);
  Error(ErrorKind kind, const std::string& stage, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }
  const std::string& message() const noexcept { return message_; }

  /// Rebuild the error with a stage tag attached (used by the pipeline
  /// orchestrator; an existing tag is kept).
  Error with_stage(const std::string& stage) const;

private:
  ErrorKind kind_;
  std::string stage_;
  std::string message_;
};

}  // namespace gridspread
