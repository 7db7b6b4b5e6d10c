// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/error.hpp"

namespace gridspread {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::extent: return "extent";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::input: return "input";
    case ErrorKind::integrity: return "integrity";
    case ErrorKind::io: return "io";
    case ErrorKind::unsolvable: return "unsolvable";
  }
  return "unknown";
}

namespace {

std::string format_what(ErrorKind kind, const std::string& stage, const std::string& message) {
  std::string out;
  if (!stage.empty()) {
    out += "[" + stage + "] ";
  }
  out += to_string(kind);
  out += " error: ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(format_what(kind, "", message)), kind_(kind), message_(message) {}

Error::Error(ErrorKind kind, const std::string& stage, const std::string& message)
    : std::runtime_error(format_what(kind, stage, message)),
      kind_(kind),
      stage_(stage),
      message_(message) {}

Error Error::with_stage(const std::string& stage) const {
  if (!stage_.empty()) return *this;
  return Error(kind_, stage, message_);
}

}  // namespace gridspread
