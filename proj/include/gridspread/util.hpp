// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gridspread {

/// Shortest round-trip decimal form of a double, locale-free. Integral
/// values print without a trailing ".0" ("3" not "3.0").
std::string format_double(double value);

/// FNV-1a 64-bit over a byte string. Used for stable seed derivation and
/// input digests in the run manifest; not cryptographic.
std::uint64_t fnv1a64(std::string_view bytes);

/// FNV-1a digest of a file's contents, rendered as "fnv1a64:<hex>".
std::string file_digest(const std::string& path);

/// Lowercase hex rendering of a 64-bit value, zero padded to 16 chars.
std::string to_hex(std::uint64_t value);

}  // namespace gridspread
