#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace micropump {

inline constexpr std::string_view kVersion = "0.1.0";

/// Shortest round-trip decimal representation of a double (std::to_chars).
/// Deterministic across runs and thread counts.
std::string format_double(double v);

/// Writes `content` to `path` atomically: temp file in the same directory,
/// then rename. A killed process never leaves a truncated file behind.
void write_file_atomic(const std::string& path, const std::string& content);

/// FNV-1a 64-bit over a byte string; used to stamp outputs with a config hash.
std::uint64_t fnv1a64(std::string_view bytes);

/// 16-hex-digit rendering of fnv1a64.
std::string hash_hex(std::string_view bytes);

} // namespace micropump
