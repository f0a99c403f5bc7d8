#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace coast::report {

// 64-bit FNV-1a, rendered as "fnv1a:<16 hex digits>". Reports embed these so a
// result can be traced back to the exact bytes it was computed from.
std::uint64_t fnv1a(const void* data, std::size_t n);
std::string bytes_hash(const void* data, std::size_t n);
std::string file_hash(const std::filesystem::path& path);

}  // namespace coast::report
