#include "coast/report.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "coast/error.hpp"

namespace coast::report {

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string bytes_hash(const void* data, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a(data, n)));
  return buf;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path.string());
  std::vector<char> buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return bytes_hash(buf.data(), buf.size());
}

}  // namespace coast::report
