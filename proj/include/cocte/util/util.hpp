#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cocte::util {

// FNV-1a 64-bit. Used for content digests in manifests and prefix
// signatures; not cryptographic.
inline uint64_t fnv1a(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL) {
  uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a_hex(std::string_view data);
std::string file_digest(const std::filesystem::path& p);

std::string lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);
std::vector<std::string> read_lines(const std::filesystem::path& p);

// Formats a double with enough digits to round-trip, matching the JSON
// serializer so CSV twins stay consistent with JSON reports.
std::string format_double(double v);

}  // namespace cocte::util
