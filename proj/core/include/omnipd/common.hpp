#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace omnipd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the file-format parsers; carries a 1-based line number.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

using Rng = std::mt19937_64;

// FNV-1a, used for determinism checks on routing/placement state.
inline std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

constexpr std::uint64_t kFnvSeed = 0xcbf29ce484222325ull;

std::vector<std::string> split_ws(std::string_view line);
std::vector<std::string> split_on(std::string_view s, char sep);
std::string strip(std::string_view s);

/// Reads a whole file, throws Error if unreadable.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Fixed-precision float formatting so reports are byte-stable across runs.
std::string fmt_double(double v, int digits = 6);

}  // namespace omnipd
