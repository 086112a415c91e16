// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "dirifs/ifs.hpp"

namespace dirifs {

/// 64-bit FNV-1a.
class Fnv1a {
 public:
  void update(std::string_view bytes) {
    for (unsigned char ch : bytes) {
      state_ ^= ch;
      state_ *= 0x100000001b3ULL;
    }
  }
  void update(char ch, std::uint64_t repeat) {
    for (std::uint64_t i = 0; i < repeat; ++i) {
      state_ ^= static_cast<unsigned char>(ch);
      state_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string fnv1a_hex(std::string_view bytes) {
  Fnv1a h;
  h.update(bytes);
  return hex64(h.value());
}

/// Hash of the letter string of a word, without materializing it.
inline std::string word_digest(const Word& w) {
  Fnv1a h;
  for (const Run& r : w.runs()) h.update(to_char(r.letter), r.count);
  return hex64(h.value());
}

}  // namespace dirifs
