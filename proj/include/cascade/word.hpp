#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace cascade {

// Finite word over the alphabet {0,...,b-1}, addressing the b-adic interval
// I_w = [index*b^-len, (index+1)*b^-len). The empty word is the root.
// Stored as (length, lexicographic index) which fits every depth allowed by
// the sampling guard (len*log2(b) <= 34).
struct Word {
  std::uint32_t length = 0;
  std::uint64_t index = 0;

  static Word root() { return {}; }

  friend bool operator==(const Word&, const Word&) = default;

  unsigned digit(int b, std::uint32_t i) const {
    std::uint64_t div = index;
    for (std::uint32_t k = length - 1; k > i; --k) div /= static_cast<std::uint64_t>(b);
    return static_cast<unsigned>(div % static_cast<std::uint64_t>(b));
  }

  Word child(int b, unsigned d) const {
    return {length + 1, index * static_cast<std::uint64_t>(b) + d};
  }

  Word parent(int b) const { return {length - 1, index / static_cast<std::uint64_t>(b)}; }

  // Left endpoint of I_w.
  double lambda(int b) const {
    double w = 1.0;
    for (std::uint32_t k = 0; k < length; ++k) w /= b;
    return static_cast<double>(index) * w;
  }

  // Same-level neighbors; absent at the domain boundary.
  std::optional<Word> pred() const {
    if (index == 0) return std::nullopt;
    return Word{length, index - 1};
  }
  std::optional<Word> succ(std::uint64_t level_count) const {
    if (index + 1 >= level_count) return std::nullopt;
    return Word{length, index + 1};
  }

  // Digits concatenated, base-36 symbols (b <= 36 for display purposes).
  std::string digits_string(int b) const {
    static const char* sym = "0123456789abcdefghijklmnopqrstuvwxyz";
    if (length == 0) return "";
    std::string s(length, '0');
    std::uint64_t v = index;
    for (std::uint32_t i = length; i-- > 0;) {
      s[i] = sym[v % static_cast<std::uint64_t>(b)];
      v /= static_cast<std::uint64_t>(b);
    }
    return s;
  }
};

// Number of words at a level: b^level.
inline std::uint64_t level_count(int b, int level) {
  std::uint64_t n = 1;
  for (int i = 0; i < level; ++i) n *= static_cast<std::uint64_t>(b);
  return n;
}

}  // namespace cascade
