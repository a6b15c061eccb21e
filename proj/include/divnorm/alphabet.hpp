#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace divnorm {

// Largest outcome space (|Σ|^ℓ words) any counter or measure may allocate.
inline constexpr std::uint64_t kMaxWords = std::uint64_t{1} << 24;

// An ordered finite alphabet of printable, non-whitespace single-byte symbols.
// Symbol order defines the canonical index of every symbol and, by
// lexicographic extension, of every word.
class Alphabet {
 public:
  explicit Alphabet(std::string_view symbols);

  static Alphabet binary() { return Alphabet("01"); }

  std::size_t size() const noexcept { return symbols_.size(); }
  char symbol(std::size_t index) const { return symbols_.at(index); }
  const std::string& symbols() const noexcept { return symbols_; }

  std::optional<std::size_t> find(char c) const noexcept {
    const auto idx = index_[static_cast<unsigned char>(c)];
    if (idx < 0) return std::nullopt;
    return static_cast<std::size_t>(idx);
  }
  bool contains(char c) const noexcept { return index_[static_cast<unsigned char>(c)] >= 0; }
  std::size_t index_of(char c) const;

  // |Σ|^length, or an error when it exceeds kMaxWords.
  std::uint64_t word_count(std::size_t length) const;
  std::uint64_t word_index(std::string_view word) const;
  std::string word(std::uint64_t index, std::size_t length) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) noexcept {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::string symbols_;
  std::array<std::int16_t, 256> index_{};
};

// ℓ ≥ 1: the set Σ^ℓ of words of length ℓ, in lexicographic index order.
struct OutcomeSpace {
  Alphabet alphabet;
  std::size_t length = 1;

  OutcomeSpace(Alphabet a, std::size_t l = 1);

  std::uint64_t size() const { return alphabet.word_count(length); }
  std::string outcome(std::uint64_t index) const { return alphabet.word(index, length); }

  friend bool operator==(const OutcomeSpace& a, const OutcomeSpace& b) noexcept {
    return a.length == b.length && a.alphabet == b.alphabet;
  }
};

}  // namespace divnorm
