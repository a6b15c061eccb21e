#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "divnorm/alphabet.hpp"
#include "divnorm/measures.hpp"
#include "divnorm/stream.hpp"

namespace divnorm {

// SplitMix64 (Steele, Lea & Flood): state += 0x9e3779b97f4a7c15 and a fixed
// xor-shift-multiply finalizer. Portable and bit-exact everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

enum class SequenceKind { champernowne, lexcat, periodic, iid, debruijn, file };

std::string_view to_string(SequenceKind kind);
SequenceKind parse_sequence_kind(std::string_view text);

struct SequenceSpec {
  SequenceKind kind = SequenceKind::periodic;
  Alphabet alphabet = Alphabet::binary();
  std::string pattern;                  // periodic
  std::uint64_t seed = 0;               // iid
  std::optional<Prob> alpha;            // iid; uniform when absent
  std::size_t order = 1;                // debruijn
  std::string path;                     // file
  std::optional<std::uint64_t> length;  // required except for file
};

// Generator streams are pure functions of the spec; file specs open the file.
std::unique_ptr<SymbolStream> open_sequence(const SequenceSpec& spec);

// Base-|Σ| numerals of 1, 2, 3, ... concatenated (digit d is symbol d).
std::string champernowne(const Alphabet& alphabet, std::uint64_t length);
// All words of length 1, then 2, ..., each group in lexicographic order.
std::string lexcat(const Alphabet& alphabet, std::uint64_t length);
std::string periodic(std::string_view pattern, std::uint64_t length);
// Inverse CDF on the top of each SplitMix64 output: symbol a is chosen when
// x < ⌊2^64·Σ_{b≤a} α(b)⌋ first holds, with the thresholds computed exactly.
std::string iid(const Prob& alpha, std::uint64_t seed, std::uint64_t length);
// Lexicographically least de Bruijn cycle B(|Σ|, n), repeated.
std::string debruijn(const Alphabet& alphabet, std::size_t order, std::uint64_t length);
std::string debruijn_cycle(const Alphabet& alphabet, std::size_t order);

// Sequence text format: optional first line `#alphabet:<symbols>`, then raw
// symbols; whitespace is ignored. Reads through a bounded buffer.
class SequenceReader final : public SymbolStream {
 public:
  // `override_alphabet` is used when the input has no header; a header that
  // disagrees with it is a ParseError.
  SequenceReader(std::istream& in, std::optional<Alphabet> override_alphabet = std::nullopt);

  std::size_t read(std::span<char> out) override;
  const Alphabet& alphabet() const noexcept override { return *alphabet_; }

 private:
  bool refill();

  std::istream& in_;
  std::optional<Alphabet> alphabet_;
  std::vector<char> buffer_;
  std::size_t buffer_pos_ = 0;
  std::size_t buffer_len_ = 0;
  std::uint64_t offset_ = 0;  // byte offset of buffer_[0]
  std::uint64_t line_ = 1;
  bool eof_ = false;
};

class SequenceFile final : public SymbolStream {
 public:
  explicit SequenceFile(const std::string& path,
                        std::optional<Alphabet> override_alphabet = std::nullopt);

  std::size_t read(std::span<char> out) override { return reader_->read(out); }
  const Alphabet& alphabet() const noexcept override { return reader_->alphabet(); }

 private:
  std::ifstream file_;
  std::unique_ptr<SequenceReader> reader_;
};

inline constexpr std::size_t kSequenceLineWidth = 80;

// Header line, then the body wrapped at kSequenceLineWidth with a final newline.
void write_sequence(std::ostream& out, SymbolStream& sequence);
std::string format_sequence(const Alphabet& alphabet, std::string_view symbols);

}  // namespace divnorm
