#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divnorm/alphabet.hpp"
#include "divnorm/measures.hpp"
#include "divnorm/stream.hpp"

namespace divnorm {

// Number of m with 0 ≤ m ≤ |x|/|w| − 1 such that x[m|w| .. (m+1)|w| − 1] = w.
std::uint64_t block_occurrences(std::string_view w, std::string_view x);

// Streaming counter of non-overlapping ℓ-blocks aligned to position 0.
//
// State is one count per word of Σ^ℓ plus the pending partial block, so memory
// does not depend on how many symbols have been fed.
class BlockCounter {
 public:
  BlockCounter(Alphabet alphabet, std::size_t block_length);

  // Throws DomainError naming the symbol and its stream position when a
  // symbol is not in the alphabet; the counter is unchanged in that case.
  void feed(std::string_view symbols);
  // Feeds symbol indices that are already validated.
  void feed_index(std::size_t symbol_index) noexcept {
    pending_ = pending_ * k_ + symbol_index;
    ++consumed_;
    if (++pending_len_ == block_length_) {
      ++counts_[pending_];
      ++blocks_;
      pending_ = 0;
      pending_len_ = 0;
    }
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t block_length() const noexcept { return block_length_; }
  std::uint64_t blocks() const noexcept { return blocks_; }
  std::uint64_t symbols_consumed() const noexcept { return consumed_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::uint64_t count(std::string_view word) const;
  std::string carry() const;

 private:
  Alphabet alphabet_;
  std::size_t block_length_;
  std::uint64_t k_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t blocks_ = 0;
  std::uint64_t consumed_ = 0;
  std::uint64_t pending_ = 0;
  std::size_t pending_len_ = 0;
};

// π_{S,n}^{(ℓ)}: counts(w)/n as exact rationals, tagged with (ℓ, n).
struct EmpiricalMeasure {
  Prob measure;
  std::size_t block_length;
  std::uint64_t blocks;
};

EmpiricalMeasure empirical_measure(const BlockCounter& counter);
// Same construction from a raw count vector over Σ^ℓ.
EmpiricalMeasure empirical_measure(const Alphabet& alphabet, std::size_t block_length,
                                   std::span<const std::uint64_t> counts);

// π_{S,n}^{(ℓ)} of an in-memory prefix: counts the first n aligned ℓ-blocks.
EmpiricalMeasure empirical_measure(const Alphabet& alphabet, std::string_view prefix,
                                   std::size_t block_length, std::uint64_t blocks);

}  // namespace divnorm
