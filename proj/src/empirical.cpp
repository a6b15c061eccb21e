#include "divnorm/empirical.hpp"

#include "divnorm/errors.hpp"

namespace divnorm {

std::uint64_t block_occurrences(std::string_view w, std::string_view x) {
  if (w.empty()) throw DomainError("block_occurrences needs a nonempty word");
  std::uint64_t hits = 0;
  for (std::size_t start = 0; start + w.size() <= x.size(); start += w.size())
    if (x.compare(start, w.size(), w) == 0) ++hits;
  return hits;
}

BlockCounter::BlockCounter(Alphabet alphabet, std::size_t block_length)
    : alphabet_(std::move(alphabet)), block_length_(block_length), k_(alphabet_.size()) {
  if (block_length_ == 0) throw DomainError("block length must be at least 1");
  counts_.assign(alphabet_.word_count(block_length_), 0);
}

void BlockCounter::feed(std::string_view symbols) {
  for (std::size_t i = 0; i < symbols.size(); ++i)
    if (!alphabet_.contains(symbols[i]))
      throw DomainError(std::string("symbol '") + symbols[i] + "' at stream position " +
                        std::to_string(consumed_ + i) + " is not in alphabet '" +
                        alphabet_.symbols() + "'");
  for (char c : symbols) feed_index(*alphabet_.find(c));
}

std::uint64_t BlockCounter::count(std::string_view word) const {
  if (word.size() != block_length_) throw DomainError("word length differs from the block length");
  return counts_[alphabet_.word_index(word)];
}

std::string BlockCounter::carry() const { return alphabet_.word(pending_, pending_len_); }

EmpiricalMeasure empirical_measure(const Alphabet& alphabet, std::size_t block_length,
                                   std::span<const std::uint64_t> counts) {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) throw DomainError("empirical measure is undefined before the first complete block");
  std::vector<Rational> weights;
  weights.reserve(counts.size());
  const BigInt denom(static_cast<unsigned long>(n));
  for (auto c : counts) {
    Rational w(BigInt(static_cast<unsigned long>(c)), denom);
    w.canonicalize();
    weights.push_back(std::move(w));
  }
  return {Prob::exact(OutcomeSpace(alphabet, block_length), std::move(weights)), block_length, n};
}

EmpiricalMeasure empirical_measure(const BlockCounter& counter) {
  return empirical_measure(counter.alphabet(), counter.block_length(), counter.counts());
}

EmpiricalMeasure empirical_measure(const Alphabet& alphabet, std::string_view prefix,
                                   std::size_t block_length, std::uint64_t blocks) {
  if (prefix.size() / block_length < blocks)
    throw DomainError("prefix holds fewer than the requested number of blocks");
  BlockCounter counter(alphabet, block_length);
  counter.feed(prefix.substr(0, blocks * block_length));
  return empirical_measure(counter);
}

}  // namespace divnorm
