#include "divnorm/alphabet.hpp"

#include <cctype>

#include "divnorm/errors.hpp"

namespace divnorm {

Alphabet::Alphabet(std::string_view symbols) : symbols_(symbols) {
  index_.fill(-1);
  if (symbols_.size() < 2) throw DomainError("alphabet needs at least two symbols");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const auto c = static_cast<unsigned char>(symbols_[i]);
    if (!std::isprint(c) || std::isspace(c))
      throw DomainError("alphabet symbols must be printable and non-whitespace");
    if (index_[c] >= 0)
      throw DomainError(std::string("duplicate alphabet symbol '") + symbols_[i] + "'");
    index_[c] = static_cast<std::int16_t>(i);
  }
}

std::size_t Alphabet::index_of(char c) const {
  const auto idx = find(c);
  if (!idx) throw DomainError(std::string("symbol '") + c + "' is not in alphabet '" + symbols_ + "'");
  return *idx;
}

std::uint64_t Alphabet::word_count(std::size_t length) const {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < length; ++i) {
    n *= size();
    if (n > kMaxWords)
      throw DomainError("outcome space |Σ|^" + std::to_string(length) + " exceeds the " +
                        std::to_string(kMaxWords) + "-word limit");
  }
  return n;
}

std::uint64_t Alphabet::word_index(std::string_view word) const {
  std::uint64_t idx = 0;
  for (char c : word) idx = idx * size() + index_of(c);
  return idx;
}

std::string Alphabet::word(std::uint64_t index, std::size_t length) const {
  std::string w(length, symbols_[0]);
  for (std::size_t i = length; i-- > 0;) {
    w[i] = symbols_[index % size()];
    index /= size();
  }
  return w;
}

OutcomeSpace::OutcomeSpace(Alphabet a, std::size_t l) : alphabet(std::move(a)), length(l) {
  if (length == 0) throw DomainError("outcome words must have length at least 1");
  (void)alphabet.word_count(length);
}

}  // namespace divnorm
