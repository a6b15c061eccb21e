#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "divnorm/alphabet.hpp"

namespace divnorm {

// Single-consumer pull source of symbols over a declared alphabet.
class SymbolStream {
 public:
  virtual ~SymbolStream() = default;

  // Fills up to out.size() symbols; returns 0 only at end of stream.
  virtual std::size_t read(std::span<char> out) = 0;
  virtual const Alphabet& alphabet() const noexcept = 0;
};

// Reads a view; the caller keeps the viewed storage alive.
class StringSymbolStream final : public SymbolStream {
 public:
  StringSymbolStream(Alphabet alphabet, std::string_view symbols)
      : alphabet_(std::move(alphabet)), symbols_(symbols) {}

  std::size_t read(std::span<char> out) override;
  const Alphabet& alphabet() const noexcept override { return alphabet_; }

 private:
  Alphabet alphabet_;
  std::string_view symbols_;
  std::size_t pos_ = 0;
};

// Passes through at most `limit` symbols of another stream.
class LimitedSymbolStream final : public SymbolStream {
 public:
  LimitedSymbolStream(SymbolStream& inner, std::size_t limit) : inner_(inner), left_(limit) {}

  std::size_t read(std::span<char> out) override;
  const Alphabet& alphabet() const noexcept override { return inner_.alphabet(); }

 private:
  SymbolStream& inner_;
  std::size_t left_;
};

inline constexpr std::size_t kStreamChunk = 1 << 16;

// Drains a stream into memory.
std::string read_all(SymbolStream& stream);

}  // namespace divnorm
