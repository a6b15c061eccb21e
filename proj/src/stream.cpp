#include "divnorm/stream.hpp"

#include <algorithm>
#include <vector>

namespace divnorm {

std::size_t StringSymbolStream::read(std::span<char> out) {
  const std::size_t n = std::min(out.size(), symbols_.size() - pos_);
  std::copy_n(symbols_.data() + pos_, n, out.data());
  pos_ += n;
  return n;
}

std::size_t LimitedSymbolStream::read(std::span<char> out) {
  if (left_ == 0) return 0;
  const std::size_t n = inner_.read(out.first(std::min(out.size(), left_)));
  left_ -= n;
  return n;
}

std::string read_all(SymbolStream& stream) {
  std::string all;
  std::vector<char> buf(kStreamChunk);
  while (const std::size_t n = stream.read(buf)) all.append(buf.data(), n);
  return all;
}

}  // namespace divnorm
