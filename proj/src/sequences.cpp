#include "divnorm/sequences.hpp"

#include <algorithm>
#include <cctype>

#include "divnorm/errors.hpp"

namespace divnorm {
namespace {

using u128 = unsigned __int128;

// Shared shape of the generators: a pure symbol recurrence cut off at a length.
class GeneratedStream : public SymbolStream {
 public:
  GeneratedStream(Alphabet alphabet, std::uint64_t length) : alphabet_(std::move(alphabet)), left_(length) {}

  std::size_t read(std::span<char> out) override {
    const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(out.size(), left_));
    for (std::size_t i = 0; i < n; ++i) out[i] = alphabet_.symbol(next_index());
    left_ -= n;
    return n;
  }
  const Alphabet& alphabet() const noexcept override { return alphabet_; }

 protected:
  virtual std::size_t next_index() = 0;

 private:
  Alphabet alphabet_;
  std::uint64_t left_;
};

class ChampernowneStream final : public GeneratedStream {
 public:
  ChampernowneStream(const Alphabet& a, std::uint64_t length)
      : GeneratedStream(a, length), k_(a.size()), digits_{1} {}

 private:
  std::size_t next_index() override {
    if (pos_ == digits_.size()) {
      // Increment the base-k numeral held most significant digit first.
      std::size_t i = digits_.size();
      while (i > 0 && digits_[i - 1] == k_ - 1) digits_[--i] = 0;
      if (i == 0)
        digits_.insert(digits_.begin(), 1);
      else
        ++digits_[i - 1];
      pos_ = 0;
    }
    return digits_[pos_++];
  }

  std::size_t k_;
  std::vector<std::size_t> digits_;
  std::size_t pos_ = 0;
};

class LexcatStream final : public GeneratedStream {
 public:
  LexcatStream(const Alphabet& a, std::uint64_t length) : GeneratedStream(a, length), k_(a.size()), word_{0} {}

 private:
  std::size_t next_index() override {
    if (pos_ == word_.size()) {
      std::size_t i = word_.size();
      while (i > 0 && word_[i - 1] == k_ - 1) word_[--i] = 0;
      if (i == 0)
        word_.assign(word_.size() + 1, 0);
      else
        ++word_[i - 1];
      pos_ = 0;
    }
    return word_[pos_++];
  }

  std::size_t k_;
  std::vector<std::size_t> word_;
  std::size_t pos_ = 0;
};

class CycleStream final : public GeneratedStream {
 public:
  CycleStream(const Alphabet& a, std::vector<std::size_t> cycle, std::uint64_t length)
      : GeneratedStream(a, length), cycle_(std::move(cycle)) {}

 private:
  std::size_t next_index() override {
    const auto v = cycle_[pos_];
    if (++pos_ == cycle_.size()) pos_ = 0;
    return v;
  }

  std::vector<std::size_t> cycle_;
  std::size_t pos_ = 0;
};

class IidStream final : public GeneratedStream {
 public:
  IidStream(const Prob& alpha, std::uint64_t seed, std::uint64_t length)
      : GeneratedStream(alpha.alphabet(), length), rng_(seed) {
    if (alpha.space().length != 1) throw DomainError("iid needs a measure on single symbols");
    const std::size_t k = alpha.size();
    const BigInt two64 = BigInt(1) << 64;
    Rational cum = 0;
    std::size_t last_positive = 0;
    for (std::size_t a = 0; a < k; ++a)
      if (alpha.weight(a) > 0.0 || (alpha.mode() == NumericMode::exact && alpha.exact_weight(a) > 0))
        last_positive = a;
    for (std::size_t a = 0; a < k; ++a) {
      cum += alpha.mode() == NumericMode::exact ? alpha.exact_weight(a) : Rational(alpha.weight(a));
      u128 t;
      if (a >= last_positive) {
        t = u128(1) << 64;
      } else {
        BigInt floor_value;
        mpz_fdiv_q(floor_value.get_mpz_t(), BigInt(cum.get_num() * two64).get_mpz_t(), cum.get_den_mpz_t());
        if (floor_value >= two64) {
          t = u128(1) << 64;
        } else {
          const auto hi = static_cast<std::uint64_t>(BigInt(floor_value >> 32).get_ui());
          const auto lo = static_cast<std::uint64_t>(BigInt(floor_value & 0xffffffffUL).get_ui());
          t = (u128(hi) << 32) | lo;
        }
      }
      thresholds_.push_back(t);
    }
  }

 private:
  std::size_t next_index() override {
    const u128 x = rng_.next();
    std::size_t a = 0;
    while (x >= thresholds_[a]) ++a;
    return a;
  }

  SplitMix64 rng_;
  std::vector<u128> thresholds_;
};

class OwningLimit final : public SymbolStream {
 public:
  OwningLimit(std::unique_ptr<SymbolStream> inner, std::uint64_t limit)
      : inner_(std::move(inner)), limited_(*inner_, limit) {}

  std::size_t read(std::span<char> out) override { return limited_.read(out); }
  const Alphabet& alphabet() const noexcept override { return inner_->alphabet(); }

 private:
  std::unique_ptr<SymbolStream> inner_;
  LimitedSymbolStream limited_;
};

std::vector<std::size_t> debruijn_indices(const Alphabet& alphabet, std::size_t order) {
  if (order == 0) throw DomainError("de Bruijn order must be at least 1");
  alphabet.word_count(order);  // memory guard
  const std::size_t k = alphabet.size();
  // Lyndon words of length dividing the order, in lexicographic order, via
  // Duval's successor; their concatenation is the least de Bruijn cycle.
  std::vector<std::size_t> out, w{0};
  for (;;) {
    if (order % w.size() == 0) out.insert(out.end(), w.begin(), w.end());
    const std::size_t m = w.size();
    std::vector<std::size_t> next;
    next.reserve(order);
    while (next.size() < order) next.push_back(w[next.size() % m]);
    while (!next.empty() && next.back() == k - 1) next.pop_back();
    if (next.empty()) break;
    ++next.back();
    w = std::move(next);
  }
  return out;
}

}  // namespace

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

std::string_view to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::champernowne: return "champernowne";
    case SequenceKind::lexcat: return "lexcat";
    case SequenceKind::periodic: return "periodic";
    case SequenceKind::iid: return "iid";
    case SequenceKind::debruijn: return "debruijn";
    case SequenceKind::file: return "file";
  }
  return "?";
}

SequenceKind parse_sequence_kind(std::string_view text) {
  for (auto k : {SequenceKind::champernowne, SequenceKind::lexcat, SequenceKind::periodic, SequenceKind::iid,
                 SequenceKind::debruijn, SequenceKind::file})
    if (to_string(k) == text) return k;
  throw DomainError("unknown sequence kind '" + std::string(text) + "'");
}

std::unique_ptr<SymbolStream> open_sequence(const SequenceSpec& spec) {
  if (spec.kind == SequenceKind::file) {
    auto file = std::make_unique<SequenceFile>(spec.path, spec.alphabet);
    if (!spec.length) return file;
    return std::make_unique<OwningLimit>(std::move(file), *spec.length);
  }
  if (!spec.length || *spec.length == 0) throw DomainError("generated sequences need a length ≥ 1");
  const std::uint64_t n = *spec.length;
  const Alphabet& sigma = spec.alphabet;
  switch (spec.kind) {
    case SequenceKind::champernowne: return std::make_unique<ChampernowneStream>(sigma, n);
    case SequenceKind::lexcat: return std::make_unique<LexcatStream>(sigma, n);
    case SequenceKind::periodic: {
      if (spec.pattern.empty()) throw DomainError("periodic sequences need a nonempty pattern");
      std::vector<std::size_t> cycle;
      for (const char c : spec.pattern) {
        const auto idx = sigma.find(c);
        if (!idx) throw DomainError(std::string("pattern symbol '") + c + "' is not in the alphabet");
        cycle.push_back(*idx);
      }
      return std::make_unique<CycleStream>(sigma, std::move(cycle), n);
    }
    case SequenceKind::iid: {
      const Prob alpha = spec.alpha ? *spec.alpha : Prob::uniform(OutcomeSpace(sigma));
      if (!(alpha.alphabet() == sigma)) throw DomainError("iid measure is not on the sequence alphabet");
      return std::make_unique<IidStream>(alpha, spec.seed, n);
    }
    case SequenceKind::debruijn:
      return std::make_unique<CycleStream>(sigma, debruijn_indices(sigma, spec.order), n);
    case SequenceKind::file: break;
  }
  throw DomainError("unsupported sequence kind");
}

std::string champernowne(const Alphabet& alphabet, std::uint64_t length) {
  ChampernowneStream s(alphabet, length);
  return read_all(s);
}

std::string lexcat(const Alphabet& alphabet, std::uint64_t length) {
  LexcatStream s(alphabet, length);
  return read_all(s);
}

std::string periodic(std::string_view pattern, std::uint64_t length) {
  if (pattern.empty()) throw DomainError("periodic sequences need a nonempty pattern");
  std::string out;
  out.reserve(length);
  while (out.size() < length) out.append(pattern.substr(0, std::min<std::uint64_t>(pattern.size(), length - out.size())));
  return out;
}

std::string iid(const Prob& alpha, std::uint64_t seed, std::uint64_t length) {
  IidStream s(alpha, seed, length);
  return read_all(s);
}

std::string debruijn(const Alphabet& alphabet, std::size_t order, std::uint64_t length) {
  CycleStream s(alphabet, debruijn_indices(alphabet, order), length);
  return read_all(s);
}

std::string debruijn_cycle(const Alphabet& alphabet, std::size_t order) {
  std::string out;
  for (const auto i : debruijn_indices(alphabet, order)) out += alphabet.symbol(i);
  return out;
}

SequenceReader::SequenceReader(std::istream& in, std::optional<Alphabet> override_alphabet)
    : in_(in), buffer_(kStreamChunk) {
  static constexpr std::string_view kHeader = "#alphabet:";
  if (in_.peek() == '#') {
    std::string line;
    std::getline(in_, line);
    offset_ = line.size() + (in_.eof() ? 0 : 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(kHeader, 0) != 0) throw ParseError("first line starts with '#' but is not an #alphabet: header", 1, 0);
    try {
      alphabet_.emplace(line.substr(kHeader.size()));
    } catch (const DomainError& e) {
      throw ParseError(std::string("bad alphabet header: ") + e.what(), 1, 0);
    }
    line_ = 2;
    if (override_alphabet && !(*override_alphabet == *alphabet_))
      throw ParseError("file declares alphabet '" + alphabet_->symbols() + "' but '" +
                           override_alphabet->symbols() + "' was requested",
                       1, 0);
  } else if (override_alphabet) {
    alphabet_ = std::move(override_alphabet);
  } else {
    throw ParseError("sequence has no #alphabet: header and no alphabet was given", 1, 0);
  }
}

bool SequenceReader::refill() {
  if (eof_) return false;
  offset_ += buffer_len_;
  in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  buffer_len_ = static_cast<std::size_t>(in_.gcount());
  buffer_pos_ = 0;
  if (in_.bad()) throw IoError("read error on sequence input");
  if (buffer_len_ == 0) eof_ = true;
  return buffer_len_ > 0;
}

std::size_t SequenceReader::read(std::span<char> out) {
  std::size_t n = 0;
  while (n < out.size()) {
    if (buffer_pos_ == buffer_len_ && !refill()) break;
    const char c = buffer_[buffer_pos_];
    if (c == '\n') ++line_;
    if (!std::isspace(static_cast<unsigned char>(c))) {
      if (!alphabet_->contains(c))
        throw ParseError(std::string("symbol '") + c + "' is not in alphabet '" + alphabet_->symbols() + "'", line_,
                         offset_ + buffer_pos_);
      out[n++] = c;
    }
    ++buffer_pos_;
  }
  return n;
}

SequenceFile::SequenceFile(const std::string& path, std::optional<Alphabet> override_alphabet)
    : file_(path, std::ios::binary) {
  if (!file_) throw IoError("cannot open sequence file '" + path + "'");
  reader_ = std::make_unique<SequenceReader>(file_, std::move(override_alphabet));
}

void write_sequence(std::ostream& out, SymbolStream& sequence) {
  out << "#alphabet:" << sequence.alphabet().symbols() << '\n';
  std::vector<char> buf(kStreamChunk);
  std::size_t column = 0;
  while (const std::size_t n = sequence.read(buf)) {
    for (std::size_t i = 0; i < n; ++i) {
      out.put(buf[i]);
      if (++column == kSequenceLineWidth) {
        out.put('\n');
        column = 0;
      }
    }
  }
  if (column != 0) out.put('\n');
}

std::string format_sequence(const Alphabet& alphabet, std::string_view symbols) {
  std::string out = "#alphabet:" + alphabet.symbols() + "\n";
  for (std::size_t i = 0; i < symbols.size(); i += kSequenceLineWidth) {
    out.append(symbols.substr(i, kSequenceLineWidth));
    out += '\n';
  }
  return out;
}

}  // namespace divnorm
