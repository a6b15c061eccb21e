#include "divnorm/synthesis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "divnorm/errors.hpp"

namespace divnorm {
namespace {

std::uint64_t length_offset(std::size_t k, std::size_t length) {
  std::uint64_t offset = 0, power = 1;
  for (std::size_t j = 0; j < length; ++j) {
    offset += power;
    power *= k;
  }
  return offset;
}

}  // namespace

BlockMeasure::BlockMeasure(Prob measure) : measure_(std::move(measure)) {
  if (measure_.mode() != NumericMode::exact) throw DomainError("π₀ must have exact rational weights");
  const std::size_t l = block_length();
  const std::size_t k = alphabet().size();
  masses_.resize(l + 1);
  masses_[l].assign(measure_.exact_weights().begin(), measure_.exact_weights().end());
  for (std::size_t len = l; len-- > 0;) {
    const auto& longer = masses_[len + 1];
    auto& row = masses_[len];
    row.assign(longer.size() / k, Rational(0));
    for (std::size_t i = 0; i < longer.size(); ++i) row[i / k] += longer[i];
  }
}

const Rational& BlockMeasure::prefix_mass(std::string_view w) const {
  if (w.size() > block_length())
    throw DomainError("prefix '" + std::string(w) + "' is longer than ℓ = " + std::to_string(block_length()));
  return masses_[w.size()][alphabet().word_index(w)];
}

Rational conditional(const BlockMeasure& pi0, std::string_view w, char a) {
  if (w.size() >= pi0.block_length())
    throw DomainError("conditional needs |w| < ℓ = " + std::to_string(pi0.block_length()));
  const Alphabet& sigma = pi0.alphabet();
  const Rational& denom = pi0.prefix_mass(w);
  if (denom == 0) return Rational(1, static_cast<unsigned long>(sigma.size()));
  const std::uint64_t idx = sigma.word_index(w) * sigma.size() + sigma.index_of(a);
  return pi0.prefix_mass(w.size() + 1, idx) / denom;
}

std::uint64_t exploit_state_count(const Alphabet& alphabet, std::size_t block_length) {
  if (block_length == 0) throw DomainError("ℓ must be at least 1");
  alphabet.word_count(block_length);  // memory guard
  return length_offset(alphabet.size(), block_length);
}

std::size_t exploit_state_index(const Alphabet& alphabet, std::string_view w) {
  return length_offset(alphabet.size(), w.size()) + alphabet.word_index(w);
}

std::string exploit_state_word(const Alphabet& alphabet, std::size_t block_length, std::size_t state) {
  const std::size_t k = alphabet.size();
  std::uint64_t power = 1;
  for (std::size_t len = 0; len < block_length; ++len) {
    if (state < power) return alphabet.word(state, len);
    state -= power;
    power *= k;
  }
  throw DomainError("state index is out of range");
}

Gambler exploit_gambler(const BlockMeasure& pi0) {
  const Alphabet& sigma = pi0.alphabet();
  const std::size_t l = pi0.block_length();
  const std::size_t k = sigma.size();
  const auto n_states = exploit_state_count(sigma, l);
  std::vector<std::uint32_t> transitions(n_states * k);
  std::vector<Prob> bets;
  bets.reserve(n_states);
  std::size_t state = 0;
  for (std::size_t len = 0; len < l; ++len) {
    const std::uint64_t words = sigma.word_count(len);
    for (std::uint64_t idx = 0; idx < words; ++idx, ++state) {
      const Rational& mass = pi0.prefix_mass(len, idx);
      std::vector<Rational> row(k);
      for (std::size_t a = 0; a < k; ++a) {
        const std::uint64_t child = idx * k + a;
        row[a] = mass == 0 ? Rational(1, static_cast<unsigned long>(k)) : pi0.prefix_mass(len + 1, child) / mass;
        transitions[state * k + a] =
            len + 1 < l ? static_cast<std::uint32_t>(length_offset(k, len + 1) + child) : 0;
      }
      bets.push_back(Prob::exact(OutcomeSpace(sigma), std::move(row)));
    }
  }
  return Gambler(sigma, 0, std::move(transitions), std::move(bets));
}

bool is_fallback_state(const BlockMeasure& pi0, std::size_t state) {
  const std::string w = exploit_state_word(pi0.alphabet(), pi0.block_length(), state);
  return pi0.prefix_mass(w) == 0;
}

Pi0Selection select_pi0(SymbolStream& sequence, const Prob& alpha, std::size_t block_length,
                        const CheckpointSpec& checkpoints, double tail_fraction) {
  if (!(sequence.alphabet() == alpha.alphabet())) throw DomainError("sequence and α use different alphabets");
  DivergenceAccumulator acc(alpha, block_length, checkpoints, true);
  std::vector<char> buf(kStreamChunk);
  std::vector<std::uint8_t> indices;
  std::uint64_t position = 0;
  while (const std::size_t n = sequence.read(buf)) {
    to_symbol_indices(alpha.alphabet(), {buf.data(), n}, position, indices);
    acc.consume(indices);
    position += n;
  }
  acc.finish();
  const DivergenceTrace& trace = acc.trace();
  if (trace.values.empty()) throw DomainError("select_pi0 needs at least one checkpoint with a complete block");
  const std::size_t first = tail_start(trace.values.size(), tail_fraction);
  std::size_t best = first;
  for (std::size_t i = first; i < trace.values.size(); ++i)
    if (trace.values[i] >= trace.values[best]) best = i;
  auto empirical = empirical_measure(alpha.alphabet(), block_length, acc.snapshots()[best]);
  return Pi0Selection{BlockMeasure(std::move(empirical.measure)), trace.checkpoints[best], trace.values[best],
                      trace};
}

Pi0Selection select_pi0(std::string_view sequence, const Prob& alpha, std::size_t block_length,
                        const CheckpointSpec& checkpoints, double tail_fraction) {
  StringSymbolStream s(alpha.alphabet(), sequence);
  return select_pi0(s, alpha, block_length, checkpoints, tail_fraction);
}

GrowthReport verify_growth_bound(const CapitalTrace& trace, const BlockMeasure& pi0, const Prob& alpha,
                                 std::string_view sequence) {
  const std::size_t l = pi0.block_length();
  if (sequence.size() < trace.steps() || sequence.substr(0, trace.steps()) != trace.symbols)
    throw DomainError("trace was not produced on this sequence");
  const Prob reference = product_extension(alpha, l);
  const Prob pi0_mode = pi0.measure().to_mode(alpha.mode());

  std::vector<bool> fallback(exploit_state_count(pi0.alphabet(), l));
  for (std::size_t q = 0; q < fallback.size(); ++q) fallback[q] = is_fallback_state(pi0, q);

  GrowthReport report;
  report.block_length = l;
  BlockCounter counter(pi0.alphabet(), l);
  std::uint64_t fed = 0;
  bool traversed = false;
  for (const auto step : trace.checkpoints) {
    if (step == 0) continue;
    if (step % l != 0) {
      report.skipped.push_back(step);
      continue;
    }
    counter.feed(sequence.substr(fed, step - fed));
    for (; fed < step; ++fed) traversed = traversed || fallback.at(trace.states[fed]);

    GrowthRow row;
    row.blocks = step / l;
    row.steps = step;
    row.log2_capital = trace.log2_capital[step];
    const Prob empirical = empirical_measure(counter).measure.to_mode(alpha.mode());
    row.divergence_alpha = kl_divergence(empirical, reference);
    row.divergence_pi0 = kl_divergence(empirical, pi0_mode);
    row.fallback_traversed = traversed;
    if (row.divergence_alpha.is_infinite() || row.divergence_pi0.is_infinite() || std::isinf(row.log2_capital)) {
      row.predicted = std::numeric_limits<double>::quiet_NaN();
      row.residual = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.predicted =
          static_cast<double>(row.blocks) * (row.divergence_alpha.value() - row.divergence_pi0.value());
      row.residual = row.log2_capital - row.predicted;
    }
    report.rows.push_back(row);
  }
  return report;
}

Gambler empirical_exploit(const Alphabet& alphabet, std::string_view sequence, std::uint64_t blocks,
                          std::size_t block_length) {
  if (blocks == 0) throw DomainError("empirical gambler needs n ≥ 1");
  return exploit_gambler(BlockMeasure(empirical_measure(alphabet, sequence, block_length, blocks).measure));
}

std::string format_block_measure(const BlockMeasure& pi0) {
  const Prob& m = pi0.measure();
  std::string out = "block-measure " + std::to_string(pi0.block_length()) + "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.exact_weight(i) == 0) continue;
    out += "mass " + m.space().outcome(i) + " " + format_rational(m.exact_weight(i)) + "\n";
  }
  return out;
}

BlockMeasure parse_block_measure(std::string_view text, const Alphabet& alphabet) {
  std::optional<std::size_t> length;
  std::vector<std::optional<Rational>> masses;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream in(line);
    std::vector<std::string> tok;
    for (std::string t; in >> t;) tok.push_back(t);
    if (tok[0] == "block-measure") {
      if (length) throw ParseError("duplicate block-measure header", line_no);
      if (tok.size() != 2 || tok[1].find_first_not_of("0123456789") != std::string::npos || tok[1].size() > 4)
        throw ParseError("expected 'block-measure <l>'", line_no);
      const auto l = std::stoul(tok[1]);
      if (l == 0) throw ParseError("block length must be at least 1", line_no);
      length = l;
      masses.assign(alphabet.word_count(l), std::nullopt);
    } else if (tok[0] == "mass") {
      if (!length) throw ParseError("'mass' before the block-measure header", line_no);
      if (tok.size() != 3) throw ParseError("expected 'mass <word> <num>/<den>'", line_no);
      const std::string& w = tok[1];
      if (w.size() != *length) throw ParseError("word '" + w + "' does not have length " + std::to_string(*length), line_no);
      for (const char c : w)
        if (!alphabet.contains(c)) throw ParseError(std::string("symbol '") + c + "' is not in the alphabet", line_no);
      auto& slot = masses[alphabet.word_index(w)];
      if (slot) throw ParseError("duplicate mass for '" + w + "'", line_no);
      try {
        slot = parse_rational(tok[2]);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
      }
    } else {
      throw ParseError("unknown directive '" + tok[0] + "'", line_no);
    }
  }
  if (!length) throw ParseError("missing block-measure header", line_no);
  std::vector<Rational> weights(masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i) weights[i] = masses[i].value_or(Rational(0));
  return BlockMeasure(Prob::exact(OutcomeSpace(alphabet, *length), std::move(weights)));
}

}  // namespace divnorm
