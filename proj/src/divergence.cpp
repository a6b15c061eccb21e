#include "divnorm/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "divnorm/errors.hpp"

namespace divnorm {
namespace {

std::vector<double> float_weights(std::span<const std::uint64_t> counts, std::uint64_t n) {
  std::vector<double> w(counts.size());
  const double denom = static_cast<double>(n);
  for (std::size_t i = 0; i < counts.size(); ++i) w[i] = static_cast<double>(counts[i]) / denom;
  return w;
}

Prob counts_to_prob(const BlockCounter& counter, NumericMode mode) {
  if (mode == NumericMode::exact) return empirical_measure(counter).measure;
  return Prob::floating(OutcomeSpace(counter.alphabet(), counter.block_length()),
                        float_weights(counter.counts(), counter.blocks()));
}

void require_alphabet(const SymbolStream& stream, const Prob& alpha) {
  if (!(stream.alphabet() == alpha.alphabet()))
    throw DomainError("sequence alphabet '" + stream.alphabet().symbols() +
                      "' differs from the measure's alphabet '" + alpha.alphabet().symbols() + "'");
}

void check_tail_fraction(double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw DomainError("tail fraction must lie in (0, 1]");
}

}  // namespace

std::size_t tail_start(std::size_t count, double tail_fraction) {
  check_tail_fraction(tail_fraction);
  if (count == 0) return 0;
  auto window = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(count)));
  window = std::clamp<std::size_t>(window, 1, count);
  return count - window;
}

TailEstimate estimate_limits(std::span<const ExtReal> values, double tail_fraction) {
  if (values.empty()) throw DomainError("cannot estimate limits of an empty trace");
  const auto tail = values.subspan(tail_start(values.size(), tail_fraction));
  ExtReal upper = tail.front();
  bool have_finite = false;
  ExtReal lower = ExtReal::infinity();
  for (const auto v : tail) {
    upper = std::max(upper, v);
    if (v.is_finite()) {
      lower = have_finite ? std::min(lower, v) : v;
      have_finite = true;
    }
  }
  return {lower, upper};
}

TailEstimate estimate_limits(const DivergenceTrace& trace, double tail_fraction) {
  return estimate_limits(trace.values, tail_fraction);
}

void to_symbol_indices(const Alphabet& alphabet, std::string_view chunk, std::uint64_t position,
                       std::vector<std::uint8_t>& out) {
  out.resize(chunk.size());
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    const auto idx = alphabet.find(chunk[i]);
    if (!idx)
      throw DomainError(std::string("symbol '") + chunk[i] + "' at stream position " +
                        std::to_string(position + i) + " is not in alphabet '" + alphabet.symbols() + "'");
    out[i] = static_cast<std::uint8_t>(*idx);
  }
}

DivergenceAccumulator::DivergenceAccumulator(const Prob& alpha, std::size_t block_length,
                                             CheckpointSpec checkpoints, bool keep_counts)
    : reference_(product_extension(alpha, block_length)),
      mode_(alpha.mode()),
      counter_(alpha.alphabet(), block_length),
      checkpoints_(std::move(checkpoints)),
      keep_counts_(keep_counts) {
  trace_.block_length = block_length;
  next_ = checkpoints_.next_after(0);
}

void DivergenceAccumulator::consume(std::span<const std::uint8_t> symbol_indices) {
  const std::size_t l = counter_.block_length();
  std::size_t pos = 0;
  while (pos < symbol_indices.size()) {
    std::size_t take = symbol_indices.size() - pos;
    if (next_ != 0) take = std::min<std::uint64_t>(take, next_ * l - counter_.symbols_consumed());
    for (std::size_t i = 0; i < take; ++i) counter_.feed_index(symbol_indices[pos + i]);
    pos += take;
    if (next_ != 0 && counter_.symbols_consumed() == next_ * l) {
      record();
      next_ = checkpoints_.next_after(next_);
    }
  }
}

void DivergenceAccumulator::finish() {
  if (finished_) return;
  finished_ = true;
  const auto n = counter_.blocks();
  if (checkpoints_.closes_at_end()) {
    if (n > 0 && (trace_.checkpoints.empty() || trace_.checkpoints.back() != n)) record();
  } else if (next_ != 0) {
    trace_.truncated = true;
  }
}

void DivergenceAccumulator::record() {
  const Prob empirical = counts_to_prob(counter_, mode_);
  trace_.checkpoints.push_back(counter_.blocks());
  trace_.values.push_back(kl_divergence(empirical, reference_));
  trace_.l1.push_back(l1_distance(empirical, reference_));
  if (keep_counts_) snapshots_.emplace_back(counter_.counts().begin(), counter_.counts().end());
}

DivergenceTrace divergence_trace(SymbolStream& sequence, const Prob& alpha, std::size_t block_length,
                                 const CheckpointSpec& checkpoints) {
  require_alphabet(sequence, alpha);
  DivergenceAccumulator acc(alpha, block_length, checkpoints);
  std::vector<char> buf(kStreamChunk);
  std::vector<std::uint8_t> indices;
  std::uint64_t position = 0;
  while (const std::size_t n = sequence.read(buf)) {
    to_symbol_indices(alpha.alphabet(), {buf.data(), n}, position, indices);
    acc.consume(indices);
    position += n;
  }
  acc.finish();
  return acc.trace();
}

DivergenceTrace divergence_trace(std::string_view sequence, const Prob& alpha,
                                 std::size_t block_length, const CheckpointSpec& checkpoints) {
  StringSymbolStream s(alpha.alphabet(), sequence);
  return divergence_trace(s, alpha, block_length, checkpoints);
}

DivergenceProfile divergence_profile(SymbolStream& sequence, const Prob& alpha,
                                     std::size_t max_block_length, const DivergenceOptions& options) {
  if (max_block_length == 0) throw DomainError("ℓ_max must be at least 1");
  check_tail_fraction(options.tail_fraction);
  require_alphabet(sequence, alpha);

  std::vector<DivergenceAccumulator> accs;
  accs.reserve(max_block_length);
  for (std::size_t l = 1; l <= max_block_length; ++l) accs.emplace_back(alpha, l, options.checkpoints);

  std::vector<char> buf(kStreamChunk);
  std::vector<std::uint8_t> indices;
  std::uint64_t position = 0;
  while (const std::size_t n = sequence.read(buf)) {
    to_symbol_indices(alpha.alphabet(), {buf.data(), n}, position, indices);
    position += n;
    if (options.parallel && accs.size() > 1) {
      std::vector<std::jthread> workers;
      workers.reserve(accs.size());
      for (auto& acc : accs) workers.emplace_back([&acc, &indices] { acc.consume(indices); });
    } else {
      for (auto& acc : accs) acc.consume(indices);
    }
  }

  DivergenceProfile profile;
  profile.max_block_length = max_block_length;
  profile.tail_fraction = options.tail_fraction;
  for (auto& acc : accs) {
    acc.finish();
    const auto l = acc.trace().block_length;
    if (acc.trace().values.empty())
      throw DomainError("prefix of " + std::to_string(position) + " symbols holds no complete block of length " +
                        std::to_string(l));
    profile.traces.push_back(acc.trace());
    const auto est = estimate_limits(acc.trace(), options.tail_fraction);
    profile.estimates.push_back(est);
    const double inv = 1.0 / static_cast<double>(l);
    profile.lower_divergence = std::max(profile.lower_divergence, est.lower.scaled(inv));
    profile.upper_divergence = std::max(profile.upper_divergence, est.upper.scaled(inv));
  }
  return profile;
}

DivergenceProfile divergence_profile(std::string_view sequence, const Prob& alpha,
                                     std::size_t max_block_length, const DivergenceOptions& options) {
  StringSymbolStream s(alpha.alphabet(), sequence);
  return divergence_profile(s, alpha, max_block_length, options);
}

DivergenceTrace sequence_divergence(SymbolStream& s, SymbolStream& t, std::size_t block_length,
                                    const CheckpointSpec& checkpoints, NumericMode mode) {
  if (!(s.alphabet() == t.alphabet())) throw DomainError("sequences have different alphabets");
  const Alphabet& alphabet = s.alphabet();
  BlockCounter cs(alphabet, block_length), ct(alphabet, block_length);
  DivergenceTrace trace;
  trace.block_length = block_length;

  auto record = [&] {
    const Prob ps = counts_to_prob(cs, mode);
    const Prob pt = counts_to_prob(ct, mode);
    trace.checkpoints.push_back(cs.blocks());
    trace.values.push_back(kl_divergence(ps, pt));
    trace.l1.push_back(l1_distance(ps, pt));
  };

  std::vector<char> bs(kStreamChunk), bt(kStreamChunk);
  std::vector<std::uint8_t> is, it;
  std::uint64_t position = 0;
  std::uint64_t next = checkpoints.next_after(0);
  for (;;) {
    const std::size_t ns = s.read(bs);
    std::size_t nt = 0;
    while (nt < ns) {
      const std::size_t got = t.read(std::span<char>(bt).subspan(nt, ns - nt));
      if (got == 0) break;
      nt += got;
    }
    // A shorter T ends the comparison; the rest of S is never compared.
    const std::size_t m = std::min(ns, nt);
    if (m == 0) break;
    to_symbol_indices(alphabet, {bs.data(), m}, position, is);
    to_symbol_indices(alphabet, {bt.data(), m}, position, it);
    for (std::size_t i = 0; i < m; ++i) {
      cs.feed_index(is[i]);
      ct.feed_index(it[i]);
      if (next != 0 && cs.symbols_consumed() == next * block_length) {
        record();
        next = checkpoints.next_after(next);
      }
    }
    position += m;
    if (m < ns) break;
  }
  if (checkpoints.closes_at_end()) {
    if (cs.blocks() > 0 && (trace.checkpoints.empty() || trace.checkpoints.back() != cs.blocks())) record();
  } else if (next != 0) {
    trace.truncated = true;
  }
  return trace;
}

DivergenceTrace sequence_divergence(const Alphabet& alphabet, std::string_view s, std::string_view t,
                                    std::size_t block_length, const CheckpointSpec& checkpoints,
                                    NumericMode mode) {
  StringSymbolStream ss(alphabet, s), st(alphabet, t);
  return sequence_divergence(ss, st, block_length, checkpoints, mode);
}

NormalityVerdict normality_check(const DivergenceProfile& profile, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("normality threshold ε must be positive");
  NormalityVerdict v;
  v.epsilon = epsilon;
  v.max_block_length = profile.max_block_length;
  v.normal = true;
  for (std::size_t l = 1; l <= profile.max_block_length; ++l) {
    const bool pass = profile.estimate(l).upper.value() <= epsilon;
    v.passes.push_back(pass);
    v.last_l1.push_back(profile.trace(l).l1.back());
    v.normal = v.normal && pass;
  }
  return v;
}

std::string format_profile_csv(const DivergenceProfile& profile) {
  std::string out = "l,n,divergence_bits,l1_distance\n";
  for (const auto& trace : profile.traces)
    for (std::size_t i = 0; i < trace.checkpoints.size(); ++i)
      out += std::to_string(trace.block_length) + "," + std::to_string(trace.checkpoints[i]) + "," +
             format_ext(trace.values[i]) + "," + format_real(trace.l1[i]) + "\n";
  return out;
}

}  // namespace divnorm
