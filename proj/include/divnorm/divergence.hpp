#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divnorm/checkpoints.hpp"
#include "divnorm/empirical.hpp"
#include "divnorm/measures.hpp"
#include "divnorm/stream.hpp"

namespace divnorm {

// D(π_{S,n}^{(ℓ)} ‖ reference) sampled at increasing block counts n. The
// reference is α^(ℓ) or, for sequence-vs-sequence traces, π_{T,n}^{(ℓ)}.
struct DivergenceTrace {
  std::size_t block_length = 1;
  std::vector<std::uint64_t> checkpoints;
  std::vector<ExtReal> values;
  // ‖π_{S,n}^{(ℓ)} − reference‖₁ at the same checkpoints.
  std::vector<double> l1;
  // An explicit checkpoint lay beyond the end of the input.
  bool truncated = false;
};

// Tail-window estimates of liminf and limsup.
struct TailEstimate {
  ExtReal lower;
  ExtReal upper;
};

// First index of the final `tail_fraction` share of `count` checkpoints.
std::size_t tail_start(std::size_t count, double tail_fraction);

// min and max over the tail window. +∞ entries count toward the max and are
// left out of the min unless the window holds nothing else.
TailEstimate estimate_limits(std::span<const ExtReal> values, double tail_fraction);
TailEstimate estimate_limits(const DivergenceTrace& trace, double tail_fraction);

struct DivergenceOptions {
  CheckpointSpec checkpoints = CheckpointSpec::geometric();
  double tail_fraction = 0.5;
  // Advance the per-ℓ accumulators on separate threads.
  bool parallel = false;
};

// One ℓ's trace builder over validated symbol indices. Optionally retains the
// block counts at every checkpoint.
class DivergenceAccumulator {
 public:
  DivergenceAccumulator(const Prob& alpha, std::size_t block_length, CheckpointSpec checkpoints,
                        bool keep_counts = false);

  void consume(std::span<const std::uint8_t> symbol_indices);
  void finish();

  const DivergenceTrace& trace() const noexcept { return trace_; }
  const BlockCounter& counter() const noexcept { return counter_; }
  // Parallel to trace().checkpoints when keep_counts was set.
  const std::vector<std::vector<std::uint64_t>>& snapshots() const noexcept { return snapshots_; }

 private:
  void record();

  Prob reference_;
  NumericMode mode_;
  BlockCounter counter_;
  CheckpointSpec checkpoints_;
  std::uint64_t next_ = 0;
  bool keep_counts_;
  bool finished_ = false;
  DivergenceTrace trace_;
  std::vector<std::vector<std::uint64_t>> snapshots_;
};

// Converts a chunk of symbols to alphabet indices, throwing DomainError with
// the absolute stream position of the first foreign symbol.
void to_symbol_indices(const Alphabet& alphabet, std::string_view chunk, std::uint64_t position,
                       std::vector<std::uint8_t>& out);

DivergenceTrace divergence_trace(SymbolStream& sequence, const Prob& alpha, std::size_t block_length,
                                 const CheckpointSpec& checkpoints);
DivergenceTrace divergence_trace(std::string_view sequence, const Prob& alpha,
                                 std::size_t block_length, const CheckpointSpec& checkpoints);

// Per-ℓ traces for ℓ = 1..max_block_length plus the sup-over-ℓ aggregates.
// Everything is an estimate from a finite prefix.
struct DivergenceProfile {
  std::size_t max_block_length = 0;
  double tail_fraction = 0.5;
  std::vector<DivergenceTrace> traces;      // index ℓ − 1
  std::vector<TailEstimate> estimates;      // index ℓ − 1
  ExtReal lower_divergence;                 // max_ℓ lower(ℓ)/ℓ
  ExtReal upper_divergence;                 // max_ℓ upper(ℓ)/ℓ

  const DivergenceTrace& trace(std::size_t l) const { return traces.at(l - 1); }
  const TailEstimate& estimate(std::size_t l) const { return estimates.at(l - 1); }
};

DivergenceProfile divergence_profile(SymbolStream& sequence, const Prob& alpha,
                                     std::size_t max_block_length,
                                     const DivergenceOptions& options = {});
DivergenceProfile divergence_profile(std::string_view sequence, const Prob& alpha,
                                     std::size_t max_block_length,
                                     const DivergenceOptions& options = {});

// D(π_{S,n}^{(ℓ)} ‖ π_{T,n}^{(ℓ)}) with both streams read in lock-step.
DivergenceTrace sequence_divergence(SymbolStream& s, SymbolStream& t, std::size_t block_length,
                                    const CheckpointSpec& checkpoints,
                                    NumericMode mode = NumericMode::exact);
DivergenceTrace sequence_divergence(const Alphabet& alphabet, std::string_view s,
                                    std::string_view t, std::size_t block_length,
                                    const CheckpointSpec& checkpoints,
                                    NumericMode mode = NumericMode::exact);

struct NormalityVerdict {
  double epsilon = 0.01;
  std::size_t max_block_length = 0;
  std::vector<bool> passes;        // index ℓ − 1: upper(ℓ) ≤ ε
  std::vector<double> last_l1;     // index ℓ − 1
  bool normal = false;
};

NormalityVerdict normality_check(const DivergenceProfile& profile, double epsilon);

// Rows `l,n,divergence_bits,l1_distance`, with `inf` for +∞.
std::string format_profile_csv(const DivergenceProfile& profile);

}  // namespace divnorm
