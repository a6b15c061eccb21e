#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "divnorm/checkpoints.hpp"
#include "divnorm/divergence.hpp"
#include "divnorm/gambler.hpp"
#include "divnorm/measures.hpp"
#include "divnorm/rational.hpp"

namespace divnorm {

// An exact measure π₀ on Σ^ℓ together with its prefix masses on Σ^{≤ℓ}:
// π₀(λ) = 1 and π₀(w) = Σ_a π₀(wa).
class BlockMeasure {
 public:
  explicit BlockMeasure(Prob measure);

  const Prob& measure() const noexcept { return measure_; }
  const Alphabet& alphabet() const noexcept { return measure_.alphabet(); }
  std::size_t block_length() const noexcept { return measure_.space().length; }

  const Rational& prefix_mass(std::string_view w) const;
  const Rational& prefix_mass(std::size_t length, std::uint64_t index) const {
    return masses_[length][index];
  }

 private:
  Prob measure_;
  std::vector<std::vector<Rational>> masses_;  // masses_[|w|][index of w]
};

// π₀(a | w) = π₀(wa)/π₀(w); uniform 1/|Σ| when π₀(w) = 0. Requires |w| < ℓ.
Rational conditional(const BlockMeasure& pi0, std::string_view w, char a);

// States Σ^{≤ℓ−1} are numbered by length, then lexicographically:
// λ = 0, then the words of length 1, and so on.
std::uint64_t exploit_state_count(const Alphabet& alphabet, std::size_t block_length);
std::size_t exploit_state_index(const Alphabet& alphabet, std::string_view w);
std::string exploit_state_word(const Alphabet& alphabet, std::size_t block_length,
                               std::size_t state);

// The block gambler that hard-codes π₀: appends symbols, resets to λ after ℓ,
// and bets B(w)(a) = π₀(a | w).
Gambler exploit_gambler(const BlockMeasure& pi0);

// Whether state w of the exploit gambler uses the zero-mass fallback.
bool is_fallback_state(const BlockMeasure& pi0, std::size_t state);

struct Pi0Selection {
  BlockMeasure measure;
  std::uint64_t blocks = 0;  // the chosen n*
  ExtReal divergence;        // D(π_{S,n*}^{(ℓ)} ‖ α^(ℓ))
  DivergenceTrace trace;
};

// The empirical measure at the tail checkpoint maximizing D(π_{S,n}‖α^(ℓ)),
// ties going to the larger n.
Pi0Selection select_pi0(SymbolStream& sequence, const Prob& alpha, std::size_t block_length,
                        const CheckpointSpec& checkpoints, double tail_fraction);
Pi0Selection select_pi0(std::string_view sequence, const Prob& alpha, std::size_t block_length,
                        const CheckpointSpec& checkpoints, double tail_fraction);

struct GrowthRow {
  std::uint64_t blocks = 0;
  std::uint64_t steps = 0;
  double log2_capital = 0.0;
  ExtReal divergence_alpha;  // D(π_{S,n}^{(ℓ)} ‖ α^(ℓ))
  ExtReal divergence_pi0;    // D(π_{S,n}^{(ℓ)} ‖ π₀)
  double predicted = 0.0;    // n·(divergence_alpha − divergence_pi0)
  double residual = 0.0;     // log2_capital − predicted; NaN if undefined
  bool fallback_traversed = false;
};

struct GrowthReport {
  std::size_t block_length = 1;
  std::vector<GrowthRow> rows;
  std::vector<std::uint64_t> skipped;  // checkpoints not of the form nℓ
};

// Compares a run of exploit_gambler(π₀) on S with the block-aligned identity
// log₂ d(w) = n·(D(π‖α^(ℓ)) − D(π‖π₀)) at |w| = nℓ.
GrowthReport verify_growth_bound(const CapitalTrace& trace, const BlockMeasure& pi0,
                                 const Prob& alpha, std::string_view sequence);

// exploit_gambler over π_{S,n}^{(ℓ)}.
Gambler empirical_exploit(const Alphabet& alphabet, std::string_view sequence,
                          std::uint64_t blocks, std::size_t block_length);

// `block-measure <l>` then `mass <word> <num>/<den>` lines; omitted words have
// mass 0. Lines starting with `#` are comments.
std::string format_block_measure(const BlockMeasure& pi0);
BlockMeasure parse_block_measure(std::string_view text, const Alphabet& alphabet);

}  // namespace divnorm
