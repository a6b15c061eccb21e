#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divnorm/alphabet.hpp"
#include "divnorm/checkpoints.hpp"
#include "divnorm/measures.hpp"
#include "divnorm/rational.hpp"
#include "divnorm/stream.hpp"

namespace divnorm {

// Finite-state gambler (Q, δ, s, B) with dense state indices 0..|Q|−1, a
// total transition table, and an exact rational bet B(q) per state.
class Gambler {
 public:
  // transitions[q·|Σ| + a] = δ(q, a). Throws DomainError unless every bet
  // row is an exact probability measure on Σ and δ is total and in range.
  Gambler(Alphabet alphabet, std::size_t start, std::vector<std::uint32_t> transitions,
          std::vector<Prob> bets);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t state_count() const noexcept { return bets_.size(); }
  std::size_t start() const noexcept { return start_; }
  std::size_t next(std::size_t state, std::size_t symbol_index) const {
    return transitions_[state * alphabet_.size() + symbol_index];
  }
  std::span<const std::uint32_t> transitions() const noexcept { return transitions_; }
  const Prob& bet(std::size_t state) const { return bets_.at(state); }

  // δ(w) for a whole word.
  std::size_t state_after(std::string_view w) const;

  friend bool operator==(const Gambler& a, const Gambler& b);

 private:
  Alphabet alphabet_;
  std::size_t start_;
  std::vector<std::uint32_t> transitions_;
  std::vector<Prob> bets_;
};

// Canonical text form: alphabet, states, start, then every trans and every
// bet line in (state, symbol) order.
std::string format_gambler(const Gambler& g);
// Malformed text → ParseError with a line number; a well-formed file whose
// bets are not stochastic → DomainError.
Gambler parse_gambler(std::string_view text);

// Longest run for which exact rational capital is tracked.
inline constexpr std::uint64_t kExactStepLimit = 10000;

struct RunOptions {
  NumericMode mode = NumericMode::floating;
  CheckpointSpec checkpoints = CheckpointSpec::geometric();
  double gamma = 0.9;
};

struct CountSnapshot {
  std::uint64_t step = 0;
  std::vector<std::uint64_t> visits;  // per state
  std::vector<std::uint64_t> edges;   // per (state, symbol)
};

struct CapitalTrace {
  NumericMode mode = NumericMode::floating;
  double gamma = 0.9;
  std::uint64_t provenance = 0;

  // Indexed by |w| = 0..steps. log2_capital[0] = 0; −∞ once bankrupt.
  std::vector<double> log2_capital;
  std::vector<double> total_risk;
  // states[i] = δ(w[0..i)), the state that bets on symbol i.
  std::vector<std::uint32_t> states;
  std::string symbols;

  std::vector<std::uint64_t> visit_counts;
  std::vector<std::uint64_t> edge_counts;
  std::optional<std::uint64_t> bankrupt_at;

  std::vector<std::uint64_t> checkpoints;  // step counts
  std::vector<CountSnapshot> snapshots;    // parallel to checkpoints

  // Exact mode only: d(w) for the whole input.
  std::optional<Rational> exact_capital;

  // First |w| at which δ(w) lay in a bottom SCC, and whether every later
  // state stayed in that component.
  std::optional<std::uint64_t> absorbed_at;
  bool absorption_held = true;

  std::uint64_t steps() const noexcept { return symbols.size(); }
};

// Provenance tag shared by run() and the functions that re-check a trace.
std::uint64_t run_provenance(const Gambler& g, const Prob& alpha);

// Capital d_{G,α} along the input, in log₂. Throws DomainError when an
// observed symbol has α(a) = 0, or when exact mode runs past kExactStepLimit.
CapitalTrace run(const Gambler& g, const Prob& alpha, SymbolStream& sequence,
                 const RunOptions& options = {});
CapitalTrace run(const Gambler& g, const Prob& alpha, std::string_view sequence,
                 const RunOptions& options = {});

// risk_G(q) = D(α ‖ B(q)).
ExtReal state_risk(const Gambler& g, std::size_t state, const Prob& alpha);

// Σ_q #_{G,w}(q)·risk_G(q) at every |w|, recomputed from the trace's states.
std::vector<double> total_risk(const CapitalTrace& trace, const Gambler& g, const Prob& alpha);

// Σ_a α(a)·capital·row(a)/α(a) = capital, as exact rationals.
bool martingale_step_fair(const Rational& capital, std::span<const Rational> bet_row,
                          const Prob& alpha);
// Checks the martingale identity at w for exact capital (α strictly positive).
bool fairness_check(const Gambler& g, const Prob& alpha, std::string_view w);

// |log₂ d(w) − Σ_{q,a} #(q,a)·log₂(B(q)(a)/α(a))| for the whole trace. Exact
// traces compare rationals, so a zero residual means literal equality.
double log_capital_decomposition(const CapitalTrace& trace, const Gambler& g, const Prob& alpha);

struct SccReport {
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> component_of;
  // Indices into `components` of the components with no outgoing edge.
  std::vector<std::size_t> bottom;
  // reaches[q][b]: state q can reach components[bottom[b]].
  std::vector<std::vector<bool>> reaches;

  bool in_bottom(std::size_t state) const;
  std::vector<std::vector<std::size_t>> bottom_sets() const;
};

SccReport bottom_sccs(const Gambler& g);

struct AgafonovRow {
  std::size_t state = 0;
  std::uint64_t visits = 0;
  std::vector<double> frequencies;  // #(q, a)/#(q)
  double l1_to_alpha = 0.0;
};

// One row per state with #(q) > 0.
std::vector<AgafonovRow> agafonov_stats(const CapitalTrace& trace, const Gambler& g,
                                        const Prob& alpha);

struct DichotomyRow {
  std::uint64_t step = 0;
  double log2_capital = 0.0;
  double total_risk = 0.0;
  bool holds = false;      // log₂ d(w) < −γ·Risk(w)
  bool boundary = false;   // Risk(w) = 0: the comparison degenerates to 0 < 0
  double ratio = 0.0;      // log₂ d(w)/Risk(w); NaN when undefined
};

struct DichotomyReport {
  double gamma = 0.9;
  std::vector<DichotomyRow> rows;
  // Last non-boundary checkpoint where the bound failed.
  std::optional<std::uint64_t> last_violation;
};

DichotomyReport dichotomy_check_part2(const CapitalTrace& trace, double gamma);

// Rows `step,state,symbol,log2_capital,total_risk_bits` at the trace's
// checkpoints; `state` is δ(w[0..step−1)), the state that bet on the symbol.
std::string format_trace_csv(const CapitalTrace& trace, const Gambler& g);

}  // namespace divnorm
