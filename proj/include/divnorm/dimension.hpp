#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "divnorm/checkpoints.hpp"
#include "divnorm/divergence.hpp"
#include "divnorm/gambler.hpp"
#include "divnorm/measures.hpp"

namespace divnorm {

struct SGaleOptions {
  double tail_fraction = 0.5;
  // Tail slope (bits per symbol) above which the s-gale counts as diverging.
  double slope_threshold = 0.01;
};

// log₂(α^{|w|}(w)^{1−s}·d_{G,α}(w)) at step checkpoints.
struct SGaleTrace {
  double s = 1.0;
  std::size_t block_length = 0;  // the gambler's ℓ when it is an empirical exploit
  std::vector<std::uint64_t> steps;
  std::vector<double> values;
  double tail_slope = 0.0;  // least-squares slope over the tail window
  bool diverges = false;
};

// Evaluates an existing capital trace at its checkpoints. At s = 1 the values
// are the trace's log₂ capital bit for bit.
SGaleTrace sgale_from_trace(const CapitalTrace& trace, const Prob& alpha, double s,
                            const SGaleOptions& options = {});
SGaleTrace sgale_trace(const Gambler& g, const Prob& alpha, double s, SymbolStream& sequence,
                       const CheckpointSpec& checkpoints, const SGaleOptions& options = {});
SGaleTrace sgale_trace(const Gambler& g, const Prob& alpha, double s, std::string_view sequence,
                       const CheckpointSpec& checkpoints, const SGaleOptions& options = {});

// Least-squares slope of y against x over the final tail_fraction of points.
// −∞ when any tail value is −∞; 0 with fewer than two points.
double tail_slope(const std::vector<std::uint64_t>& x, const std::vector<double>& y,
                  double tail_fraction);

struct DimensionReport {
  double c = 1.0;  // log₂(1/min_a α(a))
  ExtReal lower_divergence;
  ExtReal upper_divergence;
  double upper_bound_dim = 1.0;         // 1 − upper_divergence/c, clamped
  double upper_bound_strong_dim = 1.0;  // 1 − lower_divergence/c, clamped
  std::size_t max_block_length = 0;
  double tail_fraction = 0.5;

  // Grid search; empty when only bounds were computed.
  std::optional<double> estimated_dim;
  std::optional<double> first_diverging_s;
  double slope_threshold = 0.01;
  std::vector<double> s_grid;
  std::vector<SGaleTrace> traces;
};

DimensionReport dim_upper_bounds(const DivergenceProfile& profile, const Prob& alpha);

// 0 to 1 in steps of 1/32.
std::vector<double> default_s_grid();
// `lo:hi:step` (each a rational or decimal) or a comma-separated list.
std::vector<double> parse_s_grid(std::string_view text);

struct DimensionOptions {
  CheckpointSpec checkpoints = CheckpointSpec::geometric();
  double tail_fraction = 0.5;
  double slope_threshold = 0.01;
  bool parallel = false;
};

// Builds empirical_exploit(S, ⌊|S|/ℓ⌋, ℓ) for every ℓ ≤ max_block_length and
// scans the grid. The first grid point s_i at which some s-gale diverges
// brackets the infimum in (s_{i−1}, s_i]; the estimate is s_{i−1} (s_0 when
// i = 0, and 1 when nothing diverges). The report also carries the bounds.
DimensionReport estimate_dimension(std::string_view sequence, const Prob& alpha,
                                   std::size_t max_block_length, const std::vector<double>& s_grid,
                                   const DimensionOptions& options = {});

// Flat `key=value` lines.
std::string format_dimension_report(const DimensionReport& report);
// Rows `s,l,steps,log2_sgale,tail_slope,diverges`.
std::string format_sgale_csv(const DimensionReport& report);

}  // namespace divnorm
