#include "divnorm/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "divnorm/errors.hpp"
#include "divnorm/synthesis.hpp"

namespace divnorm {
namespace {

void check_s(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("s must lie in [0, 1]");
}

double log2_weight(const Prob& alpha, std::size_t a) {
  if (alpha.mode() == NumericMode::exact) return log2_rational(alpha.exact_weight(a));
  return std::log2(alpha.weight(a));
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double tail_slope(const std::vector<std::uint64_t>& x, const std::vector<double>& y, double tail_fraction) {
  if (x.size() != y.size()) throw DomainError("slope needs equally many x and y values");
  const std::size_t first = tail_start(x.size(), tail_fraction);
  const std::size_t count = x.size() - first;
  for (std::size_t i = first; i < y.size(); ++i)
    if (y[i] == -std::numeric_limits<double>::infinity()) return y[i];
  if (count < 2) return 0.0;
  long double mx = 0, my = 0;
  for (std::size_t i = first; i < x.size(); ++i) {
    mx += static_cast<long double>(x[i]);
    my += y[i];
  }
  mx /= count;
  my /= count;
  long double sxy = 0, sxx = 0;
  for (std::size_t i = first; i < x.size(); ++i) {
    const long double dx = static_cast<long double>(x[i]) - mx;
    sxy += dx * (y[i] - my);
    sxx += dx * dx;
  }
  if (sxx == 0) return 0.0;
  return static_cast<double>(sxy / sxx);
}

SGaleTrace sgale_from_trace(const CapitalTrace& trace, const Prob& alpha, double s, const SGaleOptions& options) {
  check_s(s);
  if (!alpha.strictly_positive()) throw DomainError("s-gales need α with every weight positive");
  std::vector<double> log_alpha(alpha.size());
  for (std::size_t a = 0; a < alpha.size(); ++a) log_alpha[a] = log2_weight(alpha, a);

  SGaleTrace out;
  out.s = s;
  const double exponent = 1.0 - s;
  double log_prob = 0.0;
  std::uint64_t done = 0;
  for (const auto step : trace.checkpoints) {
    for (; done < step; ++done) log_prob += log_alpha[alpha.alphabet().index_of(trace.symbols[done])];
    out.steps.push_back(step);
    const double capital = trace.log2_capital.at(step);
    out.values.push_back(exponent == 0.0 ? capital : exponent * log_prob + capital);
  }
  out.tail_slope = tail_slope(out.steps, out.values, options.tail_fraction);
  out.diverges = out.tail_slope > options.slope_threshold;
  return out;
}

SGaleTrace sgale_trace(const Gambler& g, const Prob& alpha, double s, SymbolStream& sequence,
                       const CheckpointSpec& checkpoints, const SGaleOptions& options) {
  check_s(s);
  if (!alpha.strictly_positive()) throw DomainError("s-gales need α with every weight positive");
  RunOptions ro;
  ro.checkpoints = checkpoints;
  const CapitalTrace trace = run(g, alpha, sequence, ro);
  return sgale_from_trace(trace, alpha, s, options);
}

SGaleTrace sgale_trace(const Gambler& g, const Prob& alpha, double s, std::string_view sequence,
                       const CheckpointSpec& checkpoints, const SGaleOptions& options) {
  StringSymbolStream stream(g.alphabet(), sequence);
  return sgale_trace(g, alpha, s, stream, checkpoints, options);
}

DimensionReport dim_upper_bounds(const DivergenceProfile& profile, const Prob& alpha) {
  if (!alpha.strictly_positive()) throw DomainError("dimension bounds need α with every weight positive");
  DimensionReport r;
  if (alpha.mode() == NumericMode::exact) {
    Rational least = alpha.exact_weight(0);
    for (const auto& w : alpha.exact_weights()) least = std::min(least, w);
    r.c = -log2_rational(least);
  } else {
    r.c = -std::log2(alpha.min_weight());
  }
  r.lower_divergence = profile.lower_divergence;
  r.upper_divergence = profile.upper_divergence;
  r.upper_bound_dim = clamp_unit(1.0 - profile.upper_divergence.value() / r.c);
  r.upper_bound_strong_dim = clamp_unit(1.0 - profile.lower_divergence.value() / r.c);
  r.max_block_length = profile.max_block_length;
  r.tail_fraction = profile.tail_fraction;
  return r;
}

std::vector<double> default_s_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 32; ++i) grid.push_back(i / 32.0);
  return grid;
}

std::vector<double> parse_s_grid(std::string_view text) {
  std::vector<double> grid;
  if (text.find(':') != std::string_view::npos) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos)
      throw ParseError("s grid range must be lo:hi:step");
    const Rational lo = parse_rational(text.substr(0, c1), true);
    const Rational hi = parse_rational(text.substr(c1 + 1, c2 - c1 - 1), true);
    const Rational step = parse_rational(text.substr(c2 + 1), true);
    if (step <= 0) throw DomainError("s grid step must be positive");
    if (hi < lo) throw DomainError("s grid range is empty");
    for (Rational s = lo; s <= hi; s += step) grid.push_back(to_double(s));
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = std::min(text.find(',', pos), text.size());
      grid.push_back(to_double(parse_rational(text.substr(pos, comma - pos), true)));
      pos = comma + 1;
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_s(grid[i]);
    if (i > 0 && grid[i] <= grid[i - 1]) throw DomainError("s grid must be strictly increasing");
  }
  return grid;
}

DimensionReport estimate_dimension(std::string_view sequence, const Prob& alpha, std::size_t max_block_length,
                                   const std::vector<double>& s_grid, const DimensionOptions& options) {
  if (s_grid.empty()) throw DomainError("s grid is empty");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    check_s(s_grid[i]);
    if (i > 0 && s_grid[i] <= s_grid[i - 1]) throw DomainError("s grid must be strictly increasing");
  }
  if (!alpha.strictly_positive()) throw DomainError("dimension estimates need α with every weight positive");

  DivergenceOptions dopts;
  dopts.checkpoints = options.checkpoints;
  dopts.tail_fraction = options.tail_fraction;
  dopts.parallel = options.parallel;
  const DivergenceProfile profile = divergence_profile(sequence, alpha, max_block_length, dopts);
  DimensionReport report = dim_upper_bounds(profile, alpha);
  report.slope_threshold = options.slope_threshold;
  report.s_grid = s_grid;

  SGaleOptions sopts{options.tail_fraction, options.slope_threshold};
  std::vector<std::vector<SGaleTrace>> per_l(max_block_length);
  auto evaluate = [&](std::size_t l) {
    const std::uint64_t blocks = sequence.size() / l;
    const Gambler g = empirical_exploit(alpha.alphabet(), sequence, blocks, l);
    std::vector<std::uint64_t> points;
    for (const auto n : options.checkpoints.resolve(blocks)) points.push_back(n * l);
    RunOptions ro;
    ro.checkpoints = CheckpointSpec::list(std::move(points));
    const CapitalTrace trace = run(g, alpha, sequence.substr(0, blocks * l), ro);
    for (const double s : s_grid) {
      SGaleTrace t = sgale_from_trace(trace, alpha, s, sopts);
      t.block_length = l;
      per_l[l - 1].push_back(std::move(t));
    }
  };
  if (options.parallel && max_block_length > 1) {
    std::vector<std::jthread> workers;
    std::vector<std::exception_ptr> errors(max_block_length);
    for (std::size_t l = 1; l <= max_block_length; ++l)
      workers.emplace_back([&, l] {
        try {
          evaluate(l);
        } catch (...) {
          errors[l - 1] = std::current_exception();
        }
      });
    workers.clear();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (std::size_t l = 1; l <= max_block_length; ++l) evaluate(l);
  }

  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    bool diverges = false;
    for (std::size_t l = 0; l < max_block_length; ++l) {
      diverges = diverges || per_l[l][i].diverges;
      report.traces.push_back(per_l[l][i]);
    }
    if (diverges && !report.first_diverging_s) {
      report.first_diverging_s = s_grid[i];
      report.estimated_dim = i == 0 ? s_grid[0] : s_grid[i - 1];
    }
  }
  if (!report.estimated_dim) report.estimated_dim = 1.0;
  return report;
}

std::string format_dimension_report(const DimensionReport& r) {
  std::string out;
  auto line = [&](const std::string& key, const std::string& value) { out += key + "=" + value + "\n"; };
  line("c_bits", format_real(r.c));
  line("max_block_length", std::to_string(r.max_block_length));
  line("tail_fraction", format_real(r.tail_fraction));
  line("lower_divergence_bits", format_ext(r.lower_divergence));
  line("upper_divergence_bits", format_ext(r.upper_divergence));
  line("dim_upper_bound", format_real(r.upper_bound_dim));
  line("strong_dim_upper_bound", format_real(r.upper_bound_strong_dim));
  if (!r.s_grid.empty()) {
    line("s_grid_points", std::to_string(r.s_grid.size()));
    line("slope_threshold", format_real(r.slope_threshold));
    line("first_diverging_s", r.first_diverging_s ? format_real(*r.first_diverging_s) : "none");
    line("estimated_dim", r.estimated_dim ? format_real(*r.estimated_dim) : "none");
  }
  return out;
}

std::string format_sgale_csv(const DimensionReport& report) {
  std::string out = "s,l,steps,log2_sgale,tail_slope,diverges\n";
  for (const auto& t : report.traces)
    for (std::size_t i = 0; i < t.steps.size(); ++i)
      out += format_real(t.s) + "," + std::to_string(t.block_length) + "," + std::to_string(t.steps[i]) + "," +
             format_real(t.values[i]) + "," + format_real(t.tail_slope) + "," + (t.diverges ? "1" : "0") + "\n";
  return out;
}

}  // namespace divnorm
