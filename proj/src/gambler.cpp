#include "divnorm/gambler.hpp"

#include <gmp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>

#include "divnorm/errors.hpp"
#include "divnorm/scc.hpp"

namespace divnorm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log₂(B(q)(a)/α(a)) for every (q, a); −∞ where the bet is 0, NaN where α(a) = 0.
std::vector<double> log_ratio_table(const Gambler& g, const Prob& alpha) {
  const std::size_t k = g.alphabet().size();
  std::vector<double> table(g.state_count() * k);
  for (std::size_t q = 0; q < g.state_count(); ++q) {
    for (std::size_t a = 0; a < k; ++a) {
      double& out = table[q * k + a];
      const Rational& b = g.bet(q).exact_weight(a);
      if (alpha.weight(a) == 0.0 && (alpha.mode() == NumericMode::floating || alpha.exact_weight(a) == 0)) {
        out = std::numeric_limits<double>::quiet_NaN();
      } else if (b == 0) {
        out = kNegInf;
      } else if (alpha.mode() == NumericMode::exact) {
        out = log2_rational(b / alpha.exact_weight(a));
      } else {
        out = std::log2(to_double(b) / alpha.weight(a));
      }
    }
  }
  return table;
}

std::vector<ExtReal> risk_table(const Gambler& g, const Prob& alpha) {
  std::vector<ExtReal> risks;
  risks.reserve(g.state_count());
  for (std::size_t q = 0; q < g.state_count(); ++q) risks.push_back(state_risk(g, q, alpha));
  return risks;
}

double risk_from_counts(std::span<const std::uint64_t> visits, const std::vector<ExtReal>& risks) {
  ExtReal sum;
  for (std::size_t q = 0; q < visits.size(); ++q)
    sum = sum + risks[q].scaled(static_cast<double>(visits[q]));
  return sum.value();
}

void check_alphabets(const Gambler& g, const Prob& alpha) {
  if (alpha.space().length != 1 || !(alpha.alphabet() == g.alphabet()))
    throw DomainError("α must be a measure on the gambler's alphabet '" + g.alphabet().symbols() + "'");
}

Rational rational_power(const Rational& base, std::uint64_t exponent) {
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  r.canonicalize();
  return r;
}

}  // namespace

Gambler::Gambler(Alphabet alphabet, std::size_t start, std::vector<std::uint32_t> transitions,
                 std::vector<Prob> bets)
    : alphabet_(std::move(alphabet)),
      start_(start),
      transitions_(std::move(transitions)),
      bets_(std::move(bets)) {
  const std::size_t n = bets_.size();
  if (n == 0) throw DomainError("a gambler needs at least one state");
  if (start_ >= n) throw DomainError("start state " + std::to_string(start_) + " is out of range");
  if (transitions_.size() != n * alphabet_.size())
    throw DomainError("transition table must have one entry per (state, symbol)");
  for (const auto t : transitions_)
    if (t >= n) throw DomainError("transition target " + std::to_string(t) + " is out of range");
  for (std::size_t q = 0; q < n; ++q) {
    const Prob& b = bets_[q];
    if (b.mode() != NumericMode::exact)
      throw DomainError("bet of state " + std::to_string(q) + " must use exact rational weights");
    if (b.space().length != 1 || !(b.alphabet() == alphabet_))
      throw DomainError("bet of state " + std::to_string(q) + " is not a measure on the gambler's alphabet");
  }
}

std::size_t Gambler::state_after(std::string_view w) const {
  std::size_t q = start_;
  for (const char c : w) q = next(q, alphabet_.index_of(c));
  return q;
}

bool operator==(const Gambler& a, const Gambler& b) {
  return a.alphabet_ == b.alphabet_ && a.start_ == b.start_ && a.transitions_ == b.transitions_ &&
         a.bets_ == b.bets_;
}

std::string format_gambler(const Gambler& g) {
  const Alphabet& sigma = g.alphabet();
  std::string out = "alphabet " + sigma.symbols() + "\n";
  out += "states " + std::to_string(g.state_count()) + "\n";
  out += "start " + std::to_string(g.start()) + "\n";
  for (std::size_t q = 0; q < g.state_count(); ++q)
    for (std::size_t a = 0; a < sigma.size(); ++a)
      out += "trans " + std::to_string(q) + " " + sigma.symbol(a) + " " + std::to_string(g.next(q, a)) + "\n";
  for (std::size_t q = 0; q < g.state_count(); ++q)
    for (std::size_t a = 0; a < sigma.size(); ++a)
      out += "bet " + std::to_string(q) + " " + sigma.symbol(a) + " " +
             format_rational(g.bet(q).exact_weight(a)) + "\n";
  return out;
}

Gambler parse_gambler(std::string_view text) {
  std::optional<Alphabet> alphabet;
  std::optional<std::size_t> states, start;
  std::vector<std::optional<std::uint32_t>> trans;
  std::vector<std::optional<Rational>> bets;

  auto parse_index = [](const std::string& tok, std::size_t line, const char* what) -> std::size_t {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9)
      throw ParseError(std::string("expected a nonnegative ") + what + ", got '" + tok + "'", line);
    return std::stoul(tok);
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    std::istringstream in(line);
    std::vector<std::string> tok;
    for (std::string t; in >> t;) tok.push_back(t);
    const std::string& key = tok[0];

    auto need = [&](std::size_t count) {
      if (tok.size() != count)
        throw ParseError("'" + key + "' expects " + std::to_string(count - 1) + " field(s)", line_no);
    };
    auto need_header = [&] {
      if (!alphabet || !states) throw ParseError("'" + key + "' before alphabet and states", line_no);
    };
    auto symbol_of = [&](const std::string& t) {
      if (t.size() != 1 || !alphabet->contains(t[0]))
        throw ParseError("'" + t + "' is not a symbol of the alphabet", line_no);
      return alphabet->index_of(t[0]);
    };
    auto state_of = [&](const std::string& t) {
      const auto q = parse_index(t, line_no, "state index");
      if (q >= *states) throw ParseError("state " + t + " is out of range", line_no);
      return q;
    };

    if (key == "alphabet") {
      need(2);
      if (alphabet) throw ParseError("duplicate alphabet line", line_no);
      try {
        alphabet.emplace(tok[1]);
      } catch (const DomainError& e) {
        throw ParseError(e.what(), line_no);
      }
    } else if (key == "states") {
      need(2);
      if (states) throw ParseError("duplicate states line", line_no);
      if (!alphabet) throw ParseError("'states' before alphabet", line_no);
      states = parse_index(tok[1], line_no, "state count");
      if (*states == 0) throw ParseError("a gambler needs at least one state", line_no);
      trans.assign(*states * alphabet->size(), std::nullopt);
      bets.assign(*states * alphabet->size(), std::nullopt);
    } else if (key == "start") {
      need(2);
      need_header();
      if (start) throw ParseError("duplicate start line", line_no);
      start = state_of(tok[1]);
    } else if (key == "trans") {
      need(4);
      need_header();
      const auto q = state_of(tok[1]);
      const auto a = symbol_of(tok[2]);
      auto& slot = trans[q * alphabet->size() + a];
      if (slot) throw ParseError("duplicate transition for (" + tok[1] + ", " + tok[2] + ")", line_no);
      slot = static_cast<std::uint32_t>(state_of(tok[3]));
    } else if (key == "bet") {
      need(4);
      need_header();
      const auto q = state_of(tok[1]);
      const auto a = symbol_of(tok[2]);
      auto& slot = bets[q * alphabet->size() + a];
      if (slot) throw ParseError("duplicate bet for (" + tok[1] + ", " + tok[2] + ")", line_no);
      try {
        slot = parse_rational(tok[3]);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
      }
    } else {
      throw ParseError("unknown directive '" + key + "'", line_no);
    }
    if (end == text.size()) break;
  }

  if (!alphabet) throw ParseError("missing alphabet line", line_no);
  if (!states) throw ParseError("missing states line", line_no);
  if (!start) throw ParseError("missing start line", line_no);
  const std::size_t k = alphabet->size();
  std::vector<std::uint32_t> table(trans.size());
  for (std::size_t i = 0; i < trans.size(); ++i) {
    if (!trans[i])
      throw ParseError("missing transition for (" + std::to_string(i / k) + ", " + alphabet->symbol(i % k) + ")",
                       line_no);
    if (!bets[i])
      throw ParseError("missing bet for (" + std::to_string(i / k) + ", " + alphabet->symbol(i % k) + ")", line_no);
    table[i] = *trans[i];
  }
  std::vector<Prob> rows;
  rows.reserve(*states);
  for (std::size_t q = 0; q < *states; ++q) {
    std::vector<Rational> w(k);
    for (std::size_t a = 0; a < k; ++a) w[a] = *bets[q * k + a];
    try {
      rows.push_back(Prob::exact(OutcomeSpace(*alphabet), std::move(w)));
    } catch (const DomainError& e) {
      throw DomainError("bet of state " + std::to_string(q) + ": " + e.what());
    }
  }
  return Gambler(*alphabet, *start, std::move(table), std::move(rows));
}

std::uint64_t run_provenance(const Gambler& g, const Prob& alpha) {
  return std::hash<std::string>{}(format_gambler(g) + "|" + std::string(to_string(alpha.mode())) + "|" +
                                  format_prob(alpha));
}

ExtReal state_risk(const Gambler& g, std::size_t state, const Prob& alpha) {
  check_alphabets(g, alpha);
  if (state >= g.state_count()) throw DomainError("state " + std::to_string(state) + " is out of range");
  return kl_divergence(alpha, g.bet(state).to_mode(alpha.mode()));
}

CapitalTrace run(const Gambler& g, const Prob& alpha, SymbolStream& sequence, const RunOptions& options) {
  check_alphabets(g, alpha);
  if (!(sequence.alphabet() == g.alphabet()))
    throw DomainError("sequence alphabet '" + sequence.alphabet().symbols() + "' differs from the gambler's");
  const bool exact = options.mode == NumericMode::exact;
  if (exact && alpha.mode() != NumericMode::exact)
    throw DomainError("exact runs need α with exact rational weights");

  const std::size_t k = g.alphabet().size();
  const std::size_t n_states = g.state_count();
  const auto log_ratio = log_ratio_table(g, alpha);
  const auto risks = risk_table(g, alpha);
  const SccReport scc = bottom_sccs(g);

  CapitalTrace trace;
  trace.mode = options.mode;
  trace.gamma = options.gamma;
  trace.provenance = run_provenance(g, alpha);
  trace.visit_counts.assign(n_states, 0);
  trace.edge_counts.assign(n_states * k, 0);
  trace.log2_capital.push_back(0.0);
  trace.total_risk.push_back(0.0);

  Rational capital = 1;
  std::size_t q = g.start();
  double log_capital = 0.0;
  double risk = 0.0;
  std::uint64_t step = 0;
  std::uint64_t next_cp = options.checkpoints.next_after(0);
  std::size_t absorb_component = 0;

  auto track_absorption = [&](std::size_t state, std::uint64_t at) {
    if (!trace.absorbed_at) {
      if (scc.in_bottom(state)) {
        trace.absorbed_at = at;
        absorb_component = scc.component_of[state];
      }
    } else if (scc.component_of[state] != absorb_component) {
      trace.absorption_held = false;
    }
  };
  auto snapshot = [&] {
    trace.checkpoints.push_back(step);
    trace.snapshots.push_back({step, trace.visit_counts, trace.edge_counts});
  };

  track_absorption(q, 0);
  std::vector<char> buf(kStreamChunk);
  while (const std::size_t got = sequence.read(buf)) {
    for (std::size_t i = 0; i < got; ++i) {
      const char c = buf[i];
      const auto idx = g.alphabet().find(c);
      if (!idx)
        throw DomainError(std::string("symbol '") + c + "' at stream position " + std::to_string(step) +
                          " is not in alphabet '" + g.alphabet().symbols() + "'");
      const std::size_t a = *idx;
      const double lr = log_ratio[q * k + a];
      if (std::isnan(lr))
        throw DomainError(std::string("payoff undefined: symbol '") + c + "' at stream position " +
                          std::to_string(step) + " has α-probability 0");
      if (exact && step >= kExactStepLimit)
        throw DomainError("exact mode is limited to " + std::to_string(kExactStepLimit) + " steps");

      trace.states.push_back(static_cast<std::uint32_t>(q));
      trace.symbols.push_back(c);
      ++trace.visit_counts[q];
      ++trace.edge_counts[q * k + a];

      if (!trace.bankrupt_at) {
        if (lr == kNegInf) {
          trace.bankrupt_at = step + 1;
          log_capital = kNegInf;
          capital = 0;
        } else if (exact) {
          capital *= g.bet(q).exact_weight(a) / alpha.exact_weight(a);
          log_capital = log2_rational(capital);
        } else {
          log_capital += lr;
        }
      }
      if (exact) {
        risk = risk_from_counts(trace.visit_counts, risks);
      } else {
        risk = (ExtReal(risk) + risks[q]).value();
      }
      ++step;
      trace.log2_capital.push_back(log_capital);
      trace.total_risk.push_back(risk);

      q = g.next(q, a);
      track_absorption(q, step);
      if (next_cp != 0 && step == next_cp) {
        snapshot();
        next_cp = options.checkpoints.next_after(next_cp);
      }
    }
  }
  if (options.checkpoints.closes_at_end() && step > 0 &&
      (trace.checkpoints.empty() || trace.checkpoints.back() != step))
    snapshot();
  if (exact) trace.exact_capital = capital;
  return trace;
}

CapitalTrace run(const Gambler& g, const Prob& alpha, std::string_view sequence, const RunOptions& options) {
  StringSymbolStream s(g.alphabet(), sequence);
  return run(g, alpha, s, options);
}

std::vector<double> total_risk(const CapitalTrace& trace, const Gambler& g, const Prob& alpha) {
  if (trace.provenance != run_provenance(g, alpha))
    throw DomainError("trace was not produced by this gambler and measure");
  const auto risks = risk_table(g, alpha);
  std::vector<double> out;
  out.reserve(trace.states.size() + 1);
  out.push_back(0.0);
  if (trace.mode == NumericMode::exact) {
    std::vector<std::uint64_t> visits(g.state_count(), 0);
    for (const auto q : trace.states) {
      ++visits[q];
      out.push_back(risk_from_counts(visits, risks));
    }
  } else {
    double risk = 0.0;
    for (const auto q : trace.states) {
      risk = (ExtReal(risk) + risks[q]).value();
      out.push_back(risk);
    }
  }
  return out;
}

bool martingale_step_fair(const Rational& capital, std::span<const Rational> bet_row, const Prob& alpha) {
  if (alpha.mode() != NumericMode::exact || !alpha.strictly_positive())
    throw DomainError("fairness is checked for exact, strictly positive α");
  if (bet_row.size() != alpha.size()) throw DomainError("bet row and α have different sizes");
  Rational sum = 0;
  for (std::size_t a = 0; a < bet_row.size(); ++a) {
    const Rational next = capital * bet_row[a] / alpha.exact_weight(a);
    sum += alpha.exact_weight(a) * next;
  }
  return sum == capital;
}

bool fairness_check(const Gambler& g, const Prob& alpha, std::string_view w) {
  check_alphabets(g, alpha);
  if (alpha.mode() != NumericMode::exact || !alpha.strictly_positive())
    throw DomainError("fairness is checked for exact, strictly positive α");
  Rational capital = 1;
  std::size_t q = g.start();
  for (const char c : w) {
    const auto a = g.alphabet().index_of(c);
    capital *= g.bet(q).exact_weight(a) / alpha.exact_weight(a);
    q = g.next(q, a);
  }
  return martingale_step_fair(capital, g.bet(q).exact_weights(), alpha);
}

double log_capital_decomposition(const CapitalTrace& trace, const Gambler& g, const Prob& alpha) {
  if (trace.provenance != run_provenance(g, alpha))
    throw DomainError("trace was not produced by this gambler and measure");
  if (trace.bankrupt_at) throw DomainError("decomposition is undefined for a bankrupt trace");
  const std::size_t k = g.alphabet().size();
  if (trace.mode == NumericMode::exact && trace.exact_capital) {
    Rational product = 1;
    for (std::size_t q = 0; q < g.state_count(); ++q)
      for (std::size_t a = 0; a < k; ++a) {
        const auto count = trace.edge_counts[q * k + a];
        if (count == 0) continue;
        product *= rational_power(g.bet(q).exact_weight(a) / alpha.exact_weight(a), count);
      }
    if (product == *trace.exact_capital) return 0.0;
    return std::fabs(log2_rational(product) - log2_rational(*trace.exact_capital));
  }
  const auto log_ratio = log_ratio_table(g, alpha);
  double sum = 0.0;
  for (std::size_t i = 0; i < trace.edge_counts.size(); ++i)
    if (trace.edge_counts[i] != 0) sum += static_cast<double>(trace.edge_counts[i]) * log_ratio[i];
  return std::fabs(trace.log2_capital.back() - sum);
}

bool SccReport::in_bottom(std::size_t state) const {
  const auto c = component_of.at(state);
  return std::find(bottom.begin(), bottom.end(), c) != bottom.end();
}

std::vector<std::vector<std::size_t>> SccReport::bottom_sets() const {
  std::vector<std::vector<std::size_t>> out;
  for (const auto b : bottom) out.push_back(components[b]);
  return out;
}

SccReport bottom_sccs(const Gambler& g) {
  const std::size_t n = g.state_count();
  const std::size_t k = g.alphabet().size();
  std::vector<std::vector<std::size_t>> graph(n), reverse(n);
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t a = 0; a < k; ++a) graph[q].push_back(g.next(q, a));
    std::sort(graph[q].begin(), graph[q].end());
    graph[q].erase(std::unique(graph[q].begin(), graph[q].end()), graph[q].end());
    for (const auto t : graph[q]) reverse[t].push_back(q);
  }

  SccReport report;
  report.components = strongly_connected_components(graph);
  report.component_of.assign(n, 0);
  for (std::size_t c = 0; c < report.components.size(); ++c)
    for (const auto q : report.components[c]) report.component_of[q] = c;
  for (std::size_t c = 0; c < report.components.size(); ++c) {
    bool closed = true;
    for (const auto q : report.components[c])
      for (const auto t : graph[q]) closed = closed && report.component_of[t] == c;
    if (closed) report.bottom.push_back(c);
  }

  report.reaches.assign(n, std::vector<bool>(report.bottom.size(), false));
  for (std::size_t b = 0; b < report.bottom.size(); ++b) {
    std::deque<std::size_t> queue(report.components[report.bottom[b]].begin(),
                                  report.components[report.bottom[b]].end());
    for (const auto q : queue) report.reaches[q][b] = true;
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      for (const auto u : reverse[v])
        if (!report.reaches[u][b]) {
          report.reaches[u][b] = true;
          queue.push_back(u);
        }
    }
  }
  return report;
}

std::vector<AgafonovRow> agafonov_stats(const CapitalTrace& trace, const Gambler& g, const Prob& alpha) {
  check_alphabets(g, alpha);
  const std::size_t k = g.alphabet().size();
  std::vector<AgafonovRow> rows;
  for (std::size_t q = 0; q < g.state_count(); ++q) {
    const auto visits = trace.visit_counts.at(q);
    if (visits == 0) continue;
    AgafonovRow row;
    row.state = q;
    row.visits = visits;
    for (std::size_t a = 0; a < k; ++a) {
      const double f = static_cast<double>(trace.edge_counts[q * k + a]) / static_cast<double>(visits);
      row.frequencies.push_back(f);
      row.l1_to_alpha += std::fabs(f - alpha.weight(a));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

DichotomyReport dichotomy_check_part2(const CapitalTrace& trace, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("γ must lie strictly between 0 and 1");
  DichotomyReport report;
  report.gamma = gamma;
  for (const auto step : trace.checkpoints) {
    DichotomyRow row;
    row.step = step;
    row.log2_capital = trace.log2_capital.at(step);
    row.total_risk = trace.total_risk.at(step);
    row.boundary = row.total_risk == 0.0;
    row.holds = row.log2_capital < -gamma * row.total_risk;
    row.ratio = row.boundary ? std::numeric_limits<double>::quiet_NaN() : row.log2_capital / row.total_risk;
    if (!row.boundary && !row.holds) report.last_violation = step;
    report.rows.push_back(row);
  }
  return report;
}

std::string format_trace_csv(const CapitalTrace& trace, const Gambler& /*g*/) {
  std::string out = "step,state,symbol,log2_capital,total_risk_bits\n";
  for (const auto step : trace.checkpoints) {
    if (step == 0) continue;
    out += std::to_string(step) + "," + std::to_string(trace.states[step - 1]) + "," +
           trace.symbols[step - 1] + "," + format_real(trace.log2_capital[step]) + "," +
           format_real(trace.total_risk[step]) + "\n";
  }
  return out;
}

}  // namespace divnorm
