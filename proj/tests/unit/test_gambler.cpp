#include <doctest.h>

#include <cmath>

#include "divnorm/errors.hpp"
#include "divnorm/gambler.hpp"
#include "divnorm/sequences.hpp"
#include "support.hpp"

using namespace divnorm;
using testing_support::random_gambler;
using testing_support::random_word;

namespace {

const Alphabet kBin = Alphabet::binary();
const OutcomeSpace kSpace{kBin};
const Prob kUniform = Prob::uniform(kSpace);

Prob bet(long a, long b, long den) { return Prob::exact(kSpace, {Rational(a, den), Rational(b, den)}); }

Gambler constant_bet(const Prob& b) { return Gambler(kBin, 0, {0, 0}, {b}); }

}  // namespace

TEST_CASE("gambler validation") {
  CHECK_THROWS_AS(Gambler(kBin, 0, {0, 0}, {}), DomainError);
  CHECK_THROWS_AS(Gambler(kBin, 1, {0, 0}, {kUniform}), DomainError);
  CHECK_THROWS_AS(Gambler(kBin, 0, {0, 1}, {kUniform}), DomainError);
  CHECK_THROWS_AS(Gambler(kBin, 0, {0}, {kUniform}), DomainError);
  CHECK_THROWS_AS(Gambler(kBin, 0, {0, 0}, {kUniform.to_floating()}), DomainError);
  CHECK_THROWS_AS(Gambler(kBin, 0, {0, 0}, {Prob::uniform(OutcomeSpace(Alphabet("ab")))}), DomainError);
}

TEST_CASE("capital examples") {
  const auto never = run(constant_bet(kUniform), kUniform, iid(kUniform, 1, 500));
  for (const double v : never.log2_capital) CHECK(v == 0.0);
  for (const double v : never.total_risk) CHECK(v == 0.0);

  const auto all_in = run(constant_bet(bet(1, 0, 1)), kUniform, periodic("0", 100));
  for (std::size_t i = 0; i <= 100; ++i) CHECK(all_in.log2_capital[i] == static_cast<double>(i));
  CHECK_FALSE(all_in.bankrupt_at);

  const auto exact = run(constant_bet(bet(1, 0, 1)), kUniform, periodic("0", 100), {NumericMode::exact});
  CHECK(*exact.exact_capital == Rational(BigInt(1) << 100));
  CHECK(exact.log2_capital.back() == 100.0);
}

TEST_CASE("bankruptcy is sticky") {
  const auto t = run(constant_bet(bet(1, 0, 1)), kUniform, "0010");
  CHECK(t.bankrupt_at == 3u);
  CHECK(t.log2_capital[2] == 2.0);
  CHECK(std::isinf(t.log2_capital[3]));
  CHECK(std::isinf(t.log2_capital[4]));
  CHECK(t.visit_counts[0] == 4);
  CHECK_THROWS_AS(log_capital_decomposition(t, constant_bet(bet(1, 0, 1)), kUniform), DomainError);
}

TEST_CASE("undefined payoff and run limits") {
  const Prob skewed = bet(1, 0, 1);
  CHECK_THROWS_WITH_AS(run(constant_bet(kUniform), skewed, "001"), doctest::Contains("payoff undefined"),
                       DomainError);
  CHECK_NOTHROW(run(constant_bet(kUniform), skewed, "000"));
  CHECK_THROWS_AS(run(constant_bet(kUniform), kUniform, periodic("0", kExactStepLimit + 1), {NumericMode::exact}),
                  DomainError);
  CHECK_NOTHROW(run(constant_bet(kUniform), kUniform, periodic("0", kExactStepLimit), {NumericMode::exact}));
  CHECK_THROWS_AS(run(constant_bet(kUniform), kUniform.to_floating(), "01", {NumericMode::exact}), DomainError);
  CHECK_THROWS_AS(run(constant_bet(kUniform), kUniform, "0x"), DomainError);
}

TEST_CASE("state risk") {
  const Gambler g(kBin, 0, {1, 1, 0, 0}, {kUniform, bet(1, 3, 4)});
  CHECK(state_risk(g, 0, kUniform) == ExtReal(0.0));
  CHECK(state_risk(g, 1, kUniform).value() == doctest::Approx(0.20751874963942191).epsilon(1e-15));
  CHECK(state_risk(constant_bet(bet(1, 0, 1)), 0, kUniform).is_infinite());
  CHECK_THROWS_AS(state_risk(g, 2, kUniform), DomainError);
}

TEST_CASE("total risk") {
  const double r = 1.0 - 0.5 * std::log2(3.0);
  const Gambler single = constant_bet(bet(1, 3, 4));
  const auto t = run(single, kUniform, periodic("01", 64));
  for (std::size_t i = 0; i <= 64; ++i) CHECK(t.total_risk[i] == doctest::Approx(r * i).epsilon(1e-12));
  CHECK(total_risk(t, single, kUniform) == t.total_risk);

  // Alternating states on (01)^ω.
  const Gambler two(kBin, 0, {1, 1, 0, 0}, {bet(1, 3, 4), Prob::exact(kSpace, {Rational(1, 3), Rational(2, 3)})});
  const double r0 = state_risk(two, 0, kUniform).value(), r1 = state_risk(two, 1, kUniform).value();
  const auto ta = run(two, kUniform, periodic("01", 50), {NumericMode::exact});
  for (std::size_t i = 0; i <= 50; ++i)
    CHECK(ta.total_risk[i] == doctest::Approx(((i + 1) / 2) * r0 + (i / 2) * r1).epsilon(1e-12));
  CHECK(total_risk(ta, two, kUniform) == ta.total_risk);

  CHECK_THROWS_AS(total_risk(t, two, kUniform), DomainError);
  for (std::size_t i = 1; i < ta.total_risk.size(); ++i) CHECK(ta.total_risk[i] >= ta.total_risk[i - 1]);
}

TEST_CASE("risk additivity across a split") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Gambler g = random_gambler(rng, kBin, 1 + rng.below(6), true);
    const std::string w1 = random_word(rng, kBin, rng.below(40)), w2 = random_word(rng, kBin, rng.below(40));
    const auto whole = run(g, kUniform, w1 + w2, {NumericMode::exact});
    std::vector<std::uint32_t> trans(g.transitions().begin(), g.transitions().end());
    std::vector<Prob> bets;
    for (std::size_t q = 0; q < g.state_count(); ++q) bets.push_back(g.bet(q));
    const Gambler resumed(kBin, g.state_after(w1), trans, bets);
    const auto first = run(g, kUniform, w1, {NumericMode::exact});
    const auto second = run(resumed, kUniform, w2, {NumericMode::exact});
    CHECK(whole.total_risk.back() ==
          doctest::Approx(first.total_risk.back() + second.total_risk.back()).epsilon(1e-12));
  }
}

TEST_CASE("count conservation at every checkpoint") {
  SplitMix64 rng(41);
  const Gambler g = random_gambler(rng, kBin, 5);
  const std::string s = iid(kUniform, 2, 3000);
  const auto t = run(g, kUniform, s, {NumericMode::floating, CheckpointSpec::every(250)});
  REQUIRE(t.snapshots.size() == 12);
  for (const auto& snap : t.snapshots) {
    std::uint64_t visits = 0;
    for (std::size_t q = 0; q < 5; ++q) {
      visits += snap.visits[q];
      CHECK(snap.edges[2 * q] + snap.edges[2 * q + 1] == snap.visits[q]);
    }
    CHECK(visits == snap.step);
  }
}

TEST_CASE("martingale fairness") {
  SplitMix64 rng(51);
  const Prob alpha = Prob::exact(kSpace, {Rational(1, 3), Rational(2, 3)});
  for (int trial = 0; trial < 200; ++trial) {
    const Gambler g = random_gambler(rng, kBin, 1 + rng.below(8));
    CHECK(fairness_check(g, alpha, random_word(rng, kBin, rng.below(101))));
  }
  const std::vector<Rational> broken{Rational(1, 2), Rational(2, 3)};
  CHECK_FALSE(martingale_step_fair(Rational(5), broken, alpha));
  CHECK(martingale_step_fair(Rational(5), kUniform.exact_weights(), alpha));
  CHECK_THROWS_AS(fairness_check(constant_bet(kUniform), bet(1, 0, 1), "0"), DomainError);
}

TEST_CASE("capital decomposition") {
  SplitMix64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const Gambler g = random_gambler(rng, kBin, 1 + rng.below(6), true);
    const std::string w = random_word(rng, kBin, 300);
    const auto exact = run(g, kUniform, w, {NumericMode::exact});
    CHECK(log_capital_decomposition(exact, g, kUniform) == 0.0);
    const auto flt = run(g, kUniform, w);
    CHECK(log_capital_decomposition(flt, g, kUniform) <= 1e-9 * 300);
  }
  const auto never = run(constant_bet(kUniform), kUniform, "0110");
  CHECK(log_capital_decomposition(never, constant_bet(kUniform), kUniform) == 0.0);
}

TEST_CASE("bottom components") {
  const auto one = bottom_sccs(constant_bet(kUniform));
  CHECK(one.bottom_sets() == std::vector<std::vector<std::size_t>>{{0}});

  const Gambler funnel(kBin, 0, {1, 1, 1, 1}, {kUniform, kUniform});
  const auto f = bottom_sccs(funnel);
  CHECK(f.bottom_sets() == std::vector<std::vector<std::size_t>>{{1}});
  CHECK_FALSE(f.in_bottom(0));
  CHECK(f.in_bottom(1));
  CHECK(f.reaches[0][0]);

  // Two separate sinks reachable from a hub.
  const Gambler split(kBin, 0, {1, 2, 1, 1, 2, 2}, {kUniform, kUniform, kUniform});
  const auto s = bottom_sccs(split);
  CHECK(s.bottom.size() == 2);
  CHECK(s.reaches[0] == std::vector<bool>{true, true});
}

TEST_CASE("absorption is observed on every run") {
  SplitMix64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const Gambler g = random_gambler(rng, kBin, 1 + rng.below(8));
    const auto t = run(g, kUniform, random_word(rng, kBin, 200));
    CHECK(t.absorption_held);
    if (t.absorbed_at) {
      const auto scc = bottom_sccs(g);
      for (std::size_t i = *t.absorbed_at; i < t.states.size(); ++i) CHECK(scc.in_bottom(t.states[i]));
    }
  }
}

TEST_CASE("Agafonov frequencies") {
  const auto t = run(constant_bet(kUniform), kUniform, periodic("01", 100));
  const auto rows = agafonov_stats(t, constant_bet(kUniform), kUniform);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].frequencies == std::vector<double>{0.5, 0.5});
  CHECK(rows[0].l1_to_alpha == 0.0);

  const Gambler funnel(kBin, 0, {1, 1, 1, 1}, {kUniform, kUniform});
  const auto unvisited = agafonov_stats(run(funnel, kUniform, ""), funnel, kUniform);
  CHECK(unvisited.empty());
  const auto later = agafonov_stats(run(funnel, kUniform, "0"), funnel, kUniform);
  REQUIRE(later.size() == 1);
  CHECK(later[0].state == 0);
}

TEST_CASE("dichotomy part two") {
  const auto never = run(constant_bet(kUniform), kUniform, iid(kUniform, 4, 1000));
  const auto report = dichotomy_check_part2(never, 0.9);
  for (const auto& row : report.rows) {
    CHECK(row.boundary);
    CHECK(std::isnan(row.ratio));
  }
  CHECK_FALSE(report.last_violation);

  const Gambler g = constant_bet(bet(1, 3, 4));
  const auto t = run(g, kUniform, iid(kUniform, 0, 200000));
  const auto d = dichotomy_check_part2(t, 0.9);
  CHECK(d.rows.back().holds);
  CHECK(d.rows.back().ratio == doctest::Approx(-1.0).epsilon(0.05));
  CHECK_THROWS_AS(dichotomy_check_part2(t, 1.0), DomainError);
}

TEST_CASE("gambler text format") {
  SplitMix64 rng(81);
  for (int trial = 0; trial < 30; ++trial) {
    const Gambler g = random_gambler(rng, testing_support::alphabet_of_size(2 + rng.below(3)), 1 + rng.below(5));
    const std::string text = format_gambler(g);
    const Gambler back = parse_gambler(text);
    CHECK(back == g);
    CHECK(format_gambler(back) == text);
  }
  const std::string ok = "# comment\nalphabet 01\nstates 1\nstart 0\ntrans 0 0 0\ntrans 0 1 0\nbet 0 0 1/4\nbet 0 1 3/4\n";
  CHECK(parse_gambler(ok).bet(0) == bet(1, 3, 4));

  auto line_of = [](const std::string& text) {
    try {
      parse_gambler(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("alphabet 01\nstates 1\nstart 0\ntrans 0 0 0\ntrans 0 2 0\n") == 5);
  CHECK(line_of("alphabet 01\nstates 1\nstart 3\n") == 3);
  CHECK(line_of("alphabet 01\nstates 1\nfrobnicate\n") == 3);
  CHECK(line_of("alphabet 01\nstates 1\nstart 0\ntrans 0 0 0\ntrans 0 0 0\n") == 5);
  CHECK(line_of("alphabet 01\nstates 1\nstart 0\ntrans 0 0 0\nbet 0 0 1/2\nbet 0 1 1/2\n") != 0);
  CHECK(line_of("alphabet 01\nstates 1\nstart 0\ntrans 0 0 0\ntrans 0 1 0\nbet 0 0 x\nbet 0 1 1/2\n") == 6);
  CHECK_THROWS_AS(
      parse_gambler("alphabet 01\nstates 1\nstart 0\ntrans 0 0 0\ntrans 0 1 0\nbet 0 0 1/2\nbet 0 1 2/3\n"),
      DomainError);
}

TEST_CASE("trace CSV") {
  const Gambler g = constant_bet(bet(1, 0, 1));
  const auto t = run(g, kUniform, "0001", {NumericMode::floating, CheckpointSpec::every(2)});
  CHECK(format_trace_csv(t, g) == "step,state,symbol,log2_capital,total_risk_bits\n2,0,0,2,inf\n4,0,1,-inf,inf\n");
}
