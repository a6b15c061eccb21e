#include <doctest.h>

#include <cmath>

#include "divnorm/errors.hpp"
#include "divnorm/sequences.hpp"
#include "divnorm/synthesis.hpp"
#include "support.hpp"

using namespace divnorm;

namespace {

const Alphabet kBin = Alphabet::binary();
const Prob kUniform = Prob::uniform(OutcomeSpace(kBin));

BlockMeasure point_mass(const std::string& w) { return BlockMeasure(degenerate(OutcomeSpace(kBin, w.size()), w)); }

}  // namespace

TEST_CASE("prefix masses") {
  SplitMix64 rng(3);
  const OutcomeSpace space(testing_support::alphabet_of_size(3), 3);
  const BlockMeasure pi0(testing_support::random_prob(rng, space));
  CHECK(pi0.prefix_mass("") == 1);
  for (std::size_t len = 0; len < 3; ++len)
    for (std::uint64_t i = 0; i < space.alphabet.word_count(len); ++i) {
      Rational sum = 0;
      for (std::size_t a = 0; a < 3; ++a) sum += pi0.prefix_mass(len + 1, i * 3 + a);
      CHECK(sum == pi0.prefix_mass(len, i));
    }
  CHECK_THROWS_AS(pi0.prefix_mass("0000"), DomainError);
  CHECK_THROWS_AS(BlockMeasure(kUniform.to_floating()), DomainError);
}

TEST_CASE("conditionals") {
  const BlockMeasure u(product_extension(kUniform, 3));
  CHECK(conditional(u, "01", '1') == Rational(1, 2));
  const BlockMeasure p = point_mass("01");
  CHECK(conditional(p, "", '0') == 1);
  CHECK(conditional(p, "0", '1') == 1);
  CHECK(conditional(p, "1", '0') == Rational(1, 2));
  CHECK(conditional(p, "1", '1') == Rational(1, 2));
  CHECK_THROWS_AS(conditional(p, "01", '0'), DomainError);
}

TEST_CASE("exploit gambler shape") {
  const Gambler g1 = exploit_gambler(BlockMeasure(kUniform));
  CHECK(g1.state_count() == 1);
  CHECK(state_risk(g1, 0, kUniform) == ExtReal(0.0));

  const Gambler g2 = exploit_gambler(point_mass("01"));
  CHECK(g2.state_count() == 3);
  CHECK(exploit_state_word(kBin, 2, 0).empty());
  CHECK(exploit_state_word(kBin, 2, 2) == "1");
  CHECK(g2.next(0, 0) == 1);
  CHECK(g2.next(1, 1) == 0);
  CHECK(is_fallback_state(point_mass("01"), 2));
  CHECK_FALSE(is_fallback_state(point_mass("01"), 1));

  const Alphabet tri("abc");
  CHECK(exploit_state_count(tri, 3) == 13);
  for (std::size_t q = 0; q < 13; ++q) CHECK(exploit_state_index(tri, exploit_state_word(tri, 3, q)) == q);

  SplitMix64 rng(9);
  const BlockMeasure pi0(testing_support::random_prob(rng, OutcomeSpace(tri, 3)));
  const Gambler g3 = exploit_gambler(pi0);
  const auto scc = bottom_sccs(g3);
  REQUIRE(scc.bottom.size() == 1);
  CHECK(scc.components[scc.bottom[0]].size() == 13);
  for (std::size_t q = 0; q < g3.state_count(); ++q) {
    Rational sum = 0;
    for (const auto& w : g3.bet(q).exact_weights()) sum += w;
    CHECK(sum == 1);
  }
}

TEST_CASE("telescoping per block") {
  SplitMix64 rng(13);
  const Prob alpha = Prob::exact(OutcomeSpace(kBin), {Rational(1, 3), Rational(2, 3)});
  for (int trial = 0; trial < 20; ++trial) {
    const BlockMeasure pi0(testing_support::random_prob(rng, OutcomeSpace(kBin, 3), true));
    const Gambler g = exploit_gambler(pi0);
    const Prob a3 = product_extension(alpha, 3);
    for (std::uint64_t u = 0; u < 8; ++u) {
      const std::string w = kBin.word(u, 3);
      const auto t = run(g, alpha, w, {NumericMode::exact});
      CHECK(*t.exact_capital == pi0.measure().exact_weight(u) / a3.exact_weight(u));
    }
  }
}

TEST_CASE("never-betting fixed point") {
  const Prob alpha = Prob::exact(OutcomeSpace(Alphabet("abc")), {Rational(1, 6), Rational(1, 3), Rational(1, 2)});
  const Gambler g = exploit_gambler(BlockMeasure(product_extension(alpha, 3)));
  for (std::size_t q = 0; q < g.state_count(); ++q) CHECK(state_risk(g, q, alpha) == ExtReal(0.0));
}

TEST_CASE("point mass exploit on (01)^w") {
  const Gambler g = exploit_gambler(point_mass("01"));
  const std::string s = periodic("01", 2000);
  const auto t = run(g, kUniform, s);
  for (std::size_t i = 0; i <= s.size(); ++i) CHECK(t.log2_capital[i] == static_cast<double>(i));
  for (std::size_t i = 2; i <= s.size(); i += 2) CHECK(t.log2_capital[i] >= 0.9 * 1.0 * static_cast<double>(i));
}

TEST_CASE("selecting pi0") {
  const auto sel = select_pi0(periodic("01", 1000), kUniform, 2, CheckpointSpec::geometric(), 0.5);
  CHECK(sel.measure.measure() == degenerate(OutcomeSpace(kBin, 2), "01"));
  CHECK(sel.blocks == 500);
  CHECK(sel.divergence == ExtReal(2.0));

  const auto single = select_pi0("0110", kUniform, 1, CheckpointSpec::list({3}), 0.5);
  CHECK(single.blocks == 3);
  CHECK(single.measure.measure().exact_weight(1) == Rational(2, 3));

  const auto r = select_pi0(iid(kUniform, 6, 200000), kUniform, 1, CheckpointSpec::geometric(), 0.5);
  CHECK(l1_distance(r.measure.measure(), kUniform) <= 0.05);

  CHECK_THROWS_AS(select_pi0("0", kUniform, 2, CheckpointSpec::geometric(), 0.5), DomainError);
}

TEST_CASE("ties go to the later checkpoint") {
  // Empirical measures at n = 2 and n = 4 are both uniform on {00, 11}.
  const auto sel = select_pi0("00110011", kUniform, 2, CheckpointSpec::list({2, 4}), 1.0);
  CHECK(sel.blocks == 4);
}

TEST_CASE("growth identity") {
  const CheckpointSpec cps = CheckpointSpec::every(2);
  {
    const BlockMeasure pi0 = point_mass("01");
    const std::string s = periodic("01", 400);
    const auto t = run(exploit_gambler(pi0), kUniform, s, {NumericMode::floating, cps});
    const auto rep = verify_growth_bound(t, pi0, kUniform, s);
    REQUIRE(rep.rows.size() == 200);
    for (const auto& row : rep.rows) {
      CHECK(row.residual == 0.0);
      CHECK(row.log2_capital == 2.0 * row.blocks);
      CHECK_FALSE(row.fallback_traversed);
    }
  }
  {
    const BlockMeasure pi0(product_extension(kUniform, 2));
    const std::string s = iid(kUniform, 2, 1000);
    const auto t = run(exploit_gambler(pi0), kUniform, s, {NumericMode::floating, cps});
    for (const auto& row : verify_growth_bound(t, pi0, kUniform, s).rows) {
      CHECK(row.residual == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(row.log2_capital == 0.0);
      CHECK(row.divergence_alpha == row.divergence_pi0);
    }
  }
  {
    const std::string s = iid(Prob::exact(OutcomeSpace(kBin), {Rational(1, 4), Rational(3, 4)}), 5, 3000);
    const auto emp = empirical_measure(kBin, s, 3, 1000);
    const BlockMeasure pi0(emp.measure);
    const auto t = run(exploit_gambler(pi0), kUniform, s, {NumericMode::floating, CheckpointSpec::list({3000})});
    const auto rep = verify_growth_bound(t, pi0, kUniform, s);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].divergence_pi0 == ExtReal(0.0));
    CHECK(rep.rows[0].log2_capital == doctest::Approx(1000 * rep.rows[0].divergence_alpha.value()).epsilon(1e-9));
    CHECK(std::fabs(rep.rows[0].residual) <= 1e-8);
  }
  {
    const BlockMeasure pi0 = point_mass("01");
    const std::string s = "0111";
    const auto t = run(exploit_gambler(pi0), kUniform, s, {NumericMode::floating, CheckpointSpec::list({1, 2, 4})});
    const auto rep = verify_growth_bound(t, pi0, kUniform, s);
    CHECK(rep.skipped == std::vector<std::uint64_t>{1});
    REQUIRE(rep.rows.size() == 2);
    CHECK_FALSE(rep.rows[0].fallback_traversed);
    CHECK(rep.rows[1].fallback_traversed);
    CHECK(std::isnan(rep.rows[1].residual));
  }
}

TEST_CASE("empirical exploit") {
  const std::string s = periodic("01", 100);
  CHECK(empirical_exploit(kBin, s, 50, 2) == exploit_gambler(point_mass("01")));
  const Gambler one = empirical_exploit(kBin, "0001", 4, 1);
  CHECK(one.state_count() == 1);
  CHECK(one.bet(0).exact_weight(0) == Rational(3, 4));
  const Gambler flat = empirical_exploit(kBin, "00011011", 4, 2);
  for (std::size_t q = 0; q < flat.state_count(); ++q) CHECK(state_risk(flat, q, kUniform) == ExtReal(0.0));
  CHECK_THROWS_AS(empirical_exploit(kBin, s, 0, 2), DomainError);
}

TEST_CASE("block measure text") {
  const BlockMeasure p = point_mass("01");
  CHECK(format_block_measure(p) == "block-measure 2\nmass 01 1/1\n");
  CHECK(parse_block_measure(format_block_measure(p), kBin).measure() == p.measure());
  const auto q = parse_block_measure("# x\nblock-measure 1\nmass 0 1/3\nmass 1 2/3\n", kBin);
  CHECK(q.measure().exact_weight(1) == Rational(2, 3));
  CHECK_THROWS_AS(parse_block_measure("block-measure 2\nmass 0 1/1\n", kBin), ParseError);
  CHECK_THROWS_AS(parse_block_measure("mass 0 1/1\n", kBin), ParseError);
  CHECK_THROWS_AS(parse_block_measure("block-measure 1\nmass 0 1/2\n", kBin), DomainError);
  CHECK_THROWS_AS(parse_block_measure("block-measure 1\nmass 0 1/2\nmass 0 1/2\n", kBin), ParseError);
}
