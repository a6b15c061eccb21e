#include <doctest.h>

#include "divnorm/empirical.hpp"
#include "divnorm/errors.hpp"
#include "support.hpp"

using namespace divnorm;

TEST_CASE("block occurrences") {
  CHECK(block_occurrences("01", "0101") == 2);
  CHECK(block_occurrences("01", "0010") == 0);
  CHECK(block_occurrences("0110", "0110") == 1);
  CHECK(block_occurrences("1", "") == 0);
  CHECK(block_occurrences("11", "111") == 1);
  CHECK_THROWS_AS(block_occurrences("", "01"), DomainError);
}

TEST_CASE("feeding in chunks") {
  BlockCounter chunked(Alphabet::binary(), 2);
  chunked.feed("0");
  chunked.feed("10");
  chunked.feed("");
  chunked.feed("1");
  CHECK(chunked.blocks() == 2);
  CHECK(chunked.count("01") == 2);
  CHECK(chunked.carry().empty());

  BlockCounter partial(Alphabet::binary(), 2);
  partial.feed("010");
  CHECK(partial.blocks() == 1);
  CHECK(partial.carry() == "0");
  CHECK(partial.symbols_consumed() == 3);
}

TEST_CASE("foreign symbols are rejected with their position") {
  BlockCounter c(Alphabet::binary(), 1);
  c.feed("01");
  try {
    c.feed("0a1");
    FAIL("expected an error");
  } catch (const DomainError& e) {
    const std::string what = e.what();
    CHECK(what.find("'a'") != std::string::npos);
    CHECK(what.find("3") != std::string::npos);
  }
  CHECK(c.symbols_consumed() == 2);
}

TEST_CASE("empirical measures") {
  const Alphabet bin = Alphabet::binary();
  const auto a = empirical_measure(bin, "0101", 1, 4);
  CHECK(a.measure.exact_weight(0) == Rational(1, 2));
  const auto b = empirical_measure(bin, "010", 1, 3);
  CHECK(b.measure.exact_weight(0) == Rational(2, 3));
  CHECK(b.measure.exact_weight(1) == Rational(1, 3));
  const auto c = empirical_measure(bin, "01010101", 2, 4);
  CHECK(c.measure == degenerate(OutcomeSpace(bin, 2), "01"));
  CHECK(c.blocks == 4);
  BlockCounter empty(bin, 2);
  empty.feed("0");
  CHECK_THROWS_AS(empirical_measure(empty), DomainError);
  CHECK_THROWS_AS(empirical_measure(bin, "01", 2, 2), DomainError);
}

TEST_CASE("streaming equals batch for random chunkings") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const Alphabet sigma = testing_support::alphabet_of_size(2 + rng.below(3));
    const std::size_t l = 1 + rng.below(4);
    const std::string x = testing_support::random_word(rng, sigma, rng.below(200));
    BlockCounter batch(sigma, l), stream(sigma, l);
    batch.feed(x);
    std::size_t pos = 0;
    while (pos < x.size()) {
      const std::size_t len = std::min<std::size_t>(rng.below(9), x.size() - pos);
      stream.feed(std::string_view(x).substr(pos, len));
      pos += len;
    }
    CHECK(std::equal(batch.counts().begin(), batch.counts().end(), stream.counts().begin()));
    CHECK(batch.carry() == stream.carry());
    CHECK(stream.blocks() == x.size() / l);
    CHECK(stream.carry().size() == x.size() % l);
    std::uint64_t total = 0;
    for (std::uint64_t w = 0; w < sigma.word_count(l); ++w) {
      CHECK(block_occurrences(sigma.word(w, l), x) == stream.counts()[w]);
      total += stream.counts()[w];
    }
    CHECK(total == stream.blocks());
    if (stream.blocks() > 0) {
      Rational sum = 0;
      const auto m = empirical_measure(stream);
      for (const auto& w : m.measure.exact_weights()) sum += w;
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("counter memory guard") {
  CHECK_THROWS_AS(BlockCounter(Alphabet::binary(), 25), DomainError);
  CHECK_THROWS_AS(BlockCounter(Alphabet::binary(), 0), DomainError);
}
