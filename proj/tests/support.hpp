#pragma once

#include <string>
#include <vector>

#include "divnorm/gambler.hpp"
#include "divnorm/measures.hpp"
#include "divnorm/sequences.hpp"

namespace testing_support {

inline divnorm::Alphabet alphabet_of_size(std::size_t k) {
  return divnorm::Alphabet(std::string("0123456789abcdef").substr(0, k));
}

// Random exact measure with small denominators; zeros allowed unless `positive`.
inline divnorm::Prob random_prob(divnorm::SplitMix64& rng, const divnorm::OutcomeSpace& space,
                                 bool positive = false) {
  const auto n = space.size();
  std::vector<unsigned long> raw(n);
  unsigned long total = 0;
  do {
    total = 0;
    for (auto& r : raw) {
      r = rng.below(positive ? 9 : 10) + (positive ? 1 : 0);
      total += r;
    }
  } while (total == 0);
  std::vector<divnorm::Rational> w;
  for (auto r : raw) {
    divnorm::Rational q(r, total);
    q.canonicalize();
    w.push_back(q);
  }
  return divnorm::Prob::exact(space, std::move(w));
}

inline std::string random_word(divnorm::SplitMix64& rng, const divnorm::Alphabet& sigma, std::size_t length) {
  std::string out;
  for (std::size_t i = 0; i < length; ++i) out += sigma.symbol(rng.below(sigma.size()));
  return out;
}

inline divnorm::Gambler random_gambler(divnorm::SplitMix64& rng, const divnorm::Alphabet& sigma,
                                       std::size_t states, bool positive_bets = false) {
  std::vector<std::uint32_t> trans(states * sigma.size());
  for (auto& t : trans) t = static_cast<std::uint32_t>(rng.below(states));
  std::vector<divnorm::Prob> bets;
  for (std::size_t q = 0; q < states; ++q) bets.push_back(random_prob(rng, divnorm::OutcomeSpace(sigma), positive_bets));
  return divnorm::Gambler(sigma, rng.below(states), std::move(trans), std::move(bets));
}

}  // namespace testing_support
