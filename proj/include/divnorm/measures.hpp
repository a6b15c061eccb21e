#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divnorm/alphabet.hpp"
#include "divnorm/rational.hpp"

namespace divnorm {

enum class NumericMode { exact, floating };

std::string_view to_string(NumericMode mode);
NumericMode parse_mode(std::string_view text);

// A nonnegative real or +∞. +∞ absorbs under addition.
class ExtReal {
 public:
  constexpr ExtReal() noexcept = default;
  explicit ExtReal(double value);

  static constexpr ExtReal infinity() noexcept {
    ExtReal r;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }

  constexpr bool is_infinite() const noexcept {
    return value_ == std::numeric_limits<double>::infinity();
  }
  constexpr bool is_finite() const noexcept { return !is_infinite(); }
  // +inf when infinite.
  constexpr double value() const noexcept { return value_; }

  friend ExtReal operator+(ExtReal a, ExtReal b) noexcept {
    ExtReal r;
    r.value_ = a.value_ + b.value_;
    return r;
  }
  // Scaling by a nonnegative factor with the measure-theory convention 0·∞ = 0.
  ExtReal scaled(double factor) const;

  friend constexpr bool operator==(ExtReal a, ExtReal b) noexcept = default;
  friend constexpr auto operator<=>(ExtReal a, ExtReal b) noexcept {
    return a.value_ <=> b.value_;
  }

 private:
  double value_ = 0.0;
};

// Shortest text that reads back to the same double; `inf`, `-inf`, `nan`.
std::string format_real(double value);
std::string format_ext(ExtReal value);

// A probability measure on a finite outcome space, held either as exact
// rationals or as binary64 weights.
class Prob {
 public:
  static Prob exact(OutcomeSpace space, std::vector<Rational> weights);
  static Prob floating(OutcomeSpace space, std::vector<double> weights);
  static Prob uniform(OutcomeSpace space, NumericMode mode = NumericMode::exact);

  const OutcomeSpace& space() const noexcept { return space_; }
  const Alphabet& alphabet() const noexcept { return space_.alphabet; }
  NumericMode mode() const noexcept { return mode_; }
  std::size_t size() const noexcept { return approx_.size(); }

  // Binary64 view; exact in float mode, rounded in exact mode.
  double weight(std::size_t i) const { return approx_.at(i); }
  std::span<const double> weights() const noexcept { return approx_; }
  // Exact mode only.
  const Rational& exact_weight(std::size_t i) const;
  std::span<const Rational> exact_weights() const;

  bool strictly_positive() const noexcept;
  double min_weight() const noexcept;

  Prob to_floating() const;
  Prob to_mode(NumericMode mode) const;

  friend bool operator==(const Prob& a, const Prob& b);

 private:
  Prob(OutcomeSpace space, NumericMode mode) : space_(std::move(space)), mode_(mode) {}

  OutcomeSpace space_;
  NumericMode mode_;
  std::vector<Rational> exact_;
  std::vector<double> approx_;
};

// Joint measure on Ω×Ω with Ω = Σ^ℓ, stored as a measure on Σ^{2ℓ}: the pair
// (u, v) is the word uv, so row-major order coincides with lexicographic order.
class JointProb {
 public:
  JointProb(OutcomeSpace base, std::vector<Rational> weights);
  JointProb(OutcomeSpace base, std::vector<double> weights);

  const OutcomeSpace& base() const noexcept { return base_; }
  const Prob& as_prob() const noexcept { return joint_; }

  Prob first_marginal() const;
  Prob second_marginal() const;
  // The measure in which both marginals are independent, on the same pair space.
  Prob product_of_marginals() const;

 private:
  OutcomeSpace base_;
  Prob joint_;
};

Prob degenerate(const OutcomeSpace& space, std::uint64_t outcome);
Prob degenerate(const OutcomeSpace& space, std::string_view outcome);

// α^(ℓ)(w) = Π_i α(w[i]); α must live on Σ^1.
Prob product_extension(const Prob& alpha, std::size_t length);

// Σ α(ω) log₂(α(ω)/β(ω)), with 0·log(0/q) = 0 and +∞ on support mismatch.
ExtReal kl_divergence(const Prob& alpha, const Prob& beta);

// Σ α(ω) D(π_ω‖α).
ExtReal entropy(const Prob& alpha);

enum class MiVariant {
  literal,       // D(αβ‖γ)
  conventional,  // D(γ‖αβ)
};

ExtReal mutual_information(const JointProb& gamma, MiVariant variant = MiVariant::literal);

double l1_distance(const Prob& alpha, const Prob& beta);
// Exact mode only.
Rational l1_distance_exact(const Prob& alpha, const Prob& beta);

// Comma-separated exact rationals in alphabet order, e.g. `1/2,1/2`.
Prob parse_prob(std::string_view text, const OutcomeSpace& space);
std::string format_prob(const Prob& p);

}  // namespace divnorm
