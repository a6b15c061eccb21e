#include "divnorm/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "divnorm/errors.hpp"

namespace divnorm {
namespace {

constexpr double kFloatSumTolerance = 1e-12;

void require_same_space(const Prob& a, const Prob& b, const char* op) {
  if (!(a.space() == b.space()))
    throw DomainError(std::string(op) + ": measures live on different outcome spaces");
  if (a.mode() != b.mode())
    throw DomainError(std::string(op) + ": cannot mix exact and float measures");
}

// D(π_ω ‖ α) = log₂(1/α(ω)), evaluated with the same arithmetic kl_divergence
// uses for the single nonzero term.
double divergence_from_certainty(const Prob& alpha, std::size_t outcome) {
  if (alpha.mode() == NumericMode::exact) {
    const Rational& q = alpha.exact_weight(outcome);
    if (sgn(q) == 0) return std::numeric_limits<double>::infinity();
    const Rational ratio = Rational(1) / q;
    return 1.0 * log2_rational(ratio);
  }
  const double q = alpha.weight(outcome);
  if (q == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 * std::log2(1.0 / q);
}

}  // namespace

std::string_view to_string(NumericMode mode) {
  return mode == NumericMode::exact ? "exact" : "float";
}

NumericMode parse_mode(std::string_view text) {
  if (text == "exact") return NumericMode::exact;
  if (text == "float") return NumericMode::floating;
  throw ParseError("unknown numeric mode '" + std::string(text) + "' (expected exact|float)");
}

ExtReal::ExtReal(double value) : value_(value) {
  if (std::isnan(value) || value < 0.0) throw DomainError("extended real must be nonnegative");
}

ExtReal ExtReal::scaled(double factor) const {
  if (std::isnan(factor) || factor < 0.0) throw DomainError("scale factor must be nonnegative");
  if (factor == 0.0) return ExtReal{};
  ExtReal r;
  r.value_ = value_ * factor;
  return r;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  // Shortest round-trip digits; positional notation for moderate magnitudes.
  char buf[400];
  const double mag = std::abs(value);
  const bool positional = mag == 0.0 || (mag >= 1e-5 && mag < 1e16);
  const auto res = std::to_chars(buf, buf + sizeof buf, value,
                                 positional ? std::chars_format::fixed : std::chars_format::scientific);
  return std::string(buf, res.ptr);
}

std::string format_ext(ExtReal value) { return format_real(value.value()); }

Prob Prob::exact(OutcomeSpace space, std::vector<Rational> weights) {
  if (weights.size() != space.size())
    throw DomainError("measure has " + std::to_string(weights.size()) + " weights for " +
                      std::to_string(space.size()) + " outcomes");
  Rational total;
  for (auto& w : weights) {
    w.canonicalize();
    if (sgn(w) < 0) throw DomainError("measure weights must be nonnegative");
    total += w;
  }
  if (total != 1) throw DomainError("measure weights sum to " + format_rational(total) + ", not 1");
  Prob p(std::move(space), NumericMode::exact);
  p.approx_.reserve(weights.size());
  for (const auto& w : weights) p.approx_.push_back(to_double(w));
  p.exact_ = std::move(weights);
  return p;
}

Prob Prob::floating(OutcomeSpace space, std::vector<double> weights) {
  if (weights.size() != space.size())
    throw DomainError("measure has " + std::to_string(weights.size()) + " weights for " +
                      std::to_string(space.size()) + " outcomes");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("measure weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kFloatSumTolerance)
    throw DomainError("float measure weights do not sum to 1 within 1e-12");
  Prob p(std::move(space), NumericMode::floating);
  p.approx_ = std::move(weights);
  return p;
}

Prob Prob::uniform(OutcomeSpace space, NumericMode mode) {
  const auto n = space.size();
  if (mode == NumericMode::exact)
    return exact(std::move(space), std::vector<Rational>(n, Rational(1, n)));
  return floating(std::move(space), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

const Rational& Prob::exact_weight(std::size_t i) const {
  if (mode_ != NumericMode::exact) throw DomainError("exact weight requested from a float measure");
  return exact_.at(i);
}

std::span<const Rational> Prob::exact_weights() const {
  if (mode_ != NumericMode::exact) throw DomainError("exact weights requested from a float measure");
  return exact_;
}

bool Prob::strictly_positive() const noexcept {
  if (mode_ == NumericMode::exact)
    return std::all_of(exact_.begin(), exact_.end(), [](const Rational& w) { return sgn(w) > 0; });
  return std::all_of(approx_.begin(), approx_.end(), [](double w) { return w > 0.0; });
}

double Prob::min_weight() const noexcept {
  return *std::min_element(approx_.begin(), approx_.end());
}

Prob Prob::to_floating() const {
  if (mode_ == NumericMode::floating) return *this;
  Prob p(space_, NumericMode::floating);
  p.approx_ = approx_;
  return p;
}

Prob Prob::to_mode(NumericMode mode) const {
  if (mode == mode_) return *this;
  if (mode == NumericMode::floating) return to_floating();
  throw DomainError("a float measure cannot be converted to exact rationals");
}

bool operator==(const Prob& a, const Prob& b) {
  if (!(a.space_ == b.space_) || a.mode_ != b.mode_) return false;
  return a.mode_ == NumericMode::exact ? a.exact_ == b.exact_ : a.approx_ == b.approx_;
}

JointProb::JointProb(OutcomeSpace base, std::vector<Rational> weights)
    : base_(base), joint_(Prob::exact(OutcomeSpace(base.alphabet, 2 * base.length), std::move(weights))) {}

JointProb::JointProb(OutcomeSpace base, std::vector<double> weights)
    : base_(base), joint_(Prob::floating(OutcomeSpace(base.alphabet, 2 * base.length), std::move(weights))) {}

Prob JointProb::first_marginal() const {
  const auto n = base_.size();
  if (joint_.mode() == NumericMode::exact) {
    std::vector<Rational> m(n);
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t j = 0; j < n; ++j) m[i] += joint_.exact_weight(i * n + j);
    return Prob::exact(base_, std::move(m));
  }
  std::vector<double> m(n, 0.0);
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j) m[i] += joint_.weight(i * n + j);
  return Prob::floating(base_, std::move(m));
}

Prob JointProb::second_marginal() const {
  const auto n = base_.size();
  if (joint_.mode() == NumericMode::exact) {
    std::vector<Rational> m(n);
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t j = 0; j < n; ++j) m[j] += joint_.exact_weight(i * n + j);
    return Prob::exact(base_, std::move(m));
  }
  std::vector<double> m(n, 0.0);
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j) m[j] += joint_.weight(i * n + j);
  return Prob::floating(base_, std::move(m));
}

Prob JointProb::product_of_marginals() const {
  const Prob a = first_marginal();
  const Prob b = second_marginal();
  const auto n = base_.size();
  if (joint_.mode() == NumericMode::exact) {
    std::vector<Rational> w(n * n);
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t j = 0; j < n; ++j) w[i * n + j] = a.exact_weight(i) * b.exact_weight(j);
    return Prob::exact(joint_.space(), std::move(w));
  }
  std::vector<double> w(n * n);
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j) w[i * n + j] = a.weight(i) * b.weight(j);
  return Prob::floating(joint_.space(), std::move(w));
}

Prob degenerate(const OutcomeSpace& space, std::uint64_t outcome) {
  const auto n = space.size();
  if (outcome >= n) throw DomainError("outcome index out of range");
  std::vector<Rational> w(n);
  w[outcome] = 1;
  return Prob::exact(space, std::move(w));
}

Prob degenerate(const OutcomeSpace& space, std::string_view outcome) {
  if (outcome.size() != space.length)
    throw DomainError("outcome '" + std::string(outcome) + "' has the wrong length");
  return degenerate(space, space.alphabet.word_index(outcome));
}

Prob product_extension(const Prob& alpha, std::size_t length) {
  if (alpha.space().length != 1) throw DomainError("product extension needs a measure on Σ");
  if (length == 0) throw DomainError("product extension needs ℓ ≥ 1");
  if (length == 1) return alpha;
  const OutcomeSpace space(alpha.alphabet(), length);
  const auto n = space.size();
  const auto k = alpha.size();
  if (alpha.mode() == NumericMode::exact) {
    std::vector<Rational> w(n);
    std::vector<Rational> prev(alpha.exact_weights().begin(), alpha.exact_weights().end());
    // Extend one symbol at a time: index(wa) = index(w)·k + a.
    for (std::size_t l = 2; l <= length; ++l) {
      std::vector<Rational> next(prev.size() * k);
      for (std::size_t i = 0; i < prev.size(); ++i)
        for (std::size_t a = 0; a < k; ++a) next[i * k + a] = prev[i] * alpha.exact_weight(a);
      prev = std::move(next);
    }
    w = std::move(prev);
    return Prob::exact(space, std::move(w));
  }
  std::vector<double> prev(alpha.weights().begin(), alpha.weights().end());
  for (std::size_t l = 2; l <= length; ++l) {
    std::vector<double> next(prev.size() * k);
    for (std::size_t i = 0; i < prev.size(); ++i)
      for (std::size_t a = 0; a < k; ++a) next[i * k + a] = prev[i] * alpha.weight(a);
    prev = std::move(next);
  }
  // Rounding can push the sum a few ulps past the float tolerance for long
  // words, so normalize before validation.
  double total = 0.0;
  for (double v : prev) total += v;
  if (std::abs(total - 1.0) > kFloatSumTolerance)
    for (double& v : prev) v /= total;
  return Prob::floating(space, std::move(prev));
}

ExtReal kl_divergence(const Prob& alpha, const Prob& beta) {
  require_same_space(alpha, beta, "kl_divergence");
  double acc = 0.0;
  const auto n = alpha.size();
  if (alpha.mode() == NumericMode::exact) {
    for (std::size_t i = 0; i < n; ++i) {
      const Rational& p = alpha.exact_weight(i);
      if (sgn(p) == 0) continue;
      const Rational& q = beta.exact_weight(i);
      if (sgn(q) == 0) return ExtReal::infinity();
      if (p == q) continue;
      const Rational ratio = p / q;
      acc += alpha.weight(i) * log2_rational(ratio);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = alpha.weight(i);
      if (p == 0.0) continue;
      const double q = beta.weight(i);
      if (q == 0.0) return ExtReal::infinity();
      acc += p * std::log2(p / q);
    }
  }
  return ExtReal(std::max(acc, 0.0));
}

ExtReal entropy(const Prob& alpha) {
  double acc = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double w = alpha.weight(i);
    if (w == 0.0) continue;
    acc += w * divergence_from_certainty(alpha, i);
  }
  return ExtReal(std::max(acc, 0.0));
}

ExtReal mutual_information(const JointProb& gamma, MiVariant variant) {
  const Prob independent = gamma.product_of_marginals();
  return variant == MiVariant::literal ? kl_divergence(independent, gamma.as_prob())
                                       : kl_divergence(gamma.as_prob(), independent);
}

Rational l1_distance_exact(const Prob& alpha, const Prob& beta) {
  require_same_space(alpha, beta, "l1_distance");
  if (alpha.mode() != NumericMode::exact) throw DomainError("exact L1 distance needs exact measures");
  Rational total;
  for (std::size_t i = 0; i < alpha.size(); ++i) total += abs(alpha.exact_weight(i) - beta.exact_weight(i));
  return total;
}

double l1_distance(const Prob& alpha, const Prob& beta) {
  require_same_space(alpha, beta, "l1_distance");
  if (alpha.mode() == NumericMode::exact) return to_double(l1_distance_exact(alpha, beta));
  double total = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) total += std::abs(alpha.weight(i) - beta.weight(i));
  return total;
}

Prob parse_prob(std::string_view text, const OutcomeSpace& space) {
  std::vector<Rational> weights;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto field = text.substr(start, end - start);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    weights.push_back(parse_rational(field, true));
    start = end + 1;
  }
  return Prob::exact(space, std::move(weights));
}

std::string format_prob(const Prob& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ',';
    if (p.mode() == NumericMode::exact) {
      out += format_rational(p.exact_weight(i));
    } else {
      out += format_real(p.weight(i));
    }
  }
  return out;
}

}  // namespace divnorm
