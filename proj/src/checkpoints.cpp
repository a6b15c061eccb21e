#include "divnorm/checkpoints.hpp"

#include <algorithm>
#include <charconv>

#include "divnorm/errors.hpp"
#include "divnorm/rational.hpp"

namespace divnorm {
namespace {

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ParseError("malformed checkpoint '" + std::string(text) + "'");
  return v;
}

// ⌈start·5^k/4^k⌉ without rounding error.
std::uint64_t geometric_point(std::uint64_t start, unsigned k) {
  BigInt num, den;
  mpz_ui_pow_ui(num.get_mpz_t(), 5, k);
  mpz_ui_pow_ui(den.get_mpz_t(), 4, k);
  num *= static_cast<unsigned long>(start);
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (!q.fits_ulong_p()) return UINT64_MAX;
  return q.get_ui();
}

}  // namespace

CheckpointSpec CheckpointSpec::geometric(std::uint64_t start) {
  if (start == 0) throw DomainError("geometric checkpoints need a positive start");
  return {Kind::geometric, start};
}

CheckpointSpec CheckpointSpec::every(std::uint64_t stride) {
  if (stride == 0) throw DomainError("checkpoint stride must be positive");
  return {Kind::every, stride};
}

CheckpointSpec CheckpointSpec::list(std::vector<std::uint64_t> points) {
  if (points.empty()) throw DomainError("checkpoint list is empty");
  if (points.front() == 0) throw DomainError("checkpoints must be positive");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i] <= points[i - 1]) throw DomainError("checkpoints must be strictly increasing");
  CheckpointSpec spec(Kind::list, 0);
  spec.points_ = std::move(points);
  return spec;
}

CheckpointSpec CheckpointSpec::parse(std::string_view text) {
  if (text == "geom") return geometric();
  if (text.starts_with("geom:")) return geometric(parse_u64(text.substr(5)));
  if (text.starts_with("every:")) return every(parse_u64(text.substr(6)));
  std::vector<std::uint64_t> points;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    points.push_back(parse_u64(text.substr(start, end - start)));
    start = end + 1;
  }
  return list(std::move(points));
}

std::string CheckpointSpec::describe() const {
  switch (kind_) {
    case Kind::geometric:
      return "geom:" + std::to_string(param_);
    case Kind::every:
      return "every:" + std::to_string(param_);
    case Kind::list: {
      std::string s;
      for (std::size_t i = 0; i < points_.size(); ++i) s += (i ? "," : "") + std::to_string(points_[i]);
      return s;
    }
  }
  return {};
}

std::uint64_t CheckpointSpec::next_after(std::uint64_t after) const {
  switch (kind_) {
    case Kind::geometric:
      for (unsigned k = 0;; ++k) {
        const auto p = geometric_point(param_, k);
        if (p > after) return p;
        if (p == UINT64_MAX) return 0;
      }
    case Kind::every:
      return (after / param_ + 1) * param_;
    case Kind::list: {
      const auto it = std::upper_bound(points_.begin(), points_.end(), after);
      return it == points_.end() ? 0 : *it;
    }
  }
  return 0;
}

std::uint64_t CheckpointSpec::last_point() const noexcept {
  return kind_ == Kind::list ? points_.back() : 0;
}

std::vector<std::uint64_t> CheckpointSpec::resolve(std::uint64_t limit) const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = next_after(0); p != 0 && p <= limit; p = next_after(p)) out.push_back(p);
  if (closes_at_end() && limit > 0 && (out.empty() || out.back() != limit)) out.push_back(limit);
  return out;
}

}  // namespace divnorm
