#include "divnorm/rational.hpp"

#include <cmath>
#include <limits>

#include "divnorm/errors.hpp"

namespace divnorm {
namespace {

double log2_integer(const BigInt& v) {
  long exp = 0;
  const double mantissa = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return static_cast<double>(exp) + std::log2(mantissa);
}

}  // namespace

double log2_rational(const Rational& value) {
  if (sgn(value) < 0) throw DomainError("log2 of a negative rational");
  if (sgn(value) == 0) return -std::numeric_limits<double>::infinity();
  // Within binary64 range the rounded quotient keeps full relative precision,
  // including for ratios close to 1.
  if (mpz_sizeinbase(value.get_num_mpz_t(), 2) < 1000 &&
      mpz_sizeinbase(value.get_den_mpz_t(), 2) < 1000) {
    const double d = to_double(value);
    if (std::isnormal(d)) return std::log2(d);
  }
  return log2_integer(value.get_num()) - log2_integer(value.get_den());
}

double to_double(const Rational& value) {
  static const BigInt limit = BigInt(1) << 53;
  if (abs(value.get_num()) < limit && value.get_den() < limit)
    return value.get_num().get_d() / value.get_den().get_d();
  return value.get_d();
}

Rational parse_rational(std::string_view text, bool allow_decimal) {
  const std::string s(text);
  auto fail = [&]() -> Rational { throw ParseError("malformed rational '" + s + "'"); };
  if (s.empty()) return fail();

  auto is_integer = [](std::string_view t) {
    std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  auto to_int = [](std::string_view t) {
    if (!t.empty() && t[0] == '+') t.remove_prefix(1);
    return BigInt(std::string(t), 10);
  };

  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const std::string_view num(s.data(), slash);
    const std::string_view den(s.data() + slash + 1, s.size() - slash - 1);
    if (!is_integer(num) || !is_integer(den) || den[0] == '-' || den[0] == '+') return fail();
    BigInt d = to_int(den);
    if (d == 0) throw ParseError("zero denominator in '" + s + "'");
    Rational r(to_int(num), d);
    r.canonicalize();
    return r;
  }
  if (is_integer(s)) return Rational(to_int(s));
  if (!allow_decimal) return fail();

  const auto dot = s.find('.');
  if (dot == std::string::npos) return fail();
  std::string whole = s.substr(0, dot);
  const std::string frac = s.substr(dot + 1);
  if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos) return fail();
  bool negative = false;
  if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) {
    negative = whole[0] == '-';
    whole.erase(0, 1);
  }
  if (whole.empty()) whole = "0";
  if (whole.find_first_not_of("0123456789") != std::string::npos) return fail();
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
  Rational r(BigInt(whole + frac, 10), scale);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

std::string format_rational(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

}  // namespace divnorm
