#include "maldist/rational.hpp"

#include <string>

#include "maldist/errors.hpp"

namespace maldist {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) {
    throw ParseError("not a rational: '" + std::string(text) + "'");
  }
  Integer n(std::string(num), 10);
  Integer d(std::string(den), 10);
  if (d == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
  Rational q(negative ? Integer(-n) : n, d);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

static_assert(sizeof(unsigned long) == sizeof(Natural), "LP64 platform expected");

Integer to_integer(Natural n) { return Integer(static_cast<unsigned long>(n)); }

Rational make_rational(std::int64_t num, std::uint64_t den) {
  Rational q(Integer(static_cast<long>(num)), to_integer(den));
  q.canonicalize();
  return q;
}

Rational pow(const Rational& base, Natural exponent) {
  Integer num;
  Integer den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  return Rational(num, den);
}

const Rational& Extended::value() const {
  if (infinite_) throw InvalidArgument("value() of an infinite extended rational");
  return value_;
}

std::string Extended::to_string() const { return infinite_ ? "inf" : maldist::to_string(value_); }

bool operator==(const Extended& a, const Extended& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

std::strong_ordering operator<=>(const Extended& a, const Extended& b) {
  if (a.infinite_ || b.infinite_) {
    if (a.infinite_ == b.infinite_) return std::strong_ordering::equal;
    return a.infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  int c = cmp(a.value_, b.value_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Extended operator+(const Extended& a, const Extended& b) {
  if (a.infinite_ || b.infinite_) return Extended::infinity();
  return Extended(Rational(a.value_ + b.value_));
}

Extended min(const Extended& a, const Extended& b) { return a <= b ? a : b; }

}  // namespace maldist
