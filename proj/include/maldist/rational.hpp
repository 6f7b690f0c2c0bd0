#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace maldist {

using Natural = std::uint64_t;
using Integer = mpz_class;
using Rational = mpq_class;

// Accepts "p", "p/q", "-p/q". The result is canonicalized.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
Rational pow(const Rational& base, Natural exponent);
Rational make_rational(std::int64_t num, std::uint64_t den = 1);
Integer to_integer(Natural n);

// Rational extended with +infinity; the value range of submeasures.
class Extended {
 public:
  Extended() = default;
  Extended(Rational value) : value_(std::move(value)) {}  // NOLINT: implicit by design of the domain
  static Extended infinity() {
    Extended e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }
  // Throws InvalidArgument when infinite.
  const Rational& value() const;
  std::string to_string() const;

  friend bool operator==(const Extended& a, const Extended& b);
  friend std::strong_ordering operator<=>(const Extended& a, const Extended& b);
  friend Extended operator+(const Extended& a, const Extended& b);
  friend Extended min(const Extended& a, const Extended& b);

 private:
  Rational value_{0};
  bool infinite_ = false;
};

}  // namespace maldist
