#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace maldist {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input (s-expressions, rationals, config values).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A precondition on arguments does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// No closed form is available to certify an exact mass.
class Uncertifiable : public Error {
 public:
  using Error::Error;
};

// A hypothesis required by a construction could not be certified.
class HypothesisNotCertified : public Error {
 public:
  using Error::Error;
};

class NoFiniteWitness : public Error {
 public:
  explicit NoFiniteWitness(std::uint64_t n)
      : Error("no finite witness below the search cap at n = " + std::to_string(n)), n_(n) {}
  std::uint64_t n() const { return n_; }

 private:
  std::uint64_t n_;
};

// Player I (Banach-Mazur) produced an empty set or left the chain.
class IllegalMove : public Error {
 public:
  using Error::Error;
};

// Player I (Laflamme) regressed a threshold or overlapped Player II's last set.
class IllegalAdversaryMove : public Error {
 public:
  using Error::Error;
};

// The dense-open family failed to refine a nonempty cylinder; always a bug.
class EmptyRefinement : public Error {
 public:
  using Error::Error;
};

}  // namespace maldist
