#pragma once

#include <stdexcept>
#include <string>

#include <boost/multiprecision/gmp.hpp>

namespace totp {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric parameter (xi, delta, k, beta, ...) lies outside its domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or in-memory structure (graph, formula, tree, circuit).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A node was queried that does not belong to the tree.
class NotInTreeError : public Error {
 public:
  using Error::Error;
};

/// A self-reducible instance broke its declared depth or step budget.
class MalformedInstanceError : public Error {
 public:
  using Error::Error;
};

/// An enumeration or representation guard was exceeded.
class GuardError : public Error {
 public:
  using Error::Error;
};

/// The input family has no TotP counting route (e.g. a graph passed to CAPP).
class UnsupportedFamilyError : public Error {
 public:
  using Error::Error;
};

/// 2^e as a big integer.
inline BigInt pow2(unsigned e) {
  BigInt r = 1;
  r <<= e;
  return r;
}

}  // namespace totp
