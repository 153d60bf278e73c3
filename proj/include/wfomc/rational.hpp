// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace wfomc {

using Int = mpz_class;
using Rat = mpq_class;

struct BadNumber : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses "42", "-1", "0.5", "2.08e-3", "1e-9" or "3/4" into an exact
// rational. Decimal literals convert exactly (0.1 -> 1/10).
Rat parse_rational(const std::string& text);

// d^k with an arbitrary-precision result.
Int ipow(const Int& base, const Int& exp);

// q^k for integer k >= 0.
Rat qpow(const Rat& base, const Int& exp);

// Shortest decimal that round-trips to exactly q within max_sig significant
// digits; falls back to a max_sig-digit approximation when q has no short
// terminating expansion. Fixed notation for moderate exponents, scientific
// otherwise.
std::string to_decimal_string(const Rat& q, int max_sig = 12);

// "num/den" (or "num" when den == 1).
std::string to_exact_string(const Rat& q);

// A rational upper bound on ln(n), n >= 1. Directed rounding via MPFR.
Rat ln_upper(const Int& n);

// Rational approximation of e^w (w given as a decimal string), rounded to
// `digits` significant decimal digits. Used for MLN log-weights.
Rat exp_rational(const std::string& log_weight, int digits = 12);

}  // namespace wfomc
