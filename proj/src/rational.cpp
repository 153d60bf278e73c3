// Copyright (c) 2026 the approxwfomc authors
// Distributed under the MIT license (see LICENSE)

#include "wfomc/rational.hpp"

#include <mpfr.h>

#include <cctype>
#include <cstdlib>

namespace wfomc {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rat parse_rational(const std::string& text) {
  std::string s = text;
  if (s.empty()) throw BadNumber("empty number");

  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  if (s.empty()) throw BadNumber("bad number '" + text + "'");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      throw BadNumber("bad rational '" + text + "'");
    Int d(den);
    if (d == 0) throw BadNumber("zero denominator in '" + text + "'");
    Rat q(Int(num), d);
    q.canonicalize();
    return neg ? Rat(-q) : q;
  }

  // [digits][.digits][e[+-]digits]
  long exp10 = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    std::string es = s.substr(epos + 1);
    s = s.substr(0, epos);
    if (es.empty()) throw BadNumber("bad exponent in '" + text + "'");
    bool eneg = false;
    if (es[0] == '+' || es[0] == '-') {
      eneg = es[0] == '-';
      es = es.substr(1);
    }
    if (!all_digits(es) || es.size() > 6)
      throw BadNumber("bad exponent in '" + text + "'");
    exp10 = std::atol(es.c_str());
    if (eneg) exp10 = -exp10;
  }

  std::string int_part = s, frac_part;
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty())
    throw BadNumber("bad number '" + text + "'");
  if (!int_part.empty() && !all_digits(int_part))
    throw BadNumber("bad number '" + text + "'");
  if (!frac_part.empty() && !all_digits(frac_part))
    throw BadNumber("bad number '" + text + "'");

  Int mantissa(int_part.empty() ? "0" : int_part);
  for (char c : frac_part) {
    mantissa *= 10;
    mantissa += c - '0';
  }
  exp10 -= static_cast<long>(frac_part.size());

  Rat q(mantissa);
  if (exp10 > 0)
    q *= Rat(ipow(10, exp10));
  else if (exp10 < 0)
    q /= Rat(ipow(10, -exp10));
  q.canonicalize();
  return neg ? Rat(-q) : q;
}

Int ipow(const Int& base, const Int& exp) {
  if (exp < 0) throw BadNumber("negative integer exponent");
  if (!exp.fits_ulong_p()) throw BadNumber("exponent too large");
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp.get_ui());
  return r;
}

Rat qpow(const Rat& base, const Int& exp) {
  if (exp < 0) throw BadNumber("negative exponent");
  if (!exp.fits_ulong_p()) throw BadNumber("exponent too large");
  unsigned long e = exp.get_ui();
  Rat r;
  mpz_pow_ui(mpq_numref(r.get_mpq_t()), base.get_num().get_mpz_t(), e);
  mpz_pow_ui(mpq_denref(r.get_mpq_t()), base.get_den().get_mpz_t(), e);
  r.canonicalize();
  return r;
}

namespace {

// floor(log10(n/d)) for positive n/d.
long floor_log10(const Int& n, const Int& d) {
  long est = static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 10));
  // sizeinbase may overestimate by one; settle by comparison.
  auto le_pow10 = [&](long e) {
    // 10^e <= n/d ?
    if (e >= 0) return Int(ipow(10, e) * d) <= n;
    return d <= Int(n * ipow(10, -e));
  };
  long e = est + 1;
  while (!le_pow10(e)) --e;
  while (le_pow10(e + 1)) ++e;
  return e;
}

// round-half-up of n/d, n,d > 0
Int div_round(const Int& n, const Int& d) {
  Int r = (2 * n + d) / (2 * d);
  return r;
}

std::string render_digits(const std::string& digits, long e, bool neg) {
  std::string out = neg ? "-" : "";
  long k = static_cast<long>(digits.size());
  if (e >= -6 && e <= 14) {
    if (e >= k - 1) {
      out += digits;
      out.append(static_cast<size_t>(e - k + 1), '0');
    } else if (e >= 0) {
      out += digits.substr(0, e + 1) + "." + digits.substr(e + 1);
    } else {
      out += "0.";
      out.append(static_cast<size_t>(-e - 1), '0');
      out += digits;
    }
  } else {
    out += digits.substr(0, 1);
    if (k > 1) out += "." + digits.substr(1);
    out += "e" + std::to_string(e);
  }
  return out;
}

}  // namespace

std::string to_decimal_string(const Rat& q, int max_sig) {
  if (q == 0) return "0";
  Rat a(abs(q));
  a.canonicalize();
  const Int n = a.get_num(), d = a.get_den();
  const bool neg = q < 0;
  long e = floor_log10(n, d);

  for (int k = 1; k <= max_sig; ++k) {
    long scale = e - k + 1;  // value = m * 10^scale
    Int m = scale <= 0 ? div_round(n * ipow(10, -scale), d)
                       : div_round(n, d * ipow(10, scale));
    long eu = e;
    if (m == ipow(10, k)) {
      m /= 10;
      ++eu;
      scale += 1;
    }
    bool exact;
    if (scale <= 0)
      exact = Int(m * d) == Int(n * ipow(10, -scale));
    else
      exact = Int(m * ipow(10, scale) * d) == n;
    if (exact || k == max_sig)
      return render_digits(m.get_str(), eu, neg);
  }
  return "?";  // unreachable
}

std::string to_exact_string(const Rat& q) {
  Rat c(q);
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rat ln_upper(const Int& n) {
  if (n < 1) throw BadNumber("ln_upper needs n >= 1");
  mpfr_t x;
  mpfr_init2(x, 192);
  mpfr_set_z(x, n.get_mpz_t(), MPFR_RNDU);
  mpfr_log(x, x, MPFR_RNDU);
  mpf_class f(0, 256);
  mpfr_get_f(f.get_mpf_t(), x, MPFR_RNDU);
  mpfr_clear(x);
  Rat q;
  mpq_set_f(q.get_mpq_t(), f.get_mpf_t());
  return q;
}

Rat exp_rational(const std::string& log_weight, int digits) {
  Rat w = parse_rational(log_weight);
  mpfr_t x;
  mpfr_init2(x, 256);
  mpfr_set_q(x, w.get_mpq_t(), MPFR_RNDN);
  mpfr_exp(x, x, MPFR_RNDN);

  mpfr_exp_t dec_exp = 0;
  char* str = mpfr_get_str(nullptr, &dec_exp, 10, static_cast<size_t>(digits),
                           x, MPFR_RNDN);
  mpfr_clear(x);
  if (!str) throw BadNumber("exp conversion failed");
  std::string ds(str);
  mpfr_free_str(str);

  bool neg = !ds.empty() && ds[0] == '-';
  if (neg) ds = ds.substr(1);
  // value = 0.ds * 10^dec_exp
  Int m(ds);
  Rat q(m);
  long shift = static_cast<long>(dec_exp) - static_cast<long>(ds.size());
  if (shift > 0)
    q *= Rat(ipow(10, shift));
  else if (shift < 0)
    q /= Rat(ipow(10, -shift));
  q.canonicalize();
  return neg ? Rat(-q) : q;
}

}  // namespace wfomc
