#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cosimp {

// Exact rational scalar. All arithmetic in the engine goes through this type;
// nothing is ever rounded.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Accepts "p", "-p", "p/q".
inline Rat rat_parse(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  r.canonicalize();
  return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

// Falling factorial binomial, valid for negative upper index:
//   binom(a, t) = a (a-1) ... (a-t+1) / t!
inline Rat rat_binom(long a, unsigned long t) {
  Rat num = 1;
  for (unsigned long s = 0; s < t; ++s) num *= Rat(a - (long)s);
  Rat den = 1;
  for (unsigned long s = 2; s <= t; ++s) den *= Rat((long)s);
  return Rat(num / den);
}

inline Int rat_num(const Rat& r) { return r.get_num(); }
inline Int rat_den(const Rat& r) { return r.get_den(); }

// Residue of r modulo a word-sized prime; denominator must be invertible.
inline std::uint64_t rat_mod(const Rat& r, std::uint64_t p);

inline std::uint64_t mod_pow(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  unsigned __int128 acc = 1, base = b % p;
  while (e) {
    if (e & 1) acc = acc * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return (std::uint64_t)acc;
}

inline std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p) {
  return mod_pow(a % p, p - 2, p);
}

inline std::uint64_t rat_mod(const Rat& r, std::uint64_t p) {
  Int n = r.get_num(), d = r.get_den();
  Int pn(mpz_class((unsigned long)p));
  Int nm = n % pn;
  if (nm < 0) nm += pn;
  Int dm = d % pn;
  if (dm == 0) throw std::domain_error("denominator divisible by modulus");
  std::uint64_t nu = nm.get_ui();
  std::uint64_t du = dm.get_ui();
  return (std::uint64_t)((unsigned __int128)nu * mod_inv(du, p) % p);
}

}  // namespace cosimp
