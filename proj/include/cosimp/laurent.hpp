#pragma once

#include "cosimp/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cosimp {

// Variable-name ordering: alphabetic stem, then numeric suffix compared as a
// number, so z2 < z10.
bool var_less(const std::string& a, const std::string& b);

// Element of the restricted function ring: an exact Laurent polynomial in
// named variables divided by a product of difference factors (z_i - z_j)^ord.
// Always kept canonical: no zero terms, pole orders fully reduced against the
// numerator, pole pairs stored with the smaller variable first, variable list
// pruned to the support.
class LaurentElem {
 public:
  using Exp = std::vector<int>;
  using PoleKey = std::pair<int, int>;  // indices into vars(), first < second

  LaurentElem() = default;
  explicit LaurentElem(const Rat& c);
  explicit LaurentElem(long c);

  static LaurentElem monomial(const std::vector<std::string>& vars, const Exp& exps,
                              const Rat& coeff);
  static LaurentElem variable(const std::string& name, int power = 1);

  const std::vector<std::string>& vars() const { return vars_; }
  const std::map<Exp, Rat>& terms() const { return terms_; }
  const std::map<PoleKey, int>& poles() const { return poles_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rat constant_value() const;

  LaurentElem operator-() const;
  LaurentElem& operator+=(const LaurentElem& o);
  LaurentElem& operator-=(const LaurentElem& o);
  LaurentElem& operator*=(const LaurentElem& o);
  friend LaurentElem operator+(LaurentElem a, const LaurentElem& b) { return a += b; }
  friend LaurentElem operator-(LaurentElem a, const LaurentElem& b) { return a -= b; }
  friend LaurentElem operator*(LaurentElem a, const LaurentElem& b) { return a *= b; }
  bool operator==(const LaurentElem& o) const;
  bool operator!=(const LaurentElem& o) const { return !(*this == o); }

  LaurentElem scaled(const Rat& c) const;

  // Multiplies by (a - b)^{-ord}; negative ord multiplies by the polynomial
  // power instead. Missing variables are added to the support.
  LaurentElem with_pole(const std::string& a, const std::string& b, int ord) const;

  // Reduced order of the (a - b) pole, 0 when absent.
  int pole_order(const std::string& a, const std::string& b) const;

  LaurentElem derivative(const std::string& var) const;

  // Substitutes var -> var + w for a fresh variable w, expanded as a
  // truncated series in w up to and including w^order. Expansions that would
  // be infinite (negative exponents on var, or var inside a pole factor)
  // require allow_pole_region = true.
  LaurentElem shift_expand(const std::string& var, const std::string& w, int order,
                           bool allow_pole_region) const;

  // Renames variables; names not in the map stay. Result names must be
  // pairwise distinct.
  LaurentElem renamed(const std::map<std::string, std::string>& m) const;

  // Full rational evaluation; every variable must be assigned, difference
  // factors must be nonzero at the point.
  Rat evaluate(const std::map<std::string, Rat>& point) const;

  // Total degree of a term: exponent sum minus total pole order.
  std::set<int> term_degrees() const;
  int total_pole_order() const;

  // Drops terms of total degree above cap.
  LaurentElem truncated_above(int cap) const;

  // Largest |exponent| over all terms and variables.
  int exponent_radius() const;

  // l1 norm of the coefficient list.
  Rat coeff_norm() const;

  // Max |coefficient| over the terms.
  Rat coeff_max() const;

  std::string str() const;

 private:
  std::vector<std::string> vars_;
  std::map<Exp, Rat> terms_;
  std::map<PoleKey, int> poles_;

  void canonicalize();
  void prune_vars();
  std::optional<std::map<Exp, Rat>> try_divide_diff(int i, int j) const;
  static void align(LaurentElem& a, LaurentElem& b);
  int var_index(const std::string& name) const;
};

}  // namespace cosimp
