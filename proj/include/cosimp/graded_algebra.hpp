#pragma once

#include <map>
#include <string>
#include <vector>

#include "cosimp/rational.hpp"

namespace cosimp {

//--- model parameters ---------------------------------------------------

struct ModelParams {
  int gen_max = 3;     // highest generator index N
  int weight_cap = 6;  // weight truncation M
  int pole_shift = 2;  // additive constant B0 in the pole-order bound
  int len_max = 3;     // word length cap
  int window = 6;      // exponent window E for configuration frames

  void validate() const;
  bool operator==(const ModelParams&) const = default;
};

// Words are nondecreasing generator index sequences; the empty word is the unit.
using Word = std::vector<int>;

int word_weight(const Word& w);
std::string word_name(const Word& w);

// Sparse element in basis coordinates: basis index -> coefficient.
using AlgElem = std::map<int, Rat>;

//--- truncated graded algebra -------------------------------------------

// Enveloping algebra of the generator slice, normal ordered with
// [L_i, L_j] = (j - i) L_{i+j}, truncated by weight_cap and len_max.
// The weight truncation quotients by a two-sided ideal, so the product
// is exactly associative; all caches are filled eagerly and the object
// is immutable afterwards, safe to share across threads.
class Model {
 public:
  explicit Model(const ModelParams& p);
  // Fault-injection variant for self tests: adds delta * L_target to the
  // bracket [L_i, L_j] as used during normal ordering (i > j), which breaks
  // associativity when the target fails the rewriting diamond.
  Model(const ModelParams& p, int tweak_i, int tweak_j, const Rat& tweak_delta, int tweak_target);

  const ModelParams& params() const { return params_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<Word>& basis() const { return basis_; }
  const Word& word(int idx) const { return basis_.at(static_cast<size_t>(idx)); }
  int weight_of(int idx) const { return weights_.at(static_cast<size_t>(idx)); }
  int index_of(const Word& w) const;  // -1 when absent
  std::string name_of(int idx) const { return word_name(word(idx)); }

  AlgElem unit() const;
  AlgElem gen(int i) const;  // L_i
  AlgElem from_word(const Word& w) const;

  AlgElem multiply(const AlgElem& a, const AlgElem& b) const;
  AlgElem project(const AlgElem& a, int m) const;
  std::map<int, AlgElem> graded_parts(const AlgElem& a) const;
  AlgElem commutator(const AlgElem& a, const AlgElem& b) const;

  // Weight-raising derivation T^(k): L_i -> (i - k) L_{i+k}; k = 1 is the
  // translation operator, k = 0 multiplies each graded part by its weight.
  AlgElem raise(const AlgElem& a, int k) const;
  AlgElem apply_tg(const AlgElem& a) const { return raise(a, 1); }

  Rat pairing(const AlgElem& a, const AlgElem& b) const;
  static bool is_zero(const AlgElem& a);
  static AlgElem add(const AlgElem& a, const AlgElem& b);
  static AlgElem scale(const AlgElem& a, const Rat& c);

  // Basis of {a : ab = ba for all b}, graded slice by weight; slices are
  // deterministic reduced-echelon bases from the commutator nullspace.
  const std::vector<AlgElem>& center_slice(int m) const;
  std::vector<AlgElem> center() const;
  int max_weight() const { return params_.weight_cap; }

  std::string str(const AlgElem& a) const;

 private:
  void build();
  AlgElem normal_order(const Word& w, std::map<Word, AlgElem>& memo) const;

  ModelParams params_;
  bool tweaked_ = false;
  int tweak_i_ = 0, tweak_j_ = 0, tweak_target_ = 0;
  Rat tweak_delta_;

  std::vector<Word> basis_;
  std::vector<int> weights_;
  std::map<Word, int> index_;
  std::vector<std::vector<AlgElem>> products_;  // basis pair products
  std::vector<std::vector<AlgElem>> raised_;    // raised_[k][idx], k <= weight_cap
  std::vector<std::vector<AlgElem>> center_slices_;
};

}  // namespace cosimp
