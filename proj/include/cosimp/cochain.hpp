#pragma once

#include "cosimp/exact_linalg.hpp"
#include "cosimp/graded_algebra.hpp"
#include "cosimp/laurent.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cosimp {

//--- axiom sets -----------------------------------------------------------

enum class Axiom { KG, TG, SHUFFLE, POLE, COMPOSE };

using AxiomSet = std::set<Axiom>;

// {KG, SHUFFLE, POLE, COMPOSE}; TG stays a reported diagnostic.
AxiomSet default_axioms();
std::string axioms_str(const AxiomSet& ax);
AxiomSet parse_axioms(const std::string& s);  // comma separated names, "" = empty set

//--- cochains -------------------------------------------------------------

// Argument tuple: basis indices of the inserted monomials, length l.
using Tuple = std::vector<int>;

std::string var_name(int slot);                 // slot 0 -> "z1"
std::vector<std::string> slot_vars(int l);
int tuple_weight(const Model& A, const Tuple& t);
std::string tuple_name(const Model& A, const Tuple& t);

// Multilinear l-cochain in table form: per argument tuple, a value in
// A tensor the restricted function ring, stored as out-index -> function of
// z1..zl. k tracks the composability margin through the pipeline.
struct Cochain {
  int l = 0;
  int k = 0;
  std::map<Tuple, std::map<int, LaurentElem>> table;

  bool is_zero() const { return table.empty(); }
  std::size_t support_size() const { return table.size(); }

  // Accumulates, dropping values that cancel to zero.
  void add_term(const Tuple& t, int out, const LaurentElem& v);
  const LaurentElem* value(const Tuple& t, int out) const;  // null when absent

  Cochain& operator+=(const Cochain& o);
  Cochain& operator-=(const Cochain& o);
  friend Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
  friend Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
  Cochain scaled(const Rat& c) const;
  bool operator==(const Cochain& o) const;

  std::string str(const Model& A) const;
};

// Joint permutation action: (tau F)(g_1..g_l; z_1..z_l) =
// F(g_{tau(1)}..g_{tau(l)}; z_{tau(1)}..z_{tau(l)}), tau zero-based.
Cochain permute_args(const Cochain& F, const std::vector<int>& tau);

// Inverses of the (p, l-p) riffle shuffles with their signs, zero-based.
std::vector<std::pair<std::vector<int>, int>> inverse_riffles(int l, int p);

//--- axiom predicates -------------------------------------------------------

struct CheckReport {
  bool ok = true;
  std::string detail;
};

// Per-pair pole-order bound.
int beta_bound(const Model& A, int wi, int wj);

// Homogeneity constant shared by every monomial of every entry:
// (term degree) + wt(out) - sum wt(args). nullopt when mixed; 0 for the
// empty table by convention.
std::optional<Rat> kg_constant(const Model& A, const Cochain& F);
CheckReport check_KG(const Model& A, const Cochain& F);

// sum_i d/dz_i F(g; z) == sum_i F(.., T_G g_i, ..; z) exactly.
CheckReport check_TG(const Model& A, const Cochain& F);

// Signed sum over inverse (p, l-p) riffles vanishes.
CheckReport check_shuffle(const Model& A, const Cochain& F, int p);
CheckReport check_shuffle_all(const Model& A, const Cochain& F);

// Pole order of every entry at every pair stays within beta.
CheckReport check_pole(const Model& A, const Cochain& F);

// Margin rule: order at (i,j) <= max(0, beta_ij - k).
CheckReport check_compose(const Model& A, const Cochain& F, int k);

//--- configuration cells ----------------------------------------------------

// Frame coordinate: numerator monomial z^e over the common denominator
// prod_{i<j} (z_i - z_j)^{cap_ij} with the out monomial attached.
struct FrameCoord {
  Tuple t;
  int out = 0;
  std::vector<int> e;
};

// Denominator caps for the frame, pair (i,j) i<j in lex order.
std::vector<int> frame_caps(const Model& A, const AxiomSet& ax, const Tuple& t);
int cap_at(const std::vector<int>& caps, int l, int i, int j);

// Frame coordinates of one (argument multiset, out) block, in the order the
// full frame enumeration would visit them. sorted_t must be nondecreasing.
std::vector<FrameCoord> block_coords(const Model& A, int l, int k, const AxiomSet& ax,
                                     const Tuple& sorted_t, int out);

// Constraint rows of a block, columns indexed by position in coords. All
// coords must share one (multiset, out) block of the same cell.
SparseMat block_rows(const Model& A, int l, int k, const AxiomSet& ax,
                     const std::vector<FrameCoord>& coords);

using SparseVec = std::map<std::size_t, Rat>;

class ComplexCell {
 public:
  int l = 0;
  int k = 0;
  AxiomSet axioms;

  const std::vector<FrameCoord>& frame() const { return frame_; }
  std::size_t frame_size() const { return frame_.size(); }
  const std::vector<SparseVec>& basis() const { return basis_; }
  std::size_t dim() const { return basis_.size(); }
  int basis_chi(std::size_t i) const { return chi_.at(i); }

  // The basis is reduced echelon: vector i carries the only nonzero entry of
  // the basis at frame coordinate pivots()[i], so coordinates of a member
  // vector are plain lookups. Cleared by set_basis.
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  // -1 when the coordinate is not part of the frame.
  long coord_index(const Tuple& t, int out, const std::vector<int>& e) const;
  bool has_tuple(const Tuple& t) const { return tuples_.count(t) != 0; }

  Cochain to_cochain(const Model& A, const SparseVec& v) const;
  Cochain basis_cochain(const Model& A, std::size_t i) const;

  // Frame coordinates of a table; nullopt when any entry leaves the frame
  // (pole order above cap, exponent outside the window, unknown tuple).
  std::optional<SparseVec> to_coords(const Model& A, const Cochain& F) const;

  // Replaces the basis (stable-subcomplex refinement).
  void set_basis(std::vector<SparseVec> b, std::vector<int> chi);

  friend ComplexCell build_cell_basis(const Model& A, int l, int k, const AxiomSet& ax);

 private:
  std::vector<FrameCoord> frame_;
  std::vector<SparseVec> basis_;
  std::vector<int> chi_;  // sum wt(args) - wt(out) per basis vector
  std::vector<std::size_t> pivots_;
  std::map<Tuple, std::map<std::pair<int, std::vector<int>>, std::size_t>> tuples_;
};

// Deterministic reduced-echelon basis of the axiom-constrained frame span.
// l = 0 is the algebra itself. Throws when the frame would exceed the
// enumeration guard (no KG filter and a wide window at l >= 3).
ComplexCell build_cell_basis(const Model& A, int l, int k, const AxiomSet& ax);

// Membership in the cell span, checked through the table itself.
bool cell_contains(const Model& A, const ComplexCell& cell, const Cochain& F,
                   std::string* why = nullptr);

// Deterministic pseudo-random rational combination of basis cochains
// (at most 24 of them, coefficients with small numerators/denominators).
// Throws std::domain_error when the cell is zero-dimensional.
Cochain random_cochain(const Model& A, const ComplexCell& cell, std::uint64_t seed);

}  // namespace cosimp
