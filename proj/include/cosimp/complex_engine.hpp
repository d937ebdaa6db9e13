#pragma once

#include "cosimp/cochain.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cosimp {

//--- coboundary on tables -----------------------------------------------------

// Three-term coboundary: the weight current nu(g, z) = g z^{-wt g} multiplies
// from the left and right, adjacent arguments fuse through the product with
// alternating signs. Slots grow by one, the margin drops by one; a spent
// margin (k = 0) throws std::domain_error.
Cochain coboundary(const Model& A, const Cochain& F);

struct DDWitness {
  int l = 0;
  int k = 0;
  bool applicable = false;  // margin lets the coboundary act twice
  bool ok = true;
  std::string detail;       // first nonzero entry of a failing square
};

// Squared coboundary over an explicit family of tables sharing one bigrade.
// Tables with margin below two terminate the diagonal: not applicable, ok.
DDWitness dd_zero_check_tables(const Model& A, const std::vector<Cochain>& tables);

//--- engine -------------------------------------------------------------------

struct CoboundaryMatrix {
  int l = 0;  // source bigrade
  int k = 0;
  std::size_t src_dim = 0;
  std::size_t dst_dim = 0;
  SparseMat mat;  // dst_dim rows, src_dim columns, over the stable bases
};

struct CohomologyEntry {
  int l = 0;
  int k = 0;
  std::size_t dim = 0;     // stable cell dimension
  std::size_t kernel = 0;  // cocycles; everything when the margin is spent
  std::size_t image = 0;   // boundaries arriving from (l-1, k+1)
  std::size_t betti = 0;   // kernel - image
  std::uint64_t prime = 0; // modular witness of the outgoing rank, 0 when none
};

struct CohomologyReport {
  int l_max = 0;
  int k_max = 0;
  std::string axioms;
  std::vector<CohomologyEntry> entries;
  std::string csv() const;  // header l,k,dim,kernel,image,betti,prime
};

// Grid of stabilized cells over one axiom set. Stabilization refines each
// cell with an outgoing coboundary (k >= 1) to the largest subspace whose
// image lies in the span of the refined target cell; targets past l_max use
// the unrefined frame-and-predicate span. One backward sweep over l is the
// exact fixpoint because each cell depends on (l+1, k-1) alone.
class ComplexEngine {
 public:
  ComplexEngine(const Model& A, int l_max, int k_max, const AxiomSet& ax);

  const Model& model() const { return A_; }
  int l_max() const { return l_max_; }
  int k_max() const { return k_max_; }
  const AxiomSet& axioms() const { return ax_; }

  std::size_t raw_dim(int l, int k) const;
  const ComplexCell& cell(int l, int k) const;  // stabilized

  // Membership in the stable span of the cell at (F.l, F.k).
  bool stable_contains(const Cochain& F, std::string* why = nullptr) const;

  // Coboundary in stable coordinates; needs k >= 1 and l + 1 <= l_max.
  CoboundaryMatrix matrix(int l, int k) const;

  // Coboundary of the stable basis matricized over lifted monomial keys;
  // its rank is the boundary image, its nullity the cocycle count. k >= 1.
  SparseMat key_matrix(int l, int k) const;

  // Squared coboundary of every stable basis cochain, on tables.
  DDWitness dd_zero_check(int l, int k) const;

  // Valid at l = 0 for any k, and at l >= 1 for k < k_max (the incoming
  // cell must sit inside the grid); otherwise throws std::invalid_argument.
  CohomologyEntry cohomology_rank(int l, int k) const;

  CohomologyReport cohomology() const;

 private:
  struct Slot {
    ComplexCell cell;                    // frame shared, basis refined in place
    std::vector<SparseVec> orig_basis;   // pre-refinement reduced echelon
    std::vector<std::size_t> orig_piv;
    std::vector<int> orig_chi;
    std::vector<std::size_t> stable_piv;
    // Rows over the original frame coordinates that cut the stable span out
    // of the raw cell, grouped by weight sector.
    std::map<int, std::vector<SparseVec>> stab_rows;
    std::size_t raw = 0;
  };

  const Slot& slot(int l, int k) const;
  void check_grid(int l, int k) const;
  void stabilize(int l, int k);
  std::vector<Cochain> stable_tables(int l, int k) const;

  const Model& A_;
  int l_max_ = 0;
  int k_max_ = 0;
  AxiomSet ax_;
  std::vector<std::vector<Slot>> slots_;                 // [l][k]
  std::vector<std::vector<std::pair<std::pair<int, int>, Rat>>> fuse_pre_;  // c -> (a, b, coef)
};

}  // namespace cosimp
