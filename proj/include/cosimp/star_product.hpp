#pragma once

#include "cosimp/cochain.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cosimp {

//--- insertion basis -------------------------------------------------------

// One insertion element together with its dual under the monomial pairing.
struct DualPair {
  AlgElem g;
  AlgElem gbar;
};

// Weight slice -> dual pairs spanning the centralizer slice of that weight.
using DualBasis = std::map<int, std::vector<DualPair>>;

// Dual basis of the centralizer, sliced by weight. Empty slices are omitted.
DualBasis center_dual_basis(const Model& A);

// Re-mixes each slice by a seeded invertible rational matrix, with the dual
// side transformed contragrediently so the pairing stays the identity.
DualBasis remix_dual_basis(const Model& A, const DualBasis& base, std::uint64_t seed);

//--- deformed multiplication -------------------------------------------------

// Declared variable identifications between adjacent factors. Only seam
// slots may be joined: the last slot of one factor with the first slot of
// the next. r is merges.size(); t counts separately declared parameter
// identifications and only shifts the target bidegree.
struct Identifications {
  struct Merge {
    int factor_a = 0;
    int slot_a = 0;
    int factor_b = 0;
    int slot_b = 0;
  };
  std::vector<Merge> merges;
  int t = 0;
};

// Coefficients of the deformation parameter, order by order up to the
// truncation. Every order from 0 to lambda_max is present, zeros included.
struct StarResult {
  int target_l = 0;
  int target_k = 0;
  int lambda_max = 0;
  Identifications ids;
  std::vector<Rat> radii;
  std::map<int, Cochain> coefficients;

  const Cochain& at(int m) const;
};

// Multiplies the factors with central insertions between them. Insertions
// are drawn from the weight slices of `basis` (the centralizer dual basis
// when null); an order-m coefficient collects every way to spend total
// weight m across the seats. Radii default to 2 per factor and are carried
// on the result for the bound check. lambda_max < 0 means the weight cap.
StarResult star(const Model& A, const std::vector<Cochain>& factors,
                const Identifications& ids = {}, int lambda_max = -1,
                const DualBasis* basis = nullptr, std::vector<Rat> radii = {});

// min(Mi) * max(Ri)^(n + 1 - m), the declared growth line for the order-m
// coefficient of a term with canonical pole index n.
Rat cauchy_bound(const std::vector<Rat>& Mi, const std::vector<Rat>& Ri, int m, int n);

struct BoundReport {
  bool ok = true;
  Rat min_m;
  Rat max_r;
  std::vector<Rat> factor_norms;
  std::size_t rows = 0;
  std::string detail;
};

// Measures each factor's max norm on rational sample grids inside its
// declared radius, then checks every coefficient term against the line.
BoundReport bound_check(const Model& A, const StarResult& res,
                        const std::vector<Cochain>& factors);

//--- derived operations ------------------------------------------------------

// Joint reindexing of argument slots and their variables.
inline Cochain permute(const Cochain& F, const std::vector<int>& sigma) {
  return permute_args(F, sigma);
}

// star(F, G) - star(G, F), order by order.
StarResult commutator(const Model& A, const Cochain& F, const Cochain& G,
                      int lambda_max = -1);

struct LeibnizReport {
  bool ok = true;
  std::string detail;
  std::map<int, Cochain> residual;
};

// Checks D(F * G) = DF * G + (-1)^l F * DG order by order. Throws when a
// factor has no margin left; deepen the cell with stable_subcomplex first.
LeibnizReport leibniz_check(const Model& A, const Cochain& F, const Cochain& G,
                            int lambda_max = -1);

}  // namespace cosimp
