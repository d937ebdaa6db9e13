#pragma once

#include "cosimp/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace cosimp {

// Sparse row-major matrix over Q. Zero entries are never stored.
class SparseMat {
 public:
  SparseMat() : rows_(0), cols_(0) {}
  SparseMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_(rows) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void set(std::size_t i, std::size_t j, const Rat& v);
  void add(std::size_t i, std::size_t j, const Rat& v);
  Rat get(std::size_t i, std::size_t j) const;
  const std::map<std::size_t, Rat>& row(std::size_t i) const { return row_[i]; }

  std::size_t nnz() const;
  void append_row(const std::map<std::size_t, Rat>& r);

 private:
  std::size_t rows_, cols_;
  std::vector<std::map<std::size_t, Rat>> row_;
};

struct RankReport {
  std::size_t exact = 0;
  std::size_t modular = 0;
  std::uint64_t prime = 0;
  bool agreed = false;
};

// Fraction-free elimination (Bareiss) on the integerized matrix, sparse
// pivoting by Markowitz count with deterministic tie-breaks.
std::size_t rank_ff(const SparseMat& a);

// Plain dense rational Gaussian elimination. Independent of rank_ff; kept
// simple on purpose so the two paths share no code.
std::size_t rank_dense_oracle(const SparseMat& a);

// Elimination over GF(p).
std::size_t rank_mod(const SparseMat& a, std::uint64_t p);

// Runs the modular fast path and the exact path on every call and compares.
// A modular deficit triggers a retry with the next prime; persistent
// disagreement (modular > exact, or deficit across all primes) throws.
RankReport rank_checked(const SparseMat& a);

// Deterministic reduced echelon basis of the right nullspace, ordered by
// free-column index. Each vector is sparse, normalized to leading entry 1.
// When free_cols is given it receives, per basis vector, the free column
// that carries its defining 1; extracting a member vector's coefficient in
// this basis is then a plain lookup at that column.
std::vector<std::map<std::size_t, Rat>> nullspace(const SparseMat& a);
std::vector<std::map<std::size_t, Rat>> nullspace(const SparseMat& a,
                                                  std::vector<std::size_t>* free_cols);

// Reduced row echelon form of the row space: nonzero rows only, pivots
// normalized to 1, ordered by pivot column.
std::vector<std::map<std::size_t, Rat>> rref_rows(const SparseMat& a);

// Particular solution of A x = b with free variables pinned to zero;
// std::nullopt when inconsistent.
std::optional<std::vector<Rat>> solve(const SparseMat& a, const std::vector<Rat>& b);

}  // namespace cosimp
