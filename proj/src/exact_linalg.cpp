#include "cosimp/exact_linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace cosimp {

void SparseMat::set(std::size_t i, std::size_t j, const Rat& v) {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("SparseMat::set");
  if (v == 0)
    row_[i].erase(j);
  else
    row_[i][j] = v;
}

void SparseMat::add(std::size_t i, std::size_t j, const Rat& v) {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("SparseMat::add");
  auto it = row_[i].find(j);
  if (it == row_[i].end()) {
    if (v != 0) row_[i].emplace(j, v);
    return;
  }
  it->second += v;
  if (it->second == 0) row_[i].erase(it);
}

Rat SparseMat::get(std::size_t i, std::size_t j) const {
  auto it = row_[i].find(j);
  return it == row_[i].end() ? Rat(0) : it->second;
}

std::size_t SparseMat::nnz() const {
  std::size_t n = 0;
  for (auto& r : row_) n += r.size();
  return n;
}

void SparseMat::append_row(const std::map<std::size_t, Rat>& r) {
  for (auto& [j, v] : r)
    if (j >= cols_) throw std::out_of_range("SparseMat::append_row");
  row_.push_back(r);
  ++rows_;
}

//--------------------------------------------------------------------------
// fraction-free rank

namespace {

using IRow = std::map<std::size_t, Int>;

// Clears denominators row by row; row scaling does not change the rank.
std::vector<IRow> integerize(const SparseMat& a) {
  std::vector<IRow> rows;
  rows.reserve(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Int lcm = 1;
    for (auto& [j, v] : a.row(i)) {
      Int d = v.get_den();
      Int g;
      mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), d.get_mpz_t());
      lcm = lcm / g * d;
    }
    IRow r;
    for (auto& [j, v] : a.row(i)) {
      Int scaled = v.get_num() * (lcm / v.get_den());
      if (scaled != 0) r.emplace(j, scaled);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

std::size_t rank_ff(const SparseMat& a) {
  std::vector<IRow> rows = integerize(a);
  std::vector<bool> row_done(rows.size(), false);
  std::vector<std::size_t> col_count(a.cols(), 0);
  for (auto& r : rows)
    for (auto& [j, v] : r) ++col_count[j];

  Int prev_pivot = 1;
  std::size_t rank = 0;

  for (;;) {
    // Markowitz pivot: minimize (nnz(row)-1)*(nnz(col)-1), deterministic ties.
    std::size_t best_i = rows.size(), best_j = 0;
    unsigned long long best_score = ~0ULL;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (row_done[i] || rows[i].empty()) continue;
      unsigned long long rw = rows[i].size() - 1;
      for (auto& [j, v] : rows[i]) {
        unsigned long long score = rw * (unsigned long long)(col_count[j] - 1);
        if (score < best_score ||
            (score == best_score && (i < best_i || (i == best_i && j < best_j)))) {
          best_score = score;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i == rows.size()) break;

    const std::size_t pi = best_i, pj = best_j;
    const Int pivot = rows[pi][pj];
    row_done[pi] = true;
    ++rank;
    for (auto& [j, v] : rows[pi]) --col_count[j];

    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (row_done[i] || rows[i].empty()) continue;
      auto it = rows[i].find(pj);
      if (it == rows[i].end()) {
        // Fraction-free discipline updates every active row each step; the
        // scale-only case keeps the support, so column counts stay valid.
        for (auto& [j, v] : rows[i]) {
          v *= pivot;
          mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev_pivot.get_mpz_t());
        }
        continue;
      }
      Int factor = it->second;
      for (auto& [j, v] : rows[i]) --col_count[j];
      IRow next;
      auto ia = rows[i].begin(), ib = rows[pi].begin();
      while (ia != rows[i].end() || ib != rows[pi].end()) {
        if (ib == rows[pi].end() || (ia != rows[i].end() && ia->first < ib->first)) {
          Int val = pivot * ia->second;
          mpz_divexact(val.get_mpz_t(), val.get_mpz_t(), prev_pivot.get_mpz_t());
          if (val != 0) next.emplace_hint(next.end(), ia->first, std::move(val));
          ++ia;
        } else if (ia == rows[i].end() || ib->first < ia->first) {
          Int val = -factor * ib->second;
          mpz_divexact(val.get_mpz_t(), val.get_mpz_t(), prev_pivot.get_mpz_t());
          if (val != 0) next.emplace_hint(next.end(), ib->first, std::move(val));
          ++ib;
        } else {
          Int val = pivot * ia->second - factor * ib->second;
          mpz_divexact(val.get_mpz_t(), val.get_mpz_t(), prev_pivot.get_mpz_t());
          if (val != 0) next.emplace_hint(next.end(), ia->first, std::move(val));
          ++ia;
          ++ib;
        }
      }
      next.erase(pj);
      rows[i] = std::move(next);
      for (auto& [j, v] : rows[i]) ++col_count[j];
    }
    prev_pivot = pivot;
  }
  return rank;
}

//--------------------------------------------------------------------------
// dense oracle

std::size_t rank_dense_oracle(const SparseMat& a) {
  std::vector<std::vector<Rat>> m(a.rows(), std::vector<Rat>(a.cols(), Rat(0)));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (auto& [j, v] : a.row(i)) m[i][j] = v;

  std::size_t rank = 0;
  for (std::size_t col = 0; col < a.cols() && rank < a.rows(); ++col) {
    std::size_t piv = rank;
    while (piv < a.rows() && m[piv][col] == 0) ++piv;
    if (piv == a.rows()) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t i = rank + 1; i < a.rows(); ++i) {
      if (m[i][col] == 0) continue;
      Rat f = m[i][col] / m[rank][col];
      for (std::size_t j = col; j < a.cols(); ++j) m[i][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

//--------------------------------------------------------------------------
// modular rank

std::size_t rank_mod(const SparseMat& a, std::uint64_t p) {
  using MRow = std::map<std::size_t, std::uint64_t>;
  std::vector<MRow> rows;
  rows.reserve(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    MRow r;
    for (auto& [j, v] : a.row(i)) {
      std::uint64_t m = rat_mod(v, p);
      if (m) r.emplace_hint(r.end(), j, m);
    }
    rows.push_back(std::move(r));
  }

  std::size_t rank = 0;
  std::vector<bool> done(rows.size(), false);
  for (std::size_t col = 0;; ++col) {
    std::size_t piv = rows.size();
    std::size_t min_col = SIZE_MAX;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (!done[i] && !rows[i].empty()) min_col = std::min(min_col, rows[i].begin()->first);
    if (min_col == SIZE_MAX) break;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (!done[i] && !rows[i].empty() && rows[i].begin()->first == min_col) {
        piv = i;
        break;
      }
    MRow& pr = rows[piv];
    done[piv] = true;
    ++rank;
    std::uint64_t inv = mod_inv(pr.begin()->second, p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (done[i] || rows[i].empty()) continue;
      auto it = rows[i].find(min_col);
      if (it == rows[i].end()) continue;
      unsigned __int128 f = (unsigned __int128)it->second * inv % p;
      MRow next;
      auto ia = rows[i].begin(), ib = pr.begin();
      while (ia != rows[i].end() || ib != pr.end()) {
        if (ib == pr.end() || (ia != rows[i].end() && ia->first < ib->first)) {
          next.emplace_hint(next.end(), *ia);
          ++ia;
        } else if (ia == rows[i].end() || ib->first < ia->first) {
          std::uint64_t val = (std::uint64_t)(p - f * ib->second % p) % p;
          if (val) next.emplace_hint(next.end(), ib->first, val);
          ++ib;
        } else {
          std::uint64_t sub = (std::uint64_t)(f * ib->second % p);
          std::uint64_t val = ia->second >= sub ? ia->second - sub : ia->second + p - sub;
          if (val) next.emplace_hint(next.end(), ia->first, val);
          ++ia;
          ++ib;
        }
      }
      rows[i] = std::move(next);
    }
  }
  return rank;
}

RankReport rank_checked(const SparseMat& a) {
  static const std::uint64_t primes[] = {2305843009213693951ULL, 18446744073709551557ULL,
                                         2147483647ULL, 1000000007ULL};
  std::size_t exact = rank_ff(a);
  RankReport rep;
  rep.exact = exact;
  for (std::uint64_t p : primes) {
    std::size_t m;
    try {
      m = rank_mod(a, p);
    } catch (const std::domain_error&) {
      continue;  // denominator hit the modulus, try the next prime
    }
    rep.modular = m;
    rep.prime = p;
    if (m == exact) {
      rep.agreed = true;
      return rep;
    }
    if (m > exact)
      throw std::logic_error("rank cross-check failed: modular rank exceeds exact rank");
  }
  throw std::logic_error("rank cross-check failed: modular deficit persists across primes");
}

//--------------------------------------------------------------------------
// reduced echelon, nullspace, solve

namespace {

struct Rref {
  std::vector<std::map<std::size_t, Rat>> rows;  // reduced rows, pivots normalized to 1
  std::vector<std::size_t> pivot_col;            // per reduced row
};

Rref rref(const SparseMat& a) {
  std::vector<std::map<std::size_t, Rat>> rows;
  rows.reserve(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (!a.row(i).empty()) rows.push_back(a.row(i));

  Rref out;
  for (std::size_t step = 0;; ++step) {
    std::size_t piv = rows.size(), pcol = SIZE_MAX;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (!rows[i].empty() && rows[i].begin()->first < pcol) {
        pcol = rows[i].begin()->first;
        piv = i;
      }
    if (piv == rows.size()) break;

    std::map<std::size_t, Rat> prow = std::move(rows[piv]);
    rows.erase(rows.begin() + (std::ptrdiff_t)piv);
    Rat lead = prow.begin()->second;
    for (auto& [j, v] : prow) v /= lead;

    auto eliminate = [&](std::map<std::size_t, Rat>& r) {
      auto it = r.find(pcol);
      if (it == r.end()) return;
      Rat f = it->second;
      for (auto& [j, v] : prow) {
        auto jt = r.find(j);
        if (jt == r.end()) {
          Rat nv = -f * v;
          if (nv != 0) r.emplace(j, nv);
        } else {
          jt->second -= f * v;
          if (jt->second == 0) r.erase(jt);
        }
      }
    };
    for (auto& r : rows) eliminate(r);
    for (auto& r : out.rows) eliminate(r);

    out.rows.push_back(std::move(prow));
    out.pivot_col.push_back(pcol);
  }
  return out;
}

}  // namespace

std::vector<std::map<std::size_t, Rat>> nullspace(const SparseMat& a) {
  return nullspace(a, nullptr);
}

std::vector<std::map<std::size_t, Rat>> rref_rows(const SparseMat& a) {
  return rref(a).rows;
}

std::vector<std::map<std::size_t, Rat>> nullspace(const SparseMat& a,
                                                  std::vector<std::size_t>* free_cols) {
  Rref r = rref(a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t c : r.pivot_col) is_pivot[c] = true;

  if (free_cols) free_cols->clear();
  std::vector<std::map<std::size_t, Rat>> basis;
  for (std::size_t f = 0; f < a.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::map<std::size_t, Rat> v;
    v[f] = 1;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      auto it = r.rows[i].find(f);
      if (it != r.rows[i].end()) v[r.pivot_col[i]] = -it->second;
    }
    basis.push_back(std::move(v));
    if (free_cols) free_cols->push_back(f);
  }
  return basis;
}

std::optional<std::vector<Rat>> solve(const SparseMat& a, const std::vector<Rat>& b) {
  if (b.size() != a.rows()) throw std::invalid_argument("solve: size mismatch");
  SparseMat aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (auto& [j, v] : a.row(i)) aug.set(i, j, v);
    if (b[i] != 0) aug.set(i, a.cols(), b[i]);
  }
  Rref r = rref(aug);
  std::vector<Rat> x(a.cols(), Rat(0));
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (r.pivot_col[i] == a.cols()) return std::nullopt;
    auto it = r.rows[i].find(a.cols());
    if (it != r.rows[i].end()) x[r.pivot_col[i]] = it->second;
  }
  return x;
}

}  // namespace cosimp
