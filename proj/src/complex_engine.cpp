#include "cosimp/complex_engine.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace cosimp {

namespace {

using FusePre = std::vector<std::vector<std::pair<std::pair<int, int>, Rat>>>;

FusePre build_fuse_pre(const Model& A) {
  FusePre pre(static_cast<std::size_t>(A.dim()));
  for (int a = 0; a < A.dim(); ++a)
    for (int b = 0; b < A.dim(); ++b) {
      auto prod = A.multiply(AlgElem{{a, Rat(1)}}, AlgElem{{b, Rat(1)}});
      for (const auto& [c, coef] : prod)
        pre[static_cast<std::size_t>(c)].push_back({{a, b}, coef});
    }
  return pre;
}

LaurentElem zmono(int slot, int e) {
  if (e == 0) return LaurentElem(1);
  return LaurentElem::variable(var_name(slot), e);
}

Cochain coboundary_impl(const Model& A, const Cochain& F, const FusePre& pre) {
  if (F.k <= 0) throw std::domain_error("margin spent, no coboundary at k = 0");
  Cochain out;
  out.l = F.l + 1;
  out.k = F.k - 1;
  const int l = F.l;

  std::map<std::string, std::string> ren_left;
  for (int j = 0; j < l; ++j) ren_left[var_name(j)] = var_name(j + 1);

  for (const auto& [t, vals] : F.table) {
    if (static_cast<int>(t.size()) != l)
      throw std::invalid_argument("table tuple length differs from the slot count");
    for (const auto& [u, v] : vals) {
      // left current
      LaurentElem shifted = l == 0 ? v : v.renamed(ren_left);
      for (int g = 0; g < A.dim(); ++g) {
        auto prod = A.multiply(AlgElem{{g, Rat(1)}}, AlgElem{{u, Rat(1)}});
        if (prod.empty()) continue;
        Tuple tt;
        tt.reserve(t.size() + 1);
        tt.push_back(g);
        tt.insert(tt.end(), t.begin(), t.end());
        LaurentElem val = shifted * zmono(0, -A.weight_of(g));
        for (const auto& [c, coef] : prod) out.add_term(tt, c, val.scaled(coef));
      }
      // fusions: source slot p opens into the adjacent pair (p, p+1)
      for (int p = 0; p < l; ++p) {
        std::map<std::string, std::string> ren;
        for (int j = p; j < l; ++j) ren[var_name(j)] = var_name(j + 1);
        LaurentElem moved = v.renamed(ren);
        Rat sign(p % 2 == 0 ? -1 : 1);
        for (const auto& [ab, coef] : pre[static_cast<std::size_t>(t[static_cast<std::size_t>(p)])]) {
          Tuple tt;
          tt.reserve(t.size() + 1);
          tt.insert(tt.end(), t.begin(), t.begin() + p);
          tt.push_back(ab.first);
          tt.push_back(ab.second);
          tt.insert(tt.end(), t.begin() + p + 1, t.end());
          out.add_term(tt, u, moved.scaled(sign * coef));
        }
      }
      // right current
      Rat rsign(l % 2 == 0 ? -1 : 1);
      for (int g = 0; g < A.dim(); ++g) {
        auto prod = A.multiply(AlgElem{{u, Rat(1)}}, AlgElem{{g, Rat(1)}});
        if (prod.empty()) continue;
        Tuple tt = t;
        tt.push_back(g);
        LaurentElem val = v * zmono(l, -A.weight_of(g));
        for (const auto& [c, coef] : prod) out.add_term(tt, c, val.scaled(rsign * coef));
      }
    }
  }
  return out;
}

int slot_of(const std::string& name, int L) {
  for (int s = 0; s < L; ++s)
    if (name == var_name(s)) return s;
  throw std::logic_error("foreign variable " + name + " in a boundary value");
}

// Numerator key of a pole-free value, aligned over the L slot variables.
std::map<std::vector<int>, Rat> aligned_terms(const LaurentElem& w, int L) {
  std::map<std::vector<int>, Rat> out;
  std::vector<int> slot_idx(w.vars().size());
  for (std::size_t vi = 0; vi < w.vars().size(); ++vi) slot_idx[vi] = slot_of(w.vars()[vi], L);
  for (const auto& [e, coef] : w.terms()) {
    std::vector<int> fe(static_cast<std::size_t>(L), 0);
    for (std::size_t vi = 0; vi < e.size(); ++vi) fe[static_cast<std::size_t>(slot_idx[vi])] = e[vi];
    out.emplace(std::move(fe), coef);
  }
  return out;
}

}  // namespace

Cochain coboundary(const Model& A, const Cochain& F) {
  return coboundary_impl(A, F, build_fuse_pre(A));
}

DDWitness dd_zero_check_tables(const Model& A, const std::vector<Cochain>& tables) {
  DDWitness w;
  if (tables.empty()) return w;
  w.l = tables[0].l;
  w.k = tables[0].k;
  w.applicable = w.k >= 2;
  if (!w.applicable) return w;
  FusePre pre = build_fuse_pre(A);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    Cochain dd = coboundary_impl(A, coboundary_impl(A, tables[i], pre), pre);
    if (dd.is_zero()) continue;
    w.ok = false;
    const auto& [t, vals] = *dd.table.begin();
    const auto& [u, v] = *vals.begin();
    std::ostringstream os;
    os << "table " << i << ": square lands at " << tuple_name(A, t) << " -> " << A.name_of(u)
       << " with value " << v.str();
    w.detail = os.str();
    return w;
  }
  return w;
}

//--- engine -------------------------------------------------------------------

std::string CohomologyReport::csv() const {
  std::ostringstream os;
  os << "l,k,dim,kernel,image,betti,prime\n";
  for (const auto& e : entries)
    os << e.l << ',' << e.k << ',' << e.dim << ',' << e.kernel << ',' << e.image << ','
       << e.betti << ',' << e.prime << '\n';
  return os.str();
}

ComplexEngine::ComplexEngine(const Model& A, int l_max, int k_max, const AxiomSet& ax)
    : A_(A), l_max_(l_max), k_max_(k_max), ax_(ax) {
  if (l_max < 0 || k_max < 0) throw std::invalid_argument("negative grid corner");
  fuse_pre_ = build_fuse_pre(A);
  slots_.resize(static_cast<std::size_t>(l_max) + 1);
  for (int l = 0; l <= l_max; ++l) {
    auto& row = slots_[static_cast<std::size_t>(l)];
    row.resize(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) {
      Slot& s = row[static_cast<std::size_t>(k)];
      s.cell = build_cell_basis(A, l, k, ax);
      s.orig_basis = s.cell.basis();
      s.orig_piv = s.cell.pivots();
      s.orig_chi.reserve(s.cell.dim());
      for (std::size_t i = 0; i < s.cell.dim(); ++i) s.orig_chi.push_back(s.cell.basis_chi(i));
      s.stable_piv = s.orig_piv;
      s.raw = s.cell.dim();
    }
  }
  for (int l = l_max; l >= 0; --l)
    for (int k = 1; k <= k_max; ++k) stabilize(l, k);
}

void ComplexEngine::check_grid(int l, int k) const {
  if (l < 0 || l > l_max_ || k < 0 || k > k_max_)
    throw std::invalid_argument("cell outside the grid");
}

const ComplexEngine::Slot& ComplexEngine::slot(int l, int k) const {
  check_grid(l, k);
  return slots_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
}

std::size_t ComplexEngine::raw_dim(int l, int k) const { return slot(l, k).raw; }

const ComplexCell& ComplexEngine::cell(int l, int k) const { return slot(l, k).cell; }

std::vector<Cochain> ComplexEngine::stable_tables(int l, int k) const {
  const Slot& s = slot(l, k);
  std::vector<Cochain> out;
  out.reserve(s.cell.dim());
  for (std::size_t i = 0; i < s.cell.dim(); ++i) out.push_back(s.cell.basis_cochain(A_, i));
  return out;
}

void ComplexEngine::stabilize(int l, int k) {
  Slot& s = slots_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
  if (s.cell.dim() == 0) return;

  const bool in_grid = l + 1 <= l_max_;
  const Slot* T = in_grid ? &slots_[static_cast<std::size_t>(l) + 1][static_cast<std::size_t>(k) - 1]
                          : nullptr;
  const int L = l + 1;
  const int E = A_.params().window;
  const bool use_kg = ax_.count(Axiom::KG) != 0;
  const bool target_rows = (ax_.count(Axiom::SHUFFLE) != 0 && L >= 2) ||
                           (ax_.count(Axiom::COMPOSE) != 0 && k - 1 >= 1 && L >= 2);

  std::map<int, std::vector<std::size_t>> sectors;
  for (std::size_t i = 0; i < s.cell.dim(); ++i) sectors[s.orig_chi[i]].push_back(i);

  struct Refined {
    std::size_t orig;
    SparseVec vec;
    int chi;
  };
  std::vector<Refined> refined;
  std::map<int, std::vector<SparseVec>> new_stab;

  for (const auto& [chi, cols] : sectors) {
    const std::size_t n = cols.size();

    std::vector<Cochain> dtabs;
    dtabs.reserve(n);
    for (std::size_t ci = 0; ci < n; ++ci)
      dtabs.push_back(coboundary_impl(A_, s.cell.basis_cochain(A_, cols[ci]), fuse_pre_));

    // boundary values grouped per target (tuple, out)
    std::map<std::pair<Tuple, int>, std::map<std::size_t, const LaurentElem*>> by_tu;
    for (std::size_t ci = 0; ci < n; ++ci)
      for (const auto& [t, vals] : dtabs[ci].table)
        for (const auto& [u, v] : vals) by_tu[{t, u}][ci] = &v;

    std::vector<SparseVec> rows;

    // per-(tuple, out) lift to the common polynomial keyspace
    struct Pivot {
      std::vector<int> key;
      std::map<std::vector<int>, Rat> col;   // reduced echelon column over keys
      std::map<std::vector<int>, Rat> gam;   // expression in frame exponents
    };
    struct Lift {
      bool plain = true;
      std::map<std::size_t, std::map<std::vector<int>, Rat>> poly;  // column -> key -> coef
      std::vector<Pivot> piv;                                        // only when !plain
    };
    std::map<std::pair<Tuple, int>, Lift> lifts;

    for (const auto& [tu, colvals] : by_tu) {
      const Tuple& t = tu.first;
      const int u = tu.second;
      auto caps = frame_caps(A_, ax_, t);
      int capsum = 0;
      for (int c : caps) capsum += c;

      std::vector<int> capsp = caps;
      for (const auto& [ci, pv] : colvals) {
        std::size_t pi = 0;
        for (int a = 0; a < L; ++a)
          for (int b = a + 1; b < L; ++b, ++pi)
            capsp[pi] = std::max(capsp[pi], pv->pole_order(var_name(a), var_name(b)));
      }
      bool excess = false;
      for (std::size_t pi = 0; pi < caps.size(); ++pi)
        if (capsp[pi] > caps[pi]) excess = true;

      Lift& lift = lifts[tu];
      lift.plain = !excess;
      for (const auto& [ci, pv] : colvals) {
        LaurentElem w = *pv;
        std::size_t pi = 0;
        for (int a = 0; a < L; ++a)
          for (int b = a + 1; b < L; ++b, ++pi)
            if (capsp[pi] > 0) w = w.with_pole(var_name(a), var_name(b), -capsp[pi]);
        if (!w.poles().empty()) throw std::logic_error("pole cleared above its observed order");
        lift.poly[ci] = aligned_terms(w, L);
      }

      int kg_target = capsum + tuple_weight(A_, t) - A_.weight_of(u);
      auto in_frame = [&](const std::vector<int>& e) {
        int sum = 0;
        for (int x : e) {
          if (x < -E || x > E) return false;
          sum += x;
        }
        return !use_kg || sum == kg_target;
      };

      if (lift.plain) {
        // defect keys: anything outside the frame must cancel
        std::map<std::vector<int>, SparseVec> defects;
        for (const auto& [ci, keys] : lift.poly)
          for (const auto& [e, coef] : keys)
            if (!in_frame(e)) defects[e][ci] = coef;
        for (auto& [e, row] : defects) rows.push_back(std::move(row));
        continue;
      }

      // lifted frame family: z^e times the excess difference factors
      LaurentElem excess_fac(1);
      {
        std::size_t pi = 0;
        for (int a = 0; a < L; ++a)
          for (int b = a + 1; b < L; ++b, ++pi)
            if (capsp[pi] > caps[pi])
              excess_fac = excess_fac.with_pole(var_name(a), var_name(b), caps[pi] - capsp[pi]);
      }
      std::vector<std::vector<int>> eset;
      {
        std::vector<int> e(static_cast<std::size_t>(L));
        if (use_kg) {
          if (kg_target >= -L * E && kg_target <= L * E) {
            std::function<void(int, int)> rec = [&](int pos, int rem) {
              if (pos == L - 1) {
                if (rem < -E || rem > E) return;
                e[static_cast<std::size_t>(pos)] = rem;
                eset.push_back(e);
                return;
              }
              int tail = L - 1 - pos;
              int lo = std::max(-E, rem - tail * E);
              int hi = std::min(E, rem + tail * E);
              for (int x = lo; x <= hi; ++x) {
                e[static_cast<std::size_t>(pos)] = x;
                rec(pos + 1, rem - x);
              }
            };
            rec(0, kg_target);
          }
        } else {
          e.assign(static_cast<std::size_t>(L), -E);
          while (true) {
            eset.push_back(e);
            int pos = L - 1;
            while (pos >= 0 && e[static_cast<std::size_t>(pos)] == E) {
              e[static_cast<std::size_t>(pos)] = -E;
              --pos;
            }
            if (pos < 0) break;
            ++e[static_cast<std::size_t>(pos)];
          }
        }
      }

      for (const auto& fe : eset) {
        LaurentElem le = excess_fac;
        for (int sl = 0; sl < L; ++sl)
          le = le * zmono(sl, fe[static_cast<std::size_t>(sl)]);
        Pivot np;
        np.col = aligned_terms(le, L);
        np.gam[fe] = 1;
        for (const Pivot& p : lift.piv) {
          auto it = np.col.find(p.key);
          if (it == np.col.end()) continue;
          Rat c = it->second;
          for (const auto& [kk, vv] : p.col) {
            auto jt = np.col.find(kk);
            if (jt == np.col.end()) {
              Rat nv = -c * vv;
              if (nv != 0) np.col.emplace(kk, nv);
            } else {
              jt->second -= c * vv;
              if (jt->second == 0) np.col.erase(jt);
            }
          }
          for (const auto& [kk, vv] : p.gam) {
            np.gam[kk] -= c * vv;
            if (np.gam[kk] == 0) np.gam.erase(kk);
          }
        }
        if (np.col.empty()) throw std::logic_error("lifted frame vectors went dependent");
        np.key = np.col.begin()->first;
        Rat lead = np.col.at(np.key);
        for (auto& [kk, vv] : np.col) vv /= lead;
        for (auto& [kk, vv] : np.gam) vv /= lead;
        for (Pivot& p : lift.piv) {
          auto it = p.col.find(np.key);
          if (it == p.col.end()) continue;
          Rat c = it->second;
          for (const auto& [kk, vv] : np.col) {
            auto jt = p.col.find(kk);
            if (jt == p.col.end()) {
              Rat nv = -c * vv;
              if (nv != 0) p.col.emplace(kk, nv);
            } else {
              jt->second -= c * vv;
              if (jt->second == 0) p.col.erase(jt);
            }
          }
          for (const auto& [kk, vv] : np.gam) {
            p.gam[kk] -= c * vv;
            if (p.gam[kk] == 0) p.gam.erase(kk);
          }
        }
        lift.piv.push_back(std::move(np));
      }

      // residual rows: everything the lifted frame cannot reconstruct
      std::set<std::vector<int>> all_keys, piv_keys;
      for (const auto& [ci, keys] : lift.poly)
        for (const auto& [e, coef] : keys) all_keys.insert(e);
      for (const Pivot& p : lift.piv) {
        piv_keys.insert(p.key);
        for (const auto& [kk, vv] : p.col) all_keys.insert(kk);
      }
      for (const auto& kk : all_keys) {
        if (piv_keys.count(kk)) continue;
        SparseVec row;
        for (const auto& [ci, keys] : lift.poly) {
          Rat acc = 0;
          if (auto it = keys.find(kk); it != keys.end()) acc += it->second;
          for (const Pivot& p : lift.piv) {
            auto ck = p.col.find(kk);
            if (ck == p.col.end()) continue;
            auto wp = keys.find(p.key);
            if (wp == keys.end()) continue;
            acc -= ck->second * wp->second;
          }
          if (acc != 0) row[ci] = acc;
        }
        if (!row.empty()) rows.push_back(std::move(row));
      }
    }

    // frame coordinates of the combined image, as functionals over columns
    std::map<std::tuple<Tuple, int, std::vector<int>>, SparseVec> xi_memo;
    auto xi_at = [&](const Tuple& t, int u, const std::vector<int>& e) -> const SparseVec& {
      auto key = std::make_tuple(t, u, e);
      auto found = xi_memo.find(key);
      if (found != xi_memo.end()) return found->second;
      SparseVec out;
      auto lt = lifts.find({t, u});
      if (lt != lifts.end()) {
        const Lift& lift = lt->second;
        if (lift.plain) {
          for (const auto& [ci, keys] : lift.poly)
            if (auto it = keys.find(e); it != keys.end() && it->second != 0) out[ci] = it->second;
        } else {
          for (const Pivot& p : lift.piv) {
            auto g = p.gam.find(e);
            if (g == p.gam.end() || g->second == 0) continue;
            for (const auto& [ci, keys] : lift.poly)
              if (auto it = keys.find(p.key); it != keys.end()) {
                out[ci] += g->second * it->second;
                if (out[ci] == 0) out.erase(ci);
              }
          }
        }
      }
      return xi_memo.emplace(std::move(key), std::move(out)).first->second;
    };

    // predicate rows of every touched target block
    if (target_rows) {
      std::set<std::pair<Tuple, int>> blocks;
      for (const auto& [tu, colvals] : by_tu) {
        Tuple mt = tu.first;
        std::sort(mt.begin(), mt.end());
        blocks.insert({std::move(mt), tu.second});
      }
      for (const auto& [mt, u] : blocks) {
        auto coords = block_coords(A_, L, k - 1, ax_, mt, u);
        auto brows = block_rows(A_, L, k - 1, ax_, coords);
        std::vector<const SparseVec*> xcols(coords.size());
        for (std::size_t c = 0; c < coords.size(); ++c)
          xcols[c] = &xi_at(coords[c].t, coords[c].out, coords[c].e);
        for (std::size_t r = 0; r < brows.rows(); ++r) {
          SparseVec row;
          for (const auto& [c, coef] : brows.row(r))
            for (const auto& [ci, v] : *xcols[c]) {
              row[ci] += coef * v;
              if (row[ci] == 0) row.erase(ci);
            }
          if (!row.empty()) rows.push_back(std::move(row));
        }
      }
    }

    // stability rows of the refined in-grid target
    if (T != nullptr) {
      auto it = T->stab_rows.find(chi);
      if (it != T->stab_rows.end())
        for (const SparseVec& srow : it->second) {
          SparseVec row;
          for (const auto& [coord, coef] : srow) {
            const FrameCoord& fc = T->cell.frame()[coord];
            for (const auto& [ci, v] : xi_at(fc.t, fc.out, fc.e)) {
              row[ci] += coef * v;
              if (row[ci] == 0) row.erase(ci);
            }
          }
          if (!row.empty()) rows.push_back(std::move(row));
        }
    }

    SparseMat m(0, n);
    for (const auto& row : rows) m.append_row(row);
    std::vector<std::size_t> xfree;
    auto xbasis = nullspace(m, &xfree);

    for (std::size_t j = 0; j < xbasis.size(); ++j) {
      SparseVec v;
      for (const auto& [ci, c] : xbasis[j])
        for (const auto& [coord, val] : s.orig_basis[cols[ci]]) {
          v[coord] += c * val;
          if (v[coord] == 0) v.erase(coord);
        }
      refined.push_back({cols[xfree[j]], std::move(v), chi});
    }

    // compressed cut rows, re-addressed to the original frame pivots
    auto cut = rref_rows(m);
    if (!cut.empty()) {
      auto& dst = new_stab[chi];
      for (const auto& r : cut) {
        SparseVec g;
        for (const auto& [ci, c] : r) g[s.orig_piv[cols[ci]]] = c;
        dst.push_back(std::move(g));
      }
    }
  }

  // order surviving vectors as the raw basis was ordered
  std::sort(refined.begin(), refined.end(),
            [](const Refined& a, const Refined& b) { return a.orig < b.orig; });
  std::vector<SparseVec> new_basis;
  std::vector<int> new_chi;
  std::vector<std::size_t> new_piv;
  for (auto& r : refined) {
    new_basis.push_back(std::move(r.vec));
    new_chi.push_back(r.chi);
    new_piv.push_back(s.orig_piv[r.orig]);
  }
  s.cell.set_basis(std::move(new_basis), std::move(new_chi));
  s.stable_piv = std::move(new_piv);
  s.stab_rows = std::move(new_stab);
}

bool ComplexEngine::stable_contains(const Cochain& F, std::string* why) const {
  const Slot& s = slot(F.l, F.k);
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  auto v = s.cell.to_coords(A_, F);
  if (!v) return fail("outside the monomial frame");
  SparseVec r = *v;
  for (std::size_t i = 0; i < s.orig_basis.size(); ++i) {
    auto it = r.find(s.orig_piv[i]);
    if (it == r.end() || it->second == 0) continue;
    Rat c = it->second;
    for (const auto& [coord, val] : s.orig_basis[i]) {
      r[coord] -= c * val;
      if (r[coord] == 0) r.erase(coord);
    }
  }
  if (!r.empty()) return fail("outside the raw cell span");
  for (const auto& [chi, rows] : s.stab_rows)
    for (const SparseVec& row : rows) {
      Rat acc = 0;
      for (const auto& [coord, coef] : row)
        if (auto it = v->find(coord); it != v->end()) acc += coef * it->second;
      if (acc != 0) return fail("boundary image leaves the stable span");
    }
  if (why) why->clear();
  return true;
}

CoboundaryMatrix ComplexEngine::matrix(int l, int k) const {
  check_grid(l, k);
  if (k < 1 || l + 1 > l_max_)
    throw std::invalid_argument("coboundary target leaves the grid");
  const Slot& src = slot(l, k);
  const Slot& dst = slot(l + 1, k - 1);
  CoboundaryMatrix M;
  M.l = l;
  M.k = k;
  M.src_dim = src.cell.dim();
  M.dst_dim = dst.cell.dim();
  M.mat = SparseMat(M.dst_dim, M.src_dim);
  for (std::size_t i = 0; i < M.src_dim; ++i) {
    Cochain D = coboundary_impl(A_, src.cell.basis_cochain(A_, i), fuse_pre_);
    auto coords = dst.cell.to_coords(A_, D);
    if (!coords) throw std::logic_error("stabilized image left the target frame");
    SparseVec y;
    for (std::size_t j = 0; j < dst.cell.dim(); ++j)
      if (auto it = coords->find(dst.stable_piv[j]); it != coords->end() && it->second != 0)
        y[j] = it->second;
    SparseVec rec;
    for (const auto& [j, c] : y)
      for (const auto& [coord, val] : dst.cell.basis()[j]) {
        rec[coord] += c * val;
        if (rec[coord] == 0) rec.erase(coord);
      }
    if (rec != *coords) throw std::logic_error("stabilized image left the stable span");
    for (const auto& [j, c] : y) M.mat.set(j, i, c);
  }
  return M;
}

SparseMat ComplexEngine::key_matrix(int l, int k) const {
  check_grid(l, k);
  if (k < 1) throw std::invalid_argument("margin spent, no outgoing map");
  const Slot& s = slot(l, k);
  const int L = l + 1;
  const std::size_t d = s.cell.dim();

  std::vector<Cochain> ds;
  ds.reserve(d);
  for (std::size_t i = 0; i < d; ++i)
    ds.push_back(coboundary_impl(A_, s.cell.basis_cochain(A_, i), fuse_pre_));

  std::map<std::pair<Tuple, int>, std::vector<int>> caps2;
  for (const auto& tab : ds)
    for (const auto& [t, vals] : tab.table)
      for (const auto& [u, v] : vals) {
        auto [it, fresh] = caps2.try_emplace({t, u});
        if (fresh) it->second.assign(static_cast<std::size_t>(L * (L - 1) / 2), 0);
        std::size_t pi = 0;
        for (int a = 0; a < L; ++a)
          for (int b = a + 1; b < L; ++b, ++pi)
            it->second[pi] = std::max(it->second[pi], v.pole_order(var_name(a), var_name(b)));
      }

  std::map<std::tuple<Tuple, int, std::vector<int>>, std::size_t> row_of;
  std::vector<std::map<std::size_t, Rat>> col_entries(d);
  for (std::size_t i = 0; i < d; ++i)
    for (const auto& [t, vals] : ds[i].table)
      for (const auto& [u, v] : vals) {
        const auto& c = caps2.at({t, u});
        LaurentElem w = v;
        std::size_t pi = 0;
        for (int a = 0; a < L; ++a)
          for (int b = a + 1; b < L; ++b, ++pi)
            if (c[pi] > 0) w = w.with_pole(var_name(a), var_name(b), -c[pi]);
        for (const auto& [e, coef] : aligned_terms(w, L)) {
          auto [it, fresh] = row_of.try_emplace({t, u, e}, row_of.size());
          col_entries[i][it->second] += coef;
        }
      }

  SparseMat m(row_of.size(), d);
  for (std::size_t i = 0; i < d; ++i)
    for (const auto& [r, val] : col_entries[i])
      if (val != 0) m.add(r, i, val);
  return m;
}

DDWitness ComplexEngine::dd_zero_check(int l, int k) const {
  check_grid(l, k);
  DDWitness w;
  w.l = l;
  w.k = k;
  w.applicable = k >= 2;
  if (!w.applicable) return w;
  auto tabs = stable_tables(l, k);
  if (tabs.empty()) return w;
  auto inner = dd_zero_check_tables(A_, tabs);
  w.ok = inner.ok;
  w.detail = inner.detail;
  return w;
}

CohomologyEntry ComplexEngine::cohomology_rank(int l, int k) const {
  check_grid(l, k);
  if (l >= 1 && k + 1 > k_max_)
    throw std::invalid_argument("incoming cell leaves the grid");
  CohomologyEntry e;
  e.l = l;
  e.k = k;
  e.dim = slot(l, k).cell.dim();
  if (k == 0) {
    e.kernel = e.dim;
  } else {
    auto rep = rank_checked(key_matrix(l, k));
    e.kernel = e.dim - rep.exact;
    e.prime = rep.prime;
  }
  if (l == 0) {
    e.image = 0;
  } else {
    e.image = rank_checked(key_matrix(l - 1, k + 1)).exact;
  }
  if (e.image > e.kernel) throw std::logic_error("boundary image escapes the cocycles");
  e.betti = e.kernel - e.image;
  return e;
}

CohomologyReport ComplexEngine::cohomology() const {
  CohomologyReport rep;
  rep.l_max = l_max_;
  rep.k_max = k_max_;
  rep.axioms = axioms_str(ax_);

  std::map<std::pair<int, int>, RankReport> ranks;
  for (int l = 0; l <= l_max_; ++l)
    for (int k = 1; k <= k_max_; ++k) {
      if (l >= 1 && l == l_max_ && k == k_max_) continue;  // no entry consumes it
      ranks[{l, k}] = rank_checked(key_matrix(l, k));
    }

  for (int l = 0; l <= l_max_; ++l)
    for (int k = 0; k <= k_max_; ++k) {
      if (l >= 1 && k + 1 > k_max_) continue;
      CohomologyEntry e;
      e.l = l;
      e.k = k;
      e.dim = slot(l, k).cell.dim();
      if (k == 0) {
        e.kernel = e.dim;
      } else {
        const auto& rr = ranks.at({l, k});
        e.kernel = e.dim - rr.exact;
        e.prime = rr.prime;
      }
      e.image = l == 0 ? 0 : ranks.at({l - 1, k + 1}).exact;
      if (e.image > e.kernel) throw std::logic_error("boundary image escapes the cocycles");
      e.betti = e.kernel - e.image;
      rep.entries.push_back(e);
    }
  return rep;
}

}  // namespace cosimp
