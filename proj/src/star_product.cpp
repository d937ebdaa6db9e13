#include "cosimp/star_product.hpp"

#include "cosimp/complex_engine.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace cosimp {

namespace {

Rat rpow(const Rat& b, int e) {
  Rat r(1);
  for (int i = 0; i < (e >= 0 ? e : -e); ++i) r *= b;
  if (e < 0) r = Rat(1) / r;
  return r;
}

using Mat = std::vector<std::vector<Rat>>;

Mat inverse(Mat m) {
  const std::size_t n = m.size();
  Mat r(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = Rat(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) throw std::domain_error("slice transform is singular");
    std::swap(m[p], m[c]);
    std::swap(r[p], r[c]);
    Rat d = m[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      m[c][j] /= d;
      r[c][j] /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m[i][c] == 0) continue;
      Rat f = m[i][c];
      for (std::size_t j = 0; j < n; ++j) {
        m[i][j] -= f * m[c][j];
        r[i][j] -= f * r[c][j];
      }
    }
  }
  return r;
}

void axpy(AlgElem& acc, const Rat& c, const AlgElem& x) {
  if (c == 0) return;
  for (const auto& [i, v] : x) {
    Rat& slot = acc[i];
    slot += c * v;
    if (slot == 0) acc.erase(i);
  }
}

}  // namespace

//--- insertion basis -------------------------------------------------------

DualBasis center_dual_basis(const Model& A) {
  DualBasis out;
  for (int m = 0; m <= A.params().weight_cap; ++m) {
    const std::vector<AlgElem>& slice = A.center_slice(m);
    if (slice.empty()) continue;
    const std::size_t n = slice.size();
    Mat gram(n, std::vector<Rat>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) gram[i][j] = A.pairing(slice[i], slice[j]);
    Mat gi = inverse(gram);
    std::vector<DualPair> pairs(n);
    for (std::size_t i = 0; i < n; ++i) {
      pairs[i].g = slice[i];
      for (std::size_t j = 0; j < n; ++j) axpy(pairs[i].gbar, gi[i][j], slice[j]);
    }
    out.emplace(m, std::move(pairs));
  }
  return out;
}

DualBasis remix_dual_basis(const Model& A, const DualBasis& base, std::uint64_t seed) {
  (void)A;
  std::mt19937_64 eng(seed);
  DualBasis out;
  for (const auto& [m, pairs] : base) {
    const std::size_t n = pairs.size();
    // invertible by construction: permuted lower triangular with nonzero diagonal
    Mat P(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) {
      P[i][i] = rat(1 + static_cast<long>(eng() % 3), 1 + static_cast<long>(eng() % 3));
      for (std::size_t j = 0; j < i; ++j)
        P[i][j] = Rat(static_cast<long>(eng() % 5) - 2);
    }
    for (std::size_t i = n; i > 1; --i)
      std::swap(P[i - 1], P[eng() % i]);
    Mat Pi = inverse(P);
    std::vector<DualPair> mixed(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        axpy(mixed[i].g, P[i][j], pairs[j].g);
        axpy(mixed[i].gbar, Pi[j][i], pairs[j].gbar);
      }
    for (std::size_t i = n; i > 1; --i)
      std::swap(mixed[i - 1], mixed[eng() % i]);
    out.emplace(m, std::move(mixed));
  }
  return out;
}

//--- deformed multiplication -------------------------------------------------

const Cochain& StarResult::at(int m) const {
  auto it = coefficients.find(m);
  if (it == coefficients.end()) throw std::out_of_range("no coefficient at this order");
  return it->second;
}

namespace {

// Walks the factors left to right, keeping the fold of outputs and dressings,
// the joint value, and the list of tuple branches opened by seam fusions.
struct Assembler {
  const Model& A;
  const std::vector<Cochain>& factors;
  const std::set<int>& seams;
  const std::vector<std::map<std::string, std::string>>& ren;
  const std::vector<const AlgElem*>& dress;
  Cochain& coeff;

  void run(std::size_t i, const std::vector<std::pair<Tuple, Rat>>& branches,
           const AlgElem& out, const LaurentElem& val) const {
    if (i == factors.size()) {
      for (const auto& [t, c] : branches)
        for (const auto& [comp, oc] : out) coeff.add_term(t, comp, val.scaled(c * oc));
      return;
    }
    for (const auto& [t, outs] : factors[i].table)
      for (const auto& [u, v] : outs) {
        AlgElem stepped = A.multiply(out, AlgElem{{u, Rat(1)}});
        if (stepped.empty()) continue;
        stepped = A.multiply(stepped, *dress[i]);
        if (stepped.empty()) continue;
        LaurentElem joined = val * v.renamed(ren[i]);
        if (joined.is_zero()) continue;
        std::vector<std::pair<Tuple, Rat>> next;
        if (i > 0 && seams.count(static_cast<int>(i) - 1)) {
          for (const auto& [bt, bc] : branches) {
            AlgElem fused = A.multiply(AlgElem{{bt.back(), Rat(1)}}, AlgElem{{t[0], Rat(1)}});
            for (const auto& [comp, cc] : fused) {
              Tuple nt = bt;
              nt.back() = comp;
              nt.insert(nt.end(), t.begin() + 1, t.end());
              next.emplace_back(std::move(nt), bc * cc);
            }
          }
        } else {
          for (const auto& [bt, bc] : branches) {
            Tuple nt = bt;
            nt.insert(nt.end(), t.begin(), t.end());
            next.emplace_back(std::move(nt), bc);
          }
        }
        if (next.empty()) continue;
        run(i + 1, next, stepped, joined);
      }
  }
};

}  // namespace

StarResult star(const Model& A, const std::vector<Cochain>& factors,
                const Identifications& ids, int lambda_max,
                const DualBasis* basis, std::vector<Rat> radii) {
  if (factors.empty()) throw std::invalid_argument("star needs at least one factor");
  const int q = static_cast<int>(factors.size());

  std::set<int> seams;
  for (const auto& mg : ids.merges) {
    if (mg.factor_a == mg.factor_b)
      throw std::invalid_argument("cannot identify two slots of the same factor");
    if (mg.factor_a < 0 || mg.factor_a >= q || mg.factor_b < 0 || mg.factor_b >= q)
      throw std::invalid_argument("identification names a missing factor");
    if (mg.factor_b != mg.factor_a + 1)
      throw std::invalid_argument("identifications must join adjacent factors");
    if (mg.slot_a != factors[static_cast<std::size_t>(mg.factor_a)].l - 1 || mg.slot_b != 0)
      throw std::invalid_argument("identifications must join seam slots");
    if (!seams.insert(mg.factor_a).second)
      throw std::invalid_argument("seam identified twice");
  }

  if (lambda_max < 0) lambda_max = A.params().weight_cap;
  if (radii.empty()) radii.assign(static_cast<std::size_t>(q), Rat(2));
  if (static_cast<int>(radii.size()) != q)
    throw std::invalid_argument("one radius per factor");
  for (const Rat& rad : radii)
    if (rad <= 0) throw std::domain_error("radius must be positive");

  StarResult res;
  res.target_l = -static_cast<int>(ids.merges.size());
  res.target_k = -ids.t;
  for (const Cochain& f : factors) {
    res.target_l += f.l;
    res.target_k += f.k;
  }
  res.lambda_max = lambda_max;
  res.ids = ids;
  res.radii = std::move(radii);
  for (int m = 0; m <= lambda_max; ++m) {
    Cochain c;
    c.l = res.target_l;
    c.k = res.target_k;
    res.coefficients.emplace(m, std::move(c));
  }

  DualBasis local;
  if (!basis) local = center_dual_basis(A);
  const DualBasis& ins = basis ? *basis : local;

  // summed dressing per weight; dead slices drop out
  std::map<int, AlgElem> dressing;
  for (const auto& [wt, pairs] : ins) {
    if (wt > lambda_max) continue;
    AlgElem s;
    for (const DualPair& p : pairs) s = Model::add(s, A.multiply(p.gbar, p.g));
    if (!s.empty()) dressing.emplace(wt, std::move(s));
  }

  // slot placement after the merges
  std::vector<int> offset(static_cast<std::size_t>(q), 0);
  {
    int pos = 0;
    for (int i = 0; i < q; ++i) {
      if (i > 0 && seams.count(i - 1)) --pos;
      offset[static_cast<std::size_t>(i)] = pos;
      pos += factors[static_cast<std::size_t>(i)].l;
    }
  }
  std::vector<std::map<std::string, std::string>> ren(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < factors[static_cast<std::size_t>(i)].l; ++j)
      ren[static_cast<std::size_t>(i)][var_name(j)] =
          var_name(offset[static_cast<std::size_t>(i)] + j);

  // spend total weight m over the seats, one dressing choice per factor
  std::vector<const AlgElem*> choice(static_cast<std::size_t>(q), nullptr);
  std::vector<std::pair<Tuple, Rat>> seed{{Tuple{}, Rat(1)}};
  const AlgElem one = A.unit();
  auto pick = [&](auto&& self, int i, int used) -> void {
    if (i == q) {
      Assembler as{A, factors, seams, ren, choice, res.coefficients[used]};
      as.run(0, seed, one, LaurentElem(1));
      return;
    }
    for (const auto& [wt, s] : dressing) {
      if (used + wt > lambda_max) break;
      choice[static_cast<std::size_t>(i)] = &s;
      self(self, i + 1, used + wt);
    }
  };
  pick(pick, 0, 0);
  return res;
}

//--- declared bounds ---------------------------------------------------------

Rat cauchy_bound(const std::vector<Rat>& Mi, const std::vector<Rat>& Ri, int m, int n) {
  if (Mi.empty() || Ri.empty()) throw std::invalid_argument("need a norm and a radius");
  for (const Rat& r : Ri)
    if (r <= 0) throw std::domain_error("radius must be positive");
  Rat M = *std::min_element(Mi.begin(), Mi.end());
  Rat R = *std::max_element(Ri.begin(), Ri.end());
  return M * rpow(R, n + 1 - m);
}

BoundReport bound_check(const Model& A, const StarResult& res,
                        const std::vector<Cochain>& factors) {
  (void)A;
  if (factors.empty()) throw std::invalid_argument("need at least one factor");
  if (factors.size() != res.radii.size())
    throw std::invalid_argument("one radius per factor");

  BoundReport rep;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const Cochain& f = factors[i];
    const Rat& R = res.radii[i];
    // sample grid inside the radius: per slot two magnitudes, both signs,
    // all magnitudes pairwise distinct so difference factors stay nonzero
    std::vector<std::map<std::string, Rat>> points{{}};
    for (int j = 0; j < f.l; ++j) {
      std::vector<std::map<std::string, Rat>> grown;
      for (const auto& pt : points)
        for (long den : {2 * j + 2, 2 * j + 3})
          for (int sgn : {1, -1}) {
            auto np = pt;
            np[var_name(j)] = R * Rat(sgn, den);
            grown.push_back(std::move(np));
          }
      points = std::move(grown);
    }
    Rat best(0);
    for (const auto& [t, outs] : f.table)
      for (const auto& [u, v] : outs)
        for (const auto& pt : points) {
          Rat a = rat_abs(v.evaluate(pt));
          if (a > best) best = a;
        }
    rep.factor_norms.push_back(best);
  }
  rep.min_m = *std::min_element(rep.factor_norms.begin(), rep.factor_norms.end());
  rep.max_r = *std::max_element(res.radii.begin(), res.radii.end());

  for (const auto& [m, c] : res.coefficients)
    for (const auto& [t, outs] : c.table)
      for (const auto& [u, v] : outs) {
        const int pole = v.total_pole_order();
        for (const auto& [e, coef] : v.terms()) {
          int deg = -pole;
          for (int x : e) deg += x;
          const int n = -deg;
          Rat line = rep.min_m * rpow(rep.max_r, n + 1 - m);
          ++rep.rows;
          if (rat_abs(coef) > line && rep.ok) {
            rep.ok = false;
            std::ostringstream os;
            os << "order " << m << " term at pole index " << n << " has |coefficient| "
               << rat_abs(coef) << " above the line " << line;
            rep.detail = os.str();
          }
        }
      }
  return rep;
}

//--- derived operations ------------------------------------------------------

StarResult commutator(const Model& A, const Cochain& F, const Cochain& G, int lambda_max) {
  StarResult fg = star(A, {F, G}, {}, lambda_max);
  StarResult gf = star(A, {G, F}, {}, lambda_max);
  for (auto& [m, c] : fg.coefficients) c -= gf.at(m);
  return fg;
}

LeibnizReport leibniz_check(const Model& A, const Cochain& F, const Cochain& G,
                            int lambda_max) {
  if (F.k <= 0 || G.k <= 0)
    throw std::domain_error(
        "factor margin is spent; restrict to a stable_subcomplex cell with k >= 1");
  StarResult fg = star(A, {F, G}, {}, lambda_max);
  StarResult dfg = star(A, {coboundary(A, F), G}, {}, lambda_max);
  StarResult fdg = star(A, {F, coboundary(A, G)}, {}, lambda_max);
  const Rat sign(F.l % 2 == 0 ? 1 : -1);

  LeibnizReport rep;
  for (const auto& [m, c] : fg.coefficients) {
    Cochain resid = coboundary(A, c) - dfg.at(m) - fdg.at(m).scaled(sign);
    if (resid.is_zero()) continue;
    rep.ok = false;
    rep.residual.emplace(m, std::move(resid));
  }
  if (!rep.ok) {
    std::ostringstream os;
    os << "derivation law fails at order " << rep.residual.begin()->first;
    rep.detail = os.str();
  }
  return rep;
}

}  // namespace cosimp
