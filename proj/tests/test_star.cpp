#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cosimp/star_product.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

using namespace cosimp;

namespace {

const Model& full() {
  static Model m(ModelParams{3, 6, 2, 3, 6});
  return m;
}

const Model& small6() {
  static Model m(ModelParams{3, 3, 1, 2, 3});
  return m;
}

Cochain mono(int l, int k, const Tuple& t, int out, const LaurentElem& v) {
  Cochain f;
  f.l = l;
  f.k = k;
  f.add_term(t, out, v);
  return f;
}

LaurentElem zpow(int slot, int e) {
  if (e == 0) return LaurentElem(1);
  return LaurentElem::variable(var_name(slot), e);
}

int idx(const Model& A, const Word& w) {
  int i = A.index_of(w);
  REQUIRE(i >= 0);
  return i;
}

bool all_orders_zero(const StarResult& r) {
  for (const auto& [m, c] : r.coefficients)
    if (!c.is_zero()) return false;
  return true;
}

}  // namespace

//--- declared bound arithmetic ------------------------------------------------

TEST_CASE("the declared bound follows the stated combination") {
  CHECK(cauchy_bound({Rat(1)}, {Rat(2)}, 3, 1) == Rat(1, 2));
  CHECK(cauchy_bound({Rat(0), Rat(5)}, {Rat(2)}, 1, 4) == Rat(0));
  CHECK(cauchy_bound({Rat(3)}, {Rat(1)}, 4, 3) == Rat(3));
  CHECK(cauchy_bound({Rat(3)}, {Rat(1)}, 7, 6) == Rat(3));
  // min over norms, max over radii
  CHECK(cauchy_bound({Rat(7), Rat(3)}, {Rat(1, 2), Rat(4)}, 0, 0) == Rat(12));
  CHECK_THROWS_AS(cauchy_bound({Rat(1)}, {Rat(0)}, 0, 0), std::domain_error);
  CHECK_THROWS_AS(cauchy_bound({Rat(1)}, {Rat(-2)}, 0, 0), std::domain_error);
  CHECK_THROWS_AS(cauchy_bound({}, {Rat(1)}, 0, 0), std::invalid_argument);
}

//--- single factor ------------------------------------------------------------

TEST_CASE("a single factor at order zero is returned unchanged") {
  const Model& A = full();
  int i1 = idx(A, {1}), iu = idx(A, {});
  Cochain F = mono(1, 1, {i1}, iu, zpow(0, -1));

  StarResult r0 = star(A, {F}, {}, 0);
  CHECK(r0.lambda_max == 0);
  CHECK(r0.target_l == 1);
  CHECK(r0.target_k == 1);
  CHECK(r0.coefficients.size() == 1);
  CHECK(r0.at(0) == F);

  // default truncation is the weight cap
  StarResult r = star(A, {F});
  CHECK(r.lambda_max == 6);
  CHECK(r.coefficients.size() == 7);
  CHECK(r.at(0) == F);
}

TEST_CASE("a zero factor wipes every coefficient") {
  const Model& A = full();
  int i1 = idx(A, {1}), i2 = idx(A, {2});
  Cochain F = mono(1, 1, {i1}, i1, zpow(0, -1));
  Cochain Z;
  Z.l = 1;
  Z.k = 1;
  CHECK(all_orders_zero(star(A, {F, Z})));
  CHECK(all_orders_zero(star(A, {Z})));
  (void)i2;
}

TEST_CASE("single-factor insertions dress the output from the right") {
  const Model& A = full();
  int i1 = idx(A, {1}), iu = idx(A, {}), i33 = idx(A, {3, 3});

  // unit output picks up the squared weight-3 insertion and nothing else
  Cochain F = mono(1, 1, {i1}, iu, zpow(0, -1));
  StarResult r = star(A, {F});
  CHECK(r.at(0) == F);
  CHECK(r.at(1).is_zero());
  CHECK(r.at(2).is_zero());
  CHECK(r.at(3) == mono(1, 1, {i1}, i33, zpow(0, -1)));
  CHECK(r.at(4).is_zero());
  CHECK(r.at(5).is_zero());
  CHECK(r.at(6).is_zero());

  // a weighted output pushes the dressing over the cap
  Cochain G = mono(1, 1, {i1}, i1, zpow(0, -1));
  StarResult s = star(A, {G});
  CHECK(s.at(0) == G);
  CHECK(s.at(3).is_zero());
}

//--- two factors --------------------------------------------------------------

TEST_CASE("two disjoint factors concatenate at order zero") {
  const Model& A = full();
  int i1 = idx(A, {1}), i2 = idx(A, {2}), i12 = idx(A, {1, 2});
  Cochain F = mono(1, 2, {i1}, i1, zpow(0, -1));
  Cochain G = mono(1, 2, {i2}, i2, zpow(0, -2));

  StarResult r = star(A, {F, G}, {}, 0);
  CHECK(r.target_l == 2);
  CHECK(r.target_k == 4);
  CHECK(r.at(0) == mono(2, 4, {i1, i2}, i12, zpow(0, -1) * zpow(1, -2)));
}

TEST_CASE("order three inserts the central weight through both seats") {
  const Model& A = full();
  int i1 = idx(A, {1}), i2 = idx(A, {2}), iu = idx(A, {}), i33 = idx(A, {3, 3});
  Cochain F = mono(1, 1, {i1}, iu, zpow(0, -1));
  Cochain G = mono(1, 1, {i2}, iu, zpow(0, -2));

  StarResult r = star(A, {F, G});
  LaurentElem v = zpow(0, -1) * zpow(1, -2);
  CHECK(r.at(0) == mono(2, 2, {i1, i2}, iu, v));
  CHECK(r.at(1).is_zero());
  CHECK(r.at(2).is_zero());
  CHECK(r.at(3) == mono(2, 2, {i1, i2}, i33, v.scaled(2)));
  CHECK(r.at(4).is_zero());
  CHECK(r.at(5).is_zero());
  // both seats filled at once squares past the cap
  CHECK(r.at(6).is_zero());
}

//--- dual basis independence ----------------------------------------------------

TEST_CASE("the centralizer dual basis pairs to the identity") {
  struct Case {
    const Model* A;
    std::size_t total;
  };
  for (Case cs : {Case{&full(), 6}, Case{&small6(), 4}}) {
    const Model& A = *cs.A;
    DualBasis base = center_dual_basis(A);
    std::size_t total = 0;
    for (const auto& [m, pairs] : base) {
      total += pairs.size();
      for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j < pairs.size(); ++j)
          CHECK(A.pairing(pairs[i].gbar, pairs[j].g) == Rat(i == j ? 1 : 0));
    }
    CHECK(total == cs.total);
  }
  // the wide model concentrates its center in one weight-3 line
  CHECK(center_dual_basis(full()).at(3).size() == 1);
  // the tight model has a two-dimensional weight-3 slice
  CHECK(center_dual_basis(small6()).at(3).size() == 2);
}

TEST_CASE("star coefficients survive any dual-basis remix") {
  const Model& A = full();
  int i1 = idx(A, {1}), i2 = idx(A, {2}), iu = idx(A, {});
  Cochain F = mono(1, 1, {i1}, iu, zpow(0, -1));
  Cochain G = mono(1, 1, {i2}, iu, zpow(0, -2));
  StarResult plain = star(A, {F, G});

  DualBasis base = center_dual_basis(A);
  for (std::uint64_t seed : {1u, 7u, 41u}) {
    DualBasis mixed = remix_dual_basis(A, base, seed);
    // contragredient remix keeps the pairing
    for (const auto& [m, pairs] : mixed)
      for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j < pairs.size(); ++j)
          CHECK(A.pairing(pairs[i].gbar, pairs[j].g) == Rat(i == j ? 1 : 0));
    // and the slice product sums
    for (const auto& [m, pairs] : base) {
      AlgElem lhs, rhs;
      for (const auto& p : pairs) lhs = Model::add(lhs, A.multiply(p.gbar, p.g));
      for (const auto& p : mixed.at(m)) rhs = Model::add(rhs, A.multiply(p.gbar, p.g));
      CHECK(lhs == rhs);
    }
    StarResult remixed = star(A, {F, G}, {}, -1, &mixed);
    REQUIRE(remixed.coefficients.size() == plain.coefficients.size());
    for (const auto& [m, c] : plain.coefficients) CHECK(remixed.at(m) == c);
  }

  // same statement over the tight model, where the remix genuinely mixes
  const Model& B = small6();
  int j1 = idx(B, {1}), ju = idx(B, {});
  Cochain H = mono(1, 1, {j1}, ju, zpow(0, -1));
  StarResult bplain = star(B, {H, H});
  DualBasis bbase = center_dual_basis(B);
  DualBasis bmixed = remix_dual_basis(B, bbase, 5);
  StarResult bremixed = star(B, {H, H}, {}, -1, &bmixed);
  for (const auto& [m, c] : bplain.coefficients) CHECK(bremixed.at(m) == c);
}

TEST_CASE("the tight model multiplies associatively") {
  const Model& B = small6();
  for (int a = 0; a < B.dim(); ++a)
    for (int b = 0; b < B.dim(); ++b)
      for (int c = 0; c < B.dim(); ++c) {
        AlgElem ea{{a, Rat(1)}}, eb{{b, Rat(1)}}, ec{{c, Rat(1)}};
        CHECK(B.multiply(B.multiply(ea, eb), ec) == B.multiply(ea, B.multiply(eb, ec)));
      }
}

//--- permutation action ---------------------------------------------------------

TEST_CASE("argument permutation reindexes tuples and variables together") {
  const Model& A = full();
  int i1 = idx(A, {1}), i2 = idx(A, {2}), i3 = idx(A, {3}), iu = idx(A, {});
  Cochain F = mono(2, 1, {i1, i2}, iu, zpow(0, -1) * zpow(1, -2));

  CHECK(permute(F, {0, 1}) == F);
  CHECK(permute(permute(F, {1, 0}), {1, 0}) == F);
  CHECK(permute(F, {1, 0}) == mono(2, 1, {i2, i1}, iu, zpow(0, -2) * zpow(1, -1)));
  CHECK_THROWS_AS(permute(F, {0}), std::invalid_argument);
  CHECK_THROWS_AS(permute(F, {0, 0}), std::invalid_argument);

  // signed riffle sums transform by the sign of the permutation
  auto riffle_sum = [&](const Cochain& H) {
    Cochain s;
    s.l = H.l;
    s.k = H.k;
    for (const auto& [tau, sgn] : inverse_riffles(2, 1)) s += permute(H, tau).scaled(Rat(sgn));
    return s;
  };
  CHECK(riffle_sum(permute(F, {1, 0})) == riffle_sum(F).scaled(Rat(-1)));

  // composition acts through the composite map tau then rho
  Cochain T = mono(3, 1, {i1, i2, i3}, iu, zpow(0, -1) * zpow(1, -2));
  std::vector<std::vector<int>> s3 = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& tau : s3)
    for (const auto& rho : s3) {
      std::vector<int> comp(3);
      for (int i = 0; i < 3; ++i) comp[static_cast<std::size_t>(i)] =
          rho[static_cast<std::size_t>(tau[static_cast<std::size_t>(i)])];
      CHECK(permute(permute(T, tau), rho) == permute(T, comp));
    }
}

//--- commutator -----------------------------------------------------------------

TEST_CASE("the commutator is antisymmetric bilinear and sees the bracket") {
  const Model& A = full();
  int i1 = idx(A, {1}), i2 = idx(A, {2}), i3 = idx(A, {3}), i12 = idx(A, {1, 2});
  Cochain F = mono(1, 1, {i1}, i1, zpow(0, -1));
  Cochain G = mono(1, 1, {i2}, i2, zpow(0, -2));

  CHECK(all_orders_zero(commutator(A, F, F)));
  Cochain Z;
  Z.l = 1;
  Z.k = 1;
  CHECK(all_orders_zero(commutator(A, F, Z)));

  // L1 L2 = L12 but L2 L1 = L12 - L3, so the order-zero commutator keeps L3
  StarResult c = commutator(A, F, G, 0);
  Cochain want;
  want.l = 2;
  want.k = 2;
  want.add_term({i1, i2}, i12, zpow(0, -1) * zpow(1, -2));
  want.add_term({i2, i1}, i12, (zpow(0, -2) * zpow(1, -1)).scaled(-1));
  want.add_term({i2, i1}, i3, zpow(0, -2) * zpow(1, -1));
  CHECK(c.at(0) == want);

  // bilinearity, coefficient by coefficient
  Cochain H = mono(1, 1, {i3}, i1, zpow(0, -3));
  Cochain mixed = F.scaled(Rat(2)) + H.scaled(Rat(-3));
  StarResult lhs = commutator(A, mixed, G);
  StarResult cf = commutator(A, F, G);
  StarResult ch = commutator(A, H, G);
  for (const auto& [m, coeff] : lhs.coefficients)
    CHECK(coeff == cf.at(m).scaled(Rat(2)) + ch.at(m).scaled(Rat(-3)));
}

//--- identifications ------------------------------------------------------------

TEST_CASE("identification bookkeeping is validated") {
  const Model& A = full();
  int i1 = idx(A, {1}), i2 = idx(A, {2}), iu = idx(A, {});
  Cochain F = mono(2, 2, {i1, i2}, iu, zpow(0, -1) * zpow(1, -1));
  Cochain G = mono(1, 2, {i2}, iu, zpow(0, -2));

  Identifications same;
  same.merges.push_back({0, 0, 0, 1});
  CHECK_THROWS_AS(star(A, {F, G}, same), std::invalid_argument);

  Identifications range;
  range.merges.push_back({0, 1, 2, 0});
  CHECK_THROWS_AS(star(A, {F, G}, range), std::invalid_argument);

  Identifications offseam;
  offseam.merges.push_back({0, 0, 1, 0});
  CHECK_THROWS_AS(star(A, {F, G}, offseam), std::invalid_argument);

  Identifications twice;
  twice.merges.push_back({0, 1, 1, 0});
  twice.merges.push_back({0, 1, 1, 0});
  CHECK_THROWS_AS(star(A, {F, G}, twice), std::invalid_argument);
}

TEST_CASE("a seam identification fuses the shared slot") {
  const Model& A = full();
  int i1 = idx(A, {1}), i2 = idx(A, {2}), i3 = idx(A, {3}), iu = idx(A, {});
  int i12 = idx(A, {1, 2}), i33 = idx(A, {3, 3});
  Cochain F = mono(1, 2, {i1}, iu, zpow(0, -1));
  Cochain G = mono(1, 2, {i2}, iu, zpow(0, -2));

  Identifications ids;
  ids.merges.push_back({0, 0, 1, 0});
  ids.t = 1;
  StarResult r = star(A, {F, G}, ids, 3);
  CHECK(r.target_l == 1);
  CHECK(r.target_k == 3);
  CHECK(r.at(0) == mono(1, 3, {i12}, iu, zpow(0, -3)));
  CHECK(r.at(3) == mono(1, 3, {i12}, i33, zpow(0, -3).scaled(2)));

  // reversed factors scatter over both components of L2 L1 = L12 - L3
  Cochain F2 = mono(1, 2, {i2}, iu, zpow(0, -2));
  Cochain G2 = mono(1, 2, {i1}, iu, zpow(0, -1));
  StarResult s = star(A, {F2, G2}, ids, 0);
  Cochain want;
  want.l = 1;
  want.k = 3;
  want.add_term({i12}, iu, zpow(0, -3));
  want.add_term({i3}, iu, zpow(0, -3).scaled(-1));
  CHECK(s.at(0) == want);
}

//--- target membership ------------------------------------------------------------

TEST_CASE("disjoint products land in the additive bidegree") {
  const Model& A = full();
  int i1 = idx(A, {1}), i2 = idx(A, {2}), i3 = idx(A, {3}), iu = idx(A, {});
  Cochain F = mono(1, 2, {i1}, i1, zpow(0, -1));
  Cochain G = mono(1, 2, {i2}, i2, zpow(0, -2));

  StarResult r = star(A, {F, G}, {}, 0);
  const Cochain& p = r.at(0);
  REQUIRE(kg_constant(A, F).has_value());
  REQUIRE(kg_constant(A, G).has_value());
  REQUIRE(kg_constant(A, p).has_value());
  CHECK(*kg_constant(A, p) == *kg_constant(A, F) + *kg_constant(A, G));
  CHECK(check_pole(A, p).ok);
  CHECK(check_compose(A, p, p.k).ok);

  // a difference pole rides along within the additive margin
  Cochain P = mono(2, 1, {i1, i2}, iu, LaurentElem(1).with_pole("z1", "z2", 1));
  Cochain Q = mono(1, 2, {i3}, i3, zpow(0, -1));
  CHECK(check_compose(A, P, P.k).ok);
  StarResult rp = star(A, {P, Q}, {}, 0);
  CHECK(rp.at(0).l == 3);
  CHECK(check_pole(A, rp.at(0)).ok);
  CHECK(check_compose(A, rp.at(0), rp.at(0).k).ok);
}

//--- Leibniz law -----------------------------------------------------------------

TEST_CASE("the boundary acts as a graded derivation on star products") {
  const Model& A = full();
  int i1 = idx(A, {1}), i2 = idx(A, {2}), i3 = idx(A, {3}), iu = idx(A, {});

  // zero factors are silent
  Cochain Z;
  Z.l = 1;
  Z.k = 2;
  Cochain G1 = mono(1, 2, {i1}, i2, zpow(0, -1));
  LeibnizReport zr = leibniz_check(A, Z, G1);
  CHECK(zr.ok);
  CHECK(zr.residual.empty());

  // even branch: a constant factor
  Cochain C = mono(0, 2, {}, i1, LaurentElem(1));
  LeibnizReport cr = leibniz_check(A, C, G1);
  CHECK(cr.ok);
  CHECK(cr.residual.empty());

  // odd branch
  Cochain F = mono(1, 2, {i1}, i1, zpow(0, -1));
  Cochain G = mono(1, 2, {i2}, i2, zpow(0, -2));
  LeibnizReport fr = leibniz_check(A, F, G);
  CHECK(fr.ok);
  CHECK(fr.residual.empty());

  // pole-carrying values, two slots against one
  Cochain P = mono(2, 2, {i1, i2}, iu, LaurentElem(1).with_pole("z1", "z2", 1));
  Cochain Q = mono(1, 2, {i3}, i3, zpow(0, -1));
  LeibnizReport pr = leibniz_check(A, P, Q);
  CHECK(pr.ok);
  CHECK(pr.residual.empty());

  // spent margins cannot be differentiated
  Cochain S = mono(1, 0, {i1}, i1, zpow(0, -1));
  CHECK_THROWS_AS(leibniz_check(A, S, G), std::domain_error);
}

//--- measured bounds ---------------------------------------------------------------

TEST_CASE("measured norms meet the declared bound line") {
  const Model& A = full();
  int i1 = idx(A, {1}), iu = idx(A, {});

  // unit-like single factor at radius one sits exactly on the line
  Cochain F = mono(1, 1, {i1}, i1, LaurentElem(1));
  StarResult r = star(A, {F}, {}, -1, nullptr, {Rat(1)});
  BoundReport br = bound_check(A, r, {F});
  CHECK(br.ok);
  CHECK(br.max_r == Rat(1));
  CHECK(br.min_m == Rat(1));

  // pole monomials stay under the line at radius one
  Cochain F2 = mono(1, 1, {i1}, iu, zpow(0, -1));
  StarResult r2 = star(A, {F2, F2}, {}, -1, nullptr, {Rat(1), Rat(1)});
  BoundReport br2 = bound_check(A, r2, {F2, F2});
  CHECK(br2.ok);
  CHECK(br2.factor_norms.size() == 2);

  // an oversized constant product violates the declared line and says so
  Cochain big = mono(1, 1, {i1}, iu, LaurentElem(Rat(100)));
  StarResult rb = star(A, {big, big});
  BoundReport bb = bound_check(A, rb, {big, big});
  CHECK_FALSE(bb.ok);
  CHECK(!bb.detail.empty());
}

//--- result shape ------------------------------------------------------------------

TEST_CASE("star results declare their shape") {
  const Model& A = full();
  int i1 = idx(A, {1});
  Cochain F = mono(1, 1, {i1}, i1, zpow(0, -1));

  StarResult r = star(A, {F, F}, {}, 4);
  CHECK(r.lambda_max == 4);
  CHECK(r.radii == std::vector<Rat>{Rat(2), Rat(2)});
  CHECK(r.coefficients.size() == 5);
  int expect = 0;
  for (const auto& [m, c] : r.coefficients) {
    CHECK(m == expect++);
    CHECK(c.l == r.target_l);
    CHECK(c.k == r.target_k);
  }
  CHECK(r.ids.merges.empty());
  CHECK(r.ids.t == 0);
  CHECK_THROWS_AS(r.at(9), std::out_of_range);

  CHECK_THROWS_AS(star(A, {}), std::invalid_argument);
  CHECK_THROWS_AS(star(A, {F}, {}, -1, nullptr, {Rat(0)}), std::domain_error);
  CHECK_THROWS_AS(star(A, {F}, {}, -1, nullptr, {Rat(1), Rat(1)}), std::invalid_argument);
}
