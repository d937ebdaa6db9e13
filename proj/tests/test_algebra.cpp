#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "cosimp/graded_algebra.hpp"

using namespace cosimp;

namespace {

std::vector<std::string> basis_names(const Model& m) {
  std::vector<std::string> r;
  for (int i = 0; i < m.dim(); ++i) r.push_back(m.name_of(i));
  return r;
}

AlgElem random_elem(const Model& m, std::mt19937_64& rng, int nterms) {
  std::uniform_int_distribution<int> idx(0, m.dim() - 1);
  std::uniform_int_distribution<long> num(-5, 5);
  std::uniform_int_distribution<long> den(1, 3);
  AlgElem r;
  for (int t = 0; t < nterms; ++t) r = Model::add(r, {{idx(rng), rat(num(rng), den(rng))}});
  return r;
}

}  // namespace

TEST_CASE("basis enumeration matches the small fixed models") {
  {
    Model m(ModelParams{1, 2, 2, 2, 6});
    CHECK(basis_names(m) == std::vector<std::string>{"1", "L1", "L11"});
  }
  {
    Model m(ModelParams{2, 2, 2, 2, 6});
    CHECK(basis_names(m) == std::vector<std::string>{"1", "L1", "L2", "L11"});
  }
  {
    Model m(ModelParams{1, 0, 2, 2, 6});
    CHECK(basis_names(m) == std::vector<std::string>{"1"});
  }
}

TEST_CASE("default model basis is ordered by weight, length, lexicographic") {
  Model m{ModelParams{}};
  CHECK(m.dim() == 16);
  CHECK(basis_names(m) ==
        std::vector<std::string>{"1", "L1", "L2", "L11", "L3", "L12", "L111", "L13", "L22",
                                 "L112", "L23", "L113", "L122", "L33", "L123", "L222"});
  for (int i = 0; i + 1 < m.dim(); ++i) CHECK(m.weight_of(i) <= m.weight_of(i + 1));
}

TEST_CASE("products normal order through the bracket") {
  Model m{ModelParams{}};
  // L2 L1 = L1 L2 - L3
  AlgElem p = m.multiply(m.gen(2), m.gen(1));
  AlgElem expect = Model::add(m.from_word({1, 2}), Model::scale(m.from_word({3}), Rat(-1)));
  CHECK(p == expect);

  // L3 L1 and L3 L2 commute because the bracket lands above the generator cap.
  CHECK(m.multiply(m.gen(3), m.gen(1)) == m.from_word({1, 3}));
  CHECK(m.multiply(m.gen(3), m.gen(2)) == m.from_word({2, 3}));

  // Unit laws.
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    AlgElem a = random_elem(m, rng, 3);
    CHECK(m.multiply(m.unit(), a) == a);
    CHECK(m.multiply(a, m.unit()) == a);
  }
}

TEST_CASE("weight truncation kills overweight products") {
  Model m{ModelParams{}};
  AlgElem heavy = m.from_word({3, 3});  // weight 6
  CHECK(Model::is_zero(m.multiply(heavy, m.gen(1))));
  CHECK(Model::is_zero(m.multiply(m.gen(1), heavy)));
  // Length cap: a product of four generators has no length <= 3 expansion at
  // weight 4 except through brackets.
  AlgElem l1 = m.gen(1);
  AlgElem q = m.multiply(m.multiply(l1, l1), m.multiply(l1, l1));
  CHECK(Model::is_zero(q));
}

TEST_CASE("associativity holds on every basis triple") {
  Model m{ModelParams{}};
  for (int i = 0; i < m.dim(); ++i) {
    AlgElem a{{i, Rat(1)}};
    for (int j = 0; j < m.dim(); ++j) {
      AlgElem b{{j, Rat(1)}};
      for (int k = 0; k < m.dim(); ++k) {
        AlgElem c{{k, Rat(1)}};
        CHECK(m.multiply(m.multiply(a, b), c) == m.multiply(a, m.multiply(b, c)));
      }
    }
  }
}

TEST_CASE("grading is multiplicative below the cap") {
  Model m{ModelParams{}};
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) {
      AlgElem p = m.multiply(AlgElem{{i, Rat(1)}}, AlgElem{{j, Rat(1)}});
      int w = m.weight_of(i) + m.weight_of(j);
      for (const auto& [k, c] : p) CHECK(m.weight_of(k) == w);
    }
}

TEST_CASE("projection splits elements by weight") {
  Model m{ModelParams{}};
  std::mt19937_64 rng(23);
  AlgElem a = random_elem(m, rng, 8);
  AlgElem back;
  for (int w = 0; w <= m.params().weight_cap; ++w) back = Model::add(back, m.project(a, w));
  CHECK(back == a);
  auto parts = m.graded_parts(a);
  for (const auto& [w, part] : parts) CHECK(part == m.project(a, w));
}

TEST_CASE("translation generator acts as a derivation") {
  Model m{ModelParams{}};
  // T(L_i) = (i-1) L_{i+1}
  CHECK(Model::is_zero(m.apply_tg(m.gen(1))));
  CHECK(m.apply_tg(m.gen(2)) == m.gen(3));
  CHECK(Model::is_zero(m.apply_tg(m.gen(3))));
  CHECK(Model::is_zero(m.apply_tg(m.unit())));

  std::mt19937_64 rng(37);
  for (int t = 0; t < 15; ++t) {
    AlgElem a = random_elem(m, rng, 3);
    AlgElem b = random_elem(m, rng, 3);
    AlgElem lhs = m.apply_tg(m.multiply(a, b));
    AlgElem rhs = Model::add(m.multiply(m.apply_tg(a), b), m.multiply(a, m.apply_tg(b)));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("weight operator is raise at level zero") {
  Model m{ModelParams{}};
  for (int i = 0; i < m.dim(); ++i) {
    AlgElem a{{i, Rat(1)}};
    CHECK(m.raise(a, 0) == Model::scale(a, Rat(m.weight_of(i))));
  }
  // Level-2 raising on generators: L1 -> (1-2) L3 = -L3.
  CHECK(m.raise(m.gen(1), 2) == Model::scale(m.gen(3), Rat(-1)));
}

TEST_CASE("raising operators are derivations at every level") {
  Model m{ModelParams{}};
  std::mt19937_64 rng(41);
  for (int k = 0; k <= 3; ++k)
    for (int t = 0; t < 8; ++t) {
      AlgElem a = random_elem(m, rng, 3);
      AlgElem b = random_elem(m, rng, 3);
      AlgElem lhs = m.raise(m.multiply(a, b), k);
      AlgElem rhs = Model::add(m.multiply(m.raise(a, k), b), m.multiply(a, m.raise(b, k)));
      CHECK(lhs == rhs);
    }
}

TEST_CASE("pairing is orthonormal on the basis") {
  Model m{ModelParams{}};
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j)
      CHECK(m.pairing(AlgElem{{i, Rat(1)}}, AlgElem{{j, Rat(1)}}) == (i == j ? 1 : 0));
}

TEST_CASE("center matches a direct commutant scan") {
  Model m{ModelParams{}};
  auto central = m.center();
  // Independent check: an element is central iff it commutes with each basis
  // element; also verify the hand-enumerable members.
  for (const auto& z : central)
    for (int i = 0; i < m.dim(); ++i)
      CHECK(Model::is_zero(m.commutator(z, AlgElem{{i, Rat(1)}})));

  auto contains = [&](const Word& w) {
    int idx = m.index_of(w);
    for (const auto& z : central)
      if (z.size() == 1 && z.count(idx) && z.at(idx) == 1) return true;
    return false;
  };
  CHECK(contains(Word{}));
  CHECK(contains(Word{3}));
  CHECK(contains(Word{1, 1, 3}));
  CHECK(contains(Word{3, 3}));
  CHECK(contains(Word{1, 2, 3}));
  CHECK(contains(Word{2, 2, 2}));
  CHECK(central.size() == 6);

  // Exhaustive: solve nothing, scan the whole space by brute force over basis
  // sparse combinations is infeasible; instead verify non-members.
  for (const Word& w : {Word{1}, Word{2}, Word{1, 2}, Word{2, 3}, Word{1, 2, 2}}) {
    AlgElem e{{m.index_of(w), Rat(1)}};
    bool commutes = true;
    for (int g = 1; g <= 3; ++g)
      if (!Model::is_zero(m.commutator(e, m.gen(g)))) commutes = false;
    CHECK_FALSE(commutes);
  }
}

TEST_CASE("center slices are graded and consistent with the full center") {
  Model m{ModelParams{}};
  std::size_t total = 0;
  for (int w = 0; w <= m.max_weight(); ++w) {
    for (const auto& z : m.center_slice(w)) {
      ++total;
      for (const auto& [i, c] : z) CHECK(m.weight_of(i) == w);
    }
  }
  CHECK(total == m.center().size());
}

TEST_CASE("fault injected bracket breaks associativity") {
  ModelParams p{};
  // [L3, L2] += L2/2: the overlap L3 L2 L1 fails the rewriting diamond
  // because the injected target does not commute with L1.
  Model bad(p, 3, 2, rat(1, 2), 2);
  bool broken = false;
  for (int i = 0; i < bad.dim() && !broken; ++i)
    for (int j = 0; j < bad.dim() && !broken; ++j)
      for (int k = 0; k < bad.dim() && !broken; ++k) {
        AlgElem a{{i, Rat(1)}}, b{{j, Rat(1)}}, c{{k, Rat(1)}};
        if (bad.multiply(bad.multiply(a, b), c) != bad.multiply(a, bad.multiply(b, c)))
          broken = true;
      }
  CHECK(broken);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(Model(ModelParams{0, 6, 2, 3, 6}), std::invalid_argument);
  CHECK_THROWS_AS(Model(ModelParams{3, -1, 2, 3, 6}), std::invalid_argument);
  CHECK_THROWS_AS(Model(ModelParams{3, 6, -1, 3, 6}), std::invalid_argument);
  CHECK_THROWS_AS(Model(ModelParams{3, 6, 2, 0, 6}), std::invalid_argument);
  CHECK_NOTHROW(Model(ModelParams{1, 0, 2, 2, 6}));
}
