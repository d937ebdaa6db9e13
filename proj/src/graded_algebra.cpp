#include "cosimp/graded_algebra.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "cosimp/exact_linalg.hpp"

namespace cosimp {

void ModelParams::validate() const {
  if (gen_max < 1) throw std::invalid_argument("gen_max must be >= 1");
  if (weight_cap < 0) throw std::invalid_argument("weight_cap must be >= 0");
  if (len_max < 1) throw std::invalid_argument("len_max must be >= 1");
  if (pole_shift < 0) throw std::invalid_argument("pole_shift must be >= 0");
  if (window < 0) throw std::invalid_argument("window must be >= 0");
}

int word_weight(const Word& w) {
  int s = 0;
  for (int i : w) s += i;
  return s;
}

std::string word_name(const Word& w) {
  if (w.empty()) return "1";
  std::string s = "L";
  for (int i : w) s += std::to_string(i);
  return s;
}

Model::Model(const ModelParams& p) : params_(p) {
  params_.validate();
  build();
}

Model::Model(const ModelParams& p, int tweak_i, int tweak_j, const Rat& tweak_delta,
             int tweak_target)
    : params_(p),
      tweaked_(true),
      tweak_i_(tweak_i),
      tweak_j_(tweak_j),
      tweak_target_(tweak_target),
      tweak_delta_(tweak_delta) {
  params_.validate();
  build();
}

int Model::index_of(const Word& w) const {
  auto it = index_.find(w);
  return it == index_.end() ? -1 : it->second;
}

AlgElem Model::unit() const { return {{index_of(Word{}), Rat(1)}}; }

AlgElem Model::gen(int i) const {
  int idx = index_of(Word{i});
  if (idx < 0) throw std::out_of_range("generator outside truncation");
  return {{idx, Rat(1)}};
}

AlgElem Model::from_word(const Word& w) const {
  std::map<Word, AlgElem> memo;
  return normal_order(w, memo);
}

bool Model::is_zero(const AlgElem& a) {
  for (const auto& [i, c] : a)
    if (c != 0) return false;
  return true;
}

AlgElem Model::add(const AlgElem& a, const AlgElem& b) {
  AlgElem r = a;
  for (const auto& [i, c] : b) {
    Rat& v = r[i];
    v += c;
    if (v == 0) r.erase(i);
  }
  return r;
}

AlgElem Model::scale(const AlgElem& a, const Rat& c) {
  AlgElem r;
  if (c == 0) return r;
  for (const auto& [i, v] : a) r[i] = v * c;
  return r;
}

AlgElem Model::multiply(const AlgElem& a, const AlgElem& b) const {
  AlgElem r;
  for (const auto& [i, ca] : a) {
    for (const auto& [j, cb] : b) {
      const AlgElem& pij = products_[static_cast<size_t>(i)][static_cast<size_t>(j)];
      Rat c = ca * cb;
      for (const auto& [k, v] : pij) {
        Rat& acc = r[k];
        acc += c * v;
        if (acc == 0) r.erase(k);
      }
    }
  }
  return r;
}

AlgElem Model::project(const AlgElem& a, int m) const {
  AlgElem r;
  for (const auto& [i, c] : a)
    if (weight_of(i) == m) r[i] = c;
  return r;
}

std::map<int, AlgElem> Model::graded_parts(const AlgElem& a) const {
  std::map<int, AlgElem> r;
  for (const auto& [i, c] : a) r[weight_of(i)][i] = c;
  return r;
}

AlgElem Model::commutator(const AlgElem& a, const AlgElem& b) const {
  return add(multiply(a, b), scale(multiply(b, a), Rat(-1)));
}

AlgElem Model::raise(const AlgElem& a, int k) const {
  if (k < 0 || k >= static_cast<int>(raised_.size()))
    return {};
  AlgElem r;
  for (const auto& [i, c] : a) {
    for (const auto& [j, v] : raised_[static_cast<size_t>(k)][static_cast<size_t>(i)]) {
      Rat& acc = r[j];
      acc += c * v;
      if (acc == 0) r.erase(j);
    }
  }
  return r;
}

Rat Model::pairing(const AlgElem& a, const AlgElem& b) const {
  Rat s = 0;
  for (const auto& [i, c] : a) {
    auto it = b.find(i);
    if (it != b.end()) s += c * it->second;
  }
  return s;
}

const std::vector<AlgElem>& Model::center_slice(int m) const {
  static const std::vector<AlgElem> empty;
  if (m < 0 || m >= static_cast<int>(center_slices_.size())) return empty;
  return center_slices_[static_cast<size_t>(m)];
}

std::vector<AlgElem> Model::center() const {
  std::vector<AlgElem> r;
  for (const auto& slice : center_slices_)
    for (const auto& v : slice) r.push_back(v);
  return r;
}

std::string Model::str(const AlgElem& a) const {
  if (a.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [i, c] : a) {
    if (!first) os << " + ";
    first = false;
    os << rat_str(c) << "*" << name_of(i);
  }
  return os.str();
}

//--- construction --------------------------------------------------------

namespace {

void enumerate_words(int gen_max, int weight_cap, int len_max, int min_gen, Word& cur,
                     std::vector<Word>& out) {
  out.push_back(cur);
  if (static_cast<int>(cur.size()) == len_max) return;
  int used = word_weight(cur);
  for (int g = min_gen; g <= gen_max && used + g <= weight_cap; ++g) {
    cur.push_back(g);
    enumerate_words(gen_max, weight_cap, len_max, g, cur, out);
    cur.pop_back();
  }
}

}  // namespace

void Model::build() {
  Word cur;
  enumerate_words(params_.gen_max, params_.weight_cap, params_.len_max, 1, cur, basis_);
  std::sort(basis_.begin(), basis_.end(), [](const Word& a, const Word& b) {
    int wa = word_weight(a), wb = word_weight(b);
    if (wa != wb) return wa < wb;
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  for (size_t i = 0; i < basis_.size(); ++i) {
    index_[basis_[i]] = static_cast<int>(i);
    weights_.push_back(word_weight(basis_[i]));
  }

  std::map<Word, AlgElem> memo;
  size_t n = basis_.size();
  products_.assign(n, std::vector<AlgElem>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      Word w = basis_[i];
      w.insert(w.end(), basis_[j].begin(), basis_[j].end());
      products_[i][j] = normal_order(w, memo);
    }
  }

  raised_.assign(static_cast<size_t>(params_.weight_cap) + 1, std::vector<AlgElem>(n));
  for (int k = 0; k <= params_.weight_cap; ++k) {
    for (size_t i = 0; i < n; ++i) {
      AlgElem acc;
      const Word& w = basis_[i];
      for (size_t s = 0; s < w.size(); ++s) {
        Rat coeff(w[s] - k);
        if (coeff == 0) continue;
        if (w[s] + k > params_.gen_max) continue;
        Word rep = w;
        rep[s] += k;
        acc = add(acc, scale(normal_order(rep, memo), coeff));
      }
      raised_[static_cast<size_t>(k)][i] = acc;
    }
  }

  // Center slices: nullspace of the stacked commutator maps with the
  // generators, restricted to each weight slice.
  center_slices_.assign(static_cast<size_t>(params_.weight_cap) + 1, {});
  for (int m = 0; m <= params_.weight_cap; ++m) {
    std::vector<int> slice;
    for (size_t i = 0; i < n; ++i)
      if (weights_[i] == m) slice.push_back(static_cast<int>(i));
    if (slice.empty()) continue;
    SparseMat mat(n * static_cast<size_t>(params_.gen_max), slice.size());
    for (int g = 1; g <= params_.gen_max; ++g) {
      int gi = index_of(Word{g});
      if (gi < 0) continue;
      AlgElem lg{{gi, Rat(1)}};
      size_t row_base = n * static_cast<size_t>(g - 1);
      for (size_t c = 0; c < slice.size(); ++c) {
        AlgElem e{{slice[c], Rat(1)}};
        AlgElem com = commutator(e, lg);
        for (const auto& [k, v] : com) mat.add(row_base + static_cast<size_t>(k), c, v);
      }
    }
    for (const auto& vec : nullspace(mat)) {
      AlgElem z;
      for (const auto& [c, v] : vec) z[slice[c]] = v;
      center_slices_[static_cast<size_t>(m)].push_back(z);
    }
  }
}

AlgElem Model::normal_order(const Word& w, std::map<Word, AlgElem>& memo) const {
  if (word_weight(w) > params_.weight_cap) return {};
  auto it = memo.find(w);
  if (it != memo.end()) return it->second;

  size_t swap_at = w.size();
  for (size_t s = 0; s + 1 < w.size(); ++s) {
    if (w[s] > w[s + 1]) {
      swap_at = s;
      break;
    }
  }

  AlgElem result;
  if (swap_at == w.size()) {
    if (static_cast<int>(w.size()) <= params_.len_max) {
      auto idx = index_.find(w);
      if (idx == index_.end()) throw std::logic_error("normal word missing from basis");
      result[idx->second] = Rat(1);
    }
  } else {
    Word swapped = w;
    std::swap(swapped[swap_at], swapped[swap_at + 1]);
    result = normal_order(swapped, memo);

    int i = w[swap_at], j = w[swap_at + 1];
    auto bracket_part = [&](int target, const Rat& coeff) {
      if (coeff == 0 || target > params_.gen_max || target < 1) return;
      Word fused;
      fused.reserve(w.size() - 1);
      fused.insert(fused.end(), w.begin(), w.begin() + static_cast<long>(swap_at));
      fused.push_back(target);
      fused.insert(fused.end(), w.begin() + static_cast<long>(swap_at) + 2, w.end());
      result = add(result, scale(normal_order(fused, memo), coeff));
    };
    bracket_part(i + j, Rat(j - i));
    if (tweaked_ && i == tweak_i_ && j == tweak_j_) bracket_part(tweak_target_, tweak_delta_);
  }
  memo[w] = result;
  return result;
}

}  // namespace cosimp
