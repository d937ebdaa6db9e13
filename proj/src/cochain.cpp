#include "cosimp/cochain.hpp"

#include "cosimp/exact_linalg.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cosimp {

namespace {

const std::vector<std::pair<Axiom, const char*>>& axiom_table() {
  static const std::vector<std::pair<Axiom, const char*>> t = {
      {Axiom::KG, "KG"},
      {Axiom::TG, "TG"},
      {Axiom::SHUFFLE, "SHUFFLE"},
      {Axiom::POLE, "POLE"},
      {Axiom::COMPOSE, "COMPOSE"},
  };
  return t;
}

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

int perm_sign(const std::vector<int>& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

}  // namespace

//--- axiom sets -------------------------------------------------------------

AxiomSet default_axioms() {
  return {Axiom::KG, Axiom::SHUFFLE, Axiom::POLE, Axiom::COMPOSE};
}

std::string axioms_str(const AxiomSet& ax) {
  std::string out;
  for (const auto& [a, name] : axiom_table()) {
    if (!ax.count(a)) continue;
    if (!out.empty()) out += ",";
    out += name;
  }
  return out.empty() ? "NONE" : out;
}

AxiomSet parse_axioms(const std::string& s) {
  AxiomSet ax;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trimmed(tok);
    if (tok.empty() || tok == "NONE") continue;
    bool found = false;
    for (const auto& [a, name] : axiom_table())
      if (tok == name) {
        ax.insert(a);
        found = true;
        break;
      }
    if (!found) throw std::invalid_argument("unknown axiom name: " + tok);
  }
  return ax;
}

//--- cochains ---------------------------------------------------------------

std::string var_name(int slot) { return "z" + std::to_string(slot + 1); }

std::vector<std::string> slot_vars(int l) {
  std::vector<std::string> v;
  v.reserve(static_cast<std::size_t>(l));
  for (int j = 0; j < l; ++j) v.push_back(var_name(j));
  return v;
}

int tuple_weight(const Model& A, const Tuple& t) {
  int w = 0;
  for (int b : t) w += A.weight_of(b);
  return w;
}

std::string tuple_name(const Model& A, const Tuple& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += A.name_of(t[i]);
  }
  return s;
}

void Cochain::add_term(const Tuple& t, int out, const LaurentElem& v) {
  if (static_cast<int>(t.size()) != l)
    throw std::invalid_argument("tuple arity does not match cochain");
  if (v.is_zero()) return;
  auto& outs = table[t];
  auto it = outs.find(out);
  if (it == outs.end()) {
    outs.emplace(out, v);
    return;
  }
  it->second += v;
  if (it->second.is_zero()) {
    outs.erase(it);
    if (outs.empty()) table.erase(t);
  }
}

const LaurentElem* Cochain::value(const Tuple& t, int out) const {
  auto it = table.find(t);
  if (it == table.end()) return nullptr;
  auto jt = it->second.find(out);
  return jt == it->second.end() ? nullptr : &jt->second;
}

Cochain& Cochain::operator+=(const Cochain& o) {
  if (l != o.l) throw std::invalid_argument("cochain arity mismatch");
  for (const auto& [t, outs] : o.table)
    for (const auto& [u, v] : outs) add_term(t, u, v);
  return *this;
}

Cochain& Cochain::operator-=(const Cochain& o) {
  if (l != o.l) throw std::invalid_argument("cochain arity mismatch");
  for (const auto& [t, outs] : o.table)
    for (const auto& [u, v] : outs) add_term(t, u, -v);
  return *this;
}

Cochain Cochain::scaled(const Rat& c) const {
  Cochain r;
  r.l = l;
  r.k = k;
  if (c == 0) return r;
  for (const auto& [t, outs] : table)
    for (const auto& [u, v] : outs) r.table[t].emplace(u, v.scaled(c));
  return r;
}

bool Cochain::operator==(const Cochain& o) const { return l == o.l && table == o.table; }

std::string Cochain::str(const Model& A) const {
  std::ostringstream os;
  os << "cochain(l=" << l << ",k=" << k << ")";
  int shown = 0;
  for (const auto& [t, outs] : table)
    for (const auto& [u, v] : outs) {
      if (shown >= 6) {
        os << "\n  ... (" << support_size() << " tuples total)";
        return os.str();
      }
      os << "\n  (" << tuple_name(A, t) << ") -> " << A.name_of(u) << " : " << v.str();
      ++shown;
    }
  return os.str();
}

Cochain permute_args(const Cochain& F, const std::vector<int>& tau) {
  if (static_cast<int>(tau.size()) != F.l)
    throw std::invalid_argument("permutation size does not match arity");
  std::vector<bool> seen(tau.size(), false);
  for (int v : tau) {
    if (v < 0 || v >= F.l || seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("not a permutation");
    seen[static_cast<std::size_t>(v)] = true;
  }
  std::map<std::string, std::string> rn;
  for (int j = 0; j < F.l; ++j) rn[var_name(j)] = var_name(tau[static_cast<std::size_t>(j)]);
  Cochain r;
  r.l = F.l;
  r.k = F.k;
  for (const auto& [s, outs] : F.table) {
    Tuple t(static_cast<std::size_t>(F.l));
    for (int j = 0; j < F.l; ++j)
      t[static_cast<std::size_t>(tau[static_cast<std::size_t>(j)])] =
          s[static_cast<std::size_t>(j)];
    for (const auto& [u, v] : outs) r.add_term(t, u, v.renamed(rn));
  }
  return r;
}

std::vector<std::pair<std::vector<int>, int>> inverse_riffles(int l, int p) {
  if (p < 1 || p > l - 1) throw std::invalid_argument("riffle cut out of range");
  std::vector<std::pair<std::vector<int>, int>> out;
  std::vector<int> pick(static_cast<std::size_t>(p));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    std::vector<int> sigma(static_cast<std::size_t>(l));
    std::vector<bool> used(static_cast<std::size_t>(l), false);
    for (int i = 0; i < p; ++i) {
      sigma[static_cast<std::size_t>(i)] = pick[static_cast<std::size_t>(i)];
      used[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])] = true;
    }
    int pos = p;
    for (int v = 0; v < l; ++v)
      if (!used[static_cast<std::size_t>(v)]) sigma[static_cast<std::size_t>(pos++)] = v;
    std::vector<int> tau(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i)
      tau[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = i;
    out.push_back({tau, perm_sign(sigma)});
    int i = p - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == l - p + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < p; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

//--- axiom predicates ---------------------------------------------------------

int beta_bound(const Model& A, int wi, int wj) { return wi + wj + A.params().pole_shift; }

std::optional<Rat> kg_constant(const Model& A, const Cochain& F) {
  std::optional<Rat> c;
  for (const auto& [t, outs] : F.table) {
    int tw = tuple_weight(A, t);
    for (const auto& [u, v] : outs) {
      int base = A.weight_of(u) - tw;
      for (int d : v.term_degrees()) {
        Rat cand(d + base);
        if (!c)
          c = cand;
        else if (*c != cand)
          return std::nullopt;
      }
    }
  }
  if (!c) c = Rat(0);
  return c;
}

CheckReport check_KG(const Model& A, const Cochain& F) {
  std::optional<Rat> c;
  for (const auto& [t, outs] : F.table) {
    int tw = tuple_weight(A, t);
    for (const auto& [u, v] : outs) {
      int base = A.weight_of(u) - tw;
      for (int d : v.term_degrees()) {
        Rat cand(d + base);
        if (!c) c = cand;
        if (*c != cand)
          return {false, "mixed homogeneity at (" + tuple_name(A, t) + ") -> " + A.name_of(u) +
                             ": level " + rat_str(cand) + " vs " + rat_str(*c)};
      }
    }
  }
  if (c && *c != 0)
    return {false, "homogeneity constant " + rat_str(*c) + ", expected 0"};
  return {true, ""};
}

CheckReport check_TG(const Model& A, const Cochain& F) {
  // Reverse index of the raising derivation: target basis index -> sources.
  std::map<int, std::vector<std::pair<int, Rat>>> from_raise;
  for (int b = 0; b < A.dim(); ++b) {
    AlgElem e{{b, Rat(1)}};
    for (const auto& [v, cv] : A.raise(e, 1)) from_raise[v].push_back({b, cv});
  }
  Cochain diff;
  diff.l = F.l;
  diff.k = F.k;
  for (const auto& [t, outs] : F.table)
    for (const auto& [u, v] : outs)
      for (int i = 0; i < F.l; ++i) {
        diff.add_term(t, u, v.derivative(var_name(i)));
        auto it = from_raise.find(t[static_cast<std::size_t>(i)]);
        if (it == from_raise.end()) continue;
        for (const auto& [src, cv] : it->second) {
          Tuple s = t;
          s[static_cast<std::size_t>(i)] = src;
          diff.add_term(s, u, v.scaled(-cv));
        }
      }
  if (diff.is_zero()) return {true, ""};
  const auto& [t, outs] = *diff.table.begin();
  return {false, "derivative defect at (" + tuple_name(A, t) + ") -> " +
                     A.name_of(outs.begin()->first) + " : " + outs.begin()->second.str()};
}

CheckReport check_shuffle(const Model& A, const Cochain& F, int p) {
  if (F.l < 2) return {true, ""};
  Cochain acc;
  acc.l = F.l;
  acc.k = F.k;
  for (const auto& [tau, sg] : inverse_riffles(F.l, p))
    acc += permute_args(F, tau).scaled(Rat(sg));
  if (acc.is_zero()) return {true, ""};
  const auto& [t, outs] = *acc.table.begin();
  return {false, "riffle sum p=" + std::to_string(p) + " nonzero at (" + tuple_name(A, t) +
                     ") -> " + A.name_of(outs.begin()->first)};
}

CheckReport check_shuffle_all(const Model& A, const Cochain& F) {
  for (int p = 1; p <= F.l - 1; ++p) {
    auto r = check_shuffle(A, F, p);
    if (!r.ok) return r;
  }
  return {true, ""};
}

CheckReport check_pole(const Model& A, const Cochain& F) {
  auto vars = slot_vars(F.l);
  for (const auto& [t, outs] : F.table)
    for (const auto& [u, v] : outs)
      for (int i = 0; i < F.l; ++i)
        for (int j = i + 1; j < F.l; ++j) {
          int bound = beta_bound(A, A.weight_of(t[static_cast<std::size_t>(i)]),
                                 A.weight_of(t[static_cast<std::size_t>(j)]));
          int ord = v.pole_order(vars[static_cast<std::size_t>(i)],
                                 vars[static_cast<std::size_t>(j)]);
          if (ord > bound)
            return {false, "pole order " + std::to_string(ord) + " at (" + vars[i] + "," +
                               vars[j] + ") exceeds bound " + std::to_string(bound) + " on (" +
                               tuple_name(A, t) + ") -> " + A.name_of(u)};
        }
  return {true, ""};
}

CheckReport check_compose(const Model& A, const Cochain& F, int k) {
  if (k < 0) throw std::invalid_argument("negative composability index");
  auto vars = slot_vars(F.l);
  for (const auto& [t, outs] : F.table)
    for (const auto& [u, v] : outs)
      for (int i = 0; i < F.l; ++i)
        for (int j = i + 1; j < F.l; ++j) {
          int beta = beta_bound(A, A.weight_of(t[static_cast<std::size_t>(i)]),
                                A.weight_of(t[static_cast<std::size_t>(j)]));
          int bound = std::max(0, beta - k);
          int ord = v.pole_order(vars[static_cast<std::size_t>(i)],
                                 vars[static_cast<std::size_t>(j)]);
          if (ord > bound)
            return {false, "margin " + std::to_string(k) + " leaves bound " +
                               std::to_string(bound) + " at (" + vars[i] + "," + vars[j] +
                               "), order " + std::to_string(ord) + " on (" + tuple_name(A, t) +
                               ") -> " + A.name_of(u)};
        }
  return {true, ""};
}

//--- configuration cells ------------------------------------------------------

std::vector<int> frame_caps(const Model& A, const AxiomSet& ax, const Tuple& t) {
  int l = static_cast<int>(t.size());
  bool weighted = ax.count(Axiom::POLE) != 0 || ax.count(Axiom::COMPOSE) != 0;
  int uniform = 2 * A.params().weight_cap + A.params().pole_shift;
  std::vector<int> caps;
  caps.reserve(static_cast<std::size_t>(l) * static_cast<std::size_t>(l - 1) / 2);
  for (int i = 0; i < l; ++i)
    for (int j = i + 1; j < l; ++j)
      caps.push_back(weighted ? beta_bound(A, A.weight_of(t[static_cast<std::size_t>(i)]),
                                           A.weight_of(t[static_cast<std::size_t>(j)]))
                              : uniform);
  return caps;
}

int cap_at(const std::vector<int>& caps, int l, int i, int j) {
  return caps.at(static_cast<std::size_t>(i * (2 * l - i - 1) / 2 + (j - i - 1)));
}

long ComplexCell::coord_index(const Tuple& t, int out, const std::vector<int>& e) const {
  auto it = tuples_.find(t);
  if (it == tuples_.end()) return -1;
  auto jt = it->second.find({out, e});
  return jt == it->second.end() ? -1 : static_cast<long>(jt->second);
}

Cochain ComplexCell::to_cochain(const Model& A, const SparseVec& v) const {
  Cochain F;
  F.l = l;
  F.k = k;
  auto vars = slot_vars(l);
  std::map<std::pair<Tuple, int>, LaurentElem> nums;
  for (const auto& [idx, c] : v) {
    if (c == 0) continue;
    const FrameCoord& fc = frame_.at(idx);
    nums[{fc.t, fc.out}] += LaurentElem::monomial(vars, fc.e, c);
  }
  for (const auto& [key, num] : nums) {
    if (num.is_zero()) continue;
    auto caps = frame_caps(A, axioms, key.first);
    LaurentElem val = num;
    std::size_t pi = 0;
    for (int i = 0; i < l; ++i)
      for (int j = i + 1; j < l; ++j, ++pi)
        if (caps[pi] > 0)
          val = val.with_pole(vars[static_cast<std::size_t>(i)],
                              vars[static_cast<std::size_t>(j)], caps[pi]);
    F.add_term(key.first, key.second, val);
  }
  return F;
}

Cochain ComplexCell::basis_cochain(const Model& A, std::size_t i) const {
  return to_cochain(A, basis_.at(i));
}

std::optional<SparseVec> ComplexCell::to_coords(const Model& A, const Cochain& F) const {
  if (F.l != l) return std::nullopt;
  SparseVec out;
  auto vars = slot_vars(l);
  for (const auto& [t, outs] : F.table) {
    auto it = tuples_.find(t);
    if (it == tuples_.end()) return std::nullopt;
    auto caps = frame_caps(A, axioms, t);
    for (const auto& [u, v] : outs) {
      LaurentElem num = v;
      std::size_t pi = 0;
      for (int i = 0; i < l; ++i)
        for (int j = i + 1; j < l; ++j, ++pi)
          if (caps[pi] > 0)
            num = num.with_pole(vars[static_cast<std::size_t>(i)],
                                vars[static_cast<std::size_t>(j)], -caps[pi]);
      if (!num.poles().empty()) return std::nullopt;
      std::vector<int> slot_of(num.vars().size());
      for (std::size_t vi = 0; vi < num.vars().size(); ++vi) {
        auto pos = std::find(vars.begin(), vars.end(), num.vars()[vi]);
        if (pos == vars.end()) return std::nullopt;
        slot_of[vi] = static_cast<int>(pos - vars.begin());
      }
      for (const auto& [exp, c] : num.terms()) {
        std::vector<int> e(static_cast<std::size_t>(l), 0);
        for (std::size_t vi = 0; vi < exp.size(); ++vi)
          e[static_cast<std::size_t>(slot_of[vi])] = exp[vi];
        auto jt = it->second.find({u, e});
        if (jt == it->second.end()) return std::nullopt;
        out[jt->second] = c;
      }
    }
  }
  return out;
}

void ComplexCell::set_basis(std::vector<SparseVec> b, std::vector<int> chi) {
  if (b.size() != chi.size()) throw std::invalid_argument("basis and sector lists differ");
  basis_ = std::move(b);
  chi_ = std::move(chi);
  pivots_.clear();
}

std::vector<FrameCoord> block_coords(const Model& A, int l, int k, const AxiomSet& ax,
                                     const Tuple& sorted_t, int out) {
  (void)k;
  if (l <= 0 || static_cast<int>(sorted_t.size()) != l)
    throw std::invalid_argument("block tuple length mismatch");
  if (!std::is_sorted(sorted_t.begin(), sorted_t.end()))
    throw std::invalid_argument("block tuple must be sorted");

  const int E = A.params().window;
  const bool use_kg = ax.count(Axiom::KG) != 0;
  std::vector<FrameCoord> coords;

  Tuple t = sorted_t;
  do {
    auto caps = frame_caps(A, ax, t);
    int capsum = 0;
    for (int c : caps) capsum += c;

    std::vector<int> e(static_cast<std::size_t>(l));
    if (use_kg) {
      int target = capsum + tuple_weight(A, t) - A.weight_of(out);
      if (target < -l * E || target > l * E) continue;
      std::function<void(int, int)> rec = [&](int slot, int rem) {
        if (slot == l - 1) {
          if (rem < -E || rem > E) return;
          e[static_cast<std::size_t>(slot)] = rem;
          coords.push_back({t, out, e});
          return;
        }
        int tail = l - 1 - slot;
        int lo = std::max(-E, rem - tail * E);
        int hi = std::min(E, rem + tail * E);
        for (int v = lo; v <= hi; ++v) {
          e[static_cast<std::size_t>(slot)] = v;
          rec(slot + 1, rem - v);
        }
      };
      rec(0, target);
    } else {
      e.assign(static_cast<std::size_t>(l), -E);
      while (true) {
        coords.push_back({t, out, e});
        int pos = l - 1;
        while (pos >= 0 && e[static_cast<std::size_t>(pos)] == E) {
          e[static_cast<std::size_t>(pos)] = -E;
          --pos;
        }
        if (pos < 0) break;
        ++e[static_cast<std::size_t>(pos)];
      }
    }
  } while (std::next_permutation(t.begin(), t.end()));
  return coords;
}

SparseMat block_rows(const Model& A, int l, int k, const AxiomSet& ax,
                     const std::vector<FrameCoord>& coords) {
  SparseMat rows(0, coords.size());
  const bool use_sh = ax.count(Axiom::SHUFFLE) != 0 && l >= 2;
  const bool use_comp = ax.count(Axiom::COMPOSE) != 0 && k >= 1 && l >= 2;
  if (!use_sh && !use_comp) return rows;

  std::map<std::pair<Tuple, std::vector<int>>, std::size_t> local;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    if (static_cast<int>(coords[j].t.size()) != l || coords[j].out != coords[0].out)
      throw std::invalid_argument("block coordinates disagree");
    local[{coords[j].t, coords[j].e}] = j;
  }

  if (use_comp) {
    std::map<Tuple, std::vector<std::size_t>> per_tuple;
    for (std::size_t g = 0; g < coords.size(); ++g) per_tuple[coords[g].t].push_back(g);
    for (const auto& [tt, members] : per_tuple) {
      auto caps = frame_caps(A, ax, tt);
      std::size_t pi = 0;
      for (int i = 0; i < l; ++i)
        for (int j = i + 1; j < l; ++j, ++pi) {
          int need = std::min(caps[pi], k);
          for (int m = 0; m < need; ++m) {
            std::map<std::vector<int>, std::map<std::size_t, Rat>> acc;
            for (auto g : members) {
              const auto& ge = coords[g].e;
              Rat b = rat_binom(ge[static_cast<std::size_t>(i)], static_cast<unsigned long>(m));
              if (b == 0) continue;
              std::vector<int> red;
              red.reserve(static_cast<std::size_t>(l - 1));
              for (int s = 0; s < l; ++s) {
                if (s == i) continue;
                red.push_back(s == j ? ge[static_cast<std::size_t>(j)] +
                                           ge[static_cast<std::size_t>(i)] - m
                                     : ge[static_cast<std::size_t>(s)]);
              }
              acc[red][g] = b;
            }
            for (auto& [red, row] : acc)
              if (!row.empty()) rows.append_row(row);
          }
        }
    }
  }

  if (use_sh) {
    std::vector<std::vector<std::pair<std::vector<int>, int>>> riffles;
    for (int p = 1; p <= l - 1; ++p) riffles.push_back(inverse_riffles(l, p));
    for (std::size_t g = 0; g < coords.size(); ++g) {
      const auto& fc = coords[g];
      for (const auto& rifs : riffles) {
        std::map<std::size_t, Rat> row;
        for (const auto& [tau, sg] : rifs) {
          Tuple s(static_cast<std::size_t>(l));
          std::vector<int> ee(static_cast<std::size_t>(l));
          for (int j = 0; j < l; ++j) {
            s[static_cast<std::size_t>(j)] = fc.t[static_cast<std::size_t>(tau[j])];
            ee[static_cast<std::size_t>(j)] = fc.e[static_cast<std::size_t>(tau[j])];
          }
          auto scaps = frame_caps(A, ax, s);
          long flip = 0;
          std::size_t pi = 0;
          for (int i = 0; i < l; ++i)
            for (int j = i + 1; j < l; ++j, ++pi)
              if (tau[static_cast<std::size_t>(i)] > tau[static_cast<std::size_t>(j)])
                flip += scaps[pi];
          Rat coef(flip % 2 == 0 ? sg : -sg);
          auto lt = local.find({s, ee});
          if (lt == local.end()) throw std::logic_error("riffle image escaped its block");
          row[lt->second] += coef;
        }
        for (auto it = row.begin(); it != row.end();)
          it = it->second == 0 ? row.erase(it) : std::next(it);
        if (!row.empty()) rows.append_row(row);
      }
    }
  }
  return rows;
}

ComplexCell build_cell_basis(const Model& A, int l, int k, const AxiomSet& ax) {
  if (l < 0) throw std::invalid_argument("negative slot count");
  if (k < 0) throw std::invalid_argument("negative composability index");
  if (ax.count(Axiom::TG))
    throw std::invalid_argument("TG is a reported diagnostic, not a cell constraint");

  ComplexCell cell;
  cell.l = l;
  cell.k = k;
  cell.axioms = ax;

  const int dim = A.dim();
  if (l == 0) {
    for (int u = 0; u < dim; ++u) {
      cell.tuples_[Tuple{}][{u, {}}] = cell.frame_.size();
      cell.frame_.push_back({Tuple{}, u, {}});
      SparseVec v;
      v[static_cast<std::size_t>(u)] = 1;
      cell.basis_.push_back(std::move(v));
      cell.chi_.push_back(-A.weight_of(u));
      cell.pivots_.push_back(static_cast<std::size_t>(u));
    }
    return cell;
  }

  const int E = A.params().window;
  const bool use_kg = ax.count(Axiom::KG) != 0;
  const bool use_sh = ax.count(Axiom::SHUFFLE) != 0 && l >= 2;
  const bool use_comp = ax.count(Axiom::COMPOSE) != 0 && k >= 1 && l >= 2;
  const std::size_t guard = 1500000;

  // Count coordinates before allocating anything.
  std::vector<std::vector<std::size_t>> sumcnt(static_cast<std::size_t>(l) + 1);
  sumcnt[0] = {1};
  for (int s = 1; s <= l; ++s) {
    sumcnt[static_cast<std::size_t>(s)].assign(static_cast<std::size_t>(2 * s * E + 1), 0);
    for (std::size_t x = 0; x < sumcnt[static_cast<std::size_t>(s)].size(); ++x)
      for (int d = 0; d <= 2 * E; ++d) {
        long prev = static_cast<long>(x) - d;
        if (prev < 0 || prev >= static_cast<long>(sumcnt[static_cast<std::size_t>(s - 1)].size()))
          continue;
        sumcnt[static_cast<std::size_t>(s)][x] +=
            sumcnt[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(prev)];
      }
  }
  std::size_t full_window = 1;
  for (int s = 0; s < l; ++s) full_window *= static_cast<std::size_t>(2 * E + 1);

  std::size_t total = 0;
  Tuple t(static_cast<std::size_t>(l), 0);
  while (true) {
    auto caps = frame_caps(A, ax, t);
    int capsum = 0;
    for (int c : caps) capsum += c;
    int w = tuple_weight(A, t);
    for (int u = 0; u < dim; ++u) {
      if (use_kg) {
        int target = capsum + w - A.weight_of(u);
        if (target < -l * E || target > l * E) continue;
        total += sumcnt[static_cast<std::size_t>(l)][static_cast<std::size_t>(target + l * E)];
      } else {
        total += full_window;
      }
    }
    int pos = l - 1;
    while (pos >= 0 && t[static_cast<std::size_t>(pos)] == dim - 1) {
      t[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++t[static_cast<std::size_t>(pos)];
  }
  if (total > guard)
    throw std::length_error("monomial frame needs " + std::to_string(total) +
                            " coordinates, guard is " + std::to_string(guard));
  cell.frame_.reserve(total);

  auto emit = [&](const Tuple& tt, int uu, const std::vector<int>& ee) {
    cell.tuples_[tt][{uu, ee}] = cell.frame_.size();
    cell.frame_.push_back({tt, uu, ee});
  };

  std::vector<int> e(static_cast<std::size_t>(l));
  std::function<void(const Tuple&, int, int, int)> emit_sum = [&](const Tuple& tt, int uu,
                                                                  int slot, int rem) {
    if (slot == l - 1) {
      if (rem < -E || rem > E) return;
      e[static_cast<std::size_t>(slot)] = rem;
      emit(tt, uu, e);
      return;
    }
    int tail = l - 1 - slot;
    int lo = std::max(-E, rem - tail * E);
    int hi = std::min(E, rem + tail * E);
    for (int v = lo; v <= hi; ++v) {
      e[static_cast<std::size_t>(slot)] = v;
      emit_sum(tt, uu, slot + 1, rem - v);
    }
  };

  t.assign(static_cast<std::size_t>(l), 0);
  while (true) {
    auto caps = frame_caps(A, ax, t);
    int capsum = 0;
    for (int c : caps) capsum += c;
    int w = tuple_weight(A, t);
    for (int u = 0; u < dim; ++u) {
      if (use_kg) {
        int target = capsum + w - A.weight_of(u);
        if (target < -l * E || target > l * E) continue;
        emit_sum(t, u, 0, target);
      } else {
        e.assign(static_cast<std::size_t>(l), -E);
        while (true) {
          emit(t, u, e);
          int pos = l - 1;
          while (pos >= 0 && e[static_cast<std::size_t>(pos)] == E) {
            e[static_cast<std::size_t>(pos)] = -E;
            --pos;
          }
          if (pos < 0) break;
          ++e[static_cast<std::size_t>(pos)];
        }
      }
    }
    int pos = l - 1;
    while (pos >= 0 && t[static_cast<std::size_t>(pos)] == dim - 1) {
      t[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++t[static_cast<std::size_t>(pos)];
  }

  if (!use_sh && !use_comp) {
    for (std::size_t i = 0; i < cell.frame_.size(); ++i) {
      SparseVec v;
      v[i] = 1;
      cell.basis_.push_back(std::move(v));
      const auto& fc = cell.frame_[i];
      cell.chi_.push_back(tuple_weight(A, fc.t) - A.weight_of(fc.out));
      cell.pivots_.push_back(i);
    }
    return cell;
  }

  // Constraint rows couple coordinates only within one (multiset, out) block.
  std::map<std::pair<Tuple, int>, std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < cell.frame_.size(); ++i) {
    Tuple key = cell.frame_[i].t;
    std::sort(key.begin(), key.end());
    blocks[{key, cell.frame_[i].out}].push_back(i);
  }

  for (const auto& [key, cols] : blocks) {
    std::vector<FrameCoord> coords;
    coords.reserve(cols.size());
    for (auto g : cols) coords.push_back(cell.frame_[g]);
    SparseMat rows = block_rows(A, l, k, ax, coords);

    std::vector<std::size_t> freec;
    auto null = nullspace(rows, &freec);
    int chi = tuple_weight(A, key.first) - A.weight_of(key.second);
    for (std::size_t nvi = 0; nvi < null.size(); ++nvi) {
      SparseVec gvec;
      for (const auto& [lc, val] : null[nvi]) gvec[cols[lc]] = val;
      cell.basis_.push_back(std::move(gvec));
      cell.chi_.push_back(chi);
      cell.pivots_.push_back(cols[freec[nvi]]);
    }
  }
  return cell;
}

bool cell_contains(const Model& A, const ComplexCell& cell, const Cochain& F,
                   std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  if (F.l != cell.l) return fail("arity mismatch");
  if (!cell.to_coords(A, F)) return fail("outside the monomial frame");
  if (cell.l == 0) {
    // The zero-slot cell is the whole algebra; no value-level predicate cuts it.
    if (why) why->clear();
    return true;
  }
  if (cell.axioms.count(Axiom::KG)) {
    auto r = check_KG(A, F);
    if (!r.ok) return fail("KG: " + r.detail);
  }
  if (cell.axioms.count(Axiom::TG)) {
    auto r = check_TG(A, F);
    if (!r.ok) return fail("TG: " + r.detail);
  }
  if (cell.axioms.count(Axiom::SHUFFLE)) {
    auto r = check_shuffle_all(A, F);
    if (!r.ok) return fail("SHUFFLE: " + r.detail);
  }
  if (cell.axioms.count(Axiom::POLE)) {
    auto r = check_pole(A, F);
    if (!r.ok) return fail("POLE: " + r.detail);
  }
  if (cell.axioms.count(Axiom::COMPOSE)) {
    auto r = check_compose(A, F, cell.k);
    if (!r.ok) return fail("COMPOSE: " + r.detail);
  }
  if (why) why->clear();
  return true;
}

Cochain random_cochain(const Model& A, const ComplexCell& cell, std::uint64_t seed) {
  if (cell.dim() == 0) throw std::domain_error("zero-dimensional cell");
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
  std::size_t picks = std::min<std::size_t>(cell.dim(), 24);
  std::set<std::size_t> chosen;
  while (chosen.size() < picks)
    chosen.insert(static_cast<std::size_t>(rng() % cell.dim()));
  SparseVec acc;
  for (std::size_t idx : chosen) {
    long num = static_cast<long>(rng() % 19) - 9;
    if (num == 0) num = 5;
    long den = 1 + static_cast<long>(rng() % 3);
    Rat c = rat(num, den);
    for (const auto& [ci, cv] : cell.basis()[idx]) {
      acc[ci] += c * cv;
      if (acc[ci] == 0) acc.erase(ci);
    }
  }
  return cell.to_cochain(A, acc);
}

}  // namespace cosimp
