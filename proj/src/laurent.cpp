#include "cosimp/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace cosimp {

bool var_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    std::size_t p = s.size();
    while (p > 0 && std::isdigit((unsigned char)s[p - 1])) --p;
    long num = -1;
    if (p < s.size() && s.size() - p <= 9) num = std::stol(s.substr(p));
    return std::pair<std::string, long>(s.substr(0, p), num);
  };
  auto [sa, na] = split(a);
  auto [sb, nb] = split(b);
  if (sa != sb) return sa < sb;
  if (na != nb) return na < nb;
  return a < b;
}

namespace {

void add_term(std::map<LaurentElem::Exp, Rat>& m, const LaurentElem::Exp& e, const Rat& c) {
  if (c == 0) return;
  auto it = m.find(e);
  if (it == m.end()) {
    m.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second == 0) m.erase(it);
}

Rat rat_pow(const Rat& b, int e) {
  if (e == 0) return Rat(1);
  if (b == 0) throw std::domain_error("zero base with negative exponent");
  Rat acc(1), base = e > 0 ? b : Rat(1 / b);
  for (int k = std::abs(e); k > 0; --k) acc *= base;
  return acc;
}

}  // namespace

LaurentElem::LaurentElem(const Rat& c) {
  if (c != 0) terms_.emplace(Exp{}, c);
}

LaurentElem::LaurentElem(long c) {
  if (c != 0) terms_.emplace(Exp{}, Rat(c));
}

LaurentElem LaurentElem::monomial(const std::vector<std::string>& vars, const Exp& exps,
                                  const Rat& coeff) {
  if (vars.size() != exps.size()) throw std::invalid_argument("monomial: size mismatch");
  LaurentElem r;
  if (coeff == 0) return r;
  std::vector<std::size_t> order(vars.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return var_less(vars[x], vars[y]); });
  Exp e(vars.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    r.vars_.push_back(vars[order[k]]);
    e[k] = exps[order[k]];
  }
  for (std::size_t k = 1; k < r.vars_.size(); ++k)
    if (r.vars_[k] == r.vars_[k - 1]) throw std::invalid_argument("monomial: duplicate variable");
  r.terms_.emplace(e, coeff);
  r.prune_vars();
  return r;
}

LaurentElem LaurentElem::variable(const std::string& name, int power) {
  return monomial({name}, {power}, Rat(1));
}

bool LaurentElem::is_constant() const { return vars_.empty(); }

Rat LaurentElem::constant_value() const {
  if (!is_constant()) throw std::domain_error("constant_value on non-constant element");
  return terms_.empty() ? Rat(0) : terms_.begin()->second;
}

int LaurentElem::var_index(const std::string& name) const {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), name, var_less);
  if (it == vars_.end() || *it != name) return -1;
  return (int)(it - vars_.begin());
}

void LaurentElem::prune_vars() {
  if (terms_.empty()) {
    vars_.clear();
    poles_.clear();
    return;
  }
  std::vector<bool> used(vars_.size(), false);
  for (auto& [e, c] : terms_)
    for (std::size_t k = 0; k < e.size(); ++k)
      if (e[k] != 0) used[k] = true;
  for (auto& [pk, o] : poles_) {
    used[pk.first] = true;
    used[pk.second] = true;
  }
  if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) return;

  std::vector<int> newpos(vars_.size(), -1);
  std::vector<std::string> nv;
  for (std::size_t k = 0; k < vars_.size(); ++k)
    if (used[k]) {
      newpos[k] = (int)nv.size();
      nv.push_back(vars_[k]);
    }
  std::map<Exp, Rat> nt;
  for (auto& [e, c] : terms_) {
    Exp ne(nv.size(), 0);
    for (std::size_t k = 0; k < e.size(); ++k)
      if (newpos[k] >= 0) ne[newpos[k]] = e[k];
    nt.emplace(std::move(ne), c);
  }
  std::map<PoleKey, int> np;
  for (auto& [pk, o] : poles_) np[{newpos[pk.first], newpos[pk.second]}] = o;
  vars_ = std::move(nv);
  terms_ = std::move(nt);
  poles_ = std::move(np);
}

std::optional<std::map<LaurentElem::Exp, Rat>> LaurentElem::try_divide_diff(int i, int j) const {
  int mi = 0, mj = 0;
  for (auto& [e, c] : terms_) {
    mi = std::min(mi, e[i]);
    mj = std::min(mj, e[j]);
  }
  // Slices of the shifted polynomial by the z_i exponent.
  std::map<int, std::map<Exp, Rat>> slices;
  for (auto& [e, c] : terms_) {
    Exp r = e;
    int k = r[i] - mi;
    r[i] = 0;
    r[j] -= mj;
    slices[k].emplace(std::move(r), c);
  }
  int d = slices.rbegin()->first;
  if (d == 0) return std::nullopt;

  auto shift_j = [&](const std::map<Exp, Rat>& m) {
    std::map<Exp, Rat> out;
    for (auto& [e, c] : m) {
      Exp ne = e;
      ++ne[j];
      out.emplace(std::move(ne), c);
    }
    return out;
  };
  auto slice_at = [&](int k) -> std::map<Exp, Rat> {
    auto it = slices.find(k);
    return it == slices.end() ? std::map<Exp, Rat>{} : it->second;
  };

  // Horner division of sum_k A_k z_i^k by (z_i - z_j).
  std::map<Exp, Rat> b = slice_at(d);
  std::map<Exp, Rat> quotient;
  for (int k = d; k >= 1; --k) {
    for (auto& [e, c] : b) {
      Exp qe = e;
      qe[i] = (k - 1) + mi;
      qe[j] += mj;
      add_term(quotient, qe, c);
    }
    if (k > 1) {
      std::map<Exp, Rat> nb = slice_at(k - 1);
      for (auto& [e, c] : shift_j(b)) add_term(nb, e, c);
      b = std::move(nb);
    }
  }
  std::map<Exp, Rat> rem = slice_at(0);
  for (auto& [e, c] : shift_j(b)) add_term(rem, e, c);
  if (!rem.empty()) return std::nullopt;
  return quotient;
}

void LaurentElem::canonicalize() {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = (it->second == 0) ? terms_.erase(it) : std::next(it);
  if (terms_.empty()) {
    vars_.clear();
    poles_.clear();
    return;
  }
  for (auto pit = poles_.begin(); pit != poles_.end();) {
    while (pit->second > 0) {
      auto q = try_divide_diff(pit->first.first, pit->first.second);
      if (!q) break;
      terms_ = std::move(*q);
      --pit->second;
    }
    pit = (pit->second == 0) ? poles_.erase(pit) : std::next(pit);
  }
  prune_vars();
}

void LaurentElem::align(LaurentElem& a, LaurentElem& b) {
  if (a.vars_ == b.vars_) return;
  std::vector<std::string> merged;
  std::set_union(a.vars_.begin(), a.vars_.end(), b.vars_.begin(), b.vars_.end(),
                 std::back_inserter(merged), var_less);
  auto remap = [&](LaurentElem& x) {
    if (x.vars_ == merged) return;
    std::vector<int> pos(x.vars_.size());
    for (std::size_t k = 0; k < x.vars_.size(); ++k) {
      auto it = std::lower_bound(merged.begin(), merged.end(), x.vars_[k], var_less);
      pos[k] = (int)(it - merged.begin());
    }
    std::map<Exp, Rat> nt;
    for (auto& [e, c] : x.terms_) {
      Exp ne(merged.size(), 0);
      for (std::size_t k = 0; k < e.size(); ++k) ne[pos[k]] = e[k];
      nt.emplace(std::move(ne), c);
    }
    std::map<PoleKey, int> np;
    for (auto& [pk, o] : x.poles_) np[{pos[pk.first], pos[pk.second]}] = o;
    x.vars_ = merged;
    x.terms_ = std::move(nt);
    x.poles_ = std::move(np);
  };
  remap(a);
  remap(b);
}

namespace {

// Multiplies a numerator by (z_i - z_j)^count.
std::map<LaurentElem::Exp, Rat> mul_diff_pow(std::map<LaurentElem::Exp, Rat> cur, int i, int j,
                                             int count) {
  for (int t = 0; t < count; ++t) {
    std::map<LaurentElem::Exp, Rat> next;
    for (auto& [e, c] : cur) {
      LaurentElem::Exp e1 = e;
      ++e1[i];
      add_term(next, e1, c);
      LaurentElem::Exp e2 = e;
      ++e2[j];
      add_term(next, e2, -c);
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

LaurentElem& LaurentElem::operator+=(const LaurentElem& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) {
    *this = o;
    return *this;
  }
  LaurentElem b = o;
  align(*this, b);
  std::map<PoleKey, int> target = poles_;
  for (auto& [pk, ord] : b.poles_) {
    auto it = target.find(pk);
    if (it == target.end())
      target.emplace(pk, ord);
    else
      it->second = std::max(it->second, ord);
  }
  auto lift = [&](LaurentElem& x) {
    for (auto& [pk, ord] : target) {
      auto it = x.poles_.find(pk);
      int have = it == x.poles_.end() ? 0 : it->second;
      if (ord > have) x.terms_ = mul_diff_pow(std::move(x.terms_), pk.first, pk.second, ord - have);
    }
  };
  lift(*this);
  lift(b);
  for (auto& [e, c] : b.terms_) add_term(terms_, e, c);
  poles_ = target;
  canonicalize();
  return *this;
}

LaurentElem LaurentElem::operator-() const {
  LaurentElem r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

LaurentElem& LaurentElem::operator-=(const LaurentElem& o) { return *this += -o; }

LaurentElem& LaurentElem::operator*=(const LaurentElem& o) {
  if (is_zero()) return *this;
  if (o.is_zero()) {
    *this = LaurentElem();
    return *this;
  }
  LaurentElem b = o;
  align(*this, b);
  std::map<Exp, Rat> prod;
  for (auto& [ea, ca] : terms_)
    for (auto& [eb, cb] : b.terms_) {
      Exp e = ea;
      for (std::size_t k = 0; k < e.size(); ++k) e[k] += eb[k];
      add_term(prod, e, Rat(ca * cb));
    }
  terms_ = std::move(prod);
  for (auto& [pk, ord] : b.poles_) poles_[pk] += ord;
  canonicalize();
  return *this;
}

bool LaurentElem::operator==(const LaurentElem& o) const {
  return vars_ == o.vars_ && terms_ == o.terms_ && poles_ == o.poles_;
}

LaurentElem LaurentElem::scaled(const Rat& c) const {
  if (c == 0) return LaurentElem();
  LaurentElem r = *this;
  for (auto& [e, v] : r.terms_) v *= c;
  return r;
}

LaurentElem LaurentElem::with_pole(const std::string& a, const std::string& b, int ord) const {
  if (ord == 0) return *this;
  if (a == b) throw std::invalid_argument("with_pole: identical variables");
  LaurentElem r = *this;
  if (r.is_zero()) return r;
  LaurentElem carrier;
  carrier.vars_ = var_less(a, b) ? std::vector<std::string>{a, b} : std::vector<std::string>{b, a};
  carrier.terms_.emplace(Exp{0, 0}, Rat(1));
  align(r, carrier);
  int ia = r.var_index(a), ib = r.var_index(b);
  bool flip = ia > ib;
  int lo = std::min(ia, ib), hi = std::max(ia, ib);
  if (flip && (ord % 2 != 0))
    for (auto& [e, c] : r.terms_) c = -c;
  if (ord > 0)
    r.poles_[{lo, hi}] += ord;
  else
    r.terms_ = mul_diff_pow(std::move(r.terms_), lo, hi, -ord);
  r.canonicalize();
  return r;
}

int LaurentElem::pole_order(const std::string& a, const std::string& b) const {
  int ia = var_index(a), ib = var_index(b);
  if (ia < 0 || ib < 0) return 0;
  auto it = poles_.find({std::min(ia, ib), std::max(ia, ib)});
  return it == poles_.end() ? 0 : it->second;
}

LaurentElem LaurentElem::derivative(const std::string& var) const {
  int v = var_index(var);
  if (v < 0) return LaurentElem();
  LaurentElem total;
  {
    LaurentElem part;
    part.vars_ = vars_;
    part.poles_ = poles_;
    for (auto& [e, c] : terms_) {
      if (e[v] == 0) continue;
      Exp ne = e;
      --ne[v];
      part.terms_.emplace(std::move(ne), Rat(c * e[v]));
    }
    part.canonicalize();
    total += part;
  }
  for (auto& [pk, o] : poles_) {
    if (pk.first != v && pk.second != v) continue;
    Rat coef = Rat(-(long)o) * (pk.first == v ? 1 : -1);
    LaurentElem part;
    part.vars_ = vars_;
    part.poles_ = poles_;
    part.poles_[pk] = o + 1;
    for (auto& [e, c] : terms_) part.terms_.emplace(e, Rat(c * coef));
    part.canonicalize();
    total += part;
  }
  return total;
}

LaurentElem LaurentElem::shift_expand(const std::string& var, const std::string& w, int order,
                                      bool allow_pole_region) const {
  if (order < 0) throw std::invalid_argument("shift_expand: negative order");
  if (w == var || var_index(w) >= 0)
    throw std::invalid_argument("shift_expand: offset variable already in use");
  int v = var_index(var);
  if (v < 0) return *this;

  std::vector<LaurentElem> series(order + 1);
  for (auto& [e, c] : terms_) {
    int ev = e[v];
    if (ev < 0 && !allow_pole_region)
      throw std::domain_error("shift_expand: negative exponent needs pole-region expansion");
    int tmax = ev >= 0 ? std::min(order, ev) : order;
    for (int t = 0; t <= tmax; ++t) {
      Rat coef = c * rat_binom(ev, (unsigned long)t);
      if (coef == 0) continue;
      LaurentElem mono;
      mono.vars_ = vars_;
      Exp ne = e;
      ne[v] = ev - t;
      mono.terms_.emplace(std::move(ne), coef);
      mono.prune_vars();
      series[t] += mono;
    }
  }

  std::vector<std::pair<PoleKey, int>> static_poles;
  for (auto& [pk, o] : poles_) {
    if (pk.first != v && pk.second != v) {
      static_poles.emplace_back(pk, o);
      continue;
    }
    if (!allow_pole_region)
      throw std::domain_error("shift_expand: shifted variable sits in a pole factor");
    int sign = pk.first == v ? 1 : -1;
    std::vector<LaurentElem> factor(order + 1);
    for (int t = 0; t <= order; ++t) {
      Rat coef = rat_binom(-(long)o, (unsigned long)t);
      if (sign < 0 && t % 2 != 0) coef = -coef;
      LaurentElem f(coef);
      if (coef != 0) f = f.with_pole(vars_[pk.first], vars_[pk.second], o + t);
      factor[t] = f;
    }
    std::vector<LaurentElem> next(order + 1);
    for (int s = 0; s <= order; ++s)
      for (int t = 0; s + t <= order; ++t) {
        if (series[s].is_zero() || factor[t].is_zero()) continue;
        next[s + t] += series[s] * factor[t];
      }
    series = std::move(next);
  }

  LaurentElem out;
  for (int t = 0; t <= order; ++t) {
    if (series[t].is_zero()) continue;
    out += series[t] * variable(w, t);
  }
  for (auto& [pk, o] : static_poles) out = out.with_pole(vars_[pk.first], vars_[pk.second], o);
  return out;
}

LaurentElem LaurentElem::renamed(const std::map<std::string, std::string>& m) const {
  if (is_zero()) return *this;
  std::vector<std::string> nn(vars_.size());
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    auto it = m.find(vars_[k]);
    nn[k] = it == m.end() ? vars_[k] : it->second;
  }
  {
    std::set<std::string> dist(nn.begin(), nn.end());
    if (dist.size() != nn.size()) throw std::invalid_argument("renamed: name collision");
  }
  std::vector<std::size_t> order(nn.size());
  for (std::size_t k = 0; k < nn.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return var_less(nn[x], nn[y]); });
  std::vector<int> pos(nn.size());
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = (int)k;

  LaurentElem r;
  r.vars_.resize(nn.size());
  for (std::size_t k = 0; k < nn.size(); ++k) r.vars_[pos[k]] = nn[k];
  int sign = 1;
  for (auto& [pk, o] : poles_) {
    int pi = pos[pk.first], pj = pos[pk.second];
    if (pi > pj) {
      std::swap(pi, pj);
      if (o % 2 != 0) sign = -sign;
    }
    r.poles_[{pi, pj}] = o;
  }
  for (auto& [e, c] : terms_) {
    Exp ne(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) ne[pos[k]] = e[k];
    r.terms_.emplace(std::move(ne), sign == 1 ? c : Rat(-c));
  }
  r.canonicalize();
  return r;
}

Rat LaurentElem::evaluate(const std::map<std::string, Rat>& point) const {
  std::vector<Rat> val(vars_.size());
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    auto it = point.find(vars_[k]);
    if (it == point.end()) throw std::invalid_argument("evaluate: missing value for " + vars_[k]);
    val[k] = it->second;
  }
  Rat acc(0);
  for (auto& [e, c] : terms_) {
    Rat m = c;
    for (std::size_t k = 0; k < e.size(); ++k)
      if (e[k] != 0) m *= rat_pow(val[k], e[k]);
    acc += m;
  }
  for (auto& [pk, o] : poles_) {
    Rat diff = val[pk.first] - val[pk.second];
    if (diff == 0) throw std::domain_error("evaluate: point hits a difference pole");
    acc /= rat_pow(diff, o);
  }
  return acc;
}

std::set<int> LaurentElem::term_degrees() const {
  int shift = total_pole_order();
  std::set<int> out;
  for (auto& [e, c] : terms_) {
    int d = 0;
    for (int x : e) d += x;
    out.insert(d - shift);
  }
  return out;
}

int LaurentElem::total_pole_order() const {
  int s = 0;
  for (auto& [pk, o] : poles_) s += o;
  return s;
}

LaurentElem LaurentElem::truncated_above(int cap) const {
  LaurentElem r = *this;
  int shift = total_pole_order();
  for (auto it = r.terms_.begin(); it != r.terms_.end();) {
    int d = 0;
    for (int x : it->first) d += x;
    it = (d - shift > cap) ? r.terms_.erase(it) : std::next(it);
  }
  r.canonicalize();
  return r;
}

int LaurentElem::exponent_radius() const {
  int m = 0;
  for (auto& [e, c] : terms_)
    for (int x : e) m = std::max(m, std::abs(x));
  return m;
}

Rat LaurentElem::coeff_norm() const {
  Rat s(0);
  for (auto& [e, c] : terms_) s += rat_abs(c);
  return s;
}

Rat LaurentElem::coeff_max() const {
  Rat m(0);
  for (auto& [e, c] : terms_) m = std::max(m, rat_abs(c));
  return m;
}

std::string LaurentElem::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << rat_str(c) << ")";
    for (std::size_t k = 0; k < e.size(); ++k)
      if (e[k] != 0) os << "*" << vars_[k] << "^" << e[k];
  }
  for (auto& [pk, o] : poles_)
    os << " / (" << vars_[pk.first] << "-" << vars_[pk.second] << ")^" << o;
  return os.str();
}

}  // namespace cosimp
