#include "hesynth/poly.hpp"

#include <algorithm>
#include <map>

namespace hesynth {

bool mono_less(const Monomial& a, const Monomial& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Poly Poly::zero() { return Poly{}; }

Poly Poly::constant(uint32_t c, uint32_t t) {
  Poly p;
  c %= t;
  if (c != 0) p.terms_.push_back(Term{{}, c});
  return p;
}

Poly Poly::variable(Var v) {
  Poly p;
  p.terms_.push_back(Term{{v}, 1});
  return p;
}

int Poly::total_degree() const {
  int d = 0;
  for (const Term& term : terms_) d = std::max(d, static_cast<int>(term.mono.size()));
  return d;
}

Poly Poly::from_terms(std::vector<Term> terms, uint32_t t) {
  std::map<Monomial, uint32_t, bool (*)(const Monomial&, const Monomial&)> acc(mono_less);
  for (Term& term : terms) {
    std::sort(term.mono.begin(), term.mono.end());
    uint32_t& c = acc[term.mono];
    c = mod_add(c, term.coeff % t, t);
  }
  Poly p;
  for (auto& [mono, coeff] : acc)
    if (coeff != 0) p.terms_.push_back(Term{mono, coeff});
  return p;
}

Poly add(const Poly& a, const Poly& b, uint32_t t) {
  Poly out;
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  size_t i = 0, j = 0;
  while (i < a.terms_.size() && j < b.terms_.size()) {
    const Term& ta = a.terms_[i];
    const Term& tb = b.terms_[j];
    if (ta.mono == tb.mono) {
      uint32_t c = mod_add(ta.coeff, tb.coeff, t);
      if (c != 0) out.terms_.push_back(Term{ta.mono, c});
      ++i, ++j;
    } else if (mono_less(ta.mono, tb.mono)) {
      out.terms_.push_back(ta);
      ++i;
    } else {
      out.terms_.push_back(tb);
      ++j;
    }
  }
  for (; i < a.terms_.size(); ++i) out.terms_.push_back(a.terms_[i]);
  for (; j < b.terms_.size(); ++j) out.terms_.push_back(b.terms_[j]);
  return out;
}

Poly negate(const Poly& a, uint32_t t) {
  Poly out = a;
  for (Term& term : out.terms_) term.coeff = mod_neg(term.coeff, t);
  return out;
}

Poly sub(const Poly& a, const Poly& b, uint32_t t) { return add(a, negate(b, t), t); }

Poly scale(const Poly& a, uint32_t c, uint32_t t) {
  c %= t;
  Poly out;
  if (c == 0) return out;
  out.terms_.reserve(a.terms_.size());
  for (const Term& term : a.terms_) {
    uint32_t nc = mod_mul(term.coeff, c, t);
    if (nc != 0) out.terms_.push_back(Term{term.mono, nc});
  }
  return out;
}

Poly mul(const Poly& a, const Poly& b, uint32_t t) {
  std::map<Monomial, uint32_t, bool (*)(const Monomial&, const Monomial&)> acc(mono_less);
  for (const Term& ta : a.terms_) {
    for (const Term& tb : b.terms_) {
      Monomial m;
      m.reserve(ta.mono.size() + tb.mono.size());
      std::merge(ta.mono.begin(), ta.mono.end(), tb.mono.begin(), tb.mono.end(),
                 std::back_inserter(m));
      uint32_t& c = acc[m];
      c = mod_add(c, mod_mul(ta.coeff, tb.coeff, t), t);
    }
  }
  Poly out;
  for (auto& [mono, coeff] : acc)
    if (coeff != 0) out.terms_.push_back(Term{mono, coeff});
  return out;
}

uint32_t Poly::eval(std::span<const uint32_t> assignment, uint32_t t) const {
  uint32_t acc = 0;
  for (const Term& term : terms_) {
    uint32_t v = term.coeff;
    for (Var var : term.mono) v = mod_mul(v, assignment[var], t);
    acc = mod_add(acc, v, t);
  }
  return acc;
}

uint64_t Poly::hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](uint64_t x) {
    h ^= x;
    h *= 0x100000001b3ull;
  };
  for (const Term& term : terms_) {
    mix(term.coeff);
    mix(term.mono.size());
    for (Var v : term.mono) mix(v);
  }
  return h;
}

Poly substitute(const Poly& p, const std::function<const Poly&(Var)>& replacement, uint32_t t) {
  Poly acc = Poly::zero();
  for (const Term& term : p.terms()) {
    Poly prod = Poly::constant(term.coeff, t);
    for (Var v : term.mono) prod = mul(prod, replacement(v), t);
    acc = add(acc, prod, t);
  }
  return acc;
}

}  // namespace hesynth
