#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hesynth/ring.hpp"

namespace hesynth {

// Variable identifiers are dense: var = input_index * n + slot.
using Var = uint32_t;

inline Var make_var(int input, int slot, int n) {
  return static_cast<Var>(input) * static_cast<Var>(n) + static_cast<Var>(slot);
}

// A monomial is a sorted multiset of variables; repeats encode powers.
using Monomial = std::vector<Var>;

struct Term {
  Monomial mono;
  uint32_t coeff = 0;

  bool operator==(const Term&) const = default;
};

// Graded lexicographic: lower degree first, then lex on the variable list.
bool mono_less(const Monomial& a, const Monomial& b);

// Canonical multivariate polynomial mod t: terms sorted by mono_less, no zero
// coefficients stored. Equality of canonical forms is ring equality.
class Poly {
 public:
  Poly() = default;

  static Poly zero();
  static Poly constant(uint32_t c, uint32_t t);
  static Poly variable(Var v);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;

  bool operator==(const Poly&) const = default;

  // From an arbitrary term list; merges duplicates and normalizes mod t.
  static Poly from_terms(std::vector<Term> terms, uint32_t t);

  friend Poly add(const Poly& a, const Poly& b, uint32_t t);
  friend Poly sub(const Poly& a, const Poly& b, uint32_t t);
  friend Poly mul(const Poly& a, const Poly& b, uint32_t t);
  friend Poly negate(const Poly& a, uint32_t t);
  friend Poly scale(const Poly& a, uint32_t c, uint32_t t);

  uint32_t eval(std::span<const uint32_t> assignment, uint32_t t) const;
  uint64_t hash() const;

 private:
  std::vector<Term> terms_;
};

// Substitutes each variable with a replacement polynomial.
Poly substitute(const Poly& p, const std::function<const Poly&(Var)>& replacement, uint32_t t);

}  // namespace hesynth
