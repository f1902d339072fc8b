#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hesynth/ring.hpp"

namespace hesynth {

// Minimal pure expression AST for plaintext reference computations: ring
// arithmetic, integer constants and tensor reads over grid coordinates.
// Loops are unrolled by the kernel builders before an Expr is formed, and
// data-dependent control flow is not representable.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { constant, read, add, sub, mul };

  Kind kind;
  int64_t value = 0;        // constant
  int input = 0;            // read: ct input index
  std::vector<int> index;   // read: grid coordinates
  ExprPtr a, b;             // add/sub/mul
};

ExprPtr expr_const(int64_t value);
ExprPtr expr_read(int input, std::vector<int> index);
ExprPtr expr_add(ExprPtr a, ExprPtr b);
ExprPtr expr_sub(ExprPtr a, ExprPtr b);
ExprPtr expr_mul(ExprPtr a, ExprPtr b);

// Rejects constructs that cannot be lifted (division, comparisons, branches)
// with a diagnostic naming the construct.
ExprPtr parse_expr_json_text(const std::string& text);
std::string emit_expr_json_text(const ExprPtr& e);

}  // namespace hesynth
