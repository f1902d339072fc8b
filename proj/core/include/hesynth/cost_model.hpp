#pragma once

#include <cstdint>

#include "hesynth/ring.hpp"

namespace hesynth {

// Abstract per-instruction latency weights. The defaults are not measurements;
// they preserve the ordering that matters for optimization pressure:
// ct*ct multiply and rotation are expensive, additions are cheap.
struct CostModel {
  int64_t add_ct = 1;
  int64_t sub_ct = 1;
  int64_t mul_ct_ct = 10;
  int64_t add_pt = 1;
  int64_t sub_pt = 1;
  int64_t mul_ct_pt = 7;
  int64_t rotate = 9;

  void validate() const {
    if (add_ct <= 0 || sub_ct <= 0 || mul_ct_ct <= 0 || add_pt <= 0 || sub_pt <= 0 ||
        mul_ct_pt <= 0 || rotate <= 0)
      throw StructuralError("cost model: all weights must be positive");
    if (mul_ct_ct < mul_ct_pt)
      throw StructuralError("cost model: mul_ct_ct must be >= mul_ct_pt");
  }

  bool operator==(const CostModel&) const = default;
};

}  // namespace hesynth
