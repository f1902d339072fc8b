#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hesynth/kernel_spec.hpp"

namespace hesynth {

struct Counterexample {
  std::vector<std::vector<uint32_t>> inputs;  // one slot vector per spec input
  std::vector<uint32_t> expected;             // spec output, full n
  std::vector<uint32_t> actual;               // program output, full n
};

// Ok (nullopt) iff the program computes the spec's polynomial on every masked
// slot, as canonical polynomials mod t. Random probing runs first as a fast
// pre-filter; canonical comparison decides. Total degree must stay below t so
// formal equality coincides with functional equality over the ring.
std::optional<Counterexample> verify(const Program& p, const KernelSpec& spec);

// Concrete assignment (indexed by variable id) on which two canonically
// distinct polynomials evaluate differently. 0/1-valued assignments are
// preferred to keep downstream constraints small.
std::vector<uint32_t> counterexample_from_polys(const Poly& pa, const Poly& pb,
                                                const RingParams& ring, size_t num_vars);

// Index of the first example the program disagrees with on the masked slots.
std::optional<size_t> check_on_examples(const Program& p, std::span<const Example> examples,
                                        std::span<const int> mask);

}  // namespace hesynth
