#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hesynth/expr.hpp"
#include "hesynth/layout.hpp"
#include "hesynth/poly.hpp"
#include "hesynth/program.hpp"

namespace hesynth {

enum class InputDomain { full, binary };

struct SpecInput {
  std::string name;
  LayoutDesc layout;
  InputDomain domain = InputDomain::full;

  bool operator==(const SpecInput&) const = default;
};

// Plaintext reference computation in lifted form: one canonical polynomial per
// masked output slot over the packed input slots, plus the data layouts.
struct KernelSpec {
  std::string name;
  RingParams ring;
  std::vector<SpecInput> inputs;
  std::vector<PtConst> pt_consts;
  LayoutDesc out_layout;
  std::vector<int> mask;       // sorted output slots that must match
  std::vector<Poly> out_polys; // size ring.n, zero poly off-mask
  std::vector<std::pair<int, ExprPtr>> reference;  // per masked slot
};

void validate(const KernelSpec& spec);

// Lowers the per-slot reference expressions into canonical polynomials.
// Reads of padding cells contribute 0; reads outside the grid are rejected.
KernelSpec lift_reference(std::string name, RingParams ring, std::vector<SpecInput> inputs,
                          std::vector<PtConst> pt_consts, LayoutDesc out_layout,
                          std::vector<std::pair<int, ExprPtr>> reference);

// Direct AST evaluation of one output slot; independent of the lifted polys.
uint32_t eval_reference_slot(const KernelSpec& spec, int slot,
                             std::span<const std::vector<uint32_t>> inputs);

// A concrete input assignment with its expected masked output.
struct Example {
  std::vector<std::vector<uint32_t>> inputs;  // one slot vector per ct input
  std::vector<uint32_t> output;               // full n; meaningful on masked slots

  bool operator==(const Example&) const = default;
};

// Uniform packed slots (binary where the input demands), zero padding;
// deterministic for a given seed.
Example random_example(const KernelSpec& spec, uint64_t seed);

// Per-input polynomials: variables at packed slots, zero at padding.
std::vector<std::vector<Poly>> input_polys(const KernelSpec& spec);

// Symbolic evaluation of a program over variable inputs laid out as in
// `inputs`; slot i of the result is the polynomial the program computes there.
std::vector<Poly> poly_of_program(const Program& p, const RingParams& ring,
                                  std::span<const SpecInput> inputs);

// All-slots-packed variant, for programs without a declared layout.
std::vector<Poly> poly_of_program(const Program& p);

// Kernel spec file format: {name, ring, inputs, pt_consts, out_layout, mask,
// reference}. Lifting reruns on parse, so parse(emit(s)) has equal polys.
std::string emit_kernel_spec_json(const KernelSpec& spec);
KernelSpec parse_kernel_spec_json(const std::string& text);

}  // namespace hesynth
