#include "hesynth/verifier.hpp"

#include <algorithm>
#include <set>

namespace hesynth {

namespace {

constexpr int kProbeTrials = 64;
constexpr uint64_t kProbeSeed = 0x9e1a5ull;

void check_signature(const Program& p, const KernelSpec& spec) {
  if (p.params != spec.ring) throw StructuralError("verify: ring params mismatch");
  if (p.ct_inputs.size() != spec.inputs.size())
    throw StructuralError("verify: input count mismatch");
  for (size_t i = 0; i < spec.inputs.size(); ++i)
    if (p.ct_inputs[i] != spec.inputs[i].name)
      throw StructuralError("verify: input signature mismatch at position " + std::to_string(i));
}

std::vector<std::vector<uint32_t>> random_point(const KernelSpec& spec, SplitMix64& rng) {
  const int n = spec.ring.n;
  std::vector<std::vector<uint32_t>> inputs;
  for (const auto& in : spec.inputs) {
    std::vector<uint32_t> slots(static_cast<size_t>(n), 0);
    std::vector<uint8_t> packed = in.layout.packed_slots(n);
    for (int s = 0; s < n; ++s)
      if (packed[static_cast<size_t>(s)])
        slots[static_cast<size_t>(s)] = static_cast<uint32_t>(rng.bounded(spec.ring.t));
    inputs.push_back(std::move(slots));
  }
  return inputs;
}

std::vector<uint32_t> flatten(const KernelSpec& spec,
                              const std::vector<std::vector<uint32_t>>& inputs) {
  const int n = spec.ring.n;
  std::vector<uint32_t> assignment(inputs.size() * static_cast<size_t>(n), 0);
  for (size_t i = 0; i < inputs.size(); ++i)
    for (int s = 0; s < n; ++s)
      assignment[i * static_cast<size_t>(n) + static_cast<size_t>(s)] = inputs[i][s];
  return assignment;
}

std::vector<uint32_t> spec_output(const KernelSpec& spec,
                                  const std::vector<std::vector<uint32_t>>& inputs) {
  std::vector<uint32_t> assignment = flatten(spec, inputs);
  std::vector<uint32_t> out(static_cast<size_t>(spec.ring.n), 0);
  for (int s : spec.mask)
    out[static_cast<size_t>(s)] = spec.out_polys[static_cast<size_t>(s)].eval(assignment, spec.ring.t);
  return out;
}

std::vector<uint32_t> program_output(const Program& p,
                                     const std::vector<std::vector<uint32_t>>& inputs) {
  std::vector<CtValue> cts;
  cts.reserve(inputs.size());
  for (const auto& slots : inputs) cts.push_back(CtValue{slots, 0});
  return eval_program(p, cts).slots;
}

std::optional<Counterexample> disagreement(const Program& p, const KernelSpec& spec,
                                           const std::vector<std::vector<uint32_t>>& inputs) {
  std::vector<uint32_t> expected = spec_output(spec, inputs);
  std::vector<uint32_t> actual = program_output(p, inputs);
  for (int s : spec.mask)
    if (expected[static_cast<size_t>(s)] != actual[static_cast<size_t>(s)])
      return Counterexample{inputs, std::move(expected), std::move(actual)};
  return std::nullopt;
}

}  // namespace

std::vector<uint32_t> counterexample_from_polys(const Poly& pa, const Poly& pb,
                                                const RingParams& ring, size_t num_vars) {
  if (pa == pb)
    throw StructuralError("counterexample_from_polys: polynomials are canonically equal");
  Poly diff = sub(pa, pb, ring.t);

  std::set<Var> vars;
  for (const Term& term : diff.terms())
    for (Var v : term.mono) vars.insert(v);
  std::vector<uint32_t> assignment(num_vars, 0);

  SplitMix64 rng(kProbeSeed);
  auto try_assignment = [&](auto&& draw) -> bool {
    for (Var v : vars) assignment[v] = draw();
    return diff.eval(assignment, ring.t) != 0;
  };

  // 0/1-valued points first; they make the smallest CEGIS constraints.
  for (int trial = 0; trial < kProbeTrials; ++trial)
    if (try_assignment([&] { return static_cast<uint32_t>(rng.bounded(2)); })) return assignment;
  for (int trial = 0; trial < 4096; ++trial)
    if (try_assignment([&] { return static_cast<uint32_t>(rng.bounded(ring.t)); }))
      return assignment;
  // Unreachable while total degree < t: a nonzero polynomial of degree d
  // vanishes on at most a d/t fraction of points.
  throw StructuralError("counterexample_from_polys: failed to separate distinct polynomials");
}

std::optional<Counterexample> verify(const Program& p, const KernelSpec& spec) {
  validate(p);
  validate(spec);
  check_signature(p, spec);

  // Random probing: usually settles disagreement quickly and hands back a
  // concrete counterexample for free.
  SplitMix64 rng(kProbeSeed);
  for (int trial = 0; trial < kProbeTrials; ++trial) {
    auto inputs = random_point(spec, rng);
    if (auto cex = disagreement(p, spec, inputs)) return cex;
  }

  // Exact decision by canonical comparison.
  std::vector<Poly> prog_polys = poly_of_program(p, spec.ring, spec.inputs);
  int degree = 0;
  for (int s : spec.mask) {
    degree = std::max(degree, prog_polys[static_cast<size_t>(s)].total_degree());
    degree = std::max(degree, spec.out_polys[static_cast<size_t>(s)].total_degree());
  }
  if (static_cast<uint64_t>(degree) >= spec.ring.t)
    throw StructuralError("verify: total degree must stay below t for exactness");

  for (int s : spec.mask) {
    const Poly& got = prog_polys[static_cast<size_t>(s)];
    const Poly& want = spec.out_polys[static_cast<size_t>(s)];
    if (got == want) continue;
    std::vector<uint32_t> assignment = counterexample_from_polys(
        got, want, spec.ring, spec.inputs.size() * static_cast<size_t>(spec.ring.n));
    std::vector<std::vector<uint32_t>> inputs;
    for (size_t i = 0; i < spec.inputs.size(); ++i) {
      auto begin = assignment.begin() + static_cast<long>(i * static_cast<size_t>(spec.ring.n));
      inputs.emplace_back(begin, begin + spec.ring.n);
    }
    auto cex = disagreement(p, spec, inputs);
    if (!cex)
      throw StructuralError("verify: internal error, counterexample does not separate");
    return cex;
  }
  return std::nullopt;
}

std::optional<size_t> check_on_examples(const Program& p, std::span<const Example> examples,
                                        std::span<const int> mask) {
  for (size_t i = 0; i < examples.size(); ++i) {
    std::vector<uint32_t> actual = program_output(p, examples[i].inputs);
    for (int s : mask)
      if (actual[static_cast<size_t>(s)] != examples[i].output[static_cast<size_t>(s)])
        return i;
  }
  return std::nullopt;
}

}  // namespace hesynth
