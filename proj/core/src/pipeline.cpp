#include "hesynth/pipeline.hpp"

#include <algorithm>
#include <map>

#include "hesynth/verifier.hpp"

namespace hesynth {

namespace {

struct BoundValue {
  ValueRef ref;                 // value in the composed program
  std::vector<uint8_t> valid;   // slots the producer guarantees
  std::vector<Poly> polys;      // producer semantics over the pipeline inputs
};

void check_edge(const std::string& stage, const std::string& input_name,
                const LayoutDesc& consumer, const std::vector<uint8_t>& producer_valid, int n) {
  std::vector<uint8_t> needed = consumer.packed_slots(n);
  for (int s = 0; s < n; ++s)
    if (needed[static_cast<size_t>(s)] && !producer_valid[static_cast<size_t>(s)])
      throw StructuralError("pipeline: stage '" + stage + "' input '" + input_name +
                            "' reads slot " + std::to_string(s) +
                            " that its producer does not define");
}

}  // namespace

PipelineResult synthesize_multistep(std::span<const PipelineStage> stages,
                                    std::span<const SpecInput> pipeline_inputs, RingParams ring,
                                    const CostModel& cost, const Clock* clock) {
  PipelineResult out;
  if (stages.empty()) throw StructuralError("pipeline: needs at least one stage");
  ring.validate();
  const int n = ring.n;

  Program composed;
  composed.params = ring;
  std::map<std::string, BoundValue> env;
  for (size_t i = 0; i < pipeline_inputs.size(); ++i) {
    const SpecInput& in = pipeline_inputs[i];
    composed.ct_inputs.push_back(in.name);
    BoundValue bv;
    bv.ref = ValueRef::input(static_cast<int>(i));
    bv.valid = in.layout.packed_slots(n);
    bv.polys.assign(static_cast<size_t>(n), Poly::zero());
    for (int s = 0; s < n; ++s)
      if (bv.valid[static_cast<size_t>(s)])
        bv.polys[static_cast<size_t>(s)] = Poly::variable(make_var(static_cast<int>(i), s, n));
    env.emplace("@" + in.name, std::move(bv));
  }

  for (const PipelineStage& stage : stages) {
    if (stage.spec.ring != ring) throw StructuralError("pipeline: stage ring mismatch");
    if (stage.bindings.size() != stage.spec.inputs.size())
      throw StructuralError("pipeline: stage '" + stage.name + "' binding arity mismatch");
    if (env.count(stage.name))
      throw StructuralError("pipeline: duplicate stage name '" + stage.name + "'");

    std::vector<const BoundValue*> bound;
    for (size_t i = 0; i < stage.bindings.size(); ++i) {
      auto it = env.find(stage.bindings[i]);
      if (it == env.end())
        throw StructuralError("pipeline: stage '" + stage.name + "' binds unknown value '" +
                              stage.bindings[i] + "'");
      check_edge(stage.name, stage.spec.inputs[i].name, stage.spec.inputs[i].layout,
                 it->second.valid, n);
      bound.push_back(&it->second);
    }

    StageOutcome outcome;
    outcome.name = stage.name;
    outcome.result = synthesize(stage.spec, stage.sketch, stage.synth, clock);
    const bool ok = outcome.result.success;
    out.stages.push_back(std::move(outcome));
    if (!ok) {
      out.failure_reason = "stage '" + stage.name + "' failed: " +
                           out.stages.back().result.failure_reason;
      return out;
    }
    const Program& p = out.stages.back().result.final->program;

    // Splice: remap stage-local references into the composed program.
    std::map<std::string, int> pt_remap;
    for (const PtConst& pc : p.pt_consts) {
      std::string name = pc.name;
      auto existing = std::find_if(composed.pt_consts.begin(), composed.pt_consts.end(),
                                   [&](const PtConst& c) { return c.name == name; });
      if (existing != composed.pt_consts.end() && !(existing->value == pc.value))
        name = stage.name + "." + name;
      existing = std::find_if(composed.pt_consts.begin(), composed.pt_consts.end(),
                              [&](const PtConst& c) { return c.name == name; });
      if (existing == composed.pt_consts.end()) {
        composed.pt_consts.push_back(PtConst{name, pc.value});
        pt_remap[pc.name] = static_cast<int>(composed.pt_consts.size()) - 1;
      } else {
        pt_remap[pc.name] = static_cast<int>(existing - composed.pt_consts.begin());
      }
    }
    const int base = static_cast<int>(composed.body.size());
    auto remap = [&](const Operand& o) {
      if (o.src.is_input()) return Operand{bound[static_cast<size_t>(o.src.index())]->ref, o.rot};
      return Operand{ValueRef::instr(o.src.index() + base), o.rot};
    };
    for (const Instruction& instr : p.body) {
      Instruction ni = instr;
      ni.lhs = remap(instr.lhs);
      if (is_pt_op(instr.op))
        ni.pt = pt_remap.at(p.pt_consts[static_cast<size_t>(instr.pt)].name);
      else
        ni.rhs = remap(instr.rhs);
      composed.body.push_back(ni);
    }
    ValueRef result = p.result.is_input() ? bound[static_cast<size_t>(p.result.index())]->ref
                                          : ValueRef::instr(p.result.index() + base);

    // Producer semantics over the original inputs, by substitution.
    BoundValue bv;
    bv.ref = result;
    bv.valid.assign(static_cast<size_t>(n), 0);
    bv.polys.assign(static_cast<size_t>(n), Poly::zero());
    Poly zero = Poly::zero();
    auto replacement = [&](Var v) -> const Poly& {
      int input = static_cast<int>(v) / n;
      int slot = static_cast<int>(v) % n;
      return bound[static_cast<size_t>(input)]->polys[static_cast<size_t>(slot)];
    };
    for (int s : stage.spec.mask) {
      bv.valid[static_cast<size_t>(s)] = 1;
      bv.polys[static_cast<size_t>(s)] =
          substitute(stage.spec.out_polys[static_cast<size_t>(s)], replacement, ring.t);
    }
    composed.result = result;
    env.emplace(stage.name, std::move(bv));
  }

  const BoundValue& last = env.at(stages.back().name);
  out.composed_mask = stages.back().spec.mask;
  out.composed_polys = last.polys;
  validate(composed);
  out.composed = composed;

  // End-to-end check: the spliced program must compute the composed
  // polynomials; a stage solution that leaned on padding zeros its producer
  // does not actually supply would fail here.
  std::vector<Poly> actual = poly_of_program(composed, ring, pipeline_inputs);
  out.verified = true;
  for (int s : out.composed_mask)
    if (!(actual[static_cast<size_t>(s)] == out.composed_polys[static_cast<size_t>(s)])) {
      out.verified = false;
      out.failure_reason = "composed program disagrees with the composed spec at slot " +
                           std::to_string(s);
      return out;
    }

  out.counts = instruction_count(composed);
  out.mdepth = mdepth(composed);
  out.cost = cost_fn(composed, cost);
  out.success = true;
  return out;
}

}  // namespace hesynth
