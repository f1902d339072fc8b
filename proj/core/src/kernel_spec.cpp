#include "hesynth/kernel_spec.hpp"

#include <algorithm>
#include <json.hpp>

namespace hesynth {

using json = nlohmann::ordered_json;

void validate(const KernelSpec& spec) {
  spec.ring.validate();
  if (spec.mask.empty()) throw StructuralError("kernel spec: mask must be non-empty");
  if (!std::is_sorted(spec.mask.begin(), spec.mask.end()))
    throw StructuralError("kernel spec: mask must be sorted");
  for (int s : spec.mask)
    if (s < 0 || s >= spec.ring.n) throw StructuralError("kernel spec: mask slot out of range");
  if (spec.out_polys.size() != static_cast<size_t>(spec.ring.n))
    throw StructuralError("kernel spec: out_polys must have n entries");
  for (const auto& in : spec.inputs) in.layout.validate(spec.ring.n);
  spec.out_layout.validate(spec.ring.n);
  for (const auto& pc : spec.pt_consts)
    if (pc.value.slots.size() != static_cast<size_t>(spec.ring.n))
      throw StructuralError("kernel spec: pt const has wrong slot count");
}

namespace {

Poly lower_expr(const ExprPtr& e, const KernelSpec& spec) {
  const uint32_t t = spec.ring.t;
  switch (e->kind) {
    case Expr::Kind::constant: {
      int64_t v = e->value % static_cast<int64_t>(t);
      if (v < 0) v += t;
      return Poly::constant(static_cast<uint32_t>(v), t);
    }
    case Expr::Kind::read: {
      if (e->input < 0 || e->input >= static_cast<int>(spec.inputs.size()))
        throw StructuralError("reference reads undeclared input");
      const LayoutDesc& layout = spec.inputs[e->input].layout;
      if (!layout.in_grid(e->index))
        throw StructuralError("reference reads outside the grid of input '" +
                              spec.inputs[e->input].name + "'");
      if (!layout.cell_packed(layout.flat_index(e->index))) return Poly::zero();
      return Poly::variable(make_var(e->input, layout.slot_of(e->index), spec.ring.n));
    }
    case Expr::Kind::add: return add(lower_expr(e->a, spec), lower_expr(e->b, spec), t);
    case Expr::Kind::sub: return sub(lower_expr(e->a, spec), lower_expr(e->b, spec), t);
    case Expr::Kind::mul: return mul(lower_expr(e->a, spec), lower_expr(e->b, spec), t);
  }
  throw StructuralError("reference: malformed expression");
}

}  // namespace

KernelSpec lift_reference(std::string name, RingParams ring, std::vector<SpecInput> inputs,
                          std::vector<PtConst> pt_consts, LayoutDesc out_layout,
                          std::vector<std::pair<int, ExprPtr>> reference) {
  KernelSpec spec;
  spec.name = std::move(name);
  spec.ring = ring;
  spec.inputs = std::move(inputs);
  spec.pt_consts = std::move(pt_consts);
  spec.out_layout = std::move(out_layout);
  std::sort(reference.begin(), reference.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  spec.reference = std::move(reference);
  spec.out_polys.assign(static_cast<size_t>(ring.n), Poly::zero());
  for (const auto& [slot, expr] : spec.reference) {
    if (slot < 0 || slot >= ring.n) throw StructuralError("reference slot out of range");
    spec.mask.push_back(slot);
    spec.out_polys[static_cast<size_t>(slot)] = lower_expr(expr, spec);
  }
  validate(spec);
  return spec;
}

namespace {

uint32_t eval_expr(const ExprPtr& e, const KernelSpec& spec,
                   std::span<const std::vector<uint32_t>> inputs) {
  const uint32_t t = spec.ring.t;
  switch (e->kind) {
    case Expr::Kind::constant: {
      int64_t v = e->value % static_cast<int64_t>(t);
      if (v < 0) v += t;
      return static_cast<uint32_t>(v);
    }
    case Expr::Kind::read: {
      const LayoutDesc& layout = spec.inputs[e->input].layout;
      if (!layout.in_grid(e->index)) throw StructuralError("reference read outside grid");
      if (!layout.cell_packed(layout.flat_index(e->index))) return 0;
      return inputs[e->input][layout.slot_of(e->index)];
    }
    case Expr::Kind::add:
      return mod_add(eval_expr(e->a, spec, inputs), eval_expr(e->b, spec, inputs), t);
    case Expr::Kind::sub:
      return mod_sub(eval_expr(e->a, spec, inputs), eval_expr(e->b, spec, inputs), t);
    case Expr::Kind::mul:
      return mod_mul(eval_expr(e->a, spec, inputs), eval_expr(e->b, spec, inputs), t);
  }
  throw StructuralError("reference: malformed expression");
}

}  // namespace

uint32_t eval_reference_slot(const KernelSpec& spec, int slot,
                             std::span<const std::vector<uint32_t>> inputs) {
  for (const auto& [s, expr] : spec.reference)
    if (s == slot) return eval_expr(expr, spec, inputs);
  throw StructuralError("no reference expression for slot " + std::to_string(slot));
}

Example random_example(const KernelSpec& spec, uint64_t seed) {
  SplitMix64 rng(seed);
  const int n = spec.ring.n;
  Example ex;
  for (const auto& in : spec.inputs) {
    std::vector<uint32_t> slots(static_cast<size_t>(n), 0);
    std::vector<uint8_t> packed = in.layout.packed_slots(n);
    for (int s = 0; s < n; ++s) {
      if (!packed[static_cast<size_t>(s)]) continue;
      slots[static_cast<size_t>(s)] =
          in.domain == InputDomain::binary
              ? static_cast<uint32_t>(rng.bounded(2))
              : static_cast<uint32_t>(rng.bounded(spec.ring.t));
    }
    ex.inputs.push_back(std::move(slots));
  }
  // Output from the lifted polynomials (consistent with them by construction).
  std::vector<uint32_t> assignment(static_cast<size_t>(spec.inputs.size()) * n, 0);
  for (size_t i = 0; i < ex.inputs.size(); ++i)
    for (int s = 0; s < n; ++s)
      assignment[i * static_cast<size_t>(n) + static_cast<size_t>(s)] = ex.inputs[i][s];
  ex.output.assign(static_cast<size_t>(n), 0);
  for (int s : spec.mask)
    ex.output[static_cast<size_t>(s)] =
        spec.out_polys[static_cast<size_t>(s)].eval(assignment, spec.ring.t);
  return ex;
}

std::vector<std::vector<Poly>> input_polys(const KernelSpec& spec) {
  const int n = spec.ring.n;
  std::vector<std::vector<Poly>> out;
  for (size_t i = 0; i < spec.inputs.size(); ++i) {
    std::vector<uint8_t> packed = spec.inputs[i].layout.packed_slots(n);
    std::vector<Poly> polys(static_cast<size_t>(n), Poly::zero());
    for (int s = 0; s < n; ++s)
      if (packed[static_cast<size_t>(s)])
        polys[static_cast<size_t>(s)] = Poly::variable(make_var(static_cast<int>(i), s, n));
    out.push_back(std::move(polys));
  }
  return out;
}

namespace {

std::vector<Poly> poly_eval_program(const Program& p,
                                    std::vector<std::vector<Poly>> dense) {
  validate(p);
  const int n = p.params.n;
  const uint32_t t = p.params.t;
  const size_t num_inputs = p.ct_inputs.size();
  auto value_of = [&](ValueRef r) -> const std::vector<Poly>& {
    return r.is_input() ? dense[static_cast<size_t>(r.index())]
                        : dense[num_inputs + static_cast<size_t>(r.index())];
  };
  auto rotated = [&](const Operand& o, int slot) -> const Poly& {
    return value_of(o.src)[static_cast<size_t>((slot + o.rot) % n)];
  };
  for (const Instruction& instr : p.body) {
    std::vector<Poly> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const Poly& a = rotated(instr.lhs, i);
      switch (instr.op) {
        case Op::add_ct_ct: out[i] = add(a, rotated(instr.rhs, i), t); break;
        case Op::sub_ct_ct: out[i] = sub(a, rotated(instr.rhs, i), t); break;
        case Op::mul_ct_ct: out[i] = mul(a, rotated(instr.rhs, i), t); break;
        case Op::add_ct_pt:
          out[i] = add(a, Poly::constant(p.pt_consts[instr.pt].value.slots[i], t), t);
          break;
        case Op::sub_ct_pt:
          out[i] = sub(a, Poly::constant(p.pt_consts[instr.pt].value.slots[i], t), t);
          break;
        case Op::mul_ct_pt:
          out[i] = scale(a, p.pt_consts[instr.pt].value.slots[i], t);
          break;
      }
    }
    dense.push_back(std::move(out));
  }
  return value_of(p.result);
}

}  // namespace

std::vector<Poly> poly_of_program(const Program& p, const RingParams& ring,
                                  std::span<const SpecInput> inputs) {
  if (p.params != ring) throw StructuralError("poly_of_program: ring mismatch");
  if (p.ct_inputs.size() != inputs.size())
    throw StructuralError("poly_of_program: input count mismatch");
  std::vector<std::vector<Poly>> dense;
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (p.ct_inputs[i] != inputs[i].name)
      throw StructuralError("poly_of_program: input name mismatch at position " +
                            std::to_string(i));
    std::vector<uint8_t> packed = inputs[i].layout.packed_slots(ring.n);
    std::vector<Poly> polys(static_cast<size_t>(ring.n), Poly::zero());
    for (int s = 0; s < ring.n; ++s)
      if (packed[static_cast<size_t>(s)])
        polys[static_cast<size_t>(s)] = Poly::variable(make_var(static_cast<int>(i), s, ring.n));
    dense.push_back(std::move(polys));
  }
  return poly_eval_program(p, std::move(dense));
}

std::vector<Poly> poly_of_program(const Program& p) {
  std::vector<std::vector<Poly>> dense;
  for (size_t i = 0; i < p.ct_inputs.size(); ++i) {
    std::vector<Poly> polys;
    for (int s = 0; s < p.params.n; ++s)
      polys.push_back(Poly::variable(make_var(static_cast<int>(i), s, p.params.n)));
    dense.push_back(std::move(polys));
  }
  return poly_eval_program(p, std::move(dense));
}

namespace {

json layout_to_json(const LayoutDesc& l) {
  return json{{"dims", l.dims}, {"strides", l.strides}, {"offset", l.offset},
              {"packed", l.packed}};
}

LayoutDesc layout_from_json(const json& j) {
  LayoutDesc l;
  l.dims = j.at("dims").get<std::vector<int>>();
  l.strides = j.at("strides").get<std::vector<int>>();
  l.offset = j.at("offset").get<int>();
  l.packed = j.at("packed").get<std::vector<uint8_t>>();
  return l;
}

}  // namespace

std::string emit_kernel_spec_json(const KernelSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["ring"] = {{"n", spec.ring.n}, {"t", spec.ring.t}};
  j["inputs"] = json::array();
  for (const auto& in : spec.inputs)
    j["inputs"].push_back(json{{"name", in.name},
                               {"domain", in.domain == InputDomain::binary ? "binary" : "full"},
                               {"layout", layout_to_json(in.layout)}});
  j["pt_consts"] = json::array();
  for (const auto& pc : spec.pt_consts)
    j["pt_consts"].push_back(json{{"name", pc.name}, {"slots", pc.value.slots}});
  j["out_layout"] = layout_to_json(spec.out_layout);
  j["reference"] = json::array();
  for (const auto& [slot, expr] : spec.reference)
    j["reference"].push_back(
        json{{"slot", slot}, {"expr", json::parse(emit_expr_json_text(expr))}});
  return j.dump(2) + "\n";
}

KernelSpec parse_kernel_spec_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("kernel spec json: ") + e.what());
  }
  try {
    RingParams ring{j.at("ring").at("n").get<int>(), j.at("ring").at("t").get<uint32_t>()};
    std::vector<SpecInput> inputs;
    for (const auto& ji : j.at("inputs")) {
      SpecInput in;
      in.name = ji.at("name").get<std::string>();
      in.domain =
          ji.value("domain", std::string("full")) == "binary" ? InputDomain::binary : InputDomain::full;
      in.layout = layout_from_json(ji.at("layout"));
      inputs.push_back(std::move(in));
    }
    std::vector<PtConst> pt_consts;
    for (const auto& jc : j.value("pt_consts", json::array())) {
      PtConst pc;
      pc.name = jc.at("name").get<std::string>();
      pc.value.slots = jc.at("slots").get<std::vector<uint32_t>>();
      pt_consts.push_back(std::move(pc));
    }
    std::vector<std::pair<int, ExprPtr>> reference;
    for (const auto& jr : j.at("reference"))
      reference.emplace_back(jr.at("slot").get<int>(),
                             parse_expr_json_text(jr.at("expr").dump()));
    return lift_reference(j.at("name").get<std::string>(), ring, std::move(inputs),
                          std::move(pt_consts), layout_from_json(j.at("out_layout")),
                          std::move(reference));
  } catch (const json::exception& e) {
    throw ParseError(std::string("kernel spec json: ") + e.what());
  }
}

}  // namespace hesynth
