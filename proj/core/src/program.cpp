#include "hesynth/program.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace hesynth {

const char* op_name(Op op) {
  switch (op) {
    case Op::add_ct_ct: return "add_ct_ct";
    case Op::sub_ct_ct: return "sub_ct_ct";
    case Op::mul_ct_pt: return "mul_ct_pt";
    case Op::add_ct_pt: return "add_ct_pt";
    case Op::sub_ct_pt: return "sub_ct_pt";
    case Op::mul_ct_ct: return "mul_ct_ct";
  }
  return "?";
}

Op op_from_name(const std::string& name) {
  for (Op op : {Op::add_ct_ct, Op::sub_ct_ct, Op::mul_ct_pt, Op::add_ct_pt, Op::sub_ct_pt,
                Op::mul_ct_ct})
    if (name == op_name(op)) return op;
  throw ParseError("unknown opcode: " + name);
}

int Program::input_index(const std::string& name) const {
  for (size_t i = 0; i < ct_inputs.size(); ++i)
    if (ct_inputs[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

void check_ref(const Program& p, ValueRef ref, int instr_index) {
  if (ref.is_input()) {
    if (ref.index() >= static_cast<int>(p.ct_inputs.size()))
      throw StructuralError("unbound input reference");
  } else if (ref.index() >= instr_index) {
    throw StructuralError("operand must reference an earlier definition (SSA)");
  }
}

void check_operand(const Program& p, const Operand& o, int instr_index) {
  check_ref(p, o.src, instr_index);
  if (o.rot < 0 || o.rot >= p.params.n)
    throw StructuralError("rotation out of range [0, n)");
}

}  // namespace

void validate(const Program& p) {
  p.params.validate();
  for (const auto& pc : p.pt_consts)
    if (pc.value.slots.size() != static_cast<size_t>(p.params.n))
      throw StructuralError("plaintext constant '" + pc.name + "' has wrong slot count");
  for (size_t i = 0; i < p.body.size(); ++i) {
    const Instruction& instr = p.body[i];
    check_operand(p, instr.lhs, static_cast<int>(i));
    if (is_pt_op(instr.op)) {
      if (instr.pt < 0 || instr.pt >= static_cast<int>(p.pt_consts.size()))
        throw StructuralError("pt instruction must reference a declared plaintext constant");
    } else {
      check_operand(p, instr.rhs, static_cast<int>(i));
    }
  }
  check_ref(p, p.result, static_cast<int>(p.body.size()));
}

std::vector<uint32_t> rotate_slots(std::span<const uint32_t> v, long long x, uint32_t) {
  const int n = static_cast<int>(v.size());
  const int r = normalize_rotation(x, n);
  std::vector<uint32_t> out(v.size());
  for (int i = 0; i < n; ++i) out[i] = v[(i + r) % n];
  return out;
}

namespace {

uint32_t apply_op(Op op, uint32_t a, uint32_t b, uint32_t t) {
  switch (op) {
    case Op::add_ct_ct:
    case Op::add_ct_pt: return mod_add(a, b, t);
    case Op::sub_ct_ct:
    case Op::sub_ct_pt: return mod_sub(a, b, t);
    case Op::mul_ct_ct:
    case Op::mul_ct_pt: return mod_mul(a, b, t);
  }
  return 0;
}

}  // namespace

namespace {

const CtValue& bound(std::span<const CtValue> dense, size_t num_inputs, ValueRef ref) {
  size_t idx = ref.is_input() ? static_cast<size_t>(ref.index())
                              : num_inputs + static_cast<size_t>(ref.index());
  if (idx >= dense.size()) throw StructuralError("unbound reference");
  return dense[idx];
}

CtValue eval_dense(const Instruction& instr, const RingParams& params,
                   std::span<const CtValue> dense, size_t num_inputs,
                   std::span<const PtConst> pt_consts) {
  const int n = params.n;
  const uint32_t t = params.t;
  const CtValue& lv = bound(dense, num_inputs, instr.lhs.src);
  if (static_cast<int>(lv.slots.size()) != n)
    throw StructuralError("operand has wrong slot count");

  CtValue out;
  out.slots.resize(n);
  const int lr = instr.lhs.rot;
  if (is_pt_op(instr.op)) {
    if (instr.pt < 0 || instr.pt >= static_cast<int>(pt_consts.size()))
      throw StructuralError("unbound plaintext constant");
    const PtValue& pv = pt_consts[instr.pt].value;
    if (static_cast<int>(pv.slots.size()) != n)
      throw StructuralError("plaintext operand has wrong slot count");
    for (int i = 0; i < n; ++i)
      out.slots[i] = apply_op(instr.op, lv.slots[(i + lr) % n], pv.slots[i], t);
    out.depth = lv.depth + (instr.op == Op::mul_ct_pt ? 1 : 0);
  } else {
    const CtValue& rv = bound(dense, num_inputs, instr.rhs.src);
    if (static_cast<int>(rv.slots.size()) != n)
      throw StructuralError("operand has wrong slot count");
    const int rr = instr.rhs.rot;
    for (int i = 0; i < n; ++i)
      out.slots[i] = apply_op(instr.op, lv.slots[(i + lr) % n], rv.slots[(i + rr) % n], t);
    out.depth = std::max(lv.depth, rv.depth) + (instr.op == Op::mul_ct_ct ? 1 : 0);
  }
  return out;
}

}  // namespace

CtValue eval_instruction(const Instruction& instr, const RingParams& params,
                         std::span<const CtValue> env, size_t num_inputs,
                         std::span<const PtConst> pt_consts) {
  return eval_dense(instr, params, env, num_inputs, pt_consts);
}

CtValue eval_program(const Program& p, std::span<const CtValue> inputs) {
  validate(p);
  if (inputs.size() != p.ct_inputs.size())
    throw StructuralError("expected " + std::to_string(p.ct_inputs.size()) + " inputs, got " +
                          std::to_string(inputs.size()));
  for (const CtValue& in : inputs) {
    if (static_cast<int>(in.slots.size()) != p.params.n)
      throw StructuralError("input has wrong slot count");
    for (uint32_t s : in.slots)
      if (s >= p.params.t) throw StructuralError("input slot out of range [0, t)");
  }

  std::vector<CtValue> dense(inputs.begin(), inputs.end());
  dense.reserve(inputs.size() + p.body.size());
  for (const Instruction& instr : p.body)
    dense.push_back(eval_dense(instr, p.params, dense, inputs.size(), p.pt_consts));
  return bound(dense, inputs.size(), p.result);
}

int mdepth(const Program& p) {
  validate(p);
  std::vector<int> depth(p.body.size(), 0);
  auto depth_of = [&](ValueRef r) { return r.is_input() ? 0 : depth[r.index()]; };
  for (size_t i = 0; i < p.body.size(); ++i) {
    const Instruction& instr = p.body[i];
    int d = depth_of(instr.lhs.src);
    if (!is_pt_op(instr.op)) d = std::max(d, depth_of(instr.rhs.src));
    if (instr.op == Op::mul_ct_ct || instr.op == Op::mul_ct_pt) d += 1;
    depth[i] = d;
  }
  return depth_of(p.result);
}

InstructionCount instruction_count(const Program& p) {
  std::set<std::pair<int32_t, int>> rotations;
  for (const Instruction& instr : p.body) {
    if (instr.lhs.rot != 0) rotations.emplace(instr.lhs.src.raw, instr.lhs.rot);
    if (!is_pt_op(instr.op) && instr.rhs.rot != 0)
      rotations.emplace(instr.rhs.src.raw, instr.rhs.rot);
  }
  InstructionCount c;
  c.arith = static_cast<int>(p.body.size());
  c.rotations = static_cast<int>(rotations.size());
  c.total = c.arith + c.rotations;
  return c;
}

int64_t op_weight(Op op, const CostModel& m) {
  switch (op) {
    case Op::add_ct_ct: return m.add_ct;
    case Op::sub_ct_ct: return m.sub_ct;
    case Op::mul_ct_ct: return m.mul_ct_ct;
    case Op::add_ct_pt: return m.add_pt;
    case Op::sub_ct_pt: return m.sub_pt;
    case Op::mul_ct_pt: return m.mul_ct_pt;
  }
  return 0;
}

int64_t estimated_latency(const Program& p, const CostModel& m) {
  int64_t lat = 0;
  for (const Instruction& instr : p.body) lat += op_weight(instr.op, m);
  lat += m.rotate * instruction_count(p).rotations;
  return lat;
}

int circuit_depth(const Program& p) {
  // Level of a value = longest chain of emitted instructions producing it,
  // where a rotated operand adds one level for its rotate instruction.
  std::vector<int> level(p.body.size(), 0);
  auto level_of = [&](const Operand& o) {
    int base = o.src.is_input() ? 0 : level[o.src.index()];
    return base + (o.rot != 0 ? 1 : 0);
  };
  for (size_t i = 0; i < p.body.size(); ++i) {
    const Instruction& instr = p.body[i];
    int l = level_of(instr.lhs);
    if (!is_pt_op(instr.op)) l = std::max(l, level_of(instr.rhs));
    level[i] = l + 1;
  }
  if (p.result.is_input()) return 0;
  return p.body.empty() ? 0 : level[p.result.index()];
}

}  // namespace hesynth
