#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hesynth/cost_model.hpp"
#include "hesynth/ring.hpp"

namespace hesynth {

// A behavioral ciphertext: n residues mod t plus a multiplicative-depth counter.
struct CtValue {
  std::vector<uint32_t> slots;
  int depth = 0;

  bool operator==(const CtValue&) const = default;
};

struct PtValue {
  std::vector<uint32_t> slots;

  bool operator==(const PtValue&) const = default;
};

struct PtConst {
  std::string name;
  PtValue value;

  bool operator==(const PtConst&) const = default;
};

// Reference to a ciphertext input or an earlier instruction (SSA id).
struct ValueRef {
  int32_t raw = 0;  // >= 0: instruction index; < 0: input index -raw-1

  static ValueRef input(int i) { return ValueRef{-i - 1}; }
  static ValueRef instr(int i) { return ValueRef{i}; }
  bool is_input() const { return raw < 0; }
  int index() const { return raw < 0 ? -raw - 1 : raw; }

  bool operator==(const ValueRef&) const = default;
  auto operator<=>(const ValueRef&) const = default;
};

enum class Op : uint8_t {
  add_ct_ct,
  sub_ct_ct,
  mul_ct_pt,
  add_ct_pt,
  sub_ct_pt,
  mul_ct_ct,
};

constexpr bool is_pt_op(Op op) {
  return op == Op::add_ct_pt || op == Op::sub_ct_pt || op == Op::mul_ct_pt;
}
constexpr bool is_commutative(Op op) { return op == Op::add_ct_ct || op == Op::mul_ct_ct; }

const char* op_name(Op op);
Op op_from_name(const std::string& name);

// Ciphertext operand in local-rotate form: a source value plus a left-rotation
// amount in [0, n); rot == 0 means no rotation.
struct Operand {
  ValueRef src;
  int rot = 0;

  bool operator==(const Operand&) const = default;
  auto operator<=>(const Operand&) const = default;
};

struct Instruction {
  Op op;
  Operand lhs;
  Operand rhs;  // ct-ct ops only
  int pt = -1;  // pt ops only: index into Program::pt_consts

  bool operator==(const Instruction&) const = default;
};

// Straight-line SSA program over the behavioral HE instruction set.
struct Program {
  RingParams params;
  std::vector<std::string> ct_inputs;
  std::vector<PtConst> pt_consts;
  std::vector<Instruction> body;
  ValueRef result{0};

  bool operator==(const Program&) const = default;

  int input_index(const std::string& name) const;
};

// Throws StructuralError on SSA violations, bad refs or out-of-range rotations.
void validate(const Program& p);

// out[i] = v[(i + x) mod n]; x may be any integer and is reduced mod n.
std::vector<uint32_t> rotate_slots(std::span<const uint32_t> v, long long x, uint32_t t_unused = 0);

// Evaluates one instruction against an environment of already-bound values,
// laid out densely: the ct inputs first, then prior instruction results.
CtValue eval_instruction(const Instruction& instr, const RingParams& params,
                         std::span<const CtValue> env, size_t num_inputs,
                         std::span<const PtConst> pt_consts);

// Sequential evaluation; inputs are bound positionally to p.ct_inputs.
CtValue eval_program(const Program& p, std::span<const CtValue> inputs);

// Depth of p.result when all inputs are fresh (depth 0).
int mdepth(const Program& p);

struct InstructionCount {
  int arith = 0;
  int rotations = 0;  // distinct (source, rot != 0) operand pairs
  int total = 0;

  bool operator==(const InstructionCount&) const = default;
};

InstructionCount instruction_count(const Program& p);

int64_t estimated_latency(const Program& p, const CostModel& m);

int64_t op_weight(Op op, const CostModel& m);

// Longest instruction-level path through the explicated DAG, counting each
// arithmetic instruction and each distinct rotation as one level.
int circuit_depth(const Program& p);

}  // namespace hesynth
