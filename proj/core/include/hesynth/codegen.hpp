#pragma once

#include <map>
#include <string>
#include <vector>

#include "hesynth/program.hpp"

namespace hesynth {

struct CodegenError : Error {
  using Error::Error;
};

enum class BackendOp : uint8_t {
  rotate,
  add_ct_ct,
  sub_ct_ct,
  mul_ct_ct,
  add_ct_pt,
  sub_ct_pt,
  mul_ct_pt,
  relinearize,
};

const char* backend_op_name(BackendOp op);

// One backend instruction. rotate/arith entries define a new value whose id is
// their body index; relinearize is a maintenance marker on an existing value
// and defines nothing.
struct BackendInstr {
  BackendOp op;
  ValueRef a;      // rotate: source; arith: lhs; relinearize: target
  ValueRef b;      // arith ct-ct ops
  int pt = -1;     // arith ct-pt ops
  int amount = 0;  // rotate

  bool operator==(const BackendInstr&) const = default;
};

struct BackendProgram {
  RingParams params;
  std::vector<std::string> ct_inputs;
  std::vector<PtConst> pt_consts;
  std::vector<BackendInstr> body;
  ValueRef result{0};

  bool operator==(const BackendProgram&) const = default;
};

void validate(const BackendProgram& p);

// Lowers local-rotate form: each distinct (source, rot != 0) operand pair
// becomes one explicit rotate emitted at first use, and operands are rewritten
// to reference it. Semantics are preserved and the total entry count equals
// instruction_count(p).total.
BackendProgram explicate_rotations(const Program& p);

// Inserts a relinearize marker immediately after every ct*ct multiply and
// nothing else. Markers do not change simulated values.
BackendProgram insert_relinearization(const BackendProgram& p);

CtValue eval_backend(const BackendProgram& p, std::span<const CtValue> inputs);

int mdepth(const BackendProgram& p);

// Canonical JSON IR with explicit rotate/relinearize entries and depth
// metadata; parse(emit(p)) == p and emission is byte-stable.
std::string emit_json_ir(const BackendProgram& p);
BackendProgram parse_json_ir(const std::string& text);

// Text rendering template. Placeholders: {kernel} {n} {t} in the header,
// {dst} {a} {b} {pt} {amount} in per-op call patterns, {result} in the footer.
struct SourceTemplate {
  std::string header;
  std::map<BackendOp, std::string> calls;
  std::string footer;
};

// Call names follow the BFV evaluator interface the generated code targets.
SourceTemplate seal_template();

// Deterministic source rendering: declarations, one call per instruction in
// order, result marshaling. A template missing an opcode is a CodegenError.
std::string emit_backend_source(const BackendProgram& p, const SourceTemplate& tmpl,
                                const std::string& kernel_name);

}  // namespace hesynth
