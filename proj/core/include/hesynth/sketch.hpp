#pragma once

#include <string>
#include <vector>

#include "hesynth/program.hpp"

namespace hesynth {

// Allowed left-rotation amounts for rotation holes. Always contains 0, the
// "no rotation" choice.
struct RotationDomain {
  std::vector<int> amounts;  // sorted ascending

  static RotationDomain only_zero();
  static RotationDomain full(int n);
  // {0} plus every power of two below n.
  static RotationDomain pow2(int n);
  // {0} plus the offsets r*stride + c that align any element of an h x w
  // window with its anchor, normalized mod n. Odd extents center the window,
  // even extents anchor it at the top-left corner.
  static RotationDomain window(int h, int w, int stride, int n);

  bool contains(int r) const;
  void validate(int n) const;

  bool operator==(const RotationDomain&) const = default;
};

enum class HoleKind : uint8_t { ct, ct_rot };

// One opcode alternative a component may take, with its operand hole kinds.
// Rotate choices only appear in explicit-rotation sketches.
struct OpChoice {
  Op op = Op::add_ct_ct;
  HoleKind lhs = HoleKind::ct_rot;
  HoleKind rhs = HoleKind::ct_rot;
  int pt = -1;  // pt ops: index into Sketch::pt_consts
  bool is_rotate = false;

  bool operator==(const OpChoice&) const = default;
};

struct ComponentTemplate {
  std::vector<OpChoice> choices;

  bool operator==(const ComponentTemplate&) const = default;
};

// local_rotate: rotations ride on arithmetic operands. explicit_rotation:
// rotations are standalone components competing for sketch length; kept for
// the scalability comparison between the two styles.
enum class SketchStyle : uint8_t { local_rotate, explicit_rotation };

struct Sketch {
  RingParams ring;
  std::vector<std::string> ct_inputs;
  std::vector<PtConst> pt_consts;
  std::vector<ComponentTemplate> components;
  RotationDomain domain;
  SketchStyle style = SketchStyle::local_rotate;

  int length() const { return static_cast<int>(components.size()); }
};

// Uniform sketch: L components sharing one opcode choice set. The choice set
// acts as a multiset of multiplicity L; smaller programs are reached by
// iterating L upward, never by leaving components dead.
Sketch make_sketch(RingParams ring, std::vector<std::string> ct_inputs,
                   std::vector<PtConst> pt_consts, std::vector<OpChoice> opcodes, int length,
                   RotationDomain domain, SketchStyle style = SketchStyle::local_rotate);

void validate(const Sketch& sketch);

// Dense value index: ct inputs first, then components in order.
struct OperandChoice {
  int src = 0;
  int rot = 0;

  bool operator==(const OperandChoice&) const = default;
};

struct ComponentChoice {
  bool is_rotate = false;
  Op op = Op::add_ct_ct;
  OperandChoice lhs;
  OperandChoice rhs;   // ct-ct ops
  int pt = -1;         // pt ops
  int rot_amount = 0;  // rotate components

  bool operator==(const ComponentChoice&) const = default;
};

struct HoleAssignment {
  std::vector<ComponentChoice> components;

  bool operator==(const HoleAssignment&) const = default;
};

// Fills the holes. Rejects SSA violations, rotations outside the domain and
// opcodes outside a component's choice set. The program's result is the last
// component; nested rotations are unrepresentable by construction.
Program instantiate(const Sketch& sketch, const HoleAssignment& a);

// Sketch files: {"L":3, "opcodes":[...], "rotation_domain":"full"|"pow2"|
// {"window":[h,w,stride]}, ...}. Inputs and constants ride along.
std::string emit_sketch_json(const Sketch& sketch);
Sketch parse_sketch_json(const std::string& text);

}  // namespace hesynth
