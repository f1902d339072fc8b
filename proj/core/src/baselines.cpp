#include "hesynth/bench.hpp"

namespace hesynth {

namespace {

// Small helper for writing the baseline fixtures by hand.
struct ProgramBuilder {
  Program p;

  explicit ProgramBuilder(RingParams ring, std::vector<std::string> inputs,
                          std::vector<PtConst> pt_consts = {}) {
    p.params = ring;
    p.ct_inputs = std::move(inputs);
    p.pt_consts = std::move(pt_consts);
  }

  Operand in(int i, int rot = 0) { return Operand{ValueRef::input(i), rot}; }
  Operand at(ValueRef v, int rot = 0) { return Operand{v, rot}; }

  ValueRef emit(Op op, Operand lhs, Operand rhs) {
    p.body.push_back(Instruction{op, lhs, rhs, -1});
    return ValueRef::instr(static_cast<int>(p.body.size()) - 1);
  }
  ValueRef emit_pt(Op op, Operand lhs, int pt) {
    p.body.push_back(Instruction{op, lhs, Operand{}, pt});
    return ValueRef::instr(static_cast<int>(p.body.size()) - 1);
  }

  Program finish(ValueRef result) {
    p.result = result;
    validate(p);
    return p;
  }
};

Program baseline_box_blur(RingParams ring, int w) {
  ProgramBuilder b(ring, {"img"});
  // Align the four window elements, then a balanced add tree.
  ValueRef s1 = b.emit(Op::add_ct_ct, b.in(0), b.in(0, 1));
  ValueRef s2 = b.emit(Op::add_ct_ct, b.in(0, w), b.in(0, w + 1));
  return b.finish(b.emit(Op::add_ct_ct, b.at(s1), b.at(s2)));
}

ValueRef reduce_tree(ProgramBuilder& b, ValueRef v, int length) {
  for (int step = length / 2; step >= 1; step /= 2)
    v = b.emit(Op::add_ct_ct, b.at(v), b.at(v, step));
  return v;
}

Program baseline_dot_product(RingParams ring, int length) {
  ProgramBuilder b(ring, {"a", "b"});
  ValueRef m = b.emit(Op::mul_ct_ct, b.in(0), b.in(1));
  return b.finish(reduce_tree(b, m, length));
}

Program baseline_squared_distance(RingParams ring, int length) {
  ProgramBuilder b(ring, {"x", "y"});
  ValueRef d = b.emit(Op::sub_ct_ct, b.in(0), b.in(1));
  ValueRef m = b.emit(Op::mul_ct_ct, b.at(d), b.at(d));
  return b.finish(reduce_tree(b, m, length));
}

Program baseline_linear_regression(const KernelSpec& spec, bool ct_coeffs) {
  if (ct_coeffs) {
    ProgramBuilder b(spec.ring, {"x", "a", "b"});
    ValueRef m = b.emit(Op::mul_ct_ct, b.in(0), b.in(1));
    return b.finish(b.emit(Op::add_ct_ct, b.at(m), b.in(2)));
  }
  ProgramBuilder b(spec.ring, {"x"}, spec.pt_consts);
  ValueRef m = b.emit_pt(Op::mul_ct_pt, b.in(0), 0);
  return b.finish(b.emit_pt(Op::add_ct_pt, b.at(m), 1));
}

Program baseline_polynomial_regression(const KernelSpec& spec, bool ct_coeffs) {
  if (ct_coeffs) {
    ProgramBuilder b(spec.ring, {"x", "a", "b", "c"});
    ValueRef x2 = b.emit(Op::mul_ct_ct, b.in(0), b.in(0));
    ValueRef t2 = b.emit(Op::mul_ct_ct, b.in(1), b.at(x2));
    ValueRef t1 = b.emit(Op::mul_ct_ct, b.in(2), b.in(0));
    ValueRef s = b.emit(Op::add_ct_ct, b.at(t2), b.at(t1));
    return b.finish(b.emit(Op::add_ct_ct, b.at(s), b.in(3)));
  }
  // Unfactored depth-minimizing form: a*x^2 and b*x in parallel, then sum.
  ProgramBuilder b(spec.ring, {"x"}, spec.pt_consts);
  ValueRef x2 = b.emit(Op::mul_ct_ct, b.in(0), b.in(0));
  ValueRef t2 = b.emit_pt(Op::mul_ct_pt, b.at(x2), 0);
  ValueRef t1 = b.emit_pt(Op::mul_ct_pt, b.in(0), 1);
  ValueRef s = b.emit(Op::add_ct_ct, b.at(t2), b.at(t1));
  return b.finish(b.emit_pt(Op::add_ct_pt, b.at(s), 2));
}

// Gradient baselines pair mirrored taps with subtractions, then add in a
// balanced tree; the doubled center tap becomes an addition of the same value.
Program baseline_gradient(RingParams ring, int stride, bool horizontal) {
  const int n = ring.n;
  auto off = [&](int r, int c) { return normalize_rotation(r * stride + c, n); };
  ProgramBuilder b(ring, {"img"});
  ValueRef d1, d2, d3;
  if (horizontal) {
    // x-gradient: column difference smoothed across rows.
    d1 = b.emit(Op::sub_ct_ct, b.in(0, off(-1, 1)), b.in(0, off(-1, -1)));
    d2 = b.emit(Op::sub_ct_ct, b.in(0, off(0, 1)), b.in(0, off(0, -1)));
    d3 = b.emit(Op::sub_ct_ct, b.in(0, off(1, 1)), b.in(0, off(1, -1)));
  } else {
    // y-gradient: row difference smoothed across columns.
    d1 = b.emit(Op::sub_ct_ct, b.in(0, off(1, -1)), b.in(0, off(-1, -1)));
    d2 = b.emit(Op::sub_ct_ct, b.in(0, off(1, 0)), b.in(0, off(-1, 0)));
    d3 = b.emit(Op::sub_ct_ct, b.in(0, off(1, 1)), b.in(0, off(-1, 1)));
  }
  ValueRef t1 = b.emit(Op::add_ct_ct, b.at(d1), b.at(d3));
  ValueRef t2 = b.emit(Op::add_ct_ct, b.at(d2), b.at(d2));
  return b.finish(b.emit(Op::add_ct_ct, b.at(t1), b.at(t2)));
}

Program baseline_roberts_cross(RingParams ring, int stride) {
  const int n = ring.n;
  auto off = [&](int r, int c) { return normalize_rotation(r * stride + c, n); };
  ProgramBuilder b(ring, {"img"});
  ValueRef d1 = b.emit(Op::sub_ct_ct, b.in(0), b.in(0, off(1, 1)));
  ValueRef d2 = b.emit(Op::sub_ct_ct, b.in(0, off(0, 1)), b.in(0, off(1, 0)));
  ValueRef m1 = b.emit(Op::mul_ct_ct, b.at(d1), b.at(d1));
  ValueRef m2 = b.emit(Op::mul_ct_ct, b.at(d2), b.at(d2));
  return b.finish(b.emit(Op::add_ct_ct, b.at(m1), b.at(m2)));
}

}  // namespace

Program build_baseline(const KernelConfig& config) {
  KernelConfig defaults = kernel_defaults(config.kernel);
  RingParams ring{config.n > 0 ? config.n : defaults.n, config.t};
  const int length = config.length > 0 ? config.length : defaults.length;
  const int w = config.image_w > 0 ? config.image_w : defaults.image_w;

  const std::string& k = config.kernel;
  if (k == "box_blur") return baseline_box_blur(ring, w);
  if (k == "dot_product") return baseline_dot_product(ring, length);
  if (k == "hamming" || k == "l2_distance") return baseline_squared_distance(ring, length);
  if (k == "linear_regression")
    return baseline_linear_regression(build_kernel(config), config.ct_coeffs);
  if (k == "polynomial_regression")
    return baseline_polynomial_regression(build_kernel(config), config.ct_coeffs);
  if (k == "gx") return baseline_gradient(ring, w, true);
  if (k == "gy") return baseline_gradient(ring, w, false);
  if (k == "roberts_cross") return baseline_roberts_cross(ring, w);
  throw StructuralError("no baseline for kernel: " + k);
}

SketchFamily build_sketch(const KernelConfig& config) {
  KernelConfig defaults = kernel_defaults(config.kernel);
  RingParams ring{config.n > 0 ? config.n : defaults.n, config.t};
  const int w = config.image_w > 0 ? config.image_w : defaults.image_w;
  KernelSpec spec = build_kernel(config);

  SketchFamily family;
  family.ring = ring;
  for (const auto& in : spec.inputs) family.ct_inputs.push_back(in.name);

  auto rot_choice = [](Op op) { return OpChoice{op, HoleKind::ct_rot, HoleKind::ct_rot, -1}; };
  auto ct_choice = [](Op op) { return OpChoice{op, HoleKind::ct, HoleKind::ct, -1}; };

  const int length = config.length > 0 ? config.length : defaults.length;
  const std::string& k = config.kernel;
  if (k == "box_blur") {
    family.domain = RotationDomain::window(2, 2, w, ring.n);
    family.opcodes = {rot_choice(Op::add_ct_ct)};
  } else if (k == "dot_product") {
    // Tree reduction over `length` packed slots: powers of two below it.
    family.domain = RotationDomain::pow2(length);
    family.opcodes = {rot_choice(Op::add_ct_ct), rot_choice(Op::mul_ct_ct)};
  } else if (k == "hamming") {
    family.domain = RotationDomain::pow2(ring.n);
    family.opcodes = {rot_choice(Op::add_ct_ct), rot_choice(Op::sub_ct_ct),
                      rot_choice(Op::mul_ct_ct)};
  } else if (k == "l2_distance") {
    family.domain = RotationDomain::pow2(length);
    family.opcodes = {rot_choice(Op::add_ct_ct), rot_choice(Op::sub_ct_ct),
                      rot_choice(Op::mul_ct_ct)};
  } else if (k == "linear_regression") {
    family.domain = RotationDomain::only_zero();
    if (config.ct_coeffs) {
      family.opcodes = {ct_choice(Op::add_ct_ct), ct_choice(Op::mul_ct_ct)};
    } else {
      family.pt_consts = spec.pt_consts;
      family.opcodes = {OpChoice{Op::mul_ct_pt, HoleKind::ct, HoleKind::ct, 0},
                        OpChoice{Op::add_ct_pt, HoleKind::ct, HoleKind::ct, 1},
                        ct_choice(Op::add_ct_ct)};
    }
  } else if (k == "polynomial_regression") {
    family.domain = RotationDomain::only_zero();
    if (config.ct_coeffs) {
      family.opcodes = {ct_choice(Op::add_ct_ct), ct_choice(Op::mul_ct_ct)};
    } else {
      family.pt_consts = spec.pt_consts;
      family.opcodes = {ct_choice(Op::add_ct_ct), ct_choice(Op::mul_ct_ct)};
      for (int pt = 0; pt < 3; ++pt) {
        family.opcodes.push_back(OpChoice{Op::mul_ct_pt, HoleKind::ct, HoleKind::ct, pt});
        family.opcodes.push_back(OpChoice{Op::add_ct_pt, HoleKind::ct, HoleKind::ct, pt});
      }
    }
  } else if (k == "gx" || k == "gy") {
    family.domain = RotationDomain::window(3, 3, w, ring.n);
    family.pt_consts = {PtConst{
        "two", PtValue{std::vector<uint32_t>(static_cast<size_t>(ring.n), 2)}}};
    family.opcodes = {rot_choice(Op::add_ct_ct), rot_choice(Op::sub_ct_ct),
                      OpChoice{Op::mul_ct_pt, HoleKind::ct, HoleKind::ct, 0}};
  } else if (k == "roberts_cross") {
    // Rotation holes only where alignment happens (the differences); the
    // squares and the final sum run slot-aligned.
    family.domain = RotationDomain::window(2, 2, w, ring.n);
    family.opcodes = {ct_choice(Op::add_ct_ct), rot_choice(Op::sub_ct_ct),
                      ct_choice(Op::mul_ct_ct)};
  } else {
    throw StructuralError("no sketch for kernel: " + k);
  }
  return family;
}

}  // namespace hesynth
