#include "hesynth/sketch.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>

namespace hesynth {

using json = nlohmann::ordered_json;

RotationDomain RotationDomain::only_zero() { return RotationDomain{{0}}; }

RotationDomain RotationDomain::full(int n) {
  RotationDomain d;
  d.amounts.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) d.amounts[static_cast<size_t>(i)] = i;
  return d;
}

RotationDomain RotationDomain::pow2(int n) {
  if (!is_power_of_two(static_cast<uint64_t>(n)))
    throw StructuralError("pow2 domain: n must be a power of two");
  RotationDomain d;
  d.amounts.push_back(0);
  for (int r = 1; r < n; r *= 2) d.amounts.push_back(r);
  return d;
}

RotationDomain RotationDomain::window(int h, int w, int stride, int n) {
  if (h < 1 || w < 1 || stride < 1) throw StructuralError("window domain: bad window");
  if (w > stride || h * stride > n)
    throw StructuralError("window domain: window exceeds image bounds");
  int r_lo = (h % 2 == 1) ? -(h / 2) : 0;
  int r_hi = (h % 2 == 1) ? h / 2 : h - 1;
  int c_lo = (w % 2 == 1) ? -(w / 2) : 0;
  int c_hi = (w % 2 == 1) ? w / 2 : w - 1;
  std::set<int> offsets{0};
  for (int r = r_lo; r <= r_hi; ++r)
    for (int c = c_lo; c <= c_hi; ++c)
      offsets.insert(normalize_rotation(static_cast<long long>(r) * stride + c, n));
  RotationDomain d;
  d.amounts.assign(offsets.begin(), offsets.end());
  return d;
}

bool RotationDomain::contains(int r) const {
  return std::binary_search(amounts.begin(), amounts.end(), r);
}

void RotationDomain::validate(int n) const {
  if (!std::is_sorted(amounts.begin(), amounts.end()))
    throw StructuralError("rotation domain must be sorted");
  if (!contains(0)) throw StructuralError("rotation domain must contain 0");
  for (int r : amounts)
    if (r < 0 || r >= n) throw StructuralError("rotation domain amount out of [0, n)");
  if (std::adjacent_find(amounts.begin(), amounts.end()) != amounts.end())
    throw StructuralError("rotation domain has duplicates");
}

Sketch make_sketch(RingParams ring, std::vector<std::string> ct_inputs,
                   std::vector<PtConst> pt_consts, std::vector<OpChoice> opcodes, int length,
                   RotationDomain domain, SketchStyle style) {
  if (opcodes.empty()) throw StructuralError("make_sketch: empty opcode set");
  if (length < 1) throw StructuralError("make_sketch: L must be >= 1");
  // Fixed enumeration order: arithmetic opcodes by Op rank, rotates last.
  std::stable_sort(opcodes.begin(), opcodes.end(), [](const OpChoice& a, const OpChoice& b) {
    if (a.is_rotate != b.is_rotate) return !a.is_rotate;
    if (a.op != b.op) return static_cast<int>(a.op) < static_cast<int>(b.op);
    return a.pt < b.pt;
  });
  if (style == SketchStyle::explicit_rotation) {
    // Operands stay plain; alignment must go through rotate components.
    bool has_rotate = false;
    for (auto& c : opcodes) {
      if (c.is_rotate) has_rotate = true;
      c.lhs = HoleKind::ct;
      c.rhs = HoleKind::ct;
    }
    if (!has_rotate) {
      OpChoice rot;
      rot.is_rotate = true;
      opcodes.push_back(rot);
    }
  }
  Sketch s;
  s.ring = ring;
  s.ct_inputs = std::move(ct_inputs);
  s.pt_consts = std::move(pt_consts);
  s.components.assign(static_cast<size_t>(length), ComponentTemplate{opcodes});
  s.domain = std::move(domain);
  s.style = style;
  validate(s);
  return s;
}

void validate(const Sketch& sketch) {
  sketch.ring.validate();
  sketch.domain.validate(sketch.ring.n);
  if (sketch.components.empty()) throw StructuralError("sketch: L must be >= 1");
  if (sketch.ct_inputs.empty()) throw StructuralError("sketch: needs at least one ct input");
  for (const auto& comp : sketch.components) {
    if (comp.choices.empty()) throw StructuralError("sketch: component with empty choice set");
    for (const OpChoice& c : comp.choices) {
      if (c.is_rotate) {
        if (sketch.style != SketchStyle::explicit_rotation)
          throw StructuralError("sketch: rotate components need explicit_rotation style");
        continue;
      }
      if (is_pt_op(c.op) &&
          (c.pt < 0 || c.pt >= static_cast<int>(sketch.pt_consts.size())))
        throw StructuralError("sketch: pt opcode must pair with a declared constant");
    }
  }
}

namespace {

bool choice_allowed(const ComponentTemplate& tmpl, const ComponentChoice& c, HoleKind* lhs_kind,
                    HoleKind* rhs_kind) {
  for (const OpChoice& o : tmpl.choices) {
    if (c.is_rotate != o.is_rotate) continue;
    if (!c.is_rotate && (o.op != c.op || (is_pt_op(c.op) && o.pt != c.pt))) continue;
    *lhs_kind = o.lhs;
    *rhs_kind = o.rhs;
    return true;
  }
  return false;
}

}  // namespace

Program instantiate(const Sketch& sketch, const HoleAssignment& a) {
  validate(sketch);
  const int num_inputs = static_cast<int>(sketch.ct_inputs.size());
  if (a.components.size() != sketch.components.size())
    throw StructuralError("instantiate: assignment length does not match sketch");

  Program p;
  p.params = sketch.ring;
  p.ct_inputs = sketch.ct_inputs;
  p.pt_consts = sketch.pt_consts;

  // Dense value index -> (program ref, pending rotation). Rotate components in
  // explicit-rotation sketches fold into their consumers' operands, composing
  // amounts mod n, so emitted programs never nest rotations.
  struct Resolved {
    ValueRef ref;
    int rot = 0;
    bool defined = false;
  };
  std::vector<Resolved> values(static_cast<size_t>(num_inputs) + a.components.size());
  for (int i = 0; i < num_inputs; ++i)
    values[static_cast<size_t>(i)] = {ValueRef::input(i), 0, true};

  auto resolve = [&](const OperandChoice& oc, HoleKind kind, int comp_index) -> Operand {
    if (oc.src < 0 || oc.src >= num_inputs + comp_index)
      throw StructuralError("instantiate: operand violates SSA order");
    const Resolved& r = values[static_cast<size_t>(oc.src)];
    if (!r.defined) throw StructuralError("instantiate: operand references a hole");
    if (kind == HoleKind::ct && oc.rot != 0)
      throw StructuralError("instantiate: plain ct hole cannot carry a rotation");
    if (!sketch.domain.contains(oc.rot))
      throw StructuralError("instantiate: rotation outside the declared domain");
    int rot = normalize_rotation(r.rot + oc.rot, sketch.ring.n);
    return Operand{r.ref, rot};
  };

  for (size_t k = 0; k < a.components.size(); ++k) {
    const ComponentChoice& c = a.components[k];
    HoleKind lhs_kind{}, rhs_kind{};
    if (!choice_allowed(sketch.components[k], c, &lhs_kind, &rhs_kind))
      throw StructuralError("instantiate: opcode outside the component's choice set");
    const int dense = num_inputs + static_cast<int>(k);
    if (c.is_rotate) {
      if (!sketch.domain.contains(c.rot_amount))
        throw StructuralError("instantiate: rotation outside the declared domain");
      Operand base = resolve(c.lhs, HoleKind::ct, static_cast<int>(k));
      values[static_cast<size_t>(dense)] = {
          base.src, normalize_rotation(base.rot + c.rot_amount, sketch.ring.n), true};
      continue;
    }
    Instruction instr;
    instr.op = c.op;
    instr.lhs = resolve(c.lhs, lhs_kind, static_cast<int>(k));
    if (is_pt_op(c.op)) {
      instr.pt = c.pt;
    } else {
      instr.rhs = resolve(c.rhs, rhs_kind, static_cast<int>(k));
    }
    p.body.push_back(instr);
    values[static_cast<size_t>(dense)] = {ValueRef::instr(static_cast<int>(p.body.size()) - 1), 0,
                                          true};
  }

  if (a.components.empty() || a.components.back().is_rotate)
    throw StructuralError("instantiate: the final component must be arithmetic");
  p.result = values.back().ref;
  validate(p);
  return p;
}

namespace {

json domain_to_json(const RotationDomain& d, int n) {
  if (d == RotationDomain::full(n)) return json("full");
  if (is_power_of_two(static_cast<uint64_t>(n)) && d == RotationDomain::pow2(n))
    return json("pow2");
  return json{{"amounts", d.amounts}};
}

RotationDomain domain_from_json(const json& j, int n) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "full") return RotationDomain::full(n);
    if (s == "pow2") return RotationDomain::pow2(n);
    throw ParseError("sketch: unknown rotation domain '" + s + "'");
  }
  if (j.contains("window")) {
    auto v = j.at("window").get<std::vector<int>>();
    if (v.size() != 3) throw ParseError("sketch: window domain needs [h, w, stride]");
    return RotationDomain::window(v[0], v[1], v[2], n);
  }
  RotationDomain d;
  d.amounts = j.at("amounts").get<std::vector<int>>();
  return d;
}

json op_choice_to_json(const Sketch& s, const OpChoice& c) {
  if (c.is_rotate) return json{{"op", "rotate"}};
  json j{{"op", op_name(c.op)},
         {"lhs", c.lhs == HoleKind::ct ? "ct" : "ct_rot"}};
  if (is_pt_op(c.op))
    j["pt"] = s.pt_consts[c.pt].name;
  else
    j["rhs"] = c.rhs == HoleKind::ct ? "ct" : "ct_rot";
  return j;
}

OpChoice op_choice_from_json(const Sketch& s, const json& j) {
  OpChoice c;
  std::string op = j.at("op").get<std::string>();
  if (op == "rotate") {
    c.is_rotate = true;
    return c;
  }
  c.op = op_from_name(op);
  auto kind = [](const std::string& k) {
    if (k == "ct") return HoleKind::ct;
    if (k == "ct_rot") return HoleKind::ct_rot;
    throw ParseError("sketch: unknown hole kind '" + k + "'");
  };
  c.lhs = kind(j.value("lhs", std::string("ct_rot")));
  if (is_pt_op(c.op)) {
    std::string name = j.at("pt").get<std::string>();
    c.pt = -1;
    for (size_t i = 0; i < s.pt_consts.size(); ++i)
      if (s.pt_consts[i].name == name) c.pt = static_cast<int>(i);
    if (c.pt < 0) throw ParseError("sketch: unknown pt constant '" + name + "'");
  } else {
    c.rhs = kind(j.value("rhs", std::string("ct_rot")));
  }
  return c;
}

}  // namespace

std::string emit_sketch_json(const Sketch& sketch) {
  validate(sketch);
  json j;
  j["ring"] = {{"n", sketch.ring.n}, {"t", sketch.ring.t}};
  j["ct_inputs"] = sketch.ct_inputs;
  j["pt_consts"] = json::array();
  for (const auto& pc : sketch.pt_consts)
    j["pt_consts"].push_back(json{{"name", pc.name}, {"slots", pc.value.slots}});
  j["style"] =
      sketch.style == SketchStyle::explicit_rotation ? "explicit_rotation" : "local_rotate";
  j["L"] = sketch.length();
  bool uniform = std::all_of(sketch.components.begin(), sketch.components.end(),
                             [&](const ComponentTemplate& c) { return c == sketch.components[0]; });
  auto comp_to_json = [&](const ComponentTemplate& c) {
    json arr = json::array();
    for (const OpChoice& o : c.choices) arr.push_back(op_choice_to_json(sketch, o));
    return arr;
  };
  if (uniform) {
    j["opcodes"] = comp_to_json(sketch.components[0]);
  } else {
    j["components"] = json::array();
    for (const auto& c : sketch.components) j["components"].push_back(comp_to_json(c));
  }
  j["rotation_domain"] = domain_to_json(sketch.domain, sketch.ring.n);
  return j.dump(2) + "\n";
}

Sketch parse_sketch_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("sketch json: ") + e.what());
  }
  try {
    Sketch s;
    s.ring.n = j.at("ring").at("n").get<int>();
    s.ring.t = j.at("ring").at("t").get<uint32_t>();
    s.ct_inputs = j.at("ct_inputs").get<std::vector<std::string>>();
    for (const auto& jc : j.value("pt_consts", json::array())) {
      PtConst pc;
      pc.name = jc.at("name").get<std::string>();
      pc.value.slots = jc.at("slots").get<std::vector<uint32_t>>();
      s.pt_consts.push_back(std::move(pc));
    }
    s.style = j.value("style", std::string("local_rotate")) == "explicit_rotation"
                  ? SketchStyle::explicit_rotation
                  : SketchStyle::local_rotate;
    s.domain = domain_from_json(j.at("rotation_domain"), s.ring.n);
    if (j.contains("components")) {
      for (const auto& jc : j.at("components")) {
        ComponentTemplate tmpl;
        for (const auto& jo : jc) tmpl.choices.push_back(op_choice_from_json(s, jo));
        s.components.push_back(std::move(tmpl));
      }
    } else {
      int length = j.at("L").get<int>();
      ComponentTemplate tmpl;
      for (const auto& jo : j.at("opcodes")) tmpl.choices.push_back(op_choice_from_json(s, jo));
      s.components.assign(static_cast<size_t>(length), tmpl);
    }
    validate(s);
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("sketch json: ") + e.what());
  }
}

}  // namespace hesynth
