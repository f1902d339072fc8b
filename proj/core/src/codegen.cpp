#include "hesynth/codegen.hpp"

#include <algorithm>
#include <json.hpp>

namespace hesynth {

using json = nlohmann::ordered_json;

const char* backend_op_name(BackendOp op) {
  switch (op) {
    case BackendOp::rotate: return "rotate";
    case BackendOp::add_ct_ct: return "add_ct_ct";
    case BackendOp::sub_ct_ct: return "sub_ct_ct";
    case BackendOp::mul_ct_ct: return "mul_ct_ct";
    case BackendOp::add_ct_pt: return "add_ct_pt";
    case BackendOp::sub_ct_pt: return "sub_ct_pt";
    case BackendOp::mul_ct_pt: return "mul_ct_pt";
    case BackendOp::relinearize: return "relinearize";
  }
  return "?";
}

namespace {

BackendOp backend_op_from_name(const std::string& name) {
  for (BackendOp op : {BackendOp::rotate, BackendOp::add_ct_ct, BackendOp::sub_ct_ct,
                       BackendOp::mul_ct_ct, BackendOp::add_ct_pt, BackendOp::sub_ct_pt,
                       BackendOp::mul_ct_pt, BackendOp::relinearize})
    if (name == backend_op_name(op)) return op;
  throw ParseError("unknown backend opcode: " + name);
}

bool is_ct_ct(BackendOp op) {
  return op == BackendOp::add_ct_ct || op == BackendOp::sub_ct_ct || op == BackendOp::mul_ct_ct;
}
bool is_ct_pt(BackendOp op) {
  return op == BackendOp::add_ct_pt || op == BackendOp::sub_ct_pt || op == BackendOp::mul_ct_pt;
}
bool defines_value(BackendOp op) { return op != BackendOp::relinearize; }

void check_backend_ref(const BackendProgram& p, ValueRef r, int index) {
  if (r.is_input()) {
    if (r.index() >= static_cast<int>(p.ct_inputs.size()))
      throw StructuralError("backend: unbound input reference");
    return;
  }
  if (r.index() >= index) throw StructuralError("backend: reference breaks SSA order");
  if (!defines_value(p.body[static_cast<size_t>(r.index())].op))
    throw StructuralError("backend: reference to a non-defining entry");
}

}  // namespace

void validate(const BackendProgram& p) {
  p.params.validate();
  for (const auto& pc : p.pt_consts)
    if (pc.value.slots.size() != static_cast<size_t>(p.params.n))
      throw StructuralError("backend: pt const has wrong slot count");
  for (size_t i = 0; i < p.body.size(); ++i) {
    const BackendInstr& bi = p.body[i];
    check_backend_ref(p, bi.a, static_cast<int>(i));
    if (is_ct_ct(bi.op)) check_backend_ref(p, bi.b, static_cast<int>(i));
    if (is_ct_pt(bi.op) && (bi.pt < 0 || bi.pt >= static_cast<int>(p.pt_consts.size())))
      throw StructuralError("backend: unbound plaintext constant");
    if (bi.op == BackendOp::rotate && (bi.amount <= 0 || bi.amount >= p.params.n))
      throw StructuralError("backend: rotate amount must lie in (0, n)");
  }
  check_backend_ref(p, p.result, static_cast<int>(p.body.size()));
}

BackendProgram explicate_rotations(const Program& p) {
  validate(p);
  BackendProgram out;
  out.params = p.params;
  out.ct_inputs = p.ct_inputs;
  out.pt_consts = p.pt_consts;

  std::vector<ValueRef> instr_value(p.body.size());  // local-rotate instr -> backend value
  std::map<std::pair<int32_t, int>, ValueRef> rotations;

  auto backend_ref = [&](ValueRef r) {
    return r.is_input() ? r : instr_value[static_cast<size_t>(r.index())];
  };
  auto resolve = [&](const Operand& o) -> ValueRef {
    ValueRef base = backend_ref(o.src);
    if (o.rot == 0) return base;
    auto key = std::make_pair(o.src.raw, o.rot);
    auto it = rotations.find(key);
    if (it != rotations.end()) return it->second;
    BackendInstr rot;
    rot.op = BackendOp::rotate;
    rot.a = base;
    rot.amount = o.rot;
    out.body.push_back(rot);
    ValueRef ref = ValueRef::instr(static_cast<int>(out.body.size()) - 1);
    rotations.emplace(key, ref);
    return ref;
  };

  for (size_t i = 0; i < p.body.size(); ++i) {
    const Instruction& instr = p.body[i];
    BackendInstr bi;
    switch (instr.op) {
      case Op::add_ct_ct: bi.op = BackendOp::add_ct_ct; break;
      case Op::sub_ct_ct: bi.op = BackendOp::sub_ct_ct; break;
      case Op::mul_ct_ct: bi.op = BackendOp::mul_ct_ct; break;
      case Op::add_ct_pt: bi.op = BackendOp::add_ct_pt; break;
      case Op::sub_ct_pt: bi.op = BackendOp::sub_ct_pt; break;
      case Op::mul_ct_pt: bi.op = BackendOp::mul_ct_pt; break;
    }
    bi.a = resolve(instr.lhs);
    if (is_pt_op(instr.op))
      bi.pt = instr.pt;
    else
      bi.b = resolve(instr.rhs);
    out.body.push_back(bi);
    instr_value[i] = ValueRef::instr(static_cast<int>(out.body.size()) - 1);
  }
  out.result = backend_ref(p.result);
  validate(out);
  return out;
}

BackendProgram insert_relinearization(const BackendProgram& p) {
  validate(p);
  BackendProgram out;
  out.params = p.params;
  out.ct_inputs = p.ct_inputs;
  out.pt_consts = p.pt_consts;

  std::vector<int> remap(p.body.size(), -1);
  auto fix = [&](ValueRef r) {
    return r.is_input() ? r : ValueRef::instr(remap[static_cast<size_t>(r.index())]);
  };
  for (size_t i = 0; i < p.body.size(); ++i) {
    BackendInstr bi = p.body[i];
    bi.a = fix(bi.a);
    if (is_ct_ct(bi.op)) bi.b = fix(bi.b);
    out.body.push_back(bi);
    remap[i] = static_cast<int>(out.body.size()) - 1;
    if (bi.op == BackendOp::mul_ct_ct) {
      BackendInstr relin;
      relin.op = BackendOp::relinearize;
      relin.a = ValueRef::instr(remap[i]);
      out.body.push_back(relin);
    }
  }
  out.result = fix(p.result);
  validate(out);
  return out;
}

CtValue eval_backend(const BackendProgram& p, std::span<const CtValue> inputs) {
  validate(p);
  if (inputs.size() != p.ct_inputs.size())
    throw StructuralError("backend: input arity mismatch");
  const int n = p.params.n;
  const uint32_t t = p.params.t;
  std::vector<CtValue> defined(p.body.size());
  auto value = [&](ValueRef r) -> const CtValue& {
    return r.is_input() ? inputs[static_cast<size_t>(r.index())]
                        : defined[static_cast<size_t>(r.index())];
  };
  for (size_t i = 0; i < p.body.size(); ++i) {
    const BackendInstr& bi = p.body[i];
    if (bi.op == BackendOp::relinearize) continue;  // transparent to the model
    const CtValue& a = value(bi.a);
    CtValue v;
    v.slots.resize(static_cast<size_t>(n));
    if (bi.op == BackendOp::rotate) {
      v.slots = rotate_slots(a.slots, bi.amount);
      v.depth = a.depth;
    } else if (is_ct_pt(bi.op)) {
      const PtValue& pv = p.pt_consts[static_cast<size_t>(bi.pt)].value;
      for (int s = 0; s < n; ++s) {
        uint32_t x = a.slots[static_cast<size_t>(s)], y = pv.slots[static_cast<size_t>(s)];
        v.slots[static_cast<size_t>(s)] = bi.op == BackendOp::add_ct_pt ? mod_add(x, y, t)
                                          : bi.op == BackendOp::sub_ct_pt ? mod_sub(x, y, t)
                                                                          : mod_mul(x, y, t);
      }
      v.depth = a.depth + (bi.op == BackendOp::mul_ct_pt ? 1 : 0);
    } else {
      const CtValue& b = value(bi.b);
      for (int s = 0; s < n; ++s) {
        uint32_t x = a.slots[static_cast<size_t>(s)], y = b.slots[static_cast<size_t>(s)];
        v.slots[static_cast<size_t>(s)] = bi.op == BackendOp::add_ct_ct ? mod_add(x, y, t)
                                          : bi.op == BackendOp::sub_ct_ct ? mod_sub(x, y, t)
                                                                          : mod_mul(x, y, t);
      }
      v.depth = std::max(a.depth, b.depth) + (bi.op == BackendOp::mul_ct_ct ? 1 : 0);
    }
    defined[i] = std::move(v);
  }
  return value(p.result);
}

int mdepth(const BackendProgram& p) {
  std::vector<int> depth(p.body.size(), 0);
  auto of = [&](ValueRef r) { return r.is_input() ? 0 : depth[static_cast<size_t>(r.index())]; };
  for (size_t i = 0; i < p.body.size(); ++i) {
    const BackendInstr& bi = p.body[i];
    int d = of(bi.a);
    if (is_ct_ct(bi.op)) d = std::max(d, of(bi.b));
    if (bi.op == BackendOp::mul_ct_ct || bi.op == BackendOp::mul_ct_pt) d += 1;
    depth[i] = d;
  }
  return of(p.result);
}

namespace {

std::string backend_ref_name(const BackendProgram& p, ValueRef r) {
  if (r.is_input()) return p.ct_inputs[static_cast<size_t>(r.index())];
  return "%" + std::to_string(r.index());
}

ValueRef backend_ref_parse(const BackendProgram& p, const std::string& s) {
  if (!s.empty() && s[0] == '%') {
    try {
      return ValueRef::instr(std::stoi(s.substr(1)));
    } catch (const std::exception&) {
      throw ParseError("backend ir: bad reference " + s);
    }
  }
  for (size_t i = 0; i < p.ct_inputs.size(); ++i)
    if (p.ct_inputs[i] == s) return ValueRef::input(static_cast<int>(i));
  throw ParseError("backend ir: unknown input " + s);
}

}  // namespace

std::string emit_json_ir(const BackendProgram& p) {
  validate(p);
  json j;
  j["params"] = {{"n", p.params.n}, {"t", p.params.t}};
  j["ct_inputs"] = p.ct_inputs;
  j["pt_consts"] = json::array();
  for (const auto& pc : p.pt_consts)
    j["pt_consts"].push_back(json{{"name", pc.name}, {"slots", pc.value.slots}});
  j["body"] = json::array();
  for (const BackendInstr& bi : p.body) {
    json ji;
    ji["op"] = backend_op_name(bi.op);
    if (bi.op == BackendOp::rotate) {
      ji["src"] = backend_ref_name(p, bi.a);
      ji["amount"] = bi.amount;
    } else if (bi.op == BackendOp::relinearize) {
      ji["target"] = backend_ref_name(p, bi.a);
    } else {
      ji["lhs"] = backend_ref_name(p, bi.a);
      if (is_ct_pt(bi.op))
        ji["pt"] = p.pt_consts[static_cast<size_t>(bi.pt)].name;
      else
        ji["rhs"] = backend_ref_name(p, bi.b);
    }
    j["body"].push_back(std::move(ji));
  }
  j["result"] = backend_ref_name(p, p.result);
  j["mdepth"] = mdepth(p);
  return j.dump(2) + "\n";
}

BackendProgram parse_json_ir(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("backend ir json: ") + e.what());
  }
  try {
    BackendProgram p;
    p.params.n = j.at("params").at("n").get<int>();
    p.params.t = j.at("params").at("t").get<uint32_t>();
    p.ct_inputs = j.at("ct_inputs").get<std::vector<std::string>>();
    for (const auto& jc : j.value("pt_consts", json::array())) {
      PtConst pc;
      pc.name = jc.at("name").get<std::string>();
      pc.value.slots = jc.at("slots").get<std::vector<uint32_t>>();
      p.pt_consts.push_back(std::move(pc));
    }
    for (const auto& ji : j.at("body")) {
      BackendInstr bi;
      bi.op = backend_op_from_name(ji.at("op").get<std::string>());
      if (bi.op == BackendOp::rotate) {
        bi.a = backend_ref_parse(p, ji.at("src").get<std::string>());
        bi.amount = ji.at("amount").get<int>();
      } else if (bi.op == BackendOp::relinearize) {
        bi.a = backend_ref_parse(p, ji.at("target").get<std::string>());
      } else {
        bi.a = backend_ref_parse(p, ji.at("lhs").get<std::string>());
        if (is_ct_pt(bi.op)) {
          std::string name = ji.at("pt").get<std::string>();
          bi.pt = -1;
          for (size_t k = 0; k < p.pt_consts.size(); ++k)
            if (p.pt_consts[k].name == name) bi.pt = static_cast<int>(k);
          if (bi.pt < 0) throw ParseError("backend ir: unknown pt constant " + name);
        } else {
          bi.b = backend_ref_parse(p, ji.at("rhs").get<std::string>());
        }
      }
      p.body.push_back(bi);
    }
    p.result = backend_ref_parse(p, j.at("result").get<std::string>());
    validate(p);
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("backend ir json: ") + e.what());
  }
}

SourceTemplate seal_template() {
  SourceTemplate t;
  t.header =
      "// Generated BFV kernel: {kernel}\n"
      "// slots: {n}, plaintext modulus: {t}\n"
      "#include \"seal/seal.h\"\n"
      "\n"
      "#include <map>\n"
      "#include <string>\n"
      "\n"
      "void {kernel}(seal::Evaluator &evaluator, const seal::GaloisKeys &galois_keys,\n"
      "              const seal::RelinKeys &relin_keys,\n"
      "              std::map<std::string, seal::Ciphertext> &ct,\n"
      "              std::map<std::string, seal::Plaintext> &pt,\n"
      "              seal::Ciphertext &result) {\n";
  t.calls[BackendOp::rotate] =
      "  evaluator.rotate_rows({a}, {amount}, galois_keys, {dst});\n";
  t.calls[BackendOp::add_ct_ct] = "  evaluator.add({a}, {b}, {dst});\n";
  t.calls[BackendOp::sub_ct_ct] = "  evaluator.sub({a}, {b}, {dst});\n";
  t.calls[BackendOp::mul_ct_ct] = "  evaluator.multiply({a}, {b}, {dst});\n";
  t.calls[BackendOp::add_ct_pt] = "  evaluator.add_plain({a}, {pt}, {dst});\n";
  t.calls[BackendOp::sub_ct_pt] = "  evaluator.sub_plain({a}, {pt}, {dst});\n";
  t.calls[BackendOp::mul_ct_pt] = "  evaluator.multiply_plain({a}, {pt}, {dst});\n";
  t.calls[BackendOp::relinearize] = "  evaluator.relinearize_inplace({a}, relin_keys);\n";
  t.footer = "  result = {result};\n}\n";
  return t;
}

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::string emit_backend_source(const BackendProgram& p, const SourceTemplate& tmpl,
                                const std::string& kernel_name) {
  validate(p);
  // Deterministic naming: inputs keep their names, defined values are ct<k>
  // in SSA order.
  std::vector<std::string> names(p.body.size());
  int next = 0;
  for (size_t i = 0; i < p.body.size(); ++i)
    if (defines_value(p.body[i].op)) names[i] = "ct" + std::to_string(next++);
  auto name_of = [&](ValueRef r) {
    if (r.is_input()) return "ct.at(\"" + p.ct_inputs[static_cast<size_t>(r.index())] + "\")";
    return names[static_cast<size_t>(r.index())];
  };

  std::string out = tmpl.header;
  replace_all(out, "{kernel}", kernel_name);
  replace_all(out, "{n}", std::to_string(p.params.n));
  replace_all(out, "{t}", std::to_string(p.params.t));

  for (size_t i = 0; i < p.body.size(); ++i)
    if (defines_value(p.body[i].op)) out += "  seal::Ciphertext " + names[i] + ";\n";

  for (size_t i = 0; i < p.body.size(); ++i) {
    const BackendInstr& bi = p.body[i];
    auto it = tmpl.calls.find(bi.op);
    if (it == tmpl.calls.end())
      throw CodegenError(std::string("source template is missing opcode ") +
                         backend_op_name(bi.op));
    std::string call = it->second;
    replace_all(call, "{a}", name_of(bi.a));
    if (is_ct_ct(bi.op)) replace_all(call, "{b}", name_of(bi.b));
    if (is_ct_pt(bi.op))
      replace_all(call, "{pt}",
                  "pt.at(\"" + p.pt_consts[static_cast<size_t>(bi.pt)].name + "\")");
    if (bi.op == BackendOp::rotate) replace_all(call, "{amount}", std::to_string(bi.amount));
    if (defines_value(bi.op)) replace_all(call, "{dst}", names[i]);
    out += call;
  }

  std::string footer = tmpl.footer;
  replace_all(footer, "{result}", name_of(p.result));
  out += footer;
  return out;
}

}  // namespace hesynth
