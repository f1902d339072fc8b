#include "hesynth/program_json.hpp"

#include <json.hpp>

namespace hesynth {

using json = nlohmann::ordered_json;

namespace {

std::string ref_to_string(const Program& p, ValueRef r) {
  if (r.is_input()) return p.ct_inputs[r.index()];
  return "%" + std::to_string(r.index());
}

ValueRef ref_from_string(const Program& p, const std::string& s) {
  if (!s.empty() && s[0] == '%') {
    try {
      return ValueRef::instr(std::stoi(s.substr(1)));
    } catch (const std::exception&) {
      throw ParseError("bad instruction reference: " + s);
    }
  }
  int idx = p.input_index(s);
  if (idx < 0) throw ParseError("unknown input reference: " + s);
  return ValueRef::input(idx);
}

json operand_to_json(const Program& p, const Operand& o) {
  return json{{"src", ref_to_string(p, o.src)}, {"rot", o.rot}};
}

Operand operand_from_json(const Program& p, const json& j) {
  Operand o;
  o.src = ref_from_string(p, j.at("src").get<std::string>());
  o.rot = normalize_rotation(j.value("rot", 0ll), p.params.n);
  return o;
}

}  // namespace

std::string emit_program_json(const Program& p) {
  validate(p);
  json j;
  j["params"] = {{"n", p.params.n}, {"t", p.params.t}};
  j["ct_inputs"] = p.ct_inputs;
  j["pt_consts"] = json::array();
  for (const auto& pc : p.pt_consts)
    j["pt_consts"].push_back(json{{"name", pc.name}, {"slots", pc.value.slots}});
  j["body"] = json::array();
  for (const auto& instr : p.body) {
    json ji;
    ji["op"] = op_name(instr.op);
    ji["lhs"] = operand_to_json(p, instr.lhs);
    if (is_pt_op(instr.op))
      ji["rhs"] = p.pt_consts[instr.pt].name;
    else
      ji["rhs"] = operand_to_json(p, instr.rhs);
    j["body"].push_back(std::move(ji));
  }
  j["result"] = ref_to_string(p, p.result);
  return j.dump(2) + "\n";
}

Program parse_program_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("program json: ") + e.what());
  }
  try {
    Program p;
    p.params.n = j.at("params").at("n").get<int>();
    p.params.t = j.at("params").at("t").get<uint32_t>();
    p.params.validate();
    p.ct_inputs = j.at("ct_inputs").get<std::vector<std::string>>();
    for (const auto& jc : j.value("pt_consts", json::array())) {
      PtConst pc;
      pc.name = jc.at("name").get<std::string>();
      pc.value.slots = jc.at("slots").get<std::vector<uint32_t>>();
      p.pt_consts.push_back(std::move(pc));
    }
    for (const auto& ji : j.at("body")) {
      Instruction instr;
      instr.op = op_from_name(ji.at("op").get<std::string>());
      instr.lhs = operand_from_json(p, ji.at("lhs"));
      if (is_pt_op(instr.op)) {
        std::string name = ji.at("rhs").get<std::string>();
        instr.pt = -1;
        for (size_t k = 0; k < p.pt_consts.size(); ++k)
          if (p.pt_consts[k].name == name) instr.pt = static_cast<int>(k);
        if (instr.pt < 0) throw ParseError("unknown plaintext constant: " + name);
      } else {
        instr.rhs = operand_from_json(p, ji.at("rhs"));
      }
      p.body.push_back(instr);
    }
    p.result = ref_from_string(p, j.at("result").get<std::string>());
    validate(p);
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("program json: ") + e.what());
  }
}

}  // namespace hesynth
