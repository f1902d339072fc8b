#pragma once

#include <string>

#include "hesynth/program.hpp"

namespace hesynth {

// Canonical JSON form:
//   {"params": {"n":16,"t":65537},
//    "ct_inputs": ["c0"],
//    "pt_consts": [{"name":"two","slots":[2,...]}],
//    "body": [{"op":"add_ct_ct","lhs":{"src":"c0","rot":0},"rhs":{"src":"%0","rot":5}}],
//    "result": "%0"}
// Instruction k is referenced as "%k". Negative rotations in input files are
// normalized to left rotations mod n at parse time. parse(emit(p)) == p.
std::string emit_program_json(const Program& p);
Program parse_program_json(const std::string& text);

}  // namespace hesynth
