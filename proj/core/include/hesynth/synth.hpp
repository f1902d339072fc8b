#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hesynth/search.hpp"

namespace hesynth {

// cost(p) = estimated_latency(p) * (1 + mdepth(p)); multiplicative depth
// penalizes high-noise programs.
int64_t cost_fn(const Program& p, const CostModel& m);

// Generates sketch_L for the minimal-length loop. A non-empty `pinned` list
// fixes both the length and the per-component choice sets.
struct SketchFamily {
  RingParams ring;
  std::vector<std::string> ct_inputs;
  std::vector<PtConst> pt_consts;
  RotationDomain domain;
  SketchStyle style = SketchStyle::local_rotate;
  std::vector<OpChoice> opcodes;
  std::vector<ComponentTemplate> pinned;

  Sketch sketch_for(int length) const;
  bool is_pinned() const { return !pinned.empty(); }
  int pinned_length() const { return static_cast<int>(pinned.size()); }
};

struct SynthConfig {
  int l_min = 1;
  int l_max = 12;
  double timeout_secs = 1200.0;  // no-progress timeout; resets on improvement
  bool optimize = true;
  uint64_t seed = 1;
  SearchConfig search;

  void validate() const {
    if (l_min < 1 || l_min > l_max) throw StructuralError("synth: need 1 <= l_min <= l_max");
    if (timeout_secs <= 0) throw StructuralError("synth: timeout must be positive");
    search.validate();
  }
};

enum class SolutionStatus { optimal, timeout_best, initial_only };

const char* solution_status_name(SolutionStatus s);

struct Solution {
  Program program;
  int64_t cost = 0;
  int mdepth = 0;
  InstructionCount counts;
  int examples_used = 0;
  SolutionStatus status = SolutionStatus::initial_only;
  int sketch_length = 0;
};

struct PhaseInfo {
  int64_t cost = 0;
  InstructionCount counts;
  int mdepth = 0;
  double time_seconds = 0.0;  // wall clock; excluded from deterministic reports
  uint64_t nodes = 0;         // deterministic search effort
};

struct SynthResult {
  bool success = false;
  std::string failure_reason;
  std::optional<Solution> initial;
  std::optional<Solution> final;
  PhaseInfo initial_info;
  PhaseInfo total_info;
  int examples_used = 0;
  int cegis_iterations = 0;              // counterexamples appended
  std::vector<int64_t> cost_trajectory;  // verified costs, strictly decreasing
};

// Minimal-L CEGIS: for each length, solve against the accumulated examples,
// verify, and append the counterexample on failure. The one random seed
// example is drawn up front; examples persist across lengths and phases (they
// remain valid constraints for the same spec).
std::optional<Solution> synthesize_initial(const KernelSpec& spec, const SketchFamily& family,
                                           const SynthConfig& cfg, std::vector<Example>& examples,
                                           SynthResult& log, const Clock* clock = nullptr);

// Cost minimization: re-solve under a strict bound equal to the best verified
// cost until unsat (optimal) or the no-progress timeout expires (timeout_best).
// The bound only moves on verified solutions; the initial solution serves as
// the starting bound and nothing else.
Solution optimize(const KernelSpec& spec, const Sketch& sketch, const Solution& initial,
                  const SynthConfig& cfg, std::vector<Example>& examples, SynthResult& log,
                  const Clock* clock = nullptr);

SynthResult synthesize(const KernelSpec& spec, const SketchFamily& family, const SynthConfig& cfg,
                       const Clock* clock = nullptr);

// Report JSON mirroring the fields of the synthesis-time table: examples,
// initial/total effort, initial/final cost. Wall-clock timings are emitted
// only when include_timings is set, keeping the default output byte-stable.
std::string emit_synth_report_json(const SynthResult& r, bool include_timings = false);

}  // namespace hesynth
