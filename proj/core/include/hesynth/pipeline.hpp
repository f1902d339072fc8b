#pragma once

#include <span>
#include <string>
#include <vector>

#include "hesynth/synth.hpp"

namespace hesynth {

// One segment of a multi-step synthesis job. Bindings name, per spec input,
// either a pipeline input ("@img") or the output of an earlier stage.
struct PipelineStage {
  std::string name;
  KernelSpec spec;
  SketchFamily sketch;
  SynthConfig synth;
  std::vector<std::string> bindings;
};

struct StageOutcome {
  std::string name;
  SynthResult result;
};

struct PipelineResult {
  bool success = false;
  std::string failure_reason;
  Program composed;
  std::vector<int> composed_mask;      // final-stage mask
  std::vector<Poly> composed_polys;    // spec polynomials over the pipeline inputs
  std::vector<StageOutcome> stages;
  InstructionCount counts;
  int mdepth = 0;
  int64_t cost = 0;
  bool verified = false;  // composed program matches the composed polynomials
};

// Synthesizes every stage independently, splices the programs by SSA
// concatenation along the bindings, and verifies the composition end to end
// against the substitution of the stage polynomials. Producer/consumer data
// layouts must agree on every bound edge: each slot the consumer packs must be
// a slot the producer guarantees (its mask, or the packed slots of a pipeline
// input).
PipelineResult synthesize_multistep(std::span<const PipelineStage> stages,
                                    std::span<const SpecInput> pipeline_inputs, RingParams ring,
                                    const CostModel& cost, const Clock* clock = nullptr);

}  // namespace hesynth
