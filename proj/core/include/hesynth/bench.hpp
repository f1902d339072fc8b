#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hesynth/kernels.hpp"
#include "hesynth/pipeline.hpp"
#include "hesynth/synth.hpp"

namespace hesynth {

// Hand-written depth-minimizing baseline: align window/reduction elements with
// rotations first, then reduce in a balanced tree; multiplication by two is
// implemented as an addition. Baselines are fixtures and are verified against
// the spec before any comparison.
Program build_baseline(const KernelConfig& config);

// Default sketch for a kernel: opcodes extracted from its reference
// computation, rotation holes where alignment is needed, and the rotation
// restriction suited to the kernel's shape (sliding window or tree reduction).
SketchFamily build_sketch(const KernelConfig& config);

struct RunConfig {
  KernelConfig kernel;
  SynthConfig synth;

  static RunConfig defaults(const std::string& kernel_name);
};

RunConfig parse_run_config_json(const std::string& text);
std::string emit_run_config_json(const RunConfig& rc);

struct BenchSide {
  InstructionCount counts;
  int circuit_depth = 0;
  int mdepth = 0;
  int64_t latency = 0;
  int64_t cost = 0;
};

struct BenchRow {
  std::string kernel;
  bool ok = false;
  std::string error;
  BenchSide baseline;
  BenchSide synthesized;
  SynthResult report;
  std::optional<int> target_max_total;
  bool meets_target = false;
  bool improvement = false;  // synthesized total and cost no worse than baseline
};

struct SuiteConfig {
  std::vector<RunConfig> runs;

  static SuiteConfig defaults();  // the full benchmark suite
};

SuiteConfig parse_suite_config_json(const std::string& text);

struct SuiteResult {
  std::vector<BenchRow> rows;
};

BenchRow run_benchmark(const RunConfig& rc, const Clock* clock = nullptr);
SuiteResult run_suite(const SuiteConfig& cfg, const Clock* clock = nullptr);

// Deterministic report: identical config and seed give byte-identical output.
// Wall-clock timings go to a separate sidecar when requested.
std::string suite_report_json(const SuiteResult& result);
std::string suite_timings_json(const SuiteResult& result);
std::string suite_table_text(const SuiteResult& result);

// Multi-step pipelines over the 5x5 bordered image: the x/y-gradient pair
// combined into an edge response, and the corner-response pipeline built from
// gradients, products and box blurs.
struct PipelineConfig {
  std::string name;  // "sobel" | "harris"
  SynthConfig synth;

  static PipelineConfig defaults(const std::string& name);
};

PipelineConfig parse_pipeline_config_json(const std::string& text);

struct PipelineRun {
  PipelineConfig config;
  PipelineResult result;
  int64_t baseline_total = 0;  // constructed monolithic baseline instruction count
  std::string report_json;    // deterministic
};

PipelineRun run_pipeline(const PipelineConfig& cfg, const Clock* clock = nullptr);

// The stage lists, exposed for tests.
std::vector<PipelineStage> sobel_stages(const SynthConfig& synth);
std::vector<PipelineStage> harris_stages(const SynthConfig& synth);
std::vector<SpecInput> pipeline_image_inputs();

}  // namespace hesynth
