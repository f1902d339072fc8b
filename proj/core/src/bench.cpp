#include "hesynth/bench.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

#include "hesynth/verifier.hpp"

namespace hesynth {

using json = nlohmann::ordered_json;

namespace {

// Acceptance-style instruction-count targets for the synthesized kernels.
std::optional<int> target_total(const std::string& kernel) {
  if (kernel == "box_blur") return 4;
  if (kernel == "dot_product") return 7;
  if (kernel == "hamming") return 6;
  if (kernel == "gx" || kernel == "gy") return 7;
  if (kernel == "polynomial_regression") return 7;
  if (kernel == "roberts_cross") return 10;
  return std::nullopt;  // l2_distance / linear_regression carry no hard target
}

CostModel cost_from_json(const json& j) {
  CostModel m;
  m.add_ct = j.value("add_ct", m.add_ct);
  m.sub_ct = j.value("sub_ct", m.sub_ct);
  m.mul_ct_ct = j.value("mul_ct_ct", m.mul_ct_ct);
  m.add_pt = j.value("add_pt", m.add_pt);
  m.sub_pt = j.value("sub_pt", m.sub_pt);
  m.mul_ct_pt = j.value("mul_ct_pt", m.mul_ct_pt);
  m.rotate = j.value("rotate", m.rotate);
  m.validate();
  return m;
}

json cost_to_json(const CostModel& m) {
  return json{{"add_ct", m.add_ct},       {"sub_ct", m.sub_ct}, {"mul_ct_ct", m.mul_ct_ct},
              {"add_pt", m.add_pt},       {"sub_pt", m.sub_pt}, {"mul_ct_pt", m.mul_ct_pt},
              {"rotate", m.rotate}};
}

SynthConfig synth_from_json(const json& j) {
  SynthConfig s;
  s.l_min = j.value("l_min", s.l_min);
  s.l_max = j.value("l_max", s.l_max);
  s.timeout_secs = j.value("timeout_secs", s.timeout_secs);
  s.optimize = j.value("optimize", s.optimize);
  s.seed = j.value("seed", s.seed);
  s.search.symmetry_breaking = j.value("symmetry_breaking", s.search.symmetry_breaking);
  s.search.observational_prune = j.value("observational_prune", s.search.observational_prune);
  if (j.contains("node_budget") && !j.at("node_budget").is_null())
    s.search.node_budget = j.at("node_budget").get<uint64_t>();
  return s;
}

json synth_to_json(const SynthConfig& s) {
  json j{{"l_min", s.l_min},
         {"l_max", s.l_max},
         {"timeout_secs", s.timeout_secs},
         {"optimize", s.optimize},
         {"seed", s.seed},
         {"symmetry_breaking", s.search.symmetry_breaking},
         {"observational_prune", s.search.observational_prune}};
  if (s.search.node_budget) j["node_budget"] = *s.search.node_budget;
  return j;
}

KernelConfig kernel_from_json(const json& j) {
  KernelConfig k;
  k.kernel = j.at("name").get<std::string>();
  KernelConfig defaults = kernel_defaults(k.kernel);  // validates the name
  k.n = j.value("n", 0);
  k.t = j.value("t", defaults.t);
  k.length = j.value("length", 0);
  k.image_h = j.value("image_h", 0);
  k.image_w = j.value("image_w", 0);
  k.ct_coeffs = j.value("ct_coeffs", false);
  return k;
}

json kernel_to_json(const KernelConfig& k) {
  json j{{"name", k.kernel}};
  if (k.n > 0) j["n"] = k.n;
  j["t"] = k.t;
  if (k.length > 0) j["length"] = k.length;
  if (k.image_h > 0) j["image_h"] = k.image_h;
  if (k.image_w > 0) j["image_w"] = k.image_w;
  if (k.ct_coeffs) j["ct_coeffs"] = true;
  return j;
}

BenchSide side_of(const Program& p, const CostModel& m) {
  BenchSide s;
  s.counts = instruction_count(p);
  s.circuit_depth = circuit_depth(p);
  s.mdepth = mdepth(p);
  s.latency = estimated_latency(p, m);
  s.cost = cost_fn(p, m);
  return s;
}

json side_to_json(const BenchSide& s) {
  return json{{"instructions",
               json{{"arith", s.counts.arith},
                    {"rotations", s.counts.rotations},
                    {"total", s.counts.total}}},
              {"circuit_depth", s.circuit_depth},
              {"mdepth", s.mdepth},
              {"latency", s.latency},
              {"cost", s.cost}};
}

}  // namespace

RunConfig RunConfig::defaults(const std::string& kernel_name) {
  RunConfig rc;
  rc.kernel = kernel_defaults(kernel_name);
  return rc;
}

RunConfig parse_run_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("run config: ") + e.what());
  }
  try {
    RunConfig rc;
    rc.kernel = kernel_from_json(j.at("kernel"));
    if (j.contains("synth")) rc.synth = synth_from_json(j.at("synth"));
    if (j.contains("cost_model")) rc.synth.search.cost = cost_from_json(j.at("cost_model"));
    rc.synth.validate();
    return rc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("run config: ") + e.what());
  }
}

std::string emit_run_config_json(const RunConfig& rc) {
  json j;
  j["kernel"] = kernel_to_json(rc.kernel);
  j["synth"] = synth_to_json(rc.synth);
  j["cost_model"] = cost_to_json(rc.synth.search.cost);
  return j.dump(2) + "\n";
}

SuiteConfig SuiteConfig::defaults() {
  SuiteConfig cfg;
  for (const std::string& name : benchmark_kernel_names())
    cfg.runs.push_back(RunConfig::defaults(name));
  return cfg;
}

SuiteConfig parse_suite_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("suite config: ") + e.what());
  }
  try {
    SuiteConfig cfg;
    SynthConfig shared;
    bool has_shared = j.contains("synth");
    if (has_shared) shared = synth_from_json(j.at("synth"));
    if (j.contains("cost_model")) {
      shared.search.cost = cost_from_json(j.at("cost_model"));
      has_shared = true;
    }
    if (j.contains("runs")) {
      for (const auto& jr : j.at("runs")) {
        RunConfig rc;
        rc.kernel = kernel_from_json(jr.at("kernel"));
        rc.synth = jr.contains("synth") ? synth_from_json(jr.at("synth")) : shared;
        if (jr.contains("cost_model")) rc.synth.search.cost = cost_from_json(jr.at("cost_model"));
        rc.synth.validate();
        cfg.runs.push_back(std::move(rc));
      }
    } else {
      std::vector<std::string> kernels =
          j.contains("kernels") ? j.at("kernels").get<std::vector<std::string>>()
                                : benchmark_kernel_names();
      for (const std::string& name : kernels) {
        RunConfig rc = RunConfig::defaults(name);
        if (has_shared) rc.synth = shared;
        rc.synth.validate();
        cfg.runs.push_back(std::move(rc));
      }
    }
    if (cfg.runs.empty()) throw ParseError("suite config: no kernels listed");
    return cfg;
  } catch (const json::exception& e) {
    throw ParseError(std::string("suite config: ") + e.what());
  }
}

BenchRow run_benchmark(const RunConfig& rc, const Clock* clock) {
  BenchRow row;
  row.kernel = rc.kernel.kernel;
  row.target_max_total = target_total(rc.kernel.kernel);
  try {
    KernelSpec spec = build_kernel(rc.kernel);
    Program baseline = build_baseline(rc.kernel);
    if (auto cex = verify(baseline, spec))
      throw StructuralError("baseline fixture fails verification");
    row.baseline = side_of(baseline, rc.synth.search.cost);

    SketchFamily family = build_sketch(rc.kernel);
    row.report = synthesize(spec, family, rc.synth, clock);
    if (!row.report.success) {
      row.error = row.report.failure_reason;
      return row;
    }
    const Program& best = row.report.final->program;
    if (auto cex = verify(best, spec))
      throw StructuralError("synthesized program fails verification");
    row.synthesized = side_of(best, rc.synth.search.cost);
    row.meets_target =
        !row.target_max_total || row.synthesized.counts.total <= *row.target_max_total;
    row.improvement = row.synthesized.counts.total <= row.baseline.counts.total &&
                      row.synthesized.cost <= row.baseline.cost;
    row.ok = true;
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

SuiteResult run_suite(const SuiteConfig& cfg, const Clock* clock) {
  SuiteResult result;
  for (const RunConfig& rc : cfg.runs) result.rows.push_back(run_benchmark(rc, clock));
  return result;
}

namespace {

json row_to_json(const BenchRow& row) {
  json j;
  j["kernel"] = row.kernel;
  j["ok"] = row.ok;
  if (!row.ok) {
    j["error"] = row.error;
    return j;
  }
  j["baseline"] = side_to_json(row.baseline);
  j["synthesized"] = side_to_json(row.synthesized);
  json targets;
  if (row.target_max_total) targets["max_total"] = *row.target_max_total;
  targets["meets_target"] = row.meets_target;
  targets["improvement"] = row.improvement;
  j["targets"] = targets;
  j["report"] = json::parse(emit_synth_report_json(row.report, false));
  return j;
}

}  // namespace

std::string suite_report_json(const SuiteResult& result) {
  json j;
  j["suite"] = json::array();
  for (const BenchRow& row : result.rows) j["suite"].push_back(row_to_json(row));
  return j.dump(2) + "\n";
}

std::string suite_timings_json(const SuiteResult& result) {
  json j;
  j["timings"] = json::array();
  for (const BenchRow& row : result.rows)
    j["timings"].push_back(json{{"kernel", row.kernel},
                                {"initial_seconds", row.report.initial_info.time_seconds},
                                {"total_seconds", row.report.total_info.time_seconds}});
  return j.dump(2) + "\n";
}

std::string suite_table_text(const SuiteResult& result) {
  std::ostringstream os;
  os << "kernel                 baseline        synthesized      cost (base -> synth)\n";
  os << "                       instr  depth    instr  depth\n";
  for (const BenchRow& row : result.rows) {
    os << row.kernel;
    for (size_t i = row.kernel.size(); i < 23; ++i) os << ' ';
    if (!row.ok) {
      os << "error: " << row.error << "\n";
      continue;
    }
    auto cell = [&os](int v, int width) {
      std::string s = std::to_string(v);
      os << s;
      for (int i = static_cast<int>(s.size()); i < width; ++i) os << ' ';
    };
    cell(row.baseline.counts.total, 7);
    cell(row.baseline.circuit_depth, 9);
    cell(row.synthesized.counts.total, 7);
    cell(row.synthesized.circuit_depth, 7);
    os << row.baseline.cost << " -> " << row.synthesized.cost << "\n";
  }
  return os.str();
}

std::vector<SpecInput> pipeline_image_inputs() {
  KernelSpec gx = build_kernel(kernel_defaults("gx"));
  return gx.inputs;
}

namespace {

constexpr int kImageDim = 5;
constexpr int kStride = 5;
constexpr uint32_t kCornerWeight = 4;  // trace-squared weight in the corner response

RingParams pipeline_ring() { return RingParams{32, 65537}; }

LayoutDesc interior_layout() {
  LayoutDesc l = LayoutDesc::row_major({kImageDim, kImageDim});
  for (int r = 0; r < kImageDim; ++r)
    for (int c = 0; c < kImageDim; ++c)
      if (r == 0 || c == 0 || r == kImageDim - 1 || c == kImageDim - 1)
        l.packed[static_cast<size_t>(r * kImageDim + c)] = 0;
  return l;
}

LayoutDesc blurred_layout() {
  LayoutDesc l = LayoutDesc::row_major({kImageDim, kImageDim});
  for (int r = 0; r < kImageDim; ++r)
    for (int c = 0; c < kImageDim; ++c)
      if (!(r >= 1 && r <= 2 && c >= 1 && c <= 2))
        l.packed[static_cast<size_t>(r * kImageDim + c)] = 0;
  return l;
}

SynthConfig stage_synth(const SynthConfig& base, int l_min, int l_max) {
  SynthConfig s = base;
  s.l_min = l_min;
  s.l_max = l_max;
  return s;
}

// out = a * b, element-wise on the packed region.
KernelSpec product_spec(const std::string& name, const LayoutDesc& layout,
                        std::vector<std::string> input_names, bool square) {
  RingParams ring = pipeline_ring();
  std::vector<SpecInput> inputs;
  inputs.push_back({input_names[0], layout, InputDomain::full});
  if (!square) inputs.push_back({input_names[1], layout, InputDomain::full});
  std::vector<std::pair<int, ExprPtr>> reference;
  for (int r = 0; r < kImageDim; ++r)
    for (int c = 0; c < kImageDim; ++c) {
      int flat = r * kImageDim + c;
      if (!layout.cell_packed(flat)) continue;
      ExprPtr a = expr_read(0, {r, c});
      ExprPtr b = square ? expr_read(0, {r, c}) : expr_read(1, {r, c});
      reference.emplace_back(layout.slot_of(std::vector<int>{r, c}), expr_mul(a, b));
    }
  return lift_reference(name, ring, std::move(inputs), {}, layout, std::move(reference));
}

// 2x2 window sum over interior data; valid where the window stays interior.
KernelSpec interior_blur_spec(const std::string& name) {
  RingParams ring = pipeline_ring();
  LayoutDesc in_layout = interior_layout();
  LayoutDesc out_layout = blurred_layout();
  std::vector<std::pair<int, ExprPtr>> reference;
  for (int r = 1; r <= 2; ++r)
    for (int c = 1; c <= 2; ++c) {
      ExprPtr acc;
      for (int kh = 0; kh <= 1; ++kh)
        for (int kw = 0; kw <= 1; ++kw) {
          ExprPtr term = expr_read(0, {r + kh, c + kw});
          acc = acc ? expr_add(acc, term) : term;
        }
      reference.emplace_back(in_layout.slot_of(std::vector<int>{r, c}), acc);
    }
  return lift_reference(name, ring, {{"v", in_layout, InputDomain::full}}, {}, out_layout,
                        std::move(reference));
}

SketchFamily product_sketch(const KernelSpec& spec) {
  SketchFamily f;
  f.ring = spec.ring;
  for (const auto& in : spec.inputs) f.ct_inputs.push_back(in.name);
  f.domain = RotationDomain::only_zero();
  f.opcodes = {OpChoice{Op::mul_ct_ct, HoleKind::ct, HoleKind::ct, -1}};
  return f;
}

SketchFamily blur_sketch(const KernelSpec& spec) {
  SketchFamily f;
  f.ring = spec.ring;
  f.ct_inputs = {spec.inputs[0].name};
  f.domain = RotationDomain::window(2, 2, kStride, spec.ring.n);
  f.opcodes = {OpChoice{Op::add_ct_ct, HoleKind::ct_rot, HoleKind::ct_rot, -1}};
  return f;
}

PipelineStage gradient_stage(const std::string& name, const SynthConfig& synth) {
  PipelineStage st;
  st.name = name;
  st.spec = build_kernel(kernel_defaults(name));
  st.sketch = build_sketch(kernel_defaults(name));
  st.synth = stage_synth(synth, 1, 5);
  st.bindings = {"@img"};
  return st;
}

}  // namespace

std::vector<PipelineStage> sobel_stages(const SynthConfig& synth) {
  std::vector<PipelineStage> stages;
  stages.push_back(gradient_stage("gx", synth));
  stages.push_back(gradient_stage("gy", synth));

  // Edge response: gx^2 + gy^2 on the valid interior.
  PipelineStage combine;
  combine.name = "response";
  RingParams ring = pipeline_ring();
  LayoutDesc interior = interior_layout();
  std::vector<std::pair<int, ExprPtr>> reference;
  for (int r = 1; r <= 3; ++r)
    for (int c = 1; c <= 3; ++c) {
      ExprPtr a = expr_read(0, {r, c});
      ExprPtr b = expr_read(1, {r, c});
      reference.emplace_back(interior.slot_of(std::vector<int>{r, c}),
                             expr_add(expr_mul(a, a), expr_mul(b, b)));
    }
  combine.spec = lift_reference("sobel_response", ring,
                                {{"dx", interior, InputDomain::full},
                                 {"dy", interior, InputDomain::full}},
                                {}, interior, std::move(reference));
  SketchFamily f;
  f.ring = ring;
  f.ct_inputs = {"dx", "dy"};
  f.domain = RotationDomain::only_zero();
  f.opcodes = {OpChoice{Op::add_ct_ct, HoleKind::ct, HoleKind::ct, -1},
               OpChoice{Op::mul_ct_ct, HoleKind::ct, HoleKind::ct, -1}};
  combine.sketch = f;
  combine.synth = stage_synth(synth, 1, 4);
  combine.bindings = {"gx", "gy"};
  stages.push_back(std::move(combine));
  return stages;
}

std::vector<PipelineStage> harris_stages(const SynthConfig& synth) {
  std::vector<PipelineStage> stages;
  stages.push_back(gradient_stage("gx", synth));
  stages.push_back(gradient_stage("gy", synth));

  LayoutDesc interior = interior_layout();
  auto add_product = [&](const std::string& name, bool square,
                         std::vector<std::string> bindings,
                         std::vector<std::string> input_names) {
    PipelineStage st;
    st.name = name;
    st.spec = product_spec(name, interior, std::move(input_names), square);
    st.sketch = product_sketch(st.spec);
    st.synth = stage_synth(synth, 1, 1);
    st.bindings = std::move(bindings);
    stages.push_back(std::move(st));
  };
  add_product("ixx", true, {"gx"}, {"dx"});
  add_product("iyy", true, {"gy"}, {"dy"});
  add_product("ixy", false, {"gx", "gy"}, {"dx", "dy"});

  auto add_blur = [&](const std::string& name, const std::string& source) {
    PipelineStage st;
    st.name = name;
    st.spec = interior_blur_spec(name);
    st.sketch = blur_sketch(st.spec);
    st.synth = stage_synth(synth, 1, 3);
    st.bindings = {source};
    stages.push_back(std::move(st));
  };
  add_blur("sxx", "ixx");
  add_blur("syy", "iyy");
  add_blur("sxy", "ixy");

  // Corner response: det(M) - w * trace(M)^2 over the blurred moments.
  PipelineStage combine;
  combine.name = "response";
  RingParams ring = pipeline_ring();
  LayoutDesc blurred = blurred_layout();
  std::vector<std::pair<int, ExprPtr>> reference;
  for (int r = 1; r <= 2; ++r)
    for (int c = 1; c <= 2; ++c) {
      ExprPtr sxx = expr_read(0, {r, c});
      ExprPtr syy = expr_read(1, {r, c});
      ExprPtr sxy = expr_read(2, {r, c});
      ExprPtr det = expr_sub(expr_mul(sxx, syy), expr_mul(sxy, sxy));
      ExprPtr tr = expr_add(sxx, syy);
      ExprPtr weighted = expr_mul(expr_const(kCornerWeight), expr_mul(tr, tr));
      reference.emplace_back(blurred.slot_of(std::vector<int>{r, c}), expr_sub(det, weighted));
    }
  PtConst weight{"w", PtValue{std::vector<uint32_t>(static_cast<size_t>(ring.n), kCornerWeight)}};
  combine.spec = lift_reference("corner_response", ring,
                                {{"sxx", blurred, InputDomain::full},
                                 {"syy", blurred, InputDomain::full},
                                 {"sxy", blurred, InputDomain::full}},
                                {weight}, blurred, std::move(reference));

  SketchFamily f;
  f.ring = ring;
  f.ct_inputs = {"sxx", "syy", "sxy"};
  f.pt_consts = {weight};
  f.domain = RotationDomain::only_zero();
  auto one = [](OpChoice c) { return ComponentTemplate{{c}}; };
  OpChoice mul_ct{Op::mul_ct_ct, HoleKind::ct, HoleKind::ct, -1};
  OpChoice add_ct{Op::add_ct_ct, HoleKind::ct, HoleKind::ct, -1};
  OpChoice sub_ct{Op::sub_ct_ct, HoleKind::ct, HoleKind::ct, -1};
  OpChoice mul_w{Op::mul_ct_pt, HoleKind::ct, HoleKind::ct, 0};
  f.pinned = {one(mul_ct), one(mul_ct), one(sub_ct), one(add_ct),
              one(mul_ct), one(mul_w),  one(sub_ct)};
  combine.sketch = f;
  combine.synth = stage_synth(synth, 7, 7);
  combine.bindings = {"sxx", "syy", "sxy"};
  stages.push_back(std::move(combine));
  return stages;
}

PipelineConfig PipelineConfig::defaults(const std::string& name) {
  if (name != "sobel" && name != "harris")
    throw StructuralError("unknown pipeline: " + name);
  PipelineConfig cfg;
  cfg.name = name;
  return cfg;
}

PipelineConfig parse_pipeline_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("pipeline config: ") + e.what());
  }
  try {
    if (!j.contains("pipeline")) throw ParseError("pipeline config: missing 'pipeline'");
    PipelineConfig cfg = PipelineConfig::defaults(j.at("pipeline").get<std::string>());
    if (j.contains("synth")) cfg.synth = synth_from_json(j.at("synth"));
    if (j.contains("cost_model")) cfg.synth.search.cost = cost_from_json(j.at("cost_model"));
    cfg.synth.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ParseError(std::string("pipeline config: ") + e.what());
  }
}

namespace {

// Monolithic hand-written counterpart: baseline kernels spliced stage by
// stage, squares and combines written directly.
int64_t constructed_baseline_total(const std::string& name, const CostModel& cost) {
  (void)cost;
  KernelConfig gx = kernel_defaults("gx");
  int per_gradient = instruction_count(build_baseline(gx)).total;
  KernelConfig blur = kernel_defaults("box_blur");
  blur.n = 32;
  blur.image_h = 5;
  blur.image_w = 5;
  int per_blur = instruction_count(build_baseline(blur)).total;
  if (name == "sobel") return 2 * per_gradient + 3;        // gradients + squares/add
  return 2 * per_gradient + 3 + 3 * per_blur + 7;          // harris: + products, blurs, response
}

}  // namespace

PipelineRun run_pipeline(const PipelineConfig& cfg, const Clock* clock) {
  PipelineRun run;
  run.config = cfg;
  std::vector<PipelineStage> stages =
      cfg.name == "sobel" ? sobel_stages(cfg.synth) : harris_stages(cfg.synth);
  run.result = synthesize_multistep(stages, pipeline_image_inputs(), pipeline_ring(),
                                    cfg.synth.search.cost, clock);
  run.baseline_total = constructed_baseline_total(cfg.name, cfg.synth.search.cost);

  json j;
  j["pipeline"] = cfg.name;
  j["success"] = run.result.success;
  if (!run.result.success) j["failure_reason"] = run.result.failure_reason;
  j["verified"] = run.result.verified;
  if (run.result.success) {
    j["instructions"] = json{{"arith", run.result.counts.arith},
                             {"rotations", run.result.counts.rotations},
                             {"total", run.result.counts.total}};
    j["mdepth"] = run.result.mdepth;
    j["cost"] = run.result.cost;
    j["baseline_total"] = run.baseline_total;
  }
  j["stages"] = json::array();
  for (const StageOutcome& st : run.result.stages)
    j["stages"].push_back(json{{"name", st.name},
                               {"report", json::parse(emit_synth_report_json(st.result, false))}});
  run.report_json = j.dump(2) + "\n";
  return run;
}

}  // namespace hesynth
