// Command-line front end: synthesis, verification, evaluation, the benchmark
// suite, multi-step pipelines and code generation.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "hesynth/bench.hpp"
#include "hesynth/codegen.hpp"
#include "hesynth/program_json.hpp"
#include "hesynth/verifier.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hesynth;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path.string());
  out << text;
}

struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<double> timeout_secs;
  bool no_optimize = false;

  void apply(SynthConfig& synth) const {
    if (seed) synth.seed = *seed;
    if (timeout_secs) synth.timeout_secs = *timeout_secs;
    if (no_optimize) synth.optimize = false;
  }
};

void write_artifacts(const fs::path& out_dir, const std::string& basename, const Program& p,
                     const std::string& ext) {
  BackendProgram backend = insert_relinearization(explicate_rotations(p));
  write_file(out_dir / (basename + ".ir.json"), emit_json_ir(backend));
  write_file(out_dir / (basename + ext), emit_backend_source(backend, seal_template(), basename));
}

int cmd_synth(const std::string& config_path, const std::string& out_dir, const Overrides& ov) {
  RunConfig rc = parse_run_config_json(read_file(config_path));
  ov.apply(rc.synth);
  KernelSpec spec = build_kernel(rc.kernel);
  SketchFamily family = build_sketch(rc.kernel);
  SynthResult result = synthesize(spec, family, rc.synth);

  fs::path out(out_dir);
  write_file(out / "report.json", emit_synth_report_json(result, false));
  write_file(out / "timings.json", emit_synth_report_json(result, true));
  if (!result.success) {
    std::cerr << "synthesis failed: " << result.failure_reason << "\n";
    return kExitFailure;
  }
  const Program& best = result.final->program;
  write_file(out / (rc.kernel.kernel + ".json"), emit_program_json(best));
  write_artifacts(out, rc.kernel.kernel, best, ".gen.cpp");
  std::cout << "synthesized " << rc.kernel.kernel << ": total "
            << result.final->counts.total << " instructions (arith "
            << result.final->counts.arith << ", rotations " << result.final->counts.rotations
            << "), mdepth " << result.final->mdepth << ", cost " << result.final->cost << " ["
            << solution_status_name(result.final->status) << "]\n";
  return 0;
}

KernelConfig kernel_config_from_flags(const std::string& kernel, int n, int length, int image_h,
                                      int image_w, bool ct_coeffs) {
  KernelConfig cfg = kernel_defaults(kernel);
  if (n > 0) cfg.n = n;
  if (length > 0) cfg.length = length;
  if (image_h > 0) cfg.image_h = image_h;
  if (image_w > 0) cfg.image_w = image_w;
  cfg.ct_coeffs = ct_coeffs;
  return cfg;
}

int cmd_verify(const std::string& program_path, const KernelConfig& kc) {
  Program p = parse_program_json(read_file(program_path));
  KernelSpec spec = build_kernel(kc);
  auto cex = verify(p, spec);
  if (!cex) {
    std::cout << "ok: program implements " << spec.name << " on all masked slots\n";
    return 0;
  }
  std::cout << "counterexample:\n";
  for (size_t i = 0; i < spec.inputs.size(); ++i) {
    json slots = cex->inputs[i];
    std::cout << "  " << spec.inputs[i].name << " = " << slots.dump() << "\n";
  }
  for (int s : spec.mask)
    if (cex->expected[static_cast<size_t>(s)] != cex->actual[static_cast<size_t>(s)])
      std::cout << "  slot " << s << ": expected " << cex->expected[static_cast<size_t>(s)]
                << ", got " << cex->actual[static_cast<size_t>(s)] << "\n";
  return kExitFailure;
}

int cmd_run(const std::string& program_path, const std::string& inputs_path) {
  Program p = parse_program_json(read_file(program_path));
  json j = json::parse(read_file(inputs_path));
  std::vector<CtValue> inputs;
  for (const std::string& name : p.ct_inputs) {
    if (!j.contains(name)) throw ParseError("inputs file is missing '" + name + "'");
    inputs.push_back(CtValue{j.at(name).get<std::vector<uint32_t>>(), 0});
  }
  CtValue out = eval_program(p, inputs);
  json result{{"slots", out.slots}, {"mdepth", out.depth}};
  std::cout << result.dump(2) << "\n";
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir, const Overrides& ov) {
  SuiteConfig cfg = config_path.empty() ? SuiteConfig::defaults()
                                        : parse_suite_config_json(read_file(config_path));
  for (RunConfig& rc : cfg.runs) ov.apply(rc.synth);
  SuiteResult result = run_suite(cfg);

  fs::path out(out_dir);
  write_file(out / "bench_report.json", suite_report_json(result));
  write_file(out / "bench_timings.json", suite_timings_json(result));
  write_file(out / "bench_table.txt", suite_table_text(result));
  std::cout << suite_table_text(result);
  for (const BenchRow& row : result.rows)
    if (!row.ok) {
      std::cerr << "kernel " << row.kernel << " failed: " << row.error << "\n";
      return kExitFailure;
    }
  return 0;
}

int cmd_pipeline(const std::string& name, const std::string& config_path,
                 const std::string& out_dir, const Overrides& ov) {
  PipelineConfig cfg = config_path.empty()
                           ? PipelineConfig::defaults(name)
                           : parse_pipeline_config_json(read_file(config_path));
  ov.apply(cfg.synth);
  PipelineRun run = run_pipeline(cfg);

  fs::path out(out_dir);
  write_file(out / (cfg.name + "_pipeline.json"), run.report_json);
  if (!run.result.success) {
    std::cerr << "pipeline failed: " << run.result.failure_reason << "\n";
    return kExitFailure;
  }
  write_file(out / (cfg.name + ".json"), emit_program_json(run.result.composed));
  write_artifacts(out, cfg.name, run.result.composed, ".gen.cpp");
  std::cout << "pipeline " << cfg.name << ": " << run.result.counts.total
            << " instructions total (baseline " << run.baseline_total << "), mdepth "
            << run.result.mdepth << ", verified end-to-end\n";
  return run.result.verified ? 0 : kExitFailure;
}

int cmd_codegen(const std::string& program_path, const std::string& out_dir,
                const std::string& basename, const std::string& ext) {
  Program p = parse_program_json(read_file(program_path));
  std::string name = basename.empty() ? fs::path(program_path).stem().string() : basename;
  write_artifacts(fs::path(out_dir), name, p, ext);
  std::cout << "wrote " << name << ".ir.json and " << name << ext << " to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hesynth: synthesizing compiler for vectorized HE kernels"};
  app.require_subcommand(1);

  Overrides ov;
  app.add_option("--seed", ov.seed, "Override the synthesis seed");
  app.add_option("--timeout-secs", ov.timeout_secs, "Override the no-progress timeout");
  app.add_flag("--no-optimize", ov.no_optimize, "Stop after the initial solution");

  std::string config_path, out_dir = ".", program_path, inputs_path, basename, source_ext =
                                                                                   ".gen.cpp";
  std::string kernel_name, pipeline_name;
  int n = 0, length = 0, image_h = 0, image_w = 0;
  bool ct_coeffs = false;

  CLI::App* synth = app.add_subcommand("synth", "Synthesize a kernel from a run config");
  synth->add_option("--config", config_path, "Run config JSON")->required();
  synth->add_option("--out-dir", out_dir, "Output directory");

  CLI::App* verify_cmd = app.add_subcommand("verify", "Verify a program against a kernel spec");
  verify_cmd->add_option("--program", program_path, "Program JSON")->required();
  verify_cmd->add_option("--kernel", kernel_name, "Kernel name")->required();
  verify_cmd->add_option("--n", n, "Slot count");
  verify_cmd->add_option("--length", length, "Vector length");
  verify_cmd->add_option("--image-h", image_h, "Image height (with border)");
  verify_cmd->add_option("--image-w", image_w, "Image width (with border)");
  verify_cmd->add_flag("--ct-coeffs", ct_coeffs, "Coefficients as ciphertexts");

  CLI::App* run_cmd = app.add_subcommand("run", "Evaluate a program on concrete inputs");
  run_cmd->add_option("--program", program_path, "Program JSON")->required();
  run_cmd->add_option("--inputs", inputs_path, "Inputs JSON: {\"name\": [slots...]}")->required();

  CLI::App* bench = app.add_subcommand("bench", "Run the benchmark suite");
  bench->add_option("--config", config_path, "Suite config JSON (default: full suite)");
  bench->add_option("--out-dir", out_dir, "Output directory");

  CLI::App* pipeline = app.add_subcommand("pipeline", "Run a multi-step pipeline");
  pipeline->add_option("--name", pipeline_name, "Pipeline name: sobel | harris");
  pipeline->add_option("--config", config_path, "Pipeline config JSON");
  pipeline->add_option("--out-dir", out_dir, "Output directory");

  CLI::App* codegen = app.add_subcommand("codegen", "Lower a program to backend artifacts");
  codegen->add_option("--program", program_path, "Program JSON")->required();
  codegen->add_option("--out-dir", out_dir, "Output directory");
  codegen->add_option("--basename", basename, "Artifact base name");
  codegen->add_option("--source-ext", source_ext, "Backend source extension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(config_path, out_dir, ov);
    if (verify_cmd->parsed())
      return cmd_verify(program_path,
                        kernel_config_from_flags(kernel_name, n, length, image_h, image_w,
                                                 ct_coeffs));
    if (run_cmd->parsed()) return cmd_run(program_path, inputs_path);
    if (bench->parsed()) return cmd_bench(config_path, out_dir, ov);
    if (pipeline->parsed()) {
      if (pipeline_name.empty() && config_path.empty()) {
        std::cerr << "usage: pipeline needs --name or --config\n";
        return kExitUsage;
      }
      return cmd_pipeline(pipeline_name, config_path, out_dir, ov);
    }
    if (codegen->parsed()) return cmd_codegen(program_path, out_dir, basename, source_ext);
  } catch (const ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
