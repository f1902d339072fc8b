#include "hesynth/synth.hpp"

#include <json.hpp>

#include "hesynth/verifier.hpp"

namespace hesynth {

using json = nlohmann::ordered_json;

int64_t cost_fn(const Program& p, const CostModel& m) {
  return estimated_latency(p, m) * (1 + mdepth(p));
}

const char* solution_status_name(SolutionStatus s) {
  switch (s) {
    case SolutionStatus::optimal: return "optimal";
    case SolutionStatus::timeout_best: return "timeout_best";
    case SolutionStatus::initial_only: return "initial_only";
  }
  return "?";
}

Sketch SketchFamily::sketch_for(int length) const {
  Sketch s;
  s.ring = ring;
  s.ct_inputs = ct_inputs;
  s.pt_consts = pt_consts;
  s.domain = domain;
  s.style = style;
  if (is_pinned()) {
    if (length != pinned_length())
      throw StructuralError("sketch family: pinned sketches have a fixed length");
    s.components = pinned;
    validate(s);
    return s;
  }
  return make_sketch(ring, ct_inputs, pt_consts, opcodes, length, domain, style);
}

namespace {

Solution make_solution(const Sketch& sketch, const HoleAssignment& a, const CostModel& cost,
                       int examples_used, SolutionStatus status) {
  Solution sol;
  sol.program = instantiate(sketch, a);
  sol.cost = cost_fn(sol.program, cost);
  sol.mdepth = mdepth(sol.program);
  sol.counts = instruction_count(sol.program);
  sol.examples_used = examples_used;
  sol.status = status;
  sol.sketch_length = sketch.length();
  return sol;
}

Example example_from_counterexample(const Counterexample& cex) {
  Example ex;
  ex.inputs = cex.inputs;
  ex.output = cex.expected;
  return ex;
}

}  // namespace

std::optional<Solution> synthesize_initial(const KernelSpec& spec, const SketchFamily& family,
                                           const SynthConfig& cfg, std::vector<Example>& examples,
                                           SynthResult& log, const Clock* clock) {
  cfg.validate();
  validate(spec);
  const Clock& clk = clock ? *clock : default_clock();
  if (examples.empty()) examples.push_back(random_example(spec, cfg.seed));

  const double deadline = clk.now_seconds() + cfg.timeout_secs;
  const int l_lo = family.is_pinned() ? family.pinned_length() : cfg.l_min;
  const int l_hi = family.is_pinned() ? family.pinned_length() : cfg.l_max;

  SearchConfig search_cfg = cfg.search;
  search_cfg.cost_bound.reset();

  for (int length = l_lo; length <= l_hi; ++length) {
    Sketch sketch = family.sketch_for(length);
    while (true) {
      SearchResult res = find_completion(sketch, examples, spec.mask, search_cfg, &clk, deadline);
      log.total_info.nodes += res.stats.generated;
      if (res.status == SearchStatus::unsat) break;  // sketch_L exhausted, grow L
      if (res.status == SearchStatus::budget) {
        log.failure_reason = "node budget exhausted";
        return std::nullopt;
      }
      if (res.status == SearchStatus::timeout) {
        log.failure_reason = "timeout before an initial solution";
        return std::nullopt;
      }
      Program candidate = instantiate(sketch, res.assignment);
      auto cex = verify(candidate, spec);
      if (!cex) {
        return make_solution(sketch, res.assignment, cfg.search.cost,
                             static_cast<int>(examples.size()), SolutionStatus::initial_only);
      }
      Example ex = example_from_counterexample(*cex);
      // CEGIS progress: the new example must reject the candidate that
      // produced it, otherwise the loop cannot make progress.
      if (!check_on_examples(candidate, std::span<const Example>(&ex, 1), spec.mask))
        throw StructuralError("cegis: counterexample does not reject its candidate");
      examples.push_back(std::move(ex));
      ++log.cegis_iterations;
    }
  }
  log.failure_reason = "sketch too restrictive";
  return std::nullopt;
}

Solution optimize(const KernelSpec& spec, const Sketch& sketch, const Solution& initial,
                  const SynthConfig& cfg, std::vector<Example>& examples, SynthResult& log,
                  const Clock* clock) {
  const Clock& clk = clock ? *clock : default_clock();
  Solution best = initial;
  best.status = SolutionStatus::optimal;
  double deadline = clk.now_seconds() + cfg.timeout_secs;

  SearchConfig search_cfg = cfg.search;
  while (true) {
    search_cfg.cost_bound = best.cost;
    SearchResult res = find_completion(sketch, examples, spec.mask, search_cfg, &clk, deadline);
    log.total_info.nodes += res.stats.generated;
    if (res.status == SearchStatus::unsat) {
      best.status = SolutionStatus::optimal;  // proved: nothing cheaper in the sketch
      return best;
    }
    if (res.status == SearchStatus::budget || res.status == SearchStatus::timeout) {
      best.status = SolutionStatus::timeout_best;
      return best;
    }
    Program candidate = instantiate(sketch, res.assignment);
    auto cex = verify(candidate, spec);
    if (cex) {
      Example ex = example_from_counterexample(*cex);
      if (!check_on_examples(candidate, std::span<const Example>(&ex, 1), spec.mask))
        throw StructuralError("cegis: counterexample does not reject its candidate");
      examples.push_back(std::move(ex));
      ++log.cegis_iterations;
      continue;  // same bound; the bound moves only on verified solutions
    }
    Solution improved = make_solution(sketch, res.assignment, cfg.search.cost,
                                      static_cast<int>(examples.size()), SolutionStatus::optimal);
    if (improved.cost >= best.cost)
      throw StructuralError("optimize: search returned a non-improving solution");
    best = improved;
    log.cost_trajectory.push_back(best.cost);
    deadline = clk.now_seconds() + cfg.timeout_secs;  // progress resets the clock
  }
}

SynthResult synthesize(const KernelSpec& spec, const SketchFamily& family, const SynthConfig& cfg,
                       const Clock* clock) {
  const Clock& clk = clock ? *clock : default_clock();
  SynthResult result;
  std::vector<Example> examples;

  const double start = clk.now_seconds();
  std::optional<Solution> initial = synthesize_initial(spec, family, cfg, examples, result, &clk);
  result.initial_info.time_seconds = clk.now_seconds() - start;
  result.initial_info.nodes = result.total_info.nodes;
  if (!initial) {
    result.success = false;
    result.examples_used = static_cast<int>(examples.size());
    return result;
  }
  result.initial = *initial;
  result.initial_info.cost = initial->cost;
  result.initial_info.counts = initial->counts;
  result.initial_info.mdepth = initial->mdepth;
  result.cost_trajectory.push_back(initial->cost);

  Solution final = *initial;
  if (cfg.optimize) {
    Sketch sketch = family.sketch_for(initial->sketch_length);
    final = optimize(spec, sketch, *initial, cfg, examples, result, &clk);
  } else {
    final.status = SolutionStatus::initial_only;
  }
  final.examples_used = static_cast<int>(examples.size());

  result.final = final;
  result.success = true;
  result.examples_used = static_cast<int>(examples.size());
  result.total_info.time_seconds = clk.now_seconds() - start;
  result.total_info.cost = final.cost;
  result.total_info.counts = final.counts;
  result.total_info.mdepth = final.mdepth;
  return result;
}

namespace {

json counts_to_json(const InstructionCount& c) {
  return json{{"arith", c.arith}, {"rotations", c.rotations}, {"total", c.total}};
}

}  // namespace

std::string emit_synth_report_json(const SynthResult& r, bool include_timings) {
  json j;
  j["success"] = r.success;
  if (!r.success) j["failure_reason"] = r.failure_reason;
  j["examples"] = r.examples_used;
  j["cegis_iterations"] = r.cegis_iterations;
  if (r.initial) {
    j["initial"] = {{"cost", r.initial->cost},
                    {"mdepth", r.initial->mdepth},
                    {"instructions", counts_to_json(r.initial->counts)},
                    {"sketch_length", r.initial->sketch_length},
                    {"nodes", r.initial_info.nodes}};
    if (include_timings) j["initial"]["time_seconds"] = r.initial_info.time_seconds;
  }
  if (r.final) {
    j["final"] = {{"cost", r.final->cost},
                  {"mdepth", r.final->mdepth},
                  {"instructions", counts_to_json(r.final->counts)},
                  {"status", solution_status_name(r.final->status)},
                  {"nodes", r.total_info.nodes}};
    if (include_timings) j["final"]["time_seconds"] = r.total_info.time_seconds;
  }
  j["cost_trajectory"] = r.cost_trajectory;
  return j.dump(2) + "\n";
}

}  // namespace hesynth
