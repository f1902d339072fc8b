#pragma once

#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hesynth/clock.hpp"
#include "hesynth/cost_model.hpp"
#include "hesynth/kernel_spec.hpp"
#include "hesynth/sketch.hpp"

namespace hesynth {

struct SearchConfig {
  bool symmetry_breaking = true;
  bool observational_prune = true;
  std::optional<int64_t> cost_bound;  // solutions must cost strictly less
  uint64_t seed = 0;                  // reserved; the enumeration itself is deterministic
  std::optional<uint64_t> node_budget;
  CostModel cost;
  size_t observation_cap = 1u << 20;  // max memoized states

  void validate() const {
    cost.validate();
    if (node_budget && *node_budget == 0)
      throw StructuralError("search: node budget must be positive");
    if (cost_bound && *cost_bound <= 0)
      throw StructuralError("search: cost bound must be positive");
  }
};

struct SearchStats {
  uint64_t generated = 0;
  uint64_t pruned_symmetry = 0;
  uint64_t pruned_dead_code = 0;
  uint64_t pruned_cost = 0;
  uint64_t pruned_observational = 0;
  uint64_t pruned_examples = 0;
  uint64_t surviving = 0;  // generated minus all pruned
  double elapsed_seconds = 0.0;
};

enum class SearchStatus { found, unsat, budget, timeout };

struct SearchResult {
  SearchStatus status = SearchStatus::unsat;
  HoleAssignment assignment;  // meaningful when status == found
  SearchStats stats;
};

// Finds the first hole assignment (in the engine's fixed enumeration order)
// whose instantiation matches every example on the masked slots and, when a
// bound is set, costs strictly below it. Exhausting the space yields unsat;
// budget/timeout are reported separately. Deterministic for fixed inputs.
SearchResult find_completion(const Sketch& sketch, std::span<const Example> examples,
                             std::span<const int> mask, const SearchConfig& cfg,
                             const Clock* clock = nullptr,
                             double deadline_seconds = std::numeric_limits<double>::infinity());

// Canonical-form filter on an assignment prefix: commutative operands in
// increasing (source, rotation) order, left rotations only, no component dead
// beyond repair, and independent adjacent components in sorted order. The
// engine enumerates only canonical prefixes when symmetry breaking is on.
bool canonical_prefix(const Sketch& sketch, std::span<const ComponentChoice> prefix,
                      bool complete);

// Observational-equivalence table: partial assignments whose defined values
// agree on every example, with equal depth vectors (and equal rotation sets,
// so later rotation reuse costs the same), are merged; only the cheapest
// representative is extended.
struct ObservedState {
  std::vector<std::vector<uint32_t>> values;      // per component: E*n evaluations
  std::vector<int> depths;                        // per component
  std::vector<std::pair<int, int>> rotations;     // distinct (source, rot) pairs
  std::vector<uint32_t> live;                     // dangling component ids
};

class ObservationTable {
 public:
  explicit ObservationTable(size_t cap = 1u << 20) : cap_(cap) {}

  // True if this state should be extended: unseen, or cheaper than the best
  // previously seen representative.
  bool consider(const ObservedState& state, int64_t latency);
  size_t size() const { return entries_.size(); }

  struct Key {
    uint64_t a = 0;
    uint64_t b = 0;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const { return static_cast<size_t>(k.a ^ (k.b * 0x9e3779b97f4a7c15ull)); }
  };
  bool consider_hashed(uint64_t a, uint64_t b, int64_t latency);

 private:

  size_t cap_;
  std::unordered_map<Key, int64_t, KeyHash> entries_;
};

}  // namespace hesynth
