#include "hesynth/search.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <tuple>

namespace hesynth {

namespace {

inline uint64_t mix64(uint64_t h, uint64_t x) {
  x *= 0x9e3779b97f4a7c15ull;
  x ^= x >> 29;
  h ^= x;
  h *= 0xff51afd7ed558ccdull;
  return h ^ (h >> 32);
}

struct OperandEntry {
  int src = 0;
  int rot = 0;
};

// Ordering key for a component choice; used by the independent-adjacent
// ordering rule. Rotate components sort after arithmetic ones.
using ChoiceKey = std::array<int, 7>;

ChoiceKey choice_key(const ComponentChoice& c) {
  if (c.is_rotate) return {1, 0, c.lhs.src, c.lhs.rot, c.rot_amount, 0, 0};
  return {0, static_cast<int>(c.op), c.lhs.src, c.lhs.rot,
          is_pt_op(c.op) ? c.pt : c.rhs.src, is_pt_op(c.op) ? 0 : c.rhs.rot, 0};
}

constexpr int kMaxRotations = 40;

struct RotSet {
  std::array<std::pair<int16_t, int16_t>, kMaxRotations> entries{};
  int count = 0;

  bool contains(int src, int rot) const {
    for (int i = 0; i < count; ++i)
      if (entries[static_cast<size_t>(i)].first == src &&
          entries[static_cast<size_t>(i)].second == rot)
        return true;
    return false;
  }
  void insert(int src, int rot) {
    entries[static_cast<size_t>(count++)] = {static_cast<int16_t>(src),
                                             static_cast<int16_t>(rot)};
  }
  uint64_t hash() const {
    // Order-insensitive combine; entries are unique.
    uint64_t h = 0;
    for (int i = 0; i < count; ++i)
      h += mix64(0x51ed2700ull, (static_cast<uint64_t>(static_cast<uint16_t>(
                                     entries[static_cast<size_t>(i)].first))
                                 << 16) ^
                                    static_cast<uint16_t>(entries[static_cast<size_t>(i)].second));
    return h;
  }
};

}  // namespace

bool ObservationTable::consider_hashed(uint64_t a, uint64_t b, int64_t latency) {
  Key key{a, b};
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    if (latency >= it->second) return false;
    it->second = latency;
    return true;
  }
  if (entries_.size() >= cap_) return true;
  entries_.emplace(key, latency);
  return true;
}

bool ObservationTable::consider(const ObservedState& state, int64_t latency) {
  uint64_t a = 0x243f6a8885a308d3ull;
  uint64_t b = 0x13198a2e03707344ull;
  for (size_t i = 0; i < state.values.size(); ++i) {
    for (uint32_t w : state.values[i]) {
      a = mix64(a, w);
      b = mix64(b, w ^ 0xa5a5a5a5u);
    }
    a = mix64(a, static_cast<uint64_t>(state.depths[i]) + 0x77);
    b = mix64(b, static_cast<uint64_t>(state.depths[i]) + 0x7777);
  }
  uint64_t rot_hash = 0;
  for (auto [src, rot] : state.rotations)
    rot_hash += mix64(0x51ed2700ull,
                      (static_cast<uint64_t>(static_cast<uint32_t>(src)) << 16) ^
                          static_cast<uint32_t>(rot));
  uint64_t live_hash = 0;
  for (uint32_t v : state.live) live_hash += mix64(0xdeadull, v);
  a = mix64(mix64(a, rot_hash), live_hash);
  b = mix64(mix64(b, live_hash), rot_hash);
  return consider_hashed(a, b, latency);
}

namespace {

class SearchEngine {
 public:
  SearchEngine(const Sketch& sketch, std::span<const Example> examples, std::span<const int> mask,
               const SearchConfig& cfg, const Clock* clock, double deadline)
      : sketch_(sketch),
        cfg_(cfg),
        clock_(clock ? clock : &default_clock()),
        deadline_(deadline),
        obs_(cfg.observation_cap) {
    cfg.validate();
    validate(sketch);
    n_ = sketch.ring.n;
    t_ = sketch.ring.t;
    L_ = sketch.length();
    E_ = static_cast<int>(examples.size());
    num_inputs_ = static_cast<int>(sketch.ct_inputs.size());
    num_values_ = num_inputs_ + L_;
    if (num_values_ > 60) throw StructuralError("search: too many values for the dense encoding");
    mask_.assign(mask.begin(), mask.end());

    arena_.assign(static_cast<size_t>(num_values_) * static_cast<size_t>(E_) *
                      static_cast<size_t>(n_),
                  0);
    for (int e = 0; e < E_; ++e) {
      const Example& ex = examples[static_cast<size_t>(e)];
      if (ex.inputs.size() != static_cast<size_t>(num_inputs_))
        throw StructuralError("search: example arity mismatch");
      for (int i = 0; i < num_inputs_; ++i)
        std::copy(ex.inputs[static_cast<size_t>(i)].begin(),
                  ex.inputs[static_cast<size_t>(i)].end(), row(i, e));
    }
    expected_.assign(static_cast<size_t>(E_) * mask_.size(), 0);
    for (int e = 0; e < E_; ++e)
      for (size_t m = 0; m < mask_.size(); ++m)
        expected_[static_cast<size_t>(e) * mask_.size() + m] =
            examples[static_cast<size_t>(e)].output[static_cast<size_t>(mask_[m])];

    depth_.assign(static_cast<size_t>(num_values_), 0);
    alias_base_.resize(static_cast<size_t>(num_values_));
    alias_rot_.assign(static_cast<size_t>(num_values_), 0);
    for (int v = 0; v < num_values_; ++v) alias_base_[static_cast<size_t>(v)] = v;

    // Admissible remainder: every component still to fill costs at least its
    // cheapest opcode (rotate components may be free until used).
    suffix_min_.assign(static_cast<size_t>(L_) + 1, 0);
    for (int k = L_ - 1; k >= 0; --k) {
      int64_t best = std::numeric_limits<int64_t>::max();
      for (const OpChoice& c : sketch.components[static_cast<size_t>(k)].choices)
        best = std::min(best, c.is_rotate ? 0 : op_weight(c.op, cfg.cost));
      suffix_min_[static_cast<size_t>(k)] = suffix_min_[static_cast<size_t>(k) + 1] + best;
    }

    chosen_.resize(static_cast<size_t>(L_));
    rotset_stack_.resize(static_cast<size_t>(L_) + 1);
    has_bound_ = cfg.cost_bound.has_value();
    bound_ = has_bound_ ? *cfg.cost_bound : std::numeric_limits<int64_t>::max();
  }

  SearchResult run() {
    const double start = clock_->now_seconds();
    RotSet empty;
    rotset_stack_[0] = empty;
    dfs(0, 0, 0, 0, 0x8c0ffeeull, 0xbeef5ull);
    SearchResult result;
    result.stats = stats_;
    result.stats.surviving =
        stats_.generated - stats_.pruned_symmetry - stats_.pruned_dead_code - stats_.pruned_cost -
        stats_.pruned_observational - stats_.pruned_examples;
    result.stats.elapsed_seconds = clock_->now_seconds() - start;
    if (found_) {
      result.status = SearchStatus::found;
      result.assignment = *found_;
    } else {
      result.status = aborted_ ? abort_status_ : SearchStatus::unsat;
    }
    return result;
  }

 private:
  uint32_t* row(int value, int e) {
    return arena_.data() + (static_cast<size_t>(value) * static_cast<size_t>(E_) +
                            static_cast<size_t>(e)) *
                               static_cast<size_t>(n_);
  }

  bool over_limits() {
    if (cfg_.node_budget && stats_.generated > *cfg_.node_budget) {
      abort_status_ = SearchStatus::budget;
      aborted_ = true;
      return true;
    }
    if ((stats_.generated & 0x3fff) == 0 && clock_->now_seconds() > deadline_) {
      abort_status_ = SearchStatus::timeout;
      aborted_ = true;
      return true;
    }
    return false;
  }

  // Operand lists are ordered source-ascending, rotation-descending; plain ct
  // holes admit only rotation 0.
  const std::vector<OperandEntry>& operand_list(int sources, HoleKind kind) {
    auto key = std::make_pair(sources, static_cast<int>(kind));
    auto it = operand_cache_.find(key);
    if (it != operand_cache_.end()) return it->second;
    std::vector<OperandEntry> list;
    for (int src = 0; src < sources; ++src) {
      if (kind == HoleKind::ct) {
        list.push_back({src, 0});
      } else {
        for (auto rit = sketch_.domain.amounts.rbegin(); rit != sketch_.domain.amounts.rend();
             ++rit)
          list.push_back({src, *rit});
      }
    }
    return operand_cache_.emplace(key, std::move(list)).first->second;
  }

  struct Pair {
    OperandEntry lhs, rhs;
  };

  // Pairs ordered by total rotation descending (ties by list position), the
  // order in which the engine proposes candidates. Commutative opcodes with
  // symmetric holes enumerate unordered pairs oriented in increasing
  // (source, rotation) order.
  const std::vector<Pair>& pair_list(int sources, HoleKind lhs, HoleKind rhs, bool unordered) {
    auto key = std::make_tuple(sources, static_cast<int>(lhs), static_cast<int>(rhs),
                               unordered ? 1 : 0);
    auto it = pair_cache_.find(key);
    if (it != pair_cache_.end()) return it->second;

    const auto& la = operand_list(sources, lhs);
    const auto& lb = operand_list(sources, rhs);
    struct Raw {
      int i, j;
      int sum;
    };
    std::vector<Raw> raw;
    if (unordered) {
      for (int i = 0; i < static_cast<int>(la.size()); ++i)
        for (int j = i; j < static_cast<int>(la.size()); ++j)
          raw.push_back({i, j, la[static_cast<size_t>(i)].rot + la[static_cast<size_t>(j)].rot});
    } else {
      for (int i = 0; i < static_cast<int>(la.size()); ++i)
        for (int j = 0; j < static_cast<int>(lb.size()); ++j)
          raw.push_back({i, j, la[static_cast<size_t>(i)].rot + lb[static_cast<size_t>(j)].rot});
    }
    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
      if (a.sum != b.sum) return a.sum > b.sum;
      if (a.i != b.i) return a.i < b.i;
      return a.j < b.j;
    });
    std::vector<Pair> pairs;
    pairs.reserve(raw.size());
    for (const Raw& r : raw) {
      OperandEntry a = la[static_cast<size_t>(r.i)];
      OperandEntry b = unordered ? la[static_cast<size_t>(r.j)] : lb[static_cast<size_t>(r.j)];
      if (unordered && (b.src < a.src || (b.src == a.src && b.rot < a.rot))) std::swap(a, b);
      pairs.push_back({a, b});
    }
    return pair_cache_.emplace(key, std::move(pairs)).first->second;
  }

  struct Resolved {
    int base;
    int rot;
  };

  Resolved resolve(int src, int rot) const {
    int base = alias_base_[static_cast<size_t>(src)];
    int eff = alias_rot_[static_cast<size_t>(src)] + rot;
    if (eff >= n_) eff -= n_;
    return {base, eff};
  }

  // True once a solution is found or the search is aborted.
  bool dfs(int k, uint64_t used, int64_t lat, int maxd, uint64_t h1, uint64_t h2) {
    const ComponentTemplate& tmpl = sketch_.components[static_cast<size_t>(k)];
    const bool is_final = k == L_ - 1;
    const int sources = num_inputs_ + k;
    const uint64_t defined = ((1ull << k) - 1) << num_inputs_;
    const uint64_t dangling = defined & ~used;
    if (is_final) ++final_epoch_;  // operand values changed; final tables are stale

    for (const OpChoice& choice : tmpl.choices) {
      if (choice.is_rotate) {
        if (is_final) continue;  // a bare rotation cannot be the result
        const auto& list = operand_list(sources, HoleKind::ct);
        for (const OperandEntry& base_op : list) {
          for (auto rit = sketch_.domain.amounts.rbegin(); rit != sketch_.domain.amounts.rend();
               ++rit) {
            ComponentChoice c;
            c.is_rotate = true;
            c.lhs = {base_op.src, 0};
            c.rot_amount = *rit;
            if (try_rotate(k, c, used, lat, maxd, h1, h2, dangling)) return true;
            if (aborted_) return true;
          }
        }
        continue;
      }
      if (is_pt_op(choice.op)) {
        const auto& list = operand_list(sources, choice.lhs);
        for (const OperandEntry& lhs : list) {
          ComponentChoice c;
          c.op = choice.op;
          c.lhs = {lhs.src, lhs.rot};
          c.pt = choice.pt;
          if (try_arith(k, c, is_final, used, lat, maxd, h1, h2, dangling)) return true;
          if (aborted_) return true;
        }
        continue;
      }
      if (is_final) {
        // Last component: solve for the right operand instead of enumerating
        // operand pairs. For each left operand the value the result needs is
        // determined slot-wise, so matching partners come from a hash probe.
        if (final_inverted(k, choice, used, lat, maxd, dangling)) return true;
        if (aborted_) return true;
        continue;
      }
      const bool unordered =
          is_commutative(choice.op) && cfg_.symmetry_breaking && choice.lhs == choice.rhs;
      const auto& pairs = pair_list(sources, choice.lhs, choice.rhs, unordered);
      for (const Pair& pr : pairs) {
        ComponentChoice c;
        c.op = choice.op;
        c.lhs = {pr.lhs.src, pr.lhs.rot};
        c.rhs = {pr.rhs.src, pr.rhs.rot};
        if (try_arith(k, c, is_final, used, lat, maxd, h1, h2, dangling)) return true;
        if (aborted_) return true;
      }
    }
    return false;
  }

  // Masked evaluations of every available operand of a hole kind, used for
  // solving the final component. Rebuilt once per prefix and hole kind.
  struct FinalTable {
    const std::vector<OperandEntry>* ops = nullptr;
    std::vector<uint32_t> vals;    // [#ops][E * mask]
    std::vector<uint64_t> hashes;  // per op
    uint64_t epoch = 0;
  };

  void build_final_table(FinalTable& table, int sources, HoleKind kind) {
    table.ops = &operand_list(sources, kind);
    const size_t width = static_cast<size_t>(E_) * mask_.size();
    const size_t count = table.ops->size();
    table.vals.assign(count * width, 0);
    table.hashes.assign(count, 0);
    table.epoch = final_epoch_;
    const int nm = n_ - 1;
    for (size_t oi = 0; oi < count; ++oi) {
      const OperandEntry& o = (*table.ops)[oi];
      Resolved r = resolve(o.src, o.rot);
      uint64_t h = 0x9042e1ull;
      uint32_t* dst = table.vals.data() + oi * width;
      for (int e = 0; e < E_; ++e) {
        const uint32_t* src_row = row(r.base, e);
        for (size_t m = 0; m < mask_.size(); ++m) {
          uint32_t v = src_row[(mask_[m] + r.rot) & nm];
          dst[static_cast<size_t>(e) * mask_.size() + m] = v;
          h = mix64(h, v);
        }
      }
      table.hashes[oi] = h;
    }
  }

  // Enumerates completions of the final component for one opcode choice:
  // left operands in list order, right operands among the hash matches for
  // the required values.
  bool final_inverted(int k, const OpChoice& choice, uint64_t used, int64_t lat, int maxd,
                      uint64_t dangling) {
    const int sources = num_inputs_ + k;
    const size_t width = static_cast<size_t>(E_) * mask_.size();
    const bool commutative = is_commutative(choice.op) && cfg_.symmetry_breaking &&
                             choice.lhs == choice.rhs;
    FinalTable& rhs_table = choice.rhs == HoleKind::ct ? final_ct_ : final_rot_;
    if (rhs_table.epoch != final_epoch_ || rhs_table.ops != &operand_list(sources, choice.rhs))
      build_final_table(rhs_table, sources, choice.rhs);
    const auto& lhs_list = operand_list(sources, choice.lhs);
    const int nm = n_ - 1;

    std::vector<uint32_t> required(width);
    for (const OperandEntry& lhs : lhs_list) {
      ++stats_.generated;
      if (over_limits()) return false;
      Resolved la = resolve(lhs.src, lhs.rot);

      // Solve op(lhs, rhs) == expected for rhs slot-wise; a zero left operand
      // under multiplication has no unique partner, so fall back to scanning.
      bool solvable = true;
      uint64_t h = 0x9042e1ull;
      for (int e = 0; e < E_ && solvable; ++e) {
        const uint32_t* src_row = row(la.base, e);
        for (size_t m = 0; m < mask_.size(); ++m) {
          uint32_t have = src_row[(mask_[m] + la.rot) & nm];
          uint32_t want = expected_[static_cast<size_t>(e) * mask_.size() + m];
          uint32_t need = 0;
          switch (choice.op) {
            case Op::add_ct_ct: need = mod_sub(want, have, t_); break;
            case Op::sub_ct_ct: need = mod_sub(have, want, t_); break;
            default:
              if (have == 0) {
                solvable = false;
              } else {
                need = mod_mul(want, mod_inv(have, t_), t_);
              }
              break;
          }
          if (!solvable) break;
          required[static_cast<size_t>(e) * mask_.size() + m] = need;
          h = mix64(h, need);
        }
      }

      auto try_pair = [&](const OperandEntry& rhs) -> bool {
        ++stats_.generated;
        if (commutative && std::pair{rhs.src, rhs.rot} < std::pair{lhs.src, lhs.rot}) {
          ++stats_.pruned_symmetry;  // mirror orientation handled at the other probe
          return false;
        }
        ComponentChoice c;
        c.op = choice.op;
        c.lhs = {lhs.src, lhs.rot};
        c.rhs = {rhs.src, rhs.rot};
        return try_arith(k, c, true, used, lat, maxd, 0, 0, dangling);
      };

      if (!solvable) {
        // Wildcard positions: scan the right operand list directly.
        for (const OperandEntry& rhs : *rhs_table.ops) {
          if (try_pair(rhs)) return true;
          if (aborted_) return true;
        }
        continue;
      }
      bool any = false;
      for (size_t oi = 0; oi < rhs_table.hashes.size(); ++oi) {
        if (rhs_table.hashes[oi] != h) continue;
        const uint32_t* vals = rhs_table.vals.data() + oi * width;
        if (!std::equal(required.begin(), required.end(), vals)) continue;
        any = true;
        if (try_pair((*rhs_table.ops)[oi])) return true;
        if (aborted_) return true;
      }
      if (!any) ++stats_.pruned_examples;
    }
    return false;
  }

  bool ordered_with_previous(int k, const ComponentChoice& c) {
    if (!cfg_.symmetry_breaking || k == 0) return true;
    const int prev = num_inputs_ + k - 1;
    bool uses_prev = c.lhs.src == prev;
    if (!c.is_rotate && !is_pt_op(c.op)) uses_prev = uses_prev || c.rhs.src == prev;
    if (uses_prev) return true;
    return !(choice_key(c) < choice_key(chosen_[static_cast<size_t>(k) - 1]));
  }

  bool try_rotate(int k, const ComponentChoice& c, uint64_t used, int64_t lat, int maxd,
                  uint64_t h1, uint64_t h2, uint64_t dangling) {
    ++stats_.generated;
    if (over_limits()) return false;
    if (!ordered_with_previous(k, c)) {
      ++stats_.pruned_symmetry;
      return false;
    }
    const int dense = num_inputs_ + k;
    uint64_t new_used = used | (1ull << c.lhs.src);
    uint64_t new_dangling = (dangling | (1ull << dense)) & ~new_used;
    if (std::popcount(new_dangling) > L_ - k) {
      ++stats_.pruned_dead_code;
      return false;
    }
    // Alias definition: no latency until a consumer pays for the rotation.
    Resolved base = resolve(c.lhs.src, c.lhs.rot);
    int total = base.rot + c.rot_amount;
    if (total >= n_) total -= n_;
    if (has_bound_) {
      int64_t lb = (lat + suffix_min_[static_cast<size_t>(k) + 1]) * (1 + maxd);
      if (lb >= bound_) {
        ++stats_.pruned_cost;
        return false;
      }
    }
    alias_base_[static_cast<size_t>(dense)] = base.base;
    alias_rot_[static_cast<size_t>(dense)] = total;
    depth_[static_cast<size_t>(dense)] = depth_[static_cast<size_t>(base.base)];
    chosen_[static_cast<size_t>(k)] = c;
    rotset_stack_[static_cast<size_t>(k) + 1] = rotset_stack_[static_cast<size_t>(k)];

    uint64_t nh1 = h1, nh2 = h2;
    if (cfg_.observational_prune) {
      nh1 = mix64(h1, 0xA11A5ull ^ (static_cast<uint64_t>(base.base) << 16) ^
                          static_cast<uint64_t>(total));
      nh2 = mix64(h2, 0x5A11Aull ^ (static_cast<uint64_t>(total) << 16) ^
                          static_cast<uint64_t>(base.base));
      if (!probe_observation(k, nh1, nh2, new_dangling, lat)) {
        ++stats_.pruned_observational;
        return false;
      }
    }
    return dfs(k + 1, new_used, lat, maxd, nh1, nh2);
  }

  bool try_arith(int k, const ComponentChoice& c, bool is_final, uint64_t used, int64_t lat,
                 int maxd, uint64_t h1, uint64_t h2, uint64_t dangling) {
    ++stats_.generated;
    if (over_limits()) return false;
    const bool pt = is_pt_op(c.op);
    const int dense = num_inputs_ + k;

    if (!ordered_with_previous(k, c)) {
      ++stats_.pruned_symmetry;
      return false;
    }

    uint64_t operand_bits = 1ull << c.lhs.src;
    if (!pt) operand_bits |= 1ull << c.rhs.src;
    uint64_t new_used = used | operand_bits;
    if (is_final) {
      if ((dangling & ~operand_bits) != 0) {
        ++stats_.pruned_dead_code;
        return false;
      }
    } else {
      uint64_t new_dangling = (dangling | (1ull << dense)) & ~new_used;
      if (std::popcount(new_dangling) > L_ - k) {
        ++stats_.pruned_dead_code;
        return false;
      }
    }

    Resolved la = resolve(c.lhs.src, c.lhs.rot);
    Resolved rb{0, 0};
    if (!pt) rb = resolve(c.rhs.src, c.rhs.rot);

    // Rotation cost is paid once per distinct (source value, amount) pair.
    const RotSet& rots = rotset_stack_[static_cast<size_t>(k)];
    int64_t new_lat = lat + op_weight(c.op, cfg_.cost);
    int new_rot_count = 0;
    std::pair<int, int> new_rot_a{-1, -1}, new_rot_b{-1, -1};
    if (la.rot != 0 && !rots.contains(la.base, la.rot)) {
      new_rot_a = {la.base, la.rot};
      ++new_rot_count;
    }
    if (!pt && rb.rot != 0 && !rots.contains(rb.base, rb.rot) &&
        std::pair<int, int>{rb.base, rb.rot} != new_rot_a) {
      new_rot_b = {rb.base, rb.rot};
      ++new_rot_count;
    }
    new_lat += cfg_.cost.rotate * new_rot_count;

    int d = depth_[static_cast<size_t>(la.base)];
    if (!pt) d = std::max(d, depth_[static_cast<size_t>(rb.base)]);
    if (c.op == Op::mul_ct_ct || c.op == Op::mul_ct_pt) d += 1;
    int new_maxd = std::max(maxd, d);

    if (has_bound_) {
      int64_t lb = is_final
                       ? new_lat * (1 + d)
                       : (new_lat + suffix_min_[static_cast<size_t>(k) + 1]) * (1 + new_maxd);
      if (lb >= bound_) {
        ++stats_.pruned_cost;
        return false;
      }
    }

    if (is_final) {
      // Only the masked slots matter for the result; compare eagerly.
      const uint32_t* lrow;
      const uint32_t* rrow = nullptr;
      const uint32_t* prow = nullptr;
      if (pt) prow = sketch_.pt_consts[static_cast<size_t>(c.pt)].value.slots.data();
      const int nm = n_ - 1;
      for (int e = 0; e < E_; ++e) {
        lrow = row(la.base, e);
        if (!pt) rrow = row(rb.base, e);
        for (size_t m = 0; m < mask_.size(); ++m) {
          const int s = mask_[m];
          uint32_t a = lrow[(s + la.rot) & nm];
          uint32_t b = pt ? prow[s] : rrow[(s + rb.rot) & nm];
          uint32_t v;
          switch (c.op) {
            case Op::add_ct_ct:
            case Op::add_ct_pt: v = mod_add(a, b, t_); break;
            case Op::sub_ct_ct:
            case Op::sub_ct_pt: v = mod_sub(a, b, t_); break;
            default: v = mod_mul(a, b, t_); break;
          }
          if (v != expected_[static_cast<size_t>(e) * mask_.size() + m]) {
            ++stats_.pruned_examples;
            return false;
          }
        }
      }
      chosen_[static_cast<size_t>(k)] = c;
      HoleAssignment a;
      a.components.assign(chosen_.begin(), chosen_.end());
      found_ = std::move(a);
      return true;
    }

    // Materialize the value for downstream components.
    const int nm = n_ - 1;
    const uint32_t* prow =
        pt ? sketch_.pt_consts[static_cast<size_t>(c.pt)].value.slots.data() : nullptr;
    uint64_t vh1 = 0x100full, vh2 = 0x200full;
    for (int e = 0; e < E_; ++e) {
      uint32_t* dst = row(dense, e);
      const uint32_t* lrow = row(la.base, e);
      const uint32_t* rrow = pt ? prow : row(rb.base, e);
      switch (c.op) {
        case Op::add_ct_ct:
          for (int i = 0; i < n_; ++i)
            dst[i] = mod_add(lrow[(i + la.rot) & nm], rrow[(i + rb.rot) & nm], t_);
          break;
        case Op::sub_ct_ct:
          for (int i = 0; i < n_; ++i)
            dst[i] = mod_sub(lrow[(i + la.rot) & nm], rrow[(i + rb.rot) & nm], t_);
          break;
        case Op::mul_ct_ct:
          for (int i = 0; i < n_; ++i)
            dst[i] = mod_mul(lrow[(i + la.rot) & nm], rrow[(i + rb.rot) & nm], t_);
          break;
        case Op::add_ct_pt:
          for (int i = 0; i < n_; ++i) dst[i] = mod_add(lrow[(i + la.rot) & nm], prow[i], t_);
          break;
        case Op::sub_ct_pt:
          for (int i = 0; i < n_; ++i) dst[i] = mod_sub(lrow[(i + la.rot) & nm], prow[i], t_);
          break;
        case Op::mul_ct_pt:
          for (int i = 0; i < n_; ++i) dst[i] = mod_mul(lrow[(i + la.rot) & nm], prow[i], t_);
          break;
      }
      if (cfg_.observational_prune)
        for (int i = 0; i < n_; ++i) {
          vh1 = mix64(vh1, dst[i]);
          vh2 = mix64(vh2, dst[i] ^ 0xa5a5a5a5u);
        }
    }

    depth_[static_cast<size_t>(dense)] = d;
    alias_base_[static_cast<size_t>(dense)] = dense;
    alias_rot_[static_cast<size_t>(dense)] = 0;
    chosen_[static_cast<size_t>(k)] = c;

    RotSet& next = rotset_stack_[static_cast<size_t>(k) + 1];
    next = rots;
    if (new_rot_a.first >= 0) next.insert(new_rot_a.first, new_rot_a.second);
    if (new_rot_b.first >= 0) next.insert(new_rot_b.first, new_rot_b.second);

    uint64_t nh1 = h1, nh2 = h2;
    if (cfg_.observational_prune) {
      nh1 = mix64(mix64(h1, vh1), static_cast<uint64_t>(d) + 1);
      nh2 = mix64(mix64(h2, vh2), static_cast<uint64_t>(d) + 0x101);
      uint64_t new_dangling = (dangling | (1ull << dense)) & ~new_used;
      if (!probe_observation(k, nh1 ^ next.hash(), nh2 + next.hash(), new_dangling, new_lat)) {
        ++stats_.pruned_observational;
        return false;
      }
    }

    return dfs(k + 1, new_used, new_lat, new_maxd, nh1, nh2);
  }

  bool probe_observation(int k, uint64_t h1, uint64_t h2, uint64_t dangling, int64_t lat) {
    uint64_t a = mix64(h1, dangling * 0x2545f4914f6cdd1dull + static_cast<uint64_t>(k));
    uint64_t b = mix64(h2, dangling + 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(k));
    return obs_.consider_hashed(a, b, lat);
  }

  const Sketch& sketch_;
  const SearchConfig& cfg_;
  const Clock* clock_;
  double deadline_;
  ObservationTable obs_;

  int n_ = 0, L_ = 0, E_ = 0, num_inputs_ = 0, num_values_ = 0;
  uint32_t t_ = 0;
  bool has_bound_ = false;
  int64_t bound_ = 0;

  std::vector<uint32_t> arena_;
  std::vector<uint32_t> expected_;
  std::vector<int> mask_;
  std::vector<int> depth_;
  std::vector<int> alias_base_;
  std::vector<int> alias_rot_;
  std::vector<int64_t> suffix_min_;
  std::vector<ComponentChoice> chosen_;
  std::vector<RotSet> rotset_stack_;

  std::map<std::pair<int, int>, std::vector<OperandEntry>> operand_cache_;
  std::map<std::tuple<int, int, int, int>, std::vector<Pair>> pair_cache_;
  FinalTable final_ct_;
  FinalTable final_rot_;
  uint64_t final_epoch_ = 0;

  SearchStats stats_;
  std::optional<HoleAssignment> found_;
  bool aborted_ = false;
  SearchStatus abort_status_ = SearchStatus::unsat;
};

}  // namespace

SearchResult find_completion(const Sketch& sketch, std::span<const Example> examples,
                             std::span<const int> mask, const SearchConfig& cfg,
                             const Clock* clock, double deadline_seconds) {
  if (examples.empty()) throw StructuralError("find_completion: needs at least one example");
  if (mask.empty()) throw StructuralError("find_completion: empty mask");
  SearchEngine engine(sketch, examples, mask, cfg, clock, deadline_seconds);
  return engine.run();
}

bool canonical_prefix(const Sketch& sketch, std::span<const ComponentChoice> prefix,
                      bool complete) {
  const int num_inputs = static_cast<int>(sketch.ct_inputs.size());
  const int L = sketch.length();
  if (static_cast<int>(prefix.size()) > L) return false;

  uint64_t used = 0;
  for (size_t k = 0; k < prefix.size(); ++k) {
    const ComponentChoice& c = prefix[k];
    const bool pt = !c.is_rotate && is_pt_op(c.op);
    // (ii) left rotations in [0, n) only.
    if (c.lhs.rot < 0 || c.lhs.rot >= sketch.ring.n) return false;
    if (!c.is_rotate && !pt && (c.rhs.rot < 0 || c.rhs.rot >= sketch.ring.n)) return false;
    // (i) commutative operands in increasing (source, rotation) order.
    if (!c.is_rotate && is_commutative(c.op)) {
      if (std::pair{c.rhs.src, c.rhs.rot} < std::pair{c.lhs.src, c.lhs.rot}) return false;
    }
    // (iv) independent adjacent components in sorted order.
    if (k > 0) {
      const int prev = num_inputs + static_cast<int>(k) - 1;
      bool uses_prev = c.lhs.src == prev || (!c.is_rotate && !pt && c.rhs.src == prev);
      if (!uses_prev && choice_key(c) < choice_key(prefix[k - 1])) return false;
    }
    used |= 1ull << c.lhs.src;
    if (!c.is_rotate && !pt) used |= 1ull << c.rhs.src;
    // (iii) dead components beyond repair.
    uint64_t defined = ((1ull << (k + 1)) - 1) << num_inputs;
    uint64_t dangling = defined & ~used;
    int remaining = L - static_cast<int>(k) - 1;
    if (std::popcount(dangling) > remaining + 1) return false;
  }
  if (complete) {
    uint64_t defined = ((1ull << prefix.size()) - 1) << num_inputs;
    uint64_t dangling = defined & ~used;
    if (dangling != (1ull << (num_inputs + static_cast<int>(prefix.size()) - 1))) return false;
  }
  return true;
}

}  // namespace hesynth
