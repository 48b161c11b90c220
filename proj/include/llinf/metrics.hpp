#ifndef LLINF_METRICS_HPP
#define LLINF_METRICS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "llinf/graph_util.hpp"
#include "llinf/reduction.hpp"
#include "llinf/term.hpp"
#include "llinf/wellform.hpp"

namespace llinf {

// Parametrised size, weight and duplicability factor. All three only look at
// the part of the term down to coinductive depth m, so they are computed on
// the finite tree project_depth(M, m+1). Cut contributes nothing.
// Arithmetic saturates at detail::infinite_count.

namespace detail {

enum class Measure { Size, Weight, Dup };

class MetricWalker {
 public:
  MetricWalker(const Term& tree, Measure what, std::uint64_t n) : t_(tree), what_(what), n_(n) {}

  std::uint64_t at(NodeId id, std::size_t m) {
    // explicit stack, the projection can be deep
    struct Frame {
      NodeId id;
      std::size_t m;
      int stage;
      std::uint64_t acc;
    };
    std::vector<Frame> stack{{id, m, 0, 0}};
    std::uint64_t ret = 0;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const Node& node = t_.at(f.id);
      if (f.stage == 0) {
        switch (node.tag) {
          case Tag::Cut: ret = 0; stack.pop_back(); continue;
          case Tag::Free:
          case Tag::Bound:
            ret = what_ == Measure::Dup ? 1 : (f.m == 0 ? 1 : 0);
            stack.pop_back();
            continue;
          case Tag::Box:
            if (node.mode == Mode::Coind && f.m == 0) {
              ret = what_ == Measure::Dup ? 1 : 0;
              stack.pop_back();
              continue;
            }
            f.stage = 1;
            stack.push_back({node.a, node.mode == Mode::Coind ? f.m - 1 : f.m, 0, 0});
            continue;
          case Tag::Lam:
            f.stage = 1;
            stack.push_back({node.a, f.m, 0, 0});
            continue;
          case Tag::App:
            f.stage = 1;
            stack.push_back({node.a, f.m, 0, 0});
            continue;
        }
      }
      // returning from a child with value ret
      if (node.tag == Tag::App && f.stage == 1) {
        f.acc = ret;
        f.stage = 2;
        stack.push_back({node.b, f.m, 0, 0});
        continue;
      }
      std::uint64_t v = ret;
      switch (node.tag) {
        case Tag::App:
          if (what_ == Measure::Dup)
            v = std::max(f.acc, ret);
          else
            v = sat_add(sat_add(f.acc, ret), (what_ == Measure::Size && f.m == 0) ? 1 : 0);
          break;
        case Tag::Lam:
          if (what_ == Measure::Dup) {
            if (node.mode == Mode::Ind && f.m == 0) v = std::max(v, nfo(f.id));
          } else if (f.m == 0) {
            v = sat_add(v, 1);
          }
          break;
        case Tag::Box:
          if (node.mode == Mode::Ind && f.m == 0) {
            if (what_ == Measure::Size) v = sat_add(v, 1);
            if (what_ == Measure::Weight) v = sat_mul(v, n_);
          }
          break;
        default: break;
      }
      ret = v;
      stack.pop_back();
    }
    return ret;
  }

 private:
  std::uint64_t nfo(NodeId lam) {
    if (info_.empty()) info_ = free_info(t_);
    return count_occurrences(t_, info_, t_.at(lam).a, "", 0).total();
  }

  const Term& t_;
  Measure what_;
  std::uint64_t n_;
  std::vector<FreeInfo> info_;
};

inline std::uint64_t measure(const Term& m, std::size_t depth, Measure what, std::uint64_t n, std::size_t budget) {
  if (m.root == no_node) return 0;
  Term tree = project_depth(m, depth + 1, budget);
  return MetricWalker(tree, what, n).at(tree.root, depth);
}

}  // namespace detail

inline std::uint64_t size_at(const Term& m, std::size_t depth, std::size_t budget = default_budget) {
  return detail::measure(m, depth, detail::Measure::Size, 0, budget);
}

inline std::uint64_t wei(const Term& m, std::uint64_t n, std::size_t depth, std::size_t budget = default_budget) {
  return detail::measure(m, depth, detail::Measure::Weight, n, budget);
}

inline std::uint64_t df(const Term& m, std::size_t depth, std::size_t budget = default_budget) {
  return detail::measure(m, depth, detail::Measure::Dup, 0, budget);
}

inline std::uint64_t twei(const Term& m, std::size_t depth, std::size_t budget = default_budget) {
  return wei(m, df(m, depth, budget), depth, budget);
}

struct MetricRow {
  std::size_t depth;
  std::uint64_t size, df, twei;
};

inline std::vector<MetricRow> metric_table(const Term& m, std::size_t lo, std::size_t hi,
                                           std::size_t budget = default_budget) {
  std::vector<MetricRow> rows;
  for (std::size_t d = lo; d <= hi; ++d) {
    std::uint64_t f = df(m, d, budget);
    rows.push_back({d, size_at(m, d, budget), f, wei(m, f, d, budget)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Weight traces

enum class TraceVerdict { Pass, Fail, NotApplicable };

inline const char* verdict_name(TraceVerdict v) {
  switch (v) {
    case TraceVerdict::Pass: return "pass";
    case TraceVerdict::Fail: return "fail";
    case TraceVerdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

struct WeightSnapshot {
  std::optional<StepRecord> step;  // the step that produced this term, none for the start
  std::vector<std::uint64_t> twei;
  std::vector<std::uint64_t> df;
};

struct WeightTrace {
  std::vector<WeightSnapshot> rows;
  TraceVerdict verdict = TraceVerdict::Pass;
  std::string reason;
};

using Strategy = std::function<std::optional<std::pair<Term, StepRecord>>(const Term&)>;

inline Strategy lbl_strategy(std::size_t max_depth) {
  return [max_depth](const Term& t) { return step_lbl(t, max_depth); };
}

inline WeightSnapshot snapshot(const Term& m, std::size_t bound, std::size_t budget) {
  WeightSnapshot s;
  for (std::size_t d = 0; d <= bound; ++d) {
    std::uint64_t f = df(m, d, budget);
    s.df.push_back(f);
    s.twei.push_back(wei(m, f, d, budget));
  }
  return s;
}

// Checks one step: strict decrease at the step's depth, no change above it,
// and no growth of df anywhere up to the bound. Returns an explanation on
// failure.
inline std::optional<std::string> weight_step_violation(const WeightSnapshot& before, const WeightSnapshot& after,
                                                        std::size_t n) {
  for (std::size_t d = 0; d < before.twei.size(); ++d) {
    if (d < n && after.twei[d] != before.twei[d])
      return "twei at depth " + std::to_string(d) + " changed from " + std::to_string(before.twei[d]) + " to " +
             std::to_string(after.twei[d]) + " on a depth-" + std::to_string(n) + " step";
    if (d == n && after.twei[d] >= before.twei[d])
      return "twei at depth " + std::to_string(d) + " did not decrease (" + std::to_string(before.twei[d]) + " -> " +
             std::to_string(after.twei[d]) + ")";
    if (after.df[d] > before.df[d])
      return "df at depth " + std::to_string(d) + " grew from " + std::to_string(before.df[d]) + " to " +
             std::to_string(after.df[d]);
  }
  return std::nullopt;
}

inline WeightTrace weight_trace(const Term& m, std::size_t bound, const Strategy& strategy, std::size_t max_steps = 10000,
                                std::size_t budget = default_budget) {
  WeightTrace tr;
  if (!infer_env(System::FourS, m)) {
    tr.verdict = TraceVerdict::NotApplicable;
    tr.reason = "term is not well formed in 4S";
    return tr;
  }
  Term cur = m;
  tr.rows.push_back(snapshot(cur, bound, budget));
  for (std::size_t i = 0; i < max_steps; ++i) {
    auto next = strategy(cur);
    if (!next) return tr;
    cur = std::move(next->first);
    WeightSnapshot s = snapshot(cur, bound, budget);
    s.step = next->second;
    std::size_t n = next->second.depth;
    if (n <= bound)
      if (auto why = weight_step_violation(tr.rows.back(), s, n)) {
        tr.rows.push_back(std::move(s));
        tr.verdict = TraceVerdict::Fail;
        tr.reason = "step " + std::to_string(i + 1) + ": " + *why;
        return tr;
      }
    tr.rows.push_back(std::move(s));
  }
  tr.verdict = TraceVerdict::Fail;
  tr.reason = "no normal form within " + std::to_string(max_steps) + " steps";
  return tr;
}

}  // namespace llinf

#endif
