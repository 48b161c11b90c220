#ifndef LLINF_REDUCTION_HPP
#define LLINF_REDUCTION_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llinf/term.hpp"

namespace llinf {

enum class RedexKind : std::uint8_t { Linear, Inductive, Coinductive };

inline const char* redex_kind_name(RedexKind k) {
  switch (k) {
    case RedexKind::Linear: return "linear";
    case RedexKind::Inductive: return "inductive";
    case RedexKind::Coinductive: return "coinductive";
  }
  return "?";
}

struct Redex {
  Path position;
  std::string level;
  RedexKind kind = RedexKind::Linear;
  std::size_t depth() const { return level_depth(level); }
  bool operator==(const Redex&) const = default;
};

struct StepRecord {
  Redex redex;
  std::size_t depth = 0;
};

// index, level, depth, kind, position; tab separated
inline std::string trace_line(std::size_t index, const StepRecord& r) {
  return std::to_string(index) + "\t" + level_string(r.redex.level) + "\t" + std::to_string(r.depth) + "\t" +
         redex_kind_name(r.redex.kind) + "\t" + path_string(r.redex.position);
}

inline std::string trace_line_human(std::size_t index, const StepRecord& r) {
  return "#" + std::to_string(index) + " " + redex_kind_name(r.redex.kind) + " redex at " +
         path_string(r.redex.position) + " (level " + level_string(r.redex.level) + ", depth " +
         std::to_string(r.depth) + ")";
}

// Redex kind if node n is the left-hand side of a basic rule.
inline std::optional<RedexKind> redex_at_node(const Term& t, NodeId n) {
  const Node& app = t.at(n);
  if (app.tag != Tag::App) return std::nullopt;
  const Node& f = t.at(app.a);
  if (f.tag != Tag::Lam) return std::nullopt;
  const Node& x = t.at(app.b);
  switch (f.mode) {
    case Mode::Lin: return RedexKind::Linear;
    case Mode::Ind:
      if (x.tag == Tag::Box && x.mode == Mode::Ind) return RedexKind::Inductive;
      return std::nullopt;
    case Mode::Coind:
      if (x.tag == Tag::Box && x.mode == Mode::Coind) return RedexKind::Coinductive;
      return std::nullopt;
  }
  return std::nullopt;
}

// An application that can never fire: a box in function position, or an
// abstraction applied to an abstraction or to a box of the other kind.
inline bool deadlock_at_node(const Term& t, NodeId n) {
  const Node& app = t.at(n);
  if (app.tag != Tag::App) return false;
  const Node& f = t.at(app.a);
  if (f.tag == Tag::Box) return true;
  if (f.tag != Tag::Lam || f.mode == Mode::Lin) return false;
  const Node& x = t.at(app.b);
  if (x.tag == Tag::Lam) return true;
  if (x.tag != Tag::Box) return false;
  return (f.mode == Mode::Ind) != (x.mode == Mode::Ind);
}

namespace detail {

inline bool path_less(const Path& a, const Path& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline bool redex_less(const Redex& a, const Redex& b) {
  if (a.level != b.level) return level_less(a.level, b.level);
  return path_less(a.position, b.position);
}

struct Site {
  Path path;
  std::string level;
};

struct Layer {
  std::vector<Redex> redexes;    // sorted
  std::vector<Site> deadlocks;   // sorted
};

// Walks the unfolding one depth layer at a time. Inductive boxes stay in the
// layer, coinductive box contents seed the next one. `visit` is called with
// each finished layer and returns false to stop.
inline void walk_layers(const Term& t, std::size_t max_depth, std::size_t budget,
                        const std::function<bool(std::size_t, Layer&)>& visit) {
  if (t.root == no_node) return;
  struct Entry {
    Path path;
    std::string level;
    NodeId node;
  };
  std::vector<Entry> frontier{{{}, "", t.root}};
  std::size_t visited = 0;
  for (std::size_t depth = 0; depth <= max_depth && !frontier.empty(); ++depth) {
    std::vector<Entry> next;
    Layer layer;
    for (Entry& start : frontier) {
      std::vector<Entry> stack{std::move(start)};
      while (!stack.empty()) {
        Entry e = std::move(stack.back());
        stack.pop_back();
        if (++visited > budget) throw BudgetExceeded(budget);
        const Node& n = t.at(e.node);
        if (auto k = redex_at_node(t, e.node)) layer.redexes.push_back({e.path, e.level, *k});
        if (deadlock_at_node(t, e.node)) layer.deadlocks.push_back({e.path, e.level});
        auto push = [&](std::vector<Entry>& into, NodeId c, Step s, char lv) {
          Entry ch{e.path, e.level, c};
          ch.path.push_back(s);
          if (lv) ch.level.push_back(lv);
          into.push_back(std::move(ch));
        };
        switch (n.tag) {
          case Tag::App:
            push(stack, n.b, Step::Arg, 0);
            push(stack, n.a, Step::Fun, 0);
            break;
          case Tag::Lam: push(stack, n.a, Step::Body, 0); break;
          case Tag::Box:
            if (n.mode == Mode::Ind)
              push(stack, n.a, Step::Inner, 'i');
            else if (depth < max_depth)
              push(next, n.a, Step::Inner, 'c');
            break;
          default: break;
        }
      }
    }
    std::sort(layer.redexes.begin(), layer.redexes.end(), redex_less);
    std::sort(layer.deadlocks.begin(), layer.deadlocks.end(), [](const Site& a, const Site& b) {
      if (a.level != b.level) return level_less(a.level, b.level);
      return path_less(a.path, b.path);
    });
    if (!visit(depth, layer)) return;
    frontier = std::move(next);
  }
}

inline bool any_reachable(const Term& t, const std::function<bool(NodeId)>& pred) {
  for (NodeId n : reachable(t, t.root))
    if (pred(n)) return true;
  return false;
}

}  // namespace detail

// Redexes at positions of length <= height_bound, ordered by depth, level
// (i before c) and then leftmost-outermost.
inline std::vector<Redex> find_redexes(const Term& m, std::size_t height_bound, std::size_t budget = default_budget) {
  std::vector<Redex> out;
  if (m.root == no_node) return out;
  struct Entry {
    Path path;
    std::string level;
    NodeId node;
  };
  std::vector<Entry> stack{{{}, "", m.root}};
  std::size_t visited = 0;
  while (!stack.empty()) {
    Entry e = std::move(stack.back());
    stack.pop_back();
    if (++visited > budget) throw BudgetExceeded(budget);
    if (auto k = redex_at_node(m, e.node)) out.push_back({e.path, e.level, *k});
    if (e.path.size() >= height_bound) continue;
    const Node& n = m.at(e.node);
    auto push = [&](NodeId c, Step s, char lv) {
      Entry ch{e.path, e.level, c};
      ch.path.push_back(s);
      if (lv) ch.level.push_back(lv);
      stack.push_back(std::move(ch));
    };
    switch (n.tag) {
      case Tag::App:
        push(n.b, Step::Arg, 0);
        push(n.a, Step::Fun, 0);
        break;
      case Tag::Lam: push(n.a, Step::Body, 0); break;
      case Tag::Box: push(n.a, Step::Inner, n.mode == Mode::Ind ? 'i' : 'c'); break;
      default: break;
    }
  }
  std::stable_sort(out.begin(), out.end(), detail::redex_less);
  return out;
}

inline bool has_redex(const Term& m) {
  return detail::any_reachable(m, [&](NodeId n) { return redex_at_node(m, n).has_value(); });
}

// Contracts the given redex occurrence; nodes along its path are copied so
// shared occurrences elsewhere stay untouched.
inline Term contract(const Term& m, const Redex& r, bool minimal = true) {
  NodeId at = node_at(m, r.position);
  auto kind = redex_at_node(m, at);
  if (!kind || *kind != r.kind)
    throw InvalidPosition("no " + std::string(redex_kind_name(r.kind)) + " redex at " + path_string(r.position));
  Term t = m;
  const Node app = t.at(at);
  const Node lam = t.at(app.a);
  NodeId arg = r.kind == RedexKind::Linear ? app.b : t.at(app.b).a;
  detail::Rewriter rw(t, detail::loose_bounds(t));
  NodeId result = rw.instantiate(lam.a, arg, 0);
  t.root = detail::rebuild_path(t, r.position, result);
  Term out = compact(t);
  return minimal ? minimize(out) : out;
}

// ---------------------------------------------------------------------------
// Strategies

struct LevelPredicate {
  enum Kind { Any, ExactLevel, DepthEq, DepthEven, DepthOdd } kind = Any;
  std::string level;
  std::size_t depth = 0;

  static LevelPredicate any() { return {}; }
  static LevelPredicate exact(std::string s) { return {ExactLevel, std::move(s), 0}; }
  static LevelPredicate at_depth(std::size_t n) { return {DepthEq, "", n}; }
  static LevelPredicate even() { return {DepthEven, "", 0}; }
  static LevelPredicate odd() { return {DepthOdd, "", 0}; }

  bool accepts(const std::string& s) const {
    switch (kind) {
      case Any: return true;
      case ExactLevel: return s == level;
      case DepthEq: return level_depth(s) == depth;
      case DepthEven: return level_depth(s) % 2 == 0;
      case DepthOdd: return level_depth(s) % 2 == 1;
    }
    return false;
  }
  std::optional<std::size_t> depth_cap() const {
    if (kind == ExactLevel) return level_depth(level);
    if (kind == DepthEq) return depth;
    return std::nullopt;
  }
};

inline constexpr std::size_t default_depth_cap = 64;

// First redex (in find_redexes order) satisfying `pred`, searching depths up
// to `max_depth`.
inline std::optional<Redex> first_redex(const Term& m, const LevelPredicate& pred,
                                        std::size_t max_depth = default_depth_cap,
                                        std::size_t budget = default_budget) {
  if (!has_redex(m)) return std::nullopt;
  std::size_t cap = std::min(max_depth, pred.depth_cap().value_or(max_depth));
  std::optional<Redex> found;
  detail::walk_layers(m, cap, budget, [&](std::size_t, detail::Layer& layer) {
    for (const Redex& r : layer.redexes)
      if (pred.accepts(r.level)) {
        found = r;
        return false;
      }
    return true;
  });
  return found;
}

inline std::optional<Term> step_at_levelset(const Term& m, const LevelPredicate& pred,
                                            std::size_t max_depth = default_depth_cap) {
  auto r = first_redex(m, pred, max_depth);
  if (!r) return std::nullopt;
  return contract(m, *r);
}

// One level-by-level step: the first redex in depth/level/leftmost order is
// always admissible since any redex at a proper prefix of its level would come
// earlier.
inline std::optional<std::pair<Term, StepRecord>> step_lbl(const Term& m, std::size_t max_depth = default_depth_cap,
                                                           std::size_t budget = default_budget) {
  auto r = first_redex(m, LevelPredicate::any(), max_depth, budget);
  if (!r) return std::nullopt;
  StepRecord rec{*r, r->depth()};
  return std::make_pair(contract(m, *r), rec);
}

// Redexes at depth <= max_depth that level-by-level reduction may fire: no
// redex sits at a proper prefix of their level.
// All redexes at coinductive depth <= max_depth, in canonical order.
inline std::vector<Redex> redexes_upto(const Term& m, std::size_t max_depth, std::size_t budget = default_budget) {
  std::vector<Redex> out;
  detail::walk_layers(m, max_depth, budget, [&](std::size_t, detail::Layer& layer) {
    out.insert(out.end(), layer.redexes.begin(), layer.redexes.end());
    return true;
  });
  return out;
}

inline std::vector<Redex> admissible_redexes(const Term& m, std::size_t max_depth,
                                             std::size_t budget = default_budget) {
  std::vector<Redex> all;
  detail::walk_layers(m, max_depth, budget, [&](std::size_t, detail::Layer& layer) {
    all.insert(all.end(), layer.redexes.begin(), layer.redexes.end());
    return true;
  });
  std::vector<std::string> levels;
  for (const Redex& r : all) levels.push_back(r.level);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<Redex> out;
  for (const Redex& r : all) {
    bool blocked = false;
    for (const std::string& l : levels)
      if (is_proper_prefix(l, r.level)) {
        blocked = true;
        break;
      }
    if (!blocked) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification and evaluation

enum class Shape { Normal, Reducible, Deadlocked };

inline const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Normal: return "normal";
    case Shape::Reducible: return "reducible";
    case Shape::Deadlocked: return "deadlocked";
  }
  return "?";
}

// Looks at every node within `height_bound` steps of the root. A redex wins
// over a deadlock pattern elsewhere: such a term can still move.
inline Shape classify(const Term& m, std::size_t height_bound = static_cast<std::size_t>(-1)) {
  if (m.root == no_node) return Shape::Normal;
  std::vector<std::size_t> dist(m.size(), static_cast<std::size_t>(-1));
  std::vector<NodeId> queue{m.root};
  dist[static_cast<std::size_t>(m.root)] = 0;
  bool deadlock = false;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    NodeId n = queue[qi];
    if (redex_at_node(m, n)) return Shape::Reducible;
    deadlock = deadlock || deadlock_at_node(m, n);
    std::size_t d = dist[static_cast<std::size_t>(n)];
    if (d >= height_bound) continue;
    const Node& node = m.at(n);
    for (NodeId c : {node.a, node.b})
      if (c != no_node && dist[static_cast<std::size_t>(c)] == static_cast<std::size_t>(-1)) {
        dist[static_cast<std::size_t>(c)] = d + 1;
        queue.push_back(c);
      }
  }
  return deadlock ? Shape::Deadlocked : Shape::Normal;
}

enum class Outcome { Normalized, FuelExhausted, Stuck };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Normalized: return "normalized";
    case Outcome::FuelExhausted: return "fuel-exhausted";
    case Outcome::Stuck: return "stuck";
  }
  return "?";
}

struct EvalStats {
  std::map<std::size_t, std::size_t> steps_per_depth;
  std::size_t fuel_consumed = 0;
  Outcome outcome = Outcome::Normalized;
  std::optional<Path> deadlock;  // first deadlocked position seen
  std::optional<std::size_t> exhausted_at;  // depth whose fuel ran out
};

struct EvalResult {
  Term projection;  // project_depth of the final term
  Term final_term;
  EvalStats stats;
  std::vector<StepRecord> trace;
};

// Normalizes depth 0, then depth 1, ... up to `depth`, with `fuel` steps per
// depth. Steps at depth d cannot disturb shallower depths, so once a depth is
// finished it stays final.
inline EvalResult eval_lbl(const Term& m, std::size_t depth, std::size_t fuel, std::size_t budget = default_budget,
                           const std::function<void(const Term&, const StepRecord&)>& on_step = {}) {
  EvalResult res;
  Term cur = m;
  for (std::size_t d = 0; d <= depth; ++d) {
    std::size_t spent = 0;
    for (;;) {
      auto r = first_redex(cur, LevelPredicate::any(), d, budget);
      if (!r) break;
      if (spent == fuel) {
        res.stats.outcome = Outcome::FuelExhausted;
        res.stats.exhausted_at = d;
        res.final_term = cur;
        res.projection = project_depth(cur, depth, budget);
        return res;
      }
      cur = contract(cur, *r);
      ++spent;
      ++res.stats.fuel_consumed;
      ++res.stats.steps_per_depth[r->depth()];
      StepRecord rec{*r, r->depth()};
      res.trace.push_back(rec);
      if (on_step) on_step(cur, rec);
    }
    if (!res.stats.deadlock) {
      detail::walk_layers(cur, d, budget, [&](std::size_t, detail::Layer& layer) {
        if (!layer.deadlocks.empty()) {
          res.stats.deadlock = layer.deadlocks.front().path;
          return false;
        }
        return true;
      });
    }
  }
  if (res.stats.deadlock) res.stats.outcome = Outcome::Stuck;
  res.final_term = cur;
  res.projection = project_depth(cur, depth, budget);
  return res;
}

}  // namespace llinf

#endif
