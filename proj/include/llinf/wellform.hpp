#ifndef LLINF_WELLFORM_HPP
#define LLINF_WELLFORM_HPP

#include <array>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "llinf/graph_util.hpp"
#include "llinf/term.hpp"

namespace llinf {

enum class System { LLinf, FourS };

// Ind doubles as the 4S "exactly one inductive box" pattern.
enum class Pattern : std::uint8_t { Lin, Ind, Coind, Dup, Any };

inline char pattern_prefix(Pattern p) {
  switch (p) {
    case Pattern::Lin: return 0;
    case Pattern::Ind: return '!';
    case Pattern::Coind: return '#';
    case Pattern::Dup: return '^';
    case Pattern::Any: return '*';
  }
  return 0;
}

using Environment = std::map<std::string, Pattern>;

inline std::string env_string(const Environment& env) {
  std::string out;
  for (const auto& [x, p] : env) {
    if (!out.empty()) out += ",";
    if (char c = pattern_prefix(p)) out += c;
    out += x;
  }
  return out;
}

// Comma separated `x`, `!x`, `#x`, `^x`, `*x`; the last two only in 4S.
inline Environment parse_env(const std::string& text, System sys) {
  Environment env;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
    Pattern p = Pattern::Lin;
    switch (item[0]) {
      case '!': p = Pattern::Ind; break;
      case '#': p = Pattern::Coind; break;
      case '^': p = Pattern::Dup; break;
      case '*': p = Pattern::Any; break;
      default: break;
    }
    if (p != Pattern::Lin) item = item.substr(1);
    if (item.empty()) throw std::invalid_argument("empty variable name in environment");
    if (sys == System::LLinf && (p == Pattern::Dup || p == Pattern::Any))
      throw std::invalid_argument("pattern " + std::string(1, pattern_prefix(p)) + item + " is only valid in 4s");
    if (!env.emplace(item, p).second) throw std::invalid_argument("variable " + item + " bound twice in environment");
  }
  return env;
}

// Γ ≺ Δ: Δ is Γ with some exactly-once-boxed patterns relaxed to duplicable ones.
inline bool env_precedes(const Environment& g, const Environment& d) {
  if (g.size() != d.size()) return false;
  for (const auto& [x, p] : g) {
    auto it = d.find(x);
    if (it == d.end()) return false;
    if (it->second != p && !(p == Pattern::Ind && it->second == Pattern::Dup)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Occurrence analysis

struct OccSummary {
  std::uint64_t linear = 0;          // outside every box
  std::uint64_t ind_one = 0;         // under exactly one inductive box, no coinductive one
  std::uint64_t deep_inductive = 0;  // under two or more inductive boxes only
  std::uint64_t coinductive = 0;     // under at least one coinductive box
  bool coind() const { return coinductive > 0; }
  bool infinite() const {
    return linear == detail::infinite_count || ind_one == detail::infinite_count ||
           deep_inductive == detail::infinite_count || coinductive == detail::infinite_count;
  }
  std::uint64_t total() const {
    return detail::sat_add(detail::sat_add(linear, ind_one), detail::sat_add(deep_inductive, coinductive));
  }
  bool operator==(const OccSummary&) const = default;
};

namespace detail {

// Counts occurrences of one variable below `start`: either the free name
// `name`, or (if name is empty) the de Bruijn index `index` as seen from start.
inline OccSummary count_occurrences(const Term& t, const std::vector<FreeInfo>& info, NodeId start,
                                    const std::string& name, std::uint32_t index) {
  struct Key {
    NodeId node;
    std::uint32_t k;
    std::uint8_t cls;
    bool operator<(const Key& o) const { return std::tie(node, k, cls) < std::tie(o.node, o.k, o.cls); }
  };
  const bool by_name = !name.empty();
  auto relevant = [&](NodeId n, std::uint32_t k) {
    const FreeInfo& fi = info[static_cast<std::size_t>(n)];
    return by_name ? fi.names.count(name) != 0 : fi.loose.count(k) != 0;
  };
  OccSummary out;
  if (!relevant(start, index)) return out;
  std::map<Key, std::size_t> ids;
  std::vector<Key> keys;
  std::vector<std::vector<std::size_t>> succ;
  std::vector<int> direct;  // class of a direct occurrence, or -1
  auto intern = [&](Key k) {
    auto [it, fresh] = ids.emplace(k, keys.size());
    if (fresh) {
      keys.push_back(k);
      succ.emplace_back();
      direct.push_back(-1);
    }
    return it->second;
  };
  intern({start, index, 0});
  for (std::size_t i = 0; i < keys.size(); ++i) {
    Key key = keys[i];
    const Node& n = t.at(key.node);
    auto push = [&](NodeId c, std::uint32_t k, std::uint8_t cls) {
      if (relevant(c, k)) {
        std::size_t j = intern({c, k, cls});
        succ[i].push_back(j);
      }
    };
    switch (n.tag) {
      case Tag::Free:
        if (by_name) direct[i] = key.cls;
        break;
      case Tag::Bound:
        if (!by_name) direct[i] = key.cls;
        break;
      case Tag::App:
        push(n.a, key.k, key.cls);
        push(n.b, key.k, key.cls);
        break;
      case Tag::Lam: push(n.a, by_name ? key.k : key.k + 1, key.cls); break;
      case Tag::Box: {
        // 0 unboxed, 1 one inductive box, 3 deeper inductive, 2 under a coinductive box
        std::uint8_t cls = 2;
        if (n.mode == Mode::Ind) cls = key.cls == 0 ? 1 : (key.cls == 2 ? 2 : 3);
        push(n.a, key.k, cls);
        break;
      }
      case Tag::Cut: break;
    }
  }
  auto scc = strongly_connected(succ);
  std::vector<std::array<std::uint64_t, 4>> counts(scc.components.size(), {0, 0, 0, 0});
  for (std::size_t c = 0; c < scc.components.size(); ++c) {
    std::array<std::uint64_t, 4> sum{0, 0, 0, 0};
    for (std::size_t s : scc.components[c]) {
      if (direct[s] >= 0) sum[static_cast<std::size_t>(direct[s])] = sat_add(sum[static_cast<std::size_t>(direct[s])], 1);
      for (std::size_t j : succ[s]) {
        std::size_t cj = scc.component_of[j];
        if (cj == c) continue;
        for (int q = 0; q < 4; ++q) sum[q] = sat_add(sum[q], counts[cj][q]);
      }
    }
    if (scc.cyclic[c])
      for (auto& v : sum)
        if (v) v = infinite_count;
    counts[c] = sum;
  }
  const auto& root = counts[scc.component_of[0]];
  out.linear = root[0];
  out.ind_one = root[1];
  out.coinductive = root[2];
  out.deep_inductive = root[3];
  return out;
}

}  // namespace detail

inline OccSummary occurrences(const Term& m, const std::string& x) {
  if (m.root == no_node) return {};
  auto info = free_info(m);
  return detail::count_occurrences(m, info, m.root, x, 0);
}

// ---------------------------------------------------------------------------
// Checking

struct CheckReport {
  bool accepted = false;
  std::string reason;   // on rejection
  Path failing_path;    // on rejection, where the derivation breaks
  std::size_t states = 0;
  std::vector<std::string> cycles;  // on acceptance: each back edge and the coinductive box it crosses

  std::string summary() const {
    if (accepted)
      return "accepted (" + std::to_string(states) + " states, " + std::to_string(cycles.size()) +
             " cycles guarded by coinductive boxes)";
    return "rejected: " + reason;
  }
};

namespace detail {

struct VarEnv {
  std::map<std::string, Pattern> free;
  std::vector<std::optional<Pattern>> bound;  // index 0 = innermost binder
  std::vector<std::string> bound_names;       // for messages only

  std::string key() const {
    std::string k;
    for (const auto& [x, p] : free) {
      k += x;
      k += static_cast<char>('0' + static_cast<int>(p));
      k += ',';
    }
    k += '|';
    for (const auto& p : bound) k += p ? static_cast<char>('0' + static_cast<int>(*p)) : '-';
    return k;
  }
  std::string bound_name(std::size_t k) const {
    return k < bound_names.size() && !bound_names[k].empty() ? bound_names[k] : "<" + std::to_string(k) + ">";
  }
};

inline const char* pattern_word(Pattern p, System sys) {
  switch (p) {
    case Pattern::Lin: return "linear";
    case Pattern::Ind: return sys == System::FourS ? "once-boxed" : "inductive";
    case Pattern::Coind: return "coinductive";
    case Pattern::Dup: return "duplicable";
    case Pattern::Any: return "any-pattern";
  }
  return "";
}

class Checker {
 public:
  Checker(const Term& t, System sys) : t_(t), sys_(sys), info_(free_info(t)) {}

  CheckReport run(const Environment& env) {
    CheckReport report;
    VarEnv start;
    for (const auto& [x, p] : env) start.free[x] = p;
    if (auto err = restrict_to(start, t_.root)) {
      report.reason = *err;
      return report;
    }
    intern(t_.root, std::move(start), no_parent, Step::Fun);
    // Depth-first exploration; children are generated on first visit.
    struct Frame {
      std::size_t state;
      std::size_t next = 0;
    };
    std::vector<Frame> stack{{0}};
    std::vector<std::uint8_t> mark(1, 1);  // 1 on stack, 2 done
    std::vector<std::size_t> stack_pos(1, 0);
    expand(0);
    if (failure_) return fail_report(report);
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < edges_[f.state].size()) {
        Edge e = edges_[f.state][f.next++];
        if (e.to >= mark.size()) {
          mark.resize(e.to + 1, 0);
          stack_pos.resize(e.to + 1, 0);
        }
        if (mark[e.to] == 0) {
          mark[e.to] = 1;
          stack_pos[e.to] = stack.size();
          stack.push_back({e.to});
          expand(e.to);
          if (failure_) return fail_report(report);
        } else if (mark[e.to] == 1) {
          // back edge: find the coinductive crossing on the cycle
          std::string where;
          if (e.coind) {
            where = position_then(f.state, e.step);
          } else {
            for (std::size_t i = stack_pos[e.to]; i + 1 < stack.size(); ++i) {
              std::size_t s = stack[i].state;
              const Edge& taken = edges_[s][stack[i].next - 1];
              if (taken.coind) {
                where = position_then(s, taken.step);
                break;
              }
            }
          }
          back_edges_.push_back({f.state, e.to, where});
        }
        continue;
      }
      mark[f.state] = 2;
      stack.pop_back();
    }
    report.states = states_.size();
    if (auto loop = inductive_loop()) {
      report.reason = "inductive-only loop " + *loop;
      report.failing_path = path_of(loop_state_);
      return report;
    }
    report.accepted = true;
    for (const auto& b : back_edges_)
      report.cycles.push_back("cycle " + position(b.from) + " -> " + position(b.to) + " crosses (mc) at " +
                              (b.where.empty() ? "?" : b.where));
    return report;
  }

 private:
  static constexpr std::size_t no_parent = static_cast<std::size_t>(-1);

  struct State {
    NodeId node;
    VarEnv env;
    std::size_t parent;
    Step step;
  };
  struct Edge {
    std::size_t to;
    bool coind;
    Step step;
  };
  struct BackEdge {
    std::size_t from, to;
    std::string where;
  };

  std::string var_name(bool is_free, const std::string& name, std::size_t k, const VarEnv& env) const {
    return is_free ? name : env.bound_name(k);
  }

  // Drops entries for variables that do not occur below `node`; linear
  // obligations cannot be dropped.
  std::optional<std::string> restrict_to(VarEnv& env, NodeId node) const {
    const FreeInfo& fi = info_[static_cast<std::size_t>(node)];
    for (auto it = env.free.begin(); it != env.free.end();) {
      if (fi.names.count(it->first)) {
        ++it;
        continue;
      }
      if (auto err = unused(it->second, it->first)) return err;
      it = env.free.erase(it);
    }
    std::size_t keep = fi.loose_bound();
    for (std::size_t k = 0; k < env.bound.size(); ++k) {
      if (!env.bound[k] || fi.loose.count(static_cast<std::uint32_t>(k))) continue;
      if (auto err = unused(*env.bound[k], env.bound_name(k))) return err;
      env.bound[k].reset();
    }
    if (env.bound.size() > keep) env.bound.resize(keep);
    if (env.bound_names.size() > keep) env.bound_names.resize(keep);
    return std::nullopt;
  }

  std::optional<std::string> unused(Pattern p, const std::string& x) const {
    if (p == Pattern::Lin) return "linear variable " + x + " is never used";
    if (p == Pattern::Ind && sys_ == System::FourS) return "once-boxed variable !" + x + " is never used";
    return std::nullopt;
  }

  std::size_t intern(NodeId node, VarEnv env, std::size_t parent, Step step) {
    std::string key = std::to_string(node) + ":" + env.key();
    auto [it, fresh] = ids_.emplace(std::move(key), states_.size());
    if (fresh) {
      states_.push_back({node, std::move(env), parent, step});
      edges_.emplace_back();
    }
    return it->second;
  }

  Path path_of(std::size_t s) const {
    Path p;
    while (s != no_parent && states_[s].parent != no_parent) {
      p.push_back(states_[s].step);
      s = states_[s].parent;
    }
    std::reverse(p.begin(), p.end());
    return p;
  }

  std::string position(std::size_t s) const { return path_string(path_of(s)); }

  std::string position_then(std::size_t s, Step st) const {
    Path p = path_of(s);
    p.push_back(st);
    return path_string(p);
  }

  std::string node_label(std::size_t s) const {
    auto it = t_.labels.find(states_[s].node);
    if (it != t_.labels.end()) return it->second;
    return "[" + position(s) + "]";
  }

  void fail(std::size_t s, const std::string& why) {
    failure_ = why;
    failure_state_ = s;
  }

  CheckReport& fail_report(CheckReport& r) {
    r.states = states_.size();
    r.failing_path = path_of(failure_state_);
    r.reason = *failure_ + " at " + path_string(r.failing_path);
    return r;
  }

  // Looks up the pattern of a variable node; nullopt pattern means absent.
  std::optional<Pattern> lookup(const Node& n, const VarEnv& env) const {
    if (n.tag == Tag::Free) {
      auto it = env.free.find(n.name);
      if (it == env.free.end()) return std::nullopt;
      return it->second;
    }
    if (n.index < env.bound.size()) return env.bound[n.index];
    return std::nullopt;
  }

  // Mode chosen for an inductive abstraction in 4S: duplicable or once-boxed.
  Pattern ind_binder(NodeId lam) {
    auto it = binder_cache_.find(lam);
    if (it != binder_cache_.end()) return it->second;
    OccSummary o = count_occurrences(t_, info_, t_.at(lam).a, "", 0);
    Pattern p;
    if (o.ind_one == 0 && o.coinductive == 0 && o.deep_inductive == 0)
      p = Pattern::Dup;
    else if (o.linear == 0 && o.ind_one == 1 && o.coinductive == 0 && o.deep_inductive == 0)
      p = Pattern::Ind;
    else
      p = o.linear == 0 ? Pattern::Ind : Pattern::Dup;
    binder_cache_[lam] = p;
    return p;
  }

  void add_child(std::size_t s, NodeId child, VarEnv env, Step step, bool coind) {
    if (auto err = restrict_to(env, child)) {
      fail(s, *err);
      return;
    }
    std::size_t id = intern(child, std::move(env), s, step);
    edges_[s].push_back({id, coind, step});
  }

  void expand(std::size_t s) {
    const NodeId node = states_[s].node;
    const Node& n = t_.at(node);
    const VarEnv env = states_[s].env;  // copy: states_ may grow
    switch (n.tag) {
      case Tag::Cut: return;
      case Tag::Free:
      case Tag::Bound: {
        bool is_free = n.tag == Tag::Free;
        std::string x = var_name(is_free, n.name, n.index, env);
        auto p = lookup(n, env);
        if (!p) return fail(s, "variable " + x + " is not in the environment");
        if (sys_ == System::FourS && (*p == Pattern::Coind || *p == Pattern::Ind))
          return fail(s, std::string(pattern_word(*p, sys_)) + " variable " + x + " used outside a box");
        return;
      }
      case Tag::App: {
        VarEnv left = env, right = env;
        const FreeInfo& fl = info_[static_cast<std::size_t>(n.a)];
        const FreeInfo& fr = info_[static_cast<std::size_t>(n.b)];
        auto split = [&](Pattern p, bool in_l, bool in_r, const std::string& x) -> std::optional<std::string> {
          bool linear = p == Pattern::Lin || (p == Pattern::Ind && sys_ == System::FourS);
          if (!linear) return std::nullopt;
          if (in_l && in_r)
            return std::string(pattern_word(p, sys_)) + " variable " + x + " occurs on both sides of an application";
          return std::nullopt;
        };
        for (const auto& [x, p] : env.free) {
          bool il = fl.names.count(x), ir = fr.names.count(x);
          if (auto e = split(p, il, ir, x)) return fail(s, *e);
          bool linear = p == Pattern::Lin || (p == Pattern::Ind && sys_ == System::FourS);
          if (linear) {
            if (!il) left.free.erase(x);
            if (!ir) right.free.erase(x);
          }
        }
        for (std::size_t k = 0; k < env.bound.size(); ++k) {
          if (!env.bound[k]) continue;
          Pattern p = *env.bound[k];
          bool il = fl.loose.count(static_cast<std::uint32_t>(k)), ir = fr.loose.count(static_cast<std::uint32_t>(k));
          if (auto e = split(p, il, ir, env.bound_name(k))) return fail(s, *e);
          bool linear = p == Pattern::Lin || (p == Pattern::Ind && sys_ == System::FourS);
          if (linear) {
            if (!il) left.bound[k].reset();
            if (!ir) right.bound[k].reset();
          }
        }
        add_child(s, n.a, std::move(left), Step::Fun, false);
        if (failure_) return;
        add_child(s, n.b, std::move(right), Step::Arg, false);
        return;
      }
      case Tag::Lam: {
        VarEnv inner = env;
        Pattern p = Pattern::Lin;
        if (n.mode == Mode::Coind) p = Pattern::Coind;
        if (n.mode == Mode::Ind) p = sys_ == System::FourS ? ind_binder(node) : Pattern::Ind;
        inner.bound.insert(inner.bound.begin(), p);
        inner.bound_names.resize(env.bound.size());
        inner.bound_names.insert(inner.bound_names.begin(), n.name);
        add_child(s, n.a, std::move(inner), Step::Body, false);
        return;
      }
      case Tag::Box: {
        const bool coind = n.mode == Mode::Coind;
        VarEnv inner = env;
        const FreeInfo& fi = info_[static_cast<std::size_t>(n.a)];
        auto remap = [&](Pattern p, const std::string& x, bool used) -> std::variant<std::string, std::optional<Pattern>> {
          if (p == Pattern::Lin) return "linear variable " + x + " occurs inside a box";
          if (sys_ == System::LLinf) return std::optional<Pattern>(p);
          switch (p) {
            case Pattern::Dup:
              if (used) return "duplicable variable ^" + x + " occurs inside a box";
              return std::optional<Pattern>();
            case Pattern::Ind:
              if (coind) return "once-boxed variable !" + x + " occurs inside a coinductive box";
              return std::optional<Pattern>(Pattern::Lin);
            case Pattern::Coind: return std::optional<Pattern>(coind ? Pattern::Any : Pattern::Coind);
            default: return std::optional<Pattern>(Pattern::Any);
          }
        };
        for (auto it = inner.free.begin(); it != inner.free.end();) {
          auto r = remap(it->second, it->first, fi.names.count(it->first) != 0);
          if (auto* e = std::get_if<std::string>(&r)) return fail(s, *e);
          auto np = std::get<std::optional<Pattern>>(r);
          if (np) {
            it->second = *np;
            ++it;
          } else {
            it = inner.free.erase(it);
          }
        }
        for (std::size_t k = 0; k < inner.bound.size(); ++k) {
          if (!inner.bound[k]) continue;
          auto r = remap(*inner.bound[k], env.bound_name(k), fi.loose.count(static_cast<std::uint32_t>(k)) != 0);
          if (auto* e = std::get_if<std::string>(&r)) return fail(s, *e);
          inner.bound[k] = std::get<std::optional<Pattern>>(r);
        }
        add_child(s, n.a, std::move(inner), Step::Inner, coind);
        return;
      }
    }
  }

  // A cycle of the state graph using inductive edges only, rendered with
  // definition names where available.
  std::optional<std::string> inductive_loop() {
    std::vector<std::vector<std::size_t>> succ(states_.size());
    for (std::size_t s = 0; s < states_.size(); ++s)
      for (const Edge& e : edges_[s])
        if (!e.coind) succ[s].push_back(e.to);
    auto scc = strongly_connected(succ);
    for (std::size_t c = scc.components.size(); c-- > 0;) {
      if (!scc.cyclic[c]) continue;
      // start at a labelled state if possible
      std::size_t start = scc.components[c][0];
      for (std::size_t s : scc.components[c])
        if (t_.labels.count(states_[s].node)) {
          start = s;
          break;
        }
      // BFS inside the component back to start
      std::map<std::size_t, std::pair<std::size_t, Step>> prev;
      std::vector<std::size_t> queue{start};
      std::size_t found = no_parent;
      for (std::size_t qi = 0; qi < queue.size() && found == no_parent; ++qi) {
        std::size_t u = queue[qi];
        for (const Edge& e : edges_[u]) {
          if (e.coind || scc.component_of[e.to] != c) continue;
          if (e.to == start) {
            prev[start] = {u, e.step};
            found = u;
            break;
          }
          if (!prev.count(e.to)) {
            prev[e.to] = {u, e.step};
            queue.push_back(e.to);
          }
        }
      }
      std::vector<std::pair<std::size_t, Step>> cycle;  // (state, step into it)
      std::size_t cur = start;
      do {
        auto [p, st] = prev[cur];
        cycle.push_back({cur, st});
        cur = p;
      } while (cur != start);
      std::reverse(cycle.begin(), cycle.end());
      std::string out = node_label(start);
      std::string steps;
      for (auto [s, st] : cycle) {
        steps += step_char(st);
        if (t_.labels.count(states_[s].node) || s == start) {
          out += " =" + steps + "=> " + node_label(s);
          steps.clear();
        }
      }
      loop_state_ = start;
      return out;
    }
    return std::nullopt;
  }

  const Term& t_;
  System sys_;
  std::vector<FreeInfo> info_;
  std::vector<State> states_;
  std::vector<std::vector<Edge>> edges_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::map<NodeId, Pattern> binder_cache_;
  std::vector<BackEdge> back_edges_;
  std::optional<std::string> failure_;
  std::size_t failure_state_ = 0;
  std::size_t loop_state_ = 0;
};

}  // namespace detail

inline CheckReport check(System sys, const Environment& env, const Term& m) {
  if (m.root == no_node) return {};
  return detail::Checker(m, sys).run(env);
}

inline CheckReport check_llinf(const Environment& env, const Term& m) {
  for (const auto& [x, p] : env)
    if (p == Pattern::Dup || p == Pattern::Any)
      throw std::invalid_argument("pattern of " + x + " is not available in llinf");
  return check(System::LLinf, env, m);
}

inline CheckReport check_ll4s(const Environment& env, const Term& m) { return check(System::FourS, env, m); }

// Per free variable, the least committal pattern suggested by its occurrences;
// none if the term is rejected under it.
inline std::optional<Environment> infer_env(System sys, const Term& m) {
  Environment env;
  for (const std::string& x : free_vars(m)) {
    OccSummary o = occurrences(m, x);
    bool only_linear = o.ind_one == 0 && o.deep_inductive == 0 && o.coinductive == 0;
    Pattern p;
    if (o.linear == 1 && only_linear) {
      p = Pattern::Lin;
    } else if (sys == System::LLinf) {
      p = Pattern::Ind;
    } else if (only_linear) {
      p = Pattern::Dup;
    } else if (o.linear == 0 && o.ind_one == 1 && o.deep_inductive == 0 && o.coinductive == 0) {
      p = Pattern::Ind;
    } else if (o.linear == 0 && o.ind_one == 0 && o.deep_inductive == 0) {
      p = Pattern::Coind;
    } else {
      p = Pattern::Any;
    }
    env[x] = p;
  }
  if (!check(sys, env, m).accepted) return std::nullopt;
  return env;
}

}  // namespace llinf

#endif
