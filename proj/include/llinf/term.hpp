#ifndef LLINF_TERM_HPP
#define LLINF_TERM_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "llinf/graph_util.hpp"

namespace llinf {

// A regular preterm is stored as a finite rooted graph. Bound variables are
// de Bruijn indices and free variables keep their names, so every node denotes
// the same subtree wherever it is reached from; cycles stand for infinite
// unfoldings.

using NodeId = std::int32_t;
inline constexpr NodeId no_node = -1;

enum class Tag : std::uint8_t { Free, Bound, App, Lam, Box, Cut };

// Abstraction kind for Lam, box kind for Box (Ind or Coind only).
enum class Mode : std::uint8_t { Lin, Ind, Coind };

struct Node {
  Tag tag = Tag::Cut;
  Mode mode = Mode::Lin;
  NodeId a = no_node;  // App: function, Lam: body, Box: contents
  NodeId b = no_node;  // App: argument
  std::uint32_t index = 0;
  std::string name;  // Free: the variable, Lam: binder name hint
};

inline constexpr std::size_t default_budget = 100000;

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(std::size_t budget)
      : std::runtime_error("budget exceeded: more than " + std::to_string(budget) + " nodes") {}
};

class InvalidPosition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Term {
  std::vector<Node> nodes;
  NodeId root = no_node;
  std::map<NodeId, std::string> labels;  // definition names, for printing

  const Node& at(NodeId id) const { return nodes[static_cast<std::size_t>(id)]; }
  Node& at(NodeId id) { return nodes[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes.size(); }

  NodeId add(Node n) {
    nodes.push_back(std::move(n));
    return static_cast<NodeId>(nodes.size() - 1);
  }
  NodeId add_free(std::string name) {
    Node n;
    n.tag = Tag::Free;
    n.name = std::move(name);
    return add(std::move(n));
  }
  NodeId add_bound(std::uint32_t index) {
    Node n;
    n.tag = Tag::Bound;
    n.index = index;
    return add(std::move(n));
  }
  NodeId add_app(NodeId f, NodeId x) {
    Node n;
    n.tag = Tag::App;
    n.a = f;
    n.b = x;
    return add(std::move(n));
  }
  NodeId add_lam(Mode m, std::string hint, NodeId body) {
    Node n;
    n.tag = Tag::Lam;
    n.mode = m;
    n.name = std::move(hint);
    n.a = body;
    return add(std::move(n));
  }
  NodeId add_box(Mode m, NodeId contents) {
    Node n;
    n.tag = Tag::Box;
    n.mode = m;
    n.a = contents;
    return add(std::move(n));
  }
  NodeId add_cut() { return add(Node{}); }

  // Copies all nodes of `other` into this graph; returns the image of its root.
  NodeId import(const Term& other) {
    const NodeId offset = static_cast<NodeId>(nodes.size());
    for (Node n : other.nodes) {
      if (n.a != no_node) n.a += offset;
      if (n.b != no_node) n.b += offset;
      nodes.push_back(std::move(n));
    }
    for (const auto& [id, name] : other.labels) labels.emplace(id + offset, name);
    return other.root + offset;
  }
};

// ---------------------------------------------------------------------------
// Positions and levels

enum class Step : std::uint8_t { Fun, Arg, Body, Inner };
using Path = std::vector<Step>;

inline char step_char(Step s) {
  switch (s) {
    case Step::Fun: return 'f';
    case Step::Arg: return 'a';
    case Step::Body: return 'b';
    case Step::Inner: return 'm';
  }
  return '?';
}

inline std::string path_string(const Path& p) {
  if (p.empty()) return "ε";
  std::string s;
  for (Step st : p) s += step_char(st);
  return s;
}

inline std::optional<Path> parse_path(const std::string& s) {
  Path p;
  if (s == "ε" || s.empty()) return p;
  for (char c : s) {
    switch (c) {
      case 'f': p.push_back(Step::Fun); break;
      case 'a': p.push_back(Step::Arg); break;
      case 'b': p.push_back(Step::Body); break;
      case 'm': p.push_back(Step::Inner); break;
      default: return std::nullopt;
    }
  }
  return p;
}

// Levels are words over {i, c}; `i` for an inductive box, `c` for a coinductive one.
inline std::string level_string(const std::string& level) { return level.empty() ? "ε" : level; }

inline std::size_t level_depth(const std::string& level) {
  return static_cast<std::size_t>(std::count(level.begin(), level.end(), 'c'));
}

inline bool is_proper_prefix(const std::string& t, const std::string& s) {
  return t.size() < s.size() && s.compare(0, t.size(), t) == 0;
}

// Depth first, then lexicographic with i < c.
inline bool level_less(const std::string& x, const std::string& y) {
  std::size_t dx = level_depth(x), dy = level_depth(y);
  if (dx != dy) return dx < dy;
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                      [](char p, char q) { return (p == 'c') < (q == 'c'); });
}

inline NodeId child(const Term& t, NodeId n, Step s) {
  const Node& node = t.at(n);
  switch (s) {
    case Step::Fun:
      if (node.tag == Tag::App) return node.a;
      break;
    case Step::Arg:
      if (node.tag == Tag::App) return node.b;
      break;
    case Step::Body:
      if (node.tag == Tag::Lam) return node.a;
      break;
    case Step::Inner:
      if (node.tag == Tag::Box) return node.a;
      break;
  }
  return no_node;
}

inline NodeId node_at(const Term& t, const Path& p) {
  NodeId n = t.root;
  for (Step s : p) {
    n = child(t, n, s);
    if (n == no_node) throw InvalidPosition("invalid position " + path_string(p));
  }
  return n;
}

inline std::string level_of(const Term& t, const Path& p) {
  std::string level;
  NodeId n = t.root;
  for (Step s : p) {
    if (s == Step::Inner) level += t.at(n).mode == Mode::Coind ? 'c' : 'i';
    n = child(t, n, s);
    if (n == no_node) throw InvalidPosition("invalid position " + path_string(p));
  }
  return level;
}

// ---------------------------------------------------------------------------
// Free variables

struct FreeInfo {
  std::set<std::string> names;
  std::set<std::uint32_t> loose;  // de Bruijn indices pointing outside the node
  std::uint32_t loose_bound() const { return loose.empty() ? 0 : *loose.rbegin() + 1; }
};

inline std::vector<NodeId> reachable(const Term& t, NodeId from) {
  std::vector<NodeId> order;
  if (from == no_node) return order;
  std::vector<bool> seen(t.size(), false);
  std::vector<NodeId> stack{from};
  seen[static_cast<std::size_t>(from)] = true;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    order.push_back(n);
    const Node& node = t.at(n);
    for (NodeId c : {node.b, node.a}) {
      if (c != no_node && !seen[static_cast<std::size_t>(c)]) {
        seen[static_cast<std::size_t>(c)] = true;
        stack.push_back(c);
      }
    }
  }
  return order;
}

inline std::vector<std::vector<std::size_t>> successor_lists(const Term& t) {
  std::vector<std::vector<std::size_t>> succ(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Node& n = t.nodes[i];
    if (n.a != no_node) succ[i].push_back(static_cast<std::size_t>(n.a));
    if (n.b != no_node) succ[i].push_back(static_cast<std::size_t>(n.b));
  }
  return succ;
}

inline std::vector<FreeInfo> free_info(const Term& t) {
  std::vector<FreeInfo> info(t.size());
  auto scc = detail::strongly_connected(successor_lists(t));
  auto update = [&](std::size_t i) {
    const Node& n = t.nodes[i];
    FreeInfo next;
    switch (n.tag) {
      case Tag::Free: next.names.insert(n.name); break;
      case Tag::Bound: next.loose.insert(n.index); break;
      case Tag::Cut: break;
      case Tag::App:
        next = info[static_cast<std::size_t>(n.a)];
        next.names.insert(info[static_cast<std::size_t>(n.b)].names.begin(),
                          info[static_cast<std::size_t>(n.b)].names.end());
        next.loose.insert(info[static_cast<std::size_t>(n.b)].loose.begin(),
                          info[static_cast<std::size_t>(n.b)].loose.end());
        break;
      case Tag::Lam: {
        const FreeInfo& body = info[static_cast<std::size_t>(n.a)];
        next.names = body.names;
        for (std::uint32_t k : body.loose)
          if (k > 0) next.loose.insert(k - 1);
        break;
      }
      case Tag::Box: next = info[static_cast<std::size_t>(n.a)]; break;
    }
    bool changed = next.names != info[i].names || next.loose != info[i].loose;
    info[i] = std::move(next);
    return changed;
  };
  for (std::size_t c = 0; c < scc.components.size(); ++c) {
    const auto& comp = scc.components[c];
    if (!scc.cyclic[c]) {
      update(comp[0]);
      continue;
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i : comp) changed = update(i) || changed;
    }
  }
  return info;
}

inline std::set<std::string> free_vars(const Term& t) {
  if (t.root == no_node) return {};
  return free_info(t)[static_cast<std::size_t>(t.root)].names;
}

// ---------------------------------------------------------------------------
// Graph maintenance

// Drops unreachable nodes; node order is a preorder from the root.
inline Term compact(const Term& t) {
  Term out;
  if (t.root == no_node) return out;
  std::vector<NodeId> remap(t.size(), no_node);
  std::vector<NodeId> order;
  std::vector<NodeId> stack{t.root};
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (remap[static_cast<std::size_t>(n)] != no_node) continue;
    remap[static_cast<std::size_t>(n)] = static_cast<NodeId>(order.size());
    order.push_back(n);
    const Node& node = t.at(n);
    if (node.b != no_node) stack.push_back(node.b);
    if (node.a != no_node) stack.push_back(node.a);
  }
  out.nodes.reserve(order.size());
  for (NodeId n : order) {
    Node copy = t.at(n);
    if (copy.a != no_node) copy.a = remap[static_cast<std::size_t>(copy.a)];
    if (copy.b != no_node) copy.b = remap[static_cast<std::size_t>(copy.b)];
    out.nodes.push_back(std::move(copy));
  }
  out.root = 0;
  for (const auto& [id, name] : t.labels)
    if (remap[static_cast<std::size_t>(id)] != no_node) out.labels[remap[static_cast<std::size_t>(id)]] = name;
  return out;
}

// Quotient by bisimilarity (Moore partition refinement). Binder hints are
// ignored, so alpha-equivalent subterms are merged.
inline Term minimize(const Term& input) {
  Term t = compact(input);
  const std::size_t n = t.size();
  if (n == 0) return t;
  std::vector<std::size_t> cls(n);
  {
    std::map<std::tuple<int, int, std::uint32_t, std::string>, std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
      const Node& nd = t.nodes[i];
      auto key = std::make_tuple(static_cast<int>(nd.tag), static_cast<int>(nd.mode), nd.index,
                                 nd.tag == Tag::Free ? nd.name : std::string());
      cls[i] = ids.emplace(key, ids.size()).first->second;
    }
  }
  std::size_t count = 0;
  for (;;) {
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> ids;
    std::vector<std::size_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Node& nd = t.nodes[i];
      std::size_t ca = nd.a == no_node ? SIZE_MAX : cls[static_cast<std::size_t>(nd.a)];
      std::size_t cb = nd.b == no_node ? SIZE_MAX : cls[static_cast<std::size_t>(nd.b)];
      next[i] = ids.emplace(std::make_tuple(cls[i], ca, cb), ids.size()).first->second;
    }
    std::size_t new_count = ids.size();
    cls = std::move(next);
    if (new_count == count) break;
    count = new_count;
  }
  Term q;
  std::vector<NodeId> rep(count, no_node);
  for (std::size_t i = 0; i < n; ++i)
    if (rep[cls[i]] == no_node) rep[cls[i]] = static_cast<NodeId>(i);
  q.nodes.resize(count);
  for (std::size_t c = 0; c < count; ++c) {
    Node nd = t.nodes[static_cast<std::size_t>(rep[c])];
    if (nd.a != no_node) nd.a = static_cast<NodeId>(cls[static_cast<std::size_t>(nd.a)]);
    if (nd.b != no_node) nd.b = static_cast<NodeId>(cls[static_cast<std::size_t>(nd.b)]);
    q.nodes[c] = std::move(nd);
  }
  q.root = static_cast<NodeId>(cls[static_cast<std::size_t>(t.root)]);
  for (const auto& [id, name] : t.labels) q.labels.emplace(static_cast<NodeId>(cls[static_cast<std::size_t>(id)]), name);
  return compact(q);
}

// ---------------------------------------------------------------------------
// Substitution on graphs

namespace detail {

struct PairHash {
  std::size_t operator()(const std::pair<NodeId, std::uint32_t>& p) const {
    return std::hash<std::uint64_t>()((static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.first)) << 32) ^ p.second);
  }
};

class Rewriter {
 public:
  Rewriter(Term& t, std::vector<std::uint32_t> loose_bound) : t_(t), bound_(std::move(loose_bound)) {}

  // Adds `d` to every index >= cutoff in the subtree at n.
  NodeId shift(NodeId n, std::uint32_t d, std::uint32_t cutoff) {
    if (d == 0 || bound_of(n) <= cutoff) return n;
    auto key = std::make_pair(n, cutoff);
    auto& memo = shift_memo_[d];
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    Node node = t_.at(n);
    switch (node.tag) {
      case Tag::Bound: {
        NodeId id = t_.add_bound(node.index + d);
        memo[key] = id;
        return id;
      }
      case Tag::App: {
        NodeId id = t_.add_app(no_node, no_node);
        memo[key] = id;
        NodeId l = shift(node.a, d, cutoff);
        NodeId r = shift(node.b, d, cutoff);
        t_.at(id).a = l;
        t_.at(id).b = r;
        return id;
      }
      case Tag::Lam: {
        NodeId id = t_.add_lam(node.mode, node.name, no_node);
        memo[key] = id;
        NodeId body = shift(node.a, d, cutoff + 1);
        t_.at(id).a = body;
        return id;
      }
      case Tag::Box: {
        NodeId id = t_.add_box(node.mode, no_node);
        memo[key] = id;
        NodeId c = shift(node.a, d, cutoff);
        t_.at(id).a = c;
        return id;
      }
      default: return n;
    }
  }

  // body[k := arg] where the binder of index k disappears.
  NodeId instantiate(NodeId body, NodeId arg, std::uint32_t k = 0) {
    if (bound_of(body) <= k) return body;
    auto key = std::make_pair(body, k);
    if (auto it = subst_memo_.find(key); it != subst_memo_.end()) return it->second;
    Node node = t_.at(body);
    switch (node.tag) {
      case Tag::Bound: {
        NodeId id = node.index == k ? shift(arg, k, 0) : t_.add_bound(node.index - 1);
        subst_memo_[key] = id;
        return id;
      }
      case Tag::App: {
        NodeId id = t_.add_app(no_node, no_node);
        subst_memo_[key] = id;
        NodeId l = instantiate(node.a, arg, k);
        NodeId r = instantiate(node.b, arg, k);
        t_.at(id).a = l;
        t_.at(id).b = r;
        return id;
      }
      case Tag::Lam: {
        NodeId id = t_.add_lam(node.mode, node.name, no_node);
        subst_memo_[key] = id;
        NodeId b = instantiate(node.a, arg, k + 1);
        t_.at(id).a = b;
        return id;
      }
      case Tag::Box: {
        NodeId id = t_.add_box(node.mode, no_node);
        subst_memo_[key] = id;
        NodeId c = instantiate(node.a, arg, k);
        t_.at(id).a = c;
        return id;
      }
      default: return body;
    }
  }

 private:
  std::uint32_t bound_of(NodeId n) const {
    auto i = static_cast<std::size_t>(n);
    return i < bound_.size() ? bound_[i] : 0;
  }

  Term& t_;
  std::vector<std::uint32_t> bound_;
  std::unordered_map<std::pair<NodeId, std::uint32_t>, NodeId, PairHash> subst_memo_;
  std::map<std::uint32_t, std::unordered_map<std::pair<NodeId, std::uint32_t>, NodeId, PairHash>> shift_memo_;
};

inline std::vector<std::uint32_t> loose_bounds(const Term& t) {
  auto info = free_info(t);
  std::vector<std::uint32_t> out(info.size());
  for (std::size_t i = 0; i < info.size(); ++i) out[i] = info[i].loose_bound();
  return out;
}

// Copies the nodes along `path` so that the node at the end can be replaced
// without touching other occurrences of shared nodes. Returns the new root.
inline NodeId rebuild_path(Term& t, const Path& path, NodeId replacement) {
  std::vector<NodeId> visited{t.root};
  for (Step s : path) visited.push_back(child(t, visited.back(), s));
  NodeId current = replacement;
  for (std::size_t i = path.size(); i-- > 0;) {
    Node copy = t.at(visited[i]);
    switch (path[i]) {
      case Step::Fun: copy.a = current; break;
      case Step::Arg: copy.b = current; break;
      case Step::Body: copy.a = current; break;
      case Step::Inner: copy.a = current; break;
    }
    current = t.add(std::move(copy));
  }
  return current;
}

}  // namespace detail

// Replaces the subterm at `path` by `replacement` (a term with the same
// loose-index context, usually closed).
inline Term replace_at(const Term& m, const Path& path, const Term& replacement) {
  node_at(m, path);
  Term t = m;
  NodeId r = t.import(replacement);
  t.root = detail::rebuild_path(t, path, r);
  return compact(t);
}

// M[x := N] for a free name x of M and a closed N. Since bound variables are
// indices nothing can be captured and N needs no shifting.
inline Term substitute(const Term& m, const std::string& x, const Term& n) {
  if (n.root != no_node && !free_info(n)[static_cast<std::size_t>(n.root)].loose.empty())
    throw std::invalid_argument("substitute: replacement has loose indices");
  Term t = m;
  NodeId arg = t.import(n);
  auto info = free_info(t);
  const std::size_t original = m.size();
  std::vector<NodeId> seen(original, no_node);
  auto go = [&](auto&& self, NodeId id) -> NodeId {
    auto i = static_cast<std::size_t>(id);
    if (i >= original || !info[i].names.count(x)) return id;
    if (seen[i] != no_node) return seen[i];
    Node node = t.at(id);
    if (node.tag == Tag::Free) return seen[i] = arg;
    NodeId nid = t.add(node);
    seen[i] = nid;
    if (node.a != no_node) {
      NodeId c = self(self, node.a);
      t.at(nid).a = c;
    }
    if (node.b != no_node) {
      NodeId c = self(self, node.b);
      t.at(nid).b = c;
    }
    return nid;
  };
  t.root = go(go, t.root);
  t.labels.clear();
  return compact(t);
}

// ---------------------------------------------------------------------------
// Finite approximations

// Every node at depth <= d; contents of coinductive boxes at depth d become Cut.
inline Term project_depth(const Term& m, std::size_t d, std::size_t budget = default_budget) {
  Term out;
  if (m.root == no_node) return out;
  struct Task {
    NodeId src;
    std::size_t depth;
    NodeId parent;
    Step slot;
  };
  std::vector<Task> stack{{m.root, 0, no_node, Step::Fun}};
  while (!stack.empty()) {
    Task task = stack.back();
    stack.pop_back();
    if (out.size() >= budget) throw BudgetExceeded(budget);
    Node copy = task.src == no_node ? Node{} : m.at(task.src);
    copy.a = copy.b = no_node;
    NodeId id = out.add(copy);
    if (task.parent == no_node) {
      out.root = id;
    } else if (task.slot == Step::Arg) {
      out.at(task.parent).b = id;
    } else {
      out.at(task.parent).a = id;
    }
    if (task.src == no_node) continue;
    const Node& node = m.at(task.src);
    switch (node.tag) {
      case Tag::App:
        stack.push_back({node.b, task.depth, id, Step::Arg});
        stack.push_back({node.a, task.depth, id, Step::Fun});
        break;
      case Tag::Lam: stack.push_back({node.a, task.depth, id, Step::Body}); break;
      case Tag::Box:
        if (node.mode == Mode::Coind) {
          if (task.depth == d)
            stack.push_back({no_node, task.depth, id, Step::Inner});
          else
            stack.push_back({node.a, task.depth + 1, id, Step::Inner});
        } else {
          stack.push_back({node.a, task.depth, id, Step::Inner});
        }
        break;
      default: break;
    }
  }
  return out;
}

// Every node of tree height < h; nodes at height h become Cut.
inline Term unfold_height(const Term& m, std::size_t h, std::size_t budget = default_budget) {
  Term out;
  if (m.root == no_node) return out;
  struct Task {
    NodeId src;
    std::size_t height;
    NodeId parent;
    Step slot;
  };
  std::vector<Task> stack{{m.root, 0, no_node, Step::Fun}};
  while (!stack.empty()) {
    Task task = stack.back();
    stack.pop_back();
    if (out.size() >= budget) throw BudgetExceeded(budget);
    bool cut = task.height >= h || task.src == no_node;
    Node copy = cut ? Node{} : m.at(task.src);
    copy.a = copy.b = no_node;
    NodeId id = out.add(copy);
    if (task.parent == no_node) {
      out.root = id;
    } else if (task.slot == Step::Arg) {
      out.at(task.parent).b = id;
    } else {
      out.at(task.parent).a = id;
    }
    if (cut) continue;
    const Node& node = m.at(task.src);
    if (node.tag == Tag::App) {
      stack.push_back({node.b, task.height + 1, id, Step::Arg});
      stack.push_back({node.a, task.height + 1, id, Step::Fun});
    } else if (node.a != no_node) {
      stack.push_back({node.a, task.height + 1, id, node.tag == Tag::Lam ? Step::Body : Step::Inner});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equality

// Alpha-bisimilarity of the two unfoldings, decided on pairs of nodes.
inline bool graph_bisimilar(const Term& m, const Term& n) {
  if (m.root == no_node || n.root == no_node) return m.root == n.root;
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<std::pair<NodeId, NodeId>> stack{{m.root, n.root}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    if (!seen.insert({x, y}).second) continue;
    const Node& p = m.at(x);
    const Node& q = n.at(y);
    if (p.tag != q.tag) return false;
    switch (p.tag) {
      case Tag::Free:
        if (p.name != q.name) return false;
        break;
      case Tag::Bound:
        if (p.index != q.index) return false;
        break;
      case Tag::App:
        stack.push_back({p.a, q.a});
        stack.push_back({p.b, q.b});
        break;
      case Tag::Lam:
      case Tag::Box:
        if (p.mode != q.mode) return false;
        stack.push_back({p.a, q.a});
        break;
      case Tag::Cut: break;
    }
  }
  return true;
}

inline bool equal_at_depth(const Term& m, const Term& n, std::size_t d, std::size_t budget = default_budget) {
  return graph_bisimilar(project_depth(m, d, budget), project_depth(n, d, budget));
}

inline bool is_cyclic(const Term& t) {
  if (t.root == no_node) return false;
  for (bool c : detail::strongly_connected(successor_lists(t)).cyclic)
    if (c) return true;
  return false;
}

inline bool has_cut(const Term& t) {
  for (NodeId id : reachable(t, t.root))
    if (t.at(id).tag == Tag::Cut) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Construction helpers

inline Term make_app(const Term& f, const Term& x) {
  Term t;
  NodeId a = t.import(f);
  NodeId b = t.import(x);
  t.root = t.add_app(a, b);
  return t;
}

inline Term make_apps(const Term& f, const std::vector<Term>& args) {
  Term t = f;
  for (const Term& a : args) t = make_app(t, a);
  return t;
}

inline Term make_box(Mode m, const Term& x) {
  Term t;
  NodeId a = t.import(x);
  t.root = t.add_box(m, a);
  return t;
}

inline Term make_free(const std::string& name) {
  Term t;
  t.root = t.add_free(name);
  return t;
}

// Abstracts the free name x of `body`; its occurrences become the bound variable.
inline Term make_lam(Mode mode, const std::string& x, const Term& body) {
  Term t = body;
  auto info = free_info(t);
  {
    // Abstracting a name that lies on a cycle has no finite de Bruijn graph.
    auto scc = detail::strongly_connected(successor_lists(t));
    for (NodeId id : reachable(t, t.root))
      if (info[static_cast<std::size_t>(id)].names.count(x) &&
          scc.cyclic[scc.component_of[static_cast<std::size_t>(id)]])
        throw std::invalid_argument("make_lam: " + x + " occurs on a cycle");
  }
  std::map<std::pair<NodeId, std::uint32_t>, NodeId> seen;
  const std::size_t original = t.size();
  std::size_t work = 0;
  auto go = [&](auto&& self, NodeId id, std::uint32_t depth) -> NodeId {
    if (static_cast<std::size_t>(id) >= original || !info[static_cast<std::size_t>(id)].names.count(x)) return id;
    if (++work > default_budget) throw BudgetExceeded(default_budget);
    auto key = std::make_pair(id, depth);
    if (auto it = seen.find(key); it != seen.end()) return it->second;
    Node node = t.at(id);
    NodeId nid = no_node;
    switch (node.tag) {
      case Tag::Free: nid = t.add_bound(depth); break;
      case Tag::App:
        nid = t.add_app(no_node, no_node);
        seen[key] = nid;
        {
          NodeId l = self(self, node.a, depth);
          NodeId r = self(self, node.b, depth);
          t.at(nid).a = l;
          t.at(nid).b = r;
        }
        break;
      case Tag::Lam:
        nid = t.add_lam(node.mode, node.name, no_node);
        seen[key] = nid;
        {
          NodeId b = self(self, node.a, depth + 1);
          t.at(nid).a = b;
        }
        break;
      case Tag::Box:
        nid = t.add_box(node.mode, no_node);
        seen[key] = nid;
        {
          NodeId c = self(self, node.a, depth);
          t.at(nid).a = c;
        }
        break;
      default: return id;
    }
    seen[key] = nid;
    return nid;
  };
  NodeId body_root = go(go, t.root, 0);
  t.root = t.add_lam(mode, x, body_root);
  t.labels.clear();
  return compact(t);
}

}  // namespace llinf

#endif
