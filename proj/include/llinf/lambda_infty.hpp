#ifndef LLINF_LAMBDA_INFTY_HPP
#define LLINF_LAMBDA_INFTY_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "llinf/graph_util.hpp"
#include "llinf/parse.hpp"
#include "llinf/print.hpp"
#include "llinf/reduction.hpp"
#include "llinf/term.hpp"
#include "llinf/wellform.hpp"

namespace llinf {

// Pure (possibly infinite) lambda terms with depth flags abc: the depth grows
// when crossing an abstraction body (a), the function of an application (b),
// or its argument (c). Terms reuse Term with only Free/Bound/App/Lam(Lin).

inline bool is_pure(const Term& m) {
  for (NodeId id : reachable(m, m.root)) {
    const Node& n = m.at(id);
    if (n.tag == Tag::Box || n.tag == Tag::Cut) return false;
    if (n.tag == Tag::Lam && n.mode != Mode::Lin) return false;
  }
  return true;
}

inline bool flag_for(const DepthFlags& f, Step s) {
  switch (s) {
    case Step::Body: return f[0];
    case Step::Fun: return f[1];
    case Step::Arg: return f[2];
    default: return false;
  }
}

inline std::size_t pure_depth(const Path& p, const DepthFlags& f) {
  std::size_t d = 0;
  for (Step s : p) d += flag_for(f, s) ? 1 : 0;
  return d;
}

// Well-formation is pure guardedness here: every cycle has to cross a step
// whose flag is set.
inline CheckReport check_labc(const Term& m, const DepthFlags& f) {
  CheckReport rep;
  if (m.root == no_node) return rep;
  if (!is_pure(m)) {
    rep.reason = "not a pure lambda term";
    return rep;
  }
  // spanning tree of positions for error paths
  std::vector<NodeId> order = reachable(m, m.root);
  std::map<NodeId, std::pair<NodeId, Step>> parent;
  {
    std::vector<NodeId> queue{m.root};
    parent[m.root] = {no_node, Step::Fun};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const Node& n = m.at(queue[i]);
      auto visit = [&](NodeId c, Step s) {
        if (c != no_node && !parent.count(c)) {
          parent[c] = {queue[i], s};
          queue.push_back(c);
        }
      };
      if (n.tag == Tag::App) {
        visit(n.a, Step::Fun);
        visit(n.b, Step::Arg);
      } else if (n.tag == Tag::Lam) {
        visit(n.a, Step::Body);
      }
    }
  }
  auto path_to = [&](NodeId id) {
    Path p;
    while (parent.at(id).first != no_node) {
      p.push_back(parent.at(id).second);
      id = parent.at(id).first;
    }
    std::reverse(p.begin(), p.end());
    return p;
  };
  auto name_of = [&](NodeId id) {
    auto it = m.labels.find(id);
    return it != m.labels.end() ? it->second : "[" + path_string(path_to(id)) + "]";
  };

  std::map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = i;
  struct Edge {
    std::size_t to;
    Step step;
  };
  std::vector<std::vector<Edge>> inductive(order.size());
  std::vector<std::vector<std::size_t>> succ(order.size());
  std::size_t coind_edges = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Node& n = m.at(order[i]);
    auto add = [&](NodeId c, Step s) {
      if (flag_for(f, s)) {
        ++coind_edges;
        return;
      }
      inductive[i].push_back({index.at(c), s});
      succ[i].push_back(index.at(c));
    };
    if (n.tag == Tag::App) {
      add(n.a, Step::Fun);
      add(n.b, Step::Arg);
    } else if (n.tag == Tag::Lam) {
      add(n.a, Step::Body);
    }
  }
  rep.states = order.size();
  auto scc = detail::strongly_connected(succ);
  for (std::size_t c = 0; c < scc.components.size(); ++c) {
    if (!scc.cyclic[c]) continue;
    std::size_t start = scc.components[c][0];
    for (std::size_t s : scc.components[c])
      if (m.labels.count(order[s])) {
        start = s;
        break;
      }
    // shortest loop back to start inside the component
    std::map<std::size_t, std::pair<std::size_t, Step>> prev;
    std::vector<std::size_t> queue{start};
    bool closed = false;
    for (std::size_t qi = 0; qi < queue.size() && !closed; ++qi) {
      std::size_t u = queue[qi];
      for (const Edge& e : inductive[u]) {
        if (scc.component_of[e.to] != c) continue;
        if (e.to == start) {
          prev[start] = {u, e.step};
          closed = true;
          break;
        }
        if (!prev.count(e.to)) {
          prev[e.to] = {u, e.step};
          queue.push_back(e.to);
        }
      }
    }
    std::vector<std::pair<std::size_t, Step>> cycle;
    std::size_t cur = start;
    do {
      auto [p, st] = prev.at(cur);
      cycle.push_back({cur, st});
      cur = p;
    } while (cur != start);
    std::reverse(cycle.begin(), cycle.end());
    std::string out = name_of(order[start]), steps;
    for (auto [s, st] : cycle) {
      steps += step_char(st);
      if (m.labels.count(order[s]) || s == start) {
        out += " =" + steps + "=> " + name_of(order[s]);
        steps.clear();
      }
    }
    rep.reason = "inductive-only loop " + out;
    rep.failing_path = path_to(order[start]);
    return rep;
  }
  rep.accepted = true;
  // every remaining cycle crosses a flagged step
  auto all = detail::strongly_connected(successor_lists(m));
  for (bool cyc : all.cyclic)
    if (cyc) rep.cycles.push_back("cycle guarded by a flagged step");
  return rep;
}

// ---------------------------------------------------------------------------
// Reduction

struct PureRedex {
  Path position;
  std::size_t depth;
};

// Redexes at flag depth <= max_depth, leftmost-outermost first.
inline std::vector<PureRedex> pure_redexes(const Term& m, const DepthFlags& f, std::size_t max_depth,
                                           std::size_t budget = default_budget) {
  std::vector<PureRedex> out;
  if (m.root == no_node) return out;
  struct Entry {
    NodeId node;
    Path path;
    std::size_t depth;
  };
  std::vector<Entry> stack{{m.root, {}, 0}};
  std::size_t visited = 0;
  while (!stack.empty()) {
    Entry e = std::move(stack.back());
    stack.pop_back();
    if (++visited > budget) throw BudgetExceeded(budget);
    const Node& n = m.at(e.node);
    if (n.tag == Tag::App && m.at(n.a).tag == Tag::Lam) out.push_back({e.path, e.depth});
    auto push = [&](NodeId c, Step s) {
      std::size_t d = e.depth + (flag_for(f, s) ? 1 : 0);
      if (d > max_depth) return;
      Entry ch{c, e.path, d};
      ch.path.push_back(s);
      stack.push_back(std::move(ch));
    };
    if (n.tag == Tag::App) {
      push(n.b, Step::Arg);
      push(n.a, Step::Fun);
    } else if (n.tag == Tag::Lam) {
      push(n.a, Step::Body);
    }
  }
  return out;
}

inline Term contract_pure(const Term& m, const Path& p) {
  return contract(m, Redex{p, "", RedexKind::Linear});
}

// Contracts the leftmost redex at depth exactly n.
inline std::optional<std::pair<Term, Path>> lbeta_step(const Term& m, std::size_t n, const DepthFlags& f) {
  for (const PureRedex& r : pure_redexes(m, f, n))
    if (r.depth == n) return std::make_pair(contract_pure(m, r.position), r.position);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Embeddings

namespace detail {

template <class F>
Term map_nodes(const Term& m, F&& translate) {
  Term out;
  if (m.root == no_node) return out;
  std::map<NodeId, NodeId> done;
  std::vector<NodeId> order = reachable(m, m.root);
  for (NodeId id : order) done[id] = out.add_cut();  // one slot per source node
  for (NodeId id : order) {
    NodeId slot = done.at(id);
    Node built = translate(out, m.at(id), [&](NodeId c) { return done.at(c); });
    out.at(slot) = built;
  }
  out.root = done.at(m.root);
  for (const auto& [id, name] : m.labels)
    if (done.count(id)) out.labels[done.at(id)] = name;
  return compact(out);
}

inline Mode flag_mode(bool coinductive) { return coinductive ? Mode::Coind : Mode::Ind; }

}  // namespace detail

// Girard-style embedding of Λ^{00a}: arguments boxed, abstractions of the
// same kind.
inline Term embed_girard(const Term& m, bool a) {
  if (!check_labc(m, DepthFlags{false, false, a}).accepted)
    throw std::invalid_argument("embed_girard: term is not well formed in the 00" + std::string(a ? "1" : "0") +
                                " calculus");
  const Mode k = detail::flag_mode(a);
  return detail::map_nodes(m, [&](Term& out, const Node& n, auto slot) {
    Node r = n;
    switch (n.tag) {
      case Tag::App: r.a = slot(n.a); r.b = out.add_box(k, slot(n.b)); break;
      case Tag::Lam: r.mode = k; r.a = slot(n.a); break;
      default: break;
    }
    return r;
  });
}

// Call-by-value style embedding of Λ^{a0b}: every application goes through
// an a-kind identity, every argument and abstraction body gets a b-box.
inline Term embed_cbv(const Term& m, bool a, bool b) {
  if (!check_labc(m, DepthFlags{a, false, b}).accepted)
    throw std::invalid_argument("embed_cbv: term is not well formed in the " + std::string(a ? "1" : "0") + "0" +
                                std::string(b ? "1" : "0") + " calculus");
  const Mode ka = detail::flag_mode(a), kb = detail::flag_mode(b);
  return detail::map_nodes(m, [&](Term& out, const Node& n, auto slot) {
    Node r = n;
    switch (n.tag) {
      case Tag::App: {
        NodeId inner = out.add_app(slot(n.a), out.add_box(kb, slot(n.b)));
        NodeId id = out.add_lam(ka, "w", out.add_bound(0));
        r.a = id;
        r.b = inner;
        break;
      }
      case Tag::Lam: r.mode = kb; r.a = out.add_box(kb, slot(n.a)); break;
      default: break;
    }
    return r;
  });
}

inline Environment embedding_env(const Term& m, bool coinductive) {
  Environment env;
  for (const std::string& x : free_vars(m)) env[x] = coinductive ? Pattern::Coind : Pattern::Ind;
  return env;
}

// Where a source position ends up in the Girard image.
inline Path girard_path(const Path& p) {
  Path out;
  for (Step s : p) {
    out.push_back(s);
    if (s == Step::Arg) out.push_back(Step::Inner);
  }
  return out;
}

// Inverse of girard_path, none if the position is not an image.
inline std::optional<Path> girard_preimage(const Path& p) {
  Path out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.push_back(p[i]);
    if (p[i] == Step::Arg) {
      if (i + 1 >= p.size() || p[i + 1] != Step::Inner) return std::nullopt;
      ++i;
    } else if (p[i] == Step::Inner) {
      return std::nullopt;
    }
  }
  return out;
}

inline Path cbv_path(const Path& p) {
  Path out;
  for (Step s : p) {
    switch (s) {
      case Step::Fun: out.insert(out.end(), {Step::Arg, Step::Fun}); break;
      case Step::Arg: out.insert(out.end(), {Step::Arg, Step::Arg, Step::Inner}); break;
      case Step::Body: out.insert(out.end(), {Step::Body, Step::Inner}); break;
      default: break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation checks

struct SimulationReport {
  bool passed = true;
  std::size_t steps = 0;         // source steps simulated
  std::size_t target_steps = 0;  // steps taken on the image
  std::string failure;
};

// Perfect simulation of Λ^{00a}: source and image redexes correspond one to
// one (same depth), and contracting either side commutes with the embedding.
inline SimulationReport simulate_check(const Term& m, bool a, std::size_t steps, std::size_t max_depth = 3) {
  SimulationReport rep;
  const DepthFlags f{false, false, a};
  const RedexKind want = a ? RedexKind::Coinductive : RedexKind::Inductive;
  Term cur = m;
  auto fail = [&](std::string why) {
    rep.passed = false;
    rep.failure = "step " + std::to_string(rep.steps + 1) + ": " + why;
    return rep;
  };
  for (std::size_t i = 0; i < steps; ++i) {
    Term image = embed_girard(cur, a);
    auto src = pure_redexes(cur, f, max_depth);
    auto tgt = redexes_upto(image, max_depth);
    std::map<std::string, std::size_t> src_set, tgt_set;
    for (const PureRedex& r : src) src_set[path_string(girard_path(r.position))] = r.depth;
    for (const Redex& r : tgt) {
      if (r.kind != want) return fail("image redex at " + path_string(r.position) + " has the wrong kind");
      auto pre = girard_preimage(r.position);
      if (!pre) return fail("image redex at " + path_string(r.position) + " has no source position");
      tgt_set[path_string(r.position)] = r.depth();
    }
    if (src_set != tgt_set)
      return fail("redexes differ: " + std::to_string(src_set.size()) + " in the source, " +
                  std::to_string(tgt_set.size()) + " in the image");
    if (src.empty()) return rep;
    // source to image
    const PureRedex& r = src[i % src.size()];
    Term next = contract_pure(cur, r.position);
    Term image_next = contract(image, Redex{girard_path(r.position), level_of(image, girard_path(r.position)), want});
    ++rep.target_steps;
    if (!graph_bisimilar(embed_girard(next, a), image_next))
      return fail("image step at " + path_string(girard_path(r.position)) + " does not match the embedded reduct");
    // image to source
    const Redex& t = tgt[(i * 7 + 3) % tgt.size()];
    Term back = contract_pure(cur, *girard_preimage(t.position));
    ++rep.target_steps;
    if (!graph_bisimilar(embed_girard(back, a), contract(image, t)))
      return fail("image step at " + path_string(t.position) + " has no matching source step");
    cur = std::move(next);
    ++rep.steps;
  }
  return rep;
}

// Imperfect simulation of Λ^{a0b}: a source step becomes two image steps at
// the same depth, the inner b-redex then the a-kind identity.
inline SimulationReport simulate_cbv_check(const Term& m, bool a, bool b, std::size_t steps,
                                           std::size_t max_depth = 3) {
  SimulationReport rep;
  const DepthFlags f{a, false, b};
  Term cur = m;
  auto fail = [&](std::string why) {
    rep.passed = false;
    rep.failure = "step " + std::to_string(rep.steps + 1) + ": " + why;
    return rep;
  };
  for (std::size_t i = 0; i < steps; ++i) {
    auto src = pure_redexes(cur, f, max_depth);
    if (src.empty()) return rep;
    const PureRedex& r = src[i % src.size()];
    Term image = embed_cbv(cur, a, b);
    Path outer = cbv_path(r.position);
    Path inner = outer;
    inner.push_back(Step::Arg);
    auto first = redex_at_node(image, node_at(image, inner));
    if (!first) return fail("no redex at the image of " + path_string(r.position));
    Term mid = contract(image, Redex{inner, level_of(image, inner), *first});
    auto second = redex_at_node(mid, node_at(mid, outer));
    if (!second) {
      if (deadlock_at_node(mid, node_at(mid, outer)))
        return fail("identity of the other kind meets the result box at " + path_string(outer) + ": deadlock");
      return fail("no second redex at " + path_string(outer));
    }
    Term out = contract(mid, Redex{outer, level_of(mid, outer), *second});
    rep.target_steps += 2;
    Redex first_r{inner, level_of(image, inner), *first}, second_r{outer, level_of(mid, outer), *second};
    if (first_r.depth() != r.depth || second_r.depth() != r.depth)
      return fail("image steps at depths " + std::to_string(first_r.depth()) + "," +
                  std::to_string(second_r.depth()) + " for a source step at depth " + std::to_string(r.depth));
    Term next = contract_pure(cur, r.position);
    if (!graph_bisimilar(embed_cbv(next, a, b), out)) return fail("two image steps do not reach the embedded reduct");
    cur = std::move(next);
    ++rep.steps;
  }
  return rep;
}

}  // namespace llinf

#endif
