#ifndef LLINF_GENERATE_HPP
#define LLINF_GENERATE_HPP

#include <array>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "llinf/term.hpp"
#include "llinf/wellform.hpp"

namespace llinf {

// Random well-formed terms. Generation is type directed, so abstractions only
// ever meet arguments of the matching kind and no deadlock can arise. Two
// free variables are always available: a sink `g` that swallows any
// arguments and an inert constant `c`, both usable at every type. Optional
// linear `u` and (4S) once-boxed `v` exercise resource splitting.

struct GenOptions {
  System system = System::FourS;
  std::size_t max_nodes = 40;
  double cycle_rate = 0.5;  // chance to open a closed, referable subterm
  bool allow_cycles = true;
  bool linear_globals = true;
};

struct Generated {
  Term term;
  Environment env;
};

namespace detail {

struct GType;
using GTypeP = std::shared_ptr<const GType>;

struct GType {
  enum Kind { Base, LinArrow, IndArrow, CoindArrow, IndBox, CoindBox } kind = Base;
  GTypeP arg, res;
};

inline bool same_type(const GTypeP& a, const GTypeP& b) {
  if (a->kind != b->kind) return false;
  if (a->kind == GType::Base) return true;
  if (a->kind == GType::IndBox || a->kind == GType::CoindBox) return same_type(a->arg, b->arg);
  return same_type(a->arg, b->arg) && same_type(a->res, b->res);
}

class TermGenerator {
 public:
  TermGenerator(std::mt19937_64& rng, GenOptions opt) : rng_(rng), opt_(opt) {}

  std::optional<Generated> attempt() {
    t_ = Term{};
    remaining_ = std::uniform_int_distribution<int>(4, static_cast<int>(opt_.max_nodes) * 2 / 3)(rng_);
    counter_ = 0;
    Generated g;
    const bool fours = opt_.system == System::FourS;
    g.env["g"] = fours ? Pattern::Any : Pattern::Ind;
    g.env["c"] = fours ? Pattern::Any : Pattern::Ind;
    std::vector<Ob> obs;
    if (opt_.linear_globals && coin(0.3)) {
      g.env["u"] = Pattern::Lin;
      obs.push_back({Pattern::Lin, -1, "u"});
    }
    if (opt_.linear_globals && fours && coin(0.2)) {
      g.env["v"] = Pattern::Ind;
      obs.push_back({Pattern::Ind, -1, "v"});
    }
    GTypeP ty = random_type(2);
    Scope scope;
    std::vector<Anc> anc;
    t_.root = gen(ty, scope, obs, anc, obs.empty());
    g.term = compact(t_);
    if (g.term.size() > opt_.max_nodes || g.term.size() < 2) return std::nullopt;
    if (!check(opt_.system, g.env, g.term).accepted) {
      ++rejected_;
      return std::nullopt;
    }
    // drop unused global constants so the environment is tight
    auto fv = free_vars(g.term);
    for (auto it = g.env.begin(); it != g.env.end();)
      it = fv.count(it->first) ? std::next(it) : g.env.erase(it);
    return g;
  }

  std::size_t rejected() const { return rejected_; }

 private:
  struct Entry {
    GTypeP type;
    std::optional<Pattern> pat;  // current pattern, none if unavailable here
    std::string name;
  };
  using Scope = std::vector<Entry>;
  struct Ob {
    Pattern kind;           // Lin or Ind (once-boxed)
    int scope_pos;          // position in scope, or -1 for a global
    std::string global;
  };
  struct Anc {
    GTypeP type;
    NodeId node;
    bool guarded;
  };

  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  GTypeP base() const {
    static const GTypeP b = std::make_shared<GType>();
    return b;
  }

  GTypeP make(GType::Kind k, GTypeP a, GTypeP r = nullptr) {
    auto t = std::make_shared<GType>();
    t->kind = k;
    t->arg = std::move(a);
    t->res = std::move(r);
    return t;
  }

  GTypeP random_type(int depth) {
    if (depth == 0 || coin(0.45)) return base();
    switch (pick(5)) {
      case 0: return make(GType::LinArrow, random_type(depth - 1), random_type(depth - 1));
      case 1: return make(GType::IndArrow, random_type(depth - 1), random_type(depth - 1));
      case 2: return make(GType::CoindArrow, random_type(depth - 1), random_type(depth - 1));
      case 3: return make(GType::IndBox, random_type(depth - 1));
      default: return make(GType::CoindBox, random_type(depth - 1));
    }
  }

  bool fours() const { return opt_.system == System::FourS; }

  NodeId var_node(const Scope& scope, int pos) {
    return t_.add_bound(static_cast<std::uint32_t>(scope.size() - 1 - static_cast<std::size_t>(pos)));
  }

  NodeId ob_leaf(const Scope& scope, const Ob& ob) {
    return ob.scope_pos < 0 ? t_.add_free(ob.global) : var_node(scope, ob.scope_pos);
  }

  // Variables that may close an axiom here without an obligation.
  bool free_use(Pattern p) const {
    if (fours()) return p == Pattern::Dup || p == Pattern::Any;
    return p == Pattern::Ind || p == Pattern::Coind;
  }

  Scope enter_box(const Scope& scope, bool coind, std::vector<Ob>& obs) const {
    Scope inner = scope;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      auto& p = inner[i].pat;
      if (!p) continue;
      bool owed = false;
      for (const Ob& o : obs)
        if (o.scope_pos == static_cast<int>(i)) owed = true;
      if (!fours()) {
        if (*p == Pattern::Lin) p.reset();
        continue;
      }
      switch (*p) {
        case Pattern::Lin:
        case Pattern::Dup: p.reset(); break;
        case Pattern::Ind:
          if (coind || !owed)
            p.reset();
          else
            p = Pattern::Lin;
          break;
        case Pattern::Coind:
          if (coind) p = Pattern::Any;
          break;
        case Pattern::Any: break;
      }
    }
    for (Ob& o : obs) o.kind = Pattern::Lin;  // once-boxed debts become linear inside
    return inner;
  }

  // g a1 ... ak, consuming every obligation as a direct argument.
  NodeId sink(const Scope& scope, const std::vector<Ob>& obs, std::vector<Anc>& anc) {
    NodeId head = t_.add_free("g");
    for (const Ob& o : obs) {
      NodeId a = ob_leaf(scope, o);
      if (o.kind == Pattern::Ind) a = t_.add_box(Mode::Ind, a);
      head = t_.add_app(head, a);
      --remaining_;
    }
    if (remaining_ > 2 && coin(0.3)) head = t_.add_app(head, gen(random_type(1), scope, {}, anc, false));
    return head;
  }

  NodeId leaf(const GTypeP& ty, const Scope& scope, std::vector<Anc>& anc) {
    std::vector<int> vars;
    for (std::size_t i = 0; i < scope.size(); ++i)
      if (scope[i].pat && free_use(*scope[i].pat) && same_type(scope[i].type, ty)) vars.push_back(static_cast<int>(i));
    std::vector<std::size_t> refs;
    for (std::size_t i = 0; i < anc.size(); ++i)
      if (anc[i].guarded && same_type(anc[i].type, ty)) refs.push_back(i);
    if (!refs.empty() && coin(0.8)) return anc[refs[static_cast<std::size_t>(pick(static_cast<int>(refs.size())))]].node;
    if (!vars.empty() && coin(0.8)) return var_node(scope, vars[static_cast<std::size_t>(pick(static_cast<int>(vars.size())))]);
    return t_.add_free("c");
  }

  std::string fresh() { return "x" + std::to_string(counter_++); }

  NodeId gen(const GTypeP& ty, const Scope& scope, std::vector<Ob> obs, std::vector<Anc>& anc, bool closed) {
    --remaining_;
    // A closed subterm can be referenced from below a coinductive box.
    if (opt_.allow_cycles && obs.empty() && remaining_ > 4 && (closed || coin(opt_.cycle_rate)) &&
        coin(opt_.cycle_rate)) {
      NodeId slot = t_.add_cut();
      std::vector<Anc> inner_anc = anc;
      inner_anc.push_back({ty, slot, false});
      NodeId body = body_of(ty, Scope{}, {}, inner_anc);
      t_.at(slot) = t_.at(body);
      return slot;
    }
    return body_of(ty, scope, std::move(obs), anc);
  }

  NodeId body_of(const GTypeP& ty, const Scope& scope, std::vector<Ob> obs, std::vector<Anc>& anc) {
    if (obs.empty())
      for (const Anc& a : anc)
        if (a.guarded && same_type(a.type, ty) && coin(0.4)) return a.node;
    if (remaining_ <= 0) {
      if (obs.empty()) return leaf(ty, scope, anc);
      if (obs.size() == 1 && obs[0].kind == Pattern::Lin) {
        const Ob& o = obs[0];
        if (o.scope_pos >= 0 && same_type(scope[static_cast<std::size_t>(o.scope_pos)].type, ty))
          return ob_leaf(scope, o);
      }
      return sink(scope, obs, anc);
    }
    bool any_lin = false;
    for (const Ob& o : obs) any_lin = any_lin || o.kind == Pattern::Lin;
    // weights: 0 intro, 1 elimination with a redex, 2 elimination, 3 leaf/sink
    int choice;
    int r = pick(20);
    int leafy = remaining_ > 8 ? 1 : 8;
    if (r < leafy)
      choice = 3;
    else if (r < leafy + (20 - leafy) * 4 / 10)
      choice = 0;
    else if (r < leafy + (20 - leafy) * 8 / 10)
      choice = 1;
    else
      choice = 2;
    if (choice == 3) {
      if (obs.empty()) return leaf(ty, scope, anc);
      return sink(scope, obs, anc);
    }
    if (choice == 0) {
      if (auto n = intro(ty, scope, obs, anc, any_lin)) return *n;
      choice = 1;
    }
    return elim(ty, scope, std::move(obs), anc, choice == 1);
  }

  std::optional<NodeId> intro(const GTypeP& ty, const Scope& scope, const std::vector<Ob>& obs, std::vector<Anc>& anc,
                              bool any_lin) {
    switch (ty->kind) {
      case GType::Base: return std::nullopt;
      case GType::LinArrow:
      case GType::IndArrow:
      case GType::CoindArrow: {
        Scope inner = scope;
        std::vector<Ob> inner_obs = obs;
        Mode mode = Mode::Lin;
        Pattern p = Pattern::Lin;
        if (ty->kind == GType::LinArrow) {
          inner_obs.push_back({Pattern::Lin, static_cast<int>(scope.size()), ""});
        } else if (ty->kind == GType::IndArrow) {
          mode = Mode::Ind;
          if (fours()) {
            p = coin(0.5) ? Pattern::Dup : Pattern::Ind;
            if (p == Pattern::Ind) inner_obs.push_back({Pattern::Ind, static_cast<int>(scope.size()), ""});
          } else {
            p = Pattern::Ind;
          }
        } else {
          mode = Mode::Coind;
          p = Pattern::Coind;
        }
        std::string x = fresh();
        inner.push_back({ty->arg, p, x});
        NodeId body = gen(ty->res, inner, inner_obs, anc, false);
        return t_.add_lam(mode, x, body);
      }
      case GType::IndBox: {
        if (any_lin) return std::nullopt;
        std::vector<Ob> inner_obs = obs;
        Scope inner = enter_box(scope, false, inner_obs);
        NodeId c = gen(ty->arg, inner, inner_obs, anc, false);
        return t_.add_box(Mode::Ind, c);
      }
      case GType::CoindBox: {
        if (!obs.empty()) return std::nullopt;
        std::vector<Ob> none;
        Scope inner = enter_box(scope, true, none);
        std::vector<Anc> guarded = anc;
        for (Anc& a : guarded) a.guarded = true;
        NodeId c = gen(ty->arg, inner, {}, guarded, false);
        return t_.add_box(Mode::Coind, c);
      }
    }
    return std::nullopt;
  }

  NodeId elim(const GTypeP& ty, const Scope& scope, std::vector<Ob> obs, std::vector<Anc>& anc, bool redex) {
    GTypeP a = random_type(1);
    GType::Kind k = std::vector<GType::Kind>{GType::LinArrow, GType::IndArrow, GType::CoindArrow}[static_cast<std::size_t>(pick(3))];
    GTypeP fty = make(k, a, ty);
    GTypeP aty = a;
    if (k == GType::IndArrow) aty = make(GType::IndBox, a);
    if (k == GType::CoindArrow) aty = make(GType::CoindBox, a);
    std::vector<Ob> left, right;
    for (const Ob& o : obs) (coin(0.5) ? left : right).push_back(o);
    NodeId f, x;
    if (redex) {
      bool right_lin = false;
      for (const Ob& o : right) right_lin = right_lin || o.kind == Pattern::Lin;
      auto fi = intro(fty, scope, left, anc, false);
      f = fi ? *fi : gen(fty, scope, left, anc, false);
      std::optional<NodeId> xi;
      if (aty->kind != GType::Base) xi = intro(aty, scope, right, anc, right_lin);
      x = xi ? *xi : gen(aty, scope, right, anc, false);
    } else {
      f = gen(fty, scope, left, anc, false);
      x = gen(aty, scope, right, anc, false);
    }
    return t_.add_app(f, x);
  }

  std::mt19937_64& rng_;
  GenOptions opt_;
  Term t_;
  int remaining_ = 0;
  int counter_ = 0;
  std::size_t rejected_ = 0;
};

}  // namespace detail

// Draws until a term of at most max_nodes nodes passes the checker; the
// generator itself is designed so that rejections are rare.
inline Generated random_wellformed(std::mt19937_64& rng, const GenOptions& opt, std::size_t* rejected = nullptr) {
  detail::TermGenerator gen(rng, opt);
  for (;;) {
    if (auto g = gen.attempt()) {
      if (rejected) *rejected += gen.rejected();
      return *g;
    }
  }
}

// Pure lambda terms (no boxes, all abstractions linear-kind) for the
// calculi with depth flags. Free variables come from `free`.
inline Term random_pure_term(std::mt19937_64& rng, std::size_t max_nodes, const std::vector<std::string>& free) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  Term t;
  int budget = static_cast<int>(max_nodes);
  int counter = 0;
  auto go = [&](auto&& self, int depth) -> NodeId {
    --budget;
    int r = budget <= 1 ? 0 : pick(6);
    if (r == 0 || r == 1) {
      if (depth > 0 && (free.empty() || pick(3) > 0))
        return t.add_bound(static_cast<std::uint32_t>(pick(depth)));
      return t.add_free(free[static_cast<std::size_t>(pick(static_cast<int>(free.size())))]);
    }
    if (r == 2 || r == 3) {
      NodeId body = self(self, depth + 1);
      return t.add_lam(Mode::Lin, "x" + std::to_string(counter++), body);
    }
    --budget;
    NodeId f = self(self, depth);
    NodeId a = self(self, depth);
    return t.add_app(f, a);
  };
  t.root = go(go, 0);
  return compact(t);
}

// Regular pure lambda terms, well formed under the given depth flags: back
// references go to closed ancestors and only after crossing a flagged step.
inline Term random_regular_pure_term(std::mt19937_64& rng, std::size_t max_nodes, const std::vector<std::string>& free,
                                     const std::array<bool, 3>& flags) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  struct Anc {
    NodeId node;
    bool guarded;
  };
  Term t;
  int budget = static_cast<int>(max_nodes);
  int counter = 0;
  auto go = [&](auto&& self, int depth, std::vector<Anc> anc) -> NodeId {
    --budget;
    if (depth == 0 && budget > 3 && pick(2) == 0) {
      NodeId slot = t.add_cut();
      anc.push_back({slot, false});
      --budget;
      NodeId body = self(self, 0, anc);
      t.at(slot) = t.at(body);
      return slot;
    }
    std::vector<NodeId> refs;
    for (const Anc& a : anc)
      if (a.guarded) refs.push_back(a.node);
    int r = budget <= 1 ? 0 : pick(7);
    if (r == 0 || r == 1) {
      if (!refs.empty() && pick(2) == 0) return refs[static_cast<std::size_t>(pick(static_cast<int>(refs.size())))];
      if (depth > 0 && (free.empty() || pick(3) > 0)) return t.add_bound(static_cast<std::uint32_t>(pick(depth)));
      return t.add_free(free[static_cast<std::size_t>(pick(static_cast<int>(free.size())))]);
    }
    auto cross = [&](std::vector<Anc> a, bool flagged) {
      if (flagged)
        for (Anc& x : a) x.guarded = true;
      return a;
    };
    if (r == 2 || r == 3) {
      NodeId body = self(self, depth + 1, cross(anc, flags[0]));
      return t.add_lam(Mode::Lin, "x" + std::to_string(counter++), body);
    }
    --budget;
    NodeId f = self(self, depth, cross(anc, flags[1]));
    NodeId a = self(self, depth, cross(anc, flags[2]));
    return t.add_app(f, a);
  };
  t.root = go(go, 0, {});
  return compact(t);
}

}  // namespace llinf

#endif
