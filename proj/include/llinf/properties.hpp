#ifndef LLINF_PROPERTIES_HPP
#define LLINF_PROPERTIES_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "llinf/generate.hpp"
#include "llinf/metrics.hpp"
#include "llinf/print.hpp"
#include "llinf/reduction.hpp"
#include "llinf/wellform.hpp"

namespace llinf {

// Executable versions of the metatheory, run over generated terms. Shared by
// the unit tests, the acceptance runner and `llinf bench`.

struct PropertyReport {
  std::string name;
  std::size_t trials = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;  // trials with nothing to test (no redex, budget)
  std::vector<std::string> failures;  // first few, reproducible from the printed program

  bool ok() const { return failed == 0; }
  void fail(const std::string& what) {
    ++failed;
    if (failures.size() < 5) failures.push_back(what);
  }
};

template <class Rng>
const Redex& pick_redex(const std::vector<Redex>& rs, Rng& rng) {
  return rs[std::uniform_int_distribution<std::size_t>(0, rs.size() - 1)(rng)];
}

// Every environment Δ with Γ ≺ Δ.
inline std::vector<Environment> relaxations(const Environment& g) {
  std::vector<Environment> out{g};
  for (const auto& [x, p] : g) {
    if (p != Pattern::Ind) continue;
    std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
      Environment d = out[i];
      d[x] = Pattern::Dup;
      out.push_back(std::move(d));
    }
  }
  return out;
}

inline bool checks_up_to_precedence(System sys, const Environment& g, const Term& n) {
  if (sys == System::LLinf) return check(sys, g, n).accepted;
  for (const Environment& d : relaxations(g))
    if (check(sys, d, n).accepted) return true;
  return false;
}

inline std::string describe(const Environment& env, const Term& m) {
  return env_string(env) + " |- " + print_term(m);
}

// One random step per generated term; the reduct must still be well formed.
inline PropertyReport subject_reduction(System sys, std::uint64_t seed, std::size_t count, std::size_t max_depth = 3,
                                        std::size_t max_nodes = 40) {
  PropertyReport rep;
  rep.name = std::string("subject reduction (") + (sys == System::LLinf ? "llinf" : "4s") + ")";
  std::mt19937_64 rng(seed);
  GenOptions opt;
  opt.system = sys;
  opt.max_nodes = max_nodes;
  std::size_t done = 0, attempts = 0;
  while (done < count && attempts < count * 50) {
    ++attempts;
    Generated g = random_wellformed(rng, opt);
    auto rs = redexes_upto(g.term, max_depth);
    if (rs.empty()) continue;
    ++done;
    ++rep.trials;
    const Redex& r = pick_redex(rs, rng);
    Term n = contract(g.term, r);
    if (!checks_up_to_precedence(sys, g.env, n))
      rep.fail(describe(g.env, g.term) + " --" + path_string(r.position) + "--> " + print_term(n) + " : " +
               check(sys, g.env, n).summary());
  }
  rep.skipped = count - done;
  return rep;
}

inline std::vector<Term> generate_terms(System sys, std::uint64_t seed, std::size_t count, std::size_t max_nodes = 40) {
  std::mt19937_64 rng(seed);
  GenOptions opt;
  opt.system = sys;
  opt.max_nodes = max_nodes;
  std::vector<Term> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_wellformed(rng, opt).term);
  return out;
}

// Random reduction sequences. Each step must drop twei at its own depth, leave
// shallower depths alone and never raise df. The terms are expected to be 4S.
inline PropertyReport weight_laws_on(const std::vector<Term>& terms, std::uint64_t seed, std::size_t bound = 3,
                                     std::size_t max_steps = 200) {
  PropertyReport rep;
  rep.name = "weight decrease";
  std::mt19937_64 rng(seed);
  for (const Term& m : terms) {
    ++rep.trials;
    Term cur = m;
    WeightSnapshot before = snapshot(cur, bound, default_budget);
    for (std::size_t s = 0; s < max_steps; ++s) {
      auto rs = redexes_upto(cur, bound);
      if (rs.empty()) break;
      const Redex& r = pick_redex(rs, rng);
      Term next = contract(cur, r);
      WeightSnapshot after = snapshot(next, bound, default_budget);
      if (auto why = weight_step_violation(before, after, r.depth())) {
        rep.fail(print_term(cur) + " --" + path_string(r.position) + "--> " + print_term(next) + " : " + *why);
        break;
      }
      cur = std::move(next);
      before = std::move(after);
    }
  }
  return rep;
}

inline PropertyReport weight_laws(std::uint64_t seed, std::size_t count, std::size_t bound = 3,
                                  std::size_t max_steps = 200, std::size_t max_nodes = 40) {
  return weight_laws_on(generate_terms(System::FourS, seed, count, max_nodes), seed ^ 0x9e3779b9u, bound, max_steps);
}

// Two distinct admissible redexes close in at most one step on each side.
inline bool joins_in_one(const Term& a, const Term& b, std::size_t max_depth) {
  std::vector<Term> left{a}, right{b};
  for (const Redex& r : redexes_upto(a, max_depth)) left.push_back(contract(a, r));
  for (const Redex& r : redexes_upto(b, max_depth)) right.push_back(contract(b, r));
  for (const Term& x : left)
    for (const Term& y : right)
      if (graph_bisimilar(x, y)) return true;
  return false;
}

inline PropertyReport diamond(System sys, std::uint64_t seed, std::size_t count, std::size_t max_depth = 2,
                              std::size_t max_nodes = 40) {
  PropertyReport rep;
  rep.name = std::string("lbl diamond (") + (sys == System::LLinf ? "llinf" : "4s") + ")";
  std::mt19937_64 rng(seed);
  GenOptions opt;
  opt.system = sys;
  opt.max_nodes = max_nodes;
  for (std::size_t i = 0; i < count; ++i) {
    Generated g = random_wellformed(rng, opt);
    auto rs = admissible_redexes(g.term, max_depth);
    if (rs.size() < 2) {
      ++rep.skipped;
      continue;
    }
    ++rep.trials;
    std::size_t x = std::uniform_int_distribution<std::size_t>(0, rs.size() - 1)(rng);
    std::size_t y = std::uniform_int_distribution<std::size_t>(0, rs.size() - 2)(rng);
    if (y >= x) ++y;
    Term a = contract(g.term, rs[x]), b = contract(g.term, rs[y]);
    try {
      if (!joins_in_one(a, b, max_depth))
        rep.fail(print_term(g.term) + " at " + path_string(rs[x].position) + " and " + path_string(rs[y].position));
    } catch (const BudgetExceeded&) {
      ++rep.skipped;
    }
  }
  return rep;
}

// Reduce with uniformly random admissible redexes until nothing is left at
// depth <= max_depth.
template <class Rng>
Term random_admissible_normalize(Term m, Rng& rng, std::size_t max_depth, std::size_t max_steps) {
  for (std::size_t i = 0; i < max_steps; ++i) {
    auto rs = admissible_redexes(m, max_depth);
    if (rs.empty()) return m;
    m = contract(m, pick_redex(rs, rng));
  }
  throw BudgetExceeded(max_steps);
}

inline PropertyReport confluence(std::uint64_t seed, std::size_t count, std::size_t max_depth = 2,
                                 std::size_t max_nodes = 40) {
  PropertyReport rep;
  rep.name = "4s joinability";
  std::mt19937_64 rng(seed);
  std::mt19937_64 left(seed ^ 0x5bd1e995u), right(seed ^ 0x27d4eb2fu);
  GenOptions opt;
  opt.system = System::FourS;
  opt.max_nodes = max_nodes;
  for (std::size_t i = 0; i < count; ++i) {
    Generated g = random_wellformed(rng, opt);
    ++rep.trials;
    Term a = random_admissible_normalize(g.term, left, max_depth, 10000);
    Term b = random_admissible_normalize(g.term, right, max_depth, 10000);
    if (!equal_at_depth(a, b, max_depth))
      rep.fail(print_term(g.term) + " gives " + print_term(a) + " and " + print_term(b));
  }
  return rep;
}

}  // namespace llinf

#endif
