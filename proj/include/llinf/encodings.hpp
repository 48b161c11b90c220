#ifndef LLINF_ENCODINGS_HPP
#define LLINF_ENCODINGS_HPP

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "llinf/parse.hpp"
#include "llinf/print.hpp"
#include "llinf/reduction.hpp"
#include "llinf/term.hpp"

namespace llinf {

// ---------------------------------------------------------------------------
// Signatures and (co)trees

struct Symbol {
  std::string name;
  std::size_t arity = 0;
};

struct Signature {
  std::string name;
  std::vector<Symbol> symbols;  // order fixes the encoding

  std::optional<std::size_t> find(const std::string& s) const {
    for (std::size_t i = 0; i < symbols.size(); ++i)
      if (symbols[i].name == s) return i;
    return std::nullopt;
  }
  // every symbol unary except a final nullary end marker
  bool is_alphabet() const {
    if (symbols.empty() || symbols.back().arity != 0) return false;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
      if (symbols[i].arity != 1 || symbols[i].name.size() != 1) return false;
    return true;
  }
};

inline const std::string epsilon = "ε";

inline Signature alphabet(const std::string& chars) {
  Signature s;
  s.name = "alphabet " + chars;
  for (char c : chars) {
    if (!std::isalnum(static_cast<unsigned char>(c)) || c == 'e')
      throw std::invalid_argument(std::string("bad alphabet letter '") + c + "'");
    s.symbols.push_back({std::string(1, c), 1});
  }
  s.symbols.push_back({epsilon, 0});
  return s;
}

inline std::string signature_string(const Signature& s) {
  std::string out = "sig " + s.name + " { ";
  for (std::size_t i = 0; i < s.symbols.size(); ++i)
    out += (i ? ", " : "") + s.symbols[i].name + "/" + std::to_string(s.symbols[i].arity);
  return out + " }";
}

// `sig NAME { f/2, g/0 }`, or a bare letter string such as `01`.
inline Signature parse_signature(const std::string& text) {
  auto open = text.find('{');
  if (open == std::string::npos) return alphabet(text);
  auto close = text.find('}', open);
  if (close == std::string::npos) throw std::invalid_argument("signature: missing '}'");
  Signature s;
  std::string head = text.substr(0, open);
  if (auto p = head.find("sig"); p != std::string::npos) head = head.substr(p + 3);
  auto trim = [](std::string x) {
    while (!x.empty() && std::isspace(static_cast<unsigned char>(x.back()))) x.pop_back();
    std::size_t i = 0;
    while (i < x.size() && std::isspace(static_cast<unsigned char>(x[i]))) ++i;
    return x.substr(i);
  };
  s.name = trim(head);
  std::string body = text.substr(open + 1, close - open - 1);
  std::size_t pos = 0;
  while (pos <= body.size()) {
    auto comma = body.find(',', pos);
    std::string item = trim(body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (!item.empty()) {
      auto slash = item.find('/');
      if (slash == std::string::npos) throw std::invalid_argument("signature: expected name/arity, got '" + item + "'");
      std::string name = trim(item.substr(0, slash));
      std::string ar = trim(item.substr(slash + 1));
      if (name.empty() || ar.empty() || ar.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("signature: bad symbol '" + item + "'");
      if (s.find(name)) throw std::invalid_argument("signature: '" + name + "' declared twice");
      s.symbols.push_back({name, std::stoul(ar)});
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (s.symbols.empty()) throw std::invalid_argument("signature: no symbols");
  return s;
}

// A regular tree as a graph. `truncated` marks the cut-off points of decoded
// prefixes.
struct CoTree {
  static constexpr std::size_t truncated = static_cast<std::size_t>(-1);
  struct Node {
    std::size_t symbol = truncated;
    std::vector<int> kids;
  };
  std::vector<Node> nodes;
  int root = -1;

  bool cyclic() const {
    std::vector<int> state(nodes.size(), 0);
    auto go = [&](auto&& self, int n) -> bool {
      state[static_cast<std::size_t>(n)] = 1;
      for (int k : nodes[static_cast<std::size_t>(n)].kids) {
        int s = state[static_cast<std::size_t>(k)];
        if (s == 1 || (s == 0 && self(self, k))) return true;
      }
      state[static_cast<std::size_t>(n)] = 2;
      return false;
    };
    return root >= 0 && go(go, root);
  }
};

class TreeSyntaxError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::size_t symbol_or_throw(const Signature& phi, const std::string& s) {
  auto i = phi.find(s);
  if (!i) throw TreeSyntaxError("unknown symbol '" + s + "' in " + phi.name);
  return *i;
}

// Letters, then an optional end marker; `u(v)` repeats v forever.
inline std::optional<CoTree> parse_word(const Signature& phi, std::string text) {
  if (!phi.is_alphabet()) return std::nullopt;
  std::string u = text, v;
  if (auto open = text.find('('); open != std::string::npos) {
    if (text.back() != ')') return std::nullopt;
    u = text.substr(0, open);
    v = text.substr(open + 1, text.size() - open - 2);
    if (v.empty()) throw TreeSyntaxError("periodic part of '" + text + "' is empty");
  }
  auto letters = [&](const std::string& w, bool allow_end) -> std::optional<std::vector<std::size_t>> {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < w.size();) {
      if (allow_end && (w.compare(i, epsilon.size(), epsilon) == 0 || w[i] == 'e')) {
        i += w[i] == 'e' ? 1 : epsilon.size();
        if (i != w.size()) return std::nullopt;
        break;
      }
      auto s = phi.find(std::string(1, w[i]));
      if (!s || phi.symbols[*s].arity != 1) return std::nullopt;
      out.push_back(*s);
      ++i;
    }
    return out;
  };
  auto pre = letters(u, v.empty());
  if (!pre) return std::nullopt;
  std::optional<std::vector<std::size_t>> loop;
  if (!v.empty()) {
    loop = letters(v, false);
    if (!loop) return std::nullopt;
  }
  CoTree t;
  auto add = [&](std::size_t sym) {
    t.nodes.push_back({sym, {}});
    return static_cast<int>(t.nodes.size() - 1);
  };
  int prev = -1;
  auto link = [&](int n) {
    if (prev < 0)
      t.root = n;
    else
      t.nodes[static_cast<std::size_t>(prev)].kids.push_back(n);
    prev = n;
  };
  for (std::size_t s : *pre) link(add(s));
  if (loop) {
    int first = -1;
    for (std::size_t s : *loop) {
      int n = add(s);
      if (first < 0) first = n;
      link(n);
    }
    t.nodes[static_cast<std::size_t>(prev)].kids.push_back(first);
  } else {
    link(add(phi.symbols.size() - 1));
  }
  return t;
}

struct TreeExpr {
  std::string name;
  std::vector<TreeExpr> args;
};

class TreeParser {
 public:
  explicit TreeParser(const std::string& s) : s_(s) {}

  std::pair<TreeExpr, std::vector<std::pair<std::string, TreeExpr>>> run() {
    TreeExpr top = expr();
    std::vector<std::pair<std::string, TreeExpr>> eqs;
    if (word() == "where") {
      for (;;) {
        std::string v = name();
        skip();
        if (pos_ >= s_.size() || s_[pos_] != '=') fail("expected '='");
        ++pos_;
        eqs.emplace_back(v, expr());
        skip();
        if (pos_ < s_.size() && (s_[pos_] == ',' || s_[pos_] == ';')) {
          ++pos_;
          skip();
          if (pos_ == s_.size()) break;
          continue;
        }
        break;
      }
    }
    skip();
    if (pos_ != s_.size()) fail("unexpected input");
    return {std::move(top), std::move(eqs)};
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw TreeSyntaxError("tree: " + what + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  std::string word() {
    skip();
    std::size_t save = pos_;
    std::string w = name_chars();
    if (w != "where") pos_ = save;
    return w;
  }
  std::string name_chars() {
    std::string out;
    while (pos_ < s_.size()) {
      if (s_.compare(pos_, epsilon.size(), epsilon) == 0) {
        out += epsilon;
        pos_ += epsilon.size();
      } else if (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_') {
        out += s_[pos_++];
      } else {
        break;
      }
    }
    return out;
  }
  std::string name() {
    skip();
    std::string n = name_chars();
    if (n.empty()) fail("expected a name");
    return n;
  }
  TreeExpr expr() {
    TreeExpr e;
    e.name = name();
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      for (;;) {
        e.args.push_back(expr());
        skip();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (pos_ < s_.size() && s_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
    }
    return e;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Signature& phi, std::vector<std::pair<std::string, TreeExpr>> eqs) : phi_(phi) {
    for (auto& [v, e] : eqs) {
      if (phi_.find(v)) throw TreeSyntaxError("'" + v + "' is a symbol and cannot be defined");
      if (!defs_.emplace(v, std::move(e)).second) throw TreeSyntaxError("'" + v + "' defined twice");
    }
  }

  CoTree run(const TreeExpr& top) {
    tree_.root = build(top);
    return std::move(tree_);
  }

 private:
  int fresh() {
    tree_.nodes.emplace_back();
    return static_cast<int>(tree_.nodes.size() - 1);
  }

  int build(const TreeExpr& e) {
    if (defs_.count(e.name)) {
      if (!e.args.empty()) throw TreeSyntaxError("variable '" + e.name + "' applied to arguments");
      return variable(e.name);
    }
    int n = fresh();
    fill(n, e);
    return n;
  }

  void fill(int n, const TreeExpr& e) {
    std::size_t sym = symbol_or_throw(phi_, e.name);
    if (phi_.symbols[sym].arity != e.args.size())
      throw TreeSyntaxError("'" + e.name + "' has arity " + std::to_string(phi_.symbols[sym].arity) + ", given " +
                            std::to_string(e.args.size()));
    tree_.nodes[static_cast<std::size_t>(n)].symbol = sym;
    std::vector<int> kids;
    for (const TreeExpr& a : e.args) kids.push_back(build(a));
    tree_.nodes[static_cast<std::size_t>(n)].kids = std::move(kids);
  }

  int variable(const std::string& v) {
    if (auto it = slot_.find(v); it != slot_.end()) return it->second;
    std::vector<std::string> chain{v};
    const TreeExpr* body = &defs_.at(v);
    while (defs_.count(body->name) && body->args.empty()) {
      if (slot_.count(body->name)) {
        int n = slot_.at(body->name);
        for (const auto& c : chain) slot_[c] = n;
        return n;
      }
      for (const auto& c : chain)
        if (c == body->name) throw TreeSyntaxError("unguarded equation for '" + v + "'");
      chain.push_back(body->name);
      body = &defs_.at(body->name);
    }
    int n = fresh();
    for (const auto& c : chain) slot_[c] = n;
    fill(n, *body);
    return n;
  }

  const Signature& phi_;
  std::map<std::string, TreeExpr> defs_;
  std::map<std::string, int> slot_;
  CoTree tree_;
};

}  // namespace detail

// Words (`01ε`, `0(1)`) for alphabets, otherwise `f(g, X) where X = f(X, g)`.
inline CoTree parse_cotree(const Signature& phi, const std::string& text) {
  std::string t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
  if (t.empty() && !phi.is_alphabet()) throw TreeSyntaxError("empty tree");
  if (auto w = detail::parse_word(phi, t)) return *w;
  auto [top, eqs] = detail::TreeParser(t).run();
  return detail::TreeBuilder(phi, std::move(eqs)).run(top);
}

// Unfolding cut at `bound` constructors along every branch.
inline CoTree tree_prefix(const CoTree& t, std::size_t bound) {
  CoTree out;
  auto go = [&](auto&& self, int n, std::size_t level) -> int {
    int id = static_cast<int>(out.nodes.size());
    out.nodes.emplace_back();
    if (level == bound) return id;
    const CoTree::Node& src = t.nodes[static_cast<std::size_t>(n)];
    out.nodes[static_cast<std::size_t>(id)].symbol = src.symbol;
    if (src.symbol == CoTree::truncated) return id;
    std::vector<int> kids;
    for (int k : src.kids) kids.push_back(self(self, k, level + 1));
    out.nodes[static_cast<std::size_t>(id)].kids = std::move(kids);
    return id;
  };
  out.root = go(go, t.root, 0);
  return out;
}

// Structural equality of finite trees (cut markers included).
inline bool same_tree(const CoTree& a, int x, const CoTree& b, int y) {
  const auto& p = a.nodes[static_cast<std::size_t>(x)];
  const auto& q = b.nodes[static_cast<std::size_t>(y)];
  if (p.symbol != q.symbol || p.kids.size() != q.kids.size()) return false;
  for (std::size_t i = 0; i < p.kids.size(); ++i)
    if (!same_tree(a, p.kids[i], b, q.kids[i])) return false;
  return true;
}

inline bool same_tree(const CoTree& a, const CoTree& b) { return same_tree(a, a.root, b, b.root); }

// Finite trees only; words print as `01ε` or `000…`.
inline std::string tree_string(const Signature& phi, const CoTree& t) {
  std::string out;
  if (phi.is_alphabet()) {
    for (int n = t.root;;) {
      const auto& node = t.nodes[static_cast<std::size_t>(n)];
      if (node.symbol == CoTree::truncated) return out + "…";
      out += phi.symbols[node.symbol].name;
      if (node.kids.empty()) return out;
      n = node.kids.front();
    }
  }
  auto go = [&](auto&& self, int n) -> void {
    const auto& node = t.nodes[static_cast<std::size_t>(n)];
    if (node.symbol == CoTree::truncated) {
      out += "…";
      return;
    }
    out += phi.symbols[node.symbol].name;
    if (node.kids.empty()) return;
    out += "(";
    for (std::size_t i = 0; i < node.kids.size(); ++i) {
      if (i) out += ", ";
      self(self, node.kids[i]);
    }
    out += ")";
  };
  go(go, t.root);
  return out;
}

// ---------------------------------------------------------------------------
// Scott encoding

enum class Codec { Algebra, Coalgebra };

inline Mode codec_box(Codec c) { return c == Codec::Algebra ? Mode::Ind : Mode::Coind; }

inline std::string binder_hint(const Signature& phi, std::size_t i) {
  const std::string& n = phi.symbols[i].name;
  if (n == epsilon) return "ye";
  bool plain = !n.empty();
  for (char c : n) plain = plain && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
  return plain ? "y" + n : "y" + std::to_string(i);
}

// Constructor m of n becomes \!y1 ... \!yn. ym [t1] ... [tk], the children boxed
// with ! (finite data) or # (codata).
inline Term scott_encode(const Signature& phi, const CoTree& tree, Codec mode) {
  if (phi.symbols.empty()) throw std::invalid_argument("empty signature");
  if (mode == Codec::Algebra && tree.cyclic())
    throw std::invalid_argument("algebra encoding needs a finite tree");
  const std::size_t n = phi.symbols.size();
  Term t;
  std::vector<NodeId> head(tree.nodes.size(), no_node), innermost(tree.nodes.size(), no_node);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].symbol == CoTree::truncated) throw std::invalid_argument("cannot encode a truncated tree");
    NodeId prev = no_node;
    for (std::size_t j = 0; j < n; ++j) {
      NodeId l = t.add_lam(Mode::Ind, binder_hint(phi, j), no_node);
      if (prev == no_node)
        head[i] = l;
      else
        t.at(prev).a = l;
      prev = l;
    }
    innermost[i] = prev;
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    if (node.kids.size() != phi.symbols[node.symbol].arity)
      throw std::invalid_argument("arity mismatch at '" + phi.symbols[node.symbol].name + "'");
    NodeId body = t.add_bound(static_cast<std::uint32_t>(n - 1 - node.symbol));
    for (int k : node.kids) body = t.add_app(body, t.add_box(codec_box(mode), head[static_cast<std::size_t>(k)]));
    t.at(innermost[i]).a = body;
  }
  t.root = head[static_cast<std::size_t>(tree.root)];
  return minimize(t);
}

enum class DecodeStatus { Ok, FuelExhausted, ShapeMismatch };

inline const char* decode_status_name(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::Ok: return "ok";
    case DecodeStatus::FuelExhausted: return "fuel-exhausted";
    case DecodeStatus::ShapeMismatch: return "shape-mismatch";
  }
  return "?";
}

struct Decoded {
  DecodeStatus status = DecodeStatus::Ok;
  CoTree prefix;
  std::string message;
  std::size_t steps = 0;
};

namespace detail {

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads the constructor at `n`; children continue one level down.
inline int read_constructor(const Term& t, NodeId n, const Signature& phi, Codec mode, std::size_t level,
                            std::size_t bound, CoTree& out, std::size_t& work) {
  int id = static_cast<int>(out.nodes.size());
  out.nodes.emplace_back();
  if (level == bound) return id;
  if (++work > default_budget) throw BudgetExceeded(default_budget);
  const std::size_t arity_n = phi.symbols.size();
  const std::string where = "constructor " + std::to_string(level);
  for (std::size_t j = 0; j < arity_n; ++j) {
    const Node& l = t.at(n);
    if (l.tag != Tag::Lam || l.mode != Mode::Ind)
      throw ShapeError(where + ": expected " + std::to_string(arity_n) + " inductive abstractions, found " +
                       std::to_string(j));
    n = l.a;
  }
  std::vector<NodeId> args;
  while (t.at(n).tag == Tag::App) {
    args.push_back(t.at(n).b);
    n = t.at(n).a;
  }
  const Node& h = t.at(n);
  if (h.tag != Tag::Bound || h.index >= arity_n) throw ShapeError(where + ": head is not a constructor variable");
  std::size_t sym = arity_n - 1 - h.index;
  if (args.size() != phi.symbols[sym].arity)
    throw ShapeError(where + ": '" + phi.symbols[sym].name + "' applied to " + std::to_string(args.size()) +
                     " arguments");
  out.nodes[static_cast<std::size_t>(id)].symbol = sym;
  std::vector<int> kids;
  for (auto it = args.rbegin(); it != args.rend(); ++it) {
    const Node& b = t.at(*it);
    if (b.tag != Tag::Box || b.mode != codec_box(mode))
      throw ShapeError(where + ": argument is not a " + std::string(mode == Codec::Algebra ? "!" : "#") + "-box");
    kids.push_back(read_constructor(t, b.a, phi, mode, level + 1, bound, out, work));
  }
  out.nodes[static_cast<std::size_t>(id)].kids = std::move(kids);
  return id;
}

}  // namespace detail

// Evaluates level by level far enough to expose `bound` constructors, then
// reads them off.
inline Decoded scott_decode(const Term& m, const Signature& phi, Codec mode, std::size_t bound, std::size_t fuel) {
  Decoded d;
  std::size_t depth = mode == Codec::Coalgebra && bound > 0 ? bound - 1 : 0;
  EvalResult r = eval_lbl(m, depth, fuel);
  d.steps = r.stats.fuel_consumed;
  if (r.stats.outcome == Outcome::FuelExhausted) {
    d.status = DecodeStatus::FuelExhausted;
    d.message = "fuel exhausted at depth " + std::to_string(*r.stats.exhausted_at);
    return d;
  }
  try {
    std::size_t work = 0;
    d.prefix.root = detail::read_constructor(r.final_term, r.final_term.root, phi, mode, 0, bound, d.prefix, work);
  } catch (const detail::ShapeError& e) {
    d.status = DecodeStatus::ShapeMismatch;
    d.message = e.what();
    d.prefix = {};
  }
  return d;
}

// ---------------------------------------------------------------------------
// Combinators

// Y_a = M_a !M_a with M_a = \!x. \!y. y [x !x !y], the box being ! for a = 0 and # for a = 1.
inline Term fixpoint(bool coinductive) {
  std::string box = coinductive ? "#" : "!";
  std::string m = "(\\!x. \\!y. y " + box + "(x !x !y))";
  return parse_term(m + " !" + m);
}

inline const char* guarded_fixpoint_text = "(\\#x. \\y. \\#z. y #(x #x z #z))";

// X = M #M; X N #N unrolls to N #(X N #N) in three steps.
inline Term guarded_fixpoint() {
  std::string m = guarded_fixpoint_text;
  return parse_term(m + " #" + m);
}

// \x. \!y1 ... \!yn. x !y1 ... !yn
inline Term selector(const Signature& phi) {
  std::string text = "\\x.";
  for (std::size_t i = 0; i < phi.symbols.size(); ++i) text += " \\!" + binder_hint(phi, i) + ".";
  text += " x";
  for (std::size_t i = 0; i < phi.symbols.size(); ++i) text += " !" + binder_hint(phi, i);
  return parse_term(text);
}

// \x. x !M1 ... !Mn
inline Term tuple(const std::vector<Term>& ms) {
  std::set<std::string> used;
  for (const Term& m : ms)
    for (const auto& x : free_vars(m)) used.insert(x);
  std::string x = "x";
  while (used.count(x)) x += "'";
  std::vector<Term> boxed;
  for (const Term& m : ms) boxed.push_back(make_box(Mode::Ind, m));
  return make_lam(Mode::Lin, x, make_apps(make_free(x), boxed));
}

namespace detail {

inline const char* bit_selector = "(\\s. \\!y0. \\!y1. \\!ye. s !y0 !y1 !ye)";
inline const char* empty_word = "(\\!y0. \\!y1. \\!ye. ye)";

}  // namespace detail

// The stream X C #C with C = \#w. \!y0. \!y1. \!ye. y0 #w, i.e. 000...
inline Term zeros_demo() {
  std::string x = guarded_fixpoint_text;
  return parse_term("def C = \\#w. \\!y0. \\!y1. \\!ye. y0 #w ; " + x + " #" + x + " C #C");
}

// Flips every bit of a stream over {0,1}: X G #G, where G dispatches on the
// head and recurses on the tail under #.
inline Term bit_flip() {
  std::string x = guarded_fixpoint_text;
  std::string sel = detail::bit_selector;
  return parse_term("def G = \\#rec. \\s. " + sel + " s !(\\#t. \\!y0. \\!y1. \\!ye. y1 #(rec t))" +
                    " !(\\#t. \\!y0. \\!y1. \\!ye. y0 #(rec t)) !" + detail::empty_word + " ; " + x + " #" + x +
                    " G #G");
}

// Finite words: keep the first letter, drop the rest.
inline Term head_then_end() {
  std::string sel = detail::bit_selector, e = detail::empty_word;
  return parse_term("\\s. " + sel + " s !(\\!t. \\!y0. \\!y1. \\!ye. y0 !" + e + ") !(\\!t. \\!y0. \\!y1. \\!ye. y1 !" +
                    e + ") !" + e);
}

// ---------------------------------------------------------------------------
// Representability

enum class DataKind { Fin, Inf };

inline Codec codec_for(DataKind k) { return k == DataKind::Fin ? Codec::Algebra : Codec::Coalgebra; }

struct HarnessVerdict {
  bool passed = false;
  DecodeStatus status = DecodeStatus::Ok;
  std::string got, expected, diff;
  std::size_t steps = 0;
};

inline HarnessVerdict representability_harness(const Term& mf, const Signature& phi, const std::vector<CoTree>& inputs,
                                               const std::vector<DataKind>& kinds, const CoTree& expected,
                                               DataKind out, std::size_t depth, std::size_t fuel) {
  if (inputs.size() != kinds.size()) throw std::invalid_argument("one kind per input");
  std::vector<Term> args;
  for (std::size_t i = 0; i < inputs.size(); ++i) args.push_back(scott_encode(phi, inputs[i], codec_for(kinds[i])));
  Decoded d = scott_decode(make_apps(mf, args), phi, codec_for(out), depth, fuel);
  HarnessVerdict v;
  v.status = d.status;
  v.steps = d.steps;
  CoTree want = tree_prefix(expected, depth);
  v.expected = tree_string(phi, want);
  if (d.status != DecodeStatus::Ok) {
    v.diff = d.message;
    return v;
  }
  v.got = tree_string(phi, d.prefix);
  v.passed = same_tree(d.prefix, want);
  if (!v.passed) v.diff = "expected " + v.expected + ", got " + v.got;
  return v;
}

// ---------------------------------------------------------------------------
// Counterexamples

inline std::map<std::string, Term> counterexamples() {
  std::map<std::string, Term> c;
  const std::string i = "(\\x. x)";
  const std::string ii = "(" + i + " " + i + ")";
  c["nonNF.M"] = parse_term("def M = #(M " + ii + ") ; root M");
  c["nonNF.N"] = parse_term("def N = #(#(N " + ii + ") " + i + ") ; root N");
  c["nonNF.L"] = parse_term("def L = #(#(L " + i + ") " + ii + ") ; root L");
  c["nonNF.P"] = parse_term("def P = #(#(P " + i + ") " + i + ") ; root P");
  const std::string ki = "def K = \\#x. \\#y. x ; def I = \\#x. x ; ";
  c["nonconf.M"] = parse_term(ki + "def M = K #N #K ; def N = K #M #I ; root M");
  c["nonconf.N"] = parse_term(ki + "def M = K #N #K ; def N = K #M #I ; root N");
  c["nonconf.L"] = parse_term(ki + "def L = K #L #I ; root L");
  c["nonconf.P"] = parse_term(ki + "def P = K #P #K ; root P");
  c["deadlock"] = parse_term("(\\!x. x) #M");
  c["rho"] = parse_term("def N = N (\\x. x) ; root N");
  return c;
}

// One step at each listed depth, in order; nullopt if some depth has no redex.
inline std::optional<Term> run_schedule(Term m, const std::vector<std::size_t>& depths) {
  for (std::size_t d : depths) {
    auto r = first_redex(m, LevelPredicate::at_depth(d));
    if (!r) return std::nullopt;
    m = contract(m, *r);
  }
  return m;
}

// Normalizes each listed depth in turn; nullopt if `fuel` runs out at one.
inline std::optional<Term> exhaust_depths(Term m, const std::vector<std::size_t>& depths, std::size_t fuel) {
  for (std::size_t d : depths) {
    std::size_t spent = 0;
    while (auto r = first_redex(m, LevelPredicate::at_depth(d))) {
      if (spent++ == fuel) return std::nullopt;
      m = contract(m, *r);
    }
  }
  return m;
}

// Breadth-first over all reducts (redexes up to `max_depth`), deduplicated by
// printed form.
inline std::vector<Term> reducts_within(const Term& m, std::size_t steps, std::size_t max_depth) {
  std::vector<Term> all{m};
  std::set<std::string> seen{print_program(m)};
  std::vector<Term> frontier{m};
  for (std::size_t s = 0; s < steps && !frontier.empty(); ++s) {
    std::vector<Term> next;
    for (const Term& t : frontier)
      for (const Redex& r : redexes_upto(t, max_depth)) {
        Term u = contract(t, r);
        if (seen.insert(print_program(u)).second) {
          next.push_back(u);
          all.push_back(u);
        }
      }
    frontier = std::move(next);
  }
  return all;
}

struct NonconfluenceReport {
  bool even_reaches_l = false;
  bool odd_reaches_p = false;
  bool targets_differ = false;
  bool joined = false;  // some common reduct found (should not be)
  std::size_t even_steps = 0, odd_steps = 0;
  std::size_t explored = 0;
};

// Even depths only: two steps at depth 2, then two at depth 0. Odd: 3 then 1.
// The join search starts from the two targets.
inline NonconfluenceReport nonconfluence_witness(std::size_t join_steps = 6, std::size_t join_depth = 3) {
  auto c = counterexamples();
  const Term& m = c.at("nonconf.M");
  const Term& l = c.at("nonconf.L");
  const Term& p = c.at("nonconf.P");
  NonconfluenceReport rep;
  const std::vector<std::size_t> even{2, 2, 0, 0}, odd{3, 3, 1, 1};
  if (auto e = run_schedule(m, even)) {
    rep.even_steps = even.size();
    rep.even_reaches_l = equal_at_depth(*e, l, 1);
  }
  if (auto o = run_schedule(m, odd)) {
    rep.odd_steps = odd.size();
    rep.odd_reaches_p = equal_at_depth(*o, p, 1);
  }
  rep.targets_differ = !equal_at_depth(l, p, 1);
  auto left = reducts_within(l, join_steps, join_depth);
  auto right = reducts_within(p, join_steps, join_depth);
  rep.explored = left.size() + right.size();
  for (const Term& a : left)
    for (const Term& b : right)
      if (equal_at_depth(a, b, 1)) rep.joined = true;
  return rep;
}

struct NonNormalFormReport {
  bool n_reducible = false, l_reducible = false;
  bool n_reaches_p = false, l_reaches_p = false;
};

inline NonNormalFormReport nonnf_witness(std::size_t fuel = 100) {
  auto c = counterexamples();
  NonNormalFormReport rep;
  const Term& p = c.at("nonNF.P");
  rep.n_reducible = classify(c.at("nonNF.N")) == Shape::Reducible;
  rep.l_reducible = classify(c.at("nonNF.L")) == Shape::Reducible;
  if (auto n = exhaust_depths(c.at("nonNF.N"), {0, 1, 2}, fuel)) rep.n_reaches_p = equal_at_depth(*n, p, 2);
  if (auto l = exhaust_depths(c.at("nonNF.L"), {0, 1, 2}, fuel)) rep.l_reaches_p = equal_at_depth(*l, p, 2);
  return rep;
}

}  // namespace llinf

#endif
