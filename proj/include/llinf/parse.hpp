#ifndef LLINF_PARSE_HPP
#define LLINF_PARSE_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "llinf/term.hpp"

namespace llinf {

enum class ParseErrorKind { Syntax, Guardedness, Capture, Duplicate, Missing };

inline const char* parse_error_kind_name(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::Syntax: return "syntax error";
    case ParseErrorKind::Guardedness: return "guardedness violation";
    case ParseErrorKind::Capture: return "capture violation";
    case ParseErrorKind::Duplicate: return "duplicate definition";
    case ParseErrorKind::Missing: return "missing definition";
  }
  return "error";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, int col, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + parse_error_kind_name(kind) +
                           ": " + msg),
        kind_(kind),
        line_(line),
        col_(col) {}
  ParseErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  ParseErrorKind kind_;
  int line_, col_;
};

// Depth flags of the pure calculi: abstraction, function position, argument.
using DepthFlags = std::array<bool, 3>;

inline std::string flags_string(const DepthFlags& f) {
  return std::string{f[0] ? '1' : '0', f[1] ? '1' : '0', f[2] ? '1' : '0'};
}

inline std::optional<DepthFlags> parse_flags(const std::string& s) {
  if (s.size() != 3) return std::nullopt;
  DepthFlags f{};
  for (int i = 0; i < 3; ++i) {
    if (s[i] != '0' && s[i] != '1') return std::nullopt;
    f[i] = s[i] == '1';
  }
  return f;
}

struct Program {
  Term term;
  std::optional<DepthFlags> flags;
  bool lam = false;  // file started with the `lam` keyword
};

namespace detail {

struct Ast {
  enum Kind { Name, App, Lam, Box, Cut } kind = Name;
  Mode mode = Mode::Lin;
  std::string name;
  std::unique_ptr<Ast> left, right;
  int line = 0, col = 0;
};

class Lexer {
 public:
  enum Kind { Ident, Number, Lambda, Dot, Bang, Hash, LParen, RParen, Equals, Semi, CutTok, End };
  struct Token {
    Kind kind;
    std::string text;
    int line, col;
  };

  explicit Lexer(const std::string& src) : s_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  bool starts(const char* lit) const { return s_.compare(pos_, std::char_traits<char>::length(lit), lit) == 0; }

  void bump(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < s_.size(); ++i) {
      // count columns in code points
      unsigned char c = static_cast<unsigned char>(s_[pos_]);
      if (c == '\n') {
        ++line_;
        col_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col_;
      }
      ++pos_;
    }
  }

  void advance() {
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) bump(1);
      if (starts("//")) {
        while (pos_ < s_.size() && s_[pos_] != '\n') bump(1);
        continue;
      }
      break;
    }
    tok_.line = line_;
    tok_.col = col_;
    tok_.text.clear();
    if (pos_ >= s_.size()) {
      tok_.kind = End;
      return;
    }
    struct Sym {
      const char* text;
      Kind kind;
    };
    static const Sym syms[] = {{"<cut>", CutTok}, {"\\", Lambda},     {"\xCE\xBB", Lambda}, {".", Dot},
                               {"!", Bang},       {"\xE2\x86\x93", Bang}, {"#", Hash},          {"\xE2\x86\x91", Hash},
                               {"(", LParen},     {")", RParen},      {"=", Equals},        {";", Semi}};
    for (const Sym& sym : syms) {
      if (starts(sym.text)) {
        tok_.kind = sym.kind;
        tok_.text = sym.text;
        bump(std::char_traits<char>::length(sym.text));
        return;
      }
    }
    unsigned char c = static_cast<unsigned char>(s_[pos_]);
    if (std::isalpha(c) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '\''))
        bump(1);
      tok_.kind = Ident;
      tok_.text = s_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(c)) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) bump(1);
      tok_.kind = Number;
      tok_.text = s_.substr(start, pos_ - start);
      return;
    }
    throw ParseError(ParseErrorKind::Syntax, line_, col_, std::string("unexpected character '") + s_[pos_] + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_{End, "", 1, 1};
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  Program run() {
    Program prog;
    std::unique_ptr<Ast> bare_root;
    std::optional<Lexer::Token> root_name;
    if (is_keyword("lam")) {
      lex_.take();
      prog.lam = lam_ = true;
    }
    while (lex_.peek().kind != Lexer::End) {
      if (is_keyword("def")) {
        lex_.take();
        Lexer::Token name = expect(Lexer::Ident, "definition name");
        expect(Lexer::Equals, "'='");
        auto body = term();
        if (index_.count(name.text))
          throw ParseError(ParseErrorKind::Duplicate, name.line, name.col, "'" + name.text + "' defined twice");
        index_[name.text] = defs_.size();
        defs_.push_back({name, std::move(body)});
        optional_semi();
      } else if (is_keyword("root")) {
        lex_.take();
        root_name = expect(Lexer::Ident, "root name");
        optional_semi();
      } else if (is_keyword("flags")) {
        lex_.take();
        Lexer::Token f = expect(Lexer::Number, "three flag digits");
        auto flags = parse_flags(f.text);
        if (!flags) throw ParseError(ParseErrorKind::Syntax, f.line, f.col, "flags must be three binary digits");
        prog.flags = flags;
        optional_semi();
      } else {
        if (bare_root || root_name) fail("unexpected input after root");
        bare_root = term();
        optional_semi();
      }
    }
    NodeId root = build(prog.term, root_name, bare_root);
    prog.term.root = root;
    prog.term = compact(prog.term);
    return prog;
  }

 private:
  struct Def {
    Lexer::Token name;
    std::unique_ptr<Ast> body;
  };

  bool lam_ = false;

  bool is_keyword(const char* kw) const {
    return lex_.peek().kind == Lexer::Ident && lex_.peek().text == kw;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const auto& t = lex_.peek();
    std::string found = t.kind == Lexer::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(ParseErrorKind::Syntax, t.line, t.col, what + ", found " + found);
  }

  Lexer::Token expect(Lexer::Kind k, const char* what) {
    if (lex_.peek().kind != k) fail(std::string("expected ") + what);
    return lex_.take();
  }

  void optional_semi() {
    if (lex_.peek().kind == Lexer::Semi) lex_.take();
  }

  bool starts_atom() const {
    auto k = lex_.peek().kind;
    if (k == Lexer::Ident) return !is_keyword("def") && !is_keyword("root") && !is_keyword("flags");
    return k == Lexer::LParen || k == Lexer::Bang || k == Lexer::Hash || k == Lexer::CutTok;
  }

  std::unique_ptr<Ast> term() {
    if (lex_.peek().kind == Lexer::Lambda) {
      Lexer::Token l = lex_.take();
      auto node = std::make_unique<Ast>();
      node->kind = Ast::Lam;
      node->line = l.line;
      node->col = l.col;
      if (lam_ && (lex_.peek().kind == Lexer::Bang || lex_.peek().kind == Lexer::Hash))
        fail("pure lambda programs have no modal abstractions");
      if (lex_.peek().kind == Lexer::Bang) {
        lex_.take();
        node->mode = Mode::Ind;
      } else if (lex_.peek().kind == Lexer::Hash) {
        lex_.take();
        node->mode = Mode::Coind;
      }
      node->name = expect(Lexer::Ident, "binder name").text;
      expect(Lexer::Dot, "'.'");
      node->left = term();
      return node;
    }
    auto head = atom();
    while (starts_atom() || lex_.peek().kind == Lexer::Lambda) {
      auto app = std::make_unique<Ast>();
      app->kind = Ast::App;
      app->line = head->line;
      app->col = head->col;
      app->left = std::move(head);
      // a trailing abstraction extends to the right
      app->right = lex_.peek().kind == Lexer::Lambda ? term() : atom();
      head = std::move(app);
    }
    return head;
  }

  std::unique_ptr<Ast> atom() {
    Lexer::Token t = lex_.peek();
    auto node = std::make_unique<Ast>();
    node->line = t.line;
    node->col = t.col;
    switch (t.kind) {
      case Lexer::Ident:
        if (!starts_atom()) fail("expected a term");
        lex_.take();
        node->kind = Ast::Name;
        node->name = t.text;
        return node;
      case Lexer::CutTok:
        lex_.take();
        node->kind = Ast::Cut;
        return node;
      case Lexer::Bang:
      case Lexer::Hash:
        if (lam_) fail("pure lambda programs have no boxes");
        lex_.take();
        node->kind = Ast::Box;
        node->mode = t.kind == Lexer::Hash ? Mode::Coind : Mode::Ind;
        node->left = atom();
        return node;
      case Lexer::LParen: {
        lex_.take();
        auto inner = term();
        expect(Lexer::RParen, "')'");
        return inner;
      }
      default: fail("expected a term");
    }
  }

  // --- graph construction -------------------------------------------------

  // Names free in a body that are neither bound nor defined.
  void direct_names(const Ast& a, std::vector<std::string>& scope, std::set<std::string>& free,
                    std::set<std::size_t>& refs) const {
    switch (a.kind) {
      case Ast::Name:
        if (std::find(scope.begin(), scope.end(), a.name) != scope.end()) return;
        if (auto it = index_.find(a.name); it != index_.end())
          refs.insert(it->second);
        else
          free.insert(a.name);
        return;
      case Ast::App:
        direct_names(*a.left, scope, free, refs);
        direct_names(*a.right, scope, free, refs);
        return;
      case Ast::Lam:
        scope.push_back(a.name);
        direct_names(*a.left, scope, free, refs);
        scope.pop_back();
        return;
      case Ast::Box: direct_names(*a.left, scope, free, refs); return;
      case Ast::Cut: return;
    }
  }

  void check_capture(const Ast& a, std::vector<std::string>& scope) const {
    switch (a.kind) {
      case Ast::Name: {
        if (std::find(scope.begin(), scope.end(), a.name) != scope.end()) return;
        auto it = index_.find(a.name);
        if (it == index_.end()) return;
        for (const std::string& b : scope)
          if (def_free_[it->second].count(b))
            throw ParseError(ParseErrorKind::Capture, a.line, a.col,
                             "reference to '" + a.name + "' under binder '" + b + "', which is free in '" + a.name +
                                 "'");
        return;
      }
      case Ast::App:
        check_capture(*a.left, scope);
        check_capture(*a.right, scope);
        return;
      case Ast::Lam:
        scope.push_back(a.name);
        check_capture(*a.left, scope);
        scope.pop_back();
        return;
      case Ast::Box: check_capture(*a.left, scope); return;
      case Ast::Cut: return;
    }
  }

  // Target definition if the body is a bare reference.
  std::optional<std::size_t> alias_of(std::size_t d) const {
    const Ast& a = *defs_[d].body;
    if (a.kind != Ast::Name) return std::nullopt;
    auto it = index_.find(a.name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  NodeId convert(Term& t, const Ast& a, std::vector<std::string>& scope) const {
    switch (a.kind) {
      case Ast::Name: {
        for (std::size_t i = scope.size(); i-- > 0;)
          if (scope[i] == a.name) return t.add_bound(static_cast<std::uint32_t>(scope.size() - 1 - i));
        if (auto it = index_.find(a.name); it != index_.end()) return def_node_[it->second];
        return t.add_free(a.name);
      }
      case Ast::App: {
        NodeId l = convert(t, *a.left, scope);
        NodeId r = convert(t, *a.right, scope);
        return t.add_app(l, r);
      }
      case Ast::Lam: {
        scope.push_back(a.name);
        NodeId b = convert(t, *a.left, scope);
        scope.pop_back();
        return t.add_lam(a.mode, a.name, b);
      }
      case Ast::Box: {
        NodeId c = convert(t, *a.left, scope);
        return t.add_box(a.mode, c);
      }
      case Ast::Cut: return t.add_cut();
    }
    return no_node;
  }

  NodeId build(Term& t, const std::optional<Lexer::Token>& root_name, const std::unique_ptr<Ast>& bare_root) {
    const std::size_t n = defs_.size();
    // free names of each definition, closed under references
    std::vector<std::set<std::size_t>> refs(n);
    def_free_.assign(n, {});
    for (std::size_t d = 0; d < n; ++d) {
      std::vector<std::string> scope;
      direct_names(*defs_[d].body, scope, def_free_[d], refs[d]);
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t d = 0; d < n; ++d)
        for (std::size_t r : refs[d])
          for (const std::string& x : std::set<std::string>(def_free_[r]))
            changed = def_free_[d].insert(x).second || changed;
    }
    for (std::size_t d = 0; d < n; ++d) {
      std::vector<std::string> scope;
      check_capture(*defs_[d].body, scope);
    }
    if (bare_root) {
      std::vector<std::string> scope;
      check_capture(*bare_root, scope);
    }

    // Resolve aliases; a cycle of bare references has no solution.
    std::vector<std::size_t> target(n);
    for (std::size_t d = 0; d < n; ++d) {
      std::vector<std::size_t> chain{d};
      std::size_t cur = d;
      while (auto next = alias_of(cur)) {
        if (std::find(chain.begin(), chain.end(), *next) != chain.end()) {
          std::string cycle;
          auto start = std::find(chain.begin(), chain.end(), *next);
          for (auto it = start; it != chain.end(); ++it) cycle += defs_[*it].name.text + " -> ";
          cycle += defs_[*next].name.text;
          throw ParseError(ParseErrorKind::Guardedness, defs_[*next].name.line, defs_[*next].name.col,
                           "unguarded reference cycle " + cycle);
        }
        chain.push_back(*next);
        cur = *next;
      }
      target[d] = cur;
    }

    // Pre-allocate one node per non-alias definition, then fill it in.
    def_node_.assign(n, no_node);
    for (std::size_t d = 0; d < n; ++d)
      if (target[d] == d) def_node_[d] = t.add_cut();
    for (std::size_t d = 0; d < n; ++d) def_node_[d] = def_node_[target[d]];
    for (std::size_t d = 0; d < n; ++d) {
      if (target[d] != d) continue;
      std::vector<std::string> scope;
      const Ast& body = *defs_[d].body;
      // Build the body's top constructor directly into the reserved slot.
      NodeId built = convert(t, body, scope);
      Node copy = t.at(built);
      t.at(def_node_[d]) = copy;
      t.labels[def_node_[d]] = defs_[d].name.text;
    }
    if (bare_root) {
      std::vector<std::string> scope;
      return convert(t, *bare_root, scope);
    }
    if (!root_name) {
      const auto& tk = lex_.peek();
      throw ParseError(ParseErrorKind::Missing, tk.line, tk.col, "no root given");
    }
    auto it = index_.find(root_name->text);
    if (it == index_.end())
      throw ParseError(ParseErrorKind::Missing, root_name->line, root_name->col,
                       "root '" + root_name->text + "' is not defined");
    return def_node_[it->second];
  }

  Lexer lex_;
  std::vector<Def> defs_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::set<std::string>> def_free_;
  std::vector<NodeId> def_node_;
};

}  // namespace detail

inline Program parse_program(const std::string& text) { return detail::Parser(text).run(); }

inline Term parse_term(const std::string& text) { return parse_program(text).term; }

}  // namespace llinf

#endif
