#ifndef LLINF_PRINT_HPP
#define LLINF_PRINT_HPP

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "llinf/term.hpp"

namespace llinf {

namespace detail {

class Printer {
 public:
  explicit Printer(const Term& t) : t_(t), info_(free_info(t)) {
    for (NodeId n : reachable(t_, t_.root))
      for (const std::string& x : info_[static_cast<std::size_t>(n)].names) taken_.insert(x);
    choose_defs();
    name_defs();
  }

  bool needs_program() const {
    return defs_.size() > 1 || has_back_reference_ || t_.labels.count(t_.root) != 0;
  }

  std::string term_only() {
    std::vector<std::string> scope;
    std::string out;
    body(t_.root, scope, out);
    return out;
  }

  std::string program() {
    std::string out;
    for (NodeId d : def_order_) {
      if (d == t_.root) continue;
      out += "def " + def_names_[d] + " = ";
      std::vector<std::string> scope;
      body(d, scope, out);
      out += " ;\n";
    }
    out += "def " + def_names_[t_.root] + " = ";
    std::vector<std::string> scope;
    body(t_.root, scope, out);
    out += " ;\nroot " + def_names_[t_.root] + " ;\n";
    return out;
  }

 private:
  bool closed(NodeId n) const { return info_[static_cast<std::size_t>(n)].loose.empty(); }

  void choose_defs() {
    std::map<NodeId, int> indegree;
    for (NodeId n : reachable(t_, t_.root)) {
      const Node& node = t_.at(n);
      if (node.a != no_node) ++indegree[node.a];
      if (node.b != no_node) ++indegree[node.b];
    }
    defs_.insert(t_.root);
    for (auto [n, deg] : indegree)
      if (deg > 1 && closed(n) && t_.at(n).tag != Tag::Free && t_.at(n).tag != Tag::Cut) defs_.insert(n);
    // Break remaining cycles at a locally closed node on each one.
    for (;;) {
      NodeId pick = find_cycle_cut();
      if (pick == no_node) break;
      defs_.insert(pick);
    }
    has_back_reference_ = indegree.count(t_.root) != 0;
  }

  // DFS inside def bodies; returns a closed node on some remaining cycle.
  NodeId find_cycle_cut() {
    std::map<NodeId, int> state;  // 1 on stack, 2 done
    for (NodeId d : defs_) {
      std::vector<NodeId> stack;
      std::vector<std::pair<NodeId, int>> frames{{d, 0}};
      state[d] = 1;
      stack.push_back(d);
      while (!frames.empty()) {
        auto& [n, next] = frames.back();
        const Node& node = t_.at(n);
        NodeId kids[2] = {node.a, node.b};
        if (next < 2) {
          NodeId c = kids[next++];
          if (c == no_node || defs_.count(c)) continue;
          if (state[c] == 1) {
            auto it = std::find(stack.begin(), stack.end(), c);
            for (; it != stack.end(); ++it)
              if (closed(*it)) return *it;
            return c;  // unreachable when every cycle has a closed node
          }
          if (state[c] == 0) {
            state[c] = 1;
            stack.push_back(c);
            frames.push_back({c, 0});
          }
          continue;
        }
        state[n] = 2;
        stack.pop_back();
        frames.pop_back();
      }
    }
    return no_node;
  }

  void name_defs() {
    std::set<std::string> used = taken_;
    for (NodeId d : defs_) {
      auto it = t_.labels.find(d);
      if (it != t_.labels.end() && !used.count(it->second)) {
        def_names_[d] = it->second;
        used.insert(it->second);
      }
    }
    int counter = 0;
    for (NodeId d : defs_) {
      if (def_names_.count(d)) continue;
      std::string name;
      do name = "D" + std::to_string(counter++);
      while (used.count(name));
      def_names_[d] = name;
      used.insert(name);
    }
    for (const auto& [d, name] : def_names_) taken_.insert(name);
    // id order keeps output stable
    for (NodeId d : defs_) def_order_.push_back(d);
  }

  std::string fresh(const std::string& hint, const std::vector<std::string>& scope) const {
    std::string base = hint.empty() ? "x" : hint;
    while (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) base.pop_back();
    if (base.empty()) base = "x";
    auto clash = [&](const std::string& s) {
      return taken_.count(s) || std::find(scope.begin(), scope.end(), s) != scope.end();
    };
    if (!clash(hint) && !hint.empty()) return hint;
    for (int i = 0;; ++i) {
      std::string s = base + std::to_string(i);
      if (!clash(s)) return s;
    }
  }

  // ctx: 0 = top (lambdas allowed bare), 1 = function position, 2 = atom
  void emit(NodeId n, std::vector<std::string>& scope, std::string& out, int ctx, bool at_def_root) {
    if (!at_def_root && defs_.count(n)) {
      out += def_names_[n];
      return;
    }
    const Node& node = t_.at(n);
    switch (node.tag) {
      case Tag::Free: out += node.name; break;
      case Tag::Bound:
        if (node.index < scope.size())
          out += scope[scope.size() - 1 - node.index];
        else
          out += "<loose" + std::to_string(node.index - scope.size()) + ">";
        break;
      case Tag::Cut: out += "<cut>"; break;
      case Tag::Box:
        out += node.mode == Mode::Coind ? "#" : "!";
        emit(node.a, scope, out, 2, false);
        break;
      case Tag::App:
        if (ctx == 2) out += "(";
        emit(node.a, scope, out, 1, false);
        out += " ";
        emit(node.b, scope, out, 2, false);
        if (ctx == 2) out += ")";
        break;
      case Tag::Lam: {
        if (ctx != 0) out += "(";
        std::string x = fresh(node.name, scope);
        out += "\\";
        if (node.mode == Mode::Ind) out += "!";
        if (node.mode == Mode::Coind) out += "#";
        out += x + ". ";
        scope.push_back(x);
        emit(node.a, scope, out, 0, false);
        scope.pop_back();
        if (ctx != 0) out += ")";
        break;
      }
    }
  }

  void body(NodeId n, std::vector<std::string>& scope, std::string& out) { emit(n, scope, out, 0, true); }

  const Term& t_;
  std::vector<FreeInfo> info_;
  std::set<std::string> taken_;
  std::set<NodeId> defs_;
  std::map<NodeId, std::string> def_names_;
  std::vector<NodeId> def_order_;
  bool has_back_reference_ = false;
};

}  // namespace detail

// Prints a bare term when no definitions are needed, otherwise a program.
inline std::string print_term(const Term& t) {
  if (t.root == no_node) return "<empty>";
  detail::Printer p(t);
  return p.needs_program() ? p.program() : p.term_only();
}

inline std::string print_program(const Term& t) {
  if (t.root == no_node) return "<empty>";
  detail::Printer p(t);
  return p.program();
}

}  // namespace llinf

#endif
