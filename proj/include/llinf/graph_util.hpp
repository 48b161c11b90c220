#ifndef LLINF_GRAPH_UTIL_HPP
#define LLINF_GRAPH_UTIL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace llinf::detail {

// Strongly connected components of a graph given as adjacency lists.
// Components come out in reverse topological order: every component is
// emitted after all components reachable from it.
struct SccResult {
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> component_of;
  std::vector<bool> cyclic;  // component has an internal edge
};

inline SccResult strongly_connected(const std::vector<std::vector<std::size_t>>& succ) {
  const std::size_t n = succ.size();
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, unset), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  SccResult out;
  out.component_of.assign(n, unset);
  std::size_t counter = 0;

  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  std::vector<Frame> call;
  for (std::size_t start = 0; start < n; ++start) {
    if (index[start] != unset) continue;
    call.push_back({start, 0});
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < succ[f.v].size()) {
        std::size_t w = succ[f.v][f.next++];
        if (index[w] == unset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      std::size_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.component_of[w] = out.components.size();
          comp.push_back(w);
        } while (w != v);
        out.components.push_back(std::move(comp));
      }
    }
  }
  out.cyclic.assign(out.components.size(), false);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w : succ[v])
      if (out.component_of[v] == out.component_of[w]) out.cyclic[out.component_of[v]] = true;
  return out;
}

inline constexpr std::uint64_t infinite_count = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return (a > infinite_count - b) ? infinite_count : a + b;
}

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return (a > infinite_count / b) ? infinite_count : a * b;
}

}  // namespace llinf::detail

#endif
