#ifndef LLINF_TESTS_SUPPORT_HPP
#define LLINF_TESTS_SUPPORT_HPP

#include <random>
#include <string>
#include <vector>

#include "llinf/parse.hpp"
#include "llinf/term.hpp"

namespace testing_support {

// Arbitrary (not necessarily well-formed) preterm, as program text with up to
// three mutually recursive definitions.
inline std::string random_raw_program(std::mt19937& rng, int size, const std::vector<std::string>& free) {
  std::uniform_int_distribution<int> ndefs(1, 3);
  const int defs = ndefs(rng);
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  int counter = 0;
  auto gen = [&](auto&& self, int budget, std::vector<std::string>& scope) -> std::string {
    if (budget <= 1) {
      int choice = pick(3);
      if (choice == 0 && !scope.empty()) return scope[static_cast<std::size_t>(pick(static_cast<int>(scope.size())))];
      if (choice == 1) return "R" + std::to_string(pick(defs));
      return free[static_cast<std::size_t>(pick(static_cast<int>(free.size())))];
    }
    switch (pick(6)) {
      case 0:
      case 1: {
        int left = 1 + pick(budget - 1);
        return "(" + self(self, left, scope) + ") (" + self(self, budget - left, scope) + ")";
      }
      case 2: {
        static const char* kinds[] = {"", "!", "#"};
        std::string x = "b" + std::to_string(counter++);
        std::string k = kinds[pick(3)];
        scope.push_back(x);
        std::string body = self(self, budget - 1, scope);
        scope.pop_back();
        return "(\\" + k + x + ". " + body + ")";
      }
      case 3: return "!(" + self(self, budget - 1, scope) + ")";
      case 4: return "#(" + self(self, budget - 1, scope) + ")";
      default: return self(self, 1, scope);
    }
  };
  std::string text;
  for (int d = 0; d < defs; ++d) {
    std::vector<std::string> scope;
    std::string body = gen(gen, std::max(2, size / defs), scope);
    // a bare reference body would be an unguarded alias
    if (body.rfind("R", 0) == 0) body = "#" + body;
    text += "def R" + std::to_string(d) + " = " + body + " ;\n";
  }
  return text + "root R0 ;\n";
}

inline llinf::Term random_raw_term(std::mt19937& rng, int size, const std::vector<std::string>& free) {
  return llinf::parse_term(random_raw_program(rng, size, free));
}

}  // namespace testing_support

#endif
