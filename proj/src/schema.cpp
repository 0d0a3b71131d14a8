#include "fdpg/schema.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace fdpg {

std::string to_string(const FD& fd) {
  std::string out;
  for (const auto& a : fd.lhs) {
    if (!out.empty()) out += ',';
    out += a;
  }
  return out + " -> " + fd.rhs;
}

std::vector<std::string> schema_problems(const Schema& s) {
  std::vector<std::string> out;
  std::set<std::string> known;
  for (const auto& a : s.attributes)
    if (!known.insert(a).second) out.push_back("duplicate attribute " + a);
  std::set<FD> seen;
  for (const auto& fd : s.fds) {
    if (fd.lhs.empty()) out.push_back("empty left-hand side in " + to_string(fd));
    if (fd.lhs.count(fd.rhs)) out.push_back("right-hand side occurs on the left in " + to_string(fd));
    for (const auto& a : fd.lhs)
      if (!known.count(a)) out.push_back("unknown attribute " + a + " in " + to_string(fd));
    if (!known.count(fd.rhs)) out.push_back("unknown attribute " + fd.rhs + " in " + to_string(fd));
    if (!seen.insert(fd).second) out.push_back("duplicate dependency " + to_string(fd));
  }
  return out;
}

std::optional<CycleWitness> detect_cycles(const Schema& s) {
  std::map<std::string, std::set<std::string>> succ;
  for (const auto& fd : s.fds)
    for (const auto& a : fd.lhs) succ[a].insert(fd.rhs);

  enum class Mark { White, Grey, Black };
  std::map<std::string, Mark> mark;
  std::vector<std::string> stack;
  std::optional<CycleWitness> found;

  std::function<bool(const std::string&)> visit = [&](const std::string& a) {
    mark[a] = Mark::Grey;
    stack.push_back(a);
    for (const auto& b : succ[a]) {
      if (mark[b] == Mark::Grey) {
        auto it = std::find(stack.begin(), stack.end(), b);
        found = CycleWitness{{it, stack.end()}};
        return true;
      }
      if (mark[b] == Mark::White && visit(b)) return true;
    }
    stack.pop_back();
    mark[a] = Mark::Black;
    return false;
  };

  // Attributes first in schema order, then any names only mentioned by FDs.
  std::vector<std::string> roots = s.attributes;
  for (const auto& [a, _] : succ) roots.push_back(a);
  for (const auto& a : roots)
    if (mark[a] == Mark::White && visit(a)) return found;
  return std::nullopt;
}

}  // namespace fdpg
