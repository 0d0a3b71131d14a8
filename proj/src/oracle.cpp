#include "fdpg/oracle.hpp"

#include <stdexcept>

namespace fdpg::oracle {

AttrSet attribute_closure(const AttrSet& x, const FdSet& sigma) {
  AttrSet out = x;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& fd : sigma) {
      if (out.count(fd.rhs)) continue;
      bool covered = true;
      for (const auto& y : fd.lhs)
        if (!out.count(y)) covered = false;
      if (covered) {
        out.insert(fd.rhs);
        grew = true;
      }
    }
  }
  return out;
}

namespace {

// All unions obtainable by picking one left side per pivot attribute.
void unions(const std::vector<std::vector<AttrSet>>& choices, std::size_t i, const AttrSet& acc,
            std::set<AttrSet>& out) {
  if (i == choices.size()) {
    out.insert(acc);
    return;
  }
  for (const auto& x : choices[i]) {
    AttrSet next = acc;
    next.insert(x.begin(), x.end());
    unions(choices, i + 1, next, out);
  }
}

}  // namespace

FdSet tu_fixpoint(const FdSet& sigma) {
  AttrSet attrs;
  for (const auto& fd : sigma) {
    attrs.insert(fd.lhs.begin(), fd.lhs.end());
    attrs.insert(fd.rhs);
  }
  const std::size_t n = attrs.size();
  const std::size_t bound = n >= 60 ? SIZE_MAX : (std::size_t{1} << n) * (n + 1);

  FdSet result = sigma;
  for (std::size_t round = 0;; ++round) {
    if (round > bound) throw std::runtime_error("tu_fixpoint: round bound exceeded");
    FdSet added;
    for (const auto& pivot : result) {
      std::vector<std::vector<AttrSet>> choices;
      bool fed = true;
      for (const auto& y : pivot.lhs) {
        std::set<AttrSet> lefts;
        for (const auto& f : result)
          if (f.rhs == y) lefts.insert(f.lhs);
        if (lefts.empty()) {
          fed = false;
          break;
        }
        choices.emplace_back(lefts.begin(), lefts.end());
      }
      if (!fed) continue;
      std::set<AttrSet> us;
      unions(choices, 0, {}, us);
      for (const auto& u : us) {
        if (u.count(pivot.rhs)) continue;
        FD fd{u, pivot.rhs};
        if (!result.count(fd)) added.insert(fd);
      }
    }
    if (added.empty()) return result;
    result.insert(added.begin(), added.end());
  }
}

FdSet implied_fds(const std::vector<std::string>& attrs, const FdSet& sigma) {
  if (attrs.size() > 16) throw std::invalid_argument("implied_fds: universe too large");
  FdSet out;
  const std::size_t n = attrs.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    AttrSet x;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) x.insert(attrs[i]);
    for (const auto& a : attribute_closure(x, sigma))
      if (!x.count(a)) out.insert(FD{x, a});
  }
  return out;
}

std::string DiffReport::str() const {
  std::string s;
  for (const auto& fd : only_in_a) s += "only in a: " + to_string(fd) + "\n";
  for (const auto& fd : only_in_b) s += "only in b: " + to_string(fd) + "\n";
  return s;
}

DiffReport equiv_check(const FdSet& a, const FdSet& b) {
  DiffReport d;
  for (const auto& fd : a)
    if (!b.count(fd)) d.only_in_a.insert(fd);
  for (const auto& fd : b)
    if (!a.count(fd)) d.only_in_b.insert(fd);
  return d;
}

FdSet to_set(const std::vector<FD>& fds) { return FdSet(fds.begin(), fds.end()); }

}  // namespace fdpg::oracle
