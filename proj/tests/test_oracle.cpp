#include <doctest.h>

#include <algorithm>
#include <map>

#include "fdpg/oracle.hpp"
#include "support/schema_gen.hpp"

using namespace fdpg;
using namespace fdpg::oracle;

namespace {

FD fd(std::set<std::string> lhs, std::string rhs) { return FD{std::move(lhs), std::move(rhs)}; }

// Left sides reachable for each attribute, computed attribute by attribute in
// dependency order instead of by global rounds.
FdSet per_attribute_fixpoint(const Schema& s) {
  std::map<std::string, std::set<AttrSet>> lefts;
  std::vector<std::string> order;
  std::set<std::string> placed;
  while (order.size() < s.attributes.size()) {
    for (const auto& a : s.attributes) {
      if (placed.count(a)) continue;
      bool ready = true;
      for (const auto& f : s.fds)
        if (f.rhs == a)
          for (const auto& y : f.lhs) ready = ready && placed.count(y);
      if (ready) {
        order.push_back(a);
        placed.insert(a);
      }
    }
  }
  for (const auto& a : order) {
    std::set<AttrSet>& mine = lefts[a];
    std::vector<AttrSet> work;
    for (const auto& f : s.fds)
      if (f.rhs == a && mine.insert(f.lhs).second) work.push_back(f.lhs);
    while (!work.empty()) {
      AttrSet y = work.back();
      work.pop_back();
      std::vector<AttrSet> partial{AttrSet{}};
      for (const auto& b : y) {
        std::vector<AttrSet> next;
        for (const auto& acc : partial)
          for (const auto& x : lefts[b]) {
            AttrSet u = acc;
            u.insert(x.begin(), x.end());
            next.push_back(u);
          }
        partial = std::move(next);
      }
      for (const auto& u : partial)
        if (!u.count(a) && mine.insert(u).second) work.push_back(u);
    }
  }
  FdSet out;
  for (const auto& [a, ls] : lefts)
    for (const auto& x : ls) out.insert(FD{x, a});
  return out;
}

bool subset(const FdSet& a, const FdSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("attribute closure") {
  FdSet sigma{fd({"A"}, "B"), fd({"B"}, "C"), fd({"C", "D"}, "E")};
  CHECK(attribute_closure({"A"}, sigma) == AttrSet{"A", "B", "C"});
  CHECK(attribute_closure({"A", "D"}, sigma) == AttrSet{"A", "B", "C", "D", "E"});
  CHECK(attribute_closure({"E"}, sigma) == AttrSet{"E"});
  CHECK(attribute_closure({}, sigma).empty());
}

TEST_CASE("transitivity fixpoint examples") {
  CHECK(tu_fixpoint({fd({"A"}, "B"), fd({"B"}, "C")}) == FdSet{fd({"A"}, "B"), fd({"B"}, "C"), fd({"A"}, "C")});
  CHECK(tu_fixpoint({fd({"A"}, "B"), fd({"A"}, "C"), fd({"B", "C"}, "D")}) ==
        FdSet{fd({"A"}, "B"), fd({"A"}, "C"), fd({"B", "C"}, "D"), fd({"A"}, "D")});
  CHECK(tu_fixpoint({fd({"A"}, "B"), fd({"B", "C"}, "D")}) == FdSet{fd({"A"}, "B"), fd({"B", "C"}, "D")});
  CHECK(tu_fixpoint({}).empty());
  // two feeders for one attribute give two results
  CHECK(tu_fixpoint({fd({"A"}, "C"), fd({"B"}, "C"), fd({"C"}, "D")}).size() == 5);
}

TEST_CASE("implied FDs") {
  auto all = implied_fds({"A", "B", "C"}, {fd({"A"}, "B"), fd({"B"}, "C")});
  // A->B, A->C, B->C, AB->C, AC->B
  CHECK(all == FdSet{fd({"A"}, "B"), fd({"A"}, "C"), fd({"B"}, "C"), fd({"A", "B"}, "C"), fd({"A", "C"}, "B")});
  std::vector<std::string> big(17, "x");
  CHECK_THROWS_AS(implied_fds(big, {}), std::invalid_argument);
}

TEST_CASE("equivalence report") {
  FdSet a{fd({"A"}, "B"), fd({"B"}, "C")};
  FdSet b{fd({"A"}, "B"), fd({"A"}, "C")};
  auto d = equiv_check(a, b);
  CHECK_FALSE(d.empty());
  CHECK(d.only_in_a == FdSet{fd({"B"}, "C")});
  CHECK(d.only_in_b == FdSet{fd({"A"}, "C")});
  CHECK(d.str() == "only in a: B -> C\nonly in b: A -> C\n");
  CHECK(equiv_check(a, a).empty());
}

TEST_CASE("oracle properties on random schemas") {
  for (const auto& s : testing::corpus(2024, 150, {6, 8, 3})) {
    const FdSet sigma = to_set(s.fds);
    const FdSet tu = tu_fixpoint(sigma);
    const FdSet implied = implied_fds(s.attributes, sigma);

    CHECK(subset(sigma, tu));
    CHECK(subset(tu, implied));
    CHECK(tu_fixpoint(tu) == tu);
    CHECK(equiv_check(tu, per_attribute_fixpoint(s)).empty());

    // closure is extensive, monotone and idempotent
    for (std::size_t i = 0; i + 1 < s.attributes.size(); ++i) {
      AttrSet x{s.attributes[i]};
      AttrSet xy{s.attributes[i], s.attributes[i + 1]};
      auto cx = attribute_closure(x, sigma);
      CHECK(std::includes(cx.begin(), cx.end(), x.begin(), x.end()));
      auto cxy = attribute_closure(xy, sigma);
      CHECK(std::includes(cxy.begin(), cxy.end(), cx.begin(), cx.end()));
      CHECK(attribute_closure(cx, sigma) == cx);
    }
    // implication is unchanged by adding consequences
    CHECK(implied_fds(s.attributes, tu) == implied);
  }
}
