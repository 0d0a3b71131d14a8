// Runs the acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fdpg/closure.hpp"
#include "fdpg/condition.hpp"
#include "fdpg/fdpg.hpp"
#include "fdpg/io.hpp"
#include "fdpg/oracle.hpp"
#include "support/condition_cases.hpp"
#include "support/schema_gen.hpp"

using namespace fdpg;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;  // first problem found

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;  // 0: no time limit
  std::function<Verdict()> run;
};

FD fd(std::set<std::string> lhs, std::string rhs) { return FD{std::move(lhs), std::move(rhs)}; }

std::string text_attr(const Record& r, const char* k) {
  auto it = r.find(k);
  return it != r.end() && it->second.tag() == AttrTag::Text ? it->second.as_text() : "";
}

std::string describe(const Schema& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.fds.size(); ++i) out += (i ? ", " : "") + to_string(s.fds[i]);
  return out + "}";
}

// Shared by criteria 3-7.
const std::vector<Schema>& closure_corpus() {
  static const auto corpus = testing::corpus(0xC105E, 200, {6, 8, 3});
  return corpus;
}

Verdict single_fd_graph() {
  Verdict v;
  auto [g, b] = build_fdpg({{"A", "C"}, {fd({"A"}, "C")}});
  v.require(g.node_count() == 3, "|V| != 3");
  v.require(g.edge_count() == 2, "|E| != 2");
  const auto& a = b.attr_node.at("A");
  const auto& c = b.attr_node.at("C");
  const auto& f = b.fd_node.at(0);
  v.require(text_attr(g.attrs(a.node), key::kRelDbType) == "ATTR", "A is not ATTR");
  v.require(text_attr(g.attrs(c.node), key::kRelDbType) == "ATTR", "C is not ATTR");
  v.require(text_attr(g.attrs(a.port), key::kRelDbType) == "pFD", "A's port is not pFD");
  v.require(text_attr(g.attrs(c.port), key::kRelDbType) == "pFD", "C's port is not pFD");
  v.require(text_attr(g.attrs(f.node), key::kRelDbType) == "FD", "FD node role");
  v.require(text_attr(g.attrs(f.lhs), key::kRelDbType) == "FDLHS", "FDLHS port role");
  v.require(text_attr(g.attrs(f.rhs), key::kRelDbType) == "FDRHS", "FDRHS port role");
  for (PortId p : {f.lhs, f.rhs}) {
    auto it = g.attrs(p).find(key::kFunctionalArity);
    v.require(it != g.attrs(p).end() && it->second.tag() == AttrTag::Integer && it->second.as_int() == 1,
              "FunctionalArity != 1 on an FD port");
  }
  v.require(g.edge_between(a.port, f.lhs).has_value(), "no edge A -> FDLHS");
  v.require(g.edge_between(f.rhs, c.port).has_value(), "no edge FDRHS -> C");
  v.require(validate_fdpg(g).ok(), "validate_fdpg reports problems");
  return v;
}

Verdict cardinality() {
  Verdict v;
  for (const auto& s : testing::corpus(0xCA4D, 500, {8, 10, 3})) {
    auto [g, b] = build_fdpg(s);
    std::size_t lhs = 0;
    for (const auto& f : s.fds) lhs += f.lhs.size();
    v.require(g.node_count() == s.attributes.size() + s.fds.size(), "|V| mismatch on " + describe(s));
    v.require(g.edge_count() == s.fds.size() + lhs, "|E| mismatch on " + describe(s));
  }
  return v;
}

Verdict soundness() {
  Verdict v;
  for (std::size_t i = 0; i < closure_corpus().size(); ++i) {
    const Schema& s = closure_corpus()[i];
    const auto sigma = oracle::to_set(s.fds);
    ClosureConfig cfg;
    cfg.seed = i;
    for (const auto& f : transitive_closure(s, cfg).schema_out.fds) {
      auto cl = oracle::attribute_closure(f.lhs, sigma);
      v.require(cl.count(f.rhs) && !f.lhs.count(f.rhs), "unsound " + to_string(f) + " from " + describe(s));
    }
  }
  return v;
}

Verdict completeness() {
  Verdict v;
  for (std::size_t i = 0; i < closure_corpus().size(); ++i) {
    const Schema& s = closure_corpus()[i];
    ClosureConfig cfg;
    cfg.seed = i;
    cfg.outer_fixpoint = true;
    auto r = transitive_closure(s, cfg);
    auto diff = oracle::equiv_check(oracle::to_set(r.schema_out.fds), oracle::tu_fixpoint(oracle::to_set(s.fds)));
    v.require(diff.empty(), "on " + describe(s) + ":\n" + diff.str());
  }
  return v;
}

struct TerminationRuns {
  Verdict termination;
  Verdict linearity;
};

const TerminationRuns& termination_runs() {
  static const TerminationRuns runs = [] {
    TerminationRuns t;
    for (const auto& s : closure_corpus()) {
      const std::size_t sigma_plus = oracle::tu_fixpoint(oracle::to_set(s.fds)).size();
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        ClosureConfig cfg;
        cfg.seed = seed;
        cfg.max_steps = 10 * (sigma_plus + s.fds.size());
        cfg.record_trace = true;
        auto r = transitive_closure(s, cfg);
        const std::string where = " (seed " + std::to_string(seed) + ") on " + describe(s);
        t.termination.require(r.outcome == Outcome::Success, std::string("outcome ") + std::string(to_string(r.outcome)) + where);
        std::map<std::pair<std::size_t, std::size_t>, std::int64_t> last;
        for (const auto& m : r.measures) {
          const std::int64_t value = measure(m.fd_nodes, sigma_plus, r.initial_fd_nodes);
          auto [it, first] = last.emplace(std::make_pair(m.sweep, m.arity), value);
          if (!first) {
            t.termination.require(value < it->second, "measure not decreasing" + where);
            it->second = value;
          }
        }
        t.linearity.require(r.trace && derivation_linear(*r.trace), "branching derivation" + where);
      }
    }
    return t;
  }();
  return runs;
}

Verdict dedup() {
  Verdict v;
  for (std::size_t i = 0; i < closure_corpus().size(); ++i) {
    const Schema& s = closure_corpus()[i];
    ClosureConfig cfg;
    cfg.seed = i;
    auto first = transitive_closure(s, cfg);
    std::set<std::int64_t> uids(first.created_uids.begin(), first.created_uids.end());
    v.require(uids.size() == first.created_uids.size(), "repeated uid-product in one run on " + describe(s));
    auto second = transitive_closure(first.schema_out, cfg);
    v.require(second.new_fds.empty(), "second run derived " + std::to_string(second.new_fds.size()) + " FDs on " +
                                          describe(first.schema_out));
  }
  return v;
}

Verdict conditions() {
  Verdict v;
  const auto plain = testing::condition_host(false);
  const auto six = testing::condition_host(true);
  const auto& table = testing::condition_table();
  v.require(table.size() == 30, "table does not have 30 cases");
  for (const auto& c : table) {
    const auto& h = c.host_has_uid_six ? six : plain;
    cond::EvalContext ctx{&h.graph, nullptr, &h.names, nullptr};
    bool got = false;
    try {
      got = cond::evaluate(cond::parse(c.text), ctx);
    } catch (const std::exception& e) {
      v.require(false, std::string(c.text) + " threw " + e.what());
      continue;
    }
    v.require(got == c.expected, std::string(c.text) + " evaluated to " + (got ? "true" : "false"));
  }
  testing::AstFuzzer fuzz(0xF022);
  for (int i = 0; i < 1000; ++i) {
    cond::Condition c = fuzz.condition();
    const std::string text = cond::pretty_print(c);
    try {
      v.require(cond::equal(c, cond::parse(text)), "round trip changed " + text);
    } catch (const std::exception& e) {
      v.require(false, "reparse of " + text + " threw " + e.what());
    }
  }
  return v;
}

Verdict determinism() {
  Verdict v;
  for (const auto& s : testing::corpus(0xDE7, 20, {6, 8, 3})) {
    const std::string input = format_schema_file(s);
    auto manifest = [&](std::uint64_t seed) {
      ClosureConfig cfg;
      cfg.seed = seed;
      auto r = transitive_closure(s, cfg);
      return std::make_pair(run_manifest({input, s.fds.size(), &cfg, &r, std::nullopt}), oracle::to_set(r.schema_out.fds));
    };
    auto a = manifest(7), b = manifest(7);
    v.require(a.first == b.first, "manifests differ for one seed on " + describe(s));
    for (std::uint64_t seed : {1u, 2u, 99u})
      v.require(manifest(seed).second == a.second, "derived set depends on the seed on " + describe(s));
  }
  return v;
}

Verdict micro_examples() {
  Verdict v;
  auto check = [&](const Schema& s, const std::vector<std::pair<FD, std::int64_t>>& expected) {
    auto r = transitive_closure(s);
    v.require(r.new_fds.size() == expected.size(), "wrong number of derived FDs on " + describe(s));
    for (std::size_t i = 0; i < std::min(r.new_fds.size(), expected.size()); ++i) {
      v.require(r.new_fds[i].fd == expected[i].first, "derived " + to_string(r.new_fds[i].fd) + " on " + describe(s));
      v.require(r.new_fds[i].uid == expected[i].second,
                "uid-product " + std::to_string(r.new_fds[i].uid) + " on " + describe(s));
    }
    v.require(r.outcome == Outcome::Success, "outcome on " + describe(s));
  };
  check({{"A", "B", "C"}, {fd({"A"}, "B"), fd({"B"}, "C")}}, {{fd({"A"}, "C"), 6}});
  check({{"A", "B", "C", "D"}, {fd({"A"}, "B"), fd({"A"}, "C"), fd({"B", "C"}, "D")}}, {{fd({"A"}, "D"), 30}});
  check({{}, {}}, {});
  return v;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "A -> C graph reconstruction", 1, single_fd_graph},
      {2, "cardinality on 500 schemas", 10, cardinality},
      {3, "soundness on 200 schemas", 60, soundness},
      {4, "fixpoint completeness on 200 schemas", 60, completeness},
      {5, "termination, never fails, decreasing measure", 120, [] { return termination_runs().termination; }},
      {6, "derivation trees are linear", 0, [] { return termination_runs().linearity; }},
      {7, "NotNode deduplication", 0, dedup},
      {8, "condition table and fuzzed round trips", 10, conditions},
      {9, "determinism across runs and seeds", 0, determinism},
      {10, "worked micro-examples", 1, micro_examples},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s)
      v.require(false, "took " + std::to_string(secs) + " s, limit " + std::to_string(c.budget_s) + " s");
    std::printf("%s  %2d  %-46s %8.3f s\n", v.ok ? "PASS" : "FAIL", c.id, c.title.c_str(), secs);
    if (!v.ok) {
      std::printf("      %s\n", v.detail.c_str());
      ++failed;
    }
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
