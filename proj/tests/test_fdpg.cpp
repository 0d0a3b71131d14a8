#include <doctest.h>

#include "fdpg/fdpg.hpp"
#include "fdpg/oracle.hpp"
#include "support/schema_gen.hpp"

using namespace fdpg;

namespace {

FD fd(std::set<std::string> lhs, std::string rhs) { return FD{std::move(lhs), std::move(rhs)}; }

std::string text(const Record& r, const char* k) { return r.at(k).as_text(); }

}  // namespace

TEST_CASE("first primes") {
  CHECK(first_primes(0).empty());
  CHECK(first_primes(8) == std::vector<std::int64_t>{2, 3, 5, 7, 11, 13, 17, 19});
}

TEST_CASE("build_fdpg reproduces the A -> C graph") {
  auto [g, b] = build_fdpg({{"A", "C"}, {fd({"A"}, "C")}});
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);

  const auto& a = b.attr_node.at("A");
  const auto& c = b.attr_node.at("C");
  CHECK(text(g.attrs(a.node), "RelDbType") == "ATTR");
  CHECK(text(g.attrs(c.node), "RelDbType") == "ATTR");
  CHECK(text(g.attrs(a.port), "RelDbType") == "pFD");
  CHECK(text(g.attrs(a.node), "viewLabel") == "A");

  const auto& f = b.fd_node.at(0);
  const Record& fr = g.attrs(f.node);
  CHECK(text(fr, "RelDbType") == "FD");
  CHECK(text(fr, "viewLabel") == "FD2");
  CHECK(fr.at("UID").as_int() == 2);
  CHECK(fr.at("iter").as_bool() == false);
  CHECK(fr.at("visit").as_bool() == false);
  CHECK(text(g.attrs(f.lhs), "RelDbType") == "FDLHS");
  CHECK(text(g.attrs(f.rhs), "RelDbType") == "FDRHS");
  CHECK(g.attrs(f.lhs).at("FunctionalArity").as_int() == 1);
  CHECK(g.attrs(f.rhs).at("FunctionalArity").as_int() == 1);
  CHECK(g.edge_between(a.port, f.lhs).has_value());
  CHECK(g.edge_between(f.rhs, c.port).has_value());
  CHECK(validate_fdpg(g).ok());
}

TEST_CASE("build_fdpg small schemas") {
  SUBCASE("no dependencies") {
    auto [g, b] = build_fdpg({{"A"}, {}});
    CHECK(g.node_count() == 1);
    CHECK(g.edge_count() == 0);
  }
  SUBCASE("A -> B, BC -> D") {
    Schema s{{"A", "B", "C", "D"}, {fd({"A"}, "B"), fd({"B", "C"}, "D")}};
    auto [g, b] = build_fdpg(s);
    CHECK(g.node_count() == 6);
    CHECK(g.edge_count() == 2 + (1 + 2));
    CHECK(g.attrs(b.fd_node[0].node).at("UID").as_int() == 2);
    CHECK(g.attrs(b.fd_node[1].node).at("UID").as_int() == 3);
    CHECK(g.attrs(b.fd_node[1].lhs).at("FunctionalArity").as_int() == 2);
  }
  SUBCASE("rejects invalid and cyclic input") {
    CHECK_THROWS_AS(build_fdpg({{"A"}, {fd({"A"}, "A")}}), SchemaError);
    CHECK_THROWS_AS(build_fdpg({{"A"}, {fd({"A"}, "Z")}}), SchemaError);
    CHECK_THROWS_AS(build_fdpg({{"A", "B"}, {fd({"A"}, "B"), fd({"A"}, "B")}}), SchemaError);
    CHECK_THROWS_AS(build_fdpg({{"A", "B"}, {fd({"A"}, "B"), fd({"B"}, "A")}}), CyclicSchemaError);
  }
}

TEST_CASE("cardinality properties on random schemas") {
  auto schemas = testing::corpus(2024, 300, {8, 10, 3});
  for (const auto& s : schemas) {
    auto [g, b] = build_fdpg(s);
    std::size_t lhs_total = 0;
    for (const auto& f : s.fds) lhs_total += f.lhs.size();
    CHECK(g.node_count() == s.attributes.size() + s.fds.size());
    CHECK(g.edge_count() == s.fds.size() + lhs_total);
    CHECK(validate_fdpg(g).ok());
    CHECK(b.attr_node.size() == s.attributes.size());
    CHECK(b.fd_node.size() == s.fds.size());
  }
}

TEST_CASE("validate_fdpg reports each kind of damage") {
  Schema s{{"A", "B", "C"}, {fd({"A"}, "B"), fd({"A", "B"}, "C")}};
  auto [g, b] = build_fdpg(s);
  const auto& f0 = b.fd_node[0];
  const auto& f1 = b.fd_node[1];

  SUBCASE("right port to left port") {
    g.connect(f0.rhs, f1.lhs);
    auto rep = validate_fdpg(g);
    CHECK(rep.has("disallowed-pair"));
  }
  SUBCASE("arity differs from degree") {
    g.set_attr(f0.lhs, "FunctionalArity", 2);
    CHECK(validate_fdpg(g).has("arity-mismatch"));
  }
  SUBCASE("no left-hand side") {
    g.disconnect(*g.edge_between(b.attr_node.at("A").port, f0.lhs));
    g.set_attr(f0.lhs, "FunctionalArity", 0);
    CHECK(validate_fdpg(g).has("empty-lhs"));
  }
  SUBCASE("duplicate UID") {
    g.set_attr(f1.node, "UID", 2);
    CHECK(validate_fdpg(g).has("duplicate-uid"));
  }
  SUBCASE("right side also on the left") {
    g.connect(b.attr_node.at("B").port, f0.lhs);
    g.set_attr(f0.lhs, "FunctionalArity", 2);
    CHECK(validate_fdpg(g).has("rhs-in-lhs"));
  }
  SUBCASE("unknown node role") {
    g.add_node({{"RelDbType", "TABLE"}});
    CHECK(validate_fdpg(g).has("partition"));
  }
}

TEST_CASE("detect_cycles") {
  CHECK(detect_cycles({{"A", "B"}, {fd({"A"}, "B"), fd({"B"}, "A")}}).has_value());
  CHECK_FALSE(detect_cycles({{"A", "B", "C"}, {fd({"A"}, "B"), fd({"B"}, "C")}}).has_value());
  auto w = detect_cycles({{"A", "B", "C", "D"}, {fd({"A"}, "B"), fd({"B", "C"}, "D"), fd({"D"}, "C")}});
  REQUIRE(w.has_value());
  std::set<std::string> on_cycle(w->attributes.begin(), w->attributes.end());
  CHECK(on_cycle == std::set<std::string>{"C", "D"});
}

TEST_CASE("random schemas from the generator are acyclic") {
  for (const auto& s : testing::corpus(5, 200, {8, 10, 3})) {
    CHECK(schema_problems(s).empty());
    CHECK_FALSE(detect_cycles(s).has_value());
  }
}

TEST_CASE("extract_schema inverts build_fdpg") {
  SUBCASE("A -> C") {
    auto [g, b] = build_fdpg({{"A", "C"}, {fd({"A"}, "C")}});
    Schema back = extract_schema(g);
    CHECK(back.attributes == std::vector<std::string>{"A", "C"});
    CHECK(back.fds == std::vector<FD>{fd({"A"}, "C")});
  }
  SUBCASE("random") {
    for (const auto& s : testing::corpus(99, 200, {8, 10, 3})) {
      auto [g, b] = build_fdpg(s);
      Schema back = extract_schema(g);
      CHECK(back.attributes == s.attributes);
      CHECK(oracle::to_set(back.fds) == oracle::to_set(s.fds));
    }
  }
  SUBCASE("invalid graph") {
    auto [g, b] = build_fdpg({{"A", "C"}, {fd({"A"}, "C")}});
    g.set_attr(b.fd_node[0].lhs, "FunctionalArity", 3);
    CHECK_THROWS_AS(extract_schema(g), SchemaError);
  }
}

// ---------------------------------------------------------------------------
// FDPG-paths
// ---------------------------------------------------------------------------

namespace {

std::optional<SubgraphWitness> path(const PortGraph& g, const FdpgBinding& b, std::set<std::string> from,
                                    const std::string& to) {
  std::set<NodeId> xs;
  for (const auto& a : from) xs.insert(b.attr_node.at(a).node);
  return find_fdpg_path(g, xs, b.attr_node.at(to).node);
}

}  // namespace

TEST_CASE("find_fdpg_path examples") {
  SUBCASE("direct dependency") {
    auto [g, b] = build_fdpg({{"A", "C"}, {fd({"A"}, "C")}});
    auto w = path(g, b, {"A"}, "C");
    REQUIRE(w);
    CHECK(w->condition == 1);
    CHECK(w->fd_nodes.size() == 1);
    CHECK_FALSE(path(g, b, {"C"}, "A"));
  }
  SUBCASE("transitive") {
    auto [g, b] = build_fdpg({{"A", "B", "C"}, {fd({"A"}, "B"), fd({"B"}, "C")}});
    auto w = path(g, b, {"A"}, "C");
    REQUIRE(w);
    CHECK(w->condition == 2);
    CHECK(w->fd_nodes.size() == 2);
  }
  SUBCASE("union") {
    auto [g, b] = build_fdpg({{"A", "B", "C", "D"}, {fd({"A"}, "B"), fd({"A"}, "C"), fd({"B", "C"}, "D")}});
    auto w = path(g, b, {"A"}, "D");
    REQUIRE(w);
    CHECK(w->condition == 3);
    CHECK(w->fd_nodes.size() == 3);
  }
  SUBCASE("augmentation is not a path") {
    auto [g, b] = build_fdpg({{"A", "B", "C"}, {fd({"A"}, "C")}});
    CHECK_FALSE(path(g, b, {"A", "B"}, "C"));
  }
  SUBCASE("non-attribute ids") {
    auto [g, b] = build_fdpg({{"A", "C"}, {fd({"A"}, "C")}});
    CHECK_THROWS_AS(find_fdpg_path(g, {b.fd_node[0].node}, b.attr_node.at("C").node), GraphError);
  }
}

TEST_CASE("path soundness against the transitivity+union oracle") {
  for (const auto& s : testing::corpus(31337, 120, {6, 8, 3})) {
    auto [g, b] = build_fdpg(s);
    const auto tu = oracle::tu_fixpoint(oracle::to_set(s.fds));
    const std::size_t n = s.attributes.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
      std::set<std::string> x;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) x.insert(s.attributes[i]);
      for (const auto& j : s.attributes) {
        if (x.count(j)) continue;
        auto w = path(g, b, x, j);
        const bool expected = tu.count(FD{x, j}) > 0;
        CHECK_MESSAGE(w.has_value() == expected, to_string(FD{x, j}));
        if (!w) continue;
        for (EdgeId e : w->edges) CHECK(g.contains(e));
        for (NodeId f : w->fd_nodes) CHECK(g.contains(f));
        CHECK(w->attr_nodes.count(b.attr_node.at(j).node));
      }
    }
  }
}
