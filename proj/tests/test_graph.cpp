#include <doctest.h>

#include "fdpg/graph.hpp"
#include "fdpg/rng.hpp"

using namespace fdpg;

TEST_CASE("add_node returns fresh ids and stores the record") {
  PortGraph g;
  NodeId a = g.add_node({{"viewLabel", "A"}});
  CHECK(g.node_count() == 1);
  CHECK(g.attrs(a).at("viewLabel").as_text() == "A");
  g.add_node();
  NodeId c = g.add_node({{"RelDbType", "FD"}});
  CHECK(g.node_count() == 3);
  CHECK(c != a);
}

TEST_CASE("ids are shared across kinds and never reused") {
  PortGraph g;
  NodeId n = g.add_node();
  PortId p = g.attach_port(n);
  PortId q = g.attach_port(g.add_node());
  EdgeId e = g.connect(p, q);
  CHECK(g.kind_of(n.value) == ElementKind::Node);
  CHECK(g.kind_of(p.value) == ElementKind::Port);
  CHECK(g.kind_of(e.value) == ElementKind::Edge);
  g.remove_node(n);
  NodeId m = g.add_node();
  CHECK(m.value > e.value);
  CHECK_FALSE(g.kind_of(n.value).has_value());
}

TEST_CASE("attach_port") {
  PortGraph g;
  NodeId a = g.add_node({{"RelDbType", "ATTR"}});
  PortId p = g.attach_port(a, {{"RelDbType", "pFD"}});
  CHECK(g.owner(p) == a);
  CHECK(g.port_degree(p) == 0);

  NodeId fd = g.add_node({{"RelDbType", "FD"}});
  PortId l = g.attach_port(fd, {{"RelDbType", "FDLHS"}, {"FunctionalArity", 1}});
  CHECK(g.attrs(l).at("FunctionalArity").as_int() == 1);

  g.remove_node(fd);
  CHECK_THROWS_AS(g.attach_port(fd), GraphError);
}

TEST_CASE("connect enforces the single-edge rule") {
  PortGraph g;
  PortId a = g.attach_port(g.add_node(), {{"RelDbType", "pFD"}});
  PortId l = g.attach_port(g.add_node(), {{"RelDbType", "FDLHS"}});
  EdgeId e = g.connect(a, l);
  CHECK(g.port_degree(a) == 1);
  CHECK(g.port_degree(l) == 1);
  CHECK_THROWS_AS(g.connect(a, l), GraphError);
  CHECK_THROWS_AS(g.connect(l, a), GraphError);  // unordered pair
  CHECK_THROWS_AS(g.connect(a, a), GraphError);
  CHECK_THROWS_AS(g.connect(a, PortId{999}), GraphError);
  CHECK(g.edge_between(l, a) == e);
}

TEST_CASE("the A -> C graph has three nodes and two edges") {
  PortGraph g;
  NodeId a = g.add_node({{"viewLabel", "A"}, {"RelDbType", "ATTR"}});
  NodeId c = g.add_node({{"viewLabel", "C"}, {"RelDbType", "ATTR"}});
  NodeId fd = g.add_node({{"viewLabel", "FD2"}, {"RelDbType", "FD"}, {"UID", 2}});
  PortId pa = g.attach_port(a, {{"RelDbType", "pFD"}});
  PortId pc = g.attach_port(c, {{"RelDbType", "pFD"}});
  PortId l = g.attach_port(fd, {{"RelDbType", "FDLHS"}, {"FunctionalArity", 1}});
  PortId r = g.attach_port(fd, {{"RelDbType", "FDRHS"}, {"FunctionalArity", 1}});
  g.connect(pa, l);
  g.connect(r, pc);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.port_degree(l) == 1);
}

TEST_CASE("port_degree of a three-attribute left port") {
  PortGraph g;
  PortId l = g.attach_port(g.add_node(), {{"RelDbType", "FDLHS"}});
  for (int i = 0; i < 3; ++i) g.connect(g.attach_port(g.add_node()), l);
  CHECK(g.port_degree(l) == 3);
  CHECK_THROWS_AS(g.port_degree(PortId{12345}), GraphError);
}

TEST_CASE("external_edges") {
  PortGraph g;
  NodeId fd = g.add_node();
  PortId l = g.attach_port(fd);
  NodeId b = g.add_node(), c = g.add_node();
  PortId pb = g.attach_port(b), pc = g.attach_port(c);
  EdgeId eb = g.connect(pb, l);
  EdgeId ec = g.connect(pc, l);

  SUBCASE("all neighbours inside") {
    CHECK(g.external_edges(l, {fd.value, l.value, b.value, pb.value, c.value, pc.value}).empty());
  }
  SUBCASE("one neighbour outside") {
    auto out = g.external_edges(l, {fd.value, l.value, b.value, pb.value});
    REQUIRE(out.size() == 1);
    CHECK(out[0] == ec);
  }
  SUBCASE("2-ary left port with one attribute inside") {
    auto out = g.external_edges(l, {fd.value, l.value, c.value, pc.value});
    REQUIRE(out.size() == 1);
    CHECK(out[0] == eb);
  }
  SUBCASE("port not inside") { CHECK_THROWS_AS(g.external_edges(l, {b.value}), GraphError); }
}

TEST_CASE("deletion cascades") {
  PortGraph g;
  NodeId n = g.add_node();
  PortId p = g.attach_port(n), q = g.attach_port(n);
  PortId o = g.attach_port(g.add_node());
  g.connect(p, o);
  g.connect(q, o);
  g.remove_node(n);
  CHECK(g.port_count() == 1);
  CHECK(g.edge_count() == 0);
  CHECK(g.port_degree(o) == 0);
  CHECK(g.audit().empty());
}

TEST_CASE("attribute values") {
  SUBCASE("integer and float compare numerically") {
    CHECK(AttrValue(2).compare(AttrValue(2.0)) == 0);
    CHECK(AttrValue(2).compare(AttrValue(2.5)) < 0);
  }
  SUBCASE("other cross-tag comparisons are errors") {
    CHECK_THROWS_AS((void)AttrValue(1).compare(AttrValue("1")), TypeMismatch);
    CHECK_THROWS_AS((void)AttrValue(true).compare(AttrValue(1)), TypeMismatch);
    CHECK_THROWS_AS((void)AttrValue("x").compare(AttrValue(false)), TypeMismatch);
  }
  SUBCASE("literals") {
    CHECK(AttrValue(3).to_literal() == "3");
    CHECK(AttrValue(3.0).to_literal() == "3.0");
    CHECK(AttrValue("a\"b").to_literal() == "\"a\\\"b\"");
    CHECK(AttrValue(false).to_literal() == "false");
  }
  SUBCASE("identical does not coerce") {
    CHECK_FALSE(AttrValue(1).identical(AttrValue(1.0)));
    CHECK(AttrValue("x").identical(AttrValue(std::string("x"))));
  }
}

// ---------------------------------------------------------------------------
// Properties over random mutation sequences
// ---------------------------------------------------------------------------

namespace {

AttrValue random_value(Rng& rng) {
  switch (rng.uniform_below(4)) {
    case 0: return static_cast<std::int64_t>(rng.next());
    case 1: return static_cast<double>(rng.uniform_below(1000)) / 8.0;
    case 2: return std::string(1 + rng.uniform_below(5), static_cast<char>('a' + rng.uniform_below(26)));
    default: return rng.uniform_below(2) == 1;
  }
}

}  // namespace

TEST_CASE("audit holds after random mutation sequences") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    PortGraph g;
    std::vector<NodeId> nodes;
    std::vector<PortId> ports;
    for (int step = 0; step < 200; ++step) {
      const auto op = rng.uniform_below(6);
      if (op == 0 || nodes.empty()) {
        nodes.push_back(g.add_node());
      } else if (op == 1) {
        NodeId n = nodes[rng.uniform_below(nodes.size())];
        if (g.contains(n)) ports.push_back(g.attach_port(n));
      } else if (op == 2 && ports.size() >= 2) {
        PortId a = ports[rng.uniform_below(ports.size())], b = ports[rng.uniform_below(ports.size())];
        if (a != b && g.contains(a) && g.contains(b) && !g.edge_between(a, b)) g.connect(a, b);
      } else if (op == 3 && g.edge_count() > 0) {
        auto it = g.edges().begin();
        std::advance(it, static_cast<long>(rng.uniform_below(g.edge_count())));
        g.disconnect(it->first);
      } else if (op == 4 && !ports.empty()) {
        PortId p = ports[rng.uniform_below(ports.size())];
        if (g.contains(p)) g.remove_port(p);
      } else if (op == 5) {
        NodeId n = nodes[rng.uniform_below(nodes.size())];
        if (g.contains(n)) g.remove_node(n);
      }
      REQUIRE(g.audit().empty());
    }
  }
}

TEST_CASE("connect then disconnect restores degrees") {
  Rng rng(7);
  PortGraph g;
  std::vector<PortId> ports;
  for (int i = 0; i < 10; ++i) ports.push_back(g.attach_port(g.add_node()));
  for (int i = 0; i < 15; ++i) {
    PortId a = ports[rng.uniform_below(10)], b = ports[rng.uniform_below(10)];
    if (a != b && !g.edge_between(a, b)) g.connect(a, b);
  }
  for (int i = 0; i < 100; ++i) {
    PortId a = ports[rng.uniform_below(10)], b = ports[rng.uniform_below(10)];
    if (a == b || g.edge_between(a, b)) continue;
    const auto da = g.port_degree(a), db = g.port_degree(b);
    EdgeId e = g.connect(a, b);
    g.disconnect(e);
    CHECK(g.port_degree(a) == da);
    CHECK(g.port_degree(b) == db);
  }
}

TEST_CASE("set_attr / get_attr round trip for every tag") {
  Rng rng(11);
  PortGraph g;
  NodeId n = g.add_node();
  PortId p = g.attach_port(n);
  EdgeId e = g.connect(p, g.attach_port(g.add_node()));
  for (int i = 0; i < 200; ++i) {
    AttrValue v = random_value(rng);
    const std::string k = "k" + std::to_string(rng.uniform_below(4));
    g.set_attr(n, k, v);
    g.set_attr(p, k, v);
    g.set_attr(e, k, v);
    CHECK(g.get_attr(n, k)->identical(v));
    CHECK(g.get_attr(p, k)->identical(v));
    CHECK(g.get_attr(e, k)->identical(v));
  }
}

TEST_CASE("copies hash identically; attribute changes move the hash") {
  PortGraph g;
  NodeId n = g.add_node({{"x", 1}});
  g.attach_port(n);
  PortGraph h = g;
  CHECK(g.canonical_text() == h.canonical_text());
  CHECK(g.structural_hash() == h.structural_hash());
  h.set_attr(n, "x", 2);
  CHECK(g.structural_hash() != h.structural_hash());
}
