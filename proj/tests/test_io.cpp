#include <doctest.h>

#include "fdpg/closure.hpp"
#include "fdpg/io.hpp"
#include "fdpg/rule_io.hpp"
#include "support/schema_gen.hpp"

using namespace fdpg;

namespace {

FD fd(std::set<std::string> lhs, std::string rhs) { return FD{std::move(lhs), std::move(rhs)}; }

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::size_t error_line(const std::string& text) {
  try {
    parse_schema_file(text);
  } catch (const SchemaFileError& e) {
    return e.line();
  }
  FAIL("no error for: " << text);
  return 0;
}

}  // namespace

TEST_CASE("schema files") {
  SUBCASE("comments, blanks and whitespace") {
    Schema s = parse_schema_file("# a chain\nattrs: A B  C\n\n  fd: A -> B   # first\nfd:B->C\nfd: A , B -> C\n");
    CHECK(s.attributes == std::vector<std::string>{"A", "B", "C"});
    CHECK(s.fds == std::vector<FD>{fd({"A"}, "B"), fd({"B"}, "C"), fd({"A", "B"}, "C")});
  }
  SUBCASE("attrs may come after the fds") {
    Schema s = parse_schema_file("fd: x_1 -> Y\nattrs: x_1 Y\n");
    CHECK(s.fds.size() == 1);
  }
  SUBCASE("errors carry the offending line") {
    CHECK(error_line("attrs: A\nattrs: B\n") == 2);
    CHECK(error_line("attrs: A A\n") == 1);
    CHECK(error_line("attrs: A B\nfd: A B\n") == 2);
    CHECK(error_line("attrs: A B\n\nfd: A,A -> B\n") == 3);
    CHECK(error_line("attrs: A B\nfd: A -> A\n") == 2);
    CHECK(error_line("attrs: A B\nfd: A -> B\nfd: A -> B\n") == 3);
    CHECK(error_line("attrs: A B\nfd: A -> Z\n") == 2);
    CHECK(error_line("attrs: A 9B\n") == 1);
    CHECK(error_line("attrs: A\nfd: -> A\n") == 2);
    CHECK(error_line("attrs: A\nhello\n") == 2);
    CHECK(error_line("fd: A -> B\n") == 0);
    CHECK(error_line("") == 0);
  }
  SUBCASE("cycles parse; they are rejected later") {
    Schema s = parse_schema_file("attrs: A B\nfd: A -> B\nfd: B -> A\n");
    CHECK_THROWS_AS(build_fdpg(s), CyclicSchemaError);
  }
  SUBCASE("names") {
    CHECK(valid_attr_name("_a9"));
    CHECK_FALSE(valid_attr_name(""));
    CHECK_FALSE(valid_attr_name("a-b"));
  }
}

TEST_CASE("schema files round trip") {
  for (const auto& s : testing::corpus(31, 100, {8, 10, 3})) {
    const std::string text = format_schema_file(s);
    Schema back = parse_schema_file(text);
    CHECK(back.attributes == s.attributes);
    CHECK(back.fds == s.fds);
    CHECK(format_schema_file(back) == text);
  }
  CHECK(fd_line(fd({"B", "A"}, "C")) == "fd: A,B -> C");
}

TEST_CASE("FDPG DOT rendering") {
  auto [g, b] = build_fdpg({{"A", "C"}, {fd({"A"}, "C")}});
  const std::string dot = fdpg_to_dot(g);
  CHECK(count(dot, "[shape=") == 3);
  CHECK(count(dot, "shape=box") == 1);
  CHECK(count(dot, " -> ") == 2);
  CHECK(dot.find("label=\"FD1 (uid=2)\"") != std::string::npos);
  CHECK(dot.find("[label=\"LHS\"]") != std::string::npos);
  CHECK(dot.find("[label=\"RHS\"]") != std::string::npos);
  CHECK(fdpg_to_dot(build_fdpg({{"A", "C"}, {fd({"A"}, "C")}}).first) == dot);

  auto [e, eb] = build_fdpg({{"A", "B"}, {}});
  const std::string empty = fdpg_to_dot(e);
  CHECK(count(empty, "shape=ellipse") == 2);
  CHECK(count(empty, " -> ") == 0);

  for (const auto& s : testing::corpus(8, 30, {6, 8, 3})) {
    auto [h, hb] = build_fdpg(s);
    std::size_t edges = s.fds.size();
    for (const auto& f : s.fds) edges += f.lhs.size();
    const std::string d = fdpg_to_dot(h);
    CHECK(count(d, "[shape=") == s.attributes.size() + s.fds.size());
    CHECK(count(d, " -> ") == edges);
  }
}

TEST_CASE("run manifests") {
  const std::string input = "attrs: A B C\nfd: A -> B\nfd: B -> C\n";
  Schema s = parse_schema_file(input);
  ClosureConfig cfg;
  cfg.seed = 11;
  auto run = [&] {
    auto r = transitive_closure(s, cfg);
    return run_manifest({input, s.fds.size(), &cfg, &r, std::nullopt});
  };
  const std::string m = run();
  CHECK(m == run());
  CHECK(m.find("\"input_digest\": \"fnv1a64:") != std::string::npos);
  CHECK(m.find("\"max_arity\": \"auto\"") != std::string::npos);
  CHECK(m.find("\"fd\": \"A -> C\"") != std::string::npos);
  CHECK(m.find("\"uid_product\": 6") != std::string::npos);
  CHECK(m.find("\"outcome\": \"success\"") != std::string::npos);
  CHECK(m.find("wall_time_ms") == std::string::npos);

  auto r = transitive_closure(s, cfg);
  CHECK(run_manifest({input, s.fds.size(), &cfg, &r, 1.5}).find("\"wall_time_ms\"") != std::string::npos);
  const std::string other = "attrs: A B C\nfd: A -> B\nfd: B -> C\n\n";
  CHECK(run_manifest({other, s.fds.size(), &cfg, &r, std::nullopt}) != m);
}

TEST_CASE("rule files") {
  RuleSet rules = closure_rules(3);
  auto [g, b] = build_fdpg({{"A", "B", "C", "D"}, {fd({"A"}, "B"), fd({"A"}, "C"), fd({"B", "C"}, "D"), fd({"B"}, "C")}});

  for (const auto& [name, r] : rules) {
    CAPTURE(name);
    const std::string text = save_rule(r);
    Rule back = load_rule(text);
    CHECK(back.name == r.name);
    CHECK(save_rule(back) == text);
    CHECK(validate_rule(back).ok());

    // the loaded rule behaves like the generated one
    PortGraph host = g;
    for (const char* pre : {"IterOn", "IterOn"}) {
      auto ms = find_matches(host, rules.at(pre));
      if (!ms.empty()) {
        Rng rng(0);
        apply_in_place(host, rules.at(pre), ms.back(), rng);
      }
    }
    // left ids may be numbered differently after loading, so compare by image
    auto by_image = [&](const Rule& rule) {
      std::map<std::set<std::uint64_t>, std::string> out;
      for (const auto& m : find_matches(host, rule)) {
        PortGraph x = host;
        Rng rng(5);
        apply_in_place(x, rule, m, rng);
        out.emplace(m.image(), x.canonical_text());
      }
      return out;
    };
    CHECK(by_image(r) == by_image(back));
  }

  CHECK_THROWS_AS(load_rule("{"), RuleFormatError);
  CHECK_THROWS_AS(load_rule("[]"), RuleFormatError);
  CHECK_THROWS_AS(load_rule(R"({"lhs": {}, "rhs": {}})"), RuleFormatError);
  CHECK_THROWS_AS(load_rule(R"({"name": "x", "lhs": {"nodes": []}, "rhs": {"nodes": []}, "saturate": ["nope"]})"),
                  RuleFormatError);
  CHECK_THROWS(load_rule(R"({"name": "x", "lhs": {"nodes": []}, "rhs": {"nodes": []}, "where": "1 +"})"));
}
