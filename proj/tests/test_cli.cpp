#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fdpg/io.hpp"
#include "fdpg/oracle.hpp"
#include "fdpg/strategy.hpp"
#include "support/schema_gen.hpp"

namespace fs = std::filesystem;
using namespace fdpg;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" FDPG_BIN "' " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("fdpg_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
  std::string read(const std::string& name) const {
    std::ifstream in(path / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

const char* kChain = "attrs: A B C\nfd: A -> B\nfd: B -> C\n";

}  // namespace

TEST_CASE("closure prints derived dependencies") {
  TempDir t;
  const std::string f = t.write("chain.fds", kChain);
  Run r = run("closure " + f);
  CHECK(r.code == 0);
  CHECK(r.out == "fd: A -> C\n");

  Run join = run("closure " + t.write("join.fds", "attrs: A B C D\nfd: A -> B\nfd: A -> C\nfd: B,C -> D\n"));
  CHECK(join.out == "fd: A -> D\n");
  CHECK(run("closure " + t.write("none.fds", "attrs: A B\n")).out.empty());
}

TEST_CASE("exit codes") {
  TempDir t;
  CHECK(run("validate " + t.write("ok.fds", kChain)).code == 0);
  CHECK(run("validate " + (t.path / "missing.fds").string()).code == 1);
  CHECK(run("validate " + t.write("bad.fds", "attrs: A\nfd: A B\n")).code == 2);
  CHECK(run("closure " + t.write("cyc.fds", "attrs: A B\nfd: A -> B\nfd: B -> A\n")).code == 3);
  CHECK(run("validate " + (t.path / "cyc.fds").string()).code == 3);
  Run aborted = run("closure --max-steps 1 " + t.write("long.fds", "attrs: A B C D\nfd: A -> B\nfd: B -> C\nfd: C -> D\n"));
  CHECK(aborted.code == 4);
  CHECK(run("closure " + (t.path / "ok.fds").string() + " --max-arity 0").code != 0);
}

TEST_CASE("output appended to the input closes it") {
  TempDir t;
  for (const auto& s : testing::corpus(17, 12, {6, 8, 3})) {
    const std::string text = format_schema_file(s);
    Run first = run("closure " + t.write("in.fds", text));
    REQUIRE(first.code == 0);
    Run second = run("closure " + t.write("closed.fds", text + first.out));
    CHECK(second.code == 0);
    CHECK(second.out.empty());
    Schema closed = parse_schema_file(text + first.out);
    CHECK(oracle::to_set(closed.fds) == oracle::tu_fixpoint(oracle::to_set(s.fds)));
  }
}

TEST_CASE("seeds") {
  TempDir t;
  const std::string f =
      t.write("s.fds", "attrs: A B C D E\nfd: A -> B\nfd: A -> C\nfd: B,C -> D\nfd: D -> E\nfd: B -> E\n");
  Run a = run("closure " + f + " --seed 1");
  Run b = run("closure " + f + " --seed 2");
  Run c = run("closure " + f, "FDPG_SEED=1");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);

  const std::string m1 = (t.path / "m1.json").string(), m2 = (t.path / "m2.json").string();
  run("closure " + f + " --seed 9 --json " + m1);
  run("closure " + f + " --json " + m2, "FDPG_SEED=9");
  CHECK(t.read("m1.json") == t.read("m2.json"));
  CHECK(t.read("m1.json").find("\"seed\": 9") != std::string::npos);
}

TEST_CASE("trace and export") {
  TempDir t;
  const std::string f = t.write("chain.fds", kChain);
  const std::string trace = (t.path / "trace.dot").string();
  REQUIRE(run("closure " + f + " --trace " + trace).code == 0);
  const std::string dot = t.read("trace.dot");
  CHECK(dot.rfind("digraph derivation", 0) == 0);
  CHECK(dot.find("Transitivity_1") != std::string::npos);
  // a chain: one fewer edge than nodes
  std::size_t nodes = 0, edges = 0;
  std::istringstream lines(dot);
  for (std::string l; std::getline(lines, l);) {
    if (l.find("[label=") != std::string::npos) ++nodes;
    if (l.find(" -> ") != std::string::npos) ++edges;
  }
  CHECK(edges + 1 == nodes);

  Run exp = run("export " + t.write("ac.fds", "attrs: A C\nfd: A -> C\n") + " --format dot");
  CHECK(exp.code == 0);
  CHECK(exp.out.find("FD1 (uid=2)") != std::string::npos);
}

TEST_CASE("rule commands") {
  TempDir t;
  Run one = run("rules --arity 2 --name Transitivity_2");
  REQUIRE(one.code == 0);
  CHECK(one.out.find("\"name\": \"Transitivity_2\"") != std::string::npos);
  CHECK(run("check-rule " + t.write("t2.json", one.out)).code == 0);
  CHECK(run("check-rule " + t.write("broken.json", "{\"name\": 1}")).code == 2);
}
