// fdpg: validate schema files, run the transitive closure, export graphs.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fdpg/closure.hpp"
#include "fdpg/fdpg.hpp"
#include "fdpg/io.hpp"
#include "fdpg/rule_io.hpp"

namespace {

enum Exit : int { kOk = 0, kIo = 1, kParse = 2, kCyclic = 3, kAbort = 4 };

struct Failure {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIo, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!(out << text)) throw Failure{kIo, "cannot write " + path};
}

// Parses and checks a schema; cycles map to their own exit code.
fdpg::Schema load_schema(const std::string& path, const std::string& bytes) {
  fdpg::Schema s;
  try {
    s = fdpg::parse_schema_file(bytes);
  } catch (const fdpg::SchemaFileError& e) {
    throw Failure{kParse, path + ":" + e.what()};
  }
  if (auto problems = fdpg::schema_problems(s); !problems.empty()) throw Failure{kParse, path + ": " + problems.front()};
  if (auto cycle = fdpg::detect_cycles(s)) {
    std::string msg = path + ": cyclic dependencies:";
    for (const auto& a : cycle->attributes) msg += " " + a + " ->";
    throw Failure{kCyclic, msg + " " + cycle->attributes.front()};
  }
  return s;
}

int cmd_validate(const std::string& path) {
  const auto s = load_schema(path, read_file(path));
  auto [g, bind] = fdpg::build_fdpg(s);
  auto report = fdpg::validate_fdpg(g);
  if (!report.ok()) throw Failure{kParse, report.str()};
  std::cerr << path << ": ok (" << s.attributes.size() << " attributes, " << s.fds.size() << " dependencies)\n";
  return kOk;
}

struct ClosureOpts {
  std::string path;
  std::uint64_t seed = 0;
  std::string max_arity = "auto";
  bool no_fixpoint = false;
  std::string trace;
  std::string json;
  bool timing = false;
  std::size_t max_steps = 1'000'000;
};

int cmd_closure(const ClosureOpts& o) {
  const std::string bytes = read_file(o.path);
  const auto s = load_schema(o.path, bytes);

  fdpg::ClosureConfig cfg;
  cfg.seed = o.seed;
  cfg.outer_fixpoint = !o.no_fixpoint;
  cfg.record_trace = !o.trace.empty();
  cfg.max_steps = o.max_steps;
  if (o.max_arity != "auto") {
    std::size_t k = 0;
    try {
      std::size_t used = 0;
      k = std::stoul(o.max_arity, &used);
      if (used != o.max_arity.size()) k = 0;
    } catch (const std::exception&) {
    }
    if (k == 0) throw Failure{kParse, "--max-arity expects a positive integer or 'auto'"};
    cfg.max_arity = k;
  }

  const auto t0 = std::chrono::steady_clock::now();
  fdpg::ClosureResult r;
  try {
    r = fdpg::transitive_closure(s, cfg);
  } catch (const fdpg::cond::EvalError& e) {
    throw Failure{kAbort, std::string("closure stopped: ") + e.what()};
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  if (r.trace) write_file(o.trace, fdpg::export_derivation(*r.trace, fdpg::ExportFormat::Dot));
  if (!o.json.empty()) {
    fdpg::ManifestInput m{bytes, s.fds.size(), &cfg, &r, std::nullopt};
    if (o.timing) m.wall_ms = ms;
    write_file(o.json, fdpg::run_manifest(m));
  }
  if (r.outcome == fdpg::Outcome::Aborted) throw Failure{kAbort, "closure aborted: step bound reached"};

  for (const auto& d : r.new_fds) std::cout << fdpg::fd_line(d.fd) << "\n";
  std::cerr << r.new_fds.size() << " derived, " << r.steps << " steps, " << r.sweeps << " sweeps";
  if (o.timing) std::cerr << ", " << ms << " ms";
  std::cerr << "\n";
  return kOk;
}

int cmd_export(const std::string& path, const std::string& format) {
  if (format != "dot") throw Failure{kParse, "unsupported export format '" + format + "'"};
  const auto s = load_schema(path, read_file(path));
  auto [g, bind] = fdpg::build_fdpg(s);
  std::cout << fdpg::fdpg_to_dot(g);
  return kOk;
}

int cmd_rules(std::size_t arity, const std::string& only) {
  auto rules = fdpg::closure_rules(arity);
  bool any = false;
  for (const auto& [name, r] : rules) {
    if (!only.empty() && name != only) continue;
    std::cout << fdpg::save_rule(r);
    any = true;
  }
  if (!any) throw Failure{kParse, "no generated rule named '" + only + "'"};
  return kOk;
}

int cmd_check_rule(const std::string& path) {
  fdpg::Rule r;
  try {
    r = fdpg::load_rule(read_file(path));
  } catch (const fdpg::RuleFormatError& e) {
    throw Failure{kParse, path + ": " + e.what()};
  } catch (const fdpg::cond::SyntaxError& e) {
    throw Failure{kParse, path + ": condition: " + e.what()};
  }
  auto report = fdpg::validate_rule(r);
  if (!report.ok()) throw Failure{kParse, path + ":\n" + report.str()};
  std::cerr << path << ": rule " << r.name << " ok\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional dependency closure by port graph rewriting"};
  app.require_subcommand(1);

  std::string path;
  auto* validate = app.add_subcommand("validate", "Check a schema file (syntax, canonical form, acyclicity)");
  validate->add_option("file", path, "Schema file")->required();

  ClosureOpts co;
  auto* closure = app.add_subcommand("closure", "Print the dependencies derived by the closure strategy");
  closure->add_option("file", co.path, "Schema file")->required();
  closure->add_option("--seed", co.seed, "Seed for match selection")->envname("FDPG_SEED");
  closure->add_option("--max-arity", co.max_arity, "Largest Transitivity_k arity, or 'auto'");
  closure->add_flag("--no-fixpoint", co.no_fixpoint, "Run a single sweep of arity passes");
  closure->add_option("--trace", co.trace, "Write the derivation tree as DOT");
  closure->add_option("--json", co.json, "Write a JSON run manifest");
  closure->add_flag("--timing", co.timing, "Report wall time (also recorded in the manifest)");
  closure->add_option("--max-steps", co.max_steps, "Step bound per arity pass")->check(CLI::PositiveNumber);

  std::string format = "dot";
  auto* exp = app.add_subcommand("export", "Render the schema's port graph");
  exp->add_option("file", path, "Schema file")->required();
  exp->add_option("--format", format, "Output format (dot)");

  std::size_t arity = 2;
  std::string only;
  auto* rules = app.add_subcommand("rules", "Print the generated closure rules as JSON");
  rules->add_option("--arity", arity, "Generate Transitivity_1..k")->check(CLI::PositiveNumber);
  rules->add_option("--name", only, "Print only this rule");

  auto* check = app.add_subcommand("check-rule", "Load and validate a JSON rule file");
  check->add_option("file", path, "Rule file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(path);
    if (*closure) return cmd_closure(co);
    if (*exp) return cmd_export(path, format);
    if (*rules) return cmd_rules(arity, only);
    if (*check) return cmd_check_rule(path);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  }
  return kOk;
}
