#pragma once

// Text formats: schema files, FDPG DOT rendering, closure run manifests.
//
// Schema file grammar (UTF-8, one statement per line):
//   file  := { line '\n' }
//   line  := ws [ stmt ] ws [ '#' comment ]
//   stmt  := "attrs:" { ws name }           exactly once
//          | "fd:" ws names ws "->" ws name
//   names := name { ws ',' ws name }
//   name  := [A-Za-z_][A-Za-z0-9_]*

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fdpg/closure.hpp"
#include "fdpg/graph.hpp"
#include "fdpg/schema.hpp"

namespace fdpg {

class SchemaFileError : public std::runtime_error {
 public:
  SchemaFileError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

bool valid_attr_name(std::string_view s);

/// Syntax and canonical-form problems throw SchemaFileError (line 0 when no
/// single line is to blame). Cycles are not checked here.
Schema parse_schema_file(std::string_view text);
std::string format_schema_file(const Schema& s);
/// "fd: A,B -> C"
std::string fd_line(const FD& fd);

/// ATTR nodes as ellipses labelled by name, FD nodes as boxes labelled
/// "FD<i> (uid=<p>)" with i counting FD nodes in id order, edges ATTR -> FD
/// labelled LHS and FD -> ATTR labelled RHS.
std::string fdpg_to_dot(const PortGraph& g);

struct ManifestInput {
  std::string_view input_bytes;
  std::size_t input_fd_count = 0;
  const ClosureConfig* config = nullptr;
  const ClosureResult* result = nullptr;
  std::optional<double> wall_ms;  // omitted from the manifest when empty
};

/// JSON manifest; byte-identical for identical inputs when wall_ms is empty.
std::string run_manifest(const ManifestInput& in);

}  // namespace fdpg
