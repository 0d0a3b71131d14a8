#pragma once

// JSON rule files. Elements are addressed by file-local handles: the
// element's viewLabel when it is unique on its side, otherwise n1, p1, e1...
// by position.
//
//   { "name": "...",
//     "lhs": { "nodes": [ {"id": h, "attrs": {...}, "vars": [...],
//                          "ports": [ {"id": h, "attrs": {...}, "vars": [...]} ]} ],
//              "edges": [ {"id": h, "ends": [port, port], "attrs": {...}} ] },
//     "rhs": { ... },
//     "preserve": [[lhs, rhs], ...], "saturate": [port, ...],
//     "bridges": [[lhs port, rhs port], ...],
//     "where": "condition text",
//     "update": ["Handle.attr = expr", ...], "recount": ["Port.attr", ...],
//     "locate": {"M": [...], "N": [...]} }

#include <stdexcept>
#include <string>

#include "fdpg/rewrite.hpp"

namespace fdpg {

class RuleFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string save_rule(const Rule& r);
/// Throws RuleFormatError (also for malformed JSON) or cond::SyntaxError.
Rule load_rule(const std::string& text);

}  // namespace fdpg
