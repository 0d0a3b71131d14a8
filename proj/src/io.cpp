#include "fdpg/io.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "fdpg/fdpg.hpp"

namespace fdpg {

bool valid_attr_name(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!alpha(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(), [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string checked_name(std::string_view raw, std::size_t line) {
  std::string_view n = trim(raw);
  if (!valid_attr_name(n)) throw SchemaFileError(line, "invalid attribute name '" + std::string(n) + "'");
  return std::string(n);
}

}  // namespace

Schema parse_schema_file(std::string_view text) {
  Schema s;
  std::optional<std::size_t> attrs_line;
  std::vector<std::size_t> fd_lines;
  std::size_t lineno = 0;

  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.rfind("attrs:", 0) == 0) {
      if (attrs_line) throw SchemaFileError(lineno, "second attrs: line (first on line " + std::to_string(*attrs_line) + ")");
      attrs_line = lineno;
      std::istringstream names{std::string(line.substr(6))};
      std::set<std::string> seen;
      for (std::string n; names >> n;) {
        n = checked_name(n, lineno);
        if (!seen.insert(n).second) throw SchemaFileError(lineno, "attribute '" + n + "' listed twice");
        s.attributes.push_back(n);
      }
    } else if (line.rfind("fd:", 0) == 0) {
      std::string_view body = line.substr(3);
      const auto arrow = body.find("->");
      if (arrow == std::string_view::npos) throw SchemaFileError(lineno, "expected 'LHS -> RHS'");
      FD fd;
      fd.rhs = checked_name(body.substr(arrow + 2), lineno);
      std::string_view lhs = body.substr(0, arrow);
      for (;;) {
        const auto comma = lhs.find(',');
        std::string n = checked_name(lhs.substr(0, comma), lineno);
        if (!fd.lhs.insert(n).second) throw SchemaFileError(lineno, "'" + n + "' repeated on the left side");
        if (comma == std::string_view::npos) break;
        lhs = lhs.substr(comma + 1);
      }
      if (fd.lhs.count(fd.rhs)) throw SchemaFileError(lineno, "'" + fd.rhs + "' on both sides (not canonical)");
      if (std::find(s.fds.begin(), s.fds.end(), fd) != s.fds.end())
        throw SchemaFileError(lineno, "duplicate dependency " + to_string(fd));
      s.fds.push_back(std::move(fd));
      fd_lines.push_back(lineno);
    } else {
      throw SchemaFileError(lineno, "expected 'attrs:' or 'fd:'");
    }
  }

  if (!attrs_line) throw SchemaFileError(0, "missing attrs: line");
  std::set<std::string> known(s.attributes.begin(), s.attributes.end());
  for (std::size_t i = 0; i < s.fds.size(); ++i) {
    std::vector<std::string> names(s.fds[i].lhs.begin(), s.fds[i].lhs.end());
    names.push_back(s.fds[i].rhs);
    for (const auto& n : names)
      if (!known.count(n)) throw SchemaFileError(fd_lines[i], "unknown attribute '" + n + "'");
  }
  return s;
}

std::string fd_line(const FD& fd) { return "fd: " + to_string(fd); }

std::string format_schema_file(const Schema& s) {
  std::string out = "attrs:";
  for (const auto& a : s.attributes) out += " " + a;
  out += "\n";
  for (const auto& fd : s.fds) out += fd_line(fd) + "\n";
  return out;
}

std::string fdpg_to_dot(const PortGraph& g) {
  auto text = [&](const Record& r, const char* k) -> std::string {
    auto it = r.find(k);
    return it != r.end() && it->second.tag() == AttrTag::Text ? it->second.as_text() : "";
  };
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out;
  };

  std::ostringstream os;
  os << "digraph fdpg {\n  rankdir=LR;\n";
  std::size_t fd_index = 0;
  for (const auto& [id, n] : g.nodes()) {
    const std::string role = text(n.attrs, key::kRelDbType);
    if (role == role::kFd) {
      auto uid = n.attrs.find(key::kUid);
      os << "  n" << id.value << " [shape=box, label=\"FD" << ++fd_index << " (uid="
         << (uid != n.attrs.end() ? uid->second.to_literal() : "?") << ")\"];\n";
    } else {
      os << "  n" << id.value << " [shape=ellipse, label=\"" << escape(text(n.attrs, key::kViewLabel)) << "\"];\n";
    }
  }
  for (const auto& [id, e] : g.edges()) {
    PortId fd_port = e.first, attr_port = e.second;
    if (text(g.attrs(fd_port), key::kRelDbType) == role::kPortFd) std::swap(fd_port, attr_port);
    const NodeId fd = g.owner(fd_port), attr = g.owner(attr_port);
    if (text(g.attrs(fd_port), key::kRelDbType) == role::kRhs)
      os << "  n" << fd.value << " -> n" << attr.value << " [label=\"RHS\"];\n";
    else
      os << "  n" << attr.value << " -> n" << fd.value << " [label=\"LHS\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string run_manifest(const ManifestInput& in) {
  using Json = nlohmann::ordered_json;
  const ClosureConfig& cfg = *in.config;
  const ClosureResult& r = *in.result;

  char digest[32];
  std::snprintf(digest, sizeof digest, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(in.input_bytes)));

  Json j;
  j["input_digest"] = digest;
  j["seed"] = cfg.seed;
  Json c;
  c["max_arity"] = cfg.max_arity ? Json(*cfg.max_arity) : Json("auto");
  c["outer_fixpoint"] = cfg.outer_fixpoint;
  c["max_steps"] = cfg.max_steps;
  j["config"] = std::move(c);
  j["fd_count_before"] = in.input_fd_count;
  j["fd_count_after"] = r.schema_out.fds.size();
  Json fds = Json::array();
  for (const auto& d : r.new_fds) {
    Json x;
    x["fd"] = to_string(d.fd);
    x["uid_product"] = d.uid;
    Json cons = Json::array();
    for (const auto& f : d.constituents) cons.push_back(to_string(f));
    x["constituents"] = std::move(cons);
    fds.push_back(std::move(x));
  }
  j["new_fds"] = std::move(fds);
  j["steps"] = r.steps;
  j["sweeps"] = r.sweeps;
  j["outcome"] = std::string(to_string(r.outcome));
  if (in.wall_ms) j["wall_time_ms"] = *in.wall_ms;
  return j.dump(2) + "\n";
}

}  // namespace fdpg
