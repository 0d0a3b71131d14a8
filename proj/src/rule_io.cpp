#include "fdpg/rule_io.hpp"

#include <json.hpp>

namespace fdpg {

using Json = nlohmann::ordered_json;

namespace {

Json value_json(const AttrValue& v) {
  switch (v.tag()) {
    case AttrTag::Integer: return v.as_int();
    case AttrTag::Float: return v.as_float();
    case AttrTag::Text: return v.as_text();
    case AttrTag::Boolean: return v.as_bool();
  }
  return nullptr;
}

AttrValue json_value(const Json& j, const std::string& where) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw RuleFormatError(where + ": attribute values must be integers, floats, strings or booleans");
}

Json record_json(const Record& r) {
  Json j = Json::object();
  for (const auto& [k, v] : r) j[k] = value_json(v);
  return j;
}

Record json_record(const Json& j, const std::string& where) {
  Record r;
  if (j.is_null()) return r;
  if (!j.is_object()) throw RuleFormatError(where + ": attrs must be an object");
  for (const auto& [k, v] : j.items()) r[k] = json_value(v, where + "." + k);
  return r;
}

// Handle assignment for one side.
std::map<std::uint64_t, std::string> handles(const PortGraph& g) {
  std::map<std::string, int> seen;
  auto label = [](const Record& r) -> std::string {
    auto it = r.find("viewLabel");
    return it != r.end() && it->second.tag() == AttrTag::Text ? it->second.as_text() : "";
  };
  for (const auto& [id, n] : g.nodes()) ++seen[label(n.attrs)];
  for (const auto& [id, p] : g.ports()) ++seen[label(p.attrs)];

  std::map<std::uint64_t, std::string> out;
  std::size_t ni = 0, pi = 0, ei = 0;
  auto pick = [&](const std::string& l, char prefix, std::size_t& counter) {
    ++counter;
    if (!l.empty() && seen[l] == 1) return l;
    return prefix + std::to_string(counter);
  };
  for (const auto& [id, n] : g.nodes()) out[id.value] = pick(label(n.attrs), 'n', ni);
  for (const auto& [id, p] : g.ports()) out[id.value] = pick(label(p.attrs), 'p', pi);
  for (const auto& [id, e] : g.edges()) out[id.value] = "e" + std::to_string(++ei);
  // A label that looks like a generated handle could collide with one.
  std::set<std::string> used;
  for (const auto& [id, h] : out)
    if (!used.insert(h).second) throw RuleFormatError("handle '" + h + "' is ambiguous; relabel the element");
  return out;
}

Json vars_json(const Rule& r, std::uint64_t id) {
  Json a = Json::array();
  if (auto it = r.lhs_variables.find(id); it != r.lhs_variables.end())
    for (const auto& v : it->second) a.push_back(v);
  return a;
}

Json graph_json(const PortGraph& g, const std::map<std::uint64_t, std::string>& h, const Rule* vars) {
  Json nodes = Json::array();
  for (const auto& [id, n] : g.nodes()) {
    Json jn;
    jn["id"] = h.at(id.value);
    jn["attrs"] = record_json(n.attrs);
    if (vars) jn["vars"] = vars_json(*vars, id.value);
    Json ports = Json::array();
    for (PortId p : n.ports) {
      Json jp;
      jp["id"] = h.at(p.value);
      jp["attrs"] = record_json(g.attrs(p));
      if (vars) jp["vars"] = vars_json(*vars, p.value);
      ports.push_back(std::move(jp));
    }
    jn["ports"] = std::move(ports);
    nodes.push_back(std::move(jn));
  }
  Json edges = Json::array();
  for (const auto& [id, e] : g.edges()) {
    Json je;
    je["id"] = h.at(id.value);
    je["ends"] = Json::array({h.at(e.first.value), h.at(e.second.value)});
    je["attrs"] = record_json(e.attrs);
    edges.push_back(std::move(je));
  }
  Json j;
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  return j;
}

struct Side {
  PortGraph graph;
  std::map<std::string, std::uint64_t> ids;

  std::uint64_t at(const std::string& h, const std::string& side) const {
    auto it = ids.find(h);
    if (it == ids.end()) throw RuleFormatError("unknown " + side + " handle '" + h + "'");
    return it->second;
  }
};

std::string str(const Json& j, const std::string& where) {
  if (!j.is_string()) throw RuleFormatError(where + " must be a string");
  return j.get<std::string>();
}

const Json& array_at(const Json& j, const char* k) {
  static const Json empty = Json::array();
  if (!j.contains(k)) return empty;
  if (!j.at(k).is_array()) throw RuleFormatError(std::string(k) + " must be an array");
  return j.at(k);
}

Side load_side(const Json& j, const std::string& side, std::map<std::uint64_t, std::set<std::string>>* vars) {
  if (!j.is_object()) throw RuleFormatError(side + " must be an object");
  Side s;
  auto bind = [&](const std::string& h, std::uint64_t id) {
    if (!s.ids.emplace(h, id).second) throw RuleFormatError("duplicate " + side + " handle '" + h + "'");
  };
  auto read_vars = [&](const Json& e, std::uint64_t id) {
    if (!e.contains("vars")) return;
    if (!vars) throw RuleFormatError(side + " elements cannot declare vars");
    for (const auto& v : array_at(e, "vars")) (*vars)[id].insert(str(v, side + " var"));
  };
  for (const auto& jn : array_at(j, "nodes")) {
    const std::string h = str(jn.value("id", Json()), side + " node id");
    NodeId n = s.graph.add_node(json_record(jn.value("attrs", Json()), h));
    bind(h, n.value);
    read_vars(jn, n.value);
    for (const auto& jp : array_at(jn, "ports")) {
      const std::string ph = str(jp.value("id", Json()), side + " port id");
      PortId p = s.graph.attach_port(n, json_record(jp.value("attrs", Json()), ph));
      bind(ph, p.value);
      read_vars(jp, p.value);
    }
  }
  for (const auto& je : array_at(j, "edges")) {
    const std::string h = str(je.value("id", Json()), side + " edge id");
    const Json& ends = je.value("ends", Json());
    if (!ends.is_array() || ends.size() != 2) throw RuleFormatError(h + ": ends must list two ports");
    auto port = [&](const Json& x) {
      std::uint64_t id = s.at(str(x, h + " end"), side);
      if (s.graph.kind_of(id) != ElementKind::Port) throw RuleFormatError(h + ": edge ends must be ports");
      return PortId{id};
    };
    try {
      EdgeId e = s.graph.connect(port(ends[0]), port(ends[1]), json_record(je.value("attrs", Json()), h));
      bind(h, e.value);
    } catch (const GraphError& err) {
      throw RuleFormatError(h + ": " + err.what());
    }
  }
  return s;
}

PortId port_of(const Side& s, const std::string& h, const std::string& side) {
  std::uint64_t id = s.at(h, side);
  if (s.graph.kind_of(id) != ElementKind::Port) throw RuleFormatError("'" + h + "' is not a " + side + " port");
  return PortId{id};
}

// "Handle.attr" split at the last dot.
std::pair<std::string, std::string> target(const std::string& text, const std::string& where) {
  auto b = text.find_first_not_of(" \t");
  auto e = text.find_last_not_of(" \t");
  std::string t = b == std::string::npos ? "" : text.substr(b, e - b + 1);
  auto dot = t.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == t.size())
    throw RuleFormatError(where + ": expected Handle.attr, got '" + text + "'");
  return {t.substr(0, dot), t.substr(dot + 1)};
}

}  // namespace

std::string save_rule(const Rule& r) {
  auto hl = handles(r.lhs);
  auto hr = handles(r.rhs);
  Json j;
  j["name"] = r.name;
  j["lhs"] = graph_json(r.lhs, hl, &r);
  j["rhs"] = graph_json(r.rhs, hr, nullptr);
  Json pres = Json::array();
  // Declaration order (nodes, ports, edges) so a reloaded rule saves identically.
  auto keep = [&](std::uint64_t a) {
    if (auto it = r.preserved.find(a); it != r.preserved.end()) pres.push_back(Json::array({hl.at(a), hr.at(it->second)}));
  };
  for (const auto& [id, n] : r.lhs.nodes()) keep(id.value);
  for (const auto& [id, p] : r.lhs.ports()) keep(id.value);
  for (const auto& [id, e] : r.lhs.edges()) keep(id.value);
  j["preserve"] = std::move(pres);
  Json sat = Json::array();
  for (PortId p : r.saturated) sat.push_back(hl.at(p.value));
  j["saturate"] = std::move(sat);
  Json br = Json::array();
  for (const auto& b : r.bridges) br.push_back(Json::array({hl.at(b.from.value), hr.at(b.to.value)}));
  j["bridges"] = std::move(br);
  j["where"] = cond::pretty_print(r.condition);
  Json up = Json::array();
  for (const auto& u : r.updates) up.push_back(hr.at(u.target) + "." + u.attr + " = " + cond::pretty_print(*u.expr));
  j["update"] = std::move(up);
  Json rc = Json::array();
  for (const auto& c : r.recounts) rc.push_back(hr.at(c.port.value) + "." + c.attr);
  j["recount"] = std::move(rc);
  Json m = Json::array(), n = Json::array();
  for (auto id : r.locate_m) m.push_back(hr.at(id));
  for (auto id : r.locate_n) n.push_back(hr.at(id));
  j["locate"] = {{"M", std::move(m)}, {"N", std::move(n)}};
  return j.dump(2) + "\n";
}

namespace {

Rule load_rule_unchecked(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw RuleFormatError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw RuleFormatError("a rule file holds one JSON object");

  Rule r;
  r.name = str(j.value("name", Json()), "name");
  Side L = load_side(j.value("lhs", Json::object()), "lhs", &r.lhs_variables);
  Side R = load_side(j.value("rhs", Json::object()), "rhs", nullptr);

  for (const auto& p : array_at(j, "preserve")) {
    if (!p.is_array() || p.size() != 2) throw RuleFormatError("preserve entries are [lhs, rhs] pairs");
    r.preserved[L.at(str(p[0], "preserve"), "lhs")] = R.at(str(p[1], "preserve"), "rhs");
  }
  for (const auto& s : array_at(j, "saturate")) r.saturated.insert(port_of(L, str(s, "saturate"), "lhs"));
  for (const auto& b : array_at(j, "bridges")) {
    if (!b.is_array() || b.size() != 2) throw RuleFormatError("bridges are [lhs port, rhs port] pairs");
    r.bridges.push_back({port_of(L, str(b[0], "bridge"), "lhs"), port_of(R, str(b[1], "bridge"), "rhs")});
  }
  if (j.contains("where")) r.condition = cond::parse(str(j.at("where"), "where"));
  for (const auto& u : array_at(j, "update")) {
    const std::string line = str(u, "update");
    std::size_t eq = std::string::npos;
    for (std::size_t i = 0; i < line.size(); ++i)
      if (line[i] == '=' && (i + 1 == line.size() || line[i + 1] != '=') && (i == 0 || line[i - 1] != '=')) {
        eq = i;
        break;
      }
    if (eq == std::string::npos) throw RuleFormatError("update '" + line + "' has no '='");
    auto [h, attr] = target(line.substr(0, eq), "update");
    r.updates.push_back({R.at(h, "rhs"), attr, cond::parse_expression(line.substr(eq + 1))});
  }
  for (const auto& c : array_at(j, "recount")) {
    auto [h, attr] = target(str(c, "recount"), "recount");
    r.recounts.push_back({port_of(R, h, "rhs"), attr});
  }
  if (j.contains("locate")) {
    const Json& loc = j.at("locate");
    for (const auto& x : array_at(loc, "M")) r.locate_m.insert(R.at(str(x, "locate"), "rhs"));
    for (const auto& x : array_at(loc, "N")) r.locate_n.insert(R.at(str(x, "locate"), "rhs"));
  }
  r.lhs = std::move(L.graph);
  r.rhs = std::move(R.graph);
  return r;
}

}  // namespace

Rule load_rule(const std::string& text) {
  try {
    return load_rule_unchecked(text);
  } catch (const Json::exception& e) {
    throw RuleFormatError(e.what());
  }
}

}  // namespace fdpg
