#pragma once

// Text formats for dendrograms.
//
// JSON is the persistence format and round-trips exactly:
//   {"p": 2, "points": ["0", "64"], "infinity": false,
//    "tree": {"level": 6, "children": [{"leaf": 0}, {"leaf": 1}]}}
//
// Newick is lossy (no infinity end). Every subtree carries the level of its
// parent as branch length; internal non-root vertices also carry their own
// level in a comment block:  ((0:6,64:6)[level=6]:5,32:5);
//
// DOT emits one node per vertex with one rank per level.

#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "padendro/dendrogram.hpp"
#include "padendro/error.hpp"
#include "padendro/padic.hpp"

namespace padendro {

using Json = nlohmann::ordered_json;

namespace detail {

inline void write_newick(const Dendrogram& d, std::size_t id, std::ostringstream& os) {
  const Node& n = d.node(id);
  if (n.is_leaf()) {
    os << to_string(d.points()[n.leaf]);
  } else {
    os << '(';
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      if (k) os << ',';
      write_newick(d, n.children[k], os);
    }
    os << ')';
    if (id != d.root()) os << "[level=" << n.level << ']';
  }
  if (n.parent != npos) os << ':' << d.node(n.parent).level;
}

inline Json tree_to_json(const Dendrogram& d, std::size_t id) {
  const Node& n = d.node(id);
  if (n.is_leaf()) return Json{{"leaf", n.leaf}};
  Json kids = Json::array();
  for (auto c : n.children) kids.push_back(tree_to_json(d, c));
  return Json{{"level", n.level}, {"children", std::move(kids)}};
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

inline Cluster tree_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  if (j.contains("leaf")) {
    if (!j["leaf"].is_number_unsigned()) throw ParseError(path + "/leaf: expected a non-negative integer");
    return Cluster::make_leaf(j["leaf"].get<std::size_t>());
  }
  if (!j.contains("level") || !j["level"].is_number_integer()) throw ParseError(path + "/level: expected an integer");
  if (!j.contains("children") || !j["children"].is_array()) throw ParseError(path + "/children: expected an array");
  std::vector<Cluster> kids;
  for (std::size_t k = 0; k < j["children"].size(); ++k) {
    kids.push_back(tree_from_json(j["children"][k], path + "/children/" + std::to_string(k)));
  }
  if (kids.size() < 2) throw ParseError(path + ": internal vertex needs at least two children");
  return Cluster::make_internal(j["level"].get<std::int64_t>(), std::move(kids));
}

}  // namespace detail

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, column] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    // drop the library's "[json.exception...] parse error at line L, column C: " prefix
    std::string detail = e.what();
    if (const auto at = detail.find("column"); at != std::string::npos) {
      if (const auto colon = detail.find(": ", at); colon != std::string::npos) detail = detail.substr(colon + 2);
    }
    throw ParseError("invalid JSON: " + detail, line, column);
  }
}

inline std::string to_newick(const Dendrogram& d) {
  std::ostringstream os;
  detail::write_newick(d, d.root(), os);
  os << ';';
  return os.str();
}

inline std::string to_dot(const Dendrogram& d) {
  std::ostringstream os;
  os << "digraph dendrogram {\n";
  os << "  node [shape=point];\n";
  std::map<std::int64_t, std::vector<std::size_t>> ranks;
  std::vector<std::size_t> leaves;
  for (std::size_t id = 0; id < d.nodes().size(); ++id) {
    const Node& n = d.node(id);
    if (n.is_leaf()) {
      os << "  n" << id << " [shape=plaintext, label=\"" << to_string(d.points()[n.leaf]) << "\"];\n";
      leaves.push_back(id);
    } else {
      os << "  n" << id << " [xlabel=\"" << n.level << "\"];\n";
      ranks[n.level].push_back(id);
    }
  }
  if (d.has_infinity_end()) {
    os << "  inf [shape=plaintext, label=\"inf\"];\n";
    os << "  inf -> n" << d.root() << " [arrowhead=none];\n";
  }
  for (std::size_t id = 0; id < d.nodes().size(); ++id) {
    for (auto c : d.node(id).children) os << "  n" << id << " -> n" << c << " [arrowhead=none];\n";
  }
  for (const auto& [level, ids] : ranks) {
    os << "  { rank=same;";
    for (auto id : ids) os << " n" << id << ';';
    os << " }  // level " << level << '\n';
  }
  os << "  { rank=sink;";
  for (auto id : leaves) os << " n" << id << ';';
  os << " }\n}\n";
  return os.str();
}

inline Json to_json_value(const Dendrogram& d) {
  Json points = Json::array();
  for (const auto& x : d.points()) points.push_back(to_string(x));
  return Json{{"p", d.prime().value()},
              {"points", std::move(points)},
              {"infinity", d.has_infinity_end()},
              {"tree", detail::tree_to_json(d, d.root())}};
}

inline std::string to_json(const Dendrogram& d) { return to_json_value(d).dump(2); }

// Accepts any tree that is a valid dendrogram of its points: the tree must
// match the p-adic dendrogram built from "points" (child order is free).
inline Dendrogram from_json_value(const Json& j) {
  if (!j.is_object()) throw ParseError("dendrogram JSON: expected an object");
  if (!j.contains("p") || !j["p"].is_number_unsigned()) throw ParseError("/p: expected a positive integer");
  if (!j.contains("points") || !j["points"].is_array()) throw ParseError("/points: expected an array of strings");
  if (!j.contains("tree")) throw ParseError("/tree: missing");
  const Prime p(j["p"].get<std::uint64_t>());
  std::vector<Rational> points;
  for (std::size_t k = 0; k < j["points"].size(); ++k) {
    const auto& item = j["points"][k];
    if (!item.is_string()) throw ParseError("/points/" + std::to_string(k) + ": expected a string");
    try {
      points.push_back(parse_rational(item.get<std::string>()));
    } catch (const ParseError& e) {
      throw ParseError("/points/" + std::to_string(k) + ": " + e.what());
    }
  }
  bool infinity = false;
  if (j.contains("infinity")) {
    if (!j["infinity"].is_boolean()) throw ParseError("/infinity: expected a boolean");
    infinity = j["infinity"].get<bool>();
  }
  Cluster tree = detail::tree_from_json(j["tree"], "/tree");
  std::optional<Dendrogram> parsed;
  try {
    parsed.emplace(p, points, std::move(tree), infinity);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("/tree: ") + e.what());
  }
  const Dendrogram rebuilt = build_dendrogram(points, p, infinity);
  if (!(*parsed == rebuilt)) {
    throw ParseError("/tree: does not match the " + std::to_string(p.value()) + "-adic dendrogram of its points (" +
                     signature(rebuilt) + ")");
  }
  return *parsed;
}

inline Dendrogram from_json(std::string_view text) { return from_json_value(parse_json(text)); }

}  // namespace padendro
