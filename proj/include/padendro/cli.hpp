#pragma once

// Command-line front end. run_cli() is the whole program; tools/padendro.cpp
// only forwards argv. Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "padendro/padendro.hpp"

namespace padendro::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::uint64_t p = 2;
  std::string in;
  std::string out;
  std::string format = "json";
  bool include_infinity = false;
  std::string mode = "uniform";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> digits;
  std::optional<std::uint64_t> q;
  std::string alphabet;
  std::vector<std::string> values;
};

// ---------------------------------------------------------------------------
// Input

inline std::string read_text(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open input file '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(f), {});
}

inline bool looks_like_json(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  return first != std::string::npos && (text[first] == '[' || text[first] == '{');
}

// Newline-separated values with '#' comments, or a JSON array of values, or
// a JSON object with a "points" array.
inline std::vector<ExtendedPoint> parse_points(const std::string& text) {
  std::vector<ExtendedPoint> out;
  if (looks_like_json(text)) {
    Json j = parse_json(text);
    if (j.is_object() && j.contains("points")) j = j["points"];
    if (!j.is_array()) throw ParseError("expected a JSON array of points");
    for (std::size_t k = 0; k < j.size(); ++k) {
      const auto& item = j[k];
      try {
        if (item.is_string()) {
          out.push_back(parse_point(item.get<std::string>()));
        } else if (item.is_number_integer()) {
          out.push_back(parse_point(item.dump()));
        } else {
          throw ParseError("expected a string or integer");
        }
      } catch (const ParseError& e) {
        throw ParseError("/" + std::to_string(k) + ": " + e.what());
      }
    }
    return out;
  }
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string body = line.substr(0, line.find('#'));
    if (detail::trim(body).empty()) continue;
    try {
      out.push_back(parse_point(body));
    } catch (const ParseError& e) {
      const std::size_t lead = body.find_first_not_of(" \t");
      throw ParseError(std::string(e.what()).substr(std::string(e.what()).find(": ") + 2), line_no,
                       (lead == std::string::npos ? 0 : lead) + e.column());
    }
  }
  return out;
}

inline std::vector<ExtendedPoint> input_points(const RunConfig& cfg) {
  if (!cfg.values.empty()) {
    std::vector<ExtendedPoint> out;
    for (std::size_t k = 0; k < cfg.values.size(); ++k) {
      try {
        out.push_back(parse_point(cfg.values[k]));
      } catch (const ParseError& e) {
        throw ParseError("argument " + std::to_string(k + 1) + ": " + e.what());
      }
    }
    return out;
  }
  if (cfg.in.empty()) throw UsageError(cfg.command + ": no input (pass values or --in FILE)");
  return parse_points(read_text(cfg.in));
}

inline std::vector<Rational> parse_weights(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& x : parse_points(text)) {
    if (x.is_infinity()) throw ParseError("weights must be finite");
    out.push_back(x.finite());
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON helpers

inline Json valuation_json(const Valuation& v) {
  if (v.is_finite()) return Json(v.value());
  return Json(v.to_string());
}

inline Json leaves_json(const Dendrogram& d, std::size_t node) {
  Json out = Json::array();
  for (auto i : d.leaves_under(node)) out.push_back(to_string(d.points()[i]));
  return out;
}

inline Json site_json(const Dendrogram& d, const AttachmentSite& s) {
  Json j{{"kind", s.kind == AttachmentSite::Kind::edge ? "edge" : "vertex"}, {"node", s.node}};
  j["leaves"] = leaves_json(d, s.node);
  if (s.kind == AttachmentSite::Kind::edge) {
    j["lower"] = valuation_json(s.lower);
    j["upper"] = valuation_json(s.upper);
    if (s.node == d.root()) j["toward_infinity"] = true;
  } else {
    j["level"] = valuation_json(s.lower);
  }
  return j;
}

inline Json distribution_json(const Dendrogram& d, const AttachmentDistribution& dist) {
  Json sites = Json::array(), weights = Json::array();
  for (const auto& s : dist.sites) sites.push_back(site_json(d, s));
  for (const auto& w : dist.weights) weights.push_back(to_string(w));
  return Json{{"sites", std::move(sites)}, {"weights", std::move(weights)}};
}

inline Json hidden_json(const Dendrogram& d) {
  const HiddenStats s = hidden_stats(d);
  const BoundCheck b = check_bounds(s);
  Json hidden = Json::array();
  for (const auto& [id, cls] : classify_vertices(d)) {
    if (cls == VertexClass::hidden) hidden.push_back(Json{{"level", d.node(id).level}, {"leaves", leaves_json(d, id)}});
  }
  return Json{{"n", s.n},
              {"v_h", s.v_h},
              {"b0_h", s.b0_h},
              {"bounds",
               {{"v_h", {{"bound", to_string(s.bound_vh)}, {"slack", to_string(b.vh_slack)}, {"holds", b.vh_holds}}},
                {"b0_h", {{"bound", to_string(s.bound_b0)}, {"slack", to_string(b.b0_slack)}, {"holds", b.b0_holds}}}}},
              {"hidden_vertices", std::move(hidden)}};
}

inline Json transition_json(const TransitionEvent& ev) {
  Json changes = Json::array();
  for (const auto& c : ev.changes) {
    Json j{{"leaves", c.leaves}};
    j["from_level"] = c.from_level ? Json(*c.from_level) : Json(nullptr);
    j["to_level"] = c.to_level ? Json(*c.to_level) : Json(nullptr);
    changes.push_back(std::move(j));
  }
  return Json{{"kind", to_string(ev.kind)}, {"changes", std::move(changes)}};
}

// ---------------------------------------------------------------------------
// Commands

inline std::string cmd_valuate(const RunConfig& cfg) {
  const Prime p(cfg.p);
  const auto points = input_points(cfg);
  if (points.empty()) throw UsageError("valuate: at least one point is required");
  const ValuationMatrix m = valuation_matrix(points, p);
  const std::size_t n = m.size();

  std::vector<std::string> labels, expansions;
  std::vector<Valuation> own;
  for (const auto& x : points) {
    labels.push_back(to_string(x));
    own.push_back(x.is_infinity() ? Valuation::minus_infinity() : valuation(x.finite(), p));
    if (cfg.digits) {
      expansions.push_back(x.is_infinity() ? "inf" : render_expansion(digits(x.finite(), p, *cfg.digits), *cfg.digits));
    }
  }

  if (cfg.format == "table") {
    std::size_t width = 3;
    for (const auto& l : labels) width = std::max(width, l.size());
    auto cell = [&](const std::string& s) { return std::string(width + 1 - std::min(width, s.size()), ' ') + s; };
    std::ostringstream os;
    os << cell("nu_" + std::to_string(p.value()));
    for (const auto& l : labels) os << cell(l);
    os << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      os << cell(labels[i]);
      for (std::size_t j = 0; j < n; ++j) os << cell(m.at(i, j).to_string());
      os << '\n';
    }
    os << "\nvaluations:\n";
    for (std::size_t i = 0; i < n; ++i) {
      os << cell(labels[i]) << cell(own[i].to_string());
      if (cfg.digits) os << "  " << expansions[i];
      os << '\n';
    }
    return os.str();
  }
  if (cfg.format != "json") throw UsageError("valuate: format must be json or table");
  Json matrix = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(valuation_json(m.at(i, j)));
    matrix.push_back(std::move(row));
  }
  Json vals = Json::array();
  for (const auto& v : own) vals.push_back(valuation_json(v));
  Json j{{"p", p.value()}, {"points", labels}, {"valuations", std::move(vals)}, {"matrix", std::move(matrix)}};
  if (cfg.digits) j["expansions"] = expansions;
  return j.dump(2) + "\n";
}

inline Dendrogram cluster_input(const RunConfig& cfg) {
  auto points = input_points(cfg);
  bool has_inf = false;
  for (const auto& x : points) has_inf = has_inf || x.is_infinity();
  if (cfg.include_infinity && !has_inf) points.push_back(ExtendedPoint::infinity());
  return build_dendrogram(points, Prime(cfg.p));
}

inline std::string render_dendrogram(const Dendrogram& d, const std::string& format) {
  if (format == "json") return to_json(d) + "\n";
  if (format == "newick") return to_newick(d) + "\n";
  if (format == "dot") return to_dot(d);
  if (format == "table") return signature(d) + "\n";
  throw UsageError("unknown format '" + format + "' (json, newick, dot, table)");
}

inline std::string cmd_cluster(const RunConfig& cfg) { return render_dendrogram(cluster_input(cfg), cfg.format); }

// A dendrogram document given with --in, or points.
inline Dendrogram dendrogram_input(const RunConfig& cfg) {
  if (cfg.values.empty() && !cfg.in.empty()) {
    const std::string text = read_text(cfg.in);
    if (looks_like_json(text)) {
      const Json j = parse_json(text);
      if (j.is_object() && j.contains("tree")) return from_json_value(j);
    }
    RunConfig copy = cfg;
    copy.values.clear();
    auto points = parse_points(text);
    bool has_inf = false;
    for (const auto& x : points) has_inf = has_inf || x.is_infinity();
    if (cfg.include_infinity && !has_inf) points.push_back(ExtendedPoint::infinity());
    return build_dendrogram(points, Prime(cfg.p));
  }
  return cluster_input(cfg);
}

inline std::string cmd_hidden(const RunConfig& cfg) { return hidden_json(dendrogram_input(cfg)).dump(2) + "\n"; }

inline AttachmentDistribution distribution_for(const Dendrogram& d, const std::string& mode) {
  if (mode == "uniform") return attachment_distribution(d, MeasureMode::uniform);
  if (mode == "haar") return attachment_distribution(d, MeasureMode::haar);
  if (mode.rfind("user:", 0) == 0) {
    return attachment_distribution(d, MeasureMode::user, parse_weights(read_text(mode.substr(5))));
  }
  throw UsageError("unknown mode '" + mode + "' (uniform, haar, user:FILE)");
}

inline std::string cmd_insert(const RunConfig& cfg) {
  if (cfg.in.empty()) throw UsageError("insert: --in tree.json is required");
  const Dendrogram d = from_json(read_text(cfg.in));
  const AttachmentDistribution dist = distribution_for(d, cfg.mode);
  Json out = Json::object();
  Rational x;
  if (cfg.values.size() == 1) {
    const ExtendedPoint pt = parse_point(cfg.values.front());
    if (pt.is_infinity()) throw InvalidArgument("insert: the point to insert must be finite");
    x = pt.finite();
  } else if (cfg.values.empty() && cfg.seed) {
    const AttachmentSite sampled = sample_insertion(dist, *cfg.seed);
    x = realize_site(d, sampled);
    out["seed"] = *cfg.seed;
    out["sampled_point"] = to_string(x);
  } else {
    throw UsageError("insert: give exactly one point to insert, or --seed to sample one");
  }
  const Insertion ins = insert_point(d, x);
  out["site"] = site_json(d, ins.site);
  out["join_level"] = ins.join_level;
  out["distribution"] = distribution_json(d, dist);
  out["tree"] = to_json_value(ins.dendrogram);
  return out.dump(2) + "\n";
}

inline std::string cmd_family(const RunConfig& cfg) {
  if (cfg.in.empty()) throw UsageError("family: --in series.json is required");
  const Json j = parse_json(read_text(cfg.in));
  if (!j.is_object() || !j.contains("configs") || !j["configs"].is_array()) {
    throw ParseError("family JSON: expected {\"p\":int,\"configs\":[...]}");
  }
  std::uint64_t p = cfg.p;
  if (j.contains("p")) {
    if (!j["p"].is_number_unsigned()) throw ParseError("/p: expected a positive integer");
    p = j["p"].get<std::uint64_t>();
  }
  std::vector<Configuration> configs;
  std::vector<Json> stamps;
  for (std::size_t k = 0; k < j["configs"].size(); ++k) {
    const Json& c = j["configs"][k];
    const std::string where = "/configs/" + std::to_string(k);
    if (!c.is_object() || !c.contains("points")) throw ParseError(where + ": expected {\"t\":...,\"points\":[...]}");
    Json t = c.contains("t") ? c["t"] : Json(k);
    stamps.push_back(t);
    Configuration conf{t.is_string() ? t.get<std::string>() : t.dump(), {}};
    try {
      conf.points = parse_points(c["points"].dump());
    } catch (const ParseError& e) {
      throw ParseError(where + "/points: " + e.what());
    }
    configs.push_back(std::move(conf));
  }
  const FamilySeries series = build_family(configs, Prime(p));
  Json steps = Json::array(), transitions = Json::array();
  for (std::size_t k = 0; k < series.dendrograms.size(); ++k) {
    steps.push_back(Json{{"t", stamps[k]},
                         {"signature", signature(series.dendrograms[k])},
                         {"shape", shape_signature(series.dendrograms[k], true)},
                         {"tree", to_json_value(series.dendrograms[k])}});
  }
  for (std::size_t k = 0; k < series.transitions.size(); ++k) {
    Json ev = transition_json(series.transitions[k]);
    ev["from"] = stamps[k];
    ev["to"] = stamps[k + 1];
    transitions.push_back(std::move(ev));
  }
  return Json{{"p", p}, {"steps", std::move(steps)}, {"transitions", std::move(transitions)}}.dump(2) + "\n";
}

inline std::string cmd_embed(const RunConfig& cfg) {
  if (cfg.in.empty()) throw UsageError("embed: --in tree.json is required");
  const AbstractDendrogram a = abstract_from_json(parse_json(read_text(cfg.in)));
  const Prime p(cfg.p);
  const DigitAlphabet alphabet(p, cfg.q.value_or(p.value()));
  return to_json(embed_dendrogram(a, alphabet)) + "\n";
}

inline std::string cmd_encode(const RunConfig& cfg) {
  std::vector<std::string> strings = cfg.values;
  if (strings.empty()) {
    if (cfg.in.empty()) throw UsageError("encode: no input (pass strings or --in FILE)");
    std::istringstream is(read_text(cfg.in));
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) strings.push_back(line);
    }
  }
  return to_json(encode_strings(strings, Prime(cfg.p), cfg.alphabet)) + "\n";
}

// ---------------------------------------------------------------------------

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"p-adic hierarchical classification"};
  app.name("padendro");
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--p", cfg.p, "prime (default 2)");
  app.add_option("--in", cfg.in, "input file, '-' for stdin");
  app.add_option("--out", cfg.out, "output file (default stdout)");
  app.add_option("--format", cfg.format, "json | newick | dot | table")
      ->check(CLI::IsMember({"json", "newick", "dot", "table"}));
  app.add_flag("--include-infinity", cfg.include_infinity, "add the end at infinity");
  app.add_option("--mode", cfg.mode, "uniform | haar | user:FILE");
  app.add_option("--seed", cfg.seed, "seed for sampling an insertion");
  app.add_option("--digits", cfg.digits, "number of p-adic digits to print")->check(CLI::PositiveNumber);
  app.add_option("--q", cfg.q, "digit alphabet size q = p^f (embed)");
  app.add_option("--alphabet", cfg.alphabet, "symbol order for encode");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"valuate", "pairwise valuation matrix"},
      {"cluster", "p-adic dendrogram"},
      {"hidden", "hidden vertex statistics"},
      {"insert", "insert a point / attachment distribution"},
      {"family", "dendrograms of a time series"},
      {"embed", "embed a dendrogram into digit codes"},
      {"encode", "encode strings as digit codes"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("values", cfg.values, "input values");
    sub->callback([&cfg, name = name] { cfg.command = name; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    std::string text;
    if (cfg.command == "valuate") text = cmd_valuate(cfg);
    else if (cfg.command == "cluster") text = cmd_cluster(cfg);
    else if (cfg.command == "hidden") text = cmd_hidden(cfg);
    else if (cfg.command == "insert") text = cmd_insert(cfg);
    else if (cfg.command == "family") text = cmd_family(cfg);
    else if (cfg.command == "embed") text = cmd_embed(cfg);
    else if (cfg.command == "encode") text = cmd_encode(cfg);
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw UsageError("cannot open output file '" + cfg.out + "'");
      f << text;
    }
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace padendro::cli
