#pragma once

// Embedding abstract dendrograms and strings into q-ary digit codes whose
// common-prefix structure reproduces the source hierarchy. For q = p the
// codes are p-adic integers and decode back to a p-adic dendrogram.
//
// Codes list digits by position: code[t] is the coefficient of p^t.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "padendro/dendrogram.hpp"
#include "padendro/error.hpp"
#include "padendro/io.hpp"
#include "padendro/padic.hpp"

namespace padendro {

// A rooted tree with labeled leaves and integer levels increasing toward the
// leaves. Leaves refer to `labels` by index.
struct AbstractDendrogram {
  std::vector<std::string> labels;
  Cluster root;
};

inline void validate(const AbstractDendrogram& a) {
  std::vector<bool> seen(a.labels.size(), false);
  auto walk = [&](auto&& self, const Cluster& c, std::optional<std::int64_t> parent_level) -> void {
    if (c.is_leaf()) {
      if (c.leaf >= a.labels.size()) throw InvalidArgument("leaf refers to unknown label " + std::to_string(c.leaf));
      if (seen[c.leaf]) throw InvalidArgument("label " + a.labels[c.leaf] + " appears twice");
      seen[c.leaf] = true;
      return;
    }
    if (c.children.size() < 2) throw InvalidArgument("internal vertex with fewer than two children");
    if (parent_level && c.level <= *parent_level) {
      throw InvalidArgument("level " + std::to_string(c.level) + " not above parent level " +
                            std::to_string(*parent_level));
    }
    for (const auto& k : c.children) self(self, k, c.level);
  };
  walk(walk, a.root, std::nullopt);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw InvalidArgument("label " + a.labels[i] + " has no leaf");
  }
}

// Signature in the layout of shape_signature(), leaves written as indices.
inline std::string signature(const AbstractDendrogram& a) {
  Cluster c = a.root;
  detail::sort_canonical(c);
  auto write = [](auto&& self, const Cluster& node, std::string& out) -> void {
    if (node.is_leaf()) {
      out += std::to_string(node.leaf);
      return;
    }
    out += '(';
    for (std::size_t k = 0; k < node.children.size(); ++k) {
      if (k) out += ',';
      self(self, node.children[k], out);
    }
    out += ")@" + std::to_string(node.level);
  };
  std::string out;
  write(write, c, out);
  return out;
}

// Leaves labeled by point strings.
inline AbstractDendrogram abstract_from(const Dendrogram& d) {
  AbstractDendrogram a;
  for (const auto& x : d.points()) a.labels.push_back(to_string(x));
  a.root = d.to_cluster();
  return a;
}

// Digit alphabet of size q = p^f.
class DigitAlphabet {
 public:
  DigitAlphabet(const Prime& p, std::uint64_t q) : prime_(p), q_(q) {
    std::uint64_t power = 1;
    while (power < q && power <= std::numeric_limits<std::uint64_t>::max() / p.value()) {
      power *= p.value();
      ++f_;
    }
    if (q < 2 || power != q) {
      throw InvalidArgument("alphabet size " + std::to_string(q) + " is not a power of " + std::to_string(p.value()));
    }
  }

  // Smallest q = p^f with q >= symbols.
  static DigitAlphabet at_least(const Prime& p, std::uint64_t symbols) {
    std::uint64_t q = p.value();
    while (q < symbols) q *= p.value();
    return DigitAlphabet(p, q);
  }

  const Prime& prime() const noexcept { return prime_; }
  std::uint64_t q() const noexcept { return q_; }
  unsigned f() const noexcept { return f_; }

 private:
  Prime prime_;
  std::uint64_t q_;
  unsigned f_ = 0;
};

struct CodeAssignment {
  std::uint64_t p = 2;
  std::uint64_t q = 2;
  std::vector<std::string> labels;
  std::vector<std::vector<std::uint64_t>> codes;  // parallel to labels
};

inline std::size_t common_prefix_length(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  const auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
  return static_cast<std::size_t>(ia - a.begin());
}

// Digits as characters 0-9a-z for q <= 36, otherwise comma-separated.
inline std::string render_code(const std::vector<std::uint64_t>& code, std::uint64_t q) {
  std::string out;
  for (std::size_t t = 0; t < code.size(); ++t) {
    if (q > 36) {
      if (t) out += ',';
      out += std::to_string(code[t]);
    } else {
      out += static_cast<char>(code[t] < 10 ? '0' + code[t] : 'a' + (code[t] - 10));
    }
  }
  return out;
}

inline std::vector<std::uint64_t> parse_code(std::string_view text, std::uint64_t q) {
  std::vector<std::uint64_t> out;
  if (text.empty()) return out;
  if (q > 36) {
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto end = std::min(text.find(',', start), text.size());
      const Rational v = parse_rational(text.substr(start, end - start));
      if (denominator(v) != 1 || v < 0 || v >= Rational(BigInt(q))) {
        throw ParseError("digit out of range in code '" + std::string(text) + "'", 1, start + 1);
      }
      out.push_back(static_cast<std::uint64_t>(numerator(v)));
      start = end + 1;
    }
    return out;
  }
  for (std::size_t t = 0; t < text.size(); ++t) {
    const char ch = text[t];
    std::uint64_t d = 64;
    if (ch >= '0' && ch <= '9') d = static_cast<std::uint64_t>(ch - '0');
    if (ch >= 'a' && ch <= 'z') d = static_cast<std::uint64_t>(ch - 'a' + 10);
    if (d >= q) throw ParseError("invalid digit '" + std::string(1, ch) + "' in code '" + std::string(text) + "'", 1, t + 1);
    out.push_back(d);
  }
  return out;
}

// Children in canonical order take digits 0, 1, 2, ... at their parent's
// level; positions between levels are 0. The first leaf therefore encodes 0,
// and with the root at level 0 the first leaf of the second root child
// encodes 1.
inline CodeAssignment embed_dendrogram(const AbstractDendrogram& a, const DigitAlphabet& alphabet) {
  validate(a);
  Cluster root = a.root;
  detail::sort_canonical(root);
  CodeAssignment out{alphabet.prime().value(), alphabet.q(), a.labels, std::vector<std::vector<std::uint64_t>>(a.labels.size())};

  auto walk = [&](auto&& self, const Cluster& c, std::vector<std::uint64_t>& prefix) -> void {
    if (c.is_leaf()) {
      out.codes[c.leaf] = prefix;
      return;
    }
    if (c.level < 0) throw InvalidArgument("embed_dendrogram: negative level " + std::to_string(c.level));
    if (c.children.size() > alphabet.q()) {
      std::string members;
      for (auto i : c.leaves()) members += (members.empty() ? "" : ",") + a.labels[i];
      throw BranchingExceedsAlphabet("vertex {" + members + "} at level " + std::to_string(c.level) + " has " +
                                     std::to_string(c.children.size()) + " children but q = " +
                                     std::to_string(alphabet.q()));
    }
    const std::size_t base = prefix.size();
    prefix.resize(static_cast<std::size_t>(c.level) + 1, 0);
    for (std::size_t k = 0; k < c.children.size(); ++k) {
      prefix[static_cast<std::size_t>(c.level)] = k;
      self(self, c.children[k], prefix);
    }
    prefix.resize(base);
  };
  std::vector<std::uint64_t> prefix;
  walk(walk, root, prefix);
  return out;
}

// Integer value sum code[t] p^t.
inline BigInt code_value(const std::vector<std::uint64_t>& code, std::uint64_t base) {
  BigInt v = 0;
  for (std::size_t t = code.size(); t-- > 0;) v = v * base + code[t];
  return v;
}

// The p-adic dendrogram of the decoded integers together with infinity.
// Point i is the value of code i.
inline Dendrogram decode_to_dendrogram(const CodeAssignment& c, const Prime& p) {
  if (c.q != p.value() || c.p != p.value()) {
    throw InvalidArgument("decode_to_dendrogram: codes over q = " + std::to_string(c.q) +
                          " are not " + std::to_string(p.value()) + "-adic integers");
  }
  std::vector<ExtendedPoint> ends;
  for (const auto& code : c.codes) ends.emplace_back(Rational(code_value(code, p.value())));
  ends.push_back(ExtendedPoint::infinity());
  return build_dendrogram(ends, p);
}

// Symbol k of the alphabet becomes digit k; character t of a string becomes
// the digit at position t. The alphabet defaults to the sorted set of bytes
// occurring in the strings.
inline CodeAssignment encode_strings(const std::vector<std::string>& strings, const Prime& p,
                                     std::string alphabet = {}) {
  if (alphabet.empty()) {
    for (const auto& s : strings) alphabet += s;
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  }
  std::map<char, std::uint64_t> table;
  for (std::size_t k = 0; k < alphabet.size(); ++k) {
    if (!table.emplace(alphabet[k], k).second) {
      throw InvalidArgument("alphabet lists symbol '" + std::string(1, alphabet[k]) + "' twice");
    }
  }
  const DigitAlphabet digits = DigitAlphabet::at_least(p, std::max<std::size_t>(alphabet.size(), 1));
  CodeAssignment out{p.value(), digits.q(), strings, {}};
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < strings.size(); ++i) {
    if (auto [it, fresh] = seen.emplace(strings[i], i); !fresh) {
      throw InvalidArgument("string '" + strings[i] + "' appears at lines " + std::to_string(it->second + 1) +
                            " and " + std::to_string(i + 1));
    }
    std::vector<std::uint64_t> code;
    for (std::size_t t = 0; t < strings[i].size(); ++t) {
      auto it = table.find(strings[i][t]);
      if (it == table.end()) {
        throw InvalidArgument("string " + std::to_string(i + 1) + " ('" + strings[i] + "'), position " +
                              std::to_string(t + 1) + ": symbol '" + std::string(1, strings[i][t]) +
                              "' is not in the alphabet");
      }
      code.push_back(it->second);
    }
    out.codes.push_back(std::move(code));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline Json to_json_value(const CodeAssignment& c) {
  Json codes = Json::object();
  for (std::size_t i = 0; i < c.labels.size(); ++i) codes[c.labels[i]] = render_code(c.codes[i], c.q);
  return Json{{"q", c.q}, {"p", c.p}, {"codes", std::move(codes)}};
}

inline std::string to_json(const CodeAssignment& c) { return to_json_value(c).dump(2); }

inline CodeAssignment code_assignment_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("q") || !j.contains("p") || !j.contains("codes") || !j["codes"].is_object()) {
    throw ParseError("code assignment JSON: expected {\"q\":int,\"p\":int,\"codes\":{...}}");
  }
  if (!j["q"].is_number_unsigned() || !j["p"].is_number_unsigned()) {
    throw ParseError("code assignment JSON: /q and /p must be positive integers");
  }
  CodeAssignment c{j["p"].get<std::uint64_t>(), j["q"].get<std::uint64_t>(), {}, {}};
  for (const auto& [label, code] : j["codes"].items()) {
    if (!code.is_string()) throw ParseError("/codes/" + label + ": expected a digit string");
    c.labels.push_back(label);
    c.codes.push_back(parse_code(code.get<std::string>(), c.q));
  }
  return c;
}

// {"labels": [...], "tree": {...}} in the dendrogram tree schema. A full
// dendrogram document (with "points") is accepted too; its point strings
// become the labels.
inline AbstractDendrogram abstract_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("tree")) throw ParseError("abstract dendrogram JSON: missing /tree");
  const char* key = j.contains("labels") ? "labels" : "points";
  if (!j.contains(key) || !j[key].is_array()) throw ParseError("abstract dendrogram JSON: missing /labels");
  AbstractDendrogram a;
  for (std::size_t k = 0; k < j[key].size(); ++k) {
    if (!j[key][k].is_string()) throw ParseError("/" + std::string(key) + "/" + std::to_string(k) + ": expected a string");
    a.labels.push_back(j[key][k].get<std::string>());
  }
  a.root = detail::tree_from_json(j["tree"], "/tree");
  try {
    validate(a);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("/tree: ") + e.what());
  }
  return a;
}

}  // namespace padendro
