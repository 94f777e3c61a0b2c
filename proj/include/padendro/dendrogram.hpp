#pragma once

// p-adic dendrograms: the minimal subtree of the Bruhat-Tits tree whose ends
// are a finite set of points, with degree-2 vertices suppressed.
//
// A Dendrogram stores its finite points and a rooted tree whose leaves are
// those points. The end at infinity, when present, is a flag on the root.
// Internal vertices carry the exponent r of their disk B_{p^-r}; the level of
// the lowest common ancestor of two leaves is the valuation of their
// difference.
//
// Nodes are laid out in canonical preorder: children are sorted by the
// smallest point index they contain, and the root is node 0. Two dendrograms
// over the same points therefore compare equal iff they are the same
// level-labeled tree.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padendro/error.hpp"
#include "padendro/padic.hpp"

namespace padendro {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

// Value-semantic tree used while building or editing dendrograms.
struct Cluster {
  std::int64_t level = 0;    // internal vertices only
  std::size_t leaf = npos;   // point index for leaves
  std::vector<Cluster> children;

  static Cluster make_leaf(std::size_t point) { return Cluster{0, point, {}}; }
  static Cluster make_internal(std::int64_t level, std::vector<Cluster> children) {
    return Cluster{level, npos, std::move(children)};
  }

  bool is_leaf() const noexcept { return children.empty(); }

  std::vector<std::size_t> leaves() const {
    if (is_leaf()) return {leaf};
    std::vector<std::size_t> out;
    for (const auto& c : children) {
      auto sub = c.leaves();
      out.insert(out.end(), sub.begin(), sub.end());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t min_leaf() const {
    if (is_leaf()) return leaf;
    std::size_t m = npos;
    for (const auto& c : children) m = std::min(m, c.min_leaf());
    return m;
  }
};

struct Node {
  std::int64_t level = 0;  // internal vertices only
  std::size_t leaf = npos;
  std::size_t parent = npos;
  std::vector<std::size_t> children;

  bool is_leaf() const noexcept { return children.empty(); }

  friend bool operator==(const Node&, const Node&) = default;
};

namespace detail {

inline void sort_canonical(Cluster& c) {
  for (auto& child : c.children) sort_canonical(child);
  std::sort(c.children.begin(), c.children.end(),
            [](const Cluster& a, const Cluster& b) { return a.min_leaf() < b.min_leaf(); });
}

// Removes internal vertices with a single child, splicing the child upward.
inline void suppress_unary(Cluster& c) {
  for (auto& child : c.children) suppress_unary(child);
  while (c.children.size() == 1) {
    Cluster only = std::move(c.children.front());
    c = std::move(only);
  }
}

}  // namespace detail

class Dendrogram {
 public:
  // Takes an arbitrary cluster tree, suppresses unary vertices, sorts
  // children canonically and validates the structural invariants.
  Dendrogram(Prime p, std::vector<Rational> points, Cluster root, bool has_infinity_end)
      : prime_(p), points_(std::move(points)), has_infinity_end_(has_infinity_end) {
    detail::suppress_unary(root);
    detail::sort_canonical(root);
    if (root.is_leaf()) throw TooFewPoints("a dendrogram needs at least two finite points");
    flatten(root, npos);
    validate();
  }

  const Prime& prime() const noexcept { return prime_; }
  const std::vector<Rational>& points() const noexcept { return points_; }
  std::size_t leaf_count() const noexcept { return points_.size(); }
  bool has_infinity_end() const noexcept { return has_infinity_end_; }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t root() const noexcept { return 0; }
  std::int64_t root_level() const { return nodes_.front().level; }

  std::size_t leaf_node(std::size_t point) const {
    if (point >= leaf_nodes_.size()) {
      throw IndexOutOfRange("point index " + std::to_string(point) + " out of range (" +
                            std::to_string(leaf_nodes_.size()) + " points)");
    }
    return leaf_nodes_[point];
  }

  // Smallest point index below a node; used as its representative.
  std::size_t representative(std::size_t id) const {
    while (!nodes_[id].is_leaf()) id = nodes_[id].children.front();
    return nodes_[id].leaf;
  }

  std::vector<std::size_t> leaves_under(std::size_t id) const {
    std::vector<std::size_t> out;
    collect(id, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  Cluster to_cluster(std::size_t id = 0) const {
    const Node& n = nodes_[id];
    if (n.is_leaf()) return Cluster::make_leaf(n.leaf);
    std::vector<Cluster> kids;
    kids.reserve(n.children.size());
    for (auto c : n.children) kids.push_back(to_cluster(c));
    return Cluster::make_internal(n.level, std::move(kids));
  }

  std::vector<ExtendedPoint> ends() const {
    std::vector<ExtendedPoint> out(points_.begin(), points_.end());
    if (has_infinity_end_) out.push_back(ExtendedPoint::infinity());
    return out;
  }

  friend bool operator==(const Dendrogram& a, const Dendrogram& b) {
    return a.prime_ == b.prime_ && a.points_ == b.points_ && a.has_infinity_end_ == b.has_infinity_end_ &&
           a.nodes_ == b.nodes_;
  }

 private:
  std::size_t flatten(const Cluster& c, std::size_t parent) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{c.is_leaf() ? 0 : c.level, c.leaf, parent, {}});
    for (const auto& child : c.children) {
      const std::size_t cid = flatten(child, id);
      nodes_[id].children.push_back(cid);
    }
    return id;
  }

  void collect(std::size_t id, std::vector<std::size_t>& out) const {
    if (nodes_[id].is_leaf()) {
      out.push_back(nodes_[id].leaf);
      return;
    }
    for (auto c : nodes_[id].children) collect(c, out);
  }

  void validate() {
    leaf_nodes_.assign(points_.size(), npos);
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
      const Node& n = nodes_[id];
      if (n.is_leaf()) {
        if (n.leaf >= points_.size()) throw InvalidArgument("leaf refers to unknown point " + std::to_string(n.leaf));
        if (leaf_nodes_[n.leaf] != npos) throw InvalidArgument("point " + std::to_string(n.leaf) + " appears twice");
        leaf_nodes_[n.leaf] = id;
        continue;
      }
      if (n.children.size() < 2) throw InvalidArgument("internal vertex with fewer than two children");
      for (auto c : n.children) {
        if (!nodes_[c].is_leaf() && nodes_[c].level <= n.level) {
          throw InvalidArgument("child level " + std::to_string(nodes_[c].level) +
                                " not above parent level " + std::to_string(n.level));
        }
      }
    }
    for (std::size_t i = 0; i < leaf_nodes_.size(); ++i) {
      if (leaf_nodes_[i] == npos) throw InvalidArgument("point " + std::to_string(i) + " has no leaf");
    }
  }

  Prime prime_;
  std::vector<Rational> points_;
  bool has_infinity_end_ = false;
  std::vector<Node> nodes_;
  std::vector<std::size_t> leaf_nodes_;
};

// ---------------------------------------------------------------------------
// Valuation matrices

class ValuationMatrix {
 public:
  // Rows are labeled by `points`; when empty, labels default to the row
  // indices 0..n-1.
  ValuationMatrix(Prime p, std::size_t n, std::vector<Valuation> entries, std::vector<ExtendedPoint> points = {})
      : prime_(p), n_(n), entries_(std::move(entries)), points_(std::move(points)) {
    if (entries_.size() != n_ * n_) throw InvalidArgument("valuation matrix: expected n*n entries");
    if (points_.empty()) {
      for (std::size_t i = 0; i < n_; ++i) points_.emplace_back(Rational(static_cast<long long>(i)));
    }
    if (points_.size() != n_) throw InvalidArgument("valuation matrix: label count does not match size");
    for (std::size_t i = 0; i < n_; ++i) {
      if (!at(i, i).is_infinity()) throw InvalidArgument("valuation matrix: diagonal entry is not inf");
      for (std::size_t j = i + 1; j < n_; ++j) {
        if (at(i, j) != at(j, i)) throw InvalidArgument("valuation matrix: not symmetric");
      }
    }
  }

  const Prime& prime() const noexcept { return prime_; }
  std::size_t size() const noexcept { return n_; }
  const Valuation& at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  const std::vector<ExtendedPoint>& points() const noexcept { return points_; }

  // First triple whose two smallest entries differ, if any.
  std::optional<std::array<std::size_t, 3>> ultrametric_violation() const {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        for (std::size_t k = j + 1; k < n_; ++k) {
          std::array<Valuation, 3> v{at(i, j), at(i, k), at(j, k)};
          std::sort(v.begin(), v.end());
          if (v[0] != v[1]) return std::array<std::size_t, 3>{i, j, k};
        }
      }
    }
    return std::nullopt;
  }

  bool is_strongly_ultrametric() const { return !ultrametric_violation().has_value(); }

  friend bool operator==(const ValuationMatrix&, const ValuationMatrix&) = default;

 private:
  Prime prime_;
  std::size_t n_;
  std::vector<Valuation> entries_;
  std::vector<ExtendedPoint> points_;
};

namespace detail {

inline void check_distinct(const std::vector<ExtendedPoint>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) throw DuplicatePoint(i, j, to_string(points[i]));
    }
  }
}

}  // namespace detail

inline ValuationMatrix valuation_matrix(const std::vector<ExtendedPoint>& points, const Prime& p) {
  detail::check_distinct(points);
  const std::size_t n = points.size();
  std::vector<Valuation> entries(n * n, Valuation::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      entries[i * n + j] = entries[j * n + i] = pairwise_valuation(points[i], points[j], p);
    }
  }
  return ValuationMatrix(p, n, std::move(entries), points);
}

// ---------------------------------------------------------------------------
// Construction

namespace detail {

// Splits `members` into the residue classes of the smallest disk containing
// them all, recursively.
inline Cluster build_cluster(const std::vector<std::size_t>& members, const std::vector<Rational>& points,
                             const Prime& p) {
  if (members.size() == 1) return Cluster::make_leaf(members.front());
  const Rational& rep = points[members.front()];
  Valuation level = Valuation::infinity();
  for (std::size_t k = 1; k < members.size(); ++k) {
    level = min(level, valuation(Rational(points[members[k]] - rep), p));
  }
  std::vector<std::vector<std::size_t>> groups;
  for (auto m : members) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const std::vector<std::size_t>& g) {
      return valuation(Rational(points[m] - points[g.front()]), p) > level;
    });
    if (it == groups.end()) {
      groups.push_back({m});
    } else {
      it->push_back(m);
    }
  }
  std::vector<Cluster> children;
  children.reserve(groups.size());
  for (const auto& g : groups) children.push_back(build_cluster(g, points, p));
  return Cluster::make_internal(level.value(), std::move(children));
}

}  // namespace detail

// The canonical dendrogram of `points`. At most one point may be infinity;
// it becomes the infinity end at the root. At least two finite points are
// required.
inline Dendrogram build_dendrogram(const std::vector<ExtendedPoint>& points, const Prime& p) {
  detail::check_distinct(points);
  std::vector<Rational> finite;
  bool has_infinity = false;
  for (const auto& x : points) {
    if (x.is_infinity()) {
      has_infinity = true;
    } else {
      finite.push_back(x.finite());
    }
  }
  if (finite.size() < 2) {
    throw TooFewPoints("a dendrogram needs at least two finite points, got " + std::to_string(finite.size()));
  }
  std::vector<std::size_t> all(finite.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  Cluster root = detail::build_cluster(all, finite, p);
  return Dendrogram(p, std::move(finite), std::move(root), has_infinity);
}

inline Dendrogram build_dendrogram(const std::vector<Rational>& points, const Prime& p, bool include_infinity) {
  std::vector<ExtendedPoint> ends(points.begin(), points.end());
  if (include_infinity) ends.push_back(ExtendedPoint::infinity());
  return build_dendrogram(ends, p);
}

// Level of the lowest common ancestor of two leaves.
inline Valuation cophenetic_valuation(const Dendrogram& d, std::size_t i, std::size_t j) {
  std::size_t a = d.leaf_node(i), b = d.leaf_node(j);
  if (a == b) return Valuation::infinity();
  auto depth = [&](std::size_t id) {
    std::size_t k = 0;
    while (d.node(id).parent != npos) {
      id = d.node(id).parent;
      ++k;
    }
    return k;
  };
  std::size_t da = depth(a), db = depth(b);
  while (da > db) {
    a = d.node(a).parent;
    --da;
  }
  while (db > da) {
    b = d.node(b).parent;
    --db;
  }
  while (a != b) {
    a = d.node(a).parent;
    b = d.node(b).parent;
  }
  return Valuation(d.node(a).level);
}

// Agglomerative single-linkage clustering on a valuation matrix, merging
// clusters at increasing distance p^-v (decreasing v). Rows labeled with the
// point at infinity are dropped; the result has no infinity end. Ties merge
// in one step, giving multi-way vertices.
inline Dendrogram single_linkage_oracle(const ValuationMatrix& m) {
  if (auto bad = m.ultrametric_violation()) {
    const auto [i, j, k] = *bad;
    throw NotUltrametric("triple (" + std::to_string(i) + ", " + std::to_string(j) + ", " + std::to_string(k) +
                         ") violates the strong ultrametric inequality");
  }
  std::vector<std::size_t> rows;
  std::vector<Rational> labels;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.points()[i].is_infinity()) continue;
    rows.push_back(i);
    labels.push_back(m.points()[i].finite());
  }
  if (rows.size() < 2) throw TooFewPoints("oracle needs at least two finite rows");

  struct Group {
    Cluster tree;
    std::vector<std::size_t> members;  // positions into rows
  };
  std::vector<Group> groups;
  for (std::size_t k = 0; k < rows.size(); ++k) groups.push_back({Cluster::make_leaf(k), {k}});

  auto linkage = [&](const Group& a, const Group& b) {
    Valuation best = Valuation::minus_infinity();
    for (auto x : a.members) {
      for (auto y : b.members) best = std::max(best, m.at(rows[x], rows[y]));
    }
    return best;
  };

  while (groups.size() > 1) {
    const std::size_t g = groups.size();
    std::vector<Valuation> link(g * g, Valuation::minus_infinity());
    Valuation best = Valuation::minus_infinity();
    for (std::size_t a = 0; a < g; ++a) {
      for (std::size_t b = a + 1; b < g; ++b) {
        link[a * g + b] = link[b * g + a] = linkage(groups[a], groups[b]);
        best = std::max(best, link[a * g + b]);
      }
    }
    if (!best.is_finite()) throw InvalidArgument("oracle: clusters at non-finite distance " + best.to_string());

    // connected components of the "linked at level best" graph
    std::vector<std::size_t> component(g, npos);
    std::vector<Group> next;
    for (std::size_t a = 0; a < g; ++a) {
      if (component[a] != npos) continue;
      std::vector<std::size_t> stack{a}, members{a};
      component[a] = a;
      while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        for (std::size_t y = 0; y < g; ++y) {
          if (component[y] == npos && link[x * g + y] == best) {
            component[y] = a;
            stack.push_back(y);
            members.push_back(y);
          }
        }
      }
      if (members.size() == 1) {
        next.push_back(std::move(groups[a]));
        continue;
      }
      Group merged;
      std::vector<Cluster> kids;
      for (auto x : members) {
        kids.push_back(std::move(groups[x].tree));
        merged.members.insert(merged.members.end(), groups[x].members.begin(), groups[x].members.end());
      }
      merged.tree = Cluster::make_internal(best.value(), std::move(kids));
      next.push_back(std::move(merged));
    }
    groups = std::move(next);
  }
  return Dendrogram(m.prime(), std::move(labels), std::move(groups.front().tree), false);
}

// ---------------------------------------------------------------------------
// Canonical signatures

namespace detail {

template <typename LeafLabel>
void write_signature(const Dendrogram& d, std::size_t id, bool with_infinity, const LeafLabel& label,
                     std::string& out) {
  const Node& n = d.node(id);
  if (n.is_leaf()) {
    out += label(n.leaf);
    return;
  }
  out += '(';
  for (std::size_t k = 0; k < n.children.size(); ++k) {
    if (k) out += ',';
    write_signature(d, n.children[k], with_infinity, label, out);
  }
  if (with_infinity && id == d.root() && d.has_infinity_end()) out += ",inf";
  out += ")@" + std::to_string(n.level);
}

}  // namespace detail

// "(child,child,...)@level" with leaves written as their point strings and
// the infinity end written as a trailing "inf" child of the root.
inline std::string signature(const Dendrogram& d, bool with_infinity = true) {
  std::string out;
  detail::write_signature(d, d.root(), with_infinity, [&](std::size_t i) { return to_string(d.points()[i]); }, out);
  return out;
}

// Same layout with leaves written as point indices. Independent of the point
// values, so it compares shapes of dendrograms over different data.
inline std::string shape_signature(const Dendrogram& d, bool with_infinity = false) {
  std::string out;
  detail::write_signature(d, d.root(), with_infinity, [](std::size_t i) { return std::to_string(i); }, out);
  return out;
}

}  // namespace padendro
