#pragma once

// Hidden vertices: non-root clusters that contain no data point directly and
// are made of non-trivial subclusters only. The hidden part of a dendrogram
// is the forest they span; v_h counts its vertices and b0_h its components.
//
// The analysis is purely topological, so it runs on bare cluster trees as
// well as on p-adic dendrograms. enumerate_shapes() produces every rooted
// tree with n unlabeled leaves and no unary vertices, for exhaustive sweeps.

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "padendro/dendrogram.hpp"
#include "padendro/padic.hpp"

namespace padendro {

enum class VertexClass { top, exposed, hidden };

inline std::string to_string(VertexClass c) {
  switch (c) {
    case VertexClass::top:
      return "TOP";
    case VertexClass::exposed:
      return "EXPOSED";
    case VertexClass::hidden:
      break;
  }
  return "HIDDEN";
}

// Internal vertex id -> class. Leaves are not classified.
inline std::map<std::size_t, VertexClass> classify_vertices(const Dendrogram& d) {
  std::map<std::size_t, VertexClass> out;
  for (std::size_t id = 0; id < d.nodes().size(); ++id) {
    const Node& n = d.node(id);
    if (n.is_leaf()) continue;
    if (id == d.root()) {
      out[id] = VertexClass::top;
      continue;
    }
    bool has_leaf_child = false;
    for (auto c : n.children) has_leaf_child = has_leaf_child || d.node(c).is_leaf();
    out[id] = has_leaf_child ? VertexClass::exposed : VertexClass::hidden;
  }
  return out;
}

struct HiddenStats {
  std::size_t n = 0;     // finite leaves
  std::size_t v_h = 0;   // hidden vertices
  std::size_t b0_h = 0;  // connected components of the hidden forest
  Rational bound_vh;     // (n+1)/4 - b0_h + 1
  Rational bound_b0;     // (n-4)/3

  friend bool operator==(const HiddenStats&, const HiddenStats&) = default;
};

struct BoundCheck {
  bool vh_holds = false;
  bool b0_holds = false;
  Rational vh_slack;  // bound_vh - v_h
  Rational b0_slack;  // bound_b0 - b0_h

  bool all_hold() const noexcept { return vh_holds && b0_holds; }
};

namespace detail {

struct HiddenCounter {
  std::size_t leaves = 0;
  std::size_t hidden = 0;
  std::size_t components = 0;

  // Returns whether `c` is hidden.
  bool visit(const Cluster& c, bool is_root, bool parent_hidden) {
    if (c.is_leaf()) {
      ++leaves;
      return false;
    }
    bool has_leaf_child = false;
    for (const auto& k : c.children) has_leaf_child = has_leaf_child || k.is_leaf();
    const bool hidden_here = !is_root && !has_leaf_child;
    if (hidden_here) {
      ++hidden;
      if (!parent_hidden) ++components;
    }
    for (const auto& k : c.children) visit(k, false, hidden_here);
    return hidden_here;
  }
};

inline HiddenStats make_stats(std::size_t n, std::size_t v_h, std::size_t b0_h) {
  const Rational nn(static_cast<long long>(n));
  return HiddenStats{n, v_h, b0_h, (nn + 1) / 4 - static_cast<long long>(b0_h) + 1, (nn - 4) / 3};
}

}  // namespace detail

inline HiddenStats hidden_stats(const Cluster& tree) {
  detail::HiddenCounter counter;
  counter.visit(tree, true, false);
  return detail::make_stats(counter.leaves, counter.hidden, counter.components);
}

// n counts finite leaves; the infinity end is not a data point.
inline HiddenStats hidden_stats(const Dendrogram& d) { return hidden_stats(d.to_cluster()); }

inline BoundCheck check_bounds(const HiddenStats& s) {
  BoundCheck out;
  out.vh_slack = s.bound_vh - static_cast<long long>(s.v_h);
  out.b0_slack = s.bound_b0 - static_cast<long long>(s.b0_h);
  out.vh_holds = out.vh_slack >= 0;
  out.b0_holds = out.b0_slack >= 0;
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive shape enumeration

namespace detail {

// Unordered rooted trees without unary vertices, as lists of child shapes.
// shapes[k] holds every shape with k leaves; a shape refers to its children
// by (leaf count, index into shapes[leaf count]) in non-increasing order.
struct ShapeTable {
  using Ref = std::pair<std::size_t, std::size_t>;
  std::vector<std::vector<std::vector<Ref>>> shapes;

  explicit ShapeTable(std::size_t max_leaves) : shapes(max_leaves + 1) {
    if (max_leaves >= 1) shapes[1].push_back({});
    for (std::size_t n = 2; n <= max_leaves; ++n) {
      std::vector<Ref> current;
      extend(n, n, Ref{n - 1, npos}, current);
    }
  }

  // Appends children with refs <= bound (lexicographic) summing to `remaining`.
  void extend(std::size_t n, std::size_t remaining, Ref bound, std::vector<Ref>& current) {
    if (remaining == 0) {
      if (current.size() >= 2) shapes[n].push_back(current);
      return;
    }
    for (std::size_t k = std::min(remaining, bound.first); k >= 1; --k) {
      const std::size_t count = shapes[k].size();
      const std::size_t top = (k == bound.first) ? std::min(count, bound.second == npos ? count : bound.second + 1)
                                                 : count;
      for (std::size_t idx = top; idx-- > 0;) {
        current.emplace_back(k, idx);
        extend(n, remaining - k, Ref{k, idx}, current);
        current.pop_back();
      }
    }
  }

  Cluster materialize(std::size_t n, std::size_t idx, std::int64_t level, std::size_t& next_leaf) const {
    if (n == 1) return Cluster::make_leaf(next_leaf++);
    std::vector<Cluster> kids;
    for (const auto& [k, i] : shapes[n][idx]) kids.push_back(materialize(k, i, level + 1, next_leaf));
    return Cluster::make_internal(level, std::move(kids));
  }
};

}  // namespace detail

// Calls `visit` once per shape with n leaves (1 <= n <= 10). Internal levels
// equal depth from the root (level 0); leaves are numbered in preorder.
inline void enumerate_shapes(std::size_t n, const std::function<void(const Cluster&)>& visit) {
  if (n < 1 || n > 10) throw InvalidArgument("enumerate_shapes: n must be in 1..10");
  const detail::ShapeTable table(n);
  for (std::size_t idx = 0; idx < table.shapes[n].size(); ++idx) {
    std::size_t next_leaf = 0;
    visit(table.materialize(n, idx, 0, next_leaf));
  }
}

inline std::vector<Cluster> enumerate_shapes(std::size_t n) {
  std::vector<Cluster> out;
  enumerate_shapes(n, [&](const Cluster& c) { out.push_back(c); });
  return out;
}

}  // namespace padendro
