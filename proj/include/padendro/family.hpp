#pragma once

// Families of dendrograms over a discrete index set (time series), the
// forgetting and insertion maps between dendrograms with n and n+1 points,
// and distributions over the places where a new point can attach.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "padendro/dendrogram.hpp"
#include "padendro/error.hpp"
#include "padendro/padic.hpp"

namespace padendro {

// ---------------------------------------------------------------------------
// Attachment sites

// Where a new end joins a dendrogram. An edge site is the edge above `node`
// (the edge toward infinity, or simply above the root, when node is the
// root); the new vertex lands strictly between `lower` and `upper`. A vertex
// site is a free residue class directly below `node`.
struct AttachmentSite {
  enum class Kind { edge, vertex };

  Kind kind = Kind::edge;
  std::size_t node = 0;
  Valuation lower = Valuation::minus_infinity();
  Valuation upper = Valuation::infinity();

  friend bool operator==(const AttachmentSite&, const AttachmentSite&) = default;
};

inline std::string to_string(const AttachmentSite& s) {
  if (s.kind == AttachmentSite::Kind::vertex) return "vertex(" + std::to_string(s.node) + ")";
  return "edge(" + std::to_string(s.node) + ", " + s.lower.to_string() + ".." + s.upper.to_string() + ")";
}

namespace detail {

inline AttachmentSite edge_above(const Dendrogram& d, std::size_t id) {
  const Node& n = d.node(id);
  AttachmentSite s{AttachmentSite::Kind::edge, id, Valuation::minus_infinity(), Valuation::infinity()};
  if (n.parent != npos) s.lower = Valuation(d.node(n.parent).level);
  if (!n.is_leaf()) s.upper = Valuation(n.level);
  return s;
}

// Open interval (lower, upper) contains an integer.
inline bool has_room(const AttachmentSite& s) {
  if (!s.lower.is_finite() || !s.upper.is_finite()) return true;
  return s.upper.value() - s.lower.value() >= 2;
}

inline Rational power(const Prime& p, std::int64_t e) {
  const BigInt m = big_pow(p.value(), static_cast<std::uint64_t>(e < 0 ? -e : e));
  return e >= 0 ? Rational(m) : Rational(BigInt(1), m);
}

// Digit of (x - base) at position `level`; requires valuation(x - base) >= level.
inline std::uint64_t residue_digit(const Rational& x, const Rational& base, std::int64_t level, const Prime& p) {
  const Rational scaled = (x - base) / power(p, level);
  const BigInt pp = p.big();
  return static_cast<std::uint64_t>(
      floor_mod(numerator(scaled) * mod_inverse(denominator(scaled), pp), pp));
}

}  // namespace detail

// Every edge with room for a new vertex (all leaf edges, the edge above the
// root, and internal edges spanning at least two levels) and every vertex
// with fewer than p children. Preorder; for each node its edge comes first.
inline std::vector<AttachmentSite> enumerate_sites(const Dendrogram& d) {
  std::vector<AttachmentSite> out;
  for (std::size_t id = 0; id < d.nodes().size(); ++id) {
    const AttachmentSite e = detail::edge_above(d, id);
    if (detail::has_room(e)) out.push_back(e);
    const Node& n = d.node(id);
    if (!n.is_leaf() && n.children.size() < d.prime().value()) {
      out.push_back(AttachmentSite{AttachmentSite::Kind::vertex, id, Valuation(n.level), Valuation(n.level)});
    }
  }
  return out;
}

struct Location {
  AttachmentSite site;
  std::int64_t join_level = 0;  // level of the vertex where x meets the tree
};

// Finds where the end x would join d.
inline Location locate_site(const Dendrogram& d, const Rational& x) {
  const Prime& p = d.prime();
  for (std::size_t i = 0; i < d.points().size(); ++i) {
    if (d.points()[i] == x) throw DuplicatePoint(i, d.points().size(), to_string(x));
  }
  auto toward = [&](std::size_t id) { return valuation(Rational(x - d.points()[d.representative(id)]), p).value(); };

  std::size_t v = d.root();
  const std::int64_t t = toward(v);
  if (t < d.node(v).level) return Location{detail::edge_above(d, v), t};
  for (;;) {
    const Node& n = d.node(v);
    std::optional<std::size_t> next;
    std::int64_t s = 0;
    for (auto c : n.children) {
      s = toward(c);
      if (s > n.level) {
        next = c;
        break;
      }
    }
    if (!next) return Location{AttachmentSite{AttachmentSite::Kind::vertex, v, Valuation(n.level), Valuation(n.level)}, n.level};
    const Node& child = d.node(*next);
    if (child.is_leaf() || s < child.level) return Location{detail::edge_above(d, *next), s};
    v = *next;
  }
}

struct Insertion {
  Dendrogram dendrogram;
  AttachmentSite site;  // in terms of the original dendrogram's node ids
  std::int64_t join_level = 0;
  std::size_t index = 0;  // point index of x in the new dendrogram
};

namespace detail {

inline Cluster graft(const Dendrogram& d, std::size_t id, const Location& at, std::size_t new_leaf) {
  const Node& n = d.node(id);
  Cluster c = n.is_leaf() ? Cluster::make_leaf(n.leaf) : Cluster::make_internal(n.level, {});
  for (auto k : n.children) c.children.push_back(graft(d, k, at, new_leaf));
  if (id != at.site.node) return c;
  if (at.site.kind == AttachmentSite::Kind::vertex) {
    c.children.push_back(Cluster::make_leaf(new_leaf));
    return c;
  }
  return Cluster::make_internal(at.join_level, {std::move(c), Cluster::make_leaf(new_leaf)});
}

}  // namespace detail

// Adds the finite end x, appended as the last point.
inline Insertion insert_point(const Dendrogram& d, const ExtendedPoint& x) {
  if (x.is_infinity()) {
    throw InvalidArgument("insert_point: only finite points can be inserted");
  }
  const Location at = locate_site(d, x.finite());
  const std::size_t index = d.points().size();
  std::vector<Rational> points = d.points();
  points.push_back(x.finite());
  Dendrogram out(d.prime(), std::move(points), detail::graft(d, d.root(), at, index), d.has_infinity_end());
  return Insertion{std::move(out), at.site, at.join_level, index};
}

namespace detail {

inline std::optional<Cluster> prune(const Cluster& c, std::size_t point) {
  if (c.is_leaf()) {
    if (c.leaf == point) return std::nullopt;
    return Cluster::make_leaf(c.leaf > point ? c.leaf - 1 : c.leaf);
  }
  Cluster out = Cluster::make_internal(c.level, {});
  for (const auto& k : c.children) {
    if (auto kept = prune(k, point)) out.children.push_back(std::move(*kept));
  }
  return out;
}

}  // namespace detail

// Drops point i; later points shift down by one. Vertices left with a single
// child are suppressed.
inline Dendrogram forget_point(const Dendrogram& d, std::size_t i) {
  if (i >= d.points().size()) {
    throw IndexOutOfRange("forget_point: index " + std::to_string(i) + " out of range (" +
                          std::to_string(d.points().size()) + " points)");
  }
  if (d.points().size() < 3) throw TooFewPoints("forget_point: at least two finite points must remain");
  std::vector<Rational> points = d.points();
  points.erase(points.begin() + static_cast<std::ptrdiff_t>(i));
  return Dendrogram(d.prime(), std::move(points), *detail::prune(d.to_cluster(), i), d.has_infinity_end());
}

// A point that attaches to d exactly at `site`.
inline Rational realize_site(const Dendrogram& d, const AttachmentSite& site) {
  const Prime& p = d.prime();
  const Rational& rep = d.points()[d.representative(site.node)];
  if (site.kind == AttachmentSite::Kind::edge) {
    const std::int64_t t = site.lower.is_finite() ? site.lower.value() + 1 : site.upper.value() - 1;
    return rep + detail::power(p, t);
  }
  const Node& v = d.node(site.node);
  std::set<std::uint64_t> used;
  for (auto c : v.children) used.insert(detail::residue_digit(d.points()[d.representative(c)], rep, v.level, p));
  std::uint64_t digit = 0;
  while (used.count(digit)) ++digit;
  if (digit >= p.value()) throw InvalidArgument("realize_site: vertex " + std::to_string(site.node) + " has no free residue");
  return rep + detail::power(p, v.level) * digit;
}

// ---------------------------------------------------------------------------
// Distributions over attachment sites

enum class MeasureMode { uniform, haar, user };

struct AttachmentDistribution {
  std::vector<AttachmentSite> sites;
  std::vector<Rational> weights;  // normalized, same order as sites
};

// Unnormalized Haar measure on Z_p of the points attaching at each site:
//   vertex at level l with k children:  (p - k) p^-(l+1)
//   edge between levels r < s:           p^-(r+1) - p^-s
//   leaf edge below level r:             p^-(r+1)
//   edge above a root at level s:        1 - p^-s (the rest of Z_p)
// They sum to exactly 1.
inline std::vector<Rational> haar_measures(const Dendrogram& d, const std::vector<AttachmentSite>& sites) {
  const Prime& p = d.prime();
  for (std::size_t i = 0; i < d.points().size(); ++i) {
    if (valuation(d.points()[i], p) < Valuation(0)) {
      throw UnsupportedMeasure("HAAR measure needs p-adic integers; point " + to_string(d.points()[i]) +
                               " (index " + std::to_string(i) + ") has negative valuation");
    }
  }
  std::vector<Rational> out;
  out.reserve(sites.size());
  for (const auto& s : sites) {
    if (s.kind == AttachmentSite::Kind::vertex) {
      const Node& n = d.node(s.node);
      out.push_back(Rational(static_cast<long long>(p.value() - n.children.size())) * detail::power(p, -(n.level + 1)));
    } else if (!s.lower.is_finite()) {
      out.push_back(1 - detail::power(p, -s.upper.value()));
    } else if (!s.upper.is_finite()) {
      out.push_back(detail::power(p, -(s.lower.value() + 1)));
    } else {
      out.push_back(detail::power(p, -(s.lower.value() + 1)) - detail::power(p, -s.upper.value()));
    }
  }
  return out;
}

inline AttachmentDistribution attachment_distribution(const Dendrogram& d, MeasureMode mode,
                                                      const std::vector<Rational>& user_weights = {}) {
  AttachmentDistribution out{enumerate_sites(d), {}};
  switch (mode) {
    case MeasureMode::uniform:
      out.weights.assign(out.sites.size(), Rational(1));
      break;
    case MeasureMode::haar:
      out.weights = haar_measures(d, out.sites);
      break;
    case MeasureMode::user:
      if (user_weights.size() != out.sites.size()) {
        throw InvalidArgument("user weights: expected " + std::to_string(out.sites.size()) + " weights, got " +
                              std::to_string(user_weights.size()));
      }
      for (std::size_t k = 0; k < user_weights.size(); ++k) {
        if (user_weights[k] < 0) throw InvalidArgument("user weights: weight " + std::to_string(k) + " is negative");
      }
      out.weights = user_weights;
      break;
  }
  Rational total = 0;
  for (const auto& w : out.weights) total += w;
  if (total == 0) throw InvalidArgument("attachment distribution has zero total weight");
  for (auto& w : out.weights) w /= total;
  return out;
}

// Draws a site with probability equal to its weight. Exact: one 64-bit draw
// u is compared against the cumulative weights scaled by 2^64, so results
// depend only on the engine output, not on library distributions.
template <typename Engine>
std::size_t sample_site_index(const AttachmentDistribution& dist, Engine& engine) {
  static_assert(Engine::min() == 0 && Engine::max() == std::numeric_limits<std::uint64_t>::max(),
                "sample_site_index needs a full 64-bit engine");
  if (dist.sites.empty()) throw InvalidArgument("cannot sample from an empty distribution");
  const BigInt u(static_cast<std::uint64_t>(engine()));
  const BigInt scale = BigInt(1) << 64;
  Rational cumulative = 0;
  for (std::size_t k = 0; k + 1 < dist.weights.size(); ++k) {
    cumulative += dist.weights[k];
    // u < cumulative * 2^64
    if (u * denominator(cumulative) < numerator(cumulative) * scale) return k;
  }
  return dist.weights.size() - 1;
}

template <typename Engine>
const AttachmentSite& sample_insertion(const AttachmentDistribution& dist, Engine& engine) {
  return dist.sites[sample_site_index(dist, engine)];
}

inline AttachmentSite sample_insertion(const AttachmentDistribution& dist, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  return sample_insertion(dist, engine);
}

// ---------------------------------------------------------------------------
// Families

struct Configuration {
  std::string timestamp;
  std::vector<ExtendedPoint> points;
};

enum class TransitionKind { unchanged, contraction, expansion, level_shift, other };

inline std::string to_string(TransitionKind k) {
  switch (k) {
    case TransitionKind::unchanged:
      return "UNCHANGED";
    case TransitionKind::contraction:
      return "CONTRACTION";
    case TransitionKind::expansion:
      return "EXPANSION";
    case TransitionKind::level_shift:
      return "LEVEL_SHIFT";
    case TransitionKind::other:
      break;
  }
  return "OTHER";
}

// A cluster (internal vertex) given by its leaf indices; a level is absent on
// the side where the cluster does not exist.
struct ClusterChange {
  std::vector<std::size_t> leaves;
  std::optional<std::int64_t> from_level;
  std::optional<std::int64_t> to_level;

  friend bool operator==(const ClusterChange&, const ClusterChange&) = default;
};

struct TransitionEvent {
  TransitionKind kind = TransitionKind::unchanged;
  std::vector<ClusterChange> changes;
};

namespace detail {

inline std::map<std::vector<std::size_t>, std::int64_t> clusters_of(const Dendrogram& d) {
  std::map<std::vector<std::size_t>, std::int64_t> out;
  for (std::size_t id = 0; id < d.nodes().size(); ++id) {
    if (!d.node(id).is_leaf()) out[d.leaves_under(id)] = d.node(id).level;
  }
  return out;
}

}  // namespace detail

// Compares two dendrograms over the same point indices. Contraction means the
// second is obtained from the first by contracting bounded edges, i.e. its
// clusters are a proper subset of the first one's.
inline TransitionEvent classify_transition(const Dendrogram& from, const Dendrogram& to) {
  if (from.points().size() != to.points().size()) {
    throw InvalidArgument("classify_transition: dendrograms have different point counts");
  }
  const auto a = detail::clusters_of(from);
  const auto b = detail::clusters_of(to);
  TransitionEvent ev;
  bool a_in_b = true, b_in_a = true;
  for (const auto& [leaves, level] : a) {
    auto it = b.find(leaves);
    if (it == b.end()) {
      a_in_b = false;
      ev.changes.push_back({leaves, level, std::nullopt});
    } else if (it->second != level) {
      ev.changes.push_back({leaves, level, it->second});
    }
  }
  for (const auto& [leaves, level] : b) {
    if (!a.count(leaves)) {
      b_in_a = false;
      ev.changes.push_back({leaves, std::nullopt, level});
    }
  }
  if (a_in_b && b_in_a) {
    ev.kind = ev.changes.empty() ? TransitionKind::unchanged : TransitionKind::level_shift;
  } else if (b_in_a) {
    ev.kind = TransitionKind::contraction;
  } else if (a_in_b) {
    ev.kind = TransitionKind::expansion;
  } else {
    ev.kind = TransitionKind::other;
  }
  return ev;
}

struct FamilySeries {
  Prime prime;
  std::vector<Configuration> configurations;
  std::vector<Dendrogram> dendrograms;
  std::vector<TransitionEvent> transitions;
};

// Builds one dendrogram per configuration and classifies consecutive pairs.
// Every configuration must have the same number of points, with the point at
// infinity (if any) at the same index throughout.
inline FamilySeries build_family(const std::vector<Configuration>& configs, const Prime& p) {
  if (configs.empty()) throw InvalidArgument("build_family: no configurations");
  const std::size_t n = configs.front().points.size();
  auto infinity_index = [](const Configuration& c) {
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      if (c.points[i].is_infinity()) return i;
    }
    return npos;
  };
  const std::size_t inf_at = infinity_index(configs.front());
  FamilySeries out{p, configs, {}, {}};
  for (const auto& c : configs) {
    if (c.points.size() != n) {
      throw InvalidArgument("t=" + c.timestamp + ": expected " + std::to_string(n) + " points, got " +
                            std::to_string(c.points.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (c.points[i] == c.points[j]) {
          throw CollisionError("t=" + c.timestamp + ": points " + std::to_string(i) + " and " + std::to_string(j) +
                               " collide at " + to_string(c.points[i]));
        }
      }
    }
    if (infinity_index(c) != inf_at) {
      throw InvalidArgument("t=" + c.timestamp + ": the point at infinity must keep its index");
    }
    out.dendrograms.push_back(build_dendrogram(c.points, p));
  }
  // report clusters in configuration indices rather than finite-point indices
  auto config_index = [&](std::size_t finite) { return (inf_at != npos && finite >= inf_at) ? finite + 1 : finite; };
  for (std::size_t k = 0; k + 1 < out.dendrograms.size(); ++k) {
    TransitionEvent ev = classify_transition(out.dendrograms[k], out.dendrograms[k + 1]);
    for (auto& change : ev.changes) {
      for (auto& leaf : change.leaves) leaf = config_index(leaf);
    }
    out.transitions.push_back(std::move(ev));
  }
  return out;
}

}  // namespace padendro
