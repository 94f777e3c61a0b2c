#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "padendro/dendrogram.hpp"
#include "padendro/io.hpp"
#include "test_support.hpp"

namespace padendro {
namespace {

using testing::random_points;
using testing::toy_data;
using testing::toy_data_with_infinity;

std::string read_golden(const std::string& name) {
  std::ifstream f(std::string(PADENDRO_GOLDEN_DIR) + "/" + name, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

constexpr const char* kFigure2 = "((((0,64)@6,32)@5,((4,20)@4,12)@3)@2,(1,3)@1,inf)@0";

TEST(ValuationMatrix, ToyDataMatchesTable) {
  // Rows and columns in the order 0 1 3 4 12 20 32 64; (20,64) is 2 since 64 - 20 = 44 = 2^2 * 11.
  const std::vector<std::vector<int>> expected{
      {-1, 0, 0, 2, 2, 2, 5, 6}, {0, -1, 1, 0, 0, 0, 0, 0}, {0, 1, -1, 0, 0, 0, 0, 0}, {2, 0, 0, -1, 3, 4, 2, 2},
      {2, 0, 0, 3, -1, 3, 2, 2}, {2, 0, 0, 4, 3, -1, 2, 2}, {5, 0, 0, 2, 2, 2, -1, 5}, {6, 0, 0, 2, 2, 2, 5, -1}};
  const auto m = valuation_matrix(toy_data(), Prime(2));
  ASSERT_EQ(m.size(), 8U);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      if (i == j) {
        EXPECT_TRUE(m.at(i, j).is_infinity());
      } else {
        EXPECT_EQ(m.at(i, j), Valuation(expected[i][j])) << i << "," << j;
      }
    }
  }
  EXPECT_TRUE(m.is_strongly_ultrametric());
}

TEST(ValuationMatrix, SmallCases) {
  const auto two = valuation_matrix({0, 1}, Prime(2));
  EXPECT_TRUE(two.at(0, 0).is_infinity());
  EXPECT_EQ(two.at(0, 1), Valuation(0));
  const auto m = valuation_matrix({4, 12, 20}, Prime(2));
  EXPECT_EQ(m.at(0, 1), Valuation(3));
  EXPECT_EQ(m.at(0, 2), Valuation(4));
  EXPECT_EQ(m.at(1, 2), Valuation(3));
  EXPECT_THROW(valuation_matrix({1, 2, 1}, Prime(2)), DuplicatePoint);
}

TEST(ValuationMatrix, RejectsMalformedEntries) {
  const auto inf = Valuation::infinity();
  EXPECT_THROW(ValuationMatrix(Prime(2), 2, {inf, 1, 2, inf}), InvalidArgument);
  EXPECT_THROW(ValuationMatrix(Prime(2), 2, {0, 1, 1, inf}), InvalidArgument);
  EXPECT_THROW(ValuationMatrix(Prime(2), 2, {inf, 1, 1}), InvalidArgument);
}

TEST(BuildDendrogram, Figure2) {
  const Dendrogram d = build_dendrogram(toy_data_with_infinity(), Prime(2));
  EXPECT_EQ(signature(d), kFigure2);
  EXPECT_TRUE(d.has_infinity_end());
  EXPECT_EQ(d.root_level(), 0);
  EXPECT_EQ(d.leaf_count(), 8U);
}

TEST(BuildDendrogram, SmallCases) {
  const Dendrogram tripod = build_dendrogram({0, 1, ExtendedPoint::infinity()}, Prime(2));
  EXPECT_EQ(signature(tripod), "(0,1,inf)@0");
  EXPECT_EQ(tripod.nodes().size(), 3U);
  const Dendrogram pair = build_dendrogram({0, 64}, Prime(2));
  EXPECT_EQ(signature(pair), "(0,64)@6");
  EXPECT_FALSE(pair.has_infinity_end());
  // infinity placement in the input does not matter
  EXPECT_EQ(build_dendrogram({ExtendedPoint::infinity(), 0, 1}, Prime(2)), tripod);
}

TEST(BuildDendrogram, NegativeLevels) {
  const Dendrogram d = build_dendrogram({Rational(1, 2), Rational(3, 2), 2}, Prime(2));
  EXPECT_EQ(signature(d), "((1/2,3/2)@0,2)@-1");
}

TEST(BuildDendrogram, Errors) {
  EXPECT_THROW(build_dendrogram({1, 1}, Prime(2)), DuplicatePoint);
  EXPECT_THROW(build_dendrogram({1}, Prime(2)), TooFewPoints);
  EXPECT_THROW(build_dendrogram({1, ExtendedPoint::infinity()}, Prime(2)), TooFewPoints);
  EXPECT_THROW(build_dendrogram({1, ExtendedPoint::infinity(), ExtendedPoint::infinity()}, Prime(2)), DuplicatePoint);
}

TEST(Cophenetic, Figure2) {
  const Dendrogram d = build_dendrogram(toy_data_with_infinity(), Prime(2));
  // indices: 0 1 3 4 12 20 32 64
  EXPECT_EQ(cophenetic_valuation(d, 0, 7), Valuation(6));
  EXPECT_EQ(cophenetic_valuation(d, 5, 7), Valuation(2));
  EXPECT_EQ(cophenetic_valuation(d, 1, 2), Valuation(1));
  EXPECT_THROW(cophenetic_valuation(d, 0, 8), IndexOutOfRange);
}

TEST(Dendrogram, StructuralInvariantsOnRandomInputs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint64_t p = std::array<std::uint64_t, 3>{2, 3, 5}[trial % 3];
    const std::size_t n = testing::uniform_index(rng, 2, 16);
    const bool integers = trial % 2 == 0;
    auto pts = random_points(rng, p, n, integers);
    const Dendrogram d = build_dendrogram(pts, Prime(p));
    for (const auto& node : d.nodes()) {
      if (node.is_leaf()) continue;
      ASSERT_GE(node.children.size(), 2U);
      ASSERT_LE(node.children.size(), p);  // residue classes at one level
      for (auto c : node.children) {
        if (!d.node(c).is_leaf()) ASSERT_GT(d.node(c).level, node.level);
      }
    }
    // lowest common ancestors reproduce every pairwise valuation
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        ASSERT_EQ(cophenetic_valuation(d, i, j), pairwise_valuation(pts[i], pts[j], Prime(p)));
      }
    }
  }
}

TEST(Oracle, SmallCases) {
  const auto d = single_linkage_oracle(valuation_matrix({4, 12, 20}, Prime(2)));
  EXPECT_EQ(signature(d), "((4,20)@4,12)@3");
  EXPECT_EQ(signature(single_linkage_oracle(valuation_matrix({3, 5}, Prime(2)))), "(3,5)@1");
  EXPECT_EQ(signature(single_linkage_oracle(valuation_matrix(toy_data_with_infinity(), Prime(2)))),
            signature(build_dendrogram(toy_data_with_infinity(), Prime(2)), false));
}

TEST(Oracle, UnlabeledMatrixUsesRowIndices) {
  const auto inf = Valuation::infinity();
  const ValuationMatrix m(Prime(3), 3, {inf, 2, 0, 2, inf, 0, 0, 0, inf});
  EXPECT_EQ(signature(single_linkage_oracle(m)), "((0,1)@2,2)@0");
}

TEST(Oracle, RejectsNonUltrametric) {
  const auto inf = Valuation::infinity();
  const ValuationMatrix m(Prime(2), 3, {inf, 1, 2, 1, inf, 3, 2, 3, inf});
  EXPECT_FALSE(m.is_strongly_ultrametric());
  EXPECT_THROW(single_linkage_oracle(m), NotUltrametric);
}

TEST(Oracle, AgreesWithConstruction) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t p = std::array<std::uint64_t, 3>{2, 3, 5}[trial % 3];
    auto pts = random_points(rng, p, testing::uniform_index(rng, 2, 16));
    if (trial % 4 == 0) pts.insert(pts.begin() + static_cast<long>(trial % 3), ExtendedPoint::infinity());
    const Prime prime(p);
    ASSERT_EQ(signature(build_dendrogram(pts, prime), false), signature(single_linkage_oracle(valuation_matrix(pts, prime))));
  }
}

TEST(Signature, InvariantUnderChildOrder) {
  const Dendrogram d = build_dendrogram(toy_data_with_infinity(), Prime(2));
  Cluster reversed = d.to_cluster();
  auto flip = [](auto&& self, Cluster& c) -> void {
    std::reverse(c.children.begin(), c.children.end());
    for (auto& k : c.children) self(self, k);
  };
  flip(flip, reversed);
  const Dendrogram again(Prime(2), d.points(), reversed, true);
  EXPECT_EQ(signature(again), signature(d));
  EXPECT_EQ(again, d);
  EXPECT_NE(signature(build_dendrogram({0, 1, ExtendedPoint::infinity()}, Prime(2))),
            signature(build_dendrogram({0, 1, 2, ExtendedPoint::infinity()}, Prime(2))));
  EXPECT_EQ(shape_signature(d), "((((0,7)@6,6)@5,((3,5)@4,4)@3)@2,(1,2)@1)@0");
}

TEST(Dendrogram, ConstructorSuppressesUnaryAndValidates) {
  const Cluster chain = Cluster::make_internal(
      0, {Cluster::make_internal(1, {Cluster::make_internal(2, {Cluster::make_leaf(0), Cluster::make_leaf(1)})})});
  const Dendrogram d(Prime(2), {0, 4}, chain, false);
  EXPECT_EQ(signature(d), "(0,4)@2");
  EXPECT_THROW(Dendrogram(Prime(2), {0, 4}, Cluster::make_internal(2, {Cluster::make_leaf(0), Cluster::make_leaf(0)}), false),
               InvalidArgument);
  EXPECT_THROW(Dendrogram(Prime(2), {0, 4, 8},
                          Cluster::make_internal(3, {Cluster::make_leaf(0),
                                                     Cluster::make_internal(2, {Cluster::make_leaf(1), Cluster::make_leaf(2)})}),
                          false),
               InvalidArgument);
}

// ---------------------------------------------------------------------------
// Serialization

TEST(Newick, TwoLeaves) { EXPECT_EQ(to_newick(build_dendrogram({0, 64}, Prime(2))), "(0:6,64:6);"); }

TEST(Golden, Figure2Formats) {
  const Dendrogram d = build_dendrogram(toy_data_with_infinity(), Prime(2));
  EXPECT_EQ(to_newick(d) + "\n", read_golden("figure2.newick"));
  EXPECT_EQ(to_dot(d), read_golden("figure2.dot"));
  EXPECT_EQ(to_json(d) + "\n", read_golden("figure2.json"));
  EXPECT_EQ(from_json(read_golden("figure2.json")), d);
}

TEST(Json, RoundTripRandom) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t p = std::array<std::uint64_t, 3>{2, 3, 5}[trial % 3];
    auto pts = random_points(rng, p, testing::uniform_index(rng, 2, 14));
    if (trial % 2) pts.push_back(ExtendedPoint::infinity());
    const Dendrogram d = build_dendrogram(pts, Prime(p));
    const std::string text = to_json(d);
    ASSERT_EQ(from_json(text), d);
    ASSERT_EQ(to_json(from_json(text)), text);
  }
}

TEST(Json, ParseErrorsHavePositions) {
  try {
    from_json("{\n  \"p\": 2,\n  \"points\": [\"0\", ]\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3U);
    EXPECT_GT(e.column(), 1U);
  }
  EXPECT_THROW(from_json(R"({"p": 4, "points": ["0","1"], "tree": {"leaf": 0}})"), InvalidPrime);
  EXPECT_THROW(from_json(R"({"p": 2, "points": ["0","1/0"], "tree": {"leaf": 0}})"), ParseError);
  EXPECT_THROW(from_json(R"({"p": 2, "points": ["0","1"], "tree": {"level": 0, "children": [{"leaf": 0}]}})"),
               ParseError);
  // well-formed tree that is not the dendrogram of its points
  EXPECT_THROW(from_json(R"({"p": 2, "points": ["0","1"], "tree": {"level": 3, "children": [{"leaf": 0},{"leaf": 1}]}})"),
               ParseError);
}

TEST(Dot, MarksInfinityAndLevels) {
  const std::string dot = to_dot(build_dendrogram({0, 1, ExtendedPoint::infinity()}, Prime(2)));
  EXPECT_NE(dot.find("inf -> n0"), std::string::npos);
  EXPECT_NE(dot.find("// level 0"), std::string::npos);
  EXPECT_EQ(to_dot(build_dendrogram({0, 1}, Prime(2))).find("inf"), std::string::npos);
}

}  // namespace
}  // namespace padendro
