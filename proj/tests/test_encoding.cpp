#include <gtest/gtest.h>

#include <random>

#include "padendro/encoding.hpp"
#include "test_support.hpp"

namespace padendro {
namespace {

AbstractDendrogram labeled(const Cluster& root, std::size_t n) {
  AbstractDendrogram a{{}, root};
  for (std::size_t i = 0; i < n; ++i) a.labels.push_back("x" + std::to_string(i));
  return a;
}

// Level of the lowest common ancestor of leaves i and j.
std::int64_t lca_level(const Cluster& c, std::size_t i, std::size_t j) {
  for (const auto& k : c.children) {
    const auto ls = k.leaves();
    if (std::binary_search(ls.begin(), ls.end(), i) && std::binary_search(ls.begin(), ls.end(), j)) {
      return lca_level(k, i, j);
    }
  }
  return c.level;
}

TEST(Embed, Figure2ReproducesTheIntegers) {
  const Dendrogram d = build_dendrogram(testing::toy_data(), Prime(2));
  const CodeAssignment c = embed_dendrogram(abstract_from(d), DigitAlphabet(Prime(2), 2));
  ASSERT_EQ(c.codes.size(), 8U);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(Rational(code_value(c.codes[i], 2)), d.points()[i]) << c.labels[i];
  }
  EXPECT_EQ(render_code(c.codes[7], 2), "0000001");  // 64
  EXPECT_EQ(decode_to_dendrogram(c, Prime(2)), build_dendrogram(testing::toy_data_with_infinity(), Prime(2)));
}

TEST(Embed, StarNeedsLargeEnoughAlphabet) {
  const auto star = labeled(Cluster::make_internal(0, {Cluster::make_leaf(0), Cluster::make_leaf(1), Cluster::make_leaf(2)}), 3);
  try {
    embed_dendrogram(star, DigitAlphabet(Prime(2), 2));
    FAIL();
  } catch (const BranchingExceedsAlphabet& e) {
    EXPECT_NE(std::string(e.what()).find("{x0,x1,x2}"), std::string::npos);
  }
  const auto c = embed_dendrogram(star, DigitAlphabet(Prime(2), 4));
  EXPECT_EQ(c.codes, (std::vector<std::vector<std::uint64_t>>{{0}, {1}, {2}}));
  EXPECT_THROW(decode_to_dendrogram(c, Prime(2)), InvalidArgument);
}

TEST(Embed, RejectsBadInput) {
  EXPECT_THROW(DigitAlphabet(Prime(2), 6), InvalidArgument);
  EXPECT_THROW(DigitAlphabet(Prime(3), 1), InvalidArgument);
  EXPECT_EQ(DigitAlphabet::at_least(Prime(3), 4).q(), 9U);
  EXPECT_EQ(DigitAlphabet(Prime(3), 27).f(), 3U);
  const auto negative = labeled(Cluster::make_internal(-1, {Cluster::make_leaf(0), Cluster::make_leaf(1)}), 2);
  EXPECT_THROW(embed_dendrogram(negative, DigitAlphabet(Prime(2), 2)), InvalidArgument);
  const auto missing = labeled(Cluster::make_internal(0, {Cluster::make_leaf(0), Cluster::make_leaf(1)}), 3);
  EXPECT_THROW(embed_dendrogram(missing, DigitAlphabet(Prime(2), 2)), InvalidArgument);
}

TEST(Embed, RoundTripAndPrefixLaw) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t p = std::array<std::uint64_t, 3>{2, 3, 5}[trial % 3];
    const std::size_t n = testing::uniform_index(rng, 2, 15);
    std::size_t next = 0;
    const Cluster root = testing::random_tree(rng, n, p, static_cast<std::int64_t>(trial % 3), next);
    const AbstractDendrogram a = labeled(root, n);
    const CodeAssignment c = embed_dendrogram(a, DigitAlphabet(Prime(p), p));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        ASSERT_EQ(static_cast<std::int64_t>(common_prefix_length(c.codes[i], c.codes[j])), lca_level(root, i, j));
      }
    }
    const Dendrogram d = decode_to_dendrogram(c, Prime(p));
    std::vector<Rational> values;
    for (const auto& code : c.codes) values.emplace_back(code_value(code, p));
    ASSERT_EQ(d, Dendrogram(Prime(p), values, root, true));
    ASSERT_EQ(signature(abstract_from(d)), signature(a));
  }
}

TEST(Strings, Example) {
  const auto c = encode_strings({"ab", "ac", "b"}, Prime(2));
  EXPECT_EQ(c.q, 4U);
  EXPECT_EQ(c.codes, (std::vector<std::vector<std::uint64_t>>{{0, 1}, {0, 2}, {1}}));
  EXPECT_EQ(common_prefix_length(c.codes[0], c.codes[1]), 1U);
  EXPECT_EQ(to_json(c), "{\n  \"q\": 4,\n  \"p\": 2,\n  \"codes\": {\n    \"ab\": \"01\",\n    \"ac\": \"02\",\n    \"b\": \"1\"\n  }\n}");
  const auto custom = encode_strings({"ba"}, Prime(3), "ab");
  EXPECT_EQ(custom.q, 3U);
  EXPECT_EQ(custom.codes[0], (std::vector<std::uint64_t>{1, 0}));
}

TEST(Strings, Errors) {
  try {
    encode_strings({"ab", "xz"}, Prime(2), "abx");
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("position 2"), std::string::npos);
  }
  EXPECT_THROW(encode_strings({"a", "b", "a"}, Prime(2)), InvalidArgument);
  EXPECT_THROW(encode_strings({"a"}, Prime(2), "aa"), InvalidArgument);
}

TEST(Codes, RenderParseAndJson) {
  EXPECT_EQ(render_code({0, 10, 15}, 16), "0af");
  EXPECT_EQ(render_code({3, 40}, 49), "3,40");
  EXPECT_EQ(parse_code("0af", 16), (std::vector<std::uint64_t>{0, 10, 15}));
  EXPECT_EQ(parse_code("3,40", 49), (std::vector<std::uint64_t>{3, 40}));
  EXPECT_THROW(parse_code("02", 2), ParseError);
  EXPECT_THROW(parse_code("3,49", 49), ParseError);
  const auto c = encode_strings({"hello", "help", "world"}, Prime(3));
  const auto back = code_assignment_from_json(Json::parse(to_json(c)));
  EXPECT_EQ(back.labels, c.labels);
  EXPECT_EQ(back.codes, c.codes);
  EXPECT_EQ(back.q, c.q);
}

TEST(Abstract, FromJson) {
  const auto a = abstract_from_json(Json::parse(
      R"({"labels": ["a","b","c"], "tree": {"level": 0, "children": [{"level": 2, "children": [{"leaf": 0},{"leaf": 2}]},{"leaf": 1}]}})"));
  EXPECT_EQ(signature(a), "((0,2)@2,1)@0");
  EXPECT_THROW(abstract_from_json(Json::parse(R"({"labels": ["a","b"], "tree": {"leaf": 0}})")), ParseError);
  EXPECT_THROW(abstract_from_json(Json::parse(R"({"tree": {"leaf": 0}})")), ParseError);
}

}  // namespace
}  // namespace padendro
