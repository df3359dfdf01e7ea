#include <doctest.h>

#include "gpae/sexpr.hpp"
#include "test_util.hpp"

using namespace gpae;
using testutil::scope_n;

TEST_CASE("serialize: terminals and nested expressions") {
  CHECK(serialize_tree(ExprTree({TreeNode::constant(0.5)}, scope_n(1))) ==
        "0.5");
  CHECK(serialize_tree(ExprTree({TreeNode::feature_ref(3)}, scope_n(4))) ==
        "x3");
  const ExprTree t(
      {TreeNode::feature_ref(0), TreeNode::feature_ref(1),
       TreeNode::op(NodeKind::kSin), TreeNode::op(NodeKind::kAdd)},
      scope_n(2));
  CHECK(serialize_tree(t) == "(add x0 (sin x1))");
}

TEST_CASE("parse: basic expressions") {
  const ExprTree t = parse_tree("(add x0 (sin x1))", scope_n(2));
  CHECK(t.size() == 4);
  const double x[2] = {0.25, 0.0};
  CHECK(t.eval(x) == 0.25);

  const ExprTree c = parse_tree("  0.5 ", scope_n(1));
  const double y[1] = {0.0};
  CHECK(c.eval(y) == 0.5);

  const ExprTree e = parse_tree("(div 1 x0)", scope_n(1));
  const double z[1] = {0.0};
  CHECK(e.eval(z) == 1.0e6);
}

TEST_CASE("round-trip: 1000 random trees are structurally identical") {
  std::mt19937_64 rng(11);
  const Scope scope = scope_n(12);
  for (int i = 0; i < 1000; ++i) {
    const ExprTree t = random_tree(scope, 4, rng);
    const std::string text = serialize_tree(t);
    const ExprTree back = parse_tree(text, scope);
    REQUIRE(back == t);
    REQUIRE(serialize_tree(back) == text);
  }
}

TEST_CASE("round-trip: constants keep full precision") {
  const double values[] = {1.0 / 3.0, 0.1234567890123456789, 1e-17,
                           0.9999999999999999};
  for (const double v : values) {
    const ExprTree t({TreeNode::constant(v)}, scope_n(1));
    const ExprTree back = parse_tree(serialize_tree(t), scope_n(1));
    REQUIRE(back.nodes()[0].value == v);
  }
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_tree("(add x0)", scope_n(2));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.col() == 8);
  }

  try {
    parse_tree("(add x0\n (mul x9 1))", scope_n(2));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("x9") != std::string::npos);
  }
}

TEST_CASE("parse rejects bad tokens") {
  CHECK_THROWS_AS(parse_tree("(foo x0 x1)", scope_n(2)), ParseError);
  CHECK_THROWS_AS(parse_tree("(add x0 x1", scope_n(2)), ParseError);
  CHECK_THROWS_AS(parse_tree("x1.5", scope_n(2)), ParseError);
  CHECK_THROWS_AS(parse_tree("0.5 0.6", scope_n(2)), ParseError);
  CHECK_THROWS_AS(parse_tree(")", scope_n(2)), ParseError);
  CHECK_THROWS_AS(parse_tree("", scope_n(2)), ParseError);
  CHECK_THROWS_AS(parse_tree("(sin x0 x1)", scope_n(2)), ParseError);
}

TEST_CASE("independent reference evaluator agrees on random trees") {
  std::mt19937_64 rng(17);
  const Scope scope = scope_n(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(6);
  for (int i = 0; i < 300; ++i) {
    const ExprTree t = random_tree(scope, 4, rng);
    for (double& v : x) v = unit(rng);
    const auto ref = testutil::ref_parse(serialize_tree(t));
    REQUIRE(t.eval(x) == testutil::ref_eval(*ref, x));
  }
}
