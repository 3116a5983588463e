#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "fgsens/factor.hpp"
#include "support/oracles.hpp"

using fgsens::Evidence;
using fgsens::Factor;
using fgsens::Variable;

namespace {
Variable var(const std::string& id, int k) {
  std::vector<std::string> states;
  for (int i = 0; i < k; ++i) states.push_back("s" + std::to_string(i));
  return Variable(id, states);
}
}  // namespace

TEST_CASE("multiply by an identity table leaves a factor unchanged") {
  Variable x = var("X", 2);
  Factor f({x}, {0.3, 0.7});
  Factor g({x}, {1.0, 1.0});
  Factor h = f.multiply(g);
  CHECK(h.table() == std::vector<double>{0.3, 0.7});
}

TEST_CASE("multiply of disjoint scopes is the outer product") {
  Factor f({var("X", 2)}, {0.5, 0.5});
  Factor g({var("Y", 2)}, {0.2, 0.8});
  Factor h = f.multiply(g);
  REQUIRE(h.scope().size() == 2);
  CHECK(h.table() == std::vector<double>{0.1, 0.4, 0.1, 0.4});
}

TEST_CASE("multiply matches the nested-loop oracle on a shared variable") {
  std::mt19937 rng(7);
  Variable a = var("A", 2), b = var("B", 3), c = var("C", 2);
  Factor f = oracles::random_factor({a, b}, rng);
  Factor g = oracles::random_factor({b, c}, rng);
  Factor h = f.multiply(g);
  for (std::size_t ia = 0; ia < 2; ++ia)
    for (std::size_t ib = 0; ib < 3; ++ib)
      for (std::size_t ic = 0; ic < 2; ++ic) {
        double expect = f.table()[ia * 3 + ib] * g.table()[ib * 2 + ic];
        std::map<std::string, std::size_t> idx{{"A", ia}, {"B", ib}, {"C", ic}};
        CHECK_THAT(oracles::factor_value_at(h, idx), Catch::Matchers::WithinRel(expect, 1e-14));
      }
}

TEST_CASE("multiply rejects domain mismatch on a shared variable") {
  Factor f({var("X", 2)}, {0.5, 0.5});
  Factor g({var("X", 3)}, {0.2, 0.3, 0.5});
  CHECK_THROWS_AS(f.multiply(g), std::invalid_argument);
}

TEST_CASE("multiply is commutative and associative up to entry reordering") {
  std::mt19937 rng(11);
  Variable a = var("A", 2), b = var("B", 3), c = var("C", 2);
  Factor f = oracles::random_factor({a, b}, rng);
  Factor g = oracles::random_factor({b, c}, rng);
  Factor h = oracles::random_factor({a, c}, rng);
  Factor lhs = f.multiply(g).multiply(h);
  Factor rhs = h.multiply(g.multiply(f));
  std::vector<std::string> order{"A", "B", "C"};
  Factor l2 = lhs.reordered(order), r2 = rhs.reordered(order);
  for (std::size_t i = 0; i < l2.size(); ++i)
    CHECK_THAT(l2.table()[i], Catch::Matchers::WithinRel(r2.table()[i], 1e-12));
}

TEST_CASE("marginalize keeps mass and matches symmetry") {
  Variable x = var("X", 2), y = var("Y", 2);
  Factor f = Factor::filled({x, y}, 0.25);
  Factor m = f.marginalize({"X"});
  CHECK(m.table() == std::vector<double>{0.5, 0.5});
  Factor keep_all = f.marginalize({"X", "Y"});
  CHECK(keep_all.table() == f.table());
}

TEST_CASE("marginalize matches the exhaustive-summation oracle") {
  std::mt19937 rng(3);
  Variable a = var("A", 3), b = var("B", 2), c = var("C", 4);
  Factor f = oracles::random_factor({a, b, c}, rng);
  Factor m = f.marginalize({"A", "C"});
  for (std::size_t ia = 0; ia < 3; ++ia)
    for (std::size_t ic = 0; ic < 4; ++ic) {
      double expect = 0.0;
      for (std::size_t ib = 0; ib < 2; ++ib) expect += f.table()[(ia * 2 + ib) * 4 + ic];
      CHECK_THAT(m.table()[ia * 4 + ic], Catch::Matchers::WithinRel(expect, 1e-13));
    }
  CHECK_THAT(m.total(), Catch::Matchers::WithinRel(f.total(), 1e-13));
}

TEST_CASE("coarsening consistency: marginalize twice equals marginalize once") {
  std::mt19937 rng(5);
  Variable a = var("A", 2), b = var("B", 3), c = var("C", 2);
  Factor f = oracles::random_factor({a, b, c}, rng);
  Factor two_step = f.marginalize({"A", "B"}).marginalize({"A"});
  Factor one_step = f.marginalize({"A"});
  for (std::size_t i = 0; i < one_step.size(); ++i)
    CHECK_THAT(two_step.table()[i], Catch::Matchers::WithinRel(one_step.table()[i], 1e-13));
}

TEST_CASE("marginalize rejects unknown variables") {
  Factor f({var("X", 2)}, {0.5, 0.5});
  CHECK_THROWS_AS(f.marginalize({"Z"}), std::invalid_argument);
}

TEST_CASE("condition zeroes inconsistent entries and keeps the scope") {
  Variable x = var("X", 2);
  Factor f({x}, {0.3, 0.7});
  Factor g = f.condition({{"X", "s1"}});
  CHECK(g.table() == std::vector<double>{0.0, 0.7});
  CHECK(g.scope().size() == 1);
}

TEST_CASE("condition rejects evidence outside the scope or domain") {
  Factor f({var("X", 2)}, {0.3, 0.7});
  CHECK_THROWS_AS(f.condition({{"Y", "s0"}}), std::invalid_argument);
  CHECK_THROWS_AS(f.condition({{"X", "nope"}}), std::invalid_argument);
}

TEST_CASE("condition matches the mask oracle on a random factor") {
  std::mt19937 rng(13);
  Variable a = var("A", 3), b = var("B", 2);
  Factor f = oracles::random_factor({a, b}, rng);
  Factor g = f.condition({{"B", "s1"}});
  for (std::size_t ia = 0; ia < 3; ++ia)
    for (std::size_t ib = 0; ib < 2; ++ib) {
      double expect = ib == 1 ? f.table()[ia * 2 + ib] : 0.0;
      CHECK(g.table()[ia * 2 + ib] == expect);
    }
}

TEST_CASE("reordered permutes entries consistently") {
  std::mt19937 rng(17);
  Variable a = var("A", 2), b = var("B", 3);
  Factor f = oracles::random_factor({a, b}, rng);
  Factor g = f.reordered({"B", "A"});
  for (std::size_t ia = 0; ia < 2; ++ia)
    for (std::size_t ib = 0; ib < 3; ++ib)
      CHECK(g.table()[ib * 2 + ia] == f.table()[ia * 3 + ib]);
}
