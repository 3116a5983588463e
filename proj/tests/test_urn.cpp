#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "fgsens/marker.hpp"
#include "fgsens/network.hpp"
#include "fgsens/urn.hpp"
#include "support/oracles.hpp"

using namespace fgsens;

namespace {

// all set partitions of {0..n-1} as restricted growth strings
std::vector<std::vector<int>> set_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> rgs(n, 0);
  while (true) {
    out.push_back(rgs);
    int i = n - 1;
    for (; i > 0; --i) {
      int mx = 0;
      for (int j = 0; j < i; ++j) mx = std::max(mx, rgs[j]);
      if (rgs[i] <= mx) {
        ++rgs[i];
        for (int j = i + 1; j < n; ++j) rgs[j] = 0;
        break;
      }
    }
    if (i == 0) break;
  }
  return out;
}

std::vector<int> cluster_sizes(const std::vector<int>& rgs) {
  std::vector<int> sizes;
  for (int v : rgs) {
    if (v >= static_cast<int>(sizes.size())) sizes.push_back(0);
    ++sizes[v];
  }
  return sizes;
}

Network urn_network(const std::vector<double>& rho, int n, double M) {
  Network net;
  std::vector<std::string> states;
  for (std::size_t i = 0; i < rho.size(); ++i) states.push_back("a" + std::to_string(i));
  std::vector<std::string> genes;
  for (int i = 1; i <= n; ++i) {
    genes.push_back("g" + std::to_string(i));
    net.add_variable(Variable(genes.back(), states));
  }
  attach_urn(net, genes, rho, M, "u.");
  return net;
}

}  // namespace

TEST_CASE("two-gene joint matches the closed coancestry form") {
  std::vector<double> rho{0.3, 0.7};
  double theta = 0.2;
  double alpha = theta_to_alpha(theta);
  auto f = coancestry_joint(rho, 2, alpha);
  for (std::size_t g1 = 0; g1 < 2; ++g1)
    for (std::size_t g2 = 0; g2 < 2; ++g2) {
      double expect = (1 - theta) * rho[g1] * rho[g2] + theta * (g1 == g2 ? rho[g1] : 0.0);
      CHECK_THAT(f[g1 * 2 + g2], Catch::Matchers::WithinRel(expect, 1e-12));
    }
}

TEST_CASE("huge concentration reproduces the independent product") {
  std::vector<double> rho{0.2, 0.5, 0.3};
  auto f = coancestry_joint(rho, 3, 1e12);
  for (auto cfg : oracles::all_configs(3, 3)) {
    double expect = rho[cfg[0]] * rho[cfg[1]] * rho[cfg[2]];
    std::size_t flat = (cfg[0] * 3 + cfg[1]) * 3 + cfg[2];
    CHECK_THAT(f[flat], Catch::Matchers::WithinAbs(expect, 1e-9));
  }
}

TEST_CASE("closed form equals the sequential recursion") {
  std::vector<double> rho{0.4, 0.6};
  auto f = coancestry_joint(rho, 3, 2.0);
  for (auto cfg : oracles::all_configs(3, 2)) {
    std::size_t flat = (cfg[0] * 2 + cfg[1]) * 2 + cfg[2];
    CHECK_THAT(f[flat], Catch::Matchers::WithinRel(oracles::urn_prob_recursive(cfg, rho, 2.0), 1e-13));
  }
  double total = 0.0;
  for (double v : f) total += v;
  CHECK_THAT(total, Catch::Matchers::WithinRel(1.0, 1e-12));
}

TEST_CASE("the joint is exchangeable in gene order") {
  std::vector<double> rho{0.25, 0.35, 0.4};
  const int n = 4;
  auto f = coancestry_joint(rho, n, 3.5);
  std::vector<int> perm{0, 1, 2, 3};
  auto configs = oracles::all_configs(n, 3);
  do {
    for (const auto& cfg : configs) {
      std::size_t flat = 0, pflat = 0;
      for (int i = 0; i < n; ++i) {
        flat = flat * 3 + cfg[i];
        pflat = pflat * 3 + cfg[perm[i]];
      }
      REQUIRE_THAT(f[flat], Catch::Matchers::WithinRel(f[pflat], 1e-12));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("urn fragment: first output follows the pool and copy odds are 1/(M+1)") {
  std::vector<double> rho{0.3, 0.7};
  double M = 5.0;
  Network net = urn_network(rho, 3, M);
  auto g1 = eliminate(net, {"g1"});
  CHECK_THAT(g1.value(0), Catch::Matchers::WithinRel(0.3, 1e-14));
  auto c2 = eliminate(net, {"u.c2"});
  CHECK_THAT(c2.value(1), Catch::Matchers::WithinRel(1.0 / (M + 1.0), 1e-14));
  // every output marginal stays rho
  for (const char* g : {"g2", "g3"}) {
    auto res = eliminate(net, {g});
    CHECK_THAT(res.value(0), Catch::Matchers::WithinRel(0.3, 1e-13));
  }
}

TEST_CASE("eliminating the urn auxiliaries reproduces the closed-form joint") {
  std::vector<double> rho{0.5, 0.3, 0.2};
  const double M = 5.0;
  const int n = 4;
  Network net = urn_network(rho, n, M);
  auto res = eliminate(net, {"g1", "g2", "g3", "g4"});
  auto expect = coancestry_joint(rho, n, M);
  REQUIRE(res.table.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i)
    CHECK_THAT(res.value(i), Catch::Matchers::WithinAbs(expect[i], 1e-12));
}

TEST_CASE("urn fragment with huge M reproduces independence") {
  std::vector<double> rho{0.6, 0.4};
  Network net = urn_network(rho, 3, 1e12);
  auto res = eliminate(net, {"g1", "g2", "g3"});
  for (auto cfg : oracles::all_configs(3, 2)) {
    std::size_t flat = (cfg[0] * 2 + cfg[1]) * 2 + cfg[2];
    CHECK_THAT(res.value(flat),
               Catch::Matchers::WithinAbs(rho[cfg[0]] * rho[cfg[1]] * rho[cfg[2]], 1e-9));
  }
}

TEST_CASE("partition probability basics") {
  CHECK_THAT(partition_probability(0.7, {1}), Catch::Matchers::WithinRel(1.0, 1e-14));
  CHECK_THAT(partition_probability(123.0, {1}), Catch::Matchers::WithinRel(1.0, 1e-14));
  double alpha = 1.7;
  double z = (alpha + 1) * (alpha + 2);
  CHECK_THAT(partition_probability(alpha, {1, 1, 1}), Catch::Matchers::WithinRel(alpha * alpha / z, 1e-13));
  CHECK_THAT(partition_probability(alpha, {2, 1}), Catch::Matchers::WithinRel(alpha / z, 1e-13));
  CHECK_THAT(partition_probability(alpha, {3}), Catch::Matchers::WithinRel(2.0 / z, 1e-13));
}

TEST_CASE("partition probabilities over all set partitions of four items sum to one") {
  double alpha = 2.0;
  double total = 0.0;
  for (const auto& rgs : set_partitions(4)) total += partition_probability(alpha, cluster_sizes(rgs));
  CHECK_THAT(total, Catch::Matchers::WithinRel(1.0, 1e-12));
}

namespace {

// composed two-stage copy-or-fresh pattern distribution for n = 3, by direct
// enumeration of the stage-2 choice tree and stage-1 partitions
std::array<double, 3> composed_odds_enumerated(double a, double b) {
  double s1_same2 = 1 / (a + 1);
  double s1_same3 = 2 / ((a + 1) * (a + 2));
  double s1_pair3 = a / ((a + 1) * (a + 2));
  double s1_dist3 = a * a / ((a + 1) * (a + 2));
  double allsame = 0, pair = 0, dist = 0;
  double y2_copy = 1 / (b + 1), y2_fresh = b / (b + 1);
  double y3_copy = 1 / (b + 2), y3_fresh = b / (b + 2);
  allsame += y2_copy * 2 * y3_copy;
  double p = y2_copy * y3_fresh;  // {y1,y2} against the second fresh draw
  allsame += p * s1_same2;
  pair += p * (1 - s1_same2);
  p = y2_fresh * y3_copy;  // y3 copies y1 or y2, each with its own branch
  for (int branch = 0; branch < 2; ++branch) {
    allsame += p * s1_same2;
    pair += p * (1 - s1_same2);
  }
  p = y2_fresh * y3_fresh;
  allsame += p * s1_same3;
  pair += p * 3 * s1_pair3;
  dist += p * s1_dist3;
  return {dist, pair, allsame};
}

}  // namespace

TEST_CASE("cascade partition odds match enumeration of the composed process") {
  for (auto [a, b] : std::vector<std::pair<double, double>>{{1, 1}, {2, 3}, {10, 10}, {5, 1}}) {
    auto got = cascade_partition_odds(a, b);
    auto expect = composed_odds_enumerated(a, b);
    for (int i = 0; i < 3; ++i) CHECK_THAT(got[i], Catch::Matchers::WithinRel(expect[i], 1e-12));
    CHECK_THAT(got[0] + got[1] + got[2], Catch::Matchers::WithinRel(1.0, 1e-12));
  }
}

TEST_CASE("with both stages diffuse all genes come out distinct") {
  auto odds = cascade_partition_odds(1e12, 1e12);
  CHECK_THAT(odds[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("pairwise identity of a two-stage cascade is additive to first order") {
  double a = 1e4, b = 1e4;
  double p_same = 1 / (a + 1) + (a / (a + 1)) * (1 / (b + 1));
  CHECK_THAT(p_same, Catch::Matchers::WithinAbs(1 / a + 1 / b, 5e-8));
}

TEST_CASE("no single concentration reproduces the cascaded pattern odds") {
  auto odds = cascade_partition_odds(10.0, 10.0);
  // candidate matching the distinct/pair ratio
  double a1 = 3.0 * odds[0] / odds[1];
  double z = (a1 + 1) * (a1 + 2);
  CHECK(std::abs(2.0 / z - odds[2]) > 1e-3);
  // candidate matching the all-same probability
  double a2 = (-3.0 + std::sqrt(1.0 + 8.0 / odds[2])) / 2.0;
  double z2 = (a2 + 1) * (a2 + 2);
  CHECK(std::abs(a2 * a2 / z2 - odds[0]) > 1e-3);
}
