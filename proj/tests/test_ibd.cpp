#include <boost/rational.hpp>
#include <catch2/catch_amalgamated.hpp>
#include <map>

#include "fgsens/ibd.hpp"

using namespace fgsens;
using Rat = boost::rational<long long>;

namespace {

// Symbolic linear form over the nine family masses, with exact coefficients.
using Form = std::map<Family, Rat>;

Form& operator+=(Form& a, const std::pair<Family, Rat>& term) {
  a[term.first] += term.second;
  return a;
}

// accumulate P(predicate over pattern) as a form in the family masses
template <typename Pred>
Form pattern_mass(Pred pred) {
  Form out;
  for (const auto& arr : ibd_arrangements()) {
    Rat arrangement_share(1, arr.split);
    for (const auto& row : arr.rows)
      if (pred(row.pattern)) out += {arr.family, arrangement_share * Rat(row.num, row.den)};
  }
  return out;
}

bool eq_only(const IbdPattern& p, std::initializer_list<int> bits) {
  std::array<bool, 6> want{};
  for (int b : bits) want[b] = true;
  return p.eq == want;
}

void check_form(const Form& got, const Form& expect) {
  for (const auto& [fam, coeff] : expect) {
    auto it = got.find(fam);
    Rat g = it == got.end() ? Rat(0) : it->second;
    INFO("family " << static_cast<int>(fam));
    CHECK(g == coeff);
  }
  for (const auto& [fam, coeff] : got) {
    if (expect.count(fam)) continue;
    INFO("unexpected family " << static_cast<int>(fam));
    CHECK(coeff == Rat(0));
  }
}

}  // namespace

TEST_CASE("every tabulated pattern is transitively closed with a sane common count") {
  for (const auto& arr : ibd_arrangements())
    for (const auto& row : arr.rows) CHECK_NOTHROW(row.pattern.validate());
}

TEST_CASE("per-arrangement conditional pattern probabilities sum to at most one") {
  for (const auto& arr : ibd_arrangements()) {
    Rat total(0);
    for (const auto& row : arr.rows) total += Rat(row.num, row.den);
    CHECK(total <= Rat(1));
    // parent-child style arrangements always share a gene
    if (arr.family == Family::parent_child || arr.family == Family::parent_and_sib ||
        arr.family == Family::parents_are_sibs)
      CHECK(total == (arr.family == Family::parents_are_sibs ? Rat(15, 16) : Rat(1)));
  }
}

TEST_CASE("sibs deliver four equiprobable patterns") {
  const Arrangement* sibs = nullptr;
  for (const auto& arr : ibd_arrangements())
    if (arr.family == Family::sibs) sibs = &arr;
  REQUIRE(sibs != nullptr);
  REQUIRE(sibs->rows.size() == 3);  // no-IBD row implicit
  for (const auto& row : sibs->rows) CHECK(Rat(row.num, row.den) == Rat(1, 4));
  bool has_both = false, has_pat = false, has_mat = false;
  for (const auto& row : sibs->rows) {
    has_both |= eq_only(row.pattern, {1, 4});
    has_pat |= eq_only(row.pattern, {1});
    has_mat |= eq_only(row.pattern, {4});
  }
  CHECK((has_both && has_pat && has_mat));
}

TEST_CASE("a parent transmits exactly one gene to the child") {
  for (const auto& arr : ibd_arrangements()) {
    if (arr.family != Family::parent_child) continue;
    if (arr.name != "a father of b") continue;
    REQUIRE(arr.rows.size() == 2);
    // bpg equals apg or amg, each with probability 1/2
    CHECK(eq_only(arr.rows[0].pattern, {1}));
    CHECK(eq_only(arr.rows[1].pattern, {3}));
    CHECK(Rat(arr.rows[0].num, arr.rows[0].den) == Rat(1, 2));
  }
}

// The per-pattern identities quoted for the full table, as exact linear forms
// in the family masses.
TEST_CASE("aggregate pattern identities hold exactly on rationals") {
  // (a) apg=bpg alone; by symmetry amg=bmg alone has the same form
  Form expect_a{{Family::parent_child, Rat(1, 4)},   {Family::sibs, Rat(1, 4)},
                {Family::half_sibs, Rat(1, 4)},      {Family::avuncular, Rat(1, 8)},
                {Family::cousins, Rat(1, 16)},       {Family::double_cousins, Rat(3, 32)},
                {Family::second_cousins, Rat(1, 64)},{Family::parent_and_sib, Rat(1, 8)},
                {Family::parents_are_sibs, Rat(1, 8)}};
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {1}); }), expect_a);
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {4}); }), expect_a);

  // (b) apg=bmg alone; symmetric to amg=bpg alone
  Form expect_b{{Family::parent_child, Rat(1, 4)},   {Family::avuncular, Rat(1, 8)},
                {Family::cousins, Rat(1, 16)},       {Family::double_cousins, Rat(3, 32)},
                {Family::second_cousins, Rat(1, 64)},{Family::parent_and_sib, Rat(1, 8)},
                {Family::parents_are_sibs, Rat(1, 32)}};
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {2}); }), expect_b);
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {3}); }), expect_b);

  // (c) apg=amg alone; symmetric to bpg=bmg alone
  Form expect_c{{Family::parents_are_sibs, Rat(1, 32)}};
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {0}); }), expect_c);
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {5}); }), expect_c);

  // (d) apg=bpg and amg=bmg, the pairs distinct
  Form expect_d{{Family::sibs, Rat(1, 4)},
                {Family::double_cousins, Rat(1, 32)},
                {Family::parent_and_sib, Rat(1, 4)},
                {Family::parents_are_sibs, Rat(3, 16)}};
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {1, 4}); }), expect_d);

  // (e) apg=bmg and amg=bpg, the pairs distinct
  Form expect_e{{Family::double_cousins, Rat(1, 32)}, {Family::parents_are_sibs, Rat(1, 32)}};
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {2, 3}); }), expect_e);

  // (f) apg=amg and bpg=bmg, the pairs distinct
  Form expect_f{{Family::parents_are_sibs, Rat(1, 32)}};
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {0, 5}); }), expect_f);

  // (g) all same except one gene, per excluded gene
  Form expect_g{{Family::parent_and_sib, Rat(1, 16)}, {Family::parents_are_sibs, Rat(1, 16)}};
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {3, 4, 5}); }), expect_g);
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {1, 2, 5}); }), expect_g);
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {0, 2, 4}); }), expect_g);
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {0, 1, 3}); }), expect_g);

  // (h) all four identical
  Form expect_h{{Family::parents_are_sibs, Rat(1, 16)}};
  check_form(pattern_mass([](const IbdPattern& p) { return eq_only(p, {0, 1, 2, 3, 4, 5}); }), expect_h);

  // total probability of any IBD
  Form expect_total{{Family::parent_child, Rat(1)},      {Family::sibs, Rat(3, 4)},
                    {Family::half_sibs, Rat(1, 2)},      {Family::avuncular, Rat(1, 2)},
                    {Family::cousins, Rat(1, 4)},        {Family::double_cousins, Rat(7, 16)},
                    {Family::second_cousins, Rat(1, 16)},{Family::parent_and_sib, Rat(1)},
                    {Family::parents_are_sibs, Rat(15, 16)}};
  check_form(pattern_mass([](const IbdPattern& p) { return !p.is_none(); }), expect_total);
}

TEST_CASE("resolve completes each relationship to probability one") {
  RelationshipPrior prior;
  prior.unrelated = 0.0;
  prior.parent_child = 0.2;
  prior.sibs = 0.1;
  prior.half_sibs = 0.1;
  prior.avuncular = 0.1;
  prior.cousins = 0.1;
  prior.double_cousins = 0.1;
  prior.second_cousins = 0.1;
  prior.parent_and_sib = 0.1;
  prior.parents_are_sibs = 0.1;
  auto resolved = resolve_ibd(prior);
  double total = 0.0;
  for (const auto& e : resolved.entries) {
    double sum = 0.0;
    for (const auto& [p, w] : e.patterns) sum += w;
    CHECK_THAT(sum, Catch::Matchers::WithinRel(1.0, 1e-12));
    total += e.prob;
  }
  CHECK_THAT(total, Catch::Matchers::WithinRel(1.0, 1e-12));
  double marg = 0.0;
  for (double w : resolved.pattern_marginal) marg += w;
  CHECK_THAT(marg, Catch::Matchers::WithinRel(1.0, 1e-12));
  // all fifteen distinct patterns appear under a full prior
  CHECK(resolved.patterns.size() == 15);
}

TEST_CASE("the default prior yields the documented arrangements") {
  RelationshipPrior prior;
  prior.unrelated = 0.90;
  prior.parent_child = 0.05;
  prior.half_sibs = 0.05;
  auto resolved = resolve_ibd(prior);
  // unrelated + 4 parent-child arrangements + 2 half-sib arrangements
  REQUIRE(resolved.entries.size() == 7);
  CHECK_THAT(resolved.entries[0].prob, Catch::Matchers::WithinRel(0.90, 1e-14));
  for (std::size_t i = 1; i <= 4; ++i)
    CHECK_THAT(resolved.entries[i].prob, Catch::Matchers::WithinRel(0.0125, 1e-14));
  for (std::size_t i = 5; i <= 6; ++i)
    CHECK_THAT(resolved.entries[i].prob, Catch::Matchers::WithinRel(0.025, 1e-14));
  // no-IBD plus the four single-pair patterns
  CHECK(resolved.patterns.size() == 5);
}

TEST_CASE("pairwise identity chains hold under the default prior") {
  RelationshipPrior prior;
  prior.unrelated = 0.90;
  prior.parent_child = 0.05;
  prior.half_sibs = 0.05;
  auto r = resolve_ibd(prior);
  // slots: 0=apg 1=amg 2=bpg 3=bmg
  double apg_amg = r.pair_identity_probability(0, 1);
  double amg_bpg = r.pair_identity_probability(1, 2);
  double apg_bpg = r.pair_identity_probability(0, 2);
  CHECK(apg_amg < amg_bpg);
  CHECK(amg_bpg < apg_bpg);
  double bpg_bmg = r.pair_identity_probability(2, 3);
  double apg_bmg = r.pair_identity_probability(0, 3);
  double amg_bmg = r.pair_identity_probability(1, 3);
  CHECK(bpg_bmg < apg_bmg);
  CHECK(apg_bmg < amg_bmg);
  CHECK_THAT(apg_bpg, Catch::Matchers::WithinRel(0.025, 1e-12));
  CHECK_THAT(amg_bpg, Catch::Matchers::WithinRel(0.0125, 1e-12));
}

TEST_CASE("pattern helpers expose classes and copy order") {
  IbdPattern p = IbdPattern::from_bits("010010", 2);
  auto rep = p.representatives();
  CHECK(rep == std::array<int, 4>{0, 1, 0, 1});
  auto ci = p.class_index();
  CHECK(ci == std::array<int, 4>{0, 1, 0, 1});
  CHECK(p.classes().size() == 2);
  CHECK_THROWS_AS(IbdPattern::from_bits("110000", 2), std::invalid_argument);  // not closed
}

TEST_CASE("relationship prior validation") {
  RelationshipPrior bad;
  bad.parent_child = 0.7;
  bad.sibs = 0.7;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  RelationshipPrior neg;
  neg.cousins = -0.1;
  CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}
