#pragma once

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgsens {

// Identity pattern over the four founding genes of an actor pair, slots
// ordered (apg, amg, bpg, bmg). The six indicators cover the gene pairs
// (apg=amg, apg=bpg, apg=bmg, amg=bpg, amg=bmg, bpg=bmg).
struct IbdPattern {
  std::array<bool, 6> eq{};
  int common = 0;

  static constexpr std::array<std::pair<int, int>, 6> kPairs = {
      std::pair<int, int>{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

  static IbdPattern none() { return IbdPattern{}; }

  static IbdPattern from_bits(const char* bits, int common) {
    IbdPattern p;
    for (int i = 0; i < 6; ++i) {
      if (bits[i] != '0' && bits[i] != '1') throw std::invalid_argument("bad pattern bits");
      p.eq[i] = bits[i] == '1';
    }
    p.common = common;
    p.validate();
    return p;
  }

  std::string key() const {
    std::string s(6, '0');
    for (int i = 0; i < 6; ++i)
      if (eq[i]) s[i] = '1';
    return s;
  }

  bool is_none() const {
    for (bool b : eq)
      if (b) return false;
    return true;
  }

  // Representative (smallest member) of each slot's identity class.
  std::array<int, 4> representatives() const {
    std::array<int, 4> rep = {0, 1, 2, 3};
    auto find = [&](int x) {
      while (rep[x] != x) x = rep[x];
      return x;
    };
    for (int i = 0; i < 6; ++i)
      if (eq[i]) {
        int a = find(kPairs[i].first), b = find(kPairs[i].second);
        if (a != b) rep[std::max(a, b)] = std::min(a, b);
      }
    for (int s = 0; s < 4; ++s) rep[s] = find(s);
    return rep;
  }

  // Identity classes ordered by smallest member; singletons included.
  std::vector<std::vector<int>> classes() const {
    auto rep = representatives();
    std::vector<std::vector<int>> out;
    for (int s = 0; s < 4; ++s) {
      if (rep[s] == s) {
        out.push_back({s});
      } else {
        for (auto& c : out)
          if (c.front() == rep[s]) c.push_back(s);
      }
    }
    return out;
  }

  // Index of the slot's class among classes(), i.e. the order in which fresh
  // draws are consumed.
  std::array<int, 4> class_index() const {
    auto rep = representatives();
    std::array<int, 4> idx{};
    int next = 0;
    std::map<int, int> seen;
    for (int s = 0; s < 4; ++s) {
      auto it = seen.find(rep[s]);
      if (it == seen.end()) {
        seen[rep[s]] = next;
        idx[s] = next++;
      } else {
        idx[s] = it->second;
      }
    }
    return idx;
  }

  void validate() const {
    auto rep = representatives();
    for (int i = 0; i < 6; ++i) {
      bool same = rep[kPairs[i].first] == rep[kPairs[i].second];
      if (same != eq[i])
        throw std::invalid_argument("ibd pattern not transitively closed: " + key());
    }
    int in_classes = 0, classes_hit = 0;
    std::array<int, 4> sz{};
    for (int s = 0; s < 4; ++s) ++sz[rep[s]];
    for (int s = 0; s < 4; ++s)
      if (sz[s] >= 2) {
        ++classes_hit;
        in_classes += sz[s];
      }
    if (is_none()) {
      if (common != 0) throw std::invalid_argument("no-IBD pattern with nonzero common count");
    } else if (common < classes_hit || common > in_classes) {
      throw std::invalid_argument("common-gene count inconsistent with partition: " + key());
    }
  }
};

enum class Family {
  parent_child,
  sibs,
  half_sibs,
  avuncular,
  cousins,
  double_cousins,
  second_cousins,
  parent_and_sib,
  parents_are_sibs,
};

struct ArrangementRow {
  IbdPattern pattern;
  long num, den;  // conditional probability of the pattern given the arrangement
};

// One concrete arrangement of a relationship family (actors and sexes fixed).
// Its prior mass is the family mass divided by `split`. The no-IBD row is
// implicit: each arrangement's rows plus the remainder sum to 1.
struct Arrangement {
  std::string name;
  Family family;
  int split;
  std::vector<ArrangementRow> rows;
};

inline const std::vector<Arrangement>& ibd_arrangements() {
  static const std::vector<Arrangement> table = [] {
    auto row = [](const char* bits, long num, long den, int common) {
      return ArrangementRow{IbdPattern::from_bits(bits, common), num, den};
    };
    std::vector<Arrangement> t;
    t.push_back({"a father of b", Family::parent_child, 4,
                 {row("010000", 1, 2, 1), row("000100", 1, 2, 1)}});
    t.push_back({"a mother of b", Family::parent_child, 4,
                 {row("001000", 1, 2, 1), row("000010", 1, 2, 1)}});
    t.push_back({"b father of a", Family::parent_child, 4,
                 {row("010000", 1, 2, 1), row("001000", 1, 2, 1)}});
    t.push_back({"b mother of a", Family::parent_child, 4,
                 {row("000100", 1, 2, 1), row("000010", 1, 2, 1)}});
    t.push_back({"sibs", Family::sibs, 1,
                 {row("010010", 1, 4, 2), row("010000", 1, 4, 1), row("000010", 1, 4, 1)}});
    t.push_back({"half-sibs, same mother", Family::half_sibs, 2, {row("000010", 1, 2, 1)}});
    t.push_back({"half-sibs, same father", Family::half_sibs, 2, {row("010000", 1, 2, 1)}});
    t.push_back({"a sib of father of b", Family::avuncular, 4,
                 {row("010000", 1, 4, 1), row("000100", 1, 4, 1)}});
    t.push_back({"a sib of mother of b", Family::avuncular, 4,
                 {row("001000", 1, 4, 1), row("000010", 1, 4, 1)}});
    t.push_back({"b sib of father of a", Family::avuncular, 4,
                 {row("010000", 1, 4, 1), row("001000", 1, 4, 1)}});
    t.push_back({"b sib of mother of a", Family::avuncular, 4,
                 {row("000100", 1, 4, 1), row("000010", 1, 4, 1)}});
    t.push_back({"cousins, mothers are sibs", Family::cousins, 4, {row("000010", 1, 4, 1)}});
    t.push_back({"cousins, mother a sib of father b", Family::cousins, 4, {row("000100", 1, 4, 1)}});
    t.push_back({"cousins, father a sib of mother b", Family::cousins, 4, {row("001000", 1, 4, 1)}});
    t.push_back({"cousins, fathers are sibs", Family::cousins, 4, {row("010000", 1, 4, 1)}});
    t.push_back({"double cousins, same sex parents sibs", Family::double_cousins, 2,
                 {row("010010", 1, 16, 2), row("010000", 3, 16, 1), row("000010", 3, 16, 1)}});
    t.push_back({"double cousins, opposite sex parents sibs", Family::double_cousins, 2,
                 {row("001100", 1, 16, 2), row("000100", 3, 16, 1), row("001000", 3, 16, 1)}});
    t.push_back({"2nd cousins, mothers are cousins", Family::second_cousins, 4, {row("000010", 1, 16, 1)}});
    t.push_back({"2nd cousins, mother a cousin of father b", Family::second_cousins, 4,
                 {row("000100", 1, 16, 1)}});
    t.push_back({"2nd cousins, father a cousin of mother b", Family::second_cousins, 4,
                 {row("001000", 1, 16, 1)}});
    t.push_back({"2nd cousins, fathers are cousins", Family::second_cousins, 4, {row("010000", 1, 16, 1)}});
    t.push_back({"b mother and sister to a", Family::parent_and_sib, 4,
                 {row("110100", 1, 4, 3), row("000100", 1, 4, 1), row("010010", 1, 4, 2),
                  row("000010", 1, 4, 1)}});
    t.push_back({"b father and brother to a", Family::parent_and_sib, 4,
                 {row("101010", 1, 4, 3), row("001000", 1, 4, 1), row("010010", 1, 4, 2),
                  row("010000", 1, 4, 1)}});
    t.push_back({"a mother and sister to b", Family::parent_and_sib, 4,
                 {row("011001", 1, 4, 3), row("001000", 1, 4, 1), row("010010", 1, 4, 2),
                  row("000010", 1, 4, 1)}});
    t.push_back({"a father and brother to b", Family::parent_and_sib, 4,
                 {row("000111", 1, 4, 3), row("000100", 1, 4, 1), row("010010", 1, 4, 2),
                  row("010000", 1, 4, 1)}});
    t.push_back({"parents are sibs", Family::parents_are_sibs, 1,
                 {row("111111", 1, 16, 4), row("000111", 1, 16, 3), row("011001", 1, 16, 3),
                  row("101010", 1, 16, 3), row("110100", 1, 16, 3), row("001100", 1, 32, 2),
                  row("100001", 1, 32, 2), row("010010", 3, 16, 2), row("000010", 1, 8, 1),
                  row("010000", 1, 8, 1), row("000100", 1, 32, 1), row("001000", 1, 32, 1),
                  row("100000", 1, 32, 1), row("000001", 1, 32, 1)}});
    return t;
  }();
  return table;
}

// Prior mass over relationship families; the remainder up to 1 is unrelated.
struct RelationshipPrior {
  double unrelated = 1.0;
  double parent_child = 0.0;
  double sibs = 0.0;
  double half_sibs = 0.0;
  double avuncular = 0.0;
  double cousins = 0.0;
  double double_cousins = 0.0;
  double second_cousins = 0.0;
  double parent_and_sib = 0.0;
  double parents_are_sibs = 0.0;

  double family_mass(Family f) const {
    switch (f) {
      case Family::parent_child: return parent_child;
      case Family::sibs: return sibs;
      case Family::half_sibs: return half_sibs;
      case Family::avuncular: return avuncular;
      case Family::cousins: return cousins;
      case Family::double_cousins: return double_cousins;
      case Family::second_cousins: return second_cousins;
      case Family::parent_and_sib: return parent_and_sib;
      case Family::parents_are_sibs: return parents_are_sibs;
    }
    return 0.0;
  }

  double related_mass() const {
    return parent_child + sibs + half_sibs + avuncular + cousins + double_cousins +
           second_cousins + parent_and_sib + parents_are_sibs;
  }

  void validate() const {
    const double masses[] = {unrelated,       parent_child, sibs,          half_sibs,
                             avuncular,       cousins,      double_cousins, second_cousins,
                             parent_and_sib,  parents_are_sibs};
    for (double m : masses)
      if (m < 0.0) throw std::invalid_argument("relationship prior: negative mass");
    if (related_mass() > 1.0 + 1e-12)
      throw std::invalid_argument("relationship prior: related mass exceeds 1");
  }
};

// The prior resolved into an explicit (relationship, pattern) table. Entry 0 is
// always "unrelated"; only positive-mass arrangements follow. Each entry's
// pattern distribution includes the no-IBD completion.
struct ResolvedIbd {
  struct Entry {
    std::string name;
    double prob;
    std::vector<std::pair<IbdPattern, double>> patterns;  // sums to 1
  };
  std::vector<Entry> entries;
  std::vector<IbdPattern> patterns;  // distinct patterns with positive marginal mass; none first
  std::vector<std::vector<double>> p_pattern_given_entry;  // [entry][pattern]
  std::vector<double> pattern_marginal;

  std::size_t pattern_index(const std::string& key) const {
    for (std::size_t i = 0; i < patterns.size(); ++i)
      if (patterns[i].key() == key) return i;
    throw std::invalid_argument("unknown pattern " + key);
  }

  // P(slots i and j fall in one identity class) under the marginal.
  double pair_identity_probability(int i, int j) const {
    double p = 0.0;
    for (std::size_t t = 0; t < patterns.size(); ++t) {
      auto rep = patterns[t].representatives();
      if (rep[i] == rep[j]) p += pattern_marginal[t];
    }
    return p;
  }
};

inline ResolvedIbd resolve_ibd(const RelationshipPrior& prior) {
  prior.validate();
  ResolvedIbd out;
  double unrelated = 1.0 - prior.related_mass();
  out.entries.push_back({"unrelated", unrelated, {{IbdPattern::none(), 1.0}}});
  for (const auto& arr : ibd_arrangements()) {
    double mass = prior.family_mass(arr.family) / arr.split;
    if (mass <= 0.0) continue;
    ResolvedIbd::Entry e;
    e.name = arr.name;
    e.prob = mass;
    double rest = 1.0;
    for (const auto& r : arr.rows) {
      double p = static_cast<double>(r.num) / static_cast<double>(r.den);
      e.patterns.emplace_back(r.pattern, p);
      rest -= p;
    }
    if (rest < -1e-12) throw std::logic_error("arrangement rows exceed probability 1: " + arr.name);
    if (rest > 1e-12) e.patterns.emplace_back(IbdPattern::none(), rest);
    out.entries.push_back(std::move(e));
  }
  // collect distinct patterns, none first
  std::map<std::string, IbdPattern> seen;
  seen[IbdPattern::none().key()] = IbdPattern::none();
  for (const auto& e : out.entries)
    for (const auto& [p, w] : e.patterns) seen.emplace(p.key(), p);
  out.patterns.push_back(IbdPattern::none());
  for (const auto& [k, p] : seen)
    if (!p.is_none()) out.patterns.push_back(p);
  out.p_pattern_given_entry.assign(out.entries.size(), std::vector<double>(out.patterns.size(), 0.0));
  out.pattern_marginal.assign(out.patterns.size(), 0.0);
  for (std::size_t ei = 0; ei < out.entries.size(); ++ei)
    for (const auto& [p, w] : out.entries[ei].patterns) {
      std::size_t pi = out.pattern_index(p.key());
      out.p_pattern_given_entry[ei][pi] += w;
      out.pattern_marginal[pi] += out.entries[ei].prob * w;
    }
  return out;
}

}  // namespace fgsens
