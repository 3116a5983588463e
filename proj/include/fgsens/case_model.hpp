#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgsens/marker.hpp"
#include "fgsens/network.hpp"

namespace fgsens {

enum class Topology { criminal_id, mixture, paternity, sibship };

inline std::string topology_name(Topology t) {
  switch (t) {
    case Topology::criminal_id: return "criminal-id";
    case Topology::mixture: return "mixture";
    case Topology::paternity: return "paternity";
    case Topology::sibship: return "sibship";
  }
  return "?";
}

inline Topology topology_from_name(const std::string& s) {
  if (s == "criminal-id") return Topology::criminal_id;
  if (s == "mixture") return Topology::mixture;
  if (s == "paternity") return Topology::paternity;
  if (s == "sibship") return Topology::sibship;
  throw std::invalid_argument("unknown topology: " + s);
}

struct GenotypePair {
  std::string a, b;  // unordered
};

struct MarkerEvidence {
  std::map<std::string, GenotypePair> genotypes;  // actor role -> observed genotype
  std::optional<GenotypePair> trace;              // criminal-id
  std::optional<std::vector<std::string>> mix;    // mixture allele set
};

struct CaseSpec {
  Topology topology = Topology::criminal_id;
  std::vector<std::string> markers;
  std::map<std::string, MarkerEvidence> evidence;  // by marker name
  double target_prior = 0.5;                       // prior of the "true" state
  std::string mixture_h0 = "s&v";
  std::string mixture_h1 = "as&v";

  const MarkerEvidence& marker_evidence(const std::string& m) const {
    auto it = evidence.find(m);
    if (it == evidence.end()) throw std::invalid_argument("no evidence entry for marker " + m);
    return it->second;
  }
};

// Founding actors per topology, in slot order.
inline std::vector<std::string> founding_actors(Topology t) {
  switch (t) {
    case Topology::criminal_id: return {"s", "as"};
    case Topology::mixture: return {"s", "v", "as", "av"};
    case Topology::paternity: return {"m", "pf", "af"};
    case Topology::sibship: return {"m1", "m2", "af", "tf2"};
  }
  return {};
}

// Actors whose genotypes the case observes.
inline std::vector<std::string> typed_actors(Topology t) {
  switch (t) {
    case Topology::criminal_id: return {"s"};
    case Topology::mixture: return {"s", "v"};
    case Topology::paternity: return {"m", "pf"};
    case Topology::sibship: return {"m1", "m2"};
  }
  return {};
}

// The actor pair whose founding genes IBD patterns couple.
inline std::pair<std::string, std::string> default_ibd_pair(Topology t) {
  switch (t) {
    case Topology::criminal_id: return {"s", "as"};
    case Topology::mixture: return {"as", "av"};
    case Topology::paternity: return {"pf", "af"};
    case Topology::sibship: return {"tf2", "af"};
  }
  return {};
}

struct FounderSlot {
  std::string actor;
  bool paternal;
  std::string var_id;
};

inline std::vector<FounderSlot> founder_slots(Topology t) {
  std::vector<FounderSlot> out;
  for (const auto& a : founding_actors(t)) {
    out.push_back({a, true, a + "pg"});
    out.push_back({a, false, a + "mg"});
  }
  return out;
}

// --- deterministic and Mendelian factor builders -----------------------------

// child gene copies ppg or pmg with probability 1/2 each.
inline Factor mendelian_factor(const Variable& ppg, const Variable& pmg, const Variable& child) {
  if (!ppg.same_domain(pmg) || !ppg.same_domain(child))
    throw std::invalid_argument("mendelian_factor: domain mismatch");
  const std::size_t k = child.size();
  std::vector<double> t(k * k * k, 0.0);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t m = 0; m < k; ++m)
      for (std::size_t c = 0; c < k; ++c)
        t[(p * k + m) * k + c] = 0.5 * ((c == p) + (c == m));
  return Factor({ppg, pmg, child}, std::move(t));
}

// gt is the unordered pair {pg, mg}; deterministic 0/1 table.
inline Factor genotype_factor(const Marker& marker, const Variable& pg, const Variable& mg,
                              const Variable& gt) {
  const std::size_t k = marker.alleles.size();
  if (pg.size() != k || mg.size() != k) throw std::invalid_argument("genotype_factor: domain mismatch");
  std::vector<double> t(k * k * gt.size(), 0.0);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t m = 0; m < k; ++m) {
      std::size_t g = gt.index_of(genotype_label(marker, static_cast<int>(p), static_cast<int>(m)));
      t[(p * k + m) * gt.size() + g] = 1.0;
    }
  return Factor({pg, mg, gt}, std::move(t));
}

// out copies if_true when sw is "true", if_false otherwise.
inline Factor selector_factor(const Variable& out, const Variable& if_true, const Variable& if_false,
                              const Variable& sw) {
  if (!out.same_domain(if_true) || !out.same_domain(if_false))
    throw std::invalid_argument("selector_factor: domain mismatch");
  if (sw.size() != 2) throw std::invalid_argument("selector_factor: switch must be boolean");
  const std::size_t k = out.size();
  const std::size_t ti = sw.index_of("true");
  std::vector<double> t(k * k * 2 * k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t s = 0; s < 2; ++s) {
        std::size_t pick = (s == ti) ? a : b;
        t[((a * k + b) * 2 + s) * k + pick] = 1.0;
      }
  return Factor({if_true, if_false, sw, out}, std::move(t));
}

// mix is the set union of the alleles in the two genotypes.
inline Factor mixture_factor(const Marker& marker, const Variable& p1gt, const Variable& p2gt,
                             const Variable& mix) {
  const int k = static_cast<int>(marker.alleles.size());
  auto pairs = genotype_pairs(k);
  if (p1gt.size() != pairs.size() || p2gt.size() != pairs.size())
    throw std::invalid_argument("mixture_factor: genotype domain mismatch");
  std::vector<double> t(pairs.size() * pairs.size() * mix.size(), 0.0);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      std::uint32_t mask = (1u << pairs[i].first) | (1u << pairs[i].second) |
                           (1u << pairs[j].first) | (1u << pairs[j].second);
      std::size_t m = mix.index_of(mixture_label(marker, mask));
      t[(i * pairs.size() + j) * mix.size() + m] = 1.0;
    }
  return Factor({p1gt, p2gt, mix}, std::move(t));
}

// --- case compilation --------------------------------------------------------

// Supplies the founding-gene factors (and any auxiliary machinery) for one
// marker slice. Implementations may add extra variables to the network.
using FounderAttachment =
    std::function<void(Network&, const std::vector<FounderSlot>&, const MarkerContext&)>;

inline FounderAttachment baseline_attachment() {
  return [](Network& net, const std::vector<FounderSlot>& slots, const MarkerContext& ctx) {
    for (const auto& s : slots)
      net.add_cpt(s.var_id, Factor({net.variable(s.var_id)}, ctx.marker.freq));
  };
}

struct CompiledCase {
  Network net;
  std::string target;     // target variable id
  std::string h0_state;
  std::string h1_state;
  double h0_prior = 0.5;  // prior mass of h0_state / h1_state
  double h1_prior = 0.5;
  std::vector<FounderSlot> slots;
};

namespace detail {

inline std::string genotype_evidence_state(const Marker& m, const GenotypePair& g) {
  return genotype_state(m, g.a, g.b);
}

inline const GenotypePair& require_genotype(const CaseSpec& cs, const std::string& marker,
                                            const std::string& actor) {
  const auto& ev = cs.marker_evidence(marker);
  auto it = ev.genotypes.find(actor);
  if (it == ev.genotypes.end())
    throw std::invalid_argument("marker " + marker + ": missing genotype for actor " + actor);
  return it->second;
}

}  // namespace detail

// Builds the per-marker network for a case, with evidence pre-entered.
inline CompiledCase compile_case(const CaseSpec& cs, const std::string& marker_name,
                                 const MarkerContext& ctx, const FounderAttachment& founders) {
  const Marker& mk = ctx.marker;
  CompiledCase out;
  Network& net = out.net;
  out.slots = founder_slots(cs.topology);
  for (const auto& s : out.slots) net.add_variable(mk.gene_variable(s.var_id));

  auto add_genotype = [&](const std::string& actor) {
    net.add_variable(genotype_variable(mk, actor + "gt"));
    net.add_cpt(actor + "gt", genotype_factor(mk, net.variable(actor + "pg"),
                                              net.variable(actor + "mg"), net.variable(actor + "gt")));
  };

  const auto& ev = cs.marker_evidence(marker_name);
  const double q = cs.target_prior;
  if (q <= 0.0 || q >= 1.0) throw std::invalid_argument("target prior must lie in (0,1)");

  switch (cs.topology) {
    case Topology::criminal_id: {
      add_genotype("s");
      add_genotype("as");
      net.add_variable(genotype_variable(mk, "trace"));
      net.add_variable(boolean_variable("guilty"));
      net.add_cpt("guilty", Factor({net.variable("guilty")}, {q, 1.0 - q}));
      net.add_cpt("trace", selector_factor(net.variable("trace"), net.variable("sgt"),
                                           net.variable("asgt"), net.variable("guilty")));
      if (!ev.trace) throw std::invalid_argument("marker " + marker_name + ": criminal-id needs a trace");
      net.set_evidence("sgt", detail::genotype_evidence_state(mk, detail::require_genotype(cs, marker_name, "s")));
      net.set_evidence("trace", detail::genotype_evidence_state(mk, *ev.trace));
      out.target = "guilty";
      out.h0_state = "true";
      out.h1_state = "false";
      out.h0_prior = q;
      out.h1_prior = 1.0 - q;
      break;
    }
    case Topology::mixture: {
      for (const auto& a : {"s", "v", "as", "av"}) add_genotype(a);
      net.add_variable(boolean_variable("p1=s?"));
      net.add_variable(boolean_variable("p2=v?"));
      net.add_cpt("p1=s?", Factor({net.variable("p1=s?")}, {0.5, 0.5}));
      net.add_cpt("p2=v?", Factor({net.variable("p2=v?")}, {0.5, 0.5}));
      net.add_variable(genotype_variable(mk, "p1gt"));
      net.add_variable(genotype_variable(mk, "p2gt"));
      net.add_cpt("p1gt", selector_factor(net.variable("p1gt"), net.variable("sgt"),
                                          net.variable("asgt"), net.variable("p1=s?")));
      net.add_cpt("p2gt", selector_factor(net.variable("p2gt"), net.variable("vgt"),
                                          net.variable("avgt"), net.variable("p2=v?")));
      net.add_variable(mixture_variable(mk, "mix"));
      net.add_cpt("mix", mixture_factor(mk, net.variable("p1gt"), net.variable("p2gt"),
                                        net.variable("mix")));
      // target enumerates the four contributor hypotheses
      Variable target("target", {"s&v", "s&av", "as&v", "as&av"});
      net.add_variable(target);
      {
        std::vector<double> t(2 * 2 * 4, 0.0);
        auto idx = [&](bool p1, bool p2) { return p1 ? (p2 ? 0 : 1) : (p2 ? 2 : 3); };
        for (int p1 = 0; p1 < 2; ++p1)
          for (int p2 = 0; p2 < 2; ++p2) {
            // state order of boolean_variable: {"true","false"}
            bool b1 = (p1 == 0), b2 = (p2 == 0);
            t[(p1 * 2 + p2) * 4 + idx(b1, b2)] = 1.0;
          }
        net.add_cpt("target", Factor({net.variable("p1=s?"), net.variable("p2=v?"), target}, std::move(t)));
      }
      if (!ev.mix) throw std::invalid_argument("marker " + marker_name + ": mixture needs a mix allele set");
      net.set_evidence("sgt", detail::genotype_evidence_state(mk, detail::require_genotype(cs, marker_name, "s")));
      net.set_evidence("vgt", detail::genotype_evidence_state(mk, detail::require_genotype(cs, marker_name, "v")));
      net.set_evidence("mix", mixture_state(mk, *ev.mix));
      out.target = "target";
      out.h0_state = cs.mixture_h0;
      out.h1_state = cs.mixture_h1;
      out.h0_prior = 0.25;
      out.h1_prior = 0.25;
      net.variable("target").index_of(out.h0_state);
      net.variable("target").index_of(out.h1_state);
      break;
    }
    case Topology::paternity: {
      add_genotype("m");
      add_genotype("pf");
      net.add_variable(boolean_variable("tf=pf?"));
      net.add_cpt("tf=pf?", Factor({net.variable("tf=pf?")}, {q, 1.0 - q}));
      net.add_variable(mk.gene_variable("tfpg"));
      net.add_variable(mk.gene_variable("tfmg"));
      net.add_cpt("tfpg", selector_factor(net.variable("tfpg"), net.variable("pfpg"),
                                          net.variable("afpg"), net.variable("tf=pf?")));
      net.add_cpt("tfmg", selector_factor(net.variable("tfmg"), net.variable("pfmg"),
                                          net.variable("afmg"), net.variable("tf=pf?")));
      net.add_variable(mk.gene_variable("cpg"));
      net.add_variable(mk.gene_variable("cmg"));
      net.add_cpt("cpg", mendelian_factor(net.variable("tfpg"), net.variable("tfmg"), net.variable("cpg")));
      net.add_cpt("cmg", mendelian_factor(net.variable("mpg"), net.variable("mmg"), net.variable("cmg")));
      net.add_variable(genotype_variable(mk, "cgt"));
      net.add_cpt("cgt", genotype_factor(mk, net.variable("cpg"), net.variable("cmg"), net.variable("cgt")));
      net.set_evidence("mgt", detail::genotype_evidence_state(mk, detail::require_genotype(cs, marker_name, "m")));
      net.set_evidence("pfgt", detail::genotype_evidence_state(mk, detail::require_genotype(cs, marker_name, "pf")));
      net.set_evidence("cgt", detail::genotype_evidence_state(mk, detail::require_genotype(cs, marker_name, "c")));
      out.target = "tf=pf?";
      out.h0_state = "true";
      out.h1_state = "false";
      out.h0_prior = q;
      out.h1_prior = 1.0 - q;
      break;
    }
    case Topology::sibship: {
      add_genotype("m1");
      add_genotype("m2");
      net.add_variable(boolean_variable("tf1=tf2?"));
      net.add_cpt("tf1=tf2?", Factor({net.variable("tf1=tf2?")}, {q, 1.0 - q}));
      net.add_variable(mk.gene_variable("tf1pg"));
      net.add_variable(mk.gene_variable("tf1mg"));
      net.add_cpt("tf1pg", selector_factor(net.variable("tf1pg"), net.variable("tf2pg"),
                                           net.variable("afpg"), net.variable("tf1=tf2?")));
      net.add_cpt("tf1mg", selector_factor(net.variable("tf1mg"), net.variable("tf2mg"),
                                           net.variable("afmg"), net.variable("tf1=tf2?")));
      struct Child { const char* id; const char* fpg; const char* fmg; const char* mpg; const char* mmg; };
      const Child kids[] = {{"c1", "tf1pg", "tf1mg", "m1pg", "m1mg"},
                            {"c21", "tf2pg", "tf2mg", "m2pg", "m2mg"},
                            {"c22", "tf2pg", "tf2mg", "m2pg", "m2mg"}};
      for (const auto& c : kids) {
        std::string id = c.id;
        net.add_variable(mk.gene_variable(id + "pg"));
        net.add_variable(mk.gene_variable(id + "mg"));
        net.add_cpt(id + "pg", mendelian_factor(net.variable(c.fpg), net.variable(c.fmg),
                                                net.variable(id + "pg")));
        net.add_cpt(id + "mg", mendelian_factor(net.variable(c.mpg), net.variable(c.mmg),
                                                net.variable(id + "mg")));
        net.add_variable(genotype_variable(mk, id + "gt"));
        net.add_cpt(id + "gt", genotype_factor(mk, net.variable(id + "pg"), net.variable(id + "mg"),
                                               net.variable(id + "gt")));
      }
      for (const auto& actor : {"m1", "m2", "c1", "c21", "c22"})
        net.set_evidence(std::string(actor) + "gt",
                         detail::genotype_evidence_state(mk, detail::require_genotype(cs, marker_name, actor)));
      out.target = "tf1=tf2?";
      out.h0_state = "true";
      out.h1_state = "false";
      out.h0_prior = q;
      out.h1_prior = 1.0 - q;
      break;
    }
  }

  founders(net, out.slots, ctx);
  return out;
}

// Alleles appearing in a marker's evidence, in first-seen order.
inline std::vector<std::string> observed_alleles(const CaseSpec& cs, const std::string& marker) {
  std::vector<std::string> out;
  auto add = [&](const std::string& a) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  };
  const auto& ev = cs.marker_evidence(marker);
  for (const auto& [actor, g] : ev.genotypes) {
    add(g.a);
    add(g.b);
  }
  if (ev.trace) {
    add(ev.trace->a);
    add(ev.trace->b);
  }
  if (ev.mix)
    for (const auto& a : *ev.mix) add(a);
  return out;
}

}  // namespace fgsens
