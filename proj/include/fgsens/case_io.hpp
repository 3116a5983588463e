#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fgsens/case_model.hpp"
#include "fgsens/frequency_db.hpp"
#include "fgsens/scenarios.hpp"

namespace fgsens {

using json = nlohmann::ordered_json;

struct CaseFile {
  CaseSpec spec;
  std::vector<ScenarioSpec> scenarios;
};

namespace detail {

inline std::string allele_from_json(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) {
    double v = j.get<double>();
    long long ll = static_cast<long long>(v);
    if (static_cast<double>(ll) == v) return std::to_string(ll);
    std::ostringstream os;
    os << v;
    return os.str();
  }
  throw std::runtime_error("allele labels must be strings or numbers");
}

inline GenotypePair genotype_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::runtime_error("genotype must be a two-element array");
  return {allele_from_json(j[0]), allele_from_json(j[1])};
}

inline RelationshipPrior prior_from_json(const json& j) {
  RelationshipPrior p;
  p.unrelated = 0.0;
  std::map<std::string, double*> fields = {
      {"unrelated", &p.unrelated},
      {"parent_child", &p.parent_child},
      {"sibs", &p.sibs},
      {"half_sibs", &p.half_sibs},
      {"avuncular", &p.avuncular},
      {"cousins", &p.cousins},
      {"double_cousins", &p.double_cousins},
      {"second_cousins", &p.second_cousins},
      {"parent_and_sib", &p.parent_and_sib},
      {"parents_are_sibs", &p.parents_are_sibs},
  };
  for (const auto& [key, value] : j.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) throw std::runtime_error("unknown relationship prior field: " + key);
    *it->second = value.get<double>();
  }
  p.validate();
  return p;
}

inline HetParams het_from_json(const json& j) {
  HetParams h;
  if (!j.contains("pools")) throw std::runtime_error("het scenario needs \"pools\"");
  for (const auto& p : j.at("pools")) h.pools.push_back(p.get<std::string>());
  if (j.contains("weights"))
    for (const auto& w : j.at("weights")) h.weights.push_back(w.get<double>());
  if (j.contains("assignment"))
    for (const auto& [actor, pool] : j.at("assignment").items())
      h.assignment[actor] = pool.get<std::string>();
  h.resolved_weights();
  return h;
}

}  // namespace detail

inline ScenarioSpec scenario_from_json(const json& j) {
  if (!j.contains("kind")) throw std::runtime_error("scenario entry needs \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  ScenarioSpec s;
  if (kind == "baseline") {
    s = ScenarioSpec::baseline();
  } else if (kind == "coancestry") {
    s = ScenarioSpec::coancestry(j.at("theta").get<double>());
  } else if (kind == "uaf") {
    s = ScenarioSpec::uaf(j.at("M").get<double>());
  } else if (kind == "ibd") {
    s = ScenarioSpec::ibd(detail::prior_from_json(j.at("prior")));
  } else if (kind == "het") {
    s = ScenarioSpec::het(detail::het_from_json(j));
  } else if (kind == "uaf+ibd") {
    s = ScenarioSpec::uaf_ibd(j.at("M").get<double>(), detail::prior_from_json(j.at("prior")));
  } else if (kind == "uaf+het") {
    s = ScenarioSpec::uaf_het(j.at("M").get<double>(), detail::het_from_json(j));
  } else {
    throw std::runtime_error("unknown scenario kind: " + kind);
  }
  if (j.contains("label")) s.label = j.at("label").get<std::string>();
  if (j.contains("actors"))
    for (const auto& a : j.at("actors")) s.uaf_actors.push_back(a.get<std::string>());
  if (j.contains("pair")) {
    const auto& p = j.at("pair");
    if (!p.is_array() || p.size() != 2) throw std::runtime_error("scenario pair must list two actors");
    s.pair = {p[0].get<std::string>(), p[1].get<std::string>()};
  }
  return s;
}

inline CaseFile parse_case(const json& j) {
  CaseFile out;
  CaseSpec& cs = out.spec;
  if (!j.contains("topology")) throw std::runtime_error("case file needs \"topology\"");
  cs.topology = topology_from_name(j.at("topology").get<std::string>());
  if (j.contains("target_prior")) cs.target_prior = j.at("target_prior").get<double>();
  if (j.contains("mixture_hypotheses")) {
    const auto& h = j.at("mixture_hypotheses");
    cs.mixture_h0 = h.at("h0").get<std::string>();
    cs.mixture_h1 = h.at("h1").get<std::string>();
  }

  auto known = founding_actors(cs.topology);
  auto add_marker = [&](const std::string& m) {
    if (std::find(cs.markers.begin(), cs.markers.end(), m) == cs.markers.end()) cs.markers.push_back(m);
  };

  if (!j.contains("actors")) throw std::runtime_error("case file needs \"actors\"");
  for (const auto& [actor, genotypes] : j.at("actors").items()) {
    bool founder = std::find(known.begin(), known.end(), actor) != known.end();
    bool child = (cs.topology == Topology::paternity && actor == "c") ||
                 (cs.topology == Topology::sibship &&
                  (actor == "c1" || actor == "c21" || actor == "c22"));
    if (!founder && !child)
      throw std::runtime_error("unknown actor role \"" + actor + "\" for topology " +
                               topology_name(cs.topology));
    if (genotypes.is_null()) continue;  // untyped actor
    for (const auto& [marker, g] : genotypes.items()) {
      if (g.is_null()) continue;
      add_marker(marker);
      cs.evidence[marker].genotypes[actor] = detail::genotype_from_json(g);
    }
  }
  if (j.contains("evidence")) {
    const auto& ev = j.at("evidence");
    if (ev.contains("trace"))
      for (const auto& [marker, g] : ev.at("trace").items()) {
        add_marker(marker);
        cs.evidence[marker].trace = detail::genotype_from_json(g);
      }
    if (ev.contains("mixture"))
      for (const auto& [marker, alleles] : ev.at("mixture").items()) {
        add_marker(marker);
        std::vector<std::string> mix;
        for (const auto& a : alleles) mix.push_back(detail::allele_from_json(a));
        cs.evidence[marker].mix = std::move(mix);
      }
  }
  if (cs.markers.empty()) throw std::runtime_error("case file defines no markers");

  if (j.contains("scenarios"))
    for (const auto& sj : j.at("scenarios")) out.scenarios.push_back(scenario_from_json(sj));
  return out;
}

inline CaseFile load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open case file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("case file " + path + ": " + e.what());
  }
  return parse_case(j);
}

// Structural checks beyond parsing; returns human-readable problems.
inline std::vector<std::string> validate_case(const CaseFile& cf,
                                              const FrequencyDB* db = nullptr,
                                              const std::string& population = "") {
  std::vector<std::string> problems;
  const CaseSpec& cs = cf.spec;
  auto typed = typed_actors(cs.topology);
  for (const auto& m : cs.markers) {
    const auto& ev = cs.evidence.at(m);
    for (const auto& a : typed)
      if (!ev.genotypes.count(a))
        problems.push_back("marker " + m + ": actor " + a + " should be typed but has no genotype");
    if (cs.topology == Topology::criminal_id && !ev.trace)
      problems.push_back("marker " + m + ": missing trace");
    if (cs.topology == Topology::mixture && !ev.mix)
      problems.push_back("marker " + m + ": missing mixture alleles");
    if (cs.topology == Topology::paternity && !ev.genotypes.count("c"))
      problems.push_back("marker " + m + ": missing child genotype");
    if (db && db->has_population(population)) {
      const auto& pm = db->population(population).markers;
      if (!pm.count(m)) {
        problems.push_back("marker " + m + ": absent from population " + population);
      } else {
        for (const auto& a : observed_alleles(cs, m))
          if (!pm.at(m).count(a))
            problems.push_back("marker " + m + ": allele " + a + " absent from population " + population);
      }
    }
  }
  for (const auto& s : cf.scenarios) {
    try {
      ResolvedScenario rs(cs, s);
      (void)rs;
    } catch (const std::exception& e) {
      problems.push_back("scenario " + s.label + ": " + e.what());
    }
  }
  return problems;
}

}  // namespace fgsens
