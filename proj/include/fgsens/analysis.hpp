#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgsens/case_io.hpp"
#include "fgsens/case_model.hpp"
#include "fgsens/frequency_db.hpp"
#include "fgsens/multimarker.hpp"
#include "fgsens/scenarios.hpp"
#include "fgsens/sensitivity.hpp"

namespace fgsens {

struct RunConfig {
  std::string population;                 // baseline pool
  std::vector<std::string> markers;       // subset filter; empty = all case markers
  std::vector<std::string> scenario_labels;  // filter; empty = baseline + all case scenarios
  bool coarsen = true;
  bool strict_alleles = false;
  double allele_floor = 0.001;
  std::optional<double> posterior_prior;
  bool parallel = true;
};

struct ScenarioColumn {
  std::string label;
  std::vector<double> per_marker_lr;  // aligned with report markers
  double exact_log10 = 0.0;
  double product_log10 = 0.0;
  bool exact_infinite = false;
  std::optional<double> posterior;
};

struct LRReport {
  std::vector<std::string> markers;
  std::vector<ScenarioColumn> columns;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::set<std::string> scenario_populations(const std::vector<ScenarioSpec>& scenarios,
                                                  const std::string& baseline) {
  std::set<std::string> pops{baseline};
  for (const auto& s : scenarios)
    if (s.has_het()) {
      for (const auto& p : s.subpops.pools) pops.insert(p);
      for (const auto& [actor, pool] : s.subpops.assignment)
        if (pool != "latent") pops.insert(pool);
    }
  return pops;
}

}  // namespace detail

// Assembles the per-marker allele domain and population pools, applying the
// default observed+other coarsening and the strict/floor policy for evidence
// alleles missing from the database.
inline MarkerContext build_marker_context(const CaseSpec& cs, const std::string& marker,
                                          const FrequencyDB& db, const std::set<std::string>& pops,
                                          const RunConfig& cfg, std::vector<std::string>* warnings) {
  std::vector<std::pair<std::string, std::map<std::string, double>>> pool_maps;
  // baseline population first
  std::vector<std::string> ordered{cfg.population};
  for (const auto& p : pops)
    if (p != cfg.population) ordered.push_back(p);
  auto observed = observed_alleles(cs, marker);
  for (const auto& pop : ordered) {
    const auto& pm = db.population(pop).markers;
    auto it = pm.find(marker);
    if (it == pm.end())
      throw std::runtime_error("population " + pop + " has no frequencies for marker " + marker);
    std::map<std::string, double> fm = it->second;
    for (const auto& a : observed) {
      if (fm.count(a)) continue;
      if (cfg.strict_alleles)
        throw std::runtime_error("marker " + marker + ": evidence allele " + a +
                                 " absent from population " + pop);
      fm[a] = cfg.allele_floor;
      if (warnings)
        warnings->push_back("marker " + marker + ": allele " + a + " absent from " + pop +
                            ", floored at " + std::to_string(cfg.allele_floor));
      double sum = 0.0;
      for (const auto& [al, fr] : fm) sum += fr;
      for (auto& [al, fr] : fm) fr /= sum;
    }
    pool_maps.emplace_back(pop, std::move(fm));
  }
  if (cfg.coarsen) return coarsen_marker(marker, observed, pool_maps);
  // full domain: union of all pool alleles plus observed, numeric-aware order
  std::set<std::string> all(observed.begin(), observed.end());
  for (const auto& [pop, fm] : pool_maps)
    for (const auto& [a, fr] : fm) all.insert(a);
  std::vector<std::string> alleles(all.begin(), all.end());
  std::sort(alleles.begin(), alleles.end(), [](const std::string& x, const std::string& y) {
    try {
      std::size_t px = 0, py = 0;
      double nx = std::stod(x, &px), ny = std::stod(y, &py);
      if (px == x.size() && py == y.size()) return nx < ny;
    } catch (const std::exception&) {
    }
    return x < y;
  });
  return full_marker_context(marker, alleles, pool_maps);
}

inline std::vector<std::string> effective_markers(const CaseSpec& cs, const RunConfig& cfg) {
  if (cfg.markers.empty()) return cs.markers;
  std::vector<std::string> out;
  for (const auto& m : cfg.markers) {
    if (std::find(cs.markers.begin(), cs.markers.end(), m) == cs.markers.end())
      throw std::invalid_argument("marker " + m + " is not part of the case");
    out.push_back(m);
  }
  return out;
}

inline std::vector<ScenarioSpec> effective_scenarios(const CaseFile& cf, const RunConfig& cfg) {
  std::vector<ScenarioSpec> all;
  bool has_baseline = false;
  for (const auto& s : cf.scenarios) has_baseline |= s.kind == ScenarioSpec::Kind::baseline;
  if (!has_baseline) all.push_back(ScenarioSpec::baseline());
  for (const auto& s : cf.scenarios) all.push_back(s);
  if (cfg.scenario_labels.empty()) return all;
  std::vector<ScenarioSpec> out;
  for (const auto& want : cfg.scenario_labels) {
    bool found = false;
    for (const auto& s : all)
      if (s.label == want) {
        out.push_back(s);
        found = true;
        break;
      }
    if (!found) throw std::invalid_argument("no scenario labelled " + want);
  }
  return out;
}

inline LRReport run_analysis(const CaseFile& cf, const FrequencyDB& db, const RunConfig& cfg) {
  const CaseSpec& cs = cf.spec;
  LRReport report;
  report.markers = effective_markers(cs, cfg);
  auto scenarios = effective_scenarios(cf, cfg);
  auto pops = detail::scenario_populations(scenarios, cfg.population);

  std::map<std::string, MarkerContext> contexts;
  for (const auto& m : report.markers)
    contexts.emplace(m, build_marker_context(cs, m, db, pops, cfg, &report.warnings));

  for (const auto& spec : scenarios) {
    ResolvedScenario rs(cs, spec);
    TableBuildOptions opts;
    opts.parallel = cfg.parallel;
    ScenarioTables st = compute_tables(cs, rs, contexts, report.markers, opts);
    ScenarioColumn col;
    col.label = spec.label;
    for (std::size_t m = 0; m < report.markers.size(); ++m)
      col.per_marker_lr.push_back(per_marker_lr(st, m));
    auto exact = exact_combined(st);
    col.exact_log10 = exact.log10_lr;
    col.exact_infinite = exact.h1_zero;
    col.product_log10 = product_rule_combined(col.per_marker_lr);
    if (cfg.posterior_prior)
      col.posterior = posterior_probability(std::pow(10.0, col.exact_log10), *cfg.posterior_prior);
    report.columns.push_back(std::move(col));
  }
  return report;
}

// --- sensitivity bounds --------------------------------------------------------

struct BoundsRow {
  std::string marker;
  double baseline_lr = 0.0;
  double exact_lr = 0.0;
  // per requested mode, LR-scale extremes
  std::vector<std::pair<double, double>> intervals;
  std::vector<double> epsilons;
};

struct BoundsReport {
  std::string scenario;
  std::vector<EpsMode> modes;
  std::vector<BoundsRow> rows;
  std::vector<std::string> warnings;
};

inline BoundsReport run_bounds(const CaseFile& cf, const FrequencyDB& db, const RunConfig& cfg,
                               const std::string& scenario_label, const std::vector<EpsMode>& modes,
                               std::optional<double> epsilon_override = {},
                               std::size_t config_ceiling = 2'000'000) {
  const CaseSpec& cs = cf.spec;
  ScenarioSpec spec;
  bool found = false;
  for (const auto& s : cf.scenarios)
    if (s.label == scenario_label) {
      spec = s;
      found = true;
      break;
    }
  if (!found) throw std::invalid_argument("no scenario labelled " + scenario_label);
  if (!(spec.kind == ScenarioSpec::Kind::uaf || spec.kind == ScenarioSpec::Kind::ibd ||
        spec.kind == ScenarioSpec::Kind::coancestry))
    throw std::invalid_argument("bounds support uaf, coancestry, or ibd scenarios");

  BoundsReport report;
  report.scenario = scenario_label;
  report.modes = modes;
  auto markers = effective_markers(cs, cfg);
  auto pops = detail::scenario_populations({spec}, cfg.population);
  ResolvedScenario rs(cs, spec);
  ResolvedScenario base(cs, ScenarioSpec::baseline());
  auto pair = spec.pair.value_or(default_ibd_pair(cs.topology));

  for (const auto& m : markers) {
    MarkerContext ctx = build_marker_context(cs, m, db, pops, cfg, &report.warnings);
    auto vectors = founder_likelihood_vectors(cs, m, ctx, config_ceiling);
    auto f0 = base.explicit_joint(ctx, config_ceiling);
    auto f = rs.explicit_joint(ctx, config_ceiling);
    auto constraints = build_constraints(founder_slots(cs.topology), pair, ctx.marker);

    BoundsRow row;
    row.marker = m;
    row.baseline_lr = std::exp(log_lr(f0, vectors));
    row.exact_lr = std::exp(log_lr(f, vectors));
    for (EpsMode mode : modes) {
      SensitivityProblem prob;
      prob.f0 = f0;
      prob.vectors = vectors;
      prob.X = constraints.X;
      prob.mode = mode;
      if (mode == EpsMode::csd_rel) {
        Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(f0.data(), static_cast<Eigen::Index>(f0.size()));
        prob.W = d.asDiagonal();
      }
      if (epsilon_override) {
        prob.epsilon = *epsilon_override;
      } else {
        auto eps = epsilon_from_scenario(f, f0, mode);
        prob.epsilon = eps.value;
        if (!eps.excluded.empty())
          report.warnings.push_back("marker " + m + ": " + std::to_string(eps.excluded.size()) +
                                    " zero-baseline configurations excluded from relative epsilon");
      }
      row.epsilons.push_back(prob.epsilon);
      Extremes ex = (mode == EpsMode::lfp_rel || mode == EpsMode::lfp_abs) ? lfp_extremes(prob)
                                                                           : csd_extremes(prob);
      row.intervals.emplace_back(ex.lo_lr(), ex.hi_lr());
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace fgsens
