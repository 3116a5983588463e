#pragma once

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgsens/case_model.hpp"
#include "fgsens/scenarios.hpp"

namespace fgsens {

// Unnormalized per-marker table p(E_m, T = . | conditioning), stored in logs.
struct MarkerLikelihoodTable {
  std::string marker;
  std::string conditioning;            // value label, or pattern key, or "none"
  double log_h0 = -std::numeric_limits<double>::infinity();
  double log_h1 = -std::numeric_limits<double>::infinity();
};

// All conditioned tables for one marker under one scenario.
struct MarkerTableSet {
  std::string marker;
  std::vector<MarkerLikelihoodTable> tables;  // one per conditioning value
};

enum class ConditioningRoute { independent, relationship, pattern };

struct ScenarioTables {
  ConditioningRoute route = ConditioningRoute::independent;
  std::vector<double> value_priors;        // p(r) for the route's conditioning values
  std::vector<MarkerTableSet> markers;
  // pattern route only:
  std::vector<double> r_priors;            // p(R)
  std::vector<std::vector<double>> p_value_given_r;  // [R][pattern]
  double h0_prior = 0.5, h1_prior = 0.5;
};

namespace detail {

inline double log_sum_exp(const std::vector<double>& xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

// log( sum_j w_j exp(l_j) ), weights >= 0
inline double log_dot(const std::vector<double>& w, const std::vector<double>& l) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < l.size(); ++i)
    if (w[i] > 0.0) mx = std::max(mx, l[i]);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i)
    if (w[i] > 0.0) s += w[i] * std::exp(l[i] - mx);
  return mx + std::log(s);
}

}  // namespace detail

// Overall marginal log-likelihood log p(E | T = t) up to the markerwise
// p(T)^(-N) correction, accumulated over the across-marker latent in log
// space. `pick` selects the h0 or h1 column.
template <typename Pick>
inline double combined_log_likelihood(const ScenarioTables& st, Pick pick) {
  const std::size_t nm = st.markers.size();
  if (st.route == ConditioningRoute::pattern) {
    std::vector<double> per_r;
    for (std::size_t r = 0; r < st.r_priors.size(); ++r) {
      if (st.r_priors[r] <= 0.0) continue;
      double acc = std::log(st.r_priors[r]);
      for (std::size_t m = 0; m < nm; ++m) {
        std::vector<double> logs;
        for (const auto& t : st.markers[m].tables) logs.push_back(pick(t));
        acc += detail::log_dot(st.p_value_given_r[r], logs);
      }
      per_r.push_back(acc);
    }
    return detail::log_sum_exp(per_r);
  }
  std::vector<double> per_r;
  for (std::size_t r = 0; r < st.value_priors.size(); ++r) {
    if (st.value_priors[r] <= 0.0) continue;
    double acc = std::log(st.value_priors[r]);
    for (std::size_t m = 0; m < nm; ++m) acc += pick(st.markers[m].tables[r]);
    per_r.push_back(acc);
  }
  return detail::log_sum_exp(per_r);
}

struct CombinedLr {
  double log10_lr = 0.0;
  bool h1_zero = false;  // denominator likelihood vanished; log10_lr is +inf
  bool h0_zero = false;
};

// Exact across-marker log10 LR: averages over the latent after multiplying the
// per-marker tables, with the target-prior correction.
inline CombinedLr exact_combined(const ScenarioTables& st) {
  const double nm = static_cast<double>(st.markers.size());
  double l0 = combined_log_likelihood(st, [](const MarkerLikelihoodTable& t) { return t.log_h0; });
  double l1 = combined_log_likelihood(st, [](const MarkerLikelihoodTable& t) { return t.log_h1; });
  CombinedLr out;
  out.h0_zero = !std::isfinite(l0);
  out.h1_zero = !std::isfinite(l1);
  if (out.h1_zero && !out.h0_zero) {
    out.log10_lr = std::numeric_limits<double>::infinity();
    return out;
  }
  if (out.h0_zero && !out.h1_zero) {
    out.log10_lr = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.log10_lr = (l0 - l1) / std::log(10.0) + nm * std::log10(st.h1_prior / st.h0_prior);
  return out;
}

// Per-marker LR: averages over the latent before taking the ratio. In the
// pattern route value_priors already hold the marginal pattern distribution.
inline double per_marker_lr(const ScenarioTables& st, std::size_t m) {
  std::vector<double> logs0, logs1;
  for (const auto& t : st.markers[m].tables) {
    logs0.push_back(t.log_h0);
    logs1.push_back(t.log_h1);
  }
  const std::vector<double>& w = st.value_priors;
  double l0 = detail::log_dot(w, logs0);
  double l1 = detail::log_dot(w, logs1);
  if (!std::isfinite(l1)) return std::numeric_limits<double>::infinity();
  return std::exp(l0 - l1) * (st.h1_prior / st.h0_prior);
}

// Product rule: sum of per-marker log10 LRs.
inline double product_rule_combined(const std::vector<double>& per_marker_lrs) {
  double s = 0.0;
  for (double lr : per_marker_lrs) {
    if (lr < 0.0) throw std::invalid_argument("negative LR");
    s += std::log10(lr);
  }
  return s;
}

inline double posterior_probability(double lr, double prior) {
  if (prior <= 0.0 || prior >= 1.0) throw std::invalid_argument("prior must lie in (0,1)");
  if (std::isinf(lr)) return 1.0;
  return lr * prior / (lr * prior + (1.0 - prior));
}

// --- table computation --------------------------------------------------------

struct TableBuildOptions {
  // pattern vs relationship conditioning: automatic picks the smaller value set
  enum class Route { automatic, relationship, pattern } route = Route::automatic;
  bool parallel = true;
};

// Computes log p(E_m, T | r) by compiling and eliminating one network.
inline MarkerLikelihoodTable single_table(const CaseSpec& cs, const std::string& marker,
                                          const MarkerContext& ctx, const FounderAttachment& founders,
                                          const std::string& label) {
  CompiledCase cc = compile_case(cs, marker, ctx, founders);
  auto res = eliminate(cc.net, {cc.target});
  const Variable& tv = cc.net.variable(cc.target);
  MarkerLikelihoodTable t;
  t.marker = marker;
  t.conditioning = label;
  t.log_h0 = res.log_value(tv.index_of(cc.h0_state));
  t.log_h1 = res.log_value(tv.index_of(cc.h1_state));
  return t;
}

inline ScenarioTables compute_tables(const CaseSpec& cs, const ResolvedScenario& rs,
                                     const std::map<std::string, MarkerContext>& contexts,
                                     const std::vector<std::string>& markers,
                                     const TableBuildOptions& opts = {}) {
  ScenarioTables st;
  bool pattern_route = false;
  if (rs.has_pattern_stage()) {
    std::size_t nr = rs.conditioning().size();
    std::size_t np = rs.ibd().patterns.size();
    if (opts.route == TableBuildOptions::Route::pattern)
      pattern_route = true;
    else if (opts.route == TableBuildOptions::Route::automatic)
      pattern_route = np < nr;  // ties go to the relationship route
  }
  std::vector<std::string> labels;
  if (pattern_route) {
    st.route = ConditioningRoute::pattern;
    for (const auto& e : rs.ibd().entries) st.r_priors.push_back(e.prob);
    st.p_value_given_r = rs.ibd().p_pattern_given_entry;
    for (const auto& p : rs.ibd().patterns) labels.push_back(p.key());
    st.value_priors = rs.ibd().pattern_marginal;
  } else {
    st.route = rs.independent() ? ConditioningRoute::independent : ConditioningRoute::relationship;
    for (const auto& c : rs.conditioning()) {
      labels.push_back(c.label);
      st.value_priors.push_back(c.prior);
    }
  }

  // target priors from any one compiled case
  {
    CompiledCase cc = compile_case(cs, markers.front(), contexts.at(markers.front()),
                                   pattern_route ? rs.pattern_attachment(0) : rs.conditioned_attachment(0));
    st.h0_prior = cc.h0_prior;
    st.h1_prior = cc.h1_prior;
  }

  auto build_marker = [&](const std::string& m) {
    MarkerTableSet set;
    set.marker = m;
    for (std::size_t v = 0; v < labels.size(); ++v) {
      auto att = pattern_route ? rs.pattern_attachment(v) : rs.conditioned_attachment(v);
      set.tables.push_back(single_table(cs, m, contexts.at(m), att, labels[v]));
    }
    return set;
  };

  st.markers.resize(markers.size());
  if (opts.parallel && markers.size() > 1) {
    std::vector<std::future<MarkerTableSet>> futs;
    futs.reserve(markers.size());
    for (const auto& m : markers)
      futs.push_back(std::async(std::launch::async, build_marker, m));
    for (std::size_t i = 0; i < futs.size(); ++i) st.markers[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < markers.size(); ++i) st.markers[i] = build_marker(markers[i]);
  }
  return st;
}

}  // namespace fgsens
