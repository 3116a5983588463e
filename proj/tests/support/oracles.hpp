#pragma once

// Test-only oracles, deliberately independent of the library's inference
// paths: full-joint enumeration walks every configuration and reads factor
// tables through manual index arithmetic.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "fgsens/network.hpp"

namespace oracles {

using fgsens::Evidence;
using fgsens::Factor;
using fgsens::Network;
using fgsens::Variable;

inline double factor_value_at(const Factor& f, const std::map<std::string, std::size_t>& idx) {
  std::size_t flat = 0;
  for (const auto& v : f.scope()) flat = flat * v.size() + idx.at(v.id());
  return f.table()[flat];
}

// Sums the product of all cpt entries over every full configuration consistent
// with the evidence and the given query assignment.
inline double brute_probability(const Network& net, const Evidence& query) {
  const auto& vars = net.variables();
  std::vector<std::size_t> idx(vars.size(), 0);
  std::map<std::string, std::size_t> fixed;
  for (const auto& [id, state] : net.evidence()) fixed[id] = net.variable(id).index_of(state);
  for (const auto& [id, state] : query) fixed[id] = net.variable(id).index_of(state);

  double total = 0.0;
  while (true) {
    bool consistent = true;
    std::map<std::string, std::size_t> assign;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      auto it = fixed.find(vars[i].id());
      if (it != fixed.end() && it->second != idx[i]) {
        consistent = false;
        break;
      }
      assign[vars[i].id()] = idx[i];
    }
    if (consistent) {
      double p = 1.0;
      for (const auto& c : net.cpts()) {
        p *= factor_value_at(c.table, assign);
        if (p == 0.0) break;
      }
      total += p;
    }
    std::size_t k = vars.size();
    while (k > 0) {
      --k;
      if (++idx[k] < vars[k].size()) break;
      idx[k] = 0;
      if (k == 0) return total;
    }
    if (vars.empty()) return total;
  }
}

inline Factor random_factor(std::vector<Variable> scope, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::size_t n = 1;
  for (const auto& v : scope) n *= v.size();
  std::vector<double> t(n);
  for (auto& x : t) x = u(rng);
  return Factor(std::move(scope), std::move(t));
}

// Sequential copy-or-fresh joint, written as the plain recursion.
inline double urn_prob_recursive(const std::vector<std::size_t>& genes,
                                 const std::vector<double>& rho, double alpha) {
  double p = 1.0;
  for (std::size_t i = 0; i < genes.size(); ++i) {
    int m = 0;
    for (std::size_t j = 0; j < i; ++j)
      if (genes[j] == genes[i]) ++m;
    p *= (m + alpha * rho[genes[i]]) / (i + alpha);
  }
  return p;
}

inline std::vector<std::vector<std::size_t>> all_configs(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cfg(n, 0);
  while (true) {
    out.push_back(cfg);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++cfg[i] < k) break;
      cfg[i] = 0;
      if (i == 0) return out;
    }
    if (n == 0) return out;
  }
}

}  // namespace oracles
