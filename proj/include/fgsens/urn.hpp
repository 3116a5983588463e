#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgsens/case_model.hpp"
#include "fgsens/network.hpp"

namespace fgsens {

// Sequential copy-or-fresh joint of n exchangeable genes: base distribution
// rho, concentration alpha. Output vector is indexed over allele configurations
// with the last gene varying fastest. Uses the closed form with a log-gamma
// normalizer so large alpha stays finite.
inline std::vector<double> coancestry_joint(const std::vector<double>& rho, int n, double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("coancestry_joint: alpha must be positive");
  if (n < 1) throw std::invalid_argument("coancestry_joint: need at least one gene");
  const std::size_t k = rho.size();
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= k;
  const double log_norm = std::lgamma(alpha) - std::lgamma(alpha + n);
  std::vector<double> f(total);
  std::vector<std::size_t> g(n, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
      int matches = 0;
      for (int j = 0; j < i; ++j)
        if (g[j] == g[i]) ++matches;
      prod *= matches + alpha * rho[g[i]];
    }
    f[flat] = std::exp(log_norm) * prod;
    for (int i = n; i-- > 0;) {
      if (++g[i] < k) break;
      g[i] = 0;
    }
  }
  return f;
}

inline double theta_to_alpha(double theta) {
  if (theta <= 0.0 || theta >= 1.0) throw std::invalid_argument("theta must lie in (0,1)");
  return (1.0 - theta) / theta;
}

// Probability that n = sum(sizes) sequential draws form one specific partition
// into clusters of the given sizes.
inline double partition_probability(double alpha, const std::vector<int>& sizes) {
  if (alpha <= 0.0) throw std::invalid_argument("partition_probability: alpha must be positive");
  int n = 0;
  double log_p = 0.0;
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("partition_probability: cluster sizes must be >= 1");
    n += s;
    log_p += std::log(alpha) + std::lgamma(s);
  }
  log_p += std::lgamma(alpha) - std::lgamma(alpha + n);
  return std::exp(log_p);
}

// Pattern probabilities for three genes pushed through two chained
// copy-or-fresh stages with concentrations alpha then beta, normalized, in the
// order (all distinct, some pair identical, all identical). The unnormalized
// triple is (a^2 b^2, 3ab(a+b+2), 2(a+b)(a+b+3) - ab + 4) over
// (a+1)(a+2)(b+1)(b+2).
inline std::array<double, 3> cascade_partition_odds(double alpha, double beta) {
  if (alpha <= 0.0 || beta <= 0.0) throw std::invalid_argument("cascade odds: parameters must be positive");
  const double a = alpha, b = beta;
  const double d = (a + 1) * (a + 2) * (b + 1) * (b + 2);
  return {a * a * b * b / d, 3 * a * b * (a + b + 2) / d,
          (2 * (a + b) * (a + b + 3) - a * b + 4) / d};
}

// Adds the copy-or-fresh urn over the given output gene variables: fresh draws
// come from rho with probability M/(M+i-1), otherwise a uniformly chosen
// earlier output is copied. All internal choices are binary. The outputs must
// be declared already; everything else (pool, c, d, temp nodes) is created
// under the prefix.
inline void attach_urn(Network& net, const std::vector<std::string>& outputs,
                       const std::vector<double>& rho, double M, const std::string& prefix) {
  if (M <= 0.0) throw std::invalid_argument("attach_urn: M must be positive");
  const int n = static_cast<int>(outputs.size());
  if (n < 1) throw std::invalid_argument("attach_urn: no outputs");
  const Variable& g1 = net.variable(outputs[0]);
  auto gene_prior = [&](const Variable& v) { return Factor({v}, rho); };
  net.add_cpt(outputs[0], gene_prior(g1));
  if (n == 1) return;

  auto bern = [&](const std::string& id, double p_true) {
    Variable v = boolean_variable(id);
    net.add_variable(v);
    net.add_cpt(id, Factor({v}, {p_true, 1.0 - p_true}));
    return v;
  };

  for (int i = 2; i <= n; ++i) {
    const std::string gi = outputs[i - 1];
    const std::string pool = prefix + "pool" + std::to_string(i);
    net.add_variable(Variable(pool, net.variable(gi).states()));
    net.add_cpt(pool, gene_prior(net.variable(pool)));
    Variable ci = bern(prefix + "c" + std::to_string(i), M / (M + i - 1));
    if (i == 2) {
      net.add_cpt(gi, selector_factor(net.variable(gi), net.variable(pool),
                                      net.variable(outputs[0]), ci));
      continue;
    }
    // temp chain picks uniformly among g1..g(i-1)
    std::string prev;
    for (int j = 2; j <= i - 1; ++j) {
      Variable dij = bern(prefix + "d" + std::to_string(i) + "_" + std::to_string(j), 1.0 / j);
      const std::string tij = prefix + "temp" + std::to_string(i) + "_" + std::to_string(j);
      net.add_variable(Variable(tij, net.variable(gi).states()));
      const std::string low = (j == 2) ? outputs[0] : prev;
      net.add_cpt(tij, selector_factor(net.variable(tij), net.variable(outputs[j - 1]),
                                       net.variable(low), dij));
      prev = tij;
    }
    net.add_cpt(gi, selector_factor(net.variable(gi), net.variable(pool), net.variable(prev), ci));
  }
}

}  // namespace fgsens
