#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgsens/factor.hpp"

namespace fgsens {

// A forensic marker: ordered allele labels and a frequency vector over them.
struct Marker {
  std::string name;
  std::vector<std::string> alleles;
  std::vector<double> freq;

  Marker() = default;
  Marker(std::string name_, std::vector<std::string> alleles_, std::vector<double> freq_)
      : name(std::move(name_)), alleles(std::move(alleles_)), freq(std::move(freq_)) {
    if (alleles.empty()) throw std::invalid_argument("marker " + name + ": no alleles");
    if (alleles.size() != freq.size())
      throw std::invalid_argument("marker " + name + ": allele/frequency size mismatch");
    std::set<std::string> seen;
    double sum = 0.0;
    for (std::size_t i = 0; i < alleles.size(); ++i) {
      if (!seen.insert(alleles[i]).second)
        throw std::invalid_argument("marker " + name + ": duplicate allele " + alleles[i]);
      if (freq[i] < 0.0) throw std::invalid_argument("marker " + name + ": negative frequency");
      sum += freq[i];
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("marker " + name + ": frequencies sum to " + std::to_string(sum));
  }

  std::size_t allele_index(const std::string& a) const {
    for (std::size_t i = 0; i < alleles.size(); ++i)
      if (alleles[i] == a) return i;
    throw std::invalid_argument("marker " + name + ": unknown allele " + a);
  }

  Variable gene_variable(const std::string& id) const { return Variable(id, alleles); }
};

// Unordered allele pairs (i <= j) in lexicographic index order.
inline std::vector<std::pair<int, int>> genotype_pairs(int k) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) out.emplace_back(i, j);
  return out;
}

inline std::string genotype_label(const Marker& m, int i, int j) {
  if (i > j) std::swap(i, j);
  return m.alleles[i] + "/" + m.alleles[j];
}

inline Variable genotype_variable(const Marker& m, const std::string& id) {
  std::vector<std::string> states;
  for (auto [i, j] : genotype_pairs(static_cast<int>(m.alleles.size())))
    states.push_back(genotype_label(m, i, j));
  return Variable(id, states);
}

inline std::string genotype_state(const Marker& m, const std::string& a, const std::string& b) {
  int i = static_cast<int>(m.allele_index(a));
  int j = static_cast<int>(m.allele_index(b));
  return genotype_label(m, std::min(i, j), std::max(i, j));
}

// Allele subsets of size 1..4, enumerated by ascending bitmask.
inline std::vector<std::uint32_t> mixture_masks(int k) {
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask)
    if (__builtin_popcount(mask) <= 4) masks.push_back(mask);
  return masks;
}

inline std::string mixture_label(const Marker& m, std::uint32_t mask) {
  std::string s;
  for (std::size_t i = 0; i < m.alleles.size(); ++i)
    if (mask & (1u << i)) {
      if (!s.empty()) s += "+";
      s += m.alleles[i];
    }
  return s;
}

inline Variable mixture_variable(const Marker& m, const std::string& id) {
  if (m.alleles.size() > 20) throw std::invalid_argument("mixture domain too large");
  std::vector<std::string> states;
  for (auto mask : mixture_masks(static_cast<int>(m.alleles.size())))
    states.push_back(mixture_label(m, mask));
  return Variable(id, states);
}

inline std::string mixture_state(const Marker& m, const std::vector<std::string>& alleles) {
  std::uint32_t mask = 0;
  for (const auto& a : alleles) mask |= 1u << m.allele_index(a);
  if (mask == 0) throw std::invalid_argument("empty mixture set");
  if (__builtin_popcount(mask) > 4) throw std::invalid_argument("mixture set larger than 4 alleles");
  return mixture_label(m, mask);
}

// One population's frequencies over a marker's allele list.
struct GenePool {
  std::string population;
  std::vector<double> freq;
};

// A marker together with every population pool needed by the active scenarios.
// pools[0] is the baseline population.
struct MarkerContext {
  Marker marker;
  std::vector<GenePool> pools;

  const std::vector<double>& pool_freq(const std::string& population) const {
    for (const auto& p : pools)
      if (p.population == population) return p.freq;
    throw std::invalid_argument("marker " + marker.name + ": no pool for population " + population);
  }
};

inline const std::string kOtherAllele = "other";

// Collapses all alleles outside `observed` into a single aggregate allele with
// the summed frequency, per population. Exactly likelihood-preserving for all
// scenario families (exchangeability of unobserved alleles).
inline MarkerContext coarsen_marker(const std::string& name,
                                    const std::vector<std::string>& observed,
                                    const std::vector<std::pair<std::string, std::map<std::string, double>>>& pools) {
  if (pools.empty()) throw std::invalid_argument("coarsen_marker: no pools");
  std::vector<std::string> alleles = observed;
  bool other_needed = false;
  for (const auto& [pop, fm] : pools) {
    double seen = 0.0;
    for (const auto& a : observed) {
      auto it = fm.find(a);
      if (it != fm.end()) seen += it->second;
    }
    if (seen < 1.0 - 1e-12) other_needed = true;
    for (const auto& [a, f] : fm)
      if (std::find(observed.begin(), observed.end(), a) == observed.end() && f > 0.0)
        other_needed = true;
  }
  if (other_needed) {
    std::string other = kOtherAllele;
    while (std::find(alleles.begin(), alleles.end(), other) != alleles.end()) other += "*";
    alleles.push_back(other);
  }
  MarkerContext ctx;
  std::vector<GenePool> gps;
  for (const auto& [pop, fm] : pools) {
    std::vector<double> fr(alleles.size(), 0.0);
    double seen = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
      auto it = fm.find(observed[i]);
      fr[i] = it == fm.end() ? 0.0 : it->second;
      seen += fr[i];
    }
    if (other_needed) fr.back() = std::max(0.0, 1.0 - seen);
    double total = 0.0;
    for (double v : fr) total += v;
    if (total <= 0.0) throw std::invalid_argument("coarsen_marker: empty pool for " + pop);
    for (double& v : fr) v /= total;
    gps.push_back({pop, fr});
  }
  ctx.marker = Marker(name, alleles, gps[0].freq);
  ctx.pools = std::move(gps);
  return ctx;
}

// Full-domain context (coarsening disabled): alleles as given, per population.
inline MarkerContext full_marker_context(const std::string& name,
                                         const std::vector<std::string>& alleles,
                                         const std::vector<std::pair<std::string, std::map<std::string, double>>>& pools) {
  MarkerContext ctx;
  std::vector<GenePool> gps;
  for (const auto& [pop, fm] : pools) {
    std::vector<double> fr(alleles.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < alleles.size(); ++i) {
      auto it = fm.find(alleles[i]);
      fr[i] = it == fm.end() ? 0.0 : it->second;
      total += fr[i];
    }
    if (total <= 0.0) throw std::invalid_argument("full_marker_context: empty pool for " + pop);
    for (double& v : fr) v /= total;
    gps.push_back({pop, fr});
  }
  ctx.marker = Marker(name, alleles, gps[0].freq);
  ctx.pools = std::move(gps);
  return ctx;
}

}  // namespace fgsens
