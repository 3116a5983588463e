#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgsens/factor.hpp"

namespace fgsens {

struct Cpt {
  std::string child;
  Factor table;
};

// A directed discrete model: one conditional-probability factor per variable,
// plus optional evidence. Immutable once built; inference does not mutate it.
class Network {
 public:
  void add_variable(const Variable& v) {
    if (index_.count(v.id())) throw std::invalid_argument("duplicate variable " + v.id());
    index_[v.id()] = vars_.size();
    vars_.push_back(v);
  }

  bool has_variable(const std::string& id) const { return index_.count(id) != 0; }

  const Variable& variable(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::invalid_argument("unknown variable " + id);
    return vars_[it->second];
  }

  const std::vector<Variable>& variables() const { return vars_; }

  void add_cpt(const std::string& child, Factor f) {
    if (!has_variable(child)) throw std::invalid_argument("cpt child undeclared: " + child);
    if (cpt_index_.count(child)) throw std::invalid_argument("duplicate cpt for " + child);
    if (!f.has_variable(child)) throw std::invalid_argument("cpt for " + child + " lacks the child in scope");
    for (const auto& v : f.scope()) {
      if (!has_variable(v.id())) throw std::invalid_argument("cpt scope undeclared: " + v.id());
      if (!variable(v.id()).same_domain(v))
        throw std::invalid_argument("cpt scope domain mismatch: " + v.id());
    }
    cpt_index_[child] = cpts_.size();
    cpts_.push_back({child, std::move(f)});
  }

  const std::vector<Cpt>& cpts() const { return cpts_; }

  void set_evidence(const std::string& id, const std::string& state) {
    variable(id).index_of(state);  // validates both
    evidence_[id] = state;
  }

  const Evidence& evidence() const { return evidence_; }

  Network without_evidence() const {
    Network n = *this;
    n.evidence_.clear();
    return n;
  }

  // Structural checks: every variable has a cpt, the parent graph is acyclic,
  // and each cpt sums to 1 over its child for every parent configuration.
  void validate(double cpt_tol = 1e-6) const {
    for (const auto& v : vars_)
      if (!cpt_index_.count(v.id())) throw std::invalid_argument("variable without cpt: " + v.id());
    // Kahn over child <- parents
    std::map<std::string, int> incoming;
    std::map<std::string, std::vector<std::string>> children_of;
    for (const auto& c : cpts_) {
      incoming.try_emplace(c.child, 0);
      for (const auto& v : c.table.scope()) {
        if (v.id() == c.child) continue;
        ++incoming[c.child];
        children_of[v.id()].push_back(c.child);
      }
    }
    std::vector<std::string> ready;
    for (const auto& v : vars_)
      if (incoming[v.id()] == 0) ready.push_back(v.id());
    std::size_t seen = 0;
    while (!ready.empty()) {
      std::string u = ready.back();
      ready.pop_back();
      ++seen;
      for (const auto& w : children_of[u])
        if (--incoming[w] == 0) ready.push_back(w);
    }
    if (seen != vars_.size()) throw std::invalid_argument("directed structure has a cycle");
    for (const auto& c : cpts_) {
      Factor row_sums = c.table.sum_out(c.child);
      for (double v : row_sums.table())
        if (std::abs(v - 1.0) > cpt_tol)
          throw std::invalid_argument("cpt for " + c.child + " does not sum to 1 over the child");
    }
  }

 private:
  std::vector<Variable> vars_;
  std::map<std::string, std::size_t> index_;
  std::vector<Cpt> cpts_;
  std::map<std::string, std::size_t> cpt_index_;
  Evidence evidence_;
};

struct EliminationOptions {
  double rescale_threshold = 1e-120;  // underflow guard on intermediate tables
  bool validate = true;
};

struct EliminationResult {
  Factor table;          // over the query variables, declaration order
  double log_scale = 0;  // entries were divided by exp(log_scale)

  double value(std::size_t flat) const { return table.table()[flat] * std::exp(log_scale); }
  double value(const Evidence& assignment) const { return table.at(assignment) * std::exp(log_scale); }
  double log_value(std::size_t flat) const {
    double t = table.table()[flat];
    if (t <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(t) + log_scale;
  }
  double total() const { return table.total() * std::exp(log_scale); }
};

// Variable elimination with a min-degree ordering (lexicographic tie-break).
// Returns the unnormalized joint over the query with evidence absorbed:
// entries equal p(query = ., E).
inline EliminationResult eliminate(const Network& net, const std::vector<std::string>& query,
                                   const EliminationOptions& opts = {}) {
  if (opts.validate) net.validate();
  for (const auto& q : query) net.variable(q);

  std::vector<Factor> pool;
  pool.reserve(net.cpts().size());
  for (const auto& c : net.cpts()) pool.push_back(c.table.condition_partial(net.evidence()));

  std::set<std::string> keep(query.begin(), query.end());
  std::set<std::string> pending;
  for (const auto& v : net.variables())
    if (!keep.count(v.id())) pending.insert(v.id());

  double log_scale = 0.0;
  auto guard = [&](Factor& f) {
    double mx = f.max_entry();
    if (mx > 0.0 && mx < opts.rescale_threshold) {
      f = f.scaled(1.0 / mx);
      log_scale += std::log(mx);
    }
  };
  while (!pending.empty()) {
    // degree = number of distinct co-occurring variables
    std::string best;
    std::size_t best_deg = std::numeric_limits<std::size_t>::max();
    for (const auto& v : pending) {
      std::set<std::string> nbr;
      for (const auto& f : pool)
        if (f.has_variable(v))
          for (const auto& u : f.scope())
            if (u.id() != v) nbr.insert(u.id());
      if (nbr.size() < best_deg || (nbr.size() == best_deg && v < best)) {
        best_deg = nbr.size();
        best = v;
      }
    }
    Factor product(1.0);
    std::vector<Factor> rest;
    rest.reserve(pool.size());
    for (auto& f : pool) {
      if (f.has_variable(best)) {
        product = product.multiply(f);
        guard(product);
      } else {
        rest.push_back(std::move(f));
      }
    }
    Factor reduced = product.sum_out(best);
    guard(reduced);
    rest.push_back(std::move(reduced));
    pool = std::move(rest);
    pending.erase(best);
  }

  Factor result(1.0);
  for (const auto& f : pool) {
    result = result.multiply(f);
    guard(result);
  }
  std::vector<std::string> order;
  for (const auto& v : net.variables())
    if (keep.count(v.id()) && result.has_variable(v.id())) order.push_back(v.id());
  // query variables can only be missing from the result if the network never
  // declared them, which variable() above already rejects
  return {result.reordered(order), log_scale};
}

}  // namespace fgsens
