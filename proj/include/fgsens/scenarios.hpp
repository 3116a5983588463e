#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgsens/case_model.hpp"
#include "fgsens/ibd.hpp"
#include "fgsens/marker.hpp"
#include "fgsens/urn.hpp"

namespace fgsens {

struct HetParams {
  std::vector<std::string> pools;                 // population names
  std::vector<double> weights;                    // prior over pools; empty = equal
  std::map<std::string, std::string> assignment;  // actor -> pool name, or "latent"

  std::vector<double> resolved_weights() const {
    if (pools.empty()) throw std::invalid_argument("het: no pools");
    if (weights.empty()) return std::vector<double>(pools.size(), 1.0 / pools.size());
    if (weights.size() != pools.size()) throw std::invalid_argument("het: weight/pool size mismatch");
    double s = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("het: negative weight");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("het: weights must sum to 1");
    return weights;
  }

  bool is_latent(const std::string& actor) const {
    auto it = assignment.find(actor);
    return it == assignment.end() || it->second == "latent";
  }
};

struct ScenarioSpec {
  enum class Kind { baseline, coancestry, uaf, ibd, het, uaf_ibd, uaf_het };

  Kind kind = Kind::baseline;
  std::string label = "baseline";
  double M = 100.0;     // urn concentration for uaf kinds
  double theta = 0.0;   // coancestry coefficient
  std::vector<std::string> uaf_actors;  // empty = all founding actors
  RelationshipPrior prior;
  HetParams subpops;  // subpopulation model for het kinds
  std::optional<std::pair<std::string, std::string>> pair;  // IBD actor pair override

  static ScenarioSpec baseline() { return {}; }
  static ScenarioSpec uaf(double M) {
    ScenarioSpec s;
    s.kind = Kind::uaf;
    s.label = "uaf";
    s.M = M;
    return s;
  }
  static ScenarioSpec coancestry(double theta) {
    ScenarioSpec s;
    s.kind = Kind::coancestry;
    s.label = "coancestry";
    s.theta = theta;
    return s;
  }
  static ScenarioSpec ibd(RelationshipPrior p) {
    ScenarioSpec s;
    s.kind = Kind::ibd;
    s.label = "ibd";
    s.prior = p;
    return s;
  }
  static ScenarioSpec het(HetParams h) {
    ScenarioSpec s;
    s.kind = Kind::het;
    s.label = "het";
    s.subpops = std::move(h);
    return s;
  }
  static ScenarioSpec uaf_ibd(double M, RelationshipPrior p) {
    ScenarioSpec s = ibd(p);
    s.kind = Kind::uaf_ibd;
    s.label = "uaf+ibd";
    s.M = M;
    return s;
  }
  static ScenarioSpec uaf_het(double M, HetParams h) {
    ScenarioSpec s = het(std::move(h));
    s.kind = Kind::uaf_het;
    s.label = "uaf+het";
    s.M = M;
    return s;
  }

  bool has_urn() const {
    return kind == Kind::coancestry || kind == Kind::uaf || kind == Kind::uaf_ibd ||
           kind == Kind::uaf_het;
  }
  bool has_ibd() const { return kind == Kind::ibd || kind == Kind::uaf_ibd; }
  bool has_het() const { return kind == Kind::het || kind == Kind::uaf_het; }
  double concentration() const { return kind == Kind::coancestry ? theta_to_alpha(theta) : M; }
};

inline double urn_seq_prob(const std::vector<std::size_t>& genes, const std::vector<double>& rho,
                           double alpha) {
  double p = 1.0;
  for (std::size_t i = 0; i < genes.size(); ++i) {
    int matches = 0;
    for (std::size_t j = 0; j < i; ++j)
      if (genes[j] == genes[i]) ++matches;
    p *= (matches + alpha * rho[genes[i]]) / (static_cast<double>(i) + alpha);
  }
  return p;
}

// A scenario bound to a case topology: knows the across-marker latent values,
// builds per-marker founder fragments, and can emit the explicit joint vector
// over the founding-gene configurations.
class ResolvedScenario {
 public:
  struct Cond {
    std::string label;
    double prior;
  };

  ResolvedScenario(const CaseSpec& cs, ScenarioSpec spec) : spec_(std::move(spec)) {
    topology_ = cs.topology;
    slots_ = founder_slots(topology_);
    auto actors = founding_actors(topology_);
    actor_set_ = std::set<std::string>(actors.begin(), actors.end());

    if (spec_.kind == ScenarioSpec::Kind::coancestry && spec_.theta == 0.0) {
      spec_.kind = ScenarioSpec::Kind::baseline;  // theta = 0 routes to baseline
    }
    if (spec_.has_urn()) {
      if (spec_.concentration() <= 0.0) throw std::invalid_argument("urn concentration must be positive");
      urn_actors_ = spec_.uaf_actors.empty() ? actors : spec_.uaf_actors;
      for (const auto& a : urn_actors_)
        if (!actor_set_.count(a))
          throw std::invalid_argument("uaf actor " + a + " is not a founding actor of this topology");
    }
    if (spec_.has_ibd()) {
      pair_ = spec_.pair.value_or(default_ibd_pair(topology_));
      if (!actor_set_.count(pair_.first) || !actor_set_.count(pair_.second))
        throw std::invalid_argument("ibd pair must name founding actors");
      ibd_ = resolve_ibd(spec_.prior);
      for (std::size_t i = 0; i < slots_.size(); ++i)
        if (slots_[i].actor == pair_.first || slots_[i].actor == pair_.second)
          pair_slot_pos_.push_back(i);
      if (pair_slot_pos_.size() != 4) throw std::logic_error("ibd pair does not span 4 slots");
      if (spec_.kind == ScenarioSpec::Kind::uaf_ibd)
        for (const auto& a : {pair_.first, pair_.second})
          if (std::find(urn_actors_.begin(), urn_actors_.end(), a) == urn_actors_.end())
            throw std::invalid_argument("uaf+ibd: the ibd pair must be urn-coupled");
      for (const auto& e : ibd_.entries) conditioning_.push_back({e.name, e.prob});
    } else if (spec_.has_het()) {
      het_weights_ = spec_.subpops.resolved_weights();
      for (const auto& [actor, pool] : spec_.subpops.assignment)
        if (!actor_set_.count(actor))
          throw std::invalid_argument("het assignment names unknown actor " + actor);
      for (const auto& a : actors)
        if (spec_.subpops.is_latent(a)) latent_actors_.push_back(a);
      // conditioning = joint pool assignment over latent actors
      std::size_t combos = 1;
      for (std::size_t i = 0; i < latent_actors_.size(); ++i) combos *= spec_.subpops.pools.size();
      for (std::size_t c = 0; c < combos; ++c) {
        auto asg = combo_assignment(c);
        double p = 1.0;
        std::string label;
        for (std::size_t i = 0; i < latent_actors_.size(); ++i) {
          p *= het_weights_[asg[i]];
          if (!label.empty()) label += ",";
          label += "S(" + latent_actors_[i] + ")=" + spec_.subpops.pools[asg[i]];
        }
        if (label.empty()) label = "none";
        conditioning_.push_back({label, p});
      }
    } else {
      conditioning_.push_back({"none", 1.0});
    }
  }

  const ScenarioSpec& spec() const { return spec_; }
  const std::vector<Cond>& conditioning() const { return conditioning_; }
  bool independent() const { return conditioning_.size() == 1; }
  bool has_pattern_stage() const { return spec_.has_ibd(); }
  const ResolvedIbd& ibd() const { return ibd_; }
  const std::vector<FounderSlot>& slots() const { return slots_; }
  const std::pair<std::string, std::string>& pair() const { return pair_; }
  const std::vector<std::string>& latent_actors() const { return latent_actors_; }

  // Founder fragment with the across-marker latent clamped to value `ci`.
  FounderAttachment conditioned_attachment(std::size_t ci) const {
    switch (spec_.kind) {
      case ScenarioSpec::Kind::baseline:
        return baseline_attachment();
      case ScenarioSpec::Kind::coancestry:
      case ScenarioSpec::Kind::uaf:
        return [this](Network& net, const std::vector<FounderSlot>& slots, const MarkerContext& ctx) {
          attach_urn_over(net, slots, ctx, urn_slot_ids(slots));
        };
      case ScenarioSpec::Kind::ibd:
      case ScenarioSpec::Kind::uaf_ibd:
        return [this, ci](Network& net, const std::vector<FounderSlot>& slots, const MarkerContext& ctx) {
          attach_ibd_mixture(net, slots, ctx, ibd_.p_pattern_given_entry[ci]);
        };
      case ScenarioSpec::Kind::het:
      case ScenarioSpec::Kind::uaf_het:
        return [this, ci](Network& net, const std::vector<FounderSlot>& slots, const MarkerContext& ctx) {
          attach_het_fixed(net, slots, ctx, combo_assignment(ci));
        };
    }
    throw std::logic_error("unreachable");
  }

  // Founder fragment for one fixed identity pattern (IBD kinds only).
  FounderAttachment pattern_attachment(std::size_t pi) const {
    if (!has_pattern_stage()) throw std::logic_error("scenario has no pattern stage");
    IbdPattern p = ibd_.patterns[pi];
    return [this, p](Network& net, const std::vector<FounderSlot>& slots, const MarkerContext& ctx) {
      attach_fixed_pattern(net, slots, ctx, p);
    };
  }

  // Single-network fragment with every latent variable in-network. Valid for
  // single-marker inference; across markers the latents must be conditioned.
  FounderAttachment structural_attachment() const {
    switch (spec_.kind) {
      case ScenarioSpec::Kind::baseline:
      case ScenarioSpec::Kind::coancestry:
      case ScenarioSpec::Kind::uaf:
        return conditioned_attachment(0);
      case ScenarioSpec::Kind::ibd:
      case ScenarioSpec::Kind::uaf_ibd:
        return [this](Network& net, const std::vector<FounderSlot>& slots, const MarkerContext& ctx) {
          attach_ibd_structural(net, slots, ctx);
        };
      case ScenarioSpec::Kind::het:
      case ScenarioSpec::Kind::uaf_het:
        return [this](Network& net, const std::vector<FounderSlot>& slots, const MarkerContext& ctx) {
          attach_het_structural(net, slots, ctx);
        };
    }
    throw std::logic_error("unreachable");
  }

  // Explicit joint probability vector over all founding-gene configurations,
  // slots in order with the last varying fastest.
  std::vector<double> explicit_joint(const MarkerContext& ctx, std::size_t ceiling = 2'000'000) const {
    const std::size_t k = ctx.marker.alleles.size();
    const std::size_t n = slots_.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
      total *= k;
      if (total > ceiling) throw std::runtime_error("founder configuration space exceeds ceiling");
    }
    std::vector<double> f(total, 0.0);
    std::vector<std::size_t> g(n, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      f[flat] = config_probability(ctx, g);
      for (std::size_t i = n; i-- > 0;) {
        if (++g[i] < k) break;
        g[i] = 0;
      }
    }
    return f;
  }

 private:
  std::vector<std::size_t> combo_assignment(std::size_t c) const {
    std::vector<std::size_t> asg(latent_actors_.size(), 0);
    const std::size_t np = spec_.subpops.pools.size();
    for (std::size_t i = latent_actors_.size(); i-- > 0;) {
      asg[i] = c % np;
      c /= np;
    }
    return asg;
  }

  std::string actor_pool(const std::string& actor, const std::vector<std::size_t>& latent_asg) const {
    auto it = std::find(latent_actors_.begin(), latent_actors_.end(), actor);
    if (it != latent_actors_.end()) return spec_.subpops.pools[latent_asg[it - latent_actors_.begin()]];
    auto fixed = spec_.subpops.assignment.find(actor);
    if (fixed == spec_.subpops.assignment.end()) throw std::logic_error("actor without pool: " + actor);
    return fixed->second;
  }

  bool is_urn_actor(const std::string& actor) const {
    return std::find(urn_actors_.begin(), urn_actors_.end(), actor) != urn_actors_.end();
  }

  std::vector<std::string> urn_slot_ids(const std::vector<FounderSlot>& slots) const {
    std::vector<std::string> out;
    for (const auto& s : slots)
      if (is_urn_actor(s.actor)) out.push_back(s.var_id);
    return out;
  }

  bool is_pair_slot(std::size_t pos) const {
    return std::find(pair_slot_pos_.begin(), pair_slot_pos_.end(), pos) != pair_slot_pos_.end();
  }

  // urn across the named slots, baseline priors for the rest
  void attach_urn_over(Network& net, const std::vector<FounderSlot>& slots, const MarkerContext& ctx,
                       const std::vector<std::string>& urn_ids) const {
    std::set<std::string> in_urn(urn_ids.begin(), urn_ids.end());
    for (const auto& s : slots)
      if (!in_urn.count(s.var_id))
        net.add_cpt(s.var_id, Factor({net.variable(s.var_id)}, ctx.marker.freq));
    if (!urn_ids.empty()) attach_urn(net, urn_ids, ctx.marker.freq, spec_.concentration(), "urn.");
  }

  // fresh-draw sources for the pair under IBD kinds; non-pair slots get their
  // own priors (or join the urn) here as well
  std::vector<std::string> attach_pair_sources(Network& net, const std::vector<FounderSlot>& slots,
                                               const MarkerContext& ctx) const {
    std::vector<std::string> fresh;
    for (int c = 0; c < 4; ++c) {
      std::string id = "ibd.fresh" + std::to_string(c + 1);
      net.add_variable(ctx.marker.gene_variable(id));
      fresh.push_back(id);
    }
    if (spec_.has_urn()) {
      std::vector<std::string> urn_ids;
      std::size_t next_fresh = 0;
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (is_pair_slot(i))
          urn_ids.push_back(fresh[next_fresh++]);
        else if (is_urn_actor(slots[i].actor))
          urn_ids.push_back(slots[i].var_id);
        else
          net.add_cpt(slots[i].var_id, Factor({net.variable(slots[i].var_id)}, ctx.marker.freq));
      }
      attach_urn(net, urn_ids, ctx.marker.freq, spec_.concentration(), "urn.");
    } else {
      for (const auto& id : fresh) net.add_cpt(id, Factor({net.variable(id)}, ctx.marker.freq));
      for (std::size_t i = 0; i < slots.size(); ++i)
        if (!is_pair_slot(i))
          net.add_cpt(slots[i].var_id, Factor({net.variable(slots[i].var_id)}, ctx.marker.freq));
    }
    return fresh;
  }

  // every pair gene copies its class's fresh source, given the pattern node
  void attach_ibd_mixture(Network& net, const std::vector<FounderSlot>& slots, const MarkerContext& ctx,
                          const std::vector<double>& pattern_prior) const {
    auto fresh = attach_pair_sources(net, slots, ctx);
    std::vector<std::string> states;
    for (const auto& p : ibd_.patterns) states.push_back(p.key());
    Variable pi("ibd.pattern", states);
    net.add_variable(pi);
    net.add_cpt("ibd.pattern", Factor({pi}, pattern_prior));
    const std::size_t k = ctx.marker.alleles.size();
    for (int s = 0; s < 4; ++s) {
      const std::string& gene = slots[pair_slot_pos_[s]].var_id;
      // p(gene | pattern, fresh1..fresh4): copies fresh[class_index(pattern, s)]
      std::vector<Variable> scope{pi};
      for (const auto& id : fresh) scope.push_back(net.variable(id));
      scope.push_back(net.variable(gene));
      std::size_t total = states.size() * k * k * k * k * k;
      std::vector<double> t(total, 0.0);
      std::vector<std::size_t> idx(6, 0);  // pattern, f1..f4, gene
      for (std::size_t flat = 0; flat < total; ++flat) {
        int ci = ibd_.patterns[idx[0]].class_index()[s];
        if (idx[5] == idx[1 + ci]) t[flat] = 1.0;
        for (std::size_t d = 6; d-- > 0;) {
          std::size_t lim = d == 0 ? states.size() : k;
          if (++idx[d] < lim) break;
          idx[d] = 0;
        }
      }
      net.add_cpt(gene, Factor(std::move(scope), std::move(t)));
    }
  }

  void attach_fixed_pattern(Network& net, const std::vector<FounderSlot>& slots,
                            const MarkerContext& ctx, const IbdPattern& pattern) const {
    auto rep = pattern.representatives();
    if (spec_.has_urn()) {
      std::vector<std::string> urn_ids;
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (is_pair_slot(i)) {
          int s = static_cast<int>(std::find(pair_slot_pos_.begin(), pair_slot_pos_.end(), i) -
                                   pair_slot_pos_.begin());
          if (rep[s] == s) urn_ids.push_back(slots[i].var_id);  // class representative
        } else if (is_urn_actor(slots[i].actor)) {
          urn_ids.push_back(slots[i].var_id);
        } else {
          net.add_cpt(slots[i].var_id, Factor({net.variable(slots[i].var_id)}, ctx.marker.freq));
        }
      }
      attach_urn(net, urn_ids, ctx.marker.freq, spec_.concentration(), "urn.");
    } else {
      for (std::size_t i = 0; i < slots.size(); ++i) {
        bool member = false;
        if (is_pair_slot(i)) {
          int s = static_cast<int>(std::find(pair_slot_pos_.begin(), pair_slot_pos_.end(), i) -
                                   pair_slot_pos_.begin());
          member = rep[s] != s;
        }
        if (!member) net.add_cpt(slots[i].var_id, Factor({net.variable(slots[i].var_id)}, ctx.marker.freq));
      }
    }
    // members copy their representatives
    const std::size_t k = ctx.marker.alleles.size();
    for (int s = 0; s < 4; ++s) {
      if (rep[s] == s) continue;
      const Variable& src = net.variable(slots[pair_slot_pos_[rep[s]]].var_id);
      const Variable& dst = net.variable(slots[pair_slot_pos_[s]].var_id);
      std::vector<double> t(k * k, 0.0);
      for (std::size_t a = 0; a < k; ++a) t[a * k + a] = 1.0;
      net.add_cpt(dst.id(), Factor({src, dst}, std::move(t)));
    }
  }

  void attach_ibd_structural(Network& net, const std::vector<FounderSlot>& slots,
                             const MarkerContext& ctx) const {
    auto fresh = attach_pair_sources(net, slots, ctx);
    std::vector<std::string> rstates;
    std::vector<double> rprior;
    for (const auto& e : ibd_.entries) {
      rstates.push_back(e.name);
      rprior.push_back(e.prob);
    }
    Variable R("ibd.R", rstates);
    net.add_variable(R);
    net.add_cpt("ibd.R", Factor({R}, rprior));
    std::vector<std::string> pstates;
    for (const auto& p : ibd_.patterns) pstates.push_back(p.key());
    Variable pi("ibd.pattern", pstates);
    net.add_variable(pi);
    std::vector<double> t(rstates.size() * pstates.size());
    for (std::size_t r = 0; r < rstates.size(); ++r)
      for (std::size_t p = 0; p < pstates.size(); ++p)
        t[r * pstates.size() + p] = ibd_.p_pattern_given_entry[r][p];
    net.add_cpt("ibd.pattern", Factor({R, pi}, std::move(t)));
    const std::size_t k = ctx.marker.alleles.size();
    for (int s = 0; s < 4; ++s) {
      const std::string& gene = slots[pair_slot_pos_[s]].var_id;
      std::vector<Variable> scope{pi};
      for (const auto& id : fresh) scope.push_back(net.variable(id));
      scope.push_back(net.variable(gene));
      std::size_t total = pstates.size() * k * k * k * k * k;
      std::vector<double> tt(total, 0.0);
      std::vector<std::size_t> idx(6, 0);
      for (std::size_t flat = 0; flat < total; ++flat) {
        int ci = ibd_.patterns[idx[0]].class_index()[s];
        if (idx[5] == idx[1 + ci]) tt[flat] = 1.0;
        for (std::size_t d = 6; d-- > 0;) {
          std::size_t lim = d == 0 ? pstates.size() : k;
          if (++idx[d] < lim) break;
          idx[d] = 0;
        }
      }
      net.add_cpt(gene, Factor(std::move(scope), std::move(tt)));
    }
  }

  void attach_het_fixed(Network& net, const std::vector<FounderSlot>& slots, const MarkerContext& ctx,
                        const std::vector<std::size_t>& latent_asg) const {
    if (!spec_.has_urn()) {
      for (const auto& s : slots)
        net.add_cpt(s.var_id, Factor({net.variable(s.var_id)}, ctx.pool_freq(actor_pool(s.actor, latent_asg))));
      return;
    }
    // per-pool urns over the urn-coupled slots, consecutive in slot order
    std::map<std::string, std::vector<std::string>> groups;
    for (const auto& s : slots) {
      std::string pool = actor_pool(s.actor, latent_asg);
      if (is_urn_actor(s.actor))
        groups[pool].push_back(s.var_id);
      else
        net.add_cpt(s.var_id, Factor({net.variable(s.var_id)}, ctx.pool_freq(pool)));
    }
    for (const auto& [pool, ids] : groups)
      attach_urn(net, ids, ctx.pool_freq(pool), spec_.concentration(), "urn." + pool + ".");
  }

  void attach_het_structural(Network& net, const std::vector<FounderSlot>& slots,
                             const MarkerContext& ctx) const {
    // latent subpopulation node per latent actor
    for (const auto& a : latent_actors_) {
      Variable S("S." + a, spec_.subpops.pools);
      net.add_variable(S);
      net.add_cpt(S.id(), Factor({S}, het_weights_));
    }
    const std::size_t k = ctx.marker.alleles.size();
    const std::size_t np = spec_.subpops.pools.size();
    if (!spec_.has_urn()) {
      for (const auto& s : slots) {
        if (spec_.subpops.is_latent(s.actor)) {
          const Variable& S = net.variable("S." + s.actor);
          std::vector<double> t(np * k);
          for (std::size_t p = 0; p < np; ++p)
            for (std::size_t a = 0; a < k; ++a) t[p * k + a] = ctx.pool_freq(spec_.subpops.pools[p])[a];
          net.add_cpt(s.var_id, Factor({S, net.variable(s.var_id)}, std::move(t)));
        } else {
          net.add_cpt(s.var_id,
                      Factor({net.variable(s.var_id)}, ctx.pool_freq(spec_.subpops.assignment.at(s.actor))));
        }
      }
      return;
    }
    // one urn per pool spanning every urn-coupled slot position; each gene
    // selects its pool's output at its own position
    std::map<std::string, std::vector<std::string>> pool_outputs;
    for (std::size_t p = 0; p < np; ++p) {
      const std::string& pool = spec_.subpops.pools[p];
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!is_urn_actor(slots[i].actor)) continue;
        std::string id = "urn." + pool + ".g" + std::to_string(i + 1);
        net.add_variable(ctx.marker.gene_variable(id));
        ids.push_back(id);
      }
      if (!ids.empty()) attach_urn(net, ids, ctx.pool_freq(pool), spec_.concentration(), "urn." + pool + ".");
      pool_outputs[pool] = ids;
    }
    std::size_t urn_pos = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const auto& s = slots[i];
      if (!is_urn_actor(s.actor)) {
        if (spec_.subpops.is_latent(s.actor)) {
          const Variable& S = net.variable("S." + s.actor);
          std::vector<double> t(np * k);
          for (std::size_t p = 0; p < np; ++p)
            for (std::size_t a = 0; a < k; ++a) t[p * k + a] = ctx.pool_freq(spec_.subpops.pools[p])[a];
          net.add_cpt(s.var_id, Factor({S, net.variable(s.var_id)}, std::move(t)));
        } else {
          net.add_cpt(s.var_id,
                      Factor({net.variable(s.var_id)}, ctx.pool_freq(spec_.subpops.assignment.at(s.actor))));
        }
        continue;
      }
      if (spec_.subpops.is_latent(s.actor)) {
        const Variable& S = net.variable("S." + s.actor);
        std::vector<Variable> scope{S};
        for (std::size_t p = 0; p < np; ++p)
          scope.push_back(net.variable(pool_outputs[spec_.subpops.pools[p]][urn_pos]));
        scope.push_back(net.variable(s.var_id));
        std::size_t total = np;
        for (std::size_t p = 0; p < np; ++p) total *= k;
        total *= k;
        std::vector<double> t(total, 0.0);
        std::vector<std::size_t> idx(np + 2, 0);
        for (std::size_t flat = 0; flat < total; ++flat) {
          if (idx[np + 1] == idx[1 + idx[0]]) t[flat] = 1.0;
          for (std::size_t d = np + 2; d-- > 0;) {
            std::size_t lim = d == 0 ? np : k;
            if (++idx[d] < lim) break;
            idx[d] = 0;
          }
        }
        net.add_cpt(s.var_id, Factor(std::move(scope), std::move(t)));
      } else {
        const std::string& pool = spec_.subpops.assignment.at(s.actor);
        const Variable& src = net.variable(pool_outputs[pool][urn_pos]);
        std::vector<double> t(k * k, 0.0);
        for (std::size_t a = 0; a < k; ++a) t[a * k + a] = 1.0;
        net.add_cpt(s.var_id, Factor({src, net.variable(s.var_id)}, std::move(t)));
      }
      ++urn_pos;
    }
  }

  // probability of one configuration of all founding genes
  double config_probability(const MarkerContext& ctx, const std::vector<std::size_t>& g) const {
    const auto& rho = ctx.marker.freq;
    switch (spec_.kind) {
      case ScenarioSpec::Kind::baseline: {
        double p = 1.0;
        for (std::size_t v : g) p *= rho[v];
        return p;
      }
      case ScenarioSpec::Kind::coancestry:
      case ScenarioSpec::Kind::uaf: {
        double p = 1.0;
        std::vector<std::size_t> urn;
        for (std::size_t i = 0; i < slots_.size(); ++i) {
          if (is_urn_actor(slots_[i].actor))
            urn.push_back(g[i]);
          else
            p *= rho[g[i]];
        }
        return p * urn_seq_prob(urn, rho, spec_.concentration());
      }
      case ScenarioSpec::Kind::ibd:
      case ScenarioSpec::Kind::uaf_ibd: {
        double total = 0.0;
        for (std::size_t t = 0; t < ibd_.patterns.size(); ++t) {
          double w = ibd_.pattern_marginal[t];
          if (w <= 0.0) continue;
          auto rep = ibd_.patterns[t].representatives();
          bool ok = true;
          for (int s = 0; s < 4 && ok; ++s)
            ok = g[pair_slot_pos_[s]] == g[pair_slot_pos_[rep[s]]];
          if (!ok) continue;
          double p = 1.0;
          std::vector<std::size_t> urn;
          for (std::size_t i = 0; i < slots_.size(); ++i) {
            if (is_pair_slot(i)) {
              int s = static_cast<int>(std::find(pair_slot_pos_.begin(), pair_slot_pos_.end(), i) -
                                       pair_slot_pos_.begin());
              if (rep[s] != s) continue;  // member: constrained, no draw
              if (spec_.has_urn())
                urn.push_back(g[i]);
              else
                p *= rho[g[i]];
            } else if (spec_.has_urn() && is_urn_actor(slots_[i].actor)) {
              urn.push_back(g[i]);
            } else {
              p *= rho[g[i]];
            }
          }
          if (spec_.has_urn()) p *= urn_seq_prob(urn, rho, spec_.concentration());
          total += w * p;
        }
        return total;
      }
      case ScenarioSpec::Kind::het:
      case ScenarioSpec::Kind::uaf_het: {
        double total = 0.0;
        std::size_t combos = conditioning_.size();
        for (std::size_t c = 0; c < combos; ++c) {
          auto asg = combo_assignment(c);
          double p = conditioning_[c].prior;
          if (!spec_.has_urn()) {
            for (std::size_t i = 0; i < slots_.size(); ++i)
              p *= ctx.pool_freq(actor_pool(slots_[i].actor, asg))[g[i]];
          } else {
            std::map<std::string, std::vector<std::size_t>> groups;
            for (std::size_t i = 0; i < slots_.size(); ++i) {
              std::string pool = actor_pool(slots_[i].actor, asg);
              if (is_urn_actor(slots_[i].actor))
                groups[pool].push_back(g[i]);
              else
                p *= ctx.pool_freq(pool)[g[i]];
            }
            for (const auto& [pool, genes] : groups)
              p *= urn_seq_prob(genes, ctx.pool_freq(pool), spec_.concentration());
          }
          total += p;
        }
        return total;
      }
    }
    throw std::logic_error("unreachable");
  }

  ScenarioSpec spec_;
  Topology topology_ = Topology::criminal_id;
  std::vector<FounderSlot> slots_;
  std::set<std::string> actor_set_;
  std::vector<std::string> urn_actors_;
  std::pair<std::string, std::string> pair_;
  std::vector<std::size_t> pair_slot_pos_;
  ResolvedIbd ibd_;
  std::vector<double> het_weights_;
  std::vector<std::string> latent_actors_;
  std::vector<Cond> conditioning_;
};

}  // namespace fgsens
