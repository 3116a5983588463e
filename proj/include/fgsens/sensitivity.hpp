#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgsens/case_model.hpp"
#include "fgsens/lp.hpp"
#include "fgsens/scenarios.hpp"

namespace fgsens {

// p_t[i] = P(T = t, E | F = i), indexed like the founder joint (slots in
// order, last varying fastest).
struct LikelihoodVectors {
  std::vector<double> p0, p1;
};

// Clamps the founder configuration through one elimination pass: querying the
// slots alongside the target under uniform founder priors yields every
// p(T, E | F = i) at once.
inline LikelihoodVectors founder_likelihood_vectors(const CaseSpec& cs, const std::string& marker,
                                                    const MarkerContext& ctx,
                                                    std::size_t ceiling = 2'000'000) {
  const std::size_t k = ctx.marker.alleles.size();
  auto slots = founder_slots(cs.topology);
  std::size_t total = 1;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    total *= k;
    if (total > ceiling)
      throw std::runtime_error("founder configuration space exceeds the configured ceiling");
  }
  auto uniform = [](Network& net, const std::vector<FounderSlot>& sl, const MarkerContext& c) {
    const double u = 1.0 / static_cast<double>(c.marker.alleles.size());
    for (const auto& s : sl)
      net.add_cpt(s.var_id, Factor::filled({net.variable(s.var_id)}, u));
  };
  CompiledCase cc = compile_case(cs, marker, ctx, uniform);
  std::vector<std::string> query;
  for (const auto& s : slots) query.push_back(s.var_id);
  query.push_back(cc.target);
  auto res = eliminate(cc.net, query);
  const Variable& tv = cc.net.variable(cc.target);
  const std::size_t nt = tv.size();
  const std::size_t i0 = tv.index_of(cc.h0_state);
  const std::size_t i1 = tv.index_of(cc.h1_state);
  const double scale = std::pow(static_cast<double>(k), static_cast<double>(slots.size()));
  LikelihoodVectors out;
  out.p0.resize(total);
  out.p1.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    out.p1[i] = res.value(i * nt + i0) * scale;  // h0 is the T=1 hypothesis
    out.p0[i] = res.value(i * nt + i1) * scale;
  }
  return out;
}

inline double log_lr(const std::vector<double>& f, const LikelihoodVectors& v) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += v.p1[i] * f[i];
    den += v.p0[i] * f[i];
  }
  if (den <= 0.0) throw std::domain_error("log_lr: denominator likelihood is zero");
  if (num <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(num) - std::log(den);
}

inline std::vector<double> gradient(const std::vector<double>& f, const LikelihoodVectors& v) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += v.p1[i] * f[i];
    den += v.p0[i] * f[i];
  }
  if (num <= 0.0 || den <= 0.0) throw std::domain_error("gradient: zero likelihood at f");
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = v.p1[i] / num - v.p0[i] / den;
  return g;
}

struct ConstraintFlags {
  bool simplex = true;
  bool actor_exchange = true;
  bool gene_exchange = true;
  bool marginal = true;
};

// Columns of X, enforced as X^T f = X^T f0. Built from the flagged families
// and pruned to full column rank.
struct ConstraintSet {
  Eigen::MatrixXd X;  // n x r, full column rank
  std::size_t raw_columns = 0;

  std::size_t rank() const { return static_cast<std::size_t>(X.cols()); }
};

namespace detail {

inline std::vector<std::size_t> apply_slot_permutation(const std::vector<std::size_t>& perm,
                                                       std::size_t k, std::size_t flat,
                                                       std::size_t n) {
  std::vector<std::size_t> cfg(n);
  for (std::size_t i = n; i-- > 0;) {
    cfg[i] = flat % k;
    flat /= k;
  }
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = cfg[perm[i]];
  return out;
}

inline std::size_t flat_index(const std::vector<std::size_t>& cfg, std::size_t k) {
  std::size_t f = 0;
  for (std::size_t v : cfg) f = f * k + v;
  return f;
}

}  // namespace detail

inline ConstraintSet build_constraints(const std::vector<FounderSlot>& slots,
                                       const std::pair<std::string, std::string>& actor_pair,
                                       const Marker& marker, const ConstraintFlags& flags = {},
                                       double rank_tol = 1e-9) {
  const std::size_t n = slots.size();
  const std::size_t k = marker.alleles.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;

  std::vector<Eigen::VectorXd> cols;
  if (flags.simplex) cols.push_back(Eigen::VectorXd::Ones(total));
  if (flags.marginal) {
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t a = 0; a < k; ++a) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(total);
        std::vector<std::size_t> cfg(n, 0);
        for (std::size_t flat = 0; flat < total; ++flat) {
          if (cfg[s] == a) c[static_cast<Eigen::Index>(flat)] = 1.0;
          for (std::size_t i = n; i-- > 0;) {
            if (++cfg[i] < k) break;
            cfg[i] = 0;
          }
        }
        cols.push_back(std::move(c));
      }
  }
  std::vector<std::vector<std::size_t>> perms;
  auto identity_perm = [&] {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    return p;
  };
  if (flags.actor_exchange) {
    // swap the two actors' gene pairs
    std::vector<std::size_t> a_pos, b_pos;
    for (std::size_t i = 0; i < n; ++i) {
      if (slots[i].actor == actor_pair.first) a_pos.push_back(i);
      if (slots[i].actor == actor_pair.second) b_pos.push_back(i);
    }
    if (a_pos.size() == 2 && b_pos.size() == 2) {
      auto p = identity_perm();
      p[a_pos[0]] = b_pos[0];
      p[a_pos[1]] = b_pos[1];
      p[b_pos[0]] = a_pos[0];
      p[b_pos[1]] = a_pos[1];
      perms.push_back(p);
    }
  }
  if (flags.gene_exchange) {
    // swap paternal/maternal within each actor
    std::map<std::string, std::vector<std::size_t>> by_actor;
    for (std::size_t i = 0; i < n; ++i) by_actor[slots[i].actor].push_back(i);
    for (const auto& [actor, pos] : by_actor) {
      if (pos.size() != 2) continue;
      auto p = identity_perm();
      p[pos[0]] = pos[1];
      p[pos[1]] = pos[0];
      perms.push_back(p);
    }
  }
  for (const auto& perm : perms) {
    for (std::size_t flat = 0; flat < total; ++flat) {
      auto cfg = detail::apply_slot_permutation(perm, k, flat, n);
      std::size_t other = detail::flat_index(cfg, k);
      if (other <= flat) continue;
      Eigen::VectorXd c = Eigen::VectorXd::Zero(total);
      c[static_cast<Eigen::Index>(flat)] = 1.0;
      c[static_cast<Eigen::Index>(other)] = -1.0;
      cols.push_back(std::move(c));
    }
  }

  ConstraintSet out;
  out.raw_columns = cols.size();
  if (cols.empty()) {
    out.X = Eigen::MatrixXd::Zero(total, 0);
    return out;
  }
  Eigen::MatrixXd raw(total, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) raw.col(static_cast<Eigen::Index>(j)) = cols[j];
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(raw);
  qr.setThreshold(rank_tol);
  const Eigen::Index r = qr.rank();
  auto perm_idx = qr.colsPermutation().indices();
  out.X.resize(total, r);
  for (Eigen::Index j = 0; j < r; ++j) out.X.col(j) = raw.col(perm_idx[j]);
  return out;
}

enum class EpsMode { csd_abs, csd_rel, lfp_abs, lfp_rel };

inline std::string eps_mode_name(EpsMode m) {
  switch (m) {
    case EpsMode::csd_abs: return "csd-abs";
    case EpsMode::csd_rel: return "csd-rel";
    case EpsMode::lfp_abs: return "lfp-abs";
    case EpsMode::lfp_rel: return "lfp-rel";
  }
  return "?";
}

struct EpsilonResult {
  double value = 0.0;
  std::vector<std::size_t> excluded;  // coordinates with f0 = 0 in relative modes
};

inline EpsilonResult epsilon_from_scenario(const std::vector<double>& f,
                                           const std::vector<double>& f0, EpsMode mode) {
  if (f.size() != f0.size()) throw std::invalid_argument("epsilon: size mismatch");
  EpsilonResult out;
  const bool relative = mode == EpsMode::csd_rel || mode == EpsMode::lfp_rel;
  const bool max_norm = mode == EpsMode::lfp_abs || mode == EpsMode::lfp_rel;
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double d = f[i] - f0[i];
    if (relative) {
      if (f0[i] <= 0.0) {
        out.excluded.push_back(i);
        if (std::abs(f[i]) > 1e-12)
          throw std::domain_error("relative epsilon undefined: scenario mass on a zero-baseline configuration");
        continue;
      }
      d /= f0[i];
    }
    if (max_norm)
      acc = std::max(acc, std::abs(d));
    else
      acc += d * d;
  }
  out.value = max_norm ? acc : std::sqrt(acc);
  return out;
}

struct SensitivityProblem {
  std::vector<double> f0;
  LikelihoodVectors vectors;
  Eigen::MatrixXd X;
  Eigen::MatrixXd W;  // empty = identity; used by CSD modes
  double epsilon = 0.0;
  EpsMode mode = EpsMode::csd_abs;
};

struct CsdDirection {
  std::vector<double> delta;  // unit vector
  double residual_norm = 0.0;
  bool degenerate = false;  // gradient lies in the constraint space
};

// delta = W(I - H_W) g / ||W(I - H_W) g||, computed as the residual of W g
// against an orthonormal basis of col(W X). W empty or identity reduces to the
// plain projection.
inline CsdDirection csd_direction(const std::vector<double>& g, const Eigen::MatrixXd& X,
                                  const Eigen::MatrixXd& W = {}) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd gv = Eigen::Map<const Eigen::VectorXd>(g.data(), n);
  Eigen::VectorXd wg = W.size() ? Eigen::VectorXd(W * gv) : gv;
  Eigen::VectorXd resid = wg;
  if (X.cols() > 0) {
    Eigen::MatrixXd XW = W.size() ? Eigen::MatrixXd(W * X) : X;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(XW);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, XW.cols());
    resid -= Q * (Q.transpose() * wg);
  }
  CsdDirection out;
  double nr = resid.norm();
  out.residual_norm = nr;
  if (nr < 1e-12 * std::max(1.0, wg.norm())) {
    out.degenerate = true;
    out.delta.assign(g.size(), 0.0);
    return out;
  }
  resid /= nr;
  out.delta.assign(resid.data(), resid.data() + n);
  return out;
}

struct Extremes {
  double lo_log = 0.0, hi_log = 0.0;  // log LR extremes; +-inf possible
  double lo_lr() const { return std::exp(lo_log); }
  double hi_lr() const { return std::exp(hi_log); }
};

// Extremes of h(f0 + t W delta) over |t| <= eps intersected with f >= 0. The
// ratio of two affine functions is monotone between poles, so only the
// endpoints and pole crossings matter; a denominator crossing inside the
// interval yields +inf, a numerator crossing -inf.
inline Extremes csd_extremes(const SensitivityProblem& prob) {
  const std::size_t n = prob.f0.size();
  const double h0 = log_lr(prob.f0, prob.vectors);
  Extremes out{h0, h0};
  if (prob.epsilon <= 0.0) return out;
  auto g = gradient(prob.f0, prob.vectors);
  auto dir = csd_direction(g, prob.X, prob.W);
  if (dir.degenerate) return out;

  std::vector<double> step(n);
  if (prob.W.size()) {
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(dir.delta.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd s = prob.W * d;
    for (std::size_t i = 0; i < n; ++i) step[i] = s[static_cast<Eigen::Index>(i)];
  } else {
    step = dir.delta;
  }

  double tlo = -prob.epsilon, thi = prob.epsilon;
  for (std::size_t i = 0; i < n; ++i) {
    if (step[i] > 1e-300)
      tlo = std::max(tlo, -prob.f0[i] / step[i]);
    else if (step[i] < -1e-300)
      thi = std::min(thi, prob.f0[i] / -step[i]);
  }
  double a1 = 0, b1 = 0, a0 = 0, b0 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a1 += prob.vectors.p1[i] * prob.f0[i];
    b1 += prob.vectors.p1[i] * step[i];
    a0 += prob.vectors.p0[i] * prob.f0[i];
    b0 += prob.vectors.p0[i] * step[i];
  }
  const double inf = std::numeric_limits<double>::infinity();
  // On the feasible interval both affine forms stay nonnegative, so a zero can
  // only sit at an endpoint; the monotone segment then runs off to +-inf (or
  // to the slope ratio when both vanish together).
  auto absorb = [&](double tend) {
    double num = a1 + tend * b1;
    double den = a0 + tend * b0;
    if (den <= 0.0 && num <= 0.0) {
      double lim = b0 != 0.0 ? b1 / b0 : 0.0;
      if (lim > 0.0) {
        out.lo_log = std::min(out.lo_log, std::log(lim));
        out.hi_log = std::max(out.hi_log, std::log(lim));
      } else {
        out.lo_log = -inf;
      }
      return;
    }
    if (den <= 0.0) {
      out.hi_log = inf;
      return;
    }
    if (num <= 0.0) {
      out.lo_log = -inf;
      return;
    }
    double h = std::log(num) - std::log(den);
    out.lo_log = std::min(out.lo_log, h);
    out.hi_log = std::max(out.hi_log, h);
  };
  absorb(tlo);
  absorb(thi);
  return out;
}

struct LfpOptions {
  bool trivial_convention = true;  // report 0 / inf when the box admits a zero likelihood
};

// Extremes of exp(h(f)) = p1.f / p0.f over X^T f = X^T f0, f >= 0,
// |f_i - f0_i| <= eps * w_i, via the two-program linear-fractional reduction.
inline Extremes lfp_extremes(const SensitivityProblem& prob, const LfpOptions& opts = {}) {
  const std::size_t n = prob.f0.size();
  const auto& p0 = prob.vectors.p0;
  const auto& p1 = prob.vectors.p1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lob(n), upb(n);
  for (std::size_t i = 0; i < n; ++i) {
    double w = prob.mode == EpsMode::lfp_rel ? prob.f0[i] : 1.0;
    lob[i] = std::max(0.0, prob.f0[i] - prob.epsilon * w);
    upb[i] = prob.f0[i] + prob.epsilon * w;
  }
  const std::size_t r = static_cast<std::size_t>(prob.X.cols());

  // direct LP over f (used for the zero-likelihood probes)
  auto feasibility_min = [&](const std::vector<double>& c) {
    LpProblem lp;
    lp.c = c;
    for (std::size_t j = 0; j < r; ++j) {
      LpRow row;
      row.a.resize(n);
      double b = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        row.a[i] = prob.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        b += row.a[i] * prob.f0[i];
      }
      row.rel = LpRel::eq;
      row.b = b;
      lp.rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < n; ++i) {
      LpRow hi;
      hi.a.assign(n, 0.0);
      hi.a[i] = 1.0;
      hi.rel = LpRel::le;
      hi.b = upb[i];
      lp.rows.push_back(std::move(hi));
      if (lob[i] > 0.0) {
        LpRow lo;
        lo.a.assign(n, 0.0);
        lo.a[i] = 1.0;
        lo.rel = LpRel::ge;
        lo.b = lob[i];
        lp.rows.push_back(std::move(lo));
      }
    }
    return solve_lp(lp);
  };

  bool num_zero_reachable = false, den_zero_reachable = false;
  if (opts.trivial_convention) {
    auto s1 = feasibility_min(p1);
    num_zero_reachable = s1.status == LpStatus::optimal && s1.objective <= 1e-12;
    auto s0 = feasibility_min(p0);
    den_zero_reachable = s0.status == LpStatus::optimal && s0.objective <= 1e-12;
  }

  // Charnes-Cooper: variables (y0, y); minimize sign * p1.y subject to
  //   X^T y - (X^T f0) y0 = 0,  p0.y = 1,  lob*y0 <= y <= upb*y0,  y >= 0.
  auto charnes_cooper = [&](int sign) {
    LpProblem lp;
    lp.c.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) lp.c[i + 1] = sign * p1[i];
    for (std::size_t j = 0; j < r; ++j) {
      LpRow row;
      row.a.assign(n + 1, 0.0);
      double xf0 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double xij = prob.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        row.a[i + 1] = xij;
        xf0 += xij * prob.f0[i];
      }
      row.a[0] = -xf0;
      row.rel = LpRel::eq;
      row.b = 0.0;
      lp.rows.push_back(std::move(row));
    }
    {
      LpRow norm;
      norm.a.assign(n + 1, 0.0);
      for (std::size_t i = 0; i < n; ++i) norm.a[i + 1] = p0[i];
      norm.rel = LpRel::eq;
      norm.b = 1.0;
      lp.rows.push_back(std::move(norm));
    }
    for (std::size_t i = 0; i < n; ++i) {
      LpRow hi;
      hi.a.assign(n + 1, 0.0);
      hi.a[i + 1] = 1.0;
      hi.a[0] = -upb[i];
      hi.rel = LpRel::le;
      hi.b = 0.0;
      lp.rows.push_back(std::move(hi));
      if (lob[i] > 0.0) {
        LpRow lo;
        lo.a.assign(n + 1, 0.0);
        lo.a[i + 1] = -1.0;
        lo.a[0] = lob[i];
        lo.rel = LpRel::le;
        lo.b = 0.0;
        lp.rows.push_back(std::move(lo));
      }
    }
    return solve_lp(lp);
  };

  Extremes out;
  // lower
  if (num_zero_reachable) {
    out.lo_log = -inf;
  } else {
    auto s = charnes_cooper(+1);
    if (s.status == LpStatus::optimal)
      out.lo_log = s.objective > 0.0 ? std::log(s.objective) : -inf;
    else if (s.status == LpStatus::unbounded)
      out.lo_log = -inf;  // cannot happen with nonnegative coefficients
    else
      out.lo_log = log_lr(prob.f0, prob.vectors);
  }
  // upper
  if (den_zero_reachable) {
    out.hi_log = inf;
  } else {
    auto s = charnes_cooper(-1);
    if (s.status == LpStatus::unbounded)
      out.hi_log = inf;
    else if (s.status == LpStatus::optimal)
      out.hi_log = -s.objective > 0.0 ? std::log(-s.objective) : -inf;
    else
      out.hi_log = log_lr(prob.f0, prob.vectors);
  }
  return out;
}

}  // namespace fgsens
