#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgsens {

// Partial assignment of variables to state labels.
using Evidence = std::map<std::string, std::string>;

class Variable {
 public:
  Variable() = default;
  Variable(std::string id, std::vector<std::string> states)
      : id_(std::move(id)),
        states_(std::make_shared<const std::vector<std::string>>(std::move(states))) {
    if (states_->empty()) throw std::invalid_argument("variable " + id_ + ": empty domain");
    for (std::size_t i = 0; i < states_->size(); ++i)
      for (std::size_t j = i + 1; j < states_->size(); ++j)
        if ((*states_)[i] == (*states_)[j])
          throw std::invalid_argument("variable " + id_ + ": duplicate state " + (*states_)[i]);
  }

  const std::string& id() const { return id_; }
  const std::vector<std::string>& states() const { return *states_; }
  std::size_t size() const { return states_->size(); }

  std::size_t index_of(const std::string& state) const {
    for (std::size_t i = 0; i < states_->size(); ++i)
      if ((*states_)[i] == state) return i;
    throw std::invalid_argument("variable " + id_ + ": unknown state " + state);
  }

  bool same_domain(const Variable& other) const {
    return states_ == other.states_ || *states_ == *other.states_;
  }

  bool operator==(const Variable& other) const { return id_ == other.id_; }

 private:
  std::string id_;
  std::shared_ptr<const std::vector<std::string>> states_;
};

inline Variable boolean_variable(const std::string& id) {
  return Variable(id, {"true", "false"});
}

// A nonnegative table over the joint states of an ordered variable scope.
// Entries are stored flat with the last scope variable varying fastest.
class Factor {
 public:
  Factor() : table_(1, 1.0) {}
  explicit Factor(double scalar) : table_(1, scalar) {}

  Factor(std::vector<Variable> scope, std::vector<double> table)
      : scope_(std::move(scope)), table_(std::move(table)) {
    std::size_t expect = 1;
    for (std::size_t i = 0; i < scope_.size(); ++i) {
      expect *= scope_[i].size();
      for (std::size_t j = i + 1; j < scope_.size(); ++j)
        if (scope_[i] == scope_[j])
          throw std::invalid_argument("factor scope repeats variable " + scope_[i].id());
    }
    if (table_.size() != expect) throw std::invalid_argument("factor table size mismatch");
    for (double v : table_)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("factor entries must be finite and >= 0");
  }

  static Factor filled(std::vector<Variable> scope, double value) {
    std::size_t n = 1;
    for (const auto& v : scope) n *= v.size();
    return Factor(std::move(scope), std::vector<double>(n, value));
  }

  const std::vector<Variable>& scope() const { return scope_; }
  const std::vector<double>& table() const { return table_; }
  std::vector<double>& table() { return table_; }
  std::size_t size() const { return table_.size(); }

  bool has_variable(const std::string& id) const {
    return position_of(id) != scope_.size();
  }

  std::size_t position_of(const std::string& id) const {
    for (std::size_t i = 0; i < scope_.size(); ++i)
      if (scope_[i].id() == id) return i;
    return scope_.size();
  }

  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> s(scope_.size());
    std::size_t acc = 1;
    for (std::size_t k = scope_.size(); k-- > 0;) {
      s[k] = acc;
      acc *= scope_[k].size();
    }
    return s;
  }

  double at(const Evidence& assignment) const {
    auto s = strides();
    std::size_t flat = 0;
    for (std::size_t k = 0; k < scope_.size(); ++k) {
      auto it = assignment.find(scope_[k].id());
      if (it == assignment.end())
        throw std::invalid_argument("assignment misses variable " + scope_[k].id());
      flat += scope_[k].index_of(it->second) * s[k];
    }
    return table_[flat];
  }

  double total() const { return std::accumulate(table_.begin(), table_.end(), 0.0); }
  double max_entry() const { return table_.empty() ? 0.0 : *std::max_element(table_.begin(), table_.end()); }

  Factor multiply(const Factor& rhs) const {
    std::vector<Variable> out_scope = scope_;
    for (const auto& v : rhs.scope_) {
      std::size_t p = 0;
      for (; p < out_scope.size(); ++p)
        if (out_scope[p] == v) break;
      if (p == out_scope.size()) {
        out_scope.push_back(v);
      } else if (!out_scope[p].same_domain(v)) {
        throw std::invalid_argument("domain mismatch on shared variable " + v.id());
      }
    }
    const std::size_t n = out_scope.size();
    std::vector<std::size_t> sz(n), ls(n, 0), rs(n, 0);
    auto lstr = strides();
    auto rstr = rhs.strides();
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) {
      sz[k] = out_scope[k].size();
      total *= sz[k];
      std::size_t lp = position_of(out_scope[k].id());
      if (lp != scope_.size()) ls[k] = lstr[lp];
      std::size_t rp = rhs.position_of(out_scope[k].id());
      if (rp != rhs.scope_.size()) rs[k] = rstr[rp];
    }
    std::vector<double> out(total);
    std::vector<std::size_t> idx(n, 0);
    std::size_t li = 0, ri = 0;
    for (std::size_t flat = 0; flat < total; ++flat) {
      out[flat] = table_[li] * rhs.table_[ri];
      for (std::size_t k = n; k-- > 0;) {
        ++idx[k];
        li += ls[k];
        ri += rs[k];
        if (idx[k] < sz[k]) break;
        idx[k] = 0;
        li -= ls[k] * sz[k];
        ri -= rs[k] * sz[k];
      }
    }
    return Factor(std::move(out_scope), std::move(out));
  }

  // Sums out every variable not in keep; keep order follows this factor's scope.
  Factor marginalize(const std::vector<std::string>& keep) const {
    for (const auto& id : keep)
      if (!has_variable(id)) throw std::invalid_argument("marginalize: unknown variable " + id);
    std::vector<Variable> out_scope;
    for (const auto& v : scope_)
      if (std::find(keep.begin(), keep.end(), v.id()) != keep.end()) out_scope.push_back(v);
    const std::size_t n = scope_.size();
    std::vector<std::size_t> os(n, 0), sz(n);
    std::size_t out_total = 1;
    for (const auto& v : out_scope) out_total *= v.size();
    // output strides per input position
    std::vector<std::size_t> ostr(out_scope.size());
    {
      std::size_t acc = 1;
      for (std::size_t k = out_scope.size(); k-- > 0;) {
        ostr[k] = acc;
        acc *= out_scope[k].size();
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      sz[k] = scope_[k].size();
      for (std::size_t j = 0; j < out_scope.size(); ++j)
        if (out_scope[j] == scope_[k]) os[k] = ostr[j];
    }
    std::vector<double> out(out_total, 0.0);
    std::vector<std::size_t> idx(n, 0);
    std::size_t oi = 0;
    for (std::size_t flat = 0; flat < table_.size(); ++flat) {
      out[oi] += table_[flat];
      for (std::size_t k = n; k-- > 0;) {
        ++idx[k];
        oi += os[k];
        if (idx[k] < sz[k]) break;
        idx[k] = 0;
        oi -= os[k] * sz[k];
      }
    }
    return Factor(std::move(out_scope), std::move(out));
  }

  Factor sum_out(const std::string& id) const {
    std::vector<std::string> keep;
    for (const auto& v : scope_)
      if (v.id() != id) keep.push_back(v.id());
    if (keep.size() == scope_.size()) throw std::invalid_argument("sum_out: unknown variable " + id);
    return marginalize(keep);
  }

  // Zeroes entries inconsistent with the evidence; scope unchanged.
  Factor condition(const Evidence& evidence) const {
    std::vector<std::pair<std::size_t, std::size_t>> pins;  // scope position -> state index
    for (const auto& [id, state] : evidence) {
      std::size_t p = position_of(id);
      if (p == scope_.size())
        throw std::invalid_argument("condition: variable " + id + " not in scope");
      pins.emplace_back(p, scope_[p].index_of(state));
    }
    return condition_known(pins);
  }

  // Same, but silently skips evidence variables outside the scope.
  Factor condition_partial(const Evidence& evidence) const {
    std::vector<std::pair<std::size_t, std::size_t>> pins;
    for (const auto& [id, state] : evidence) {
      std::size_t p = position_of(id);
      if (p != scope_.size()) pins.emplace_back(p, scope_[p].index_of(state));
    }
    return condition_known(pins);
  }

  Factor normalized() const {
    double z = total();
    if (z <= 0.0) throw std::runtime_error("normalize: zero total mass");
    Factor out = *this;
    for (double& v : out.table_) v /= z;
    return out;
  }

  Factor scaled(double c) const {
    Factor out = *this;
    for (double& v : out.table_) v *= c;
    return out;
  }

  // Reorders the scope; entry values follow.
  Factor reordered(const std::vector<std::string>& order) const {
    if (order.size() != scope_.size()) throw std::invalid_argument("reorder: size mismatch");
    std::vector<Variable> out_scope;
    for (const auto& id : order) {
      std::size_t p = position_of(id);
      if (p == scope_.size()) throw std::invalid_argument("reorder: unknown variable " + id);
      out_scope.push_back(scope_[p]);
    }
    const std::size_t n = out_scope.size();
    auto istr = strides();
    std::vector<std::size_t> sz(n), is(n);
    for (std::size_t k = 0; k < n; ++k) {
      sz[k] = out_scope[k].size();
      is[k] = istr[position_of(out_scope[k].id())];
    }
    std::vector<double> out(table_.size());
    std::vector<std::size_t> idx(n, 0);
    std::size_t ii = 0;
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
      out[flat] = table_[ii];
      for (std::size_t k = n; k-- > 0;) {
        ++idx[k];
        ii += is[k];
        if (idx[k] < sz[k]) break;
        idx[k] = 0;
        ii -= is[k] * sz[k];
      }
    }
    return Factor(std::move(out_scope), std::move(out));
  }

 private:
  Factor condition_known(const std::vector<std::pair<std::size_t, std::size_t>>& pins) const {
    Factor out = *this;
    if (pins.empty()) return out;
    const std::size_t n = scope_.size();
    std::vector<std::size_t> sz(n);
    for (std::size_t k = 0; k < n; ++k) sz[k] = scope_[k].size();
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t flat = 0; flat < table_.size(); ++flat) {
      for (const auto& [p, s] : pins)
        if (idx[p] != s) {
          out.table_[flat] = 0.0;
          break;
        }
      for (std::size_t k = n; k-- > 0;) {
        ++idx[k];
        if (idx[k] < sz[k]) break;
        idx[k] = 0;
      }
    }
    return out;
  }

  std::vector<Variable> scope_;
  std::vector<double> table_;
};

}  // namespace fgsens
