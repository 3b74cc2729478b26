#pragma once

// The nu construction for the K_* posterior bound: membership in S_{d,T},
// lambda coefficients, nu~_d, the bottom-up semimeasure fix-up nu_d, the
// weighted total nu, and the exhaustive prefix-free-set check on nu~_d.

#include "mclab/bounds.hpp"
#include "mclab/kstar.hpp"
#include "mclab/measures.hpp"
#include "mclab/report.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

namespace mclab {

inline constexpr std::size_t kNuDepthCap = 6;
inline constexpr std::size_t kCutDepthCap = 5;

struct NuTable {
  long d = 0;
  std::size_t depth = 0;
  std::map<std::string, Rational> values;  // nu_d
  std::map<std::string, Rational> tilde;   // nu~_d

  const Rational& at(std::string_view z) const { return values.at(std::string(z)); }
};

// Number of maximal antichains (cuts) of the complete binary tree of the
// given depth: C(0) = 1, C(n+1) = 1 + C(n)^2.
inline std::uint64_t cut_count(std::size_t depth) {
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < depth; ++i) c = 1 + c * c;
  return c;
}

// All cuts of the subtree rooted at z with `depth` levels below it.
inline std::vector<std::vector<std::string>> enumerate_cuts(const std::string& z, std::size_t depth) {
  std::vector<std::vector<std::string>> out{{z}};
  if (depth == 0) return out;
  const auto left = enumerate_cuts(z + '0', depth - 1);
  const auto right = enumerate_cuts(z + '1', depth - 1);
  for (const auto& a : left)
    for (const auto& b : right) {
      std::vector<std::string> cut = a;
      cut.insert(cut.end(), b.begin(), b.end());
      out.push_back(std::move(cut));
    }
  return out;
}

// Uniform sample from the cuts of the subtree at z.
template <class Rng>
void sample_cut(const std::string& z, std::size_t depth, Rng& rng, std::vector<std::string>& out) {
  if (depth == 0 || std::uniform_int_distribution<std::uint64_t>(0, cut_count(depth) - 1)(rng) == 0) {
    out.push_back(z);
    return;
  }
  sample_cut(z + '0', depth - 1, rng, out);
  sample_cut(z + '1', depth - 1, rng, out);
}

class NuConstruction {
 public:
  explicit NuConstruction(const Predictor& xi, long d_lo = -8, long d_hi = 8)
      : xi_(&xi), d_lo_(d_lo), d_hi_(d_hi) {
    if (xi.alphabet() != 2) throw std::invalid_argument("nu construction is over the binary tree");
    if (d_lo > d_hi) throw std::invalid_argument("empty d window");
  }

  const Predictor& predictor() const { return *xi_; }
  const MeasureRegistry& registry() const { return xi_->registry(); }
  Estimator& estimator() const { return xi_->estimator(); }
  long d_lo() const { return d_lo_; }
  long d_hi() const { return d_hi_; }

  // Both forms of z in S_{d,T}; they must agree for proper measures.
  struct Membership {
    bool sum_form = false;
    bool deficiency_form = false;
  };

  Membership membership(std::string_view z, long d, std::size_t t) const {
    check_index(t);
    if (z.size() > kNuDepthCap) throw BudgetError("membership depth above cap");
    const MeasureSpec& mu = registry().spec(t);
    const Rational mu_z = detail::evaluate(mu, z);
    const Rational scaled = dyadic(-d) * xi(z);
    return Membership{level_mass(t, z.size()) - mu_z + scaled > 1, mu_z < scaled};
  }

  bool member(std::string_view z, long d, std::size_t t) const {
    const Membership m = membership(z, d, t);
    if (m.sum_form != m.deficiency_form) throw Error("S_{d,T} membership forms disagree at '" + std::string(z) + "'");
    return m.sum_form;
  }

  Rational lambda(std::string_view z, std::size_t t, long d) const {
    check_index(t);
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k <= z.size(); ++k) {
      const std::string_view head = z.substr(0, k);
      if (!member(head, d, t)) continue;
      const auto ks = kstar_upper(estimator(), registry().code(t), head).value;
      if (ks && (!best || *ks < *best)) best = ks;
    }
    return best ? dyadic(-static_cast<long>(*best)) : Rational(0);
  }

  Rational nu_tilde(std::string_view z, long d) const {
    const std::string key = std::to_string(d) + ":" + std::string(z);
    auto it = tilde_memo_.find(key);
    if (it != tilde_memo_.end()) return it->second;
    Rational v = 0;
    for (std::size_t t = 0; t < registry().size(); ++t) {
      const Rational lam = lambda(z, t, d);
      if (lam != 0) v += lam * dyadic(d) * detail::evaluate(registry().spec(t), z);
    }
    tilde_memo_.emplace(key, v);
    return v;
  }

  NuTable fixup(long d, std::size_t depth) const {
    if (depth > kNuDepthCap) throw BudgetError("nu table depth above cap " + std::to_string(kNuDepthCap));
    NuTable table{d, depth, {}, {}};
    fill(table, "", depth);
    return table;
  }

  const NuTable& table(long d, std::size_t depth) const {
    auto key = std::make_pair(d, depth);
    auto it = tables_.find(key);
    if (it == tables_.end()) it = tables_.emplace(key, fixup(d, depth)).first;
    return it->second;
  }

  // 2^-K(zigzag d), or 0 when K(zigzag d) is not witnessed.
  Rational d_weight(long d) const {
    const auto k = estimator().k_int(d).value;
    return k ? dyadic(-static_cast<long>(*k)) : Rational(0);
  }

  Rational nu_total(std::string_view z, std::size_t depth) const {
    if (z.size() > depth) throw std::invalid_argument("string longer than the table depth");
    Rational v = 0;
    for (long d = d_lo_; d <= d_hi_; ++d) {
      const Rational w = d_weight(d);
      if (w != 0) v += w * table(d, depth).at(z);
    }
    return v;
  }

 private:
  Rational xi(std::string_view z) const {
    auto it = xi_memo_.find(std::string(z));
    if (it == xi_memo_.end()) it = xi_memo_.emplace(std::string(z), (*xi_)(z)).first;
    return it->second;
  }

  // sum over v in X^n of mu^T(v)
  Rational level_mass(std::size_t t, std::size_t n) const {
    auto key = std::make_pair(t, n);
    auto it = level_memo_.find(key);
    if (it != level_memo_.end()) return it->second;
    Rational total = 0;
    detail::for_each_word(2, n, [&](std::string_view v) { total += detail::evaluate(registry().spec(t), v); });
    level_memo_.emplace(key, total);
    return total;
  }

  void check_index(std::size_t t) const {
    if (t >= registry().size()) throw std::out_of_range("measure index " + std::to_string(t) + " not registered");
  }

  Rational fill(NuTable& table, const std::string& z, std::size_t remaining) const {
    const Rational tilde = nu_tilde(z, table.d);
    table.tilde[z] = tilde;
    Rational v = tilde;
    if (remaining > 0) {
      const Rational children = fill(table, z + '0', remaining - 1) + fill(table, z + '1', remaining - 1);
      v = std::max(v, children);
    }
    table.values[z] = v;
    return v;
  }

  const Predictor* xi_;
  long d_lo_;
  long d_hi_;
  mutable std::map<std::string, Rational> xi_memo_;
  mutable std::map<std::string, Rational> tilde_memo_;
  mutable std::map<std::pair<std::size_t, std::size_t>, Rational> level_memo_;
  mutable std::map<std::pair<long, std::size_t>, NuTable> tables_;
};

// Free-function forms over a shared construction.

inline bool s_dT_member(const NuConstruction& nu, std::string_view z, long d, std::size_t t) {
  return nu.member(z, d, t);
}

inline Rational lambda_coeff(const NuConstruction& nu, std::string_view z, std::size_t t, long d) {
  return nu.lambda(z, t, d);
}

inline Rational nu_tilde(const NuConstruction& nu, std::string_view z, long d) { return nu.nu_tilde(z, d); }

inline NuTable nu_fixup(const NuConstruction& nu, long d, std::size_t depth) { return nu.fixup(d, depth); }

inline Rational nu_total(const NuConstruction& nu, std::string_view z, std::size_t depth) {
  return nu.nu_total(z, depth);
}

namespace detail {

inline std::vector<std::pair<std::string, long long>> nu_budgets(const NuConstruction& nu, long d, std::size_t depth) {
  return {{"d", d},
          {"depth", static_cast<long long>(depth)},
          {"L", static_cast<long long>(nu.estimator().L())},
          {"S", static_cast<long long>(nu.estimator().S())}};
}

inline std::string join_cut(const std::vector<std::string>& cut) {
  std::string s = "{";
  for (std::size_t i = 0; i < cut.size(); ++i) s += (i ? "," : "") + (cut[i].empty() ? std::string("e") : cut[i]);
  return s + "}";
}

}  // namespace detail

// NuTable invariants: one-step semimeasure inequality, root <= 1, nu_d >= nu~_d.
inline std::vector<BoundReport> nu_table_report(const NuTable& table, const NuConstruction& nu) {
  std::optional<Rational> worst_gap;
  std::optional<Rational> worst_dom;
  for (const auto& [z, v] : table.values) {
    const Rational dom = v - table.tilde.at(z);
    if (!worst_dom || dom < *worst_dom) worst_dom = dom;
    if (z.size() < table.depth) {
      const Rational gap = v - table.values.at(z + '0') - table.values.at(z + '1');
      if (!worst_gap || gap < *worst_gap) worst_gap = gap;
    }
  }
  const auto budgets = detail::nu_budgets(nu, table.d, table.depth);
  std::vector<BoundReport> out;
  out.push_back(make_report("nu_d.root", Quantity(table.at("")), {{"one", Quantity(1)}}, Verdict::AssertedExact, 0.0,
                            budgets));
  out.push_back(make_report("nu_d.one_step", Quantity(0), {{"min_parent_minus_children", Quantity(worst_gap.value_or(0))}},
                            Verdict::AssertedExact, 0.0, budgets));
  out.push_back(make_report("nu_d.dominates_tilde", Quantity(0), {{"min_nu_minus_tilde", Quantity(worst_dom.value_or(0))}},
                            Verdict::AssertedExact, 0.0, budgets));
  return out;
}

// Semimeasure check on the total nu, plus the measured max ratio nu / xi_L.
inline std::vector<BoundReport> nu_total_report(const NuConstruction& nu, std::size_t depth) {
  std::optional<Rational> worst_gap;
  std::optional<Rational> max_ratio;
  std::string ratio_at;
  bool unbounded = false;
  for (std::size_t len = 0; len <= depth; ++len) {
    detail::for_each_word(2, len, [&](std::string_view z) {
      const Rational v = nu.nu_total(z, depth);
      if (len < depth) {
        const std::string zs(z);
        const Rational gap = v - nu.nu_total(zs + '0', depth) - nu.nu_total(zs + '1', depth);
        if (!worst_gap || gap < *worst_gap) worst_gap = gap;
      }
      const Rational x = nu.predictor()(z);
      if (x == 0) {
        if (v != 0) unbounded = true;
        return;
      }
      const Rational r = v / x;
      if (!max_ratio || r > *max_ratio) {
        max_ratio = r;
        ratio_at = std::string(z);
      }
    });
  }
  std::string flagged;
  for (long d = nu.d_lo(); d <= nu.d_hi(); ++d)
    if (nu.d_weight(d) == 0) flagged += (flagged.empty() ? "" : " ") + std::to_string(d);
  std::vector<std::pair<std::string, long long>> budgets = {{"d_lo", nu.d_lo()},
                                                            {"d_hi", nu.d_hi()},
                                                            {"depth", static_cast<long long>(depth)},
                                                            {"L", static_cast<long long>(nu.estimator().L())},
                                                            {"S", static_cast<long long>(nu.estimator().S())}};
  const std::string note = flagged.empty() ? "" : "K(d) not witnessed for d in {" + flagged + "}";
  std::vector<BoundReport> out;
  out.push_back(make_report("nu.root", Quantity(nu.nu_total("", depth)), {{"one", Quantity(1)}},
                            Verdict::AssertedExact, 0.0, budgets, note));
  out.push_back(make_report("nu.one_step", Quantity(0), {{"min_parent_minus_children", Quantity(worst_gap.value_or(0))}},
                            Verdict::AssertedExact, 0.0, budgets, note));
  out.push_back(make_report("nu.max_ratio_to_xi",
                            unbounded ? Quantity::infinity() : Quantity(max_ratio.value_or(Rational(0))), {},
                            Verdict::MeasuredOnly, 0.0, budgets, "at '" + ratio_at + "'"));
  return out;
}

struct Claim10Options {
  std::size_t sample = 0;  // 0: enumerate every cut
  std::uint64_t seed = 0;
};

// Sum of nu~_d over every cut of the depth-bounded tree is at most 1. With
// sample > 0 the cuts are drawn uniformly instead of enumerated. The largest
// enumerated sum must equal the fixed-up root value, which is the maximum over
// all cuts (non-maximal antichains are dominated since nu~ >= 0).
inline std::vector<BoundReport> claim10_verify(const NuConstruction& nu, long d, std::size_t depth,
                                               Claim10Options opts = {}) {
  if (depth > kCutDepthCap) throw BudgetError("cut enumeration depth above cap " + std::to_string(kCutDepthCap));
  const NuTable& table = nu.table(d, depth);
  auto budgets = detail::nu_budgets(nu, d, depth);
  std::optional<Rational> max_sum;
  std::vector<std::string> argmax;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::string first_violation;
  bool negative = false;
  for (const auto& [z, v] : table.tilde) negative = negative || v < 0;
  auto check = [&](const std::vector<std::string>& cut) {
    Rational s = 0;
    for (const auto& z : cut) s += table.tilde.at(z);
    ++checked;
    if (s > 1) {
      if (violations++ == 0) first_violation = detail::join_cut(cut);
    }
    if (!max_sum || s > *max_sum) {
      max_sum = s;
      argmax = cut;
    }
  };
  if (opts.sample == 0) {
    for (const auto& cut : enumerate_cuts("", depth)) check(cut);
  } else {
    std::mt19937_64 rng(opts.seed);
    for (std::size_t i = 0; i < opts.sample; ++i) {
      std::vector<std::string> cut;
      sample_cut("", depth, rng, cut);
      check(cut);
    }
  }
  budgets.emplace_back("cuts", static_cast<long long>(checked));
  std::vector<BoundReport> out;
  out.push_back(make_report("claim10.max_cut_sum", Quantity(max_sum.value_or(0)), {{"one", Quantity(1)}},
                            Verdict::AssertedExact, 0.0, budgets,
                            violations ? "violations=" + std::to_string(violations) + " first=" + first_violation
                                       : "argmax=" + detail::join_cut(argmax)));
  out.back().passed = violations == 0;
  out.push_back(make_check("claim10.tilde_nonnegative", !negative, "maximal cuts dominate all antichains", budgets));
  if (opts.sample == 0) {
    out.push_back(make_check("claim10.cut_count", checked == cut_count(depth),
                             "expected " + std::to_string(cut_count(depth)), budgets));
    out.push_back(make_check("claim10.max_equals_fixup_root", max_sum && *max_sum == table.at(""), {}, budgets));
  } else {
    out.push_back(make_report("claim10.fixup_root", Quantity(table.at("")), {{"one", Quantity(1)}},
                              Verdict::AssertedExact, 0.0, budgets, "max over all cuts"));
  }
  return out;
}

// Machine-relative chain instance: with d = ceil(d(x)) - 1 and p a K_* witness
// for code(mu) given x, 2^-K(d) 2^-l(p) 2^d mu(xy) <= nu(xy) exactly. The
// final comparison of nu(xy) with xi_L(xy) is reported only.
inline std::vector<BoundReport> theorem7_chain(const NuConstruction& nu, std::size_t t, std::string_view x,
                                               std::string_view y) {
  const std::size_t depth = x.size() + y.size();
  if (depth > kNuDepthCap) throw BudgetError("x y longer than the nu table cap");
  const MeasureSpec& mu = nu.registry().spec(t);
  const std::string xy = std::string(x) + std::string(y);
  const DeficiencyRecord dx = deficiency(mu, nu.predictor(), x);
  const long d = dx.ceil_value - 1;
  const KStarEstimate ks = kstar_upper(nu.estimator(), nu.registry().code(t), x);
  auto budgets = detail::nu_budgets(nu, d, depth);
  const std::string tag = "mu#" + std::to_string(t) + " x=" + std::string(x) + " y=" + std::string(y);
  std::vector<BoundReport> out;
  if (d < nu.d_lo() || d > nu.d_hi()) {
    out.push_back(make_report("t7chain.window", Quantity(d), {}, Verdict::MeasuredOnly, 0.0, budgets,
                              tag + " (d outside window)"));
    return out;
  }
  const Rational w = nu.d_weight(d);
  const Rational lhs = ks.value ? w * dyadic(-static_cast<long>(*ks.value)) * dyadic(d) * measure_eval(mu, xy)
                                : Rational(0);
  const Rational rhs = nu.nu_total(xy, depth);
  std::string note = tag;
  if (!ks.value) note += " (K_* not witnessed)";
  if (w == 0) note += " (K(d) not witnessed)";
  out.push_back(make_report("t7chain.nu_lower", Quantity(lhs), {{"nu_xy", Quantity(rhs)}}, Verdict::AssertedExact,
                            0.0, budgets, note));
  const Rational xi_xy = nu.predictor()(xy);
  out.push_back(make_report("t7chain.nu_vs_xi", Quantity(rhs), {{"xi_xy", Quantity(xi_xy)}}, Verdict::MeasuredOnly,
                            0.0, budgets, tag));
  return out;
}

}  // namespace mclab
