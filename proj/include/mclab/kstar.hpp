#pragma once

// Complexity monotone in conditions, K_*(y | x*): the shortest twice-prefix
// program that outputs y after reading at most l(x) condition symbols, and the
// triple-set view E = {(p, x, y)} closed under prolongation.

#include "mclab/complexity.hpp"
#include "mclab/report.hpp"

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace mclab {

struct KStarEstimate {
  std::optional<std::size_t> value;
  std::optional<std::string> program;
  std::size_t k = 0;  // condition symbols the witness consumes
  std::size_t L = 0;
  std::size_t S = 0;

  bool finite() const { return value.has_value(); }
};

// A twice-prefix run on condition x halts only if it consumed k <= l(x)
// symbols, so the minimum over the enumerated set is exactly C_T(y|x).
inline KStarEstimate kstar_upper(Estimator& est, std::string_view y, std::string_view x) {
  const Witness* w = est.shortest(MachineKind::TwicePrefix, std::string(x), y);
  if (!w) return KStarEstimate{std::nullopt, std::nullopt, 0, est.L(), est.S()};
  return KStarEstimate{w->program.size(), w->program, w->k, est.L(), est.S()};
}

inline KStarEstimate kstar_upper(std::string_view y, std::string_view x, std::size_t L = kDefaultL,
                                 std::size_t S = kDefaultS) {
  Estimator est(L, S);
  return kstar_upper(est, y, x);
}

// Entry l is K_*(y | x_{1:l}*), l = 0..l(x).
inline std::vector<std::optional<std::size_t>> kstar_profile(Estimator& est, std::string_view y,
                                                             std::string_view x) {
  std::vector<std::optional<std::size_t>> profile;
  for (std::size_t l = 0; l <= x.size(); ++l) profile.push_back(kstar_upper(est, y, x.substr(0, l)).value);
  return profile;
}

inline std::vector<std::optional<std::size_t>> kstar_profile(std::string_view y, std::string_view x,
                                                             std::size_t L = kDefaultL,
                                                             std::size_t S = kDefaultS) {
  Estimator est(L, S);
  return kstar_profile(est, y, x);
}

// a <= b where nullopt is +inf.
inline bool count_le(const std::optional<std::size_t>& a, const std::optional<std::size_t>& b) {
  if (!b) return true;
  return a && *a <= *b;
}

inline bool profile_nonincreasing(const std::vector<std::optional<std::size_t>>& profile) {
  for (std::size_t i = 1; i < profile.size(); ++i)
    if (!count_le(profile[i], profile[i - 1])) return false;
  return true;
}

inline std::vector<std::pair<std::string, long long>> budget_tags(const Estimator& est) {
  return {{"L", static_cast<long long>(est.L())}, {"S", static_cast<long long>(est.S())}};
}

// K(x|y) <= K_*(x|y*) <= K(x) are asserted with constant 0; the middle term
// min_{l <= l(y)} K(x|y_{1:l}) + K(l) is reported only.
inline std::vector<BoundReport> lemma8_report(Estimator& est, std::string_view x, std::string_view y) {
  const auto k_cond = est.k(x, y).value;
  const auto k_star = kstar_upper(est, x, y).value;
  const auto k_plain = est.k(x).value;
  std::optional<std::size_t> middle;
  for (std::size_t l = 0; l <= y.size(); ++l) {
    const auto a = est.k(x, y.substr(0, l)).value;
    const auto b = est.k_int(static_cast<std::int64_t>(l)).value;
    if (a && b && (!middle || *a + *b < *middle)) middle = *a + *b;
  }
  const std::string tag = "x=" + std::string(x) + " y=" + std::string(y);
  auto note_for = [&](const std::optional<std::size_t>& a, const std::optional<std::size_t>& b) {
    return (!a || !b) ? tag + " (not-witnessed entry)" : tag;
  };
  std::vector<BoundReport> out;
  out.push_back(make_report("lemma8.cond_le_kstar", Quantity::count(k_cond),
                            {{"kstar", Quantity::count(k_star)}}, Verdict::AssertedExact, 0.0,
                            budget_tags(est), note_for(k_cond, k_star)));
  out.push_back(make_report("lemma8.kstar_le_k", Quantity::count(k_star), {{"k", Quantity::count(k_plain)}},
                            Verdict::AssertedExact, 0.0, budget_tags(est), note_for(k_star, k_plain)));
  out.push_back(make_report("lemma8.kstar_vs_min_prefix", Quantity::count(k_star),
                            {{"min_l_k_cond_plus_k_l", Quantity::count(middle)}}, Verdict::MeasuredOnly, 0.0,
                            budget_tags(est), note_for(k_star, middle)));
  // Infinite-vs-infinite comparisons are trivially satisfied; make_report
  // only sees numbers, so fix up the verdict from the count semantics.
  out[0].passed = count_le(k_cond, k_star);
  out[1].passed = count_le(k_star, k_plain);
  return out;
}

inline std::vector<BoundReport> lemma8_report(std::string_view x, std::string_view y,
                                              std::size_t L = kDefaultL, std::size_t S = kDefaultS) {
  Estimator est(L, S);
  return lemma8_report(est, x, y);
}

// ---------------------------------------------------------------------------
// K_*-correct triple sets

struct CorrectTriple {
  std::string p;
  std::string x;
  std::string y;
  bool operator<(const CorrectTriple& o) const { return std::tie(p, x, y) < std::tie(o.p, o.x, o.y); }
  bool operator==(const CorrectTriple&) const = default;
};

// The finite portion of E over programs of length <= L (any bit length) and
// the prefix closure of the sample conditions.
class TripleSet {
 public:
  TripleSet(std::size_t L, std::size_t S, const std::vector<std::string>& sample_conditions) : L_(L), S_(S) {
    for (const auto& c : sample_conditions) {
      if (!is_binary(c)) throw std::invalid_argument("conditions must be binary");
      for (std::size_t l = 0; l <= c.size(); ++l) conditions_.insert(c.substr(0, l));
    }
    if (conditions_.empty()) conditions_.insert("");
    Estimator est(L, S);
    for (const auto& x : conditions_) {
      for (const auto& w : est.witnesses(MachineKind::TwicePrefix, x).witnesses)
        base_.insert(CorrectTriple{w.program, x.substr(0, w.k), w.output});
    }
    // The machine-to-set transformation: every base triple contributes all
    // its prolongations in both arguments.
    for (const auto& t : base_) {
      for (const auto& x2 : conditions_) {
        if (!is_prefix(t.x, x2)) continue;
        add_prolongations(t.p, x2, t.y);
        auto [it, inserted] = shortest_.try_emplace(key(t.y, x2), t.p.size());
        if (!inserted) it->second = std::min(it->second, t.p.size());
      }
    }
  }

  const std::set<CorrectTriple>& base() const { return base_; }
  const std::set<std::string>& conditions() const { return conditions_; }
  std::size_t size() const { return values_.size(); }
  std::size_t L() const { return L_; }
  std::size_t S() const { return S_; }
  const std::vector<CorrectTriple>& conflicts() const { return conflicts_; }

  const std::string* lookup(std::string_view p, std::string_view x) const {
    auto it = values_.find(key(p, x));
    return it == values_.end() ? nullptr : &it->second;
  }

  bool contains(std::string_view p, std::string_view x, std::string_view y) const {
    const std::string* v = lookup(p, x);
    return v && *v == y;
  }

  template <class F>
  void for_each(F&& f) const {
    for (const auto& [k, y] : values_) {
      const auto bar = k.find('|');
      f(std::string_view(k).substr(0, bar), std::string_view(k).substr(bar + 1), std::string_view(y));
    }
  }

  // C_E(y|x) over the materialized portion.
  std::optional<std::size_t> complexity(std::string_view y, std::string_view x) const {
    auto it = shortest_.find(key(y, x));
    if (it == shortest_.end()) return std::nullopt;
    return it->second;
  }

 private:
  static std::string key(std::string_view p, std::string_view x) {
    std::string k(p);
    k.push_back('|');
    k.append(x);
    return k;
  }

  void add_prolongations(std::string p, std::string_view x, std::string_view y) {
    const std::string k = key(p, x);
    auto [it, inserted] = values_.try_emplace(k, std::string(y));
    if (!inserted) {
      if (it->second != y) conflicts_.push_back(CorrectTriple{p, std::string(x), std::string(y)});
      return;  // prolongations of p already present
    }
    if (p.size() >= L_) return;
    add_prolongations(p + "0", x, y);
    add_prolongations(p + "1", x, y);
  }

  std::size_t L_;
  std::size_t S_;
  std::set<std::string> conditions_;
  std::set<CorrectTriple> base_;
  std::unordered_map<std::string, std::string> values_;
  std::unordered_map<std::string, std::size_t> shortest_;  // "y|x" -> C_E(y|x)
  std::vector<CorrectTriple> conflicts_;
};

inline std::string describe(const CorrectTriple& t) {
  return "<" + (t.p.empty() ? std::string("e") : t.p) + "," + (t.x.empty() ? std::string("e") : t.x) + "," +
         (t.y.empty() ? std::string("e") : t.y) + ">";
}

// Requirements 1-3 on the materialized E, plus C_E = kstar_upper.
inline std::vector<BoundReport> kcorrect_check(std::size_t L, std::size_t S,
                                               const std::vector<std::string>& sample_conditions) {
  const TripleSet E(L, S, sample_conditions);
  const std::vector<std::pair<std::string, long long>> budgets = {
      {"L", static_cast<long long>(L)}, {"S", static_cast<long long>(S)}, {"triples", static_cast<long long>(E.size())}};
  std::vector<BoundReport> out;

  // 1. functionality. Insertion records any (p, x) reached with two outputs.
  {
    std::string note;
    for (std::size_t i = 0; i < E.conflicts().size() && i < 5; ++i) note += describe(E.conflicts()[i]) + " ";
    out.push_back(make_report("kcorrect.req1_functional", Quantity(static_cast<long>(E.conflicts().size())),
                              {{"allowed", Quantity(0)}}, Verdict::AssertedExact, 0.0, budgets, note));
  }

  // 2. prolongation closure, checked one symbol at a time in each argument.
  {
    std::size_t violations = 0;
    std::string note;
    auto flag = [&](std::string_view p, std::string_view x, std::string_view y) {
      if (++violations <= 5) note += describe(CorrectTriple{std::string(p), std::string(x), std::string(y)}) + " ";
    };
    E.for_each([&](std::string_view p, std::string_view x, std::string_view y) {
      if (p.size() < L) {
        for (const char* b : {"0", "1"})
          if (!E.contains(std::string(p) + b, x, y)) flag(p, x, y);
      }
      for (const char* c : {"0", "1"}) {
        const std::string x2 = std::string(x) + c;
        if (E.conditions().count(x2) && !E.contains(p, x2, y)) flag(p, x, y);
      }
    });
    out.push_back(make_report("kcorrect.req2_closure", Quantity(static_cast<long>(violations)),
                              {{"allowed", Quantity(0)}}, Verdict::AssertedExact, 0.0, budgets, note));
  }

  // 3. (p, x', y), (p', x, y) in E with p <= p', x <= x'  =>  (p, x, y) in E.
  // Because E is closed under prolongation, "some p' >= p with (p', x, y)"
  // is witnessed by a full-length p'; index every prefix of those.
  {
    std::unordered_set<std::string> reachable;  // "q|x|y" for q a prefix of some full-length p'
    E.for_each([&](std::string_view p, std::string_view x, std::string_view y) {
      if (p.size() != L) return;
      for (std::size_t l = 0; l <= p.size(); ++l)
        reachable.insert(std::string(p.substr(0, l)) + "|" + std::string(x) + "|" + std::string(y));
    });
    std::size_t violations = 0;
    std::string note;
    E.for_each([&](std::string_view p, std::string_view x2, std::string_view y) {
      for (std::size_t l = 0; l < x2.size(); ++l) {
        const std::string_view x = x2.substr(0, l);
        if (reachable.count(std::string(p) + "|" + std::string(x) + "|" + std::string(y)) &&
            !E.contains(p, x, y)) {
          if (++violations <= 5) note += describe(CorrectTriple{std::string(p), std::string(x), std::string(y)}) + " ";
        }
      }
    });
    out.push_back(make_report("kcorrect.req3_prefix_compatible", Quantity(static_cast<long>(violations)),
                              {{"allowed", Quantity(0)}}, Verdict::AssertedExact, 0.0, budgets, note));
  }

  // C_E(y|x) = kstar_upper(y, x) for every condition and every output seen.
  {
    Estimator est(L, S);
    std::set<std::string> outputs;
    for (const auto& t : E.base()) outputs.insert(t.y);
    std::size_t mismatches = 0;
    std::string note;
    for (const auto& x : E.conditions()) {
      for (const auto& y : outputs) {
        const auto ce = E.complexity(y, x);
        const auto ks = kstar_upper(est, y, x).value;
        if (ce != ks && ++mismatches <= 5) note += "y=" + y + ",x=" + x + " ";
      }
    }
    out.push_back(make_report("kcorrect.ce_equals_kstar", Quantity(static_cast<long>(mismatches)),
                              {{"allowed", Quantity(0)}}, Verdict::AssertedExact, 0.0, budgets, note));
  }
  return out;
}

}  // namespace mclab
