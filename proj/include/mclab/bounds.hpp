#pragma once

// Prediction distances, the divergence D_{l:n}, randomness deficiency and the
// checks built on them: the cumulative-distance bound, the deterministic
// chain, the Lemma-3 and Lemma-5 constructions, the psi_l semimeasure and the
// consolidated theorem reports.

#include "mclab/kstar.hpp"
#include "mclab/measures.hpp"
#include "mclab/report.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mclab {

inline constexpr std::size_t kMaxOutcomes = 4096;
inline constexpr double kRealTolerance = 1e-9;

enum class Distance { SquaredDiff, SquaredAbs, Hellinger, KL, BayesRegretSq };

inline constexpr std::array<Distance, 5> kAllDistances = {Distance::SquaredDiff, Distance::SquaredAbs,
                                                          Distance::Hellinger, Distance::KL,
                                                          Distance::BayesRegretSq};

inline std::string_view to_string(Distance d) {
  switch (d) {
    case Distance::SquaredDiff: return "SquaredDiff";
    case Distance::SquaredAbs: return "SquaredAbs";
    case Distance::Hellinger: return "Hellinger";
    case Distance::KL: return "KL";
    case Distance::BayesRegretSq: return "BayesRegretSq";
  }
  return "?";
}

struct DistanceKind {
  Distance kind = Distance::SquaredDiff;
  // loss[a][y] in [0,1] for outcome a and decision y; empty means 0-1 loss.
  std::vector<std::vector<Rational>> loss;
};

namespace detail {

inline Rational expected_loss_min(const std::vector<Rational>& dist, const std::vector<std::vector<Rational>>& loss) {
  const std::size_t n = dist.size();
  const std::size_t decisions = loss.empty() ? n : loss.front().size();
  std::optional<Rational> best;
  for (std::size_t y = 0; y < decisions; ++y) {
    Rational e = 0;
    for (std::size_t a = 0; a < n; ++a) e += (loss.empty() ? Rational(a == y ? 0 : 1) : loss[a][y]) * dist[a];
    if (!best || e < *best) best = e;
  }
  return best.value_or(Rational(0));
}

}  // namespace detail

// s(p, q) for true distribution p and predicted (possibly defective) q.
inline Real step_distance(const DistanceKind& kind, const std::vector<Rational>& p, const std::vector<Rational>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions over different alphabets");
  switch (kind.kind) {
    case Distance::SquaredDiff: {
      Rational s = 0;
      for (std::size_t a = 0; a < p.size(); ++a) s += (q[a] - p[a]) * (q[a] - p[a]);
      return to_real(s);
    }
    case Distance::SquaredAbs: {
      Rational s = 0;
      for (std::size_t a = 0; a < p.size(); ++a) s += abs(q[a] - p[a]);
      return to_real(s * s / 2);
    }
    case Distance::Hellinger: {
      Real s = 0;
      for (std::size_t a = 0; a < p.size(); ++a) {
        const Real d = sqrt(to_real(q[a])) - sqrt(to_real(p[a]));
        s += d * d;
      }
      return s;
    }
    case Distance::KL: {
      Real s = 0;
      for (std::size_t a = 0; a < p.size(); ++a) {
        if (p[a] == 0) continue;
        if (q[a] == 0) return real_infinity();
        s += to_real(p[a]) * ln_of(p[a] / q[a]);
      }
      return s;
    }
    case Distance::BayesRegretSq: {
      const Rational d = detail::expected_loss_min(q, kind.loss) - detail::expected_loss_min(p, kind.loss);
      return to_real(d * d / 2);
    }
  }
  return Real(0);
}

// Next-symbol conditionals f(h a) / f(h); all zero if f(h) = 0.
template <Evaluable F>
std::vector<Rational> next_distribution(const F& f, std::string_view history) {
  const int a = f.alphabet();
  std::vector<Rational> out(static_cast<std::size_t>(a), Rational(0));
  const Rational base = f(history);
  if (base == 0) return out;
  std::string h(history);
  h.push_back('0');
  for (int s = 0; s < a; ++s) {
    h.back() = symbol_char(s);
    out[static_cast<std::size_t>(s)] = f(h) / base;
  }
  return out;
}

namespace detail {

inline std::size_t outcome_count(int alphabet, std::size_t horizon, std::size_t cap) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < horizon; ++i) {
    count *= static_cast<std::size_t>(alphabet);
    if (count > cap)
      throw BudgetError("brute-force horizon of " + std::to_string(horizon) + " symbols exceeds the outcome cap " +
                        std::to_string(cap));
  }
  return count;
}

inline void check_window(std::string_view past, std::size_t l, std::size_t n) {
  if (l < 1 || n < l) throw std::invalid_argument("need 1 <= l <= n");
  if (past.size() != l - 1) throw std::invalid_argument("past must hold exactly l-1 symbols");
}

// Calls f(suffix) for every suffix in X^len, lexicographically.
template <class F>
void for_each_word(int alphabet, std::size_t len, F&& f) {
  std::string w(len, '0');
  while (true) {
    f(std::string_view(w));
    std::size_t i = len;
    while (i > 0) {
      --i;
      const int v = symbol_value(w[i]) + 1;
      if (v < alphabet) {
        w[i] = symbol_char(v);
        break;
      }
      w[i] = '0';
      if (i == 0) return;
    }
    if (len == 0) return;
  }
}

}  // namespace detail

// D_{l:n}(past) = E[ln mu(w_{l:n}|past) / rho(w_{l:n}|past) | past], by full
// enumeration of the window.
template <Evaluable Mu, Evaluable Rho>
Real divergence_D(const Mu& mu, const Rho& rho, std::string_view past, std::size_t l, std::size_t n,
                  std::size_t cap = kMaxOutcomes) {
  detail::check_window(past, l, n);
  if (mu.alphabet() != rho.alphabet()) throw std::invalid_argument("alphabet mismatch");
  detail::outcome_count(mu.alphabet(), n - l + 1, cap);
  const Rational mu_past = mu(past);
  if (mu_past == 0) throw NullEventError("past has probability zero under mu");
  const Rational rho_past = rho(past);
  Real total = 0;
  bool infinite = false;
  detail::for_each_word(mu.alphabet(), n - l + 1, [&](std::string_view w) {
    const std::string full = std::string(past) + std::string(w);
    const Rational m = mu(full) / mu_past;
    if (m == 0) return;
    const Rational r = rho_past == 0 ? Rational(0) : rho(full) / rho_past;
    if (r == 0) {
      infinite = true;
      return;
    }
    total += to_real(m) * ln_of(m / r);
  });
  return infinite ? real_infinity() : total;
}

// E[sum_{t=l}^n s_t | past] by walking the outcome tree.
template <Evaluable Mu, Evaluable Rho>
Real expected_distance_sum(const Mu& mu, const Rho& rho, std::string_view past, std::size_t l, std::size_t n,
                           const DistanceKind& kind, std::size_t cap = kMaxOutcomes) {
  detail::check_window(past, l, n);
  detail::outcome_count(mu.alphabet(), n - l + 1, cap);
  const Rational mu_past = mu(past);
  if (mu_past == 0) throw NullEventError("past has probability zero under mu");
  Real total = 0;
  std::function<void(const std::string&, const Rational&, std::size_t)> visit =
      [&](const std::string& h, const Rational& weight, std::size_t t) {
        if (t > n || weight == 0) return;
        const auto p = next_distribution(mu, h);
        const auto q = next_distribution(rho, h);
        total += to_real(weight) * step_distance(kind, p, q);
        for (int s = 0; s < mu.alphabet(); ++s)
          visit(h + symbol_char(s), weight * p[static_cast<std::size_t>(s)], t + 1);
      };
  visit(std::string(past), Rational(1), l);
  return total;
}

template <Evaluable Mu, Evaluable Rho>
BoundReport verify_eq1(const Mu& mu, const Rho& rho, std::string_view past, std::size_t l, std::size_t n,
                       const DistanceKind& kind, std::string name = "eq1") {
  const Real lhs = expected_distance_sum(mu, rho, past, l, n, kind);
  const Real rhs = divergence_D(mu, rho, past, l, n);
  return make_report(std::move(name), Quantity(lhs), {{"D", Quantity(rhs)}}, Verdict::AssertedExact,
                     kRealTolerance, {{"l", static_cast<long long>(l)}, {"n", static_cast<long long>(n)}},
                     std::string(to_string(kind.kind)) + " past=" + std::string(past));
}

// Deterministic chain: per-step 1 - a <= -ln a, the cumulative version, and
// -sum ln a_t <= -ln rho(alpha_{1:n}) (equality when rho(empty) = 1).
// With k_mu given, -ln rho(alpha_{1:n}) vs K(mu) ln 2 is reported only.
template <Evaluable Rho>
std::vector<BoundReport> verify_eq4_chain(std::string_view alpha, const Rho& rho, std::size_t n,
                                          std::optional<std::size_t> k_mu = std::nullopt,
                                          std::string name = "eq4") {
  if (alpha.size() < n) throw std::invalid_argument("sequence shorter than n");
  Real sum_gap = 0;
  Real sum_neglog = 0;
  Real worst_step = real_infinity();
  bool zero = false;
  for (std::size_t t = 1; t <= n && !zero; ++t) {
    const Rational before = rho(alpha.substr(0, t - 1));
    const Rational a = before == 0 ? Rational(0) : rho(alpha.substr(0, t)) / before;
    if (a == 0) {
      zero = true;
      break;
    }
    const Real gap = 1 - to_real(a);
    const Real neglog = -ln_of(a);
    worst_step = std::min(worst_step, Real(neglog - gap));
    sum_gap += gap;
    sum_neglog += neglog;
  }
  const Rational total = rho(alpha.substr(0, n));
  const Real neglog_total = total == 0 ? real_infinity() : Real(-ln_of(total));
  const std::vector<std::pair<std::string, long long>> budgets = {{"n", static_cast<long long>(n)}};
  const std::string tag = std::string(alpha.substr(0, n)) + (zero ? " (zero conditional)" : "");
  std::vector<BoundReport> out;
  if (zero) sum_neglog = real_infinity();
  out.push_back(make_report(name + ".per_step", Quantity(Real(0)),
                            {{"min_step_slack", Quantity(zero ? real_infinity() : worst_step)}},
                            Verdict::AssertedExact, kRealTolerance, budgets, tag));
  out.push_back(make_report(name + ".cumulative", Quantity(sum_gap), {{"neg_sum_ln_a", Quantity(sum_neglog)}},
                            Verdict::AssertedExact, kRealTolerance, budgets, tag));
  out.push_back(make_report(name + ".telescoped", Quantity(sum_neglog), {{"neg_ln_rho", Quantity(neglog_total)}},
                            Verdict::AssertedExact, kRealTolerance, budgets, tag));
  if (k_mu) {
    out.push_back(make_report(name + ".vs_k_mu", Quantity(neglog_total),
                              {{"k_mu_ln2", Quantity(Real(static_cast<long>(*k_mu)) * log(Real(2)))}},
                              Verdict::MeasuredOnly, 0.0, budgets, tag));
  }
  return out;
}

struct DeficiencyRecord {
  std::string x;
  Rational ratio;  // rho(x) / mu(x)
  Real value;      // log2 ratio
  long ceil_value = 0;
};

template <Evaluable Rho>
DeficiencyRecord deficiency(const MeasureSpec& mu, const Rho& rho, std::string_view x) {
  const Rational m = measure_eval(mu, x);
  if (m == 0) throw NullEventError("deficiency undefined where mu(x) = 0");
  const Rational r = rho(x);
  DeficiencyRecord rec{std::string(x), r / m, log2_of(r / m), 0};
  rec.ceil_value = r == 0 ? std::numeric_limits<long>::min() : ceil_log2(r / m);
  return rec;
}

// ---------------------------------------------------------------------------
// Flip-sequence construction: follow the less likely symbol while it stays likely enough.

namespace detail {

inline Quantity bits_to_nats(const std::optional<std::size_t>& bits) {
  if (!bits) return Quantity::infinity();
  return Quantity(Real(static_cast<long>(*bits)) * log(Real(2)));
}

}  // namespace detail

inline Real lemma3_threshold() { return 1 / (3 * log(Real(2))); }

struct Lemma3Result {
  std::string alpha;
  std::vector<Rational> flipped_prob;     // mu(alpha_l-bar | alpha_{<l})
  std::vector<std::string> diagnostic;    // alpha_{<l} alpha_l-bar
};

inline Lemma3Result lemma3_sequence(const MeasureSpec& mu, std::size_t n) {
  if (alphabet_of(mu) != 2) throw std::invalid_argument("flip-sequence construction needs a binary measure");
  validate(mu);
  const Real c = lemma3_threshold();
  Lemma3Result res;
  MeasureCursor cursor(mu);
  for (std::size_t l = 1; l <= n; ++l) {
    int b = -1;
    for (int s = 0; s < 2 && b < 0; ++s)
      if (to_real(cursor.conditional(s)) > c) b = s;
    if (b < 0) throw NullEventError("no symbol above threshold: prefix has probability zero");
    const int next = 1 - b;
    res.flipped_prob.push_back(cursor.conditional(b));
    res.diagnostic.push_back(res.alpha + symbol_char(b));
    res.alpha.push_back(symbol_char(next));
    if (l < n) cursor.push(next);
  }
  return res;
}

inline bool is_prefix_free(std::vector<std::string> words) {
  std::sort(words.begin(), words.end());
  for (std::size_t i = 1; i < words.size(); ++i)
    if (is_prefix(words[i - 1], words[i])) return false;
  return true;
}

inline std::vector<BoundReport> lemma3_report(const MeasureSpec& mu, std::size_t n, const std::string& label) {
  const Lemma3Result res = lemma3_sequence(mu, n);
  Rational worst = 1;
  for (const auto& p : res.flipped_prob) worst = std::min(worst, p);
  std::vector<BoundReport> out;
  out.push_back(make_report("lemma3.threshold", Quantity(lemma3_threshold()), {{"min_flipped_prob", Quantity(worst)}},
                            Verdict::AssertedExact, 0.0, {{"n", static_cast<long long>(n)}},
                            label + " alpha=" + res.alpha));
  // Strict inequality: an exact tie is impossible (irrational threshold).
  out.back().passed = to_real(worst) > lemma3_threshold();
  out.push_back(make_check("lemma3.prefix_free", is_prefix_free(res.diagnostic), label,
                           {{"n", static_cast<long long>(n)}}));
  return out;
}

// ---------------------------------------------------------------------------
// psi_l from the proof of the length-based posterior bound.

class PsiSemimeasure {
 public:
  PsiSemimeasure(std::size_t l, const Predictor& xi) : l_(l), xi_(&xi) {}

  Rational operator()(std::string_view z) const {
    auto it = memo_.find(std::string(z));
    if (it != memo_.end()) return it->second;
    Rational v = 0;
    const int a = alphabet();
    if (z.size() >= l_) {
      const std::string head(z.substr(0, l_));
      const std::string tail(z.substr(l_));
      const Rational xi_head = (*xi_)(head);
      const auto& reg = xi_->registry();
      const std::string cond = block_encode(head, a);
      for (std::size_t i = 0; i < reg.size(); ++i) {
        const ComplexityEstimate k = xi_->estimator().k(reg.code(i), cond);
        if (!k.value) continue;
        v += dyadic(-static_cast<long>(*k.value)) * xi_head * detail::evaluate(reg.spec(i), tail);
      }
    } else {
      std::string w(z);
      w.push_back('0');
      for (int s = 0; s < a; ++s) {
        w.back() = symbol_char(s);
        v += (*this)(w);
      }
    }
    memo_.emplace(std::string(z), v);
    return v;
  }

  int alphabet() const { return xi_->alphabet(); }
  std::size_t l() const { return l_; }

 private:
  std::size_t l_;
  const Predictor* xi_;
  mutable std::map<std::string, Rational> memo_;
};

inline Rational psi_semimeasure(std::size_t l, std::string_view z, const PsiSemimeasure& psi) {
  if (psi.l() != l) throw std::invalid_argument("psi instance built for a different l");
  return psi(z);
}

// Minimum over all tabulated nodes of f(z) - sum_a f(za), and f(empty) <= 1.
template <Evaluable F>
std::vector<BoundReport> semimeasure_report(const F& f, std::size_t depth, const std::string& name,
                                            std::vector<std::pair<std::string, long long>> budgets = {}) {
  std::optional<Rational> worst;
  std::string worst_at;
  for (std::size_t len = 0; len < depth; ++len) {
    detail::for_each_word(f.alphabet(), len, [&](std::string_view z) {
      Rational children = 0;
      std::string w(z);
      w.push_back('0');
      for (int s = 0; s < f.alphabet(); ++s) {
        w.back() = symbol_char(s);
        children += f(w);
      }
      const Rational gap = f(z) - children;
      if (!worst || gap < *worst) {
        worst = gap;
        worst_at = std::string(z);
      }
    });
  }
  budgets.emplace_back("depth", static_cast<long long>(depth));
  std::vector<BoundReport> out;
  out.push_back(make_report(name + ".root", Quantity(f("")), {{"one", Quantity(1)}}, Verdict::AssertedExact, 0.0,
                            budgets));
  out.push_back(make_report(name + ".one_step", Quantity(0), {{"min_parent_minus_children", Quantity(worst.value_or(0))}},
                            Verdict::AssertedExact, 0.0, budgets, "worst at '" + worst_at + "'"));
  return out;
}

// ---------------------------------------------------------------------------
// Zeros-then-ones instance: mu_l = 0^l 1^inf observed at x = 0^l.

struct Lemma5Instance {
  MeasureSpec mu;
  std::string x;
  std::vector<BoundReport> reports;
};

// `registry` receives mu_l (idempotently); the caller's predictor must be
// built on that registry after this call.
inline Lemma5Instance lemma5_instance(std::size_t l, MeasureRegistry& registry, Estimator& est) {
  if (registry.alphabet() != 2) throw std::invalid_argument("zeros-then-ones instance is binary");
  Lemma5Instance inst{MeasureSpec{Lemma5{l}}, std::string(l, '0'), {}};
  const std::string code = registry.register_measure(inst.mu);
  const Predictor xi(registry, est, std::max<std::size_t>(l + 1, 12));
  const std::vector<std::pair<std::string, long long>> budgets = {
      {"l", static_cast<long long>(l)}, {"L", static_cast<long long>(est.L())}, {"S", static_cast<long long>(est.S())}};
  const auto k_code_x = est.k(code, inst.x);
  const DeficiencyRecord d = deficiency(inst.mu, xi, inst.x);
  const Rational xi_one = xi.conditional("1", inst.x);
  const Real divergence = xi_one == 0 ? real_infinity() : Real(-ln_of(xi_one));
  const std::string tag = "x=0^" + std::to_string(l);
  inst.reports.push_back(make_report("lemma5.k_code_given_x", Quantity::count(k_code_x.value), {},
                                     Verdict::MeasuredOnly, 0.0, budgets, tag));
  inst.reports.push_back(make_report("lemma5.deficiency", Quantity(d.value), {{"ceil", Quantity(d.ceil_value)}},
                                     Verdict::MeasuredOnly, 0.0, budgets, tag));
  inst.reports.push_back(make_report("lemma5.xi_one_given_x", Quantity(xi_one), {}, Verdict::MeasuredOnly, 0.0,
                                     budgets, tag));
  const auto k_l = est.k_int(static_cast<std::int64_t>(l)).value;
  inst.reports.push_back(make_report("lemma5.one_step_divergence", Quantity(divergence),
                                     {{"k_l_ln2", detail::bits_to_nats(k_l)}}, Verdict::MeasuredOnly, 0.0, budgets,
                                     tag));
  return inst;
}

// ---------------------------------------------------------------------------
// Theorem reports

enum class Theorem { T1, T4, T7, C2, C9 };

inline std::string_view to_string(Theorem t) {
  switch (t) {
    case Theorem::T1: return "t1";
    case Theorem::T4: return "t4";
    case Theorem::T7: return "t7";
    case Theorem::C2: return "c2";
    case Theorem::C9: return "c9";
  }
  return "?";
}

namespace detail {

inline std::optional<std::size_t> add_counts(const std::optional<std::size_t>& a, const std::optional<std::size_t>& b) {
  if (!a || !b) return std::nullopt;
  return *a + *b;
}

}  // namespace detail

// Posterior-bound reports for registered measure `mu_index` after observing x
// with continuation y. The T4 identity is asserted exactly (two algebraic
// routes to the same rational); every bound inequality is reported only.
inline std::vector<BoundReport> theorem_report(Theorem which, const Predictor& xi, std::size_t mu_index,
                                               std::string_view x, std::string_view y,
                                               const DistanceKind& distance = {}) {
  const MeasureRegistry& reg = xi.registry();
  Estimator& est = xi.estimator();
  const MeasureSpec& mu = reg.spec(mu_index);
  const std::string& code = reg.code(mu_index);
  const int a = reg.alphabet();
  const std::string xs(x);
  const std::string xy = xs + std::string(y);
  const Rational mu_x = measure_eval(mu, x);
  const Rational mu_xy = measure_eval(mu, xy);
  if (mu_xy == 0) throw NullEventError("theorem reports need mu(xy) > 0");
  const Rational xi_x = xi(x);
  const Rational xi_xy = xi(xy);
  const std::string tag = "mu#" + std::to_string(mu_index) + " x=" + xs + " y=" + std::string(y);
  std::vector<std::pair<std::string, long long>> budgets = {{"L", static_cast<long long>(est.L())},
                                                            {"S", static_cast<long long>(est.S())}};
  const std::string cond = block_encode(x, a);
  auto flag = [&](std::initializer_list<std::optional<std::size_t>> terms) {
    for (const auto& t : terms)
      if (!t) return tag + " (not-witnessed entry)";
    return tag;
  };

  std::vector<BoundReport> out;
  const std::string prefix(to_string(which));
  // log2(mu(y|x) / xi(y|x)); infinite if xi(xy) = 0.
  const Rational ratio = xi_xy == 0 ? Rational(0) : (mu_xy / mu_x) / (xi_xy / xi_x);
  const Quantity lhs = xi_xy == 0 ? Quantity::infinity() : Quantity(log2_of(ratio));

  switch (which) {
    case Theorem::T1: {
      const auto k_code = est.k(code, cond).value;
      const auto k_len = est.k_int(static_cast<std::int64_t>(x.size())).value;
      out.push_back(make_report(prefix + ".bound", lhs,
                                {{"k_code_given_x", Quantity::count(k_code)}, {"k_len_x", Quantity::count(k_len)}},
                                Verdict::MeasuredOnly, 0.0, budgets, flag({k_code, k_len})));
      break;
    }
    case Theorem::T4: {
      const DeficiencyRecord dx = deficiency(mu, xi, x);
      const DeficiencyRecord dxy = deficiency(mu, xi, xy);
      // Route 1: mu(y|x)/xi(y|x). Route 2: 2^{d(x) - d(xy)} = (xi(x)/mu(x)) / (xi(xy)/mu(xy)).
      if (xi_xy != 0) {
        const Rational route2 = dx.ratio / dxy.ratio;
        out.push_back(make_report(prefix + ".identity", Quantity(ratio), {{"two_pow_dx_minus_dxy", Quantity(route2)}},
                                  Verdict::AssertedExact, 0.0, budgets, tag));
        out.back().passed = ratio == route2;
        out.back().slack = Quantity(route2 - ratio);
      }
      const auto k_code = est.k(code).value;
      const auto k_d = est.k_int(dx.ceil_value).value;
      out.push_back(make_report(prefix + ".bound", lhs,
                                {{"k_code", Quantity::count(k_code)}, {"k_ceil_d", Quantity::count(k_d)}},
                                Verdict::MeasuredOnly, 0.0, budgets, flag({k_code, k_d})));
      break;
    }
    case Theorem::T7: {
      const DeficiencyRecord dx = deficiency(mu, xi, x);
      const auto k_star = kstar_upper(est, code, cond).value;
      const auto k_d = est.k_int(dx.ceil_value).value;
      out.push_back(make_report(prefix + ".bound", lhs,
                                {{"kstar_code_given_x", Quantity::count(k_star)}, {"k_ceil_d", Quantity::count(k_d)}},
                                Verdict::MeasuredOnly, 0.0, budgets, flag({k_star, k_d})));
      break;
    }
    case Theorem::C2:
    case Theorem::C9: {
      const std::size_t l = x.size();
      const std::size_t n = l + y.size();
      if (y.empty()) throw std::invalid_argument("corollary reports need a nonempty horizon");
      const MeasureFn mu_fn(mu);
      const Real future = expected_distance_sum(mu_fn, xi, x, l + 1, n, distance);
      const Real div = divergence_D(mu_fn, xi, x, l + 1, n);
      budgets.emplace_back("horizon", static_cast<long long>(y.size()));
      out.push_back(make_report(prefix + ".future_le_divergence", Quantity(future), {{"D", Quantity(div)}},
                                Verdict::AssertedExact, kRealTolerance, budgets,
                                tag + " " + std::string(to_string(distance.kind))));
      if (which == Theorem::C2) {
        const auto k_code = est.k(code, cond).value;
        const auto k_len = est.k_int(static_cast<std::int64_t>(l)).value;
        out.push_back(make_report(prefix + ".bound", Quantity(div),
                                  {{"k_code_given_x_ln2", detail::bits_to_nats(k_code)},
                                   {"k_len_ln2", detail::bits_to_nats(k_len)}},
                                  Verdict::MeasuredOnly, 0.0, budgets, flag({k_code, k_len})));
      } else {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i <= l; ++i) {
          const auto term = detail::add_counts(est.k(code, block_encode(x.substr(0, i), a)).value,
                                               est.k_int(static_cast<std::int64_t>(i)).value);
          if (term && (!best || *term < *best)) best = term;
        }
        const DeficiencyRecord dx = deficiency(mu, xi, x);
        const auto k_d = est.k_int(dx.ceil_value).value;
        out.push_back(make_report(prefix + ".bound", Quantity(div),
                                  {{"min_i_k_code_given_prefix_plus_k_i_ln2", detail::bits_to_nats(best)},
                                   {"k_ceil_d_ln2", detail::bits_to_nats(k_d)}},
                                  Verdict::MeasuredOnly, 0.0, budgets, flag({best, k_d})));
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dominance: xi(x) >= 1/2 2^-K(code mu) mu(x) and d(x) >= -K(code mu) - 1 for
// every registered mu and every x up to the given length.

inline std::vector<BoundReport> dominance_report(const Predictor& xi, std::size_t max_len) {
  const MeasureRegistry& reg = xi.registry();
  detail::outcome_count(reg.alphabet(), max_len, std::numeric_limits<std::size_t>::max() / 32);
  std::vector<BoundReport> out;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    std::optional<Rational> worst;
    std::string worst_at;
    bool deficiency_ok = true;
    std::size_t checked = 0;
    const auto k = xi.code_complexity(i);
    for (std::size_t len = 0; len <= max_len; ++len) {
      detail::for_each_word(reg.alphabet(), len, [&](std::string_view x) {
        const Rational mu_x = detail::evaluate(reg.spec(i), x);
        const Rational xi_x = xi(x);
        const Rational gap = xi_x - xi.weight(i) * mu_x / 2;
        if (!worst || gap < *worst) {
          worst = gap;
          worst_at = std::string(x);
        }
        if (mu_x > 0 && k) {
          ++checked;
          if (xi_x / mu_x < dyadic(-static_cast<long>(*k) - 1)) deficiency_ok = false;
        }
      });
    }
    const std::vector<std::pair<std::string, long long>> budgets = {
        {"max_len", static_cast<long long>(max_len)},
        {"L", static_cast<long long>(xi.estimator().L())},
        {"S", static_cast<long long>(xi.estimator().S())}};
    const std::string tag = "mu#" + std::to_string(i) + (k ? "" : " (code not witnessed)");
    out.push_back(make_report("dominance.mixture", Quantity(0), {{"min_xi_minus_weighted_mu", Quantity(*worst)}},
                              Verdict::AssertedExact, 0.0, budgets, tag + " worst at '" + worst_at + "'"));
    out.push_back(make_check("dominance.deficiency_floor", deficiency_ok,
                             tag + " checked=" + std::to_string(checked), budgets));
  }
  return out;
}

}  // namespace mclab
