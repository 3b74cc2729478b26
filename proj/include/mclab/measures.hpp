#pragma once

// Computable-measure zoo, exact evaluation, the measure registry with index
// codes, and the dominant predictor xi_L = 1/2 M + 1/2 sum_nu 2^-K(code nu) nu.

#include "mclab/complexity.hpp"
#include "mclab/types.hpp"

#include <concepts>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace mclab {

struct MeasureSpec;

struct Uniform {
  int alphabet = 2;
  bool operator==(const Uniform&) const = default;
};

struct IID {
  std::vector<Rational> probs;
  bool operator==(const IID&) const = default;
};

// Row c of `table` is the next-symbol distribution after context c, the last
// `order` symbols read as a base-|X| number (oldest most significant). Missing
// history at the start is padded with symbol 0.
struct Markov {
  int order = 1;
  std::vector<std::vector<Rational>> table;
  bool operator==(const Markov&) const = default;
};

// Deterministic measure of 0^l 1^inf.
struct Lemma5 {
  std::size_t l = 1;
  bool operator==(const Lemma5&) const = default;
};

// Deterministic measure of prefix . cycle^inf.
struct Deterministic {
  std::string prefix;
  std::string cycle;
  int alphabet = 2;
  bool operator==(const Deterministic&) const = default;
};

struct Mixture {
  std::vector<MeasureSpec> components;
  std::vector<Rational> weights;
  bool operator==(const Mixture&) const;
};

struct MeasureSpec {
  std::variant<Uniform, IID, Markov, Lemma5, Deterministic, Mixture> variant;
  bool operator==(const MeasureSpec&) const = default;
};

inline bool Mixture::operator==(const Mixture& o) const {
  return components == o.components && weights == o.weights;
}

// A binary sequence generator: the monotone machine's output on `program`,
// repeated forever.
inline MeasureSpec deterministic_from_program(std::string_view program, Budget budget = {}) {
  const RunOutcome r = run(MachineKind::Monotone, program, std::nullopt, budget);
  if (r.output.empty()) throw std::invalid_argument("generator program emits nothing");
  return MeasureSpec{Deterministic{"", r.output, 2}};
}

inline MeasureSpec repeat_symbol(int symbol, int alphabet) {
  return MeasureSpec{Deterministic{"", std::string(1, symbol_char(symbol)), alphabet}};
}

inline int alphabet_of(const MeasureSpec& spec) {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Uniform>) return v.alphabet;
        else if constexpr (std::is_same_v<T, IID>) return static_cast<int>(v.probs.size());
        else if constexpr (std::is_same_v<T, Markov>)
          return v.table.empty() ? 0 : static_cast<int>(v.table.front().size());
        else if constexpr (std::is_same_v<T, Lemma5>) return 2;
        else if constexpr (std::is_same_v<T, Deterministic>) return v.alphabet;
        else return v.components.empty() ? 0 : alphabet_of(v.components.front());
      },
      spec.variant);
}

inline bool is_deterministic(const MeasureSpec& spec) {
  return std::holds_alternative<Lemma5>(spec.variant) ||
         std::holds_alternative<Deterministic>(spec.variant);
}

namespace detail {

inline void require_distribution(const std::vector<Rational>& p, const char* what) {
  Rational sum = 0;
  for (const auto& v : p) {
    if (v < 0) throw std::invalid_argument(std::string(what) + ": negative probability");
    sum += v;
  }
  if (sum != 1) throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1");
}

inline std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace detail

// Throws std::invalid_argument when the spec is not a proper measure.
inline void validate(const MeasureSpec& spec) {
  const int a = alphabet_of(spec);
  if (a < 2 || a > kMaxAlphabet) throw std::invalid_argument("alphabet size must be in [2, 16]");
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IID>) {
          detail::require_distribution(v.probs, "IID");
        } else if constexpr (std::is_same_v<T, Markov>) {
          if (v.order < 0) throw std::invalid_argument("Markov order must be >= 0");
          if (v.table.size() != detail::ipow(static_cast<std::size_t>(a), v.order))
            throw std::invalid_argument("Markov table needs |X|^order rows");
          for (const auto& row : v.table) {
            if (static_cast<int>(row.size()) != a)
              throw std::invalid_argument("Markov rows must have |X| entries");
            detail::require_distribution(row, "Markov");
          }
        } else if constexpr (std::is_same_v<T, Lemma5>) {
          if (v.l < 1) throw std::invalid_argument("Lemma5 needs l >= 1");
        } else if constexpr (std::is_same_v<T, Deterministic>) {
          if (v.cycle.empty()) throw std::invalid_argument("deterministic cycle must be nonempty");
          if (!is_word_over(v.prefix, a) || !is_word_over(v.cycle, a))
            throw std::invalid_argument("deterministic sequence uses symbols outside the alphabet");
        } else if constexpr (std::is_same_v<T, Mixture>) {
          if (v.components.empty() || v.components.size() != v.weights.size())
            throw std::invalid_argument("mixture needs one weight per component");
          detail::require_distribution(v.weights, "Mixture weights");
          for (const auto& c : v.components) {
            if (alphabet_of(c) != a) throw std::invalid_argument("mixture components disagree on alphabet");
            validate(c);
          }
        }
      },
      spec.variant);
}

namespace detail {

inline char deterministic_symbol(const Deterministic& d, std::size_t i) {
  if (i < d.prefix.size()) return d.prefix[i];
  return d.cycle[(i - d.prefix.size()) % d.cycle.size()];
}

inline Rational evaluate(const MeasureSpec& spec, std::string_view x) {
  return std::visit(
      [&](const auto& v) -> Rational {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return Rational(1, Integer(boost::multiprecision::pow(Integer(v.alphabet),
                                                                static_cast<unsigned>(x.size()))));
        } else if constexpr (std::is_same_v<T, IID>) {
          Rational r = 1;
          for (char c : x) r *= v.probs.at(static_cast<std::size_t>(symbol_value(c)));
          return r;
        } else if constexpr (std::is_same_v<T, Markov>) {
          const std::size_t a = v.table.front().size();
          const std::size_t modulus = ipow(a, v.order);
          std::size_t ctx = 0;
          Rational r = 1;
          for (char c : x) {
            const auto s = static_cast<std::size_t>(symbol_value(c));
            r *= v.table[ctx].at(s);
            if (r == 0) return r;
            if (modulus > 1) ctx = (ctx * a + s) % modulus;
          }
          return r;
        } else if constexpr (std::is_same_v<T, Lemma5>) {
          for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] != (i < v.l ? '0' : '1')) return Rational(0);
          return Rational(1);
        } else if constexpr (std::is_same_v<T, Deterministic>) {
          for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] != deterministic_symbol(v, i)) return Rational(0);
          return Rational(1);
        } else {
          Rational r = 0;
          for (std::size_t i = 0; i < v.components.size(); ++i)
            r += v.weights[i] * evaluate(v.components[i], x);
          return r;
        }
      },
      spec.variant);
}

}  // namespace detail

// mu(x), or mu(x | given) = mu(given x) / mu(given).
inline Rational measure_eval(const MeasureSpec& spec, std::string_view x,
                             std::optional<std::string_view> given = std::nullopt) {
  const int a = alphabet_of(spec);
  if (!is_word_over(x, a) || (given && !is_word_over(*given, a)))
    throw std::invalid_argument("string uses symbols outside the measure's alphabet");
  if (!given) return detail::evaluate(spec, x);
  const Rational denom = detail::evaluate(spec, *given);
  if (denom == 0) throw NullEventError("conditioning on a null event");
  return detail::evaluate(spec, std::string(*given) + std::string(x)) / denom;
}

// Anything that maps strings over X to exact nonnegative values.
template <class F>
concept Evaluable = requires(const F& f, std::string_view x) {
  { f(x) } -> std::convertible_to<Rational>;
  { f.alphabet() } -> std::convertible_to<int>;
};

// Non-owning adapter that lets a MeasureSpec stand where an Evaluable is expected.
class MeasureFn {
 public:
  explicit MeasureFn(const MeasureSpec& spec) : spec_(&spec), alphabet_(alphabet_of(spec)) {}
  Rational operator()(std::string_view x) const { return detail::evaluate(*spec_, x); }
  int alphabet() const { return alphabet_; }
  const MeasureSpec& spec() const { return *spec_; }

 private:
  const MeasureSpec* spec_;
  int alphabet_;
};

// Sequential next-symbol probabilities without re-evaluating whole prefixes.
class MeasureCursor {
 public:
  explicit MeasureCursor(const MeasureSpec& spec) : spec_(&spec), alphabet_(alphabet_of(spec)) {
    if (const auto* mix = std::get_if<Mixture>(&spec.variant)) {
      posterior_ = mix->weights;
      for (const auto& c : mix->components) children_.emplace_back(c);
    }
  }

  Rational conditional(int symbol) const {
    return std::visit(
        [&](const auto& v) -> Rational {
          using T = std::decay_t<decltype(v)>;
          const char c = symbol_char(symbol);
          if constexpr (std::is_same_v<T, Uniform>) {
            return Rational(1, v.alphabet);
          } else if constexpr (std::is_same_v<T, IID>) {
            return v.probs.at(static_cast<std::size_t>(symbol));
          } else if constexpr (std::is_same_v<T, Markov>) {
            return v.table[context_].at(static_cast<std::size_t>(symbol));
          } else if constexpr (std::is_same_v<T, Lemma5>) {
            return Rational(c == (position_ < v.l ? '0' : '1') ? 1 : 0);
          } else if constexpr (std::is_same_v<T, Deterministic>) {
            return Rational(c == detail::deterministic_symbol(v, position_) ? 1 : 0);
          } else {
            Rational r = 0;
            for (std::size_t i = 0; i < children_.size(); ++i)
              r += posterior_[i] * children_[i].conditional(symbol);
            return r;
          }
        },
        spec_->variant);
  }

  void push(int symbol) {
    if (const auto* mk = std::get_if<Markov>(&spec_->variant)) {
      const std::size_t modulus = detail::ipow(static_cast<std::size_t>(alphabet_), mk->order);
      if (modulus > 1) context_ = (context_ * static_cast<std::size_t>(alphabet_) + symbol) % modulus;
    }
    if (!children_.empty()) {
      const Rational total = conditional(symbol);
      if (total == 0) throw NullEventError("sequence left the support of the mixture");
      for (std::size_t i = 0; i < children_.size(); ++i) {
        posterior_[i] = posterior_[i] * children_[i].conditional(symbol) / total;
        children_[i].push(symbol);
      }
    }
    ++position_;
  }

  int alphabet() const { return alphabet_; }

 private:
  const MeasureSpec* spec_;
  int alphabet_;
  std::size_t position_ = 0;
  std::size_t context_ = 0;
  std::vector<Rational> posterior_;
  std::vector<MeasureCursor> children_;
};

// Inverse-transform sampling with exact conditionals. Each symbol consumes one
// 64-bit draw from mt19937_64; u = (draw >> 11) / 2^53.
inline std::string sample_sequence(const MeasureSpec& spec, std::size_t n, std::uint64_t seed) {
  validate(spec);
  std::mt19937_64 rng(seed);
  MeasureCursor cursor(spec);
  const int a = alphabet_of(spec);
  const Integer scale = Integer(1) << 53;
  std::string out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Rational u(Integer(rng() >> 11), scale);
    Rational cumulative = 0;
    int chosen = -1;
    int last_positive = -1;
    for (int s = 0; s < a; ++s) {
      const Rational p = cursor.conditional(s);
      if (p > 0) last_positive = s;
      cumulative += p;
      if (u < cumulative) {
        chosen = s;
        break;
      }
    }
    if (chosen < 0) chosen = last_positive;
    out.push_back(symbol_char(chosen));
    cursor.push(chosen);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Registry

class MeasureRegistry {
 public:
  explicit MeasureRegistry(int alphabet = 2) : alphabet_(alphabet) {
    if (alphabet < 2 || alphabet > kMaxAlphabet) throw std::invalid_argument("alphabet size must be in [2, 16]");
  }

  // Appends spec (or finds an identical one) and returns its index code: the
  // zig-zag binary of its ordinal.
  std::string register_measure(MeasureSpec spec) {
    validate(spec);
    if (alphabet_of(spec) != alphabet_)
      throw std::invalid_argument("measure alphabet does not match the registry");
    if (auto i = find(spec)) return codes_[*i];
    specs_.push_back(std::move(spec));
    codes_.push_back(zigzag_code(static_cast<std::int64_t>(specs_.size() - 1)));
    return codes_.back();
  }

  std::optional<std::size_t> find(const MeasureSpec& spec) const {
    for (std::size_t i = 0; i < specs_.size(); ++i)
      if (specs_[i] == spec) return i;
    return std::nullopt;
  }

  std::size_t size() const { return specs_.size(); }
  bool empty() const { return specs_.empty(); }
  int alphabet() const { return alphabet_; }
  const MeasureSpec& spec(std::size_t i) const { return specs_.at(i); }
  const std::string& code(std::size_t i) const { return codes_.at(i); }

 private:
  int alphabet_;
  std::vector<MeasureSpec> specs_;
  std::vector<std::string> codes_;
};

inline std::string register_measure(MeasureSpec spec, MeasureRegistry& registry) {
  return registry.register_measure(std::move(spec));
}

// xi_L(x) = 1/2 M(enc x) + 1/2 sum_nu 2^-K(code nu) nu(x), where enc is the
// block encoding of X into bits (identity for binary).
class Predictor {
 public:
  Predictor(const MeasureRegistry& registry, Estimator& estimator, std::size_t table_depth = 12)
      : registry_(&registry), estimator_(&estimator) {
    estimator.monotone_table(table_depth);
    for (std::size_t i = 0; i < registry.size(); ++i) {
      const ComplexityEstimate k = estimator.k(registry.code(i));
      code_complexity_.push_back(k.value);
      weights_.push_back(k.value ? dyadic(-static_cast<long>(*k.value)) : Rational(0));
    }
  }

  Rational operator()(std::string_view x) const { return (machine_mass(x) + zoo(x)) / 2; }

  Rational machine_mass(std::string_view x) const {
    return estimator_->m(block_encode(x, registry_->alphabet())).value;
  }

  Rational zoo(std::string_view x) const {
    Rational r = 0;
    for (std::size_t i = 0; i < registry_->size(); ++i)
      if (weights_[i] != 0) r += weights_[i] * detail::evaluate(registry_->spec(i), x);
    return r;
  }

  // xi(y | x); zero when xi(x) = 0.
  Rational conditional(std::string_view y, std::string_view x) const {
    const Rational denom = (*this)(x);
    if (denom == 0) return Rational(0);
    return (*this)(std::string(x) + std::string(y)) / denom;
  }

  int alphabet() const { return registry_->alphabet(); }
  const MeasureRegistry& registry() const { return *registry_; }
  Estimator& estimator() const { return *estimator_; }
  const Rational& weight(std::size_t i) const { return weights_.at(i); }
  const std::optional<std::size_t>& code_complexity(std::size_t i) const { return code_complexity_.at(i); }

 private:
  const MeasureRegistry* registry_;
  Estimator* estimator_;
  std::vector<Rational> weights_;
  std::vector<std::optional<std::size_t>> code_complexity_;
};

inline Rational predictor_eval(const MeasureRegistry& registry, std::string_view x,
                               std::size_t L = kDefaultL, std::size_t S = kDefaultS) {
  Estimator est(L, S);
  Predictor xi(registry, est, std::max<std::size_t>(x.size() * block_width(registry.alphabet()), 1));
  return xi(x);
}

}  // namespace mclab
