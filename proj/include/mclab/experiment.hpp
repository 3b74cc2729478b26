#pragma once

// Batch experiments: JSON configuration, selector dispatch and report
// collection. Everything is deterministic given the config and its seed.

#include "mclab/bounds.hpp"
#include "mclab/enumeration.hpp"
#include "mclab/kstar.hpp"
#include "mclab/measures.hpp"
#include "mclab/nu7.hpp"
#include "mclab/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace mclab {

using json = nlohmann::json;

inline const std::vector<std::string>& known_selectors() {
  static const std::vector<std::string> s = {"eq1",   "eq4", "lemma3",  "lemma5", "psi",       "t1",
                                             "t4",    "t7",  "c2",      "c9",     "claim10",   "lemma8",
                                             "kcorrect", "kraft", "dominance", "semimeasure", "nu"};
  return s;
}

enum class Subcommand { Run, Enumerate, Verify, Report, Construct };

inline Subcommand subcommand_from_string(std::string_view s) {
  if (s == "run") return Subcommand::Run;
  if (s == "enumerate") return Subcommand::Enumerate;
  if (s == "verify") return Subcommand::Verify;
  if (s == "report") return Subcommand::Report;
  if (s == "construct") return Subcommand::Construct;
  throw ConfigError("unknown subcommand " + std::string(s));
}

inline bool selected_by(Subcommand cmd, std::string_view selector) {
  static const std::set<std::string, std::less<>> enumerate = {"kraft"};
  static const std::set<std::string, std::less<>> verify = {"eq1",    "eq4",      "lemma3", "psi",       "t4",
                                                            "lemma8", "kcorrect", "kraft",  "dominance", "semimeasure"};
  static const std::set<std::string, std::less<>> report = {"lemma5", "t1", "t7", "c2", "c9"};
  static const std::set<std::string, std::less<>> construct = {"nu", "claim10"};
  switch (cmd) {
    case Subcommand::Run: return true;
    case Subcommand::Enumerate: return enumerate.count(selector) > 0;
    case Subcommand::Verify: return verify.count(selector) > 0;
    case Subcommand::Report: return report.count(selector) > 0;
    case Subcommand::Construct: return construct.count(selector) > 0;
  }
  return false;
}

struct ExperimentSpec {
  std::string kind;
  json params = json::object();
};

struct ExperimentConfig {
  std::size_t L = kDefaultL;
  std::size_t S = kDefaultS;
  std::size_t table_depth = 12;  // monotone table depth (bits) behind xi_L
  long d_lo = -8;
  long d_hi = 8;
  int alphabet = 2;
  std::vector<MeasureSpec> registry;
  std::vector<ExperimentSpec> experiments;
  std::uint64_t seed = 0;
  std::optional<std::string> structured_out;
  std::optional<std::string> tabular_out;
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline Rational parse_rational(const json& j) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) return Rational(j.get<std::string>());
  } catch (const std::exception&) {
  }
  throw ConfigError("expected an exact rational (integer or \"p/q\"), got " + j.dump());
}

inline std::vector<Rational> parse_rationals(const json& j) {
  if (!j.is_array()) throw ConfigError("expected an array of rationals, got " + j.dump());
  std::vector<Rational> out;
  for (const auto& v : j) out.push_back(parse_rational(v));
  return out;
}

template <class T>
T param(const json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline json rational_json(const Rational& q) { return q.str(); }

}  // namespace detail

inline MeasureSpec parse_measure(const json& j, int alphabet) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError("measure entry needs a \"type\": " + j.dump());
  const std::string type = j.at("type").get<std::string>();
  MeasureSpec spec;
  try {
    if (type == "uniform") {
      spec = MeasureSpec{Uniform{detail::param<int>(j, "alphabet", alphabet)}};
    } else if (type == "iid") {
      spec = MeasureSpec{IID{detail::parse_rationals(j.at("probs"))}};
    } else if (type == "markov") {
      Markov m;
      m.order = detail::param<int>(j, "order", 1);
      for (const auto& row : j.at("table")) m.table.push_back(detail::parse_rationals(row));
      spec = MeasureSpec{m};
    } else if (type == "lemma5") {
      spec = MeasureSpec{Lemma5{detail::param<std::size_t>(j, "l", 1)}};
    } else if (type == "deterministic") {
      if (j.contains("program")) {
        spec = deterministic_from_program(j.at("program").get<std::string>());
      } else {
        spec = MeasureSpec{Deterministic{detail::param<std::string>(j, "prefix", ""), j.at("cycle").get<std::string>(),
                                         detail::param<int>(j, "alphabet", alphabet)}};
      }
    } else if (type == "repeat") {
      spec = repeat_symbol(j.at("symbol").get<int>(), detail::param<int>(j, "alphabet", alphabet));
    } else if (type == "mixture") {
      Mixture m;
      for (const auto& c : j.at("components")) m.components.push_back(parse_measure(c, alphabet));
      m.weights = detail::parse_rationals(j.at("weights"));
      spec = MeasureSpec{m};
    } else {
      throw ConfigError("unknown measure type '" + type + "'");
    }
    validate(spec);
  } catch (const json::exception& e) {
    throw ConfigError("malformed measure " + j.dump() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid measure " + j.dump() + ": " + e.what());
  }
  return spec;
}

inline json measure_to_json(const MeasureSpec& spec) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return {{"type", "uniform"}, {"alphabet", v.alphabet}};
        } else if constexpr (std::is_same_v<T, IID>) {
          json p = json::array();
          for (const auto& q : v.probs) p.push_back(detail::rational_json(q));
          return {{"type", "iid"}, {"probs", p}};
        } else if constexpr (std::is_same_v<T, Markov>) {
          json t = json::array();
          for (const auto& row : v.table) {
            json r = json::array();
            for (const auto& q : row) r.push_back(detail::rational_json(q));
            t.push_back(r);
          }
          return {{"type", "markov"}, {"order", v.order}, {"table", t}};
        } else if constexpr (std::is_same_v<T, Lemma5>) {
          return {{"type", "lemma5"}, {"l", v.l}};
        } else if constexpr (std::is_same_v<T, Deterministic>) {
          return {{"type", "deterministic"}, {"prefix", v.prefix}, {"cycle", v.cycle}, {"alphabet", v.alphabet}};
        } else {
          json c = json::array();
          json w = json::array();
          for (const auto& m : v.components) c.push_back(measure_to_json(m));
          for (const auto& q : v.weights) w.push_back(detail::rational_json(q));
          return {{"type", "mixture"}, {"components", c}, {"weights", w}};
        }
      },
      spec.variant);
}

inline ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    const json budgets = j.value("budgets", json::object());
    c.L = detail::param<std::size_t>(budgets, "L", c.L);
    c.S = detail::param<std::size_t>(budgets, "S", c.S);
    c.table_depth = detail::param<std::size_t>(budgets, "table_depth", c.table_depth);
    c.d_lo = detail::param<long>(budgets, "d_lo", c.d_lo);
    c.d_hi = detail::param<long>(budgets, "d_hi", c.d_hi);
    c.alphabet = detail::param<int>(j, "alphabet", 2);
    c.seed = detail::param<std::uint64_t>(j, "seed", 0);
    if (c.alphabet < 2 || c.alphabet > kMaxAlphabet) throw ConfigError("alphabet must be in [2, 16]");
    for (const auto& m : j.value("registry", json::array())) c.registry.push_back(parse_measure(m, c.alphabet));
    if (!j.contains("experiments") || !j.at("experiments").is_array())
      throw ConfigError("config needs an \"experiments\" array");
    for (const auto& e : j.at("experiments")) {
      ExperimentSpec spec;
      if (e.is_string()) {
        spec.kind = e.get<std::string>();
      } else if (e.is_object() && e.contains("kind")) {
        spec.kind = e.at("kind").get<std::string>();
        spec.params = e;
      } else {
        throw ConfigError("experiment entries are selector strings or objects with \"kind\": " + e.dump());
      }
      if (std::find(known_selectors().begin(), known_selectors().end(), spec.kind) == known_selectors().end())
        throw ConfigError("unknown experiment selector '" + spec.kind + "'");
      c.experiments.push_back(std::move(spec));
    }
    const json output = j.value("output", json::object());
    if (output.contains("structured")) c.structured_out = output.at("structured").get<std::string>();
    if (output.contains("tabular")) c.tabular_out = output.at("tabular").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (c.experiments.empty()) throw ConfigError("experiment selector list is empty");
  if (c.L > kHardLengthCap) throw ConfigError("budget L above hard cap " + std::to_string(kHardLengthCap));
  if (c.S < 1) throw ConfigError("budget S must be positive");
  if (c.table_depth > 24) throw ConfigError("table_depth above 24");
  if (c.d_lo > c.d_hi) throw ConfigError("empty d window");
  for (const auto& m : c.registry)
    if (alphabet_of(m) != c.alphabet) throw ConfigError("registry measure over a different alphabet");
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Random inputs

// Rational distribution with denominators up to 12; all-positive if asked.
template <class Rng>
std::vector<Rational> random_distribution(Rng& rng, int alphabet, bool positive) {
  std::uniform_int_distribution<int> pick(positive ? 1 : 0, 8);
  std::vector<int> w;
  int total = 0;
  while (total == 0) {
    w.clear();
    total = 0;
    for (int a = 0; a < alphabet; ++a) {
      w.push_back(pick(rng));
      total += w.back();
    }
  }
  std::vector<Rational> out;
  for (int v : w) out.emplace_back(v, total);
  return out;
}

template <class Rng>
MeasureSpec random_measure(Rng& rng, int alphabet, bool positive) {
  if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) return MeasureSpec{IID{random_distribution(rng, alphabet, positive)}};
  Markov m;
  m.order = 1;
  for (int c = 0; c < alphabet; ++c) m.table.push_back(random_distribution(rng, alphabet, positive));
  return MeasureSpec{m};
}

inline bool positive_everywhere(const MeasureSpec& spec) {
  return std::visit(
      [](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return true;
        } else if constexpr (std::is_same_v<T, IID>) {
          return std::all_of(v.probs.begin(), v.probs.end(), [](const Rational& q) { return q > 0; });
        } else if constexpr (std::is_same_v<T, Markov>) {
          for (const auto& row : v.table)
            for (const auto& q : row)
              if (q <= 0) return false;
          return true;
        } else if constexpr (std::is_same_v<T, Mixture>) {
          for (std::size_t i = 0; i < v.components.size(); ++i)
            if (v.weights[i] > 0 && positive_everywhere(v.components[i])) return true;
          return false;
        } else {
          return false;
        }
      },
      spec.variant);
}

// Evaluable view of the machine mass M on binary strings.
class MachineMassFn {
 public:
  explicit MachineMassFn(Estimator& est) : est_(&est) {}
  Rational operator()(std::string_view x) const { return est_->m(x).value; }
  int alphabet() const { return 2; }

 private:
  Estimator* est_;
};

// ---------------------------------------------------------------------------
// Running

class ExperimentRunner {
 public:
  ExperimentRunner(ExperimentConfig config, WitnessCache* cache = nullptr, std::ostream* log = nullptr)
      : config_(std::move(config)), cache_(cache), log_(log), registry_(config_.alphabet) {
    for (const auto& m : config_.registry) registry_.register_measure(m);
  }

  std::vector<BoundReport> run(Subcommand cmd) {
    std::vector<BoundReport> out;
    bool any = false;
    for (std::size_t i = 0; i < config_.experiments.size(); ++i) {
      const ExperimentSpec& e = config_.experiments[i];
      if (!selected_by(cmd, e.kind)) continue;
      any = true;
      if (log_) *log_ << "running " << e.kind << "\n";
      std::seed_seq seq{static_cast<std::uint32_t>(config_.seed), static_cast<std::uint32_t>(config_.seed >> 32),
                        static_cast<std::uint32_t>(i)};
      std::mt19937_64 rng(seq);
      auto reports = dispatch(e, rng);
      out.insert(out.end(), std::make_move_iterator(reports.begin()), std::make_move_iterator(reports.end()));
    }
    if (!any && cmd == Subcommand::Enumerate) out = run_kraft(json::object());
    return out;
  }

  Estimator& estimator() {
    if (!est_) est_ = std::make_unique<Estimator>(config_.L, config_.S, cache_);
    return *est_;
  }

  const Predictor& predictor() {
    if (!xi_) xi_ = std::make_unique<Predictor>(registry_, estimator(), config_.table_depth);
    return *xi_;
  }

  const MeasureRegistry& registry() const { return registry_; }

 private:
  std::vector<BoundReport> dispatch(const ExperimentSpec& e, std::mt19937_64& rng) {
    const json& p = e.params;
    if (e.kind == "eq1") return run_eq1(p, rng);
    if (e.kind == "eq4") return run_eq4(p, rng);
    if (e.kind == "lemma3") return run_lemma3(p, rng);
    if (e.kind == "lemma5") return run_lemma5(p);
    if (e.kind == "psi") return run_psi(p);
    if (e.kind == "t1") return run_theorem(Theorem::T1, p, rng);
    if (e.kind == "t4") return run_theorem(Theorem::T4, p, rng);
    if (e.kind == "t7") return run_theorem(Theorem::T7, p, rng);
    if (e.kind == "c2") return run_theorem(Theorem::C2, p, rng);
    if (e.kind == "c9") return run_theorem(Theorem::C9, p, rng);
    if (e.kind == "claim10") return run_claim10(p);
    if (e.kind == "lemma8") return run_lemma8(p, rng);
    if (e.kind == "kcorrect") return run_kcorrect(p);
    if (e.kind == "kraft") return run_kraft(p);
    if (e.kind == "dominance") return dominance_report(predictor(), detail::param<std::size_t>(p, "max_len", 10));
    if (e.kind == "semimeasure") return run_semimeasure(p);
    if (e.kind == "nu") return run_nu(p);
    throw ConfigError("unknown experiment selector '" + e.kind + "'");
  }

  void require_registry(const char* what) const {
    if (registry_.empty()) throw ConfigError(std::string(what) + " needs a nonempty registry");
  }

  void require_binary(const char* what) const {
    if (config_.alphabet != 2) throw ConfigError(std::string(what) + " needs alphabet 2");
  }

  std::vector<BoundReport> run_eq1(const json& p, std::mt19937_64& rng) {
    const auto pairs = detail::param<std::size_t>(p, "pairs", 10);
    const auto max_h = detail::param<std::size_t>(p, "max_horizon", 4);
    const auto max_past = detail::param<std::size_t>(p, "max_past", 2);
    const auto alphabets = detail::param<std::vector<int>>(p, "alphabets", {2, 3});
    if (alphabets.empty() || max_h < 1) throw ConfigError("eq1 needs alphabets and max_horizon >= 1");
    std::vector<BoundReport> out;
    for (std::size_t i = 0; i < pairs; ++i) {
      const int a = alphabets[i % alphabets.size()];
      const MeasureSpec mu = random_measure(rng, a, false);
      const MeasureSpec rho = random_measure(rng, a, true);
      const std::size_t h = 1 + std::uniform_int_distribution<std::size_t>(0, max_h - 1)(rng);
      const std::size_t past_len = std::uniform_int_distribution<std::size_t>(0, max_past)(rng);
      const std::string past = sample_sequence(mu, past_len, rng());
      const MeasureFn mf(mu);
      const MeasureFn rf(rho);
      for (Distance d : kAllDistances) {
        out.push_back(verify_eq1(mf, rf, past, past_len + 1, past_len + h, DistanceKind{d, {}},
                                 "eq1.pair" + std::to_string(i)));
      }
    }
    return out;
  }

  std::vector<BoundReport> run_eq4(const json& p, std::mt19937_64& rng) {
    require_registry("eq4");
    const auto n = detail::param<std::size_t>(p, "n", 12);
    std::vector<std::string> seqs = detail::param<std::vector<std::string>>(p, "sequences", {});
    std::vector<std::optional<std::size_t>> kmu(seqs.size());
    const auto count = detail::param<std::size_t>(p, "count", seqs.empty() ? 20 : 0);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t m = i % registry_.size();
      seqs.push_back(sample_sequence(registry_.spec(m), n, rng()));
      kmu.push_back(predictor().code_complexity(m));
    }
    std::vector<BoundReport> out;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      if (!is_word_over(seqs[i], config_.alphabet)) throw ConfigError("eq4 sequence outside the alphabet");
      auto r = verify_eq4_chain(seqs[i], predictor(), std::min(n, seqs[i].size()), kmu[i], "eq4.seq" + std::to_string(i));
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }

  std::vector<BoundReport> run_lemma3(const json& p, std::mt19937_64& rng) {
    const auto n = detail::param<std::size_t>(p, "n", 16);
    std::vector<std::pair<std::string, MeasureSpec>> targets;
    if (p.contains("measures")) {
      for (auto i : p.at("measures").get<std::vector<std::size_t>>()) {
        if (i >= registry_.size()) throw ConfigError("lemma3 measure index out of range");
        targets.emplace_back("mu#" + std::to_string(i), registry_.spec(i));
      }
    } else {
      for (std::size_t i = 0; i < registry_.size(); ++i)
        if (alphabet_of(registry_.spec(i)) == 2 && positive_everywhere(registry_.spec(i)))
          targets.emplace_back("mu#" + std::to_string(i), registry_.spec(i));
    }
    const auto random_markov = detail::param<std::size_t>(p, "random_markov", 0);
    for (std::size_t i = 0; i < random_markov; ++i) {
      Markov m;
      m.order = 1;
      for (int c = 0; c < 2; ++c) m.table.push_back(random_distribution(rng, 2, true));
      targets.emplace_back("markov_sample" + std::to_string(i), MeasureSpec{m});
    }
    std::vector<BoundReport> out;
    for (const auto& [label, mu] : targets) {
      auto r = lemma3_report(mu, n, label);
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }

  std::vector<BoundReport> run_lemma5(const json& p) {
    require_binary("lemma5");
    std::vector<BoundReport> out;
    for (auto l : detail::param<std::vector<std::size_t>>(p, "ls", {2, 4, 6})) {
      MeasureRegistry reg = registry_;
      auto inst = lemma5_instance(l, reg, estimator());
      out.insert(out.end(), inst.reports.begin(), inst.reports.end());
    }
    return out;
  }

  std::vector<BoundReport> run_psi(const json& p) {
    const auto l = detail::param<std::size_t>(p, "l", 3);
    const auto depth = detail::param<std::size_t>(p, "depth", 6);
    detail::outcome_count(config_.alphabet, depth, kMaxOutcomes);
    const PsiSemimeasure psi(l, predictor());
    return semimeasure_report(psi, depth, "psi", {{"l", static_cast<long long>(l)}});
  }

  std::vector<BoundReport> run_theorem(Theorem which, const json& p, std::mt19937_64& rng) {
    require_registry(std::string(to_string(which)).c_str());
    struct Triple {
      std::size_t mu;
      std::string x;
      std::string y;
    };
    std::vector<Triple> triples;
    for (const auto& t : p.value("triples", json::array())) {
      Triple tr{t.at("mu").get<std::size_t>(), t.at("x").get<std::string>(), t.at("y").get<std::string>()};
      if (tr.mu >= registry_.size()) throw ConfigError("triple measure index out of range");
      if (!is_word_over(tr.x + tr.y, config_.alphabet)) throw ConfigError("triple string outside the alphabet");
      triples.push_back(std::move(tr));
    }
    const bool corollary = which == Theorem::C2 || which == Theorem::C9;
    const auto count = detail::param<std::size_t>(p, "random", triples.empty() ? 10 : 0);
    const auto x_len = detail::param<std::size_t>(p, "x_len", 3);
    const auto y_len = detail::param<std::size_t>(p, "y_len", corollary ? 2 : 3);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t m = i % registry_.size();
      const std::string s = sample_sequence(registry_.spec(m), x_len + y_len, rng());
      triples.push_back(Triple{m, s.substr(0, x_len), s.substr(x_len)});
    }
    DistanceKind dist;
    if (p.contains("distance")) {
      const std::string name = p.at("distance").get<std::string>();
      bool found = false;
      for (Distance d : kAllDistances)
        if (to_string(d) == name) {
          dist.kind = d;
          found = true;
        }
      if (!found) throw ConfigError("unknown distance '" + name + "'");
    }
    std::vector<BoundReport> out;
    for (const auto& t : triples) {
      auto r = theorem_report(which, predictor(), t.mu, t.x, t.y, dist);
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }

  std::vector<BoundReport> run_claim10(const json& p) {
    require_binary("claim10");
    const NuConstruction& nu = nu_construction();
    std::vector<BoundReport> out;
    const auto depth = detail::param<std::size_t>(p, "depth", 4);
    const auto sample_depth = detail::param<std::size_t>(p, "sample_depth", 5);
    const auto sample = detail::param<std::size_t>(p, "sample", 0);
    for (long d : detail::param<std::vector<long>>(p, "ds", {0, 1, 2, 3})) {
      auto r = claim10_verify(nu, d, depth);
      out.insert(out.end(), r.begin(), r.end());
      if (sample > 0) {
        auto s = claim10_verify(nu, d, sample_depth, Claim10Options{sample, config_.seed + static_cast<std::uint64_t>(d + 1024)});
        for (auto& rep : s) rep.name += ".sampled";
        out.insert(out.end(), s.begin(), s.end());
      }
    }
    return out;
  }

  std::vector<BoundReport> run_lemma8(const json& p, std::mt19937_64& rng) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& q : p.value("pairs", json::array()))
      pairs.emplace_back(q.at("x").get<std::string>(), q.at("y").get<std::string>());
    const auto count = detail::param<std::size_t>(p, "random", pairs.empty() ? 50 : 0);
    const auto max_len = detail::param<std::size_t>(p, "max_len", 4);
    std::uniform_int_distribution<std::size_t> len(1, std::max<std::size_t>(max_len, 1));
    std::uniform_int_distribution<int> bit(0, 1);
    auto word = [&](std::size_t n) {
      std::string s;
      for (std::size_t i = 0; i < n; ++i) s.push_back(symbol_char(bit(rng)));
      return s;
    };
    for (std::size_t i = 0; i < count; ++i) {
      std::string x = word(len(rng));
      pairs.emplace_back(std::move(x), word(len(rng)));
    }
    std::vector<BoundReport> out;
    for (const auto& [x, y] : pairs) {
      if (!is_binary(x) || !is_binary(y)) throw ConfigError("lemma8 pairs are binary");
      auto r = lemma8_report(estimator(), x, y);
      out.insert(out.end(), r.begin(), r.end());
      const auto profile = kstar_profile(estimator(), x, y);
      out.push_back(make_check("kstar.profile_nonincreasing", profile_nonincreasing(profile),
                               "x=" + x + " y=" + y, budget_tags(estimator())));
    }
    return out;
  }

  std::vector<BoundReport> run_kcorrect(const json& p) {
    const auto L = detail::param<std::size_t>(p, "L", 12);
    const auto S = detail::param<std::size_t>(p, "S", config_.S);
    std::vector<std::string> conds = detail::param<std::vector<std::string>>(p, "conditions", {});
    if (conds.empty()) detail::for_each_word(2, 3, [&](std::string_view w) { conds.emplace_back(w); });
    if (L > kHardLengthCap) throw ConfigError("kcorrect L above hard cap");
    return kcorrect_check(L, S, conds);
  }

  std::vector<BoundReport> run_kraft(const json& p) {
    const auto conds = detail::param<std::vector<std::string>>(p, "conditions", {"", "0", "10"});
    std::vector<std::pair<MachineKind, std::optional<std::string>>> jobs = {{MachineKind::Prefix, std::nullopt}};
    for (const auto& c : conds) {
      if (!is_binary(c)) throw ConfigError("kraft conditions are binary");
      jobs.emplace_back(MachineKind::TwicePrefix, c);
      jobs.emplace_back(MachineKind::CondLengthAware, c);
    }
    std::vector<BoundReport> out;
    for (const auto& [kind, cond] : jobs) {
      const WitnessSet& set = estimator().witnesses(kind, cond);
      const std::string tag = std::string(to_string(kind)) + " condition=" + (cond ? "'" + *cond + "'" : "-") +
                              " witnesses=" + std::to_string(set.witnesses.size());
      const auto budgets = budget_tags(estimator());
      out.push_back(make_report("kraft.sum", Quantity(set.kraft_sum()), {{"one", Quantity(1)}}, Verdict::AssertedExact,
                                0.0, budgets, tag));
      out.push_back(make_check("kraft.prefix_free", set.prefix_free(), tag, budgets));
    }
    return out;
  }

  std::vector<BoundReport> run_semimeasure(const json& p) {
    std::vector<BoundReport> out;
    const auto depth = detail::param<std::size_t>(p, "depth", 8);
    const auto xi_depth = detail::param<std::size_t>(p, "xi_depth", config_.alphabet == 2 ? depth : 2);
    detail::outcome_count(2, depth, kMaxOutcomes);
    detail::outcome_count(config_.alphabet, xi_depth, kMaxOutcomes);
    estimator().monotone_table(std::max(config_.table_depth, depth + 1));
    auto m = semimeasure_report(MachineMassFn(estimator()), depth, "big_m", budget_tags(estimator()));
    out.insert(out.end(), m.begin(), m.end());
    auto x = semimeasure_report(predictor(), xi_depth, "xi", budget_tags(estimator()));
    out.insert(out.end(), x.begin(), x.end());
    return out;
  }

  std::vector<BoundReport> run_nu(const json& p) {
    require_binary("nu");
    const NuConstruction& nu = nu_construction();
    const auto depth = detail::param<std::size_t>(p, "depth", 5);
    std::vector<BoundReport> out;
    for (long d : detail::param<std::vector<long>>(p, "ds", {-2, -1, 0, 1, 2, 3, 4})) {
      auto r = nu_table_report(nu.table(d, depth), nu);
      out.insert(out.end(), r.begin(), r.end());
    }
    if (detail::param<bool>(p, "total", true)) {
      auto r = nu_total_report(nu, depth);
      out.insert(out.end(), r.begin(), r.end());
    }
    for (const auto& t : p.value("chains", json::array())) {
      const auto mu = t.at("mu").get<std::size_t>();
      if (mu >= registry_.size()) throw ConfigError("chain measure index out of range");
      auto r = theorem7_chain(nu, mu, t.at("x").get<std::string>(), t.at("y").get<std::string>());
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }

  const NuConstruction& nu_construction() {
    if (!nu_) nu_ = std::make_unique<NuConstruction>(predictor(), config_.d_lo, config_.d_hi);
    return *nu_;
  }

  ExperimentConfig config_;
  WitnessCache* cache_;
  std::ostream* log_;
  MeasureRegistry registry_;
  std::unique_ptr<Estimator> est_;
  std::unique_ptr<Predictor> xi_;
  std::unique_ptr<NuConstruction> nu_;
};

struct RunResult {
  std::vector<BoundReport> reports;
  bool all_passed = true;
};

inline RunResult run_experiment(const ExperimentConfig& config, Subcommand cmd = Subcommand::Run,
                                WitnessCache* cache = nullptr, std::ostream* log = nullptr) {
  ExperimentRunner runner(config, cache, log);
  RunResult r;
  r.reports = runner.run(cmd);
  r.all_passed = all_asserted_pass(r.reports);
  if (config.structured_out) emit_report(r.reports, ReportFormat::Structured, *config.structured_out);
  if (config.tabular_out) emit_report(r.reports, ReportFormat::Tabular, *config.tabular_out);
  return r;
}

}  // namespace mclab
