#pragma once

// Budgeted, machine-relative estimators: prefix complexity K, its
// length-aware conditional K(y|x), monotone complexity Km and the mass
// M(x) = sum of 2^-q over minimal monotone prefixes q covering x.

#include "mclab/enumeration.hpp"
#include "mclab/refmachine.hpp"
#include "mclab/types.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

namespace mclab {

inline constexpr std::size_t kDefaultL = 18;
inline constexpr std::size_t kDefaultS = 10000;

struct ComplexityEstimate {
  std::optional<std::size_t> value;  // nullopt: no witness within budgets
  std::size_t L = 0;
  std::size_t S = 0;
  std::optional<std::string> witness;

  bool finite() const { return value.has_value(); }
  bool operator==(const ComplexityEstimate&) const = default;
};

struct MassEstimate {
  Rational value;
  std::size_t L = 0;
  std::size_t S = 0;
};

// Per-string aggregate of a monotone walk: M(x) as an integer count of 2^-L
// units plus the shortest covering prefix.
struct MonotoneEntry {
  Integer mass_units = 0;
  std::size_t min_len = 0;
  std::string witness;
};

class MonotoneTable {
 public:
  MonotoneTable(std::size_t L, std::size_t S, std::size_t depth) : L_(L), S_(S), depth_(depth) {
    check_enumeration_budget(L, S, kHardLengthCap);
    walk_programs(
        MachineKind::Monotone, std::nullopt, enumeration_budget(S), L, "",
        [](std::string_view, const Machine&, RunStatus) {},
        [&](std::string_view program, const Machine& m) {
          // New output positions emitted by the last opcode are covered for
          // the first time at this node.
          const std::string& out = m.output();
          const std::size_t before = program.empty() ? 0 : last_len_[program.size() / 3 - 1];
          if (program.empty()) record("", program);
          for (std::size_t j = before + 1; j <= std::min(out.size(), depth_); ++j)
            record(std::string_view(out).substr(0, j), program);
          if (last_len_.size() <= program.size() / 3) last_len_.resize(program.size() / 3 + 1);
          last_len_[program.size() / 3] = out.size();
          return true;
        });
    last_len_.clear();
  }

  std::size_t depth() const { return depth_; }
  std::size_t L() const { return L_; }
  std::size_t S() const { return S_; }

  bool covers_length(std::size_t n) const { return n <= depth_; }

  Rational mass(std::string_view x) const {
    auto it = entries_.find(std::string(x));
    if (it == entries_.end()) return Rational(0);
    return Rational(it->second.mass_units, Integer(Integer(1) << static_cast<unsigned>(L_)));
  }

  const MonotoneEntry* entry(std::string_view x) const {
    auto it = entries_.find(std::string(x));
    return it == entries_.end() ? nullptr : &it->second;
  }

 private:
  void record(std::string_view x, std::string_view program) {
    auto [it, inserted] = entries_.try_emplace(std::string(x));
    MonotoneEntry& e = it->second;
    e.mass_units += Integer(1) << static_cast<unsigned>(L_ - program.size());
    if (inserted || program.size() < e.min_len) {
      e.min_len = program.size();
      e.witness = std::string(program);
    }
  }

  std::size_t L_;
  std::size_t S_;
  std::size_t depth_;
  std::unordered_map<std::string, MonotoneEntry> entries_;
  std::vector<std::size_t> last_len_;  // output length along the current DFS path
};

// Single-target monotone walk, used for strings longer than a table's depth.
inline MonotoneEntry monotone_cover(std::string_view x, std::size_t L, std::size_t S) {
  check_enumeration_budget(L, S, kHardLengthCap);
  MonotoneEntry e;
  bool found = false;
  if (x.empty()) {
    e.mass_units = Integer(1) << static_cast<unsigned>(L);
    return e;
  }
  walk_programs(
      MachineKind::Monotone, std::nullopt, enumeration_budget(S), L, "",
      [](std::string_view, const Machine&, RunStatus) {},
      [&](std::string_view program, const Machine& m) {
        const std::string& out = m.output();
        const std::size_t common = std::min(out.size(), x.size());
        if (out.compare(0, common, x.substr(0, common)) != 0) return false;
        if (out.size() < x.size()) return true;
        e.mass_units += Integer(1) << static_cast<unsigned>(L - program.size());
        if (!found || program.size() < e.min_len) {
          e.min_len = program.size();
          e.witness = std::string(program);
          found = true;
        }
        return false;
      });
  if (!found) e.min_len = 0;
  return e;
}

// Caches witness sets and monotone tables for one (L, S) budget pair. Not
// thread-safe; one Estimator per thread.
class Estimator {
 public:
  explicit Estimator(std::size_t L = kDefaultL, std::size_t S = kDefaultS,
                     WitnessCache* cache = nullptr)
      : L_(L), S_(S), cache_(cache) {
    check_enumeration_budget(L, S, kHardLengthCap);
  }

  std::size_t L() const { return L_; }
  std::size_t S() const { return S_; }

  const WitnessSet& witnesses(MachineKind kind, const std::optional<std::string>& condition) {
    const Key key{kind, condition};
    auto it = sets_.find(key);
    if (it == sets_.end()) {
      Indexed idx;
      idx.set = cache_ ? cache_->get_or_build(kind, condition, L_, S_)
                       : enumerate_witnesses(kind, condition, L_, S_);
      for (const auto& w : idx.set.witnesses) idx.shortest.try_emplace(w.output, &w);
      it = sets_.emplace(key, std::move(idx)).first;
    }
    return it->second.set;
  }

  // Shortest witness with the given output, or nullptr.
  const Witness* shortest(MachineKind kind, const std::optional<std::string>& condition,
                          std::string_view output) {
    witnesses(kind, condition);
    const auto& idx = sets_.at(Key{kind, condition});
    auto it = idx.shortest.find(std::string(output));
    return it == idx.shortest.end() ? nullptr : it->second;
  }

  ComplexityEstimate k(std::string_view y) { return from_witness(shortest(MachineKind::Prefix, std::nullopt, y)); }

  // Conditional complexity on the length-aware machine.
  ComplexityEstimate k(std::string_view y, std::string_view condition) {
    return from_witness(shortest(MachineKind::CondLengthAware, std::string(condition), y));
  }

  ComplexityEstimate k_int(std::int64_t n) { return k(zigzag_code(n)); }

  ComplexityEstimate km(std::string_view x) {
    if (x.empty()) return ComplexityEstimate{0, L_, S_, std::string()};
    const MonotoneEntry e = monotone_entry(x);
    if (e.mass_units == 0) return ComplexityEstimate{std::nullopt, L_, S_, std::nullopt};
    return ComplexityEstimate{e.min_len, L_, S_, e.witness};
  }

  MassEstimate m(std::string_view x) {
    const MonotoneEntry e = monotone_entry(x);
    return MassEstimate{Rational(e.mass_units, Integer(Integer(1) << static_cast<unsigned>(L_))), L_, S_};
  }

  // Builds (or widens) the monotone table so that all strings up to `depth`
  // are answered from one walk.
  const MonotoneTable& monotone_table(std::size_t depth) {
    if (!table_ || table_->depth() < depth) table_ = std::make_unique<MonotoneTable>(L_, S_, depth);
    return *table_;
  }

 private:
  using Key = std::pair<MachineKind, std::optional<std::string>>;
  struct Indexed {
    WitnessSet set;
    std::unordered_map<std::string, const Witness*> shortest;
  };

  ComplexityEstimate from_witness(const Witness* w) const {
    if (!w) return ComplexityEstimate{std::nullopt, L_, S_, std::nullopt};
    return ComplexityEstimate{w->program.size(), L_, S_, w->program};
  }

  MonotoneEntry monotone_entry(std::string_view x) {
    if (table_ && table_->covers_length(x.size())) {
      if (const MonotoneEntry* e = table_->entry(x)) return *e;
      return MonotoneEntry{};
    }
    auto it = single_.find(std::string(x));
    if (it == single_.end()) it = single_.emplace(std::string(x), monotone_cover(x, L_, S_)).first;
    return it->second;
  }

  std::size_t L_;
  std::size_t S_;
  WitnessCache* cache_;
  std::map<Key, Indexed> sets_;
  std::unique_ptr<MonotoneTable> table_;
  std::unordered_map<std::string, MonotoneEntry> single_;
};

// Free-function forms; each builds a throwaway Estimator.

inline ComplexityEstimate k_upper(std::string_view y, std::optional<std::string_view> condition,
                                  std::size_t L = kDefaultL, std::size_t S = kDefaultS) {
  Estimator est(L, S);
  return condition ? est.k(y, *condition) : est.k(y);
}

inline ComplexityEstimate k_upper_int(std::int64_t n, std::size_t L = kDefaultL,
                                      std::size_t S = kDefaultS) {
  Estimator est(L, S);
  return est.k_int(n);
}

inline ComplexityEstimate km_upper(std::string_view x, std::size_t L = kDefaultL,
                                   std::size_t S = kDefaultS) {
  Estimator est(L, S);
  return est.km(x);
}

inline MassEstimate big_m(std::string_view x, std::size_t L = kDefaultL, std::size_t S = kDefaultS) {
  Estimator est(L, S);
  return est.m(x);
}

}  // namespace mclab
