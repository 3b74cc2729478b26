#pragma once

// Exhaustive enumeration of halting witnesses up to program length L and step
// budget S, plus the on-disk snapshot format and a directory cache.

#include "mclab/refmachine.hpp"
#include "mclab/types.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace mclab {

inline constexpr std::size_t kHardLengthCap = 24;

struct Witness {
  std::string program;  // consumed program bits
  std::string output;
  std::size_t k = 0;  // condition symbols consumed
  std::size_t steps = 0;

  bool operator==(const Witness&) const = default;
};

struct WitnessSet {
  MachineKind kind = MachineKind::Prefix;
  std::optional<std::string> condition;
  std::size_t L = 0;
  std::size_t S = 0;
  std::vector<Witness> witnesses;  // ordered by (program length, lexicographic)

  bool operator==(const WitnessSet&) const = default;

  // Exact Kraft sum over consumed programs.
  Rational kraft_sum() const {
    Integer units = 0;
    for (const auto& w : witnesses) units += Integer(1) << static_cast<unsigned>(L - w.program.size());
    return Rational(units, Integer(Integer(1) << static_cast<unsigned>(L)));
  }

  bool prefix_free() const {
    std::vector<std::string_view> progs;
    progs.reserve(witnesses.size());
    for (const auto& w : witnesses) progs.push_back(w.program);
    std::sort(progs.begin(), progs.end());
    for (std::size_t i = 1; i < progs.size(); ++i)
      if (is_prefix(progs[i - 1], progs[i])) return false;
    return true;
  }
};

inline bool witness_order(const Witness& a, const Witness& b) {
  if (a.program.size() != b.program.size()) return a.program.size() < b.program.size();
  return a.program < b.program;
}

inline Budget enumeration_budget(std::size_t S) {
  // Output never outgrows the step count, so max_output = S is never binding.
  return Budget{S, S};
}

namespace detail {

inline bool consistent_with_partition(std::string_view program, std::string_view partition) {
  const std::size_t n = std::min(program.size(), partition.size());
  return program.substr(0, n) == partition.substr(0, n);
}

template <class OnTerminal, class OnLive>
void walk(const Machine& m, std::string& program, std::size_t max_len, std::string_view partition,
          OnTerminal& on_terminal, OnLive& on_live) {
  for (std::size_t op = 0; op < 8; ++op) {
    program += kOpcodeBits[op];
    if (consistent_with_partition(program, partition)) {
      Machine child = m;
      if (auto status = child.execute(static_cast<Opcode>(op))) {
        on_terminal(std::string_view(program), child, *status);
      } else if (on_live(std::string_view(program), child) && program.size() + 3 <= max_len) {
        walk(child, program, max_len, partition, on_terminal, on_live);
      }
    }
    program.resize(program.size() - 3);
  }
}

}  // namespace detail

// Depth-first walk over every program of length <= max_len (multiples of 3),
// restricted to programs agreeing with `partition` on their common prefix.
// on_live(program, machine) is called for the root and every still-running
// node and returns whether to descend; on_terminal(program, machine, status)
// is called when an opcode ends the run.
template <class OnTerminal, class OnLive>
void walk_programs(MachineKind kind, std::optional<std::string_view> condition, Budget budget,
                   std::size_t max_len, std::string_view partition, OnTerminal&& on_terminal,
                   OnLive&& on_live) {
  Machine root(kind, condition, budget);
  std::string program;
  if (!on_live(std::string_view(program), root)) return;
  if (max_len >= 3) detail::walk(root, program, max_len, partition, on_terminal, on_live);
}

inline void check_enumeration_budget(std::size_t L, std::size_t S, std::size_t cap) {
  if (L > cap)
    throw BudgetError("program length budget " + std::to_string(L) + " exceeds hard cap " +
                      std::to_string(cap));
  if (S < 1) throw BudgetError("step budget must be at least 1");
}

// Among all partitions of one bit length, exactly one owns each program: the
// one it extends, or for programs shorter than the partition, the one that
// continues it with zeros.
inline bool owns(std::string_view partition, std::string_view program) {
  if (program.size() >= partition.size()) return is_prefix(partition, program);
  return is_prefix(program, partition) &&
         partition.find_first_not_of('0', program.size()) == std::string_view::npos;
}

// Halted runs restricted to one leading-bit partition (empty = everything).
inline std::vector<Witness> enumerate_partition(MachineKind kind,
                                                const std::optional<std::string>& condition,
                                                std::size_t L, std::size_t S,
                                                std::string_view partition) {
  std::vector<Witness> out;
  std::optional<std::string_view> cond;
  if (condition) cond = *condition;
  walk_programs(
      kind, cond, enumeration_budget(S), L, partition,
      [&](std::string_view program, const Machine& m, RunStatus status) {
        if (status == RunStatus::Halted && owns(partition, program))
          out.push_back(Witness{std::string(program), m.output(), m.consumed_condition(), m.steps()});
      },
      [](std::string_view, const Machine&) { return true; });
  return out;
}

inline WitnessSet enumerate_witnesses(MachineKind kind, std::optional<std::string> condition,
                                      std::size_t L, std::size_t S,
                                      std::size_t cap = kHardLengthCap, bool parallel = false) {
  check_enumeration_budget(L, S, cap);
  if (uses_condition(kind) != condition.has_value())
    throw std::invalid_argument("condition must be supplied iff the machine reads one");
  WitnessSet set{kind, condition, L, S, {}};
  if (parallel && L >= 3) {
    std::vector<std::future<std::vector<Witness>>> parts;
    for (auto bits : kOpcodeBits)
      parts.push_back(std::async(std::launch::async, [=, &condition] {
        return enumerate_partition(kind, condition, L, S, bits);
      }));
    for (auto& f : parts) {
      auto part = f.get();
      set.witnesses.insert(set.witnesses.end(), std::make_move_iterator(part.begin()),
                           std::make_move_iterator(part.end()));
    }
  } else {
    set.witnesses = enumerate_partition(kind, condition, L, S, "");
  }
  std::sort(set.witnesses.begin(), set.witnesses.end(), witness_order);
  return set;
}

// ---------------------------------------------------------------------------
// Snapshot files

// Binary condition rendered as "<bit length>:<hex>", bits packed MSB-first
// into nibbles and zero-padded; "-" when absent.
inline std::string condition_to_hex(const std::optional<std::string>& condition) {
  if (!condition) return "-";
  std::string hex = std::to_string(condition->size()) + ":";
  for (std::size_t i = 0; i < condition->size(); i += 4) {
    int v = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      v <<= 1;
      if (i + j < condition->size()) v |= ((*condition)[i + j] == '1');
    }
    hex.push_back(symbol_char(v));
  }
  return hex;
}

inline std::optional<std::string> condition_from_hex(std::string_view text) {
  if (text == "-") return std::nullopt;
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw FormatError("malformed condition field");
  std::size_t len = 0;
  try {
    len = std::stoul(std::string(text.substr(0, colon)));
  } catch (const std::exception&) {
    throw FormatError("malformed condition length");
  }
  const std::string_view hex = text.substr(colon + 1);
  if (hex.size() != (len + 3) / 4) throw FormatError("condition length does not match hex digits");
  std::string bits;
  for (char c : hex) {
    int v = 0;
    try {
      v = symbol_value(c);
    } catch (const std::exception&) {
      throw FormatError("malformed condition hex");
    }
    for (int b = 3; b >= 0; --b) bits.push_back(((v >> b) & 1) ? '1' : '0');
  }
  bits.resize(len);
  return bits;
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw Error("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

inline constexpr std::string_view kSnapshotMagic = "mclab-witness-cache";

inline std::string render_snapshot(const WitnessSet& set) {
  std::ostringstream body;
  body << kSnapshotMagic << " isa=" << kIsaVersion << " kind=" << to_string(set.kind)
       << " condition=" << condition_to_hex(set.condition) << " L=" << set.L << " S=" << set.S
       << " count=" << set.witnesses.size() << "\n";
  for (const auto& w : set.witnesses) {
    body << to_string(set.kind) << '\t' << condition_to_hex(set.condition) << '\t' << w.program
         << '\t' << (w.output.empty() ? "-" : w.output) << '\t' << w.k << '\t' << w.steps << "\n";
  }
  std::string text = body.str();
  text += "digest=sha256:" + sha256_hex(text) + "\n";
  return text;
}

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                     : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::size_t parse_count(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw FormatError(std::string("malformed ") + what + ": '" + s + "'");
  return std::stoull(s);
}

}  // namespace detail

inline WitnessSet parse_snapshot(std::string_view text) {
  std::vector<std::string> lines = detail::split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 2) throw FormatError("snapshot too short");

  const auto header = detail::split(lines.front(), ' ');
  if (header.size() != 7 || header[0] != kSnapshotMagic) throw FormatError("bad snapshot header");
  std::map<std::string, std::string> fields;
  for (std::size_t i = 1; i < header.size(); ++i) {
    const auto eq = header[i].find('=');
    if (eq == std::string::npos) throw FormatError("bad header field: " + header[i]);
    fields[header[i].substr(0, eq)] = header[i].substr(eq + 1);
  }
  for (const char* key : {"isa", "kind", "condition", "L", "S", "count"})
    if (!fields.count(key)) throw FormatError(std::string("missing header field ") + key);
  if (fields["isa"] != kIsaVersion)
    throw VersionMismatch("snapshot built for " + fields["isa"] + ", this build runs " +
                          std::string(kIsaVersion));

  const std::string& footer = lines.back();
  const std::string prefix = "digest=sha256:";
  if (footer.rfind(prefix, 0) != 0) throw FormatError("missing digest footer");
  const std::size_t body_len = text.size() - (footer.size() + 1);
  if (sha256_hex(text.substr(0, body_len)) != footer.substr(prefix.size()))
    throw DigestMismatch("snapshot digest does not match its content");

  WitnessSet set;
  set.kind = machine_kind_from_string(fields["kind"]);
  set.condition = condition_from_hex(fields["condition"]);
  set.L = detail::parse_count(fields["L"], "L");
  set.S = detail::parse_count(fields["S"], "S");
  const std::size_t count = detail::parse_count(fields["count"], "count");
  if (count != lines.size() - 2) throw FormatError("record count does not match header");
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    const auto f = detail::split(lines[i], '\t');
    if (f.size() != 6) throw FormatError("malformed record on line " + std::to_string(i + 1));
    if (f[0] != fields["kind"] || f[1] != fields["condition"])
      throw FormatError("record does not match header on line " + std::to_string(i + 1));
    Witness w;
    w.program = f[2];
    w.output = f[3] == "-" ? "" : f[3];
    if (!is_binary(w.program) || !is_binary(w.output))
      throw FormatError("non-binary record on line " + std::to_string(i + 1));
    w.k = detail::parse_count(f[4], "k");
    w.steps = detail::parse_count(f[5], "steps");
    set.witnesses.push_back(std::move(w));
  }
  return set;
}

enum class SnapshotDirection { Store, Load };

// Store writes `set` to `path` and returns it; Load ignores `set` and returns
// the verified file content.
inline WitnessSet snapshot_io(const WitnessSet& set, SnapshotDirection direction,
                              const std::filesystem::path& path) {
  if (direction == SnapshotDirection::Store) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write snapshot " + path.string());
    out << render_snapshot(set);
    if (!out) throw IoError("failed writing snapshot " + path.string());
    return set;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read snapshot " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_snapshot(buf.str());
}

// Directory of snapshots keyed by (kind, condition, L, S, ISA version).
class WitnessCache {
 public:
  explicit WitnessCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  // MCLAB_CACHE_DIR overrides the given default.
  static WitnessCache from_environment(const std::filesystem::path& fallback) {
    if (const char* env = std::getenv("MCLAB_CACHE_DIR"); env && *env) return WitnessCache(env);
    return WitnessCache(fallback);
  }

  std::filesystem::path path_for(MachineKind kind, const std::optional<std::string>& condition,
                                 std::size_t L, std::size_t S) const {
    std::string cond = condition_to_hex(condition);
    std::replace(cond.begin(), cond.end(), ':', '_');
    return dir_ / (std::string(kIsaVersion) + "_" + std::string(to_string(kind)) + "_c" + cond +
                   "_L" + std::to_string(L) + "_S" + std::to_string(S) + ".witnesses");
  }

  WitnessSet get_or_build(MachineKind kind, const std::optional<std::string>& condition,
                          std::size_t L, std::size_t S) {
    const auto path = path_for(kind, condition, L, S);
    if (std::filesystem::exists(path)) {
      try {
        return snapshot_io({}, SnapshotDirection::Load, path);
      } catch (const Error&) {
        // Stale or corrupt entries are rebuilt below.
      }
    }
    WitnessSet set = enumerate_witnesses(kind, condition, L, S);
    snapshot_io(set, SnapshotDirection::Store, path);
    return set;
  }

  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace mclab
