#pragma once

// Reference machine family: a straight-line interpreter over 3-bit opcodes.
//
//   000 HALT   001 EMIT0   010 EMIT1   011 RDC (read condition symbol, emit it)
//   100 DUP    101 SKC (read condition symbol, discard)
//   110 BRE (CondLengthAware only: skip the next opcode if the condition is
//            fully consumed)
//   111 ABT
//
// Program bits are consumed MSB-first with no lookahead. Every opcode costs
// one step except DUP, which costs the current buffer length (1 when empty).

#include "mclab/types.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace mclab {

inline constexpr std::string_view kIsaVersion = "mclab-isa-1";

enum class MachineKind { Prefix, Monotone, TwicePrefix, CondLengthAware };

enum class RunStatus { Halted, Aborted, StepLimit, CondExhausted, OutputLimit, ProgramExhausted };

enum class Opcode : std::uint8_t {
  Halt = 0,
  Emit0 = 1,
  Emit1 = 2,
  ReadCond = 3,
  Dup = 4,
  SkipCond = 5,
  BranchEnd = 6,
  Abort = 7,
};

inline constexpr std::array<std::string_view, 8> kOpcodeBits = {"000", "001", "010", "011",
                                                                "100", "101", "110", "111"};

inline std::string_view to_string(MachineKind k) {
  switch (k) {
    case MachineKind::Prefix: return "Prefix";
    case MachineKind::Monotone: return "Monotone";
    case MachineKind::TwicePrefix: return "TwicePrefix";
    case MachineKind::CondLengthAware: return "CondLengthAware";
  }
  return "?";
}

inline MachineKind machine_kind_from_string(std::string_view s) {
  if (s == "Prefix") return MachineKind::Prefix;
  if (s == "Monotone") return MachineKind::Monotone;
  if (s == "TwicePrefix") return MachineKind::TwicePrefix;
  if (s == "CondLengthAware") return MachineKind::CondLengthAware;
  throw FormatError("unknown machine kind: " + std::string(s));
}

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Halted: return "Halted";
    case RunStatus::Aborted: return "Aborted";
    case RunStatus::StepLimit: return "StepLimit";
    case RunStatus::CondExhausted: return "CondExhausted";
    case RunStatus::OutputLimit: return "OutputLimit";
    case RunStatus::ProgramExhausted: return "ProgramExhausted";
  }
  return "?";
}

inline bool uses_condition(MachineKind k) {
  return k == MachineKind::TwicePrefix || k == MachineKind::CondLengthAware;
}

struct Budget {
  std::size_t max_steps = 10000;
  std::size_t max_output = 10000;
};

struct RunOutcome {
  RunStatus status = RunStatus::ProgramExhausted;
  std::string output;
  std::size_t consumed_program = 0;
  std::size_t consumed_condition = 0;
  std::size_t steps = 0;
};

inline std::string assemble(std::initializer_list<Opcode> ops) {
  std::string bits;
  for (Opcode op : ops) bits += kOpcodeBits[static_cast<std::size_t>(op)];
  return bits;
}

// Incremental executor. The enumeration walks share machine states between
// programs with a common prefix by copying a Machine and feeding it one more
// opcode, which is exactly what run() does for a single program.
class Machine {
 public:
  Machine(MachineKind kind, std::optional<std::string_view> condition, Budget budget)
      : kind_(kind), budget_(budget) {
    if (uses_condition(kind) != condition.has_value())
      throw std::invalid_argument("condition must be supplied iff the machine reads one");
    if (condition) {
      if (!is_binary(*condition)) throw std::invalid_argument("condition must be binary");
      condition_ = std::string(*condition);
    }
    if (budget.max_steps == 0 || budget.max_output == 0)
      throw std::invalid_argument("budgets must be strictly positive");
  }

  // Executes one opcode. Returns a terminal status, or nullopt if the machine
  // is still running and wants more program bits.
  std::optional<RunStatus> execute(Opcode op) {
    consumed_program_ += 3;
    if (skip_next_) {
      skip_next_ = false;
      return std::nullopt;
    }
    switch (op) {
      case Opcode::Halt:
        if (!charge(1)) return RunStatus::StepLimit;
        return RunStatus::Halted;
      case Opcode::Emit0:
      case Opcode::Emit1:
        if (!charge(1)) return RunStatus::StepLimit;
        if (!emit(op == Opcode::Emit0 ? '0' : '1')) return RunStatus::OutputLimit;
        return std::nullopt;
      case Opcode::ReadCond:
      case Opcode::SkipCond: {
        if (!uses_condition(kind_)) return RunStatus::Aborted;
        if (consumed_condition_ >= condition_.size()) return RunStatus::CondExhausted;
        if (!charge(1)) return RunStatus::StepLimit;
        const char c = condition_[consumed_condition_++];
        if (op == Opcode::ReadCond && !emit(c)) return RunStatus::OutputLimit;
        return std::nullopt;
      }
      case Opcode::Dup: {
        const std::size_t cost = output_.empty() ? 1 : output_.size();
        if (!charge(cost)) return RunStatus::StepLimit;
        if (output_.size() * 2 > budget_.max_output) return RunStatus::OutputLimit;
        output_ += output_;
        return std::nullopt;
      }
      case Opcode::BranchEnd:
        if (kind_ != MachineKind::CondLengthAware) return RunStatus::Aborted;
        if (!charge(1)) return RunStatus::StepLimit;
        if (consumed_condition_ == condition_.size()) skip_next_ = true;
        return std::nullopt;
      case Opcode::Abort:
        return RunStatus::Aborted;
    }
    return RunStatus::Aborted;
  }

  MachineKind kind() const { return kind_; }
  const std::string& output() const { return output_; }
  std::size_t consumed_program() const { return consumed_program_; }
  std::size_t consumed_condition() const { return consumed_condition_; }
  std::size_t steps() const { return steps_; }

  RunOutcome outcome(RunStatus status) const {
    return RunOutcome{status, output_, consumed_program_, consumed_condition_, steps_};
  }

 private:
  bool charge(std::size_t cost) {
    if (steps_ + cost > budget_.max_steps) return false;
    steps_ += cost;
    return true;
  }

  bool emit(char c) {
    if (output_.size() + 1 > budget_.max_output) return false;
    output_.push_back(c);
    return true;
  }

  MachineKind kind_;
  Budget budget_;
  std::string condition_;
  std::string output_;
  std::size_t consumed_program_ = 0;
  std::size_t consumed_condition_ = 0;
  std::size_t steps_ = 0;
  bool skip_next_ = false;
};

inline Opcode decode_opcode(std::string_view three_bits) {
  int v = 0;
  for (char c : three_bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("program must be binary");
    v = v * 2 + (c - '0');
  }
  return static_cast<Opcode>(v);
}

inline RunOutcome run(MachineKind kind, std::string_view program,
                      std::optional<std::string_view> condition, Budget budget) {
  Machine m(kind, condition, budget);
  std::size_t pos = 0;
  while (pos + 3 <= program.size()) {
    if (auto status = m.execute(decode_opcode(program.substr(pos, 3)))) return m.outcome(*status);
    pos += 3;
  }
  return m.outcome(RunStatus::ProgramExhausted);
}

// Number of tape bits consumed by the monotone machine at the first moment its
// output starts with target; nullopt if that never happens within budgets.
inline std::optional<std::size_t> minimal_consumed_prefix(std::string_view tape,
                                                          std::string_view target, Budget budget = {}) {
  if (target.empty()) throw std::invalid_argument("target must be nonempty");
  Machine m(MachineKind::Monotone, std::nullopt, budget);
  std::size_t pos = 0;
  while (pos + 3 <= tape.size()) {
    const auto status = m.execute(decode_opcode(tape.substr(pos, 3)));
    pos += 3;
    const std::string& out = m.output();
    const std::size_t common = std::min(out.size(), target.size());
    if (out.compare(0, common, target.substr(0, common)) != 0) return std::nullopt;
    if (out.size() >= target.size()) return m.consumed_program();
    if (status) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace mclab
