// Copyright 2026 The Contractile Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "contractile/ast.hpp"
#include "contractile/term.hpp"
#include "contractile/values.hpp"

namespace contractile {

/// Register file layout shared by all states of one ISA.
struct RegTable {
  std::vector<SymId> names;
  std::unordered_map<SymId, int> index;

  int add(const std::string& name) {
    SymId id = intern(name);
    int idx = static_cast<int>(names.size());
    names.push_back(id);
    index.emplace(id, idx);
    return idx;
  }
  int at(SymId id) const { return index.at(id); }
  int at(const std::string& name) const { return index.at(intern(name)); }
};

struct MemAccess {
  int64_t addr;
  bool write;
};

/// Machine state: registers plus either byte-addressed or word-addressed
/// memory. Plain value type; copies are independent states.
struct MachineState {
  enum class MemKind : uint8_t { Bytes, Words };

  const RegTable* reg_table = nullptr;
  std::vector<Value> regs;
  MemKind mem_kind = MemKind::Bytes;
  int64_t mem_size = 0;  // bytes for Bytes, words for Words
  std::vector<uint8_t> bytes;
  std::vector<Value> words;

  // Access log for the dynamic frame property; off by default.
  bool log_accesses = false;
  std::vector<MemAccess> access_log;

  static MachineState make_bytes(const RegTable* t, int64_t size);
  static MachineState make_words(const RegTable* t, int64_t size);

  Value& reg(int idx) { return regs[static_cast<size_t>(idx)]; }
  const Value& reg(int idx) const { return regs[static_cast<size_t>(idx)]; }
  Value& reg(const std::string& name) { return regs[static_cast<size_t>(reg_table->at(name))]; }
  const Value& reg(const std::string& name) const {
    return regs[static_cast<size_t>(reg_table->at(name))];
  }

  bool in_range(int64_t addr) const { return addr >= 0 && addr < mem_size; }
  uint32_t load_word_le(int64_t byte_addr) const;
  void store_word_le(int64_t byte_addr, uint32_t w);
};

/// Result of executing one statement: a value or a fail-stop.
struct ExecResult {
  bool failed = false;
  Value value;
  std::string message;

  static ExecResult ok(Value v) { return ExecResult{false, std::move(v), {}}; }
  static ExecResult fail(std::string msg) {
    return ExecResult{true, Value::unit(), std::move(msg)};
  }
};

/// Result of a bounded run.
struct Outcome {
  enum class K : uint8_t { Value, Failure, OutOfFuel };
  K k = K::Value;
  Value value;
  std::string message;

  bool is_value() const { return k == K::Value; }
  bool is_failure() const { return k == K::Failure; }
  bool out_of_fuel() const { return k == K::OutOfFuel; }
};

/// Foreign function implementation plus an optional pure evaluator used by
/// the symbolic executor when all arguments are ground.
struct ForeignImpl {
  std::function<ExecResult(MachineState&, const ValueVec&)> run;
  bool pure = false;
  std::function<Value(const ValueVec&)> pure_eval;
};

using ForeignTable = std::unordered_map<SymId, ForeignImpl>;

/// Environment of let/match/param bindings. Scopes are tiny, so a flat
/// vector with linear lookup from the back wins over a map.
class Env {
 public:
  void push(SymId name, Value v) { slots_.emplace_back(name, std::move(v)); }
  void pop(size_t n) { slots_.resize(slots_.size() - n); }
  size_t size() const { return slots_.size(); }
  const Value* find(SymId name) const {
    for (size_t i = slots_.size(); i-- > 0;) {
      if (slots_[i].first == name) return &slots_[i].second;
    }
    return nullptr;
  }

 private:
  std::vector<std::pair<SymId, Value>> slots_;
};

/// Small-step-faithful interpreter over a Program. Ghost lemma invocations
/// are no-ops; Assert/Fail produce fail-stop outcomes.
class Interp {
 public:
  Interp(const Program& prog, const ForeignTable& foreign,
         const PurePredTable& preds, MachineState& state);

  ExecResult exec(const StmPtr& s, Env& env);
  ExecResult call(const std::string& fn, const ValueVec& args);

 private:
  ExecResult eval_expr(const TermPtr& t, Env& env);

  const Program& prog_;
  const ForeignTable& foreign_;
  const PurePredTable& preds_;
  MachineState& state_;
};

/// Spec-level entry: executes one statement in the given environment.
ExecResult exec_statement(const Program& prog, const ForeignTable& foreign,
                          const PurePredTable& preds, MachineState& state,
                          Env& env, const StmPtr& s);

Outcome run_fde_step(const Program& prog, const ForeignTable& foreign,
                     const PurePredTable& preds, MachineState& state);

/// Runs at most `fuel` steps; OutOfFuel when the budget is exhausted.
Outcome run_fde_cycle(const Program& prog, const ForeignTable& foreign,
                      const PurePredTable& preds, MachineState& state,
                      int64_t fuel);

struct ImageParseError {
  int line;
  std::string message;
};

/// Memory image text format: one entry per line, '#' starts a comment.
///   byte-addressed:  <hex-addr> <hex-word32>          (little-endian word)
///   word-addressed:  <hex-addr> int <decimal>
///                    <hex-addr> cap <PERM> <b> <e> <a>   PERM in {O,R,RW,E}
/// Unlisted locations stay zero-initialized. Throws ImageParseError.
void load_image(MachineState& state, const std::string& text);

}  // namespace contractile
