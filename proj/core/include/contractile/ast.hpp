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

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "contractile/term.hpp"
#include "contractile/values.hpp"

namespace contractile {

struct Stm;
using StmPtr = std::shared_ptr<const Stm>;

/// Match patterns. Constructor patterns bind the payload fields; enum and
/// integer patterns are plain tag tests. A Default arm catches the rest.
struct Pattern {
  enum class K : uint8_t { Ctor, EnumTag, IntLit, Default };
  K k = K::Default;
  SymId ctor = 0;
  std::vector<SymId> binders;  // Ctor only
  EnumTypeId enum_type = 0;
  uint8_t enum_tag = 0;
  int64_t int_lit = 0;
};

struct MatchCase {
  Pattern pat;
  StmPtr body;
};

/// Statement/expression nodes of the core language. Statements and pure
/// expressions share this sum; pure computation is carried by Expr terms.
struct Stm {
  enum class K : uint8_t {
    Literal,
    Var,
    Expr,
    Let,
    Seq,
    If,
    Match,
    CallInternal,
    CallForeign,
    LemmaInvoke,
    Assert,
    Fail,
    ReadReg,
    WriteReg,
    RecordGet,
    RecordSet,
    TupleProject
  };

  K k;
  int node_id = 0;
  Value lit;                    // Literal
  SymId name = 0;               // Var binder, call target, lemma, register
  TermPtr term;                 // Expr
  std::vector<StmPtr> kids;     // children in evaluation order
  std::vector<MatchCase> cases; // Match
  std::string msg;              // Assert / Fail message
  uint32_t idx = 0;             // RecordGet/RecordSet/TupleProject index
};

// Builders. Every node gets a fresh id usable as a diagnostic location.
StmPtr s_lit(Value v);
StmPtr s_unit();
StmPtr s_int(int64_t n);
StmPtr s_bool(bool b);
StmPtr s_var(const std::string& name);
StmPtr s_expr(TermPtr t);
StmPtr s_let(const std::string& name, StmPtr bound, StmPtr body);
StmPtr s_seq(StmPtr a, StmPtr b);
StmPtr s_seq(std::vector<StmPtr> stms);
StmPtr s_if(StmPtr cond, StmPtr then_s, StmPtr else_s);
StmPtr s_match(StmPtr scrutinee, std::vector<MatchCase> cases);
StmPtr s_call(const std::string& fn, std::vector<StmPtr> args);
StmPtr s_callf(const std::string& fn, std::vector<StmPtr> args);
StmPtr s_lemma(const std::string& lemma, std::vector<StmPtr> args);
StmPtr s_assert(StmPtr cond, const std::string& msg);
StmPtr s_fail(const std::string& msg);
StmPtr s_read_reg(const std::string& reg);
StmPtr s_write_reg(const std::string& reg, StmPtr v);
StmPtr s_record_get(StmPtr rec, uint32_t field);
StmPtr s_record_set(StmPtr rec, uint32_t field, StmPtr v);
StmPtr s_tuple_project(StmPtr tup, uint32_t idx);

MatchCase case_ctor(const std::string& tag, std::vector<std::string> binders,
                    StmPtr body);
MatchCase case_enum(EnumTypeId type, uint8_t tag, StmPtr body);
MatchCase case_int(int64_t n, StmPtr body);
MatchCase case_default(StmPtr body);

/// Function declaration: internal functions carry a body, foreign ones only
/// a signature resolved by the runtime system.
struct FunctionDecl {
  SymId name = 0;
  std::vector<SymId> params;
  bool foreign = false;
  StmPtr body;  // null for foreign
};

/// An executable machine definition: functions plus the set of lemma names
/// that ghost statements may invoke. fdeStep/fdeCycle are the entry points.
struct Program {
  std::map<SymId, FunctionDecl> functions;
  std::set<SymId> lemma_names;

  void add(FunctionDecl fn) { functions[fn.name] = std::move(fn); }
  void add_internal(const std::string& name, std::vector<std::string> params,
                    StmPtr body);
  void add_foreign(const std::string& name, size_t arity);
};

struct Diagnostic {
  int location = 0;  // node id, 0 when the issue is program-level
  std::string message;
};

/// Pure structural check: scoping, known call targets with matching arity,
/// registered lemma names, and the fdeStep/fdeCycle entry shape.
std::vector<Diagnostic> check_wellformed(const Program& p);

/// Lookup with a not-found error instead of UB.
struct NotFound {
  std::string name;
};
const FunctionDecl* lookup_function(const Program& p, const std::string& name);
const FunctionDecl& lookup_function_or_throw(const Program& p,
                                             const std::string& name);

/// Deterministic fresh-name generation: smallest "v<n>" not in `used`.
std::string fresh_name(const std::set<std::string>& used);

}  // namespace contractile
