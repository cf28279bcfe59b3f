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

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "contractile/solver.hpp"
#include "contractile/term.hpp"

namespace contractile {

struct Assertion;
using AssertionPtr = std::shared_ptr<const Assertion>;

/// Separation-logic formula. Star joins disjoint ownership; Or is an
/// alternative handled demonically when assumed and angelically when proven.
struct Assertion {
  enum class K : uint8_t {
    Pure,
    PointsToReg,
    PointsToMem,
    Star,
    Or,
    Wand,
    Exists,
    Pred
  };

  K k;
  TermPtr t1;  // Pure condition / memory address
  TermPtr t2;  // points-to payload
  SymId reg = 0;
  SymId var = 0;   // Exists binder
  SymId pred = 0;  // predicate name
  TermVec args;
  AssertionPtr a, b;
};

AssertionPtr a_pure(TermPtr t);
AssertionPtr a_reg(const std::string& reg, TermPtr value);
AssertionPtr a_mem(TermPtr addr, TermPtr value);
AssertionPtr a_star(AssertionPtr a, AssertionPtr b);
AssertionPtr a_star(std::vector<AssertionPtr> parts);  // empty == Pure(true)
AssertionPtr a_or(AssertionPtr a, AssertionPtr b);
AssertionPtr a_wand(AssertionPtr lhs, AssertionPtr rhs);
AssertionPtr a_exists(const std::string& var, AssertionPtr body);
AssertionPtr a_exists(std::vector<std::string> vars, AssertionPtr body);
AssertionPtr a_pred(const std::string& name, TermVec args);

std::string assertion_str(const AssertionPtr& a);

/// Instantiated heap atom held by the symbolic executor. Wand chunks store
/// the uncurried form: surrender `need`, receive `give`; `binders` are the
/// wand-local variables of `need`/`give`.
struct Chunk {
  enum class K : uint8_t { Reg, Mem, Pred, Wand };
  K k;
  SymId reg = 0;
  TermPtr addr;
  TermPtr val;
  SymId pred = 0;
  TermVec args;
  std::vector<Chunk> need;
  std::vector<Chunk> give;
  std::vector<SymId> binders;

  static Chunk mk_reg(SymId reg, TermPtr val);
  static Chunk mk_mem(TermPtr addr, TermPtr val);
  static Chunk mk_pred(SymId name, TermVec args);
  std::string str() const;
};

using Heap = std::vector<Chunk>;

/// Per-function specification.
struct Contract {
  std::vector<SymId> logic_vars;
  std::vector<SymId> params;  // prefix of logic_vars bound by call arguments
  AssertionPtr pre;
  SymId result = 0;
  AssertionPtr post;
};

/// Ghost lemma: a heap transformation justified outside the verifier, plus
/// an executable oracle exercised by the test suite.
struct LemmaDecl {
  SymId name = 0;
  std::vector<SymId> params;
  AssertionPtr pre;
  AssertionPtr post;
  // Draws a random ground instance satisfying the precondition and checks
  // the postcondition's pure content; false signals an unsound lemma.
  std::function<bool(std::mt19937_64&)> oracle;
};

using LemmaTable = std::unordered_map<SymId, LemmaDecl>;

using Valuation = std::unordered_map<SymId, TermPtr>;

/// Persistent (duplicable) abstract predicates: consuming one proves it
/// without removing it from the heap. Word-safety style predicates are
/// persistent; ownership predicates are not.
void set_pred_persistent(SymId pred, bool persistent = true);
bool pred_is_persistent(SymId pred);

/// One demonic branch resulting from produce.
struct ProduceBranch {
  Heap heap;
  PathCtx path;
};

/// Assumes an assertion into the heap. Exists binders become fresh
/// variables, pure parts extend the path condition, Or splits the result.
std::vector<ProduceBranch> produce(const AssertionPtr& a, const Valuation& val,
                                   Heap heap, PathCtx path);

/// One angelic alternative from consume.
struct ConsumeAlt {
  Heap remaining;
  Valuation binding;     // extended unification bindings
  TermVec obligations;   // pure proof obligations, in consume order
};

struct SpatialFailure {
  std::string atom;  // rendering of the atom no chunk unified with
};

/// Proves-and-removes an assertion from the heap. Unification is
/// first-order syntactic over normalized terms; candidates are ordered
/// most-ground-first. Empty result means spatial failure.
std::vector<ConsumeAlt> consume(const AssertionPtr& a, const Valuation& val,
                                const Heap& heap, PathCtx& path);

struct LemmaApp {
  bool ok = false;
  std::string error;  // spatial failure description
  Heap heap;
  PathCtx path;
  TermVec obligations;
};

/// Consumes the lemma precondition (first-success commitment) and produces
/// its postcondition. Lemma postconditions must be Or-free.
LemmaApp apply_lemma(const LemmaTable& lemmas, SymId name, const TermVec& args,
                     const Heap& heap, PathCtx path);

/// Ground evaluation of an assertion against a concrete state, used by the
/// differential harness. Unbound point-to payload variables are bound to
/// the observed values; abstract predicates go through `pred_holds`.
struct GroundCheck {
  std::function<std::optional<Value>(SymId reg)> read_reg;
  std::function<std::optional<Value>(int64_t addr)> read_mem;
  std::function<bool(const std::string& pred, const ValueVec& args)> pred_holds;
  const PurePredTable* preds = nullptr;
};

bool assertion_holds_ground(const AssertionPtr& a, const GroundCheck& ctx,
                            std::unordered_map<SymId, Value>& binding);

}  // namespace contractile
