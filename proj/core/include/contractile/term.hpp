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
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "contractile/values.hpp"

namespace contractile {

enum class BinOp : uint8_t {
  Add,
  Sub,
  Mul,
  Eq,
  Le,
  Lt,
  And,
  Or,
  BitAnd,
  BitOr,
  BitXor,
  Shl,
  Shr,
  Sra
};

enum class UnOp : uint8_t { Not, Wrap32, Signed32 };

struct Term;
using TermPtr = std::shared_ptr<const Term>;
using TermVec = std::vector<TermPtr>;

/// First-order term. Immutable; hash computed at construction so structural
/// equality checks are cheap.
struct Term {
  enum class K : uint8_t { Var, Lit, Bin, Un, Tuple, Ctor, Proj, If, Pred };

  K k;
  BinOp bop{};
  UnOp uop{};
  uint32_t idx = 0;  // Proj index
  SymId sym = 0;     // Var name, Ctor tag, or Pred name
  Value lit;
  TermVec kids;
  size_t hash = 0;

  bool is_lit() const { return k == K::Lit; }
  bool is_var() const { return k == K::Var; }
  bool is_bool_lit(bool b) const {
    return k == K::Lit && lit.is_bool() && lit.as_bool() == b;
  }
};

bool term_eq(const TermPtr& a, const TermPtr& b);
std::string term_str(const TermPtr& t);

// Node builders.
TermPtr tvar(const std::string& name);
TermPtr tvar(SymId name);
TermPtr tlit(Value v);
TermPtr tint(int64_t n);
TermPtr tbool(bool b);
TermPtr tunit();
TermPtr tenum(EnumTypeId t, uint8_t tag);
TermPtr tbin(BinOp op, TermPtr a, TermPtr b);
TermPtr tun(UnOp op, TermPtr a);
TermPtr ttuple(TermVec kids);
TermPtr tctor(SymId tag, TermVec kids);
TermPtr tctor(const std::string& tag, TermVec kids);
TermPtr tproj(TermPtr t, uint32_t idx);
TermPtr tif(TermPtr c, TermPtr a, TermPtr b);
TermPtr tpred(const std::string& name, TermVec args);

// Shorthand for common boolean/arithmetic shapes.
TermPtr tadd(TermPtr a, TermPtr b);
TermPtr tsub(TermPtr a, TermPtr b);
TermPtr teq(TermPtr a, TermPtr b);
TermPtr tle(TermPtr a, TermPtr b);
TermPtr tlt(TermPtr a, TermPtr b);
TermPtr tand(TermPtr a, TermPtr b);
TermPtr tor(TermPtr a, TermPtr b);
TermPtr tnot(TermPtr a);
TermPtr tne(TermPtr a, TermPtr b);
TermPtr tand_all(const TermVec& ts);  // true when empty
TermPtr tor_all(const TermVec& ts);   // false when empty

/// Pure predicates with executable semantics on ground arguments, plus an
/// optional definitional unfolding used by the solver on symbolic arguments.
struct PurePred {
  std::function<Value(const ValueVec&)> eval;
  std::function<TermPtr(const TermVec&)> unfold;  // may be null
};

using PurePredTable = std::unordered_map<std::string, PurePred>;

/// Ground evaluation. Throws std::runtime_error on unbound variables or
/// type mismatches (those indicate interpreter bugs, not machine failures).
Value eval_term(const TermPtr& t,
                const std::function<std::optional<Value>(SymId)>& lookup,
                const PurePredTable* preds);

Value eval_binop(BinOp op, const Value& a, const Value& b);
Value eval_unop(UnOp op, const Value& a);

/// Capture-free substitution of variables by terms.
TermPtr subst_term(const TermPtr& t,
                   const std::unordered_map<SymId, TermPtr>& map);

void collect_vars(const TermPtr& t, std::unordered_set<SymId>& out);
bool term_is_ground(const TermPtr& t);

/// Converts a ground term (no variables, no ops) to a Value, if possible.
std::optional<Value> term_to_value(const TermPtr& t);
/// Embeds a Value as a literal/structural term.
TermPtr value_to_term(const Value& v);

struct TermPtrHash {
  size_t operator()(const TermPtr& t) const { return t ? t->hash : 0; }
};
struct TermPtrEq {
  bool operator()(const TermPtr& a, const TermPtr& b) const {
    return term_eq(a, b);
  }
};
using TermSet = std::unordered_set<TermPtr, TermPtrHash, TermPtrEq>;

}  // namespace contractile
