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

#include <string>
#include <unordered_map>
#include <vector>

#include "contractile/term.hpp"

namespace contractile {

/// Path condition plus derived ground knowledge along one symbolic path.
/// Conditions only ever grow; equalities with a variable side feed an
/// eagerly applied substitution.
struct PathCtx {
  const PurePredTable* preds = nullptr;
  std::unordered_map<SymId, TermPtr> subst;
  TermVec conds;     // assumed boolean terms, in assumption order
  bool dead = false; // an assumed condition normalized to false
  int fresh_counter = 0;

  TermPtr fresh_var(const char* stem = "?");
  /// Assumes a boolean term. Returns false (and marks the path dead) when
  /// the assumption is syntactically contradictory.
  bool assume(const TermPtr& t);
};

/// Substitution application plus constant folding and structural
/// simplification. Does not consult the assumed conditions.
TermPtr normalize(const PathCtx& ctx, const TermPtr& t);

enum class ProveResult : uint8_t { Proved, Unknown };

/// Syntactic discharge: normalization, rewriting by assumed literals,
/// boolean decomposition, and pure-predicate evaluation/unfolding.
ProveResult prove(PathCtx& ctx, const TermPtr& goal);

/// True when `cond` is refuted by the path (used to prune branches).
bool branch_infeasible(PathCtx& ctx, const TermPtr& cond);

}  // namespace contractile
