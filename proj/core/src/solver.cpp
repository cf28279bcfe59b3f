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

#include "contractile/solver.hpp"

#include <unordered_set>

namespace contractile {

namespace {

bool is_true(const TermPtr& t) { return t->is_bool_lit(true); }
bool is_false(const TermPtr& t) { return t->is_bool_lit(false); }

bool occurs(const TermPtr& t, SymId var) {
  if (t->k == Term::K::Var) return t->sym == var;
  for (const auto& k : t->kids) {
    if (occurs(k, var)) return true;
  }
  return false;
}

TermPtr norm(const PathCtx& ctx, const TermPtr& t);

TermPtr norm_kids(const PathCtx& ctx, const TermPtr& t) {
  bool changed = false;
  TermVec kids;
  kids.reserve(t->kids.size());
  for (const auto& k : t->kids) {
    TermPtr nk = norm(ctx, k);
    changed = changed || nk.get() != k.get();
    kids.push_back(std::move(nk));
  }
  if (!changed) return t;
  switch (t->k) {
    case Term::K::Bin:
      return tbin(t->bop, kids[0], kids[1]);
    case Term::K::Un:
      return tun(t->uop, kids[0]);
    case Term::K::Tuple:
      return ttuple(std::move(kids));
    case Term::K::Ctor:
      return tctor(t->sym, std::move(kids));
    case Term::K::Proj:
      return tproj(kids[0], t->idx);
    case Term::K::If:
      return tif(kids[0], kids[1], kids[2]);
    case Term::K::Pred:
      return tpred(sym_name(t->sym), std::move(kids));
    default:
      return t;
  }
}

TermPtr simplify_node(const PathCtx& ctx, TermPtr t) {
  switch (t->k) {
    case Term::K::Lit:
      // Canonicalize structured literals so unification sees structure.
      if (t->lit.is_ctor() || t->lit.is_tuple()) return value_to_term(t->lit);
      return t;
    case Term::K::Bin: {
      const TermPtr& a = t->kids[0];
      const TermPtr& b = t->kids[1];
      if (t->bop == BinOp::And) {
        if (is_false(a) || is_false(b)) return tbool(false);
        if (is_true(a)) return b;
        if (is_true(b)) return a;
        return t;
      }
      if (t->bop == BinOp::Or) {
        if (is_true(a) || is_true(b)) return tbool(true);
        if (is_false(a)) return b;
        if (is_false(b)) return a;
        return t;
      }
      if (t->bop == BinOp::Eq) {
        if (term_eq(a, b)) return tbool(true);
        auto va = term_to_value(a);
        auto vb = term_to_value(b);
        if (va && vb) return tbool(*va == *vb);
        // Distinct constructors can never be equal; same-tag constructors
        // compare fieldwise.
        if (a->k == Term::K::Ctor && b->k == Term::K::Ctor) {
          if (a->sym != b->sym || a->kids.size() != b->kids.size()) {
            return tbool(false);
          }
          TermPtr acc = tbool(true);
          for (size_t i = 0; i < a->kids.size(); ++i) {
            acc = tand(acc, teq(a->kids[i], b->kids[i]));
          }
          return norm(ctx, acc);
        }
        if (a->k == Term::K::Tuple && b->k == Term::K::Tuple) {
          if (a->kids.size() != b->kids.size()) return tbool(false);
          TermPtr acc = tbool(true);
          for (size_t i = 0; i < a->kids.size(); ++i) {
            acc = tand(acc, teq(a->kids[i], b->kids[i]));
          }
          return norm(ctx, acc);
        }
      }
      if (t->bop == BinOp::Le && term_eq(a, b)) return tbool(true);
      if (t->bop == BinOp::Lt && term_eq(a, b)) return tbool(false);
      if (a->is_lit() && b->is_lit()) {
        return tlit(eval_binop(t->bop, a->lit, b->lit));
      }
      return t;
    }
    case Term::K::Un: {
      const TermPtr& a = t->kids[0];
      if (t->uop == UnOp::Not) {
        if (a->is_lit() && a->lit.is_bool()) return tbool(!a->lit.as_bool());
        if (a->k == Term::K::Un && a->uop == UnOp::Not) return a->kids[0];
        return t;
      }
      if (a->is_lit()) return tlit(eval_unop(t->uop, a->lit));
      if (t->uop == UnOp::Wrap32 && a->k == Term::K::Un &&
          a->uop == UnOp::Wrap32) {
        return a;
      }
      return t;
    }
    case Term::K::Proj: {
      const TermPtr& a = t->kids[0];
      if ((a->k == Term::K::Tuple || a->k == Term::K::Ctor) &&
          t->idx < a->kids.size()) {
        return a->kids[t->idx];
      }
      return t;
    }
    case Term::K::If: {
      const TermPtr& c = t->kids[0];
      if (is_true(c)) return t->kids[1];
      if (is_false(c)) return t->kids[2];
      if (term_eq(t->kids[1], t->kids[2])) return t->kids[1];
      return t;
    }
    case Term::K::Pred: {
      if (!ctx.preds) return t;
      auto it = ctx.preds->find(sym_name(t->sym));
      if (it == ctx.preds->end() || !it->second.eval) return t;
      ValueVec args;
      for (const auto& k : t->kids) {
        auto v = term_to_value(k);
        if (!v) return t;
        args.push_back(*v);
      }
      return tlit(it->second.eval(args));
    }
    default:
      return t;
  }
}

TermPtr norm(const PathCtx& ctx, const TermPtr& t) {
  if (t->k == Term::K::Var) {
    auto it = ctx.subst.find(t->sym);
    if (it == ctx.subst.end()) return t;
    return norm(ctx, it->second);
  }
  if (t->k == Term::K::Lit) return simplify_node(ctx, t);
  TermPtr n = norm_kids(ctx, t);
  return simplify_node(ctx, n);
}

/// Rewrites subterms that occur verbatim among the assumed literals.
TermPtr rewrite_by_assumed(const TermPtr& t, const TermSet& pos,
                           const TermSet& neg) {
  if (t->is_lit()) return t;
  if (pos.count(t)) return tbool(true);
  if (neg.count(t)) return tbool(false);
  bool changed = false;
  TermVec kids;
  kids.reserve(t->kids.size());
  for (const auto& k : t->kids) {
    TermPtr nk = rewrite_by_assumed(k, pos, neg);
    changed = changed || nk.get() != k.get();
    kids.push_back(std::move(nk));
  }
  if (!changed) return t;
  switch (t->k) {
    case Term::K::Bin:
      return tbin(t->bop, kids[0], kids[1]);
    case Term::K::Un:
      return tun(t->uop, kids[0]);
    case Term::K::Tuple:
      return ttuple(std::move(kids));
    case Term::K::Ctor:
      return tctor(t->sym, std::move(kids));
    case Term::K::Proj:
      return tproj(kids[0], t->idx);
    case Term::K::If:
      return tif(kids[0], kids[1], kids[2]);
    case Term::K::Pred:
      return tpred(sym_name(t->sym), std::move(kids));
    default:
      return t;
  }
}

}  // namespace

TermPtr PathCtx::fresh_var(const char* stem) {
  return tvar(std::string(stem) + std::to_string(fresh_counter++));
}

bool PathCtx::assume(const TermPtr& raw) {
  TermPtr t = norm(*this, raw);
  if (is_true(t)) return true;
  if (is_false(t)) {
    dead = true;
    return false;
  }
  if (t->k == Term::K::Bin && t->bop == BinOp::And) {
    bool ok = assume(t->kids[0]);
    ok = assume(t->kids[1]) && ok;
    return ok;
  }
  // Oriented equality feeds the substitution; other facts are literals.
  if (t->k == Term::K::Bin && t->bop == BinOp::Eq) {
    const TermPtr& a = t->kids[0];
    const TermPtr& b = t->kids[1];
    SymId var = 0;
    TermPtr rhs;
    if (a->is_var() && !occurs(b, a->sym)) {
      var = a->sym;
      rhs = b;
    } else if (b->is_var() && !occurs(a, b->sym)) {
      var = b->sym;
      rhs = a;
    }
    if (var != 0) {
      subst[var] = rhs;
      conds.push_back(t);
      return true;
    }
  }
  conds.push_back(t);
  // A user predicate assumed true also yields its definitional unfolding,
  // so branch conditions built from the same definition can be decided.
  if (t->k == Term::K::Pred && preds) {
    auto it = preds->find(sym_name(t->sym));
    if (it != preds->end() && it->second.unfold) {
      TermPtr unfolded = it->second.unfold(t->kids);
      if (unfolded) {
        TermPtr n = norm(*this, unfolded);
        if (!n->is_lit()) conds.push_back(n);
      }
    }
  }
  return true;
}

TermPtr normalize(const PathCtx& ctx, const TermPtr& t) { return norm(ctx, t); }

namespace {

ProveResult prove_inner(PathCtx& ctx, const TermPtr& goal, int depth);

ProveResult prove_norm(PathCtx& ctx, TermPtr g, int depth) {
  if (depth > 16) return ProveResult::Unknown;
  if (is_true(g)) return ProveResult::Proved;
  if (is_false(g)) return ProveResult::Unknown;
  if (g->k == Term::K::Bin && g->bop == BinOp::And) {
    if (prove_inner(ctx, g->kids[0], depth + 1) == ProveResult::Proved &&
        prove_inner(ctx, g->kids[1], depth + 1) == ProveResult::Proved) {
      return ProveResult::Proved;
    }
    return ProveResult::Unknown;
  }
  if (g->k == Term::K::Bin && g->bop == BinOp::Or) {
    if (prove_inner(ctx, g->kids[0], depth + 1) == ProveResult::Proved ||
        prove_inner(ctx, g->kids[1], depth + 1) == ProveResult::Proved) {
      return ProveResult::Proved;
    }
    return ProveResult::Unknown;
  }
  // Definitional unfolding of user predicates on symbolic arguments.
  if (g->k == Term::K::Pred && ctx.preds) {
    auto it = ctx.preds->find(sym_name(g->sym));
    if (it != ctx.preds->end() && it->second.unfold) {
      TermPtr unfolded = it->second.unfold(g->kids);
      if (unfolded) return prove_inner(ctx, unfolded, depth + 1);
    }
  }
  return ProveResult::Unknown;
}

ProveResult prove_inner(PathCtx& ctx, const TermPtr& goal, int depth) {
  if (ctx.dead) return ProveResult::Proved;  // unreachable path
  TermPtr g = norm(ctx, goal);
  if (is_true(g)) return ProveResult::Proved;

  TermSet pos;
  TermSet neg;
  for (const auto& c : ctx.conds) {
    TermPtr n = norm(ctx, c);
    if (n->k == Term::K::Un && n->uop == UnOp::Not) {
      neg.insert(n->kids[0]);
    } else if (!n->is_lit()) {
      pos.insert(n);
      // Substitution may have exposed an unfolding since assumption time.
      if (n->k == Term::K::Pred && ctx.preds) {
        auto it = ctx.preds->find(sym_name(n->sym));
        if (it != ctx.preds->end() && it->second.unfold) {
          TermPtr unfolded = it->second.unfold(n->kids);
          if (unfolded) {
            TermPtr u = norm(ctx, unfolded);
            if (!u->is_lit()) pos.insert(u);
          }
        }
      }
    }
  }
  for (int round = 0; round < 4; ++round) {
    TermPtr r = rewrite_by_assumed(g, pos, neg);
    r = norm(ctx, r);
    if (term_eq(r, g)) break;
    g = r;
    if (is_true(g)) return ProveResult::Proved;
  }
  return prove_norm(ctx, g, depth);
}

}  // namespace

ProveResult prove(PathCtx& ctx, const TermPtr& goal) {
  return prove_inner(ctx, goal, 0);
}

bool branch_infeasible(PathCtx& ctx, const TermPtr& cond) {
  TermPtr c = normalize(ctx, cond);
  if (c->is_bool_lit(false)) return true;
  if (c->k == Term::K::Un && c->uop == UnOp::Not) {
    if (prove(ctx, c->kids[0]) == ProveResult::Proved) return true;
    return false;
  }
  return prove(ctx, tnot(c)) == ProveResult::Proved;
}

}  // namespace contractile
