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

#include "contractile/seplogic.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace contractile {

namespace {

AssertionPtr mk(Assertion a) { return std::make_shared<const Assertion>(std::move(a)); }

std::unordered_set<SymId>& persistent_preds() {
  static auto* s = new std::unordered_set<SymId>();
  return *s;
}

}  // namespace

void set_pred_persistent(SymId pred, bool persistent) {
  if (persistent) {
    persistent_preds().insert(pred);
  } else {
    persistent_preds().erase(pred);
  }
}

bool pred_is_persistent(SymId pred) { return persistent_preds().count(pred) > 0; }

AssertionPtr a_pure(TermPtr t) {
  Assertion a;
  a.k = Assertion::K::Pure;
  a.t1 = std::move(t);
  return mk(std::move(a));
}

AssertionPtr a_reg(const std::string& reg, TermPtr value) {
  Assertion a;
  a.k = Assertion::K::PointsToReg;
  a.reg = intern(reg);
  a.t2 = std::move(value);
  return mk(std::move(a));
}

AssertionPtr a_mem(TermPtr addr, TermPtr value) {
  Assertion a;
  a.k = Assertion::K::PointsToMem;
  a.t1 = std::move(addr);
  a.t2 = std::move(value);
  return mk(std::move(a));
}

AssertionPtr a_star(AssertionPtr x, AssertionPtr y) {
  Assertion a;
  a.k = Assertion::K::Star;
  a.a = std::move(x);
  a.b = std::move(y);
  return mk(std::move(a));
}

AssertionPtr a_star(std::vector<AssertionPtr> parts) {
  if (parts.empty()) return a_pure(tbool(true));
  AssertionPtr acc = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) acc = a_star(acc, parts[i]);
  return acc;
}

AssertionPtr a_or(AssertionPtr x, AssertionPtr y) {
  Assertion a;
  a.k = Assertion::K::Or;
  a.a = std::move(x);
  a.b = std::move(y);
  return mk(std::move(a));
}

AssertionPtr a_wand(AssertionPtr lhs, AssertionPtr rhs) {
  Assertion a;
  a.k = Assertion::K::Wand;
  a.a = std::move(lhs);
  a.b = std::move(rhs);
  return mk(std::move(a));
}

AssertionPtr a_exists(const std::string& var, AssertionPtr body) {
  Assertion a;
  a.k = Assertion::K::Exists;
  a.var = intern(var);
  a.a = std::move(body);
  return mk(std::move(a));
}

AssertionPtr a_exists(std::vector<std::string> vars, AssertionPtr body) {
  AssertionPtr acc = std::move(body);
  for (size_t i = vars.size(); i-- > 0;) acc = a_exists(vars[i], acc);
  return acc;
}

AssertionPtr a_pred(const std::string& name, TermVec args) {
  Assertion a;
  a.k = Assertion::K::Pred;
  a.pred = intern(name);
  a.args = std::move(args);
  return mk(std::move(a));
}

std::string assertion_str(const AssertionPtr& a) {
  std::ostringstream os;
  switch (a->k) {
    case Assertion::K::Pure:
      os << "(pure " << term_str(a->t1) << ")";
      break;
    case Assertion::K::PointsToReg:
      os << "(reg " << sym_name(a->reg) << " " << term_str(a->t2) << ")";
      break;
    case Assertion::K::PointsToMem:
      os << "(mem " << term_str(a->t1) << " " << term_str(a->t2) << ")";
      break;
    case Assertion::K::Star:
      os << "(star " << assertion_str(a->a) << " " << assertion_str(a->b) << ")";
      break;
    case Assertion::K::Or:
      os << "(or " << assertion_str(a->a) << " " << assertion_str(a->b) << ")";
      break;
    case Assertion::K::Wand:
      os << "(wand " << assertion_str(a->a) << " " << assertion_str(a->b) << ")";
      break;
    case Assertion::K::Exists:
      os << "(exists (" << sym_name(a->var) << ") " << assertion_str(a->a)
         << ")";
      break;
    case Assertion::K::Pred: {
      os << "(pred " << sym_name(a->pred);
      for (const auto& t : a->args) os << " " << term_str(t);
      os << ")";
      break;
    }
  }
  return os.str();
}

Chunk Chunk::mk_reg(SymId reg, TermPtr val) {
  Chunk c;
  c.k = K::Reg;
  c.reg = reg;
  c.val = std::move(val);
  return c;
}

Chunk Chunk::mk_mem(TermPtr addr, TermPtr val) {
  Chunk c;
  c.k = K::Mem;
  c.addr = std::move(addr);
  c.val = std::move(val);
  return c;
}

Chunk Chunk::mk_pred(SymId name, TermVec args) {
  Chunk c;
  c.k = K::Pred;
  c.pred = name;
  c.args = std::move(args);
  return c;
}

std::string Chunk::str() const {
  std::ostringstream os;
  switch (k) {
    case K::Reg:
      os << sym_name(reg) << " |-> " << term_str(val);
      break;
    case K::Mem:
      os << term_str(addr) << " |-> " << term_str(val);
      break;
    case K::Pred: {
      os << sym_name(pred) << "(";
      for (size_t i = 0; i < args.size(); ++i) {
        if (i) os << ", ";
        os << term_str(args[i]);
      }
      os << ")";
      break;
    }
    case K::Wand: {
      os << "wand[";
      for (size_t i = 0; i < need.size(); ++i) {
        if (i) os << " * ";
        os << need[i].str();
      }
      os << " -* ";
      for (size_t i = 0; i < give.size(); ++i) {
        if (i) os << " * ";
        os << give[i].str();
      }
      os << "]";
      break;
    }
  }
  return os.str();
}

namespace {

TermPtr apply_val(const TermPtr& t, const Valuation& val) {
  return val.empty() ? t : subst_term(t, val);
}

Chunk subst_chunk(const Chunk& c, const Valuation& val) {
  Chunk out = c;
  if (out.addr) out.addr = apply_val(out.addr, val);
  if (out.val) out.val = apply_val(out.val, val);
  for (auto& a : out.args) a = apply_val(a, val);
  for (auto& n : out.need) n = subst_chunk(n, val);
  for (auto& g : out.give) g = subst_chunk(g, val);
  return out;
}

Chunk normalize_chunk(const PathCtx& path, const Chunk& c) {
  Chunk out = c;
  if (out.addr) out.addr = normalize(path, out.addr);
  if (out.val) out.val = normalize(path, out.val);
  for (auto& a : out.args) a = normalize(path, a);
  for (auto& n : out.need) n = normalize_chunk(path, n);
  for (auto& g : out.give) g = normalize_chunk(path, g);
  return out;
}

/// Flattens Star/atom nesting under a Wand side; supports an Exists prefix
/// whose binders become wand-local variables.
bool flatten_wand_side(const AssertionPtr& a, const Valuation& val,
                       PathCtx& path, Valuation& local,
                       std::vector<SymId>* binders, std::vector<Chunk>* out) {
  switch (a->k) {
    case Assertion::K::Exists: {
      TermPtr b = path.fresh_var("!w");
      local[a->var] = b;
      binders->push_back(b->sym);
      return flatten_wand_side(a->a, val, path, local, binders, out);
    }
    case Assertion::K::Star:
      return flatten_wand_side(a->a, val, path, local, binders, out) &&
             flatten_wand_side(a->b, val, path, local, binders, out);
    case Assertion::K::PointsToReg:
      out->push_back(Chunk::mk_reg(
          a->reg, apply_val(apply_val(a->t2, val), local)));
      return true;
    case Assertion::K::PointsToMem:
      out->push_back(
          Chunk::mk_mem(apply_val(apply_val(a->t1, val), local),
                        apply_val(apply_val(a->t2, val), local)));
      return true;
    case Assertion::K::Pred: {
      TermVec args;
      for (const auto& t : a->args) {
        args.push_back(apply_val(apply_val(t, val), local));
      }
      out->push_back(Chunk::mk_pred(a->pred, std::move(args)));
      return true;
    }
    default:
      return false;
  }
}

void produce_rec(const AssertionPtr& a, Valuation val,
                 std::vector<ProduceBranch>& acc, ProduceBranch cur);

void produce_atom(const AssertionPtr& a, const Valuation& val,
                  ProduceBranch& cur) {
  switch (a->k) {
    case Assertion::K::Pure:
      cur.path.assume(apply_val(a->t1, val));
      break;
    case Assertion::K::PointsToReg:
      cur.heap.push_back(Chunk::mk_reg(
          a->reg, normalize(cur.path, apply_val(a->t2, val))));
      break;
    case Assertion::K::PointsToMem:
      cur.heap.push_back(
          Chunk::mk_mem(normalize(cur.path, apply_val(a->t1, val)),
                        normalize(cur.path, apply_val(a->t2, val))));
      break;
    case Assertion::K::Pred: {
      TermVec args;
      for (const auto& t : a->args) {
        args.push_back(normalize(cur.path, apply_val(t, val)));
      }
      // Duplicate persistent facts add nothing.
      if (pred_is_persistent(a->pred)) {
        for (const auto& c : cur.heap) {
          if (c.k != Chunk::K::Pred || c.pred != a->pred ||
              c.args.size() != args.size()) {
            continue;
          }
          bool same = true;
          for (size_t i = 0; i < args.size(); ++i) {
            if (!term_eq(normalize(cur.path, c.args[i]), args[i])) {
              same = false;
              break;
            }
          }
          if (same) return;
        }
      }
      cur.heap.push_back(Chunk::mk_pred(a->pred, std::move(args)));
      break;
    }
    case Assertion::K::Wand: {
      Chunk c;
      c.k = Chunk::K::Wand;
      Valuation local;
      if (!flatten_wand_side(a->a, val, cur.path, local, &c.binders, &c.need) ||
          !flatten_wand_side(a->b, val, cur.path, local, &c.binders, &c.give)) {
        throw std::runtime_error("unsupported wand shape: " + assertion_str(a));
      }
      cur.heap.push_back(std::move(c));
      break;
    }
    default:
      throw std::runtime_error("produce_atom: not an atom");
  }
}

void produce_rec(const AssertionPtr& a, Valuation val,
                 std::vector<ProduceBranch>& acc, ProduceBranch cur) {
  switch (a->k) {
    case Assertion::K::Star: {
      // Left then right; Or under either side multiplies branches.
      std::vector<ProduceBranch> lefts;
      produce_rec(a->a, val, lefts, std::move(cur));
      for (auto& l : lefts) produce_rec(a->b, val, acc, std::move(l));
      return;
    }
    case Assertion::K::Or: {
      produce_rec(a->a, val, acc, cur);
      produce_rec(a->b, val, acc, std::move(cur));
      return;
    }
    case Assertion::K::Exists: {
      TermPtr f = cur.path.fresh_var();
      val[a->var] = f;
      produce_rec(a->a, std::move(val), acc, std::move(cur));
      return;
    }
    default:
      produce_atom(a, val, cur);
      acc.push_back(std::move(cur));
      return;
  }
}

/// Unification context for consume.
struct Uni {
  PathCtx* path;
  std::unordered_set<SymId> open;  // unification variables
};

TermPtr resolve(const Uni& u, const TermPtr& t, const Valuation& binding) {
  TermPtr s = binding.empty() ? t : subst_term(t, binding);
  return normalize(*u.path, s);
}

bool unify(const Uni& u, const TermPtr& pat, const TermPtr& tgt,
           Valuation& binding) {
  TermPtr p = resolve(u, pat, binding);
  TermPtr t = resolve(u, tgt, binding);
  if (p->is_var() && u.open.count(p->sym)) {
    if (t->is_var() && t->sym == p->sym) return true;
    binding[p->sym] = t;
    return true;
  }
  if (term_eq(p, t)) return true;
  if (p->k == Term::K::Ctor && t->k == Term::K::Ctor) {
    if (p->sym != t->sym || p->kids.size() != t->kids.size()) return false;
    for (size_t i = 0; i < p->kids.size(); ++i) {
      if (!unify(u, p->kids[i], t->kids[i], binding)) return false;
    }
    return true;
  }
  if (p->k == Term::K::Tuple && t->k == Term::K::Tuple) {
    if (p->kids.size() != t->kids.size()) return false;
    for (size_t i = 0; i < p->kids.size(); ++i) {
      if (!unify(u, p->kids[i], t->kids[i], binding)) return false;
    }
    return true;
  }
  return false;
}

int chunk_groundness(const Chunk& c) {
  int score = 0;
  auto add = [&score](const TermPtr& t) {
    if (t && term_is_ground(t)) ++score;
  };
  add(c.addr);
  add(c.val);
  for (const auto& a : c.args) add(a);
  return score;
}

/// Renames wand-local binders of `c` to the canonical `!k<i>` names so two
/// wands can be compared positionally.
Chunk canon_wand(const Chunk& c) {
  Valuation ren;
  std::vector<SymId> fresh;
  for (size_t i = 0; i < c.binders.size(); ++i) {
    SymId nb = intern("!k" + std::to_string(i));
    ren[c.binders[i]] = tvar(nb);
    fresh.push_back(nb);
  }
  Chunk out = subst_chunk(c, ren);
  out.binders = fresh;
  return out;
}

bool unify_chunk(const Uni& u, const Chunk& pat, const Chunk& tgt,
                 Valuation& binding) {
  if (pat.k != tgt.k) return false;
  switch (pat.k) {
    case Chunk::K::Reg:
      return pat.reg == tgt.reg && unify(u, pat.val, tgt.val, binding);
    case Chunk::K::Mem:
      return unify(u, pat.addr, tgt.addr, binding) &&
             unify(u, pat.val, tgt.val, binding);
    case Chunk::K::Pred: {
      if (pat.pred != tgt.pred || pat.args.size() != tgt.args.size()) {
        return false;
      }
      for (size_t i = 0; i < pat.args.size(); ++i) {
        if (!unify(u, pat.args[i], tgt.args[i], binding)) return false;
      }
      return true;
    }
    case Chunk::K::Wand: {
      if (pat.binders.size() != tgt.binders.size() ||
          pat.need.size() != tgt.need.size() ||
          pat.give.size() != tgt.give.size()) {
        return false;
      }
      Chunk p = canon_wand(pat);
      Chunk t = canon_wand(tgt);
      for (size_t i = 0; i < p.need.size(); ++i) {
        if (!unify_chunk(u, p.need[i], t.need[i], binding)) return false;
      }
      for (size_t i = 0; i < p.give.size(); ++i) {
        if (!unify_chunk(u, p.give[i], t.give[i], binding)) return false;
      }
      return true;
    }
  }
  return false;
}

struct ConsumeCtx {
  Uni uni;
  const Heap* heap;
};

struct PartialAlt {
  std::vector<bool> used;  // consumed chunk indices
  Valuation binding;
  TermVec obligations;
};

void consume_rec(ConsumeCtx& ctx, const AssertionPtr& a, Valuation val,
                 std::vector<PartialAlt>& acc, PartialAlt cur);

void consume_atom_alts(ConsumeCtx& ctx, const Chunk& pat,
                       std::vector<PartialAlt>& acc, const PartialAlt& cur) {
  // Candidates ordered most-ground-first, then by heap position.
  std::vector<size_t> order;
  for (size_t i = 0; i < ctx.heap->size(); ++i) {
    if (!cur.used[i]) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    return chunk_groundness((*ctx.heap)[x]) > chunk_groundness((*ctx.heap)[y]);
  });
  bool persistent = pat.k == Chunk::K::Pred && pred_is_persistent(pat.pred);
  for (size_t i : order) {
    Valuation b = cur.binding;
    if (unify_chunk(ctx.uni, pat, (*ctx.heap)[i], b)) {
      PartialAlt alt = cur;
      alt.binding = std::move(b);
      if (!persistent) alt.used[i] = true;
      acc.push_back(std::move(alt));
    }
  }
}

void consume_rec(ConsumeCtx& ctx, const AssertionPtr& a, Valuation val,
                 std::vector<PartialAlt>& acc, PartialAlt cur) {
  switch (a->k) {
    case Assertion::K::Pure: {
      cur.obligations.push_back(apply_val(a->t1, val));
      acc.push_back(std::move(cur));
      return;
    }
    case Assertion::K::Star: {
      std::vector<PartialAlt> lefts;
      consume_rec(ctx, a->a, val, lefts, std::move(cur));
      for (auto& l : lefts) consume_rec(ctx, a->b, val, acc, std::move(l));
      return;
    }
    case Assertion::K::Or: {
      consume_rec(ctx, a->a, val, acc, cur);
      consume_rec(ctx, a->b, val, acc, std::move(cur));
      return;
    }
    case Assertion::K::Exists: {
      TermPtr uv = ctx.uni.path->fresh_var("?u");
      ctx.uni.open.insert(uv->sym);
      val[a->var] = uv;
      consume_rec(ctx, a->a, std::move(val), acc, std::move(cur));
      return;
    }
    case Assertion::K::PointsToReg: {
      Chunk pat = Chunk::mk_reg(a->reg, apply_val(a->t2, val));
      consume_atom_alts(ctx, pat, acc, cur);
      return;
    }
    case Assertion::K::PointsToMem: {
      Chunk pat =
          Chunk::mk_mem(apply_val(a->t1, val), apply_val(a->t2, val));
      consume_atom_alts(ctx, pat, acc, cur);
      return;
    }
    case Assertion::K::Pred: {
      TermVec args;
      for (const auto& t : a->args) args.push_back(apply_val(t, val));
      Chunk pat = Chunk::mk_pred(a->pred, std::move(args));
      consume_atom_alts(ctx, pat, acc, cur);
      return;
    }
    case Assertion::K::Wand: {
      Chunk pat;
      pat.k = Chunk::K::Wand;
      Valuation local;
      if (!flatten_wand_side(a->a, val, *ctx.uni.path, local, &pat.binders,
                             &pat.need) ||
          !flatten_wand_side(a->b, val, *ctx.uni.path, local, &pat.binders,
                             &pat.give)) {
        throw std::runtime_error("unsupported wand shape: " + assertion_str(a));
      }
      consume_atom_alts(ctx, pat, acc, cur);
      return;
    }
  }
}

/// Also binds any free assertion variable that the valuation does not cover
/// (used by lemma application, where non-parameter variables are open).
Valuation with_auto_open(const AssertionPtr& a, Valuation val, Uni& uni) {
  std::vector<const Assertion*> stack{a.get()};
  std::unordered_set<SymId> bound;
  while (!stack.empty()) {
    const Assertion* cur = stack.back();
    stack.pop_back();
    std::unordered_set<SymId> vars;
    if (cur->t1) collect_vars(cur->t1, vars);
    if (cur->t2) collect_vars(cur->t2, vars);
    for (const auto& t : cur->args) collect_vars(t, vars);
    if (cur->k == Assertion::K::Exists) bound.insert(cur->var);
    for (SymId v : vars) {
      if (!val.count(v) && !bound.count(v)) {
        TermPtr uv = uni.path->fresh_var("?u");
        uni.open.insert(uv->sym);
        val[v] = uv;
      }
    }
    if (cur->a) stack.push_back(cur->a.get());
    if (cur->b) stack.push_back(cur->b.get());
  }
  return val;
}

}  // namespace

std::vector<ProduceBranch> produce(const AssertionPtr& a, const Valuation& val,
                                   Heap heap, PathCtx path) {
  std::vector<ProduceBranch> acc;
  produce_rec(a, val, acc, ProduceBranch{std::move(heap), std::move(path)});
  return acc;
}

std::vector<ConsumeAlt> consume(const AssertionPtr& a, const Valuation& val,
                                const Heap& heap, PathCtx& path) {
  ConsumeCtx ctx{Uni{&path, {}}, &heap};
  Valuation v = with_auto_open(a, val, ctx.uni);
  std::vector<PartialAlt> partial;
  PartialAlt start;
  start.used.assign(heap.size(), false);
  consume_rec(ctx, a, std::move(v), partial, std::move(start));

  std::vector<ConsumeAlt> out;
  out.reserve(partial.size());
  for (auto& p : partial) {
    ConsumeAlt alt;
    for (size_t i = 0; i < heap.size(); ++i) {
      if (!p.used[i]) alt.remaining.push_back(heap[i]);
    }
    for (auto& o : p.obligations) {
      alt.obligations.push_back(
          normalize(path, p.binding.empty() ? o : subst_term(o, p.binding)));
    }
    alt.binding = std::move(p.binding);
    out.push_back(std::move(alt));
  }
  return out;
}

LemmaApp apply_lemma(const LemmaTable& lemmas, SymId name, const TermVec& args,
                     const Heap& heap, PathCtx path) {
  LemmaApp result;
  auto it = lemmas.find(name);
  if (it == lemmas.end()) {
    result.error = "unknown lemma: " + sym_name(name);
    return result;
  }
  const LemmaDecl& lem = it->second;
  if (args.size() > lem.params.size()) {
    result.error = "lemma arity mismatch: " + sym_name(name);
    return result;
  }
  Valuation val;
  for (size_t i = 0; i < args.size(); ++i) {
    val[lem.params[i]] = normalize(path, args[i]);
  }
  std::vector<ConsumeAlt> alts = consume(lem.pre, val, heap, path);
  if (alts.empty()) {
    std::ostringstream os;
    os << "lemma " << sym_name(name) << ": no chunk matches "
       << assertion_str(lem.pre);
    result.error = os.str();
    return result;
  }
  // First-success commitment.
  const ConsumeAlt& alt = alts.front();
  Valuation post_val = val;
  for (const auto& [k, v] : alt.binding) post_val[k] = v;
  std::vector<ProduceBranch> branches =
      produce(lem.post, post_val, alt.remaining, std::move(path));
  if (branches.size() != 1) {
    result.error = "lemma " + sym_name(name) + ": disjunctive post";
    return result;
  }
  result.ok = true;
  result.heap = std::move(branches[0].heap);
  result.path = std::move(branches[0].path);
  result.obligations = alt.obligations;
  return result;
}

namespace {

bool holds_rec(const AssertionPtr& a, const GroundCheck& ctx,
               std::unordered_map<SymId, Value>& binding);

std::optional<Value> eval_with_binding(
    const TermPtr& t, const GroundCheck& ctx,
    const std::unordered_map<SymId, Value>& binding) {
  try {
    return eval_term(
        t,
        [&binding](SymId v) -> std::optional<Value> {
          auto it = binding.find(v);
          if (it == binding.end()) return std::nullopt;
          return it->second;
        },
        ctx.preds);
  } catch (...) {
    return std::nullopt;
  }
}

bool bind_or_compare(const TermPtr& t, const Value& actual,
                     const GroundCheck& ctx,
                     std::unordered_map<SymId, Value>& binding) {
  if (t->is_var() && !binding.count(t->sym)) {
    binding.emplace(t->sym, actual);
    return true;
  }
  auto v = eval_with_binding(t, ctx, binding);
  return v && *v == actual;
}

bool holds_rec(const AssertionPtr& a, const GroundCheck& ctx,
               std::unordered_map<SymId, Value>& binding) {
  switch (a->k) {
    case Assertion::K::Pure: {
      auto v = eval_with_binding(a->t1, ctx, binding);
      return v && v->is_bool() && v->as_bool();
    }
    case Assertion::K::PointsToReg: {
      auto actual = ctx.read_reg(a->reg);
      return actual && bind_or_compare(a->t2, *actual, ctx, binding);
    }
    case Assertion::K::PointsToMem: {
      auto addr = eval_with_binding(a->t1, ctx, binding);
      if (!addr || !addr->is_int()) return false;
      auto actual = ctx.read_mem(addr->as_int());
      return actual && bind_or_compare(a->t2, *actual, ctx, binding);
    }
    case Assertion::K::Star:
      return holds_rec(a->a, ctx, binding) && holds_rec(a->b, ctx, binding);
    case Assertion::K::Or: {
      auto saved = binding;
      if (holds_rec(a->a, ctx, binding)) return true;
      binding = saved;
      return holds_rec(a->b, ctx, binding);
    }
    case Assertion::K::Exists:
      return holds_rec(a->a, ctx, binding);
    case Assertion::K::Pred: {
      const std::string& name = sym_name(a->pred);
      ValueVec args;
      bool ground = true;
      for (const auto& t : a->args) {
        auto v = eval_with_binding(t, ctx, binding);
        if (!v) {
          ground = false;
          break;
        }
        args.push_back(*v);
      }
      if (ground && ctx.preds) {
        auto it = ctx.preds->find(name);
        if (it != ctx.preds->end() && it->second.eval) {
          Value v = it->second.eval(args);
          return v.is_bool() && v.as_bool();
        }
      }
      return ctx.pred_holds ? ctx.pred_holds(name, args) : true;
    }
    case Assertion::K::Wand:
      return ctx.pred_holds ? ctx.pred_holds("__wand", {}) : true;
  }
  return false;
}

}  // namespace

bool assertion_holds_ground(const AssertionPtr& a, const GroundCheck& ctx,
                            std::unordered_map<SymId, Value>& binding) {
  return holds_rec(a, ctx, binding);
}

}  // namespace contractile
