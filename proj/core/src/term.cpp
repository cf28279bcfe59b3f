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

#include "contractile/term.hpp"

#include <sstream>
#include <stdexcept>

namespace contractile {

namespace {

size_t hash_mix(size_t h, size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

size_t value_hash(const Value& v) {
  size_t h = static_cast<size_t>(v.kind());
  switch (v.kind()) {
    case Value::Kind::Unit:
      return h;
    case Value::Kind::Bool:
    case Value::Kind::Int:
      return hash_mix(h, static_cast<size_t>(v.as_int()));
    case Value::Kind::Enum:
      return hash_mix(hash_mix(h, v.enum_type()), v.enum_tag());
    case Value::Kind::Ctor:
      h = hash_mix(h, v.ctor_tag());
      break;
    case Value::Kind::Tuple:
      break;
  }
  for (const Value& f : v.fields()) h = hash_mix(h, value_hash(f));
  return h;
}

TermPtr make(Term t) {
  size_t h = static_cast<size_t>(t.k);
  h = hash_mix(h, static_cast<size_t>(t.bop));
  h = hash_mix(h, static_cast<size_t>(t.uop));
  h = hash_mix(h, t.idx);
  h = hash_mix(h, t.sym);
  if (t.k == Term::K::Lit) h = hash_mix(h, value_hash(t.lit));
  for (const TermPtr& k : t.kids) h = hash_mix(h, k->hash);
  t.hash = h;
  return std::make_shared<const Term>(std::move(t));
}

const char* binop_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "=";
    case BinOp::Le: return "<=";
    case BinOp::Lt: return "<";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
    case BinOp::BitAnd: return "band";
    case BinOp::BitOr: return "bor";
    case BinOp::BitXor: return "bxor";
    case BinOp::Shl: return "shl";
    case BinOp::Shr: return "shr";
    case BinOp::Sra: return "sra";
  }
  return "?";
}

const char* unop_name(UnOp op) {
  switch (op) {
    case UnOp::Not: return "not";
    case UnOp::Wrap32: return "wrap32";
    case UnOp::Signed32: return "signed32";
  }
  return "?";
}

}  // namespace

bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->k != b->k) return false;
  switch (a->k) {
    case Term::K::Var:
      return a->sym == b->sym;
    case Term::K::Lit:
      return a->lit == b->lit;
    case Term::K::Bin:
      if (a->bop != b->bop) return false;
      break;
    case Term::K::Un:
      if (a->uop != b->uop) return false;
      break;
    case Term::K::Tuple:
      break;
    case Term::K::Ctor:
      if (a->sym != b->sym) return false;
      break;
    case Term::K::Proj:
      if (a->idx != b->idx) return false;
      break;
    case Term::K::If:
      break;
    case Term::K::Pred:
      if (a->sym != b->sym) return false;
      break;
  }
  if (a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i) {
    if (!term_eq(a->kids[i], b->kids[i])) return false;
  }
  return true;
}

TermPtr tvar(const std::string& name) { return tvar(intern(name)); }

TermPtr tvar(SymId name) {
  Term t;
  t.k = Term::K::Var;
  t.sym = name;
  return make(std::move(t));
}

TermPtr tlit(Value v) {
  Term t;
  t.k = Term::K::Lit;
  t.lit = std::move(v);
  return make(std::move(t));
}

TermPtr tint(int64_t n) { return tlit(Value::integer(n)); }
TermPtr tbool(bool b) { return tlit(Value::boolean(b)); }
TermPtr tunit() { return tlit(Value::unit()); }
TermPtr tenum(EnumTypeId ty, uint8_t tag) { return tlit(Value::enum_of(ty, tag)); }

TermPtr tbin(BinOp op, TermPtr a, TermPtr b) {
  Term t;
  t.k = Term::K::Bin;
  t.bop = op;
  t.kids = {std::move(a), std::move(b)};
  return make(std::move(t));
}

TermPtr tun(UnOp op, TermPtr a) {
  Term t;
  t.k = Term::K::Un;
  t.uop = op;
  t.kids = {std::move(a)};
  return make(std::move(t));
}

TermPtr ttuple(TermVec kids) {
  Term t;
  t.k = Term::K::Tuple;
  t.kids = std::move(kids);
  return make(std::move(t));
}

TermPtr tctor(SymId tag, TermVec kids) {
  Term t;
  t.k = Term::K::Ctor;
  t.sym = tag;
  t.kids = std::move(kids);
  return make(std::move(t));
}

TermPtr tctor(const std::string& tag, TermVec kids) {
  return tctor(intern(tag), std::move(kids));
}

TermPtr tproj(TermPtr t0, uint32_t idx) {
  Term t;
  t.k = Term::K::Proj;
  t.idx = idx;
  t.kids = {std::move(t0)};
  return make(std::move(t));
}

TermPtr tif(TermPtr c, TermPtr a, TermPtr b) {
  Term t;
  t.k = Term::K::If;
  t.kids = {std::move(c), std::move(a), std::move(b)};
  return make(std::move(t));
}

TermPtr tpred(const std::string& name, TermVec args) {
  Term t;
  t.k = Term::K::Pred;
  t.sym = intern(name);
  t.kids = std::move(args);
  return make(std::move(t));
}

TermPtr tadd(TermPtr a, TermPtr b) { return tbin(BinOp::Add, a, b); }
TermPtr tsub(TermPtr a, TermPtr b) { return tbin(BinOp::Sub, a, b); }
TermPtr teq(TermPtr a, TermPtr b) { return tbin(BinOp::Eq, a, b); }
TermPtr tle(TermPtr a, TermPtr b) { return tbin(BinOp::Le, a, b); }
TermPtr tlt(TermPtr a, TermPtr b) { return tbin(BinOp::Lt, a, b); }
TermPtr tand(TermPtr a, TermPtr b) { return tbin(BinOp::And, a, b); }
TermPtr tor(TermPtr a, TermPtr b) { return tbin(BinOp::Or, a, b); }
TermPtr tnot(TermPtr a) { return tun(UnOp::Not, a); }
TermPtr tne(TermPtr a, TermPtr b) { return tnot(teq(a, b)); }

TermPtr tand_all(const TermVec& ts) {
  if (ts.empty()) return tbool(true);
  TermPtr acc = ts[0];
  for (size_t i = 1; i < ts.size(); ++i) acc = tand(acc, ts[i]);
  return acc;
}

TermPtr tor_all(const TermVec& ts) {
  if (ts.empty()) return tbool(false);
  TermPtr acc = ts[0];
  for (size_t i = 1; i < ts.size(); ++i) acc = tor(acc, ts[i]);
  return acc;
}

std::string term_str(const TermPtr& t) {
  if (!t) return "<null>";
  std::ostringstream os;
  switch (t->k) {
    case Term::K::Var:
      os << sym_name(t->sym);
      break;
    case Term::K::Lit:
      os << t->lit.str();
      break;
    case Term::K::Bin:
      os << "(" << binop_name(t->bop) << " " << term_str(t->kids[0]) << " "
         << term_str(t->kids[1]) << ")";
      break;
    case Term::K::Un:
      os << "(" << unop_name(t->uop) << " " << term_str(t->kids[0]) << ")";
      break;
    case Term::K::Tuple: {
      os << "(tuple";
      for (const auto& k : t->kids) os << " " << term_str(k);
      os << ")";
      break;
    }
    case Term::K::Ctor: {
      os << "(" << sym_name(t->sym);
      for (const auto& k : t->kids) os << " " << term_str(k);
      os << ")";
      break;
    }
    case Term::K::Proj:
      os << "(proj " << term_str(t->kids[0]) << " " << t->idx << ")";
      break;
    case Term::K::If:
      os << "(if " << term_str(t->kids[0]) << " " << term_str(t->kids[1]) << " "
         << term_str(t->kids[2]) << ")";
      break;
    case Term::K::Pred: {
      os << "(" << sym_name(t->sym);
      for (const auto& k : t->kids) os << " " << term_str(k);
      os << ")";
      break;
    }
  }
  return os.str();
}

namespace {

int64_t require_int(const Value& v, const char* who) {
  if (!v.is_int()) throw std::runtime_error(std::string(who) + ": int expected");
  return v.as_int();
}

bool require_bool(const Value& v, const char* who) {
  if (!v.is_bool()) throw std::runtime_error(std::string(who) + ": bool expected");
  return v.as_bool();
}

}  // namespace

Value eval_binop(BinOp op, const Value& a, const Value& b) {
  switch (op) {
    case BinOp::Add:
      return Value::integer(require_int(a, "+") + require_int(b, "+"));
    case BinOp::Sub:
      return Value::integer(require_int(a, "-") - require_int(b, "-"));
    case BinOp::Mul:
      return Value::integer(require_int(a, "*") * require_int(b, "*"));
    case BinOp::Eq:
      return Value::boolean(a == b);
    case BinOp::Le:
      return Value::boolean(require_int(a, "<=") <= require_int(b, "<="));
    case BinOp::Lt:
      return Value::boolean(require_int(a, "<") < require_int(b, "<"));
    case BinOp::And:
      return Value::boolean(require_bool(a, "and") && require_bool(b, "and"));
    case BinOp::Or:
      return Value::boolean(require_bool(a, "or") || require_bool(b, "or"));
    case BinOp::BitAnd:
      return Value::integer(static_cast<int64_t>(
          static_cast<uint64_t>(require_int(a, "band")) &
          static_cast<uint64_t>(require_int(b, "band"))));
    case BinOp::BitOr:
      return Value::integer(static_cast<int64_t>(
          static_cast<uint64_t>(require_int(a, "bor")) |
          static_cast<uint64_t>(require_int(b, "bor"))));
    case BinOp::BitXor:
      return Value::integer(static_cast<int64_t>(
          static_cast<uint64_t>(require_int(a, "bxor")) ^
          static_cast<uint64_t>(require_int(b, "bxor"))));
    case BinOp::Shl:
      return Value::integer(static_cast<int64_t>(
          static_cast<uint64_t>(require_int(a, "shl"))
          << (static_cast<uint64_t>(require_int(b, "shl")) & 63)));
    case BinOp::Shr:
      return Value::integer(static_cast<int64_t>(
          static_cast<uint64_t>(require_int(a, "shr")) >>
          (static_cast<uint64_t>(require_int(b, "shr")) & 63)));
    case BinOp::Sra: {
      int32_t x = static_cast<int32_t>(
          static_cast<uint32_t>(require_int(a, "sra") & 0xFFFFFFFFll));
      int64_t k = require_int(b, "sra") & 31;
      int32_t r = x >> k;
      return Value::integer(static_cast<int64_t>(static_cast<uint32_t>(r)));
    }
  }
  throw std::runtime_error("bad binop");
}

Value eval_unop(UnOp op, const Value& a) {
  switch (op) {
    case UnOp::Not:
      return Value::boolean(!require_bool(a, "not"));
    case UnOp::Wrap32:
      return Value::integer(static_cast<int64_t>(
          static_cast<uint64_t>(require_int(a, "wrap32")) & 0xFFFFFFFFull));
    case UnOp::Signed32:
      return Value::integer(static_cast<int64_t>(static_cast<int32_t>(
          static_cast<uint32_t>(require_int(a, "signed32") & 0xFFFFFFFFll))));
  }
  throw std::runtime_error("bad unop");
}

Value eval_term(const TermPtr& t,
                const std::function<std::optional<Value>(SymId)>& lookup,
                const PurePredTable* preds) {
  switch (t->k) {
    case Term::K::Var: {
      auto v = lookup ? lookup(t->sym) : std::nullopt;
      if (!v) {
        throw std::runtime_error("unbound variable: " + sym_name(t->sym));
      }
      return *v;
    }
    case Term::K::Lit:
      return t->lit;
    case Term::K::Bin: {
      // Short-circuit booleans so guarded subterms stay unevaluated.
      if (t->bop == BinOp::And) {
        Value a = eval_term(t->kids[0], lookup, preds);
        if (!require_bool(a, "and")) return Value::boolean(false);
        return Value::boolean(
            require_bool(eval_term(t->kids[1], lookup, preds), "and"));
      }
      if (t->bop == BinOp::Or) {
        Value a = eval_term(t->kids[0], lookup, preds);
        if (require_bool(a, "or")) return Value::boolean(true);
        return Value::boolean(
            require_bool(eval_term(t->kids[1], lookup, preds), "or"));
      }
      Value a = eval_term(t->kids[0], lookup, preds);
      Value b = eval_term(t->kids[1], lookup, preds);
      return eval_binop(t->bop, a, b);
    }
    case Term::K::Un:
      return eval_unop(t->uop, eval_term(t->kids[0], lookup, preds));
    case Term::K::Tuple: {
      ValueVec vs;
      vs.reserve(t->kids.size());
      for (const auto& k : t->kids) vs.push_back(eval_term(k, lookup, preds));
      return Value::tuple(std::move(vs));
    }
    case Term::K::Ctor: {
      ValueVec vs;
      vs.reserve(t->kids.size());
      for (const auto& k : t->kids) vs.push_back(eval_term(k, lookup, preds));
      return Value::ctor(t->sym, std::move(vs));
    }
    case Term::K::Proj: {
      Value v = eval_term(t->kids[0], lookup, preds);
      if (!v.is_ctor() && !v.is_tuple()) {
        throw std::runtime_error("proj on non-structured value");
      }
      if (t->idx >= v.fields().size()) {
        throw std::runtime_error("proj index out of range");
      }
      return v.fields()[t->idx];
    }
    case Term::K::If: {
      Value c = eval_term(t->kids[0], lookup, preds);
      return eval_term(require_bool(c, "if") ? t->kids[1] : t->kids[2], lookup,
                       preds);
    }
    case Term::K::Pred: {
      if (!preds) throw std::runtime_error("no predicate table");
      auto it = preds->find(sym_name(t->sym));
      if (it == preds->end() || !it->second.eval) {
        throw std::runtime_error("unknown pure predicate: " + sym_name(t->sym));
      }
      ValueVec vs;
      vs.reserve(t->kids.size());
      for (const auto& k : t->kids) vs.push_back(eval_term(k, lookup, preds));
      return it->second.eval(vs);
    }
  }
  throw std::runtime_error("bad term");
}

TermPtr subst_term(const TermPtr& t,
                   const std::unordered_map<SymId, TermPtr>& map) {
  if (map.empty()) return t;
  switch (t->k) {
    case Term::K::Var: {
      auto it = map.find(t->sym);
      return it == map.end() ? t : it->second;
    }
    case Term::K::Lit:
      return t;
    default: {
      bool changed = false;
      TermVec kids;
      kids.reserve(t->kids.size());
      for (const auto& k : t->kids) {
        TermPtr nk = subst_term(k, map);
        changed = changed || nk.get() != k.get();
        kids.push_back(std::move(nk));
      }
      if (!changed) return t;
      Term nt = *t;
      nt.kids = std::move(kids);
      Term fresh;
      fresh.k = nt.k;
      fresh.bop = nt.bop;
      fresh.uop = nt.uop;
      fresh.idx = nt.idx;
      fresh.sym = nt.sym;
      fresh.lit = nt.lit;
      fresh.kids = std::move(nt.kids);
      // Rebuild through the hashing constructor.
      switch (fresh.k) {
        case Term::K::Bin:
          return tbin(fresh.bop, fresh.kids[0], fresh.kids[1]);
        case Term::K::Un:
          return tun(fresh.uop, fresh.kids[0]);
        case Term::K::Tuple:
          return ttuple(std::move(fresh.kids));
        case Term::K::Ctor:
          return tctor(fresh.sym, std::move(fresh.kids));
        case Term::K::Proj:
          return tproj(fresh.kids[0], fresh.idx);
        case Term::K::If:
          return tif(fresh.kids[0], fresh.kids[1], fresh.kids[2]);
        case Term::K::Pred:
          return tpred(sym_name(fresh.sym), std::move(fresh.kids));
        default:
          return t;
      }
    }
  }
}

void collect_vars(const TermPtr& t, std::unordered_set<SymId>& out) {
  if (t->k == Term::K::Var) {
    out.insert(t->sym);
    return;
  }
  for (const auto& k : t->kids) collect_vars(k, out);
}

bool term_is_ground(const TermPtr& t) {
  if (t->k == Term::K::Var) return false;
  for (const auto& k : t->kids) {
    if (!term_is_ground(k)) return false;
  }
  return true;
}

std::optional<Value> term_to_value(const TermPtr& t) {
  switch (t->k) {
    case Term::K::Lit:
      return t->lit;
    case Term::K::Tuple: {
      ValueVec vs;
      for (const auto& k : t->kids) {
        auto v = term_to_value(k);
        if (!v) return std::nullopt;
        vs.push_back(*v);
      }
      return Value::tuple(std::move(vs));
    }
    case Term::K::Ctor: {
      ValueVec vs;
      for (const auto& k : t->kids) {
        auto v = term_to_value(k);
        if (!v) return std::nullopt;
        vs.push_back(*v);
      }
      return Value::ctor(t->sym, std::move(vs));
    }
    default:
      return std::nullopt;
  }
}

TermPtr value_to_term(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Ctor: {
      TermVec kids;
      for (const Value& f : v.fields()) kids.push_back(value_to_term(f));
      return tctor(v.ctor_tag(), std::move(kids));
    }
    case Value::Kind::Tuple: {
      TermVec kids;
      for (const Value& f : v.fields()) kids.push_back(value_to_term(f));
      return ttuple(std::move(kids));
    }
    default:
      return tlit(v);
  }
}

}  // namespace contractile
