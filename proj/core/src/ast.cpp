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

#include "contractile/ast.hpp"

#include <atomic>
#include <stdexcept>
#include <unordered_set>

namespace contractile {

namespace {

std::atomic<int> g_node_counter{1};

StmPtr node(Stm s) {
  s.node_id = g_node_counter.fetch_add(1, std::memory_order_relaxed);
  return std::make_shared<const Stm>(std::move(s));
}

}  // namespace

StmPtr s_lit(Value v) {
  Stm s;
  s.k = Stm::K::Literal;
  s.lit = std::move(v);
  return node(std::move(s));
}

StmPtr s_unit() { return s_lit(Value::unit()); }
StmPtr s_int(int64_t n) { return s_lit(Value::integer(n)); }
StmPtr s_bool(bool b) { return s_lit(Value::boolean(b)); }

StmPtr s_var(const std::string& name) {
  Stm s;
  s.k = Stm::K::Var;
  s.name = intern(name);
  return node(std::move(s));
}

StmPtr s_expr(TermPtr t) {
  Stm s;
  s.k = Stm::K::Expr;
  s.term = std::move(t);
  return node(std::move(s));
}

StmPtr s_let(const std::string& name, StmPtr bound, StmPtr body) {
  Stm s;
  s.k = Stm::K::Let;
  s.name = intern(name);
  s.kids = {std::move(bound), std::move(body)};
  return node(std::move(s));
}

StmPtr s_seq(StmPtr a, StmPtr b) {
  Stm s;
  s.k = Stm::K::Seq;
  s.kids = {std::move(a), std::move(b)};
  return node(std::move(s));
}

StmPtr s_seq(std::vector<StmPtr> stms) {
  if (stms.empty()) return s_unit();
  StmPtr acc = stms.back();
  for (size_t i = stms.size() - 1; i-- > 0;) {
    acc = s_seq(stms[i], acc);
  }
  return acc;
}

StmPtr s_if(StmPtr cond, StmPtr then_s, StmPtr else_s) {
  Stm s;
  s.k = Stm::K::If;
  s.kids = {std::move(cond), std::move(then_s), std::move(else_s)};
  return node(std::move(s));
}

StmPtr s_match(StmPtr scrutinee, std::vector<MatchCase> cases) {
  Stm s;
  s.k = Stm::K::Match;
  s.kids = {std::move(scrutinee)};
  s.cases = std::move(cases);
  return node(std::move(s));
}

StmPtr s_call(const std::string& fn, std::vector<StmPtr> args) {
  Stm s;
  s.k = Stm::K::CallInternal;
  s.name = intern(fn);
  s.kids = std::move(args);
  return node(std::move(s));
}

StmPtr s_callf(const std::string& fn, std::vector<StmPtr> args) {
  Stm s;
  s.k = Stm::K::CallForeign;
  s.name = intern(fn);
  s.kids = std::move(args);
  return node(std::move(s));
}

StmPtr s_lemma(const std::string& lemma, std::vector<StmPtr> args) {
  Stm s;
  s.k = Stm::K::LemmaInvoke;
  s.name = intern(lemma);
  s.kids = std::move(args);
  return node(std::move(s));
}

StmPtr s_assert(StmPtr cond, const std::string& msg) {
  Stm s;
  s.k = Stm::K::Assert;
  s.kids = {std::move(cond)};
  s.msg = msg;
  return node(std::move(s));
}

StmPtr s_fail(const std::string& msg) {
  Stm s;
  s.k = Stm::K::Fail;
  s.msg = msg;
  return node(std::move(s));
}

StmPtr s_read_reg(const std::string& reg) {
  Stm s;
  s.k = Stm::K::ReadReg;
  s.name = intern(reg);
  return node(std::move(s));
}

StmPtr s_write_reg(const std::string& reg, StmPtr v) {
  Stm s;
  s.k = Stm::K::WriteReg;
  s.name = intern(reg);
  s.kids = {std::move(v)};
  return node(std::move(s));
}

StmPtr s_record_get(StmPtr rec, uint32_t field) {
  Stm s;
  s.k = Stm::K::RecordGet;
  s.idx = field;
  s.kids = {std::move(rec)};
  return node(std::move(s));
}

StmPtr s_record_set(StmPtr rec, uint32_t field, StmPtr v) {
  Stm s;
  s.k = Stm::K::RecordSet;
  s.idx = field;
  s.kids = {std::move(rec), std::move(v)};
  return node(std::move(s));
}

StmPtr s_tuple_project(StmPtr tup, uint32_t idx) {
  Stm s;
  s.k = Stm::K::TupleProject;
  s.idx = idx;
  s.kids = {std::move(tup)};
  return node(std::move(s));
}

MatchCase case_ctor(const std::string& tag, std::vector<std::string> binders,
                    StmPtr body) {
  MatchCase c;
  c.pat.k = Pattern::K::Ctor;
  c.pat.ctor = intern(tag);
  for (auto& b : binders) c.pat.binders.push_back(intern(b));
  c.body = std::move(body);
  return c;
}

MatchCase case_enum(EnumTypeId type, uint8_t tag, StmPtr body) {
  MatchCase c;
  c.pat.k = Pattern::K::EnumTag;
  c.pat.enum_type = type;
  c.pat.enum_tag = tag;
  c.body = std::move(body);
  return c;
}

MatchCase case_int(int64_t n, StmPtr body) {
  MatchCase c;
  c.pat.k = Pattern::K::IntLit;
  c.pat.int_lit = n;
  c.body = std::move(body);
  return c;
}

MatchCase case_default(StmPtr body) {
  MatchCase c;
  c.pat.k = Pattern::K::Default;
  c.body = std::move(body);
  return c;
}

void Program::add_internal(const std::string& name,
                           std::vector<std::string> params, StmPtr body) {
  FunctionDecl fn;
  fn.name = intern(name);
  for (auto& p : params) fn.params.push_back(intern(p));
  fn.foreign = false;
  fn.body = std::move(body);
  add(std::move(fn));
}

void Program::add_foreign(const std::string& name, size_t arity) {
  FunctionDecl fn;
  fn.name = intern(name);
  for (size_t i = 0; i < arity; ++i) {
    fn.params.push_back(intern("a" + std::to_string(i)));
  }
  fn.foreign = true;
  add(std::move(fn));
}

namespace {

struct WfCtx {
  const Program* p;
  std::vector<Diagnostic>* out;
};

void check_stm(WfCtx& ctx, const StmPtr& s,
               std::unordered_set<SymId>& scope) {
  switch (s->k) {
    case Stm::K::Literal:
      return;
    case Stm::K::Var:
      if (!scope.count(s->name)) {
        ctx.out->push_back(
            {s->node_id, "unbound variable: " + sym_name(s->name)});
      }
      return;
    case Stm::K::Expr: {
      std::unordered_set<SymId> vars;
      collect_vars(s->term, vars);
      for (SymId v : vars) {
        if (!scope.count(v)) {
          ctx.out->push_back(
              {s->node_id, "unbound variable: " + sym_name(v)});
        }
      }
      return;
    }
    case Stm::K::Let: {
      check_stm(ctx, s->kids[0], scope);
      bool inserted = scope.insert(s->name).second;
      check_stm(ctx, s->kids[1], scope);
      if (inserted) scope.erase(s->name);
      return;
    }
    case Stm::K::Seq:
    case Stm::K::If:
      for (const auto& k : s->kids) check_stm(ctx, k, scope);
      return;
    case Stm::K::Match: {
      check_stm(ctx, s->kids[0], scope);
      for (const auto& c : s->cases) {
        std::vector<SymId> added;
        for (SymId b : c.pat.binders) {
          if (scope.insert(b).second) added.push_back(b);
        }
        check_stm(ctx, c.body, scope);
        for (SymId b : added) scope.erase(b);
      }
      return;
    }
    case Stm::K::CallInternal:
    case Stm::K::CallForeign: {
      for (const auto& k : s->kids) check_stm(ctx, k, scope);
      auto it = ctx.p->functions.find(s->name);
      if (it == ctx.p->functions.end()) {
        ctx.out->push_back(
            {s->node_id, "call to unknown function: " + sym_name(s->name)});
        return;
      }
      if (it->second.params.size() != s->kids.size()) {
        ctx.out->push_back({s->node_id,
                            "arity mismatch calling " + sym_name(s->name)});
      }
      if (s->k == Stm::K::CallForeign && !it->second.foreign) {
        ctx.out->push_back(
            {s->node_id, sym_name(s->name) + " is not foreign"});
      }
      if (s->k == Stm::K::CallInternal && it->second.foreign) {
        ctx.out->push_back(
            {s->node_id, sym_name(s->name) + " is foreign, not internal"});
      }
      return;
    }
    case Stm::K::LemmaInvoke:
      for (const auto& k : s->kids) check_stm(ctx, k, scope);
      if (!ctx.p->lemma_names.count(s->name)) {
        ctx.out->push_back(
            {s->node_id, "unknown lemma: " + sym_name(s->name)});
      }
      return;
    case Stm::K::Assert:
    case Stm::K::WriteReg:
    case Stm::K::RecordGet:
    case Stm::K::RecordSet:
    case Stm::K::TupleProject:
      for (const auto& k : s->kids) check_stm(ctx, k, scope);
      return;
    case Stm::K::Fail:
    case Stm::K::ReadReg:
      return;
  }
}

bool is_call_to(const StmPtr& s, const char* fn) {
  return s->k == Stm::K::CallInternal && s->kids.empty() &&
         s->name == intern(fn);
}

}  // namespace

std::vector<Diagnostic> check_wellformed(const Program& p) {
  std::vector<Diagnostic> out;
  WfCtx ctx{&p, &out};
  for (const auto& [name, fn] : p.functions) {
    if (fn.foreign) {
      if (fn.body) {
        out.push_back({0, "foreign function " + sym_name(name) +
                              " must not have a body"});
      }
      continue;
    }
    if (!fn.body) {
      out.push_back({0, "internal function " + sym_name(name) +
                            " is missing a body"});
      continue;
    }
    std::unordered_set<SymId> scope(fn.params.begin(), fn.params.end());
    check_stm(ctx, fn.body, scope);
  }
  // Entry-point shape: fdeCycle() = { fdeStep(); fdeCycle() }.
  auto it = p.functions.find(intern("fdeCycle"));
  if (it == p.functions.end()) {
    out.push_back({0, "fdeCycle shape: fdeCycle is not defined"});
  } else {
    const StmPtr& body = it->second.body;
    bool ok = body && body->k == Stm::K::Seq &&
              is_call_to(body->kids[0], "fdeStep") &&
              is_call_to(body->kids[1], "fdeCycle");
    if (!ok) {
      out.push_back({body ? body->node_id : 0,
                     "fdeCycle shape: body must be fdeStep(); fdeCycle()"});
    }
  }
  if (!p.functions.count(intern("fdeStep"))) {
    out.push_back({0, "fdeStep is not defined"});
  }
  return out;
}

const FunctionDecl* lookup_function(const Program& p, const std::string& name) {
  auto it = p.functions.find(intern(name));
  return it == p.functions.end() ? nullptr : &it->second;
}

const FunctionDecl& lookup_function_or_throw(const Program& p,
                                             const std::string& name) {
  const FunctionDecl* fn = lookup_function(p, name);
  if (!fn) throw std::runtime_error("function not found: " + name);
  return *fn;
}

std::string fresh_name(const std::set<std::string>& used) {
  for (uint64_t i = 0;; ++i) {
    std::string candidate = "v" + std::to_string(i);
    if (!used.count(candidate)) return candidate;
  }
}

}  // namespace contractile
