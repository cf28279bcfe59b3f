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

#include "contractile/machine.hpp"

#include <sstream>
#include <stdexcept>

namespace contractile {

MachineState MachineState::make_bytes(const RegTable* t, int64_t size) {
  MachineState s;
  s.reg_table = t;
  s.regs.assign(t->names.size(), Value::integer(0));
  s.mem_kind = MemKind::Bytes;
  s.mem_size = size;
  s.bytes.assign(static_cast<size_t>(size), 0);
  return s;
}

MachineState MachineState::make_words(const RegTable* t, int64_t size) {
  MachineState s;
  s.reg_table = t;
  s.regs.assign(t->names.size(), Value::integer(0));
  s.mem_kind = MemKind::Words;
  s.mem_size = size;
  s.words.assign(static_cast<size_t>(size),
                 Value::ctor(intern("w_int"), {Value::integer(0)}));
  return s;
}

uint32_t MachineState::load_word_le(int64_t a) const {
  return static_cast<uint32_t>(bytes[a]) |
         (static_cast<uint32_t>(bytes[a + 1]) << 8) |
         (static_cast<uint32_t>(bytes[a + 2]) << 16) |
         (static_cast<uint32_t>(bytes[a + 3]) << 24);
}

void MachineState::store_word_le(int64_t a, uint32_t w) {
  bytes[a] = static_cast<uint8_t>(w);
  bytes[a + 1] = static_cast<uint8_t>(w >> 8);
  bytes[a + 2] = static_cast<uint8_t>(w >> 16);
  bytes[a + 3] = static_cast<uint8_t>(w >> 24);
}

Interp::Interp(const Program& prog, const ForeignTable& foreign,
               const PurePredTable& preds, MachineState& state)
    : prog_(prog), foreign_(foreign), preds_(preds), state_(state) {}

ExecResult Interp::eval_expr(const TermPtr& t, Env& env) {
  try {
    Value v = eval_term(
        t,
        [&env](SymId name) -> std::optional<Value> {
          const Value* v = env.find(name);
          if (!v) return std::nullopt;
          return *v;
        },
        &preds_);
    return ExecResult::ok(std::move(v));
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("expression evaluation: ") + e.what());
  }
}

ExecResult Interp::exec(const StmPtr& s, Env& env) {
  switch (s->k) {
    case Stm::K::Literal:
      return ExecResult::ok(s->lit);
    case Stm::K::Var: {
      const Value* v = env.find(s->name);
      if (!v) throw std::runtime_error("unbound var: " + sym_name(s->name));
      return ExecResult::ok(*v);
    }
    case Stm::K::Expr:
      return eval_expr(s->term, env);
    case Stm::K::Let: {
      ExecResult bound = exec(s->kids[0], env);
      if (bound.failed) return bound;
      env.push(s->name, std::move(bound.value));
      ExecResult r = exec(s->kids[1], env);
      env.pop(1);
      return r;
    }
    case Stm::K::Seq: {
      ExecResult a = exec(s->kids[0], env);
      if (a.failed) return a;
      return exec(s->kids[1], env);
    }
    case Stm::K::If: {
      ExecResult c = exec(s->kids[0], env);
      if (c.failed) return c;
      if (!c.value.is_bool()) throw std::runtime_error("if: bool expected");
      return exec(c.value.as_bool() ? s->kids[1] : s->kids[2], env);
    }
    case Stm::K::Match: {
      ExecResult scrut = exec(s->kids[0], env);
      if (scrut.failed) return scrut;
      const Value& v = scrut.value;
      for (const auto& c : s->cases) {
        switch (c.pat.k) {
          case Pattern::K::Ctor:
            if (v.is_ctor() && v.ctor_tag() == c.pat.ctor) {
              const ValueVec& fs = v.fields();
              if (fs.size() != c.pat.binders.size()) {
                throw std::runtime_error("pattern arity mismatch");
              }
              for (size_t i = 0; i < fs.size(); ++i) {
                env.push(c.pat.binders[i], fs[i]);
              }
              ExecResult r = exec(c.body, env);
              env.pop(fs.size());
              return r;
            }
            break;
          case Pattern::K::EnumTag:
            if (v.is_enum() && v.enum_type() == c.pat.enum_type &&
                v.enum_tag() == c.pat.enum_tag) {
              return exec(c.body, env);
            }
            break;
          case Pattern::K::IntLit:
            if (v.is_int() && v.as_int() == c.pat.int_lit) {
              return exec(c.body, env);
            }
            break;
          case Pattern::K::Default:
            return exec(c.body, env);
        }
      }
      return ExecResult::fail("match: no case for " + v.str());
    }
    case Stm::K::CallInternal: {
      auto it = prog_.functions.find(s->name);
      if (it == prog_.functions.end() || it->second.foreign) {
        throw std::runtime_error("bad internal call: " + sym_name(s->name));
      }
      const FunctionDecl& fn = it->second;
      ValueVec args;
      args.reserve(s->kids.size());
      for (const auto& a : s->kids) {
        ExecResult r = exec(a, env);
        if (r.failed) return r;
        args.push_back(std::move(r.value));
      }
      Env callee;
      for (size_t i = 0; i < fn.params.size(); ++i) {
        callee.push(fn.params[i], std::move(args[i]));
      }
      return exec(fn.body, callee);
    }
    case Stm::K::CallForeign: {
      auto it = foreign_.find(s->name);
      if (it == foreign_.end()) {
        throw std::runtime_error("unresolved foreign: " + sym_name(s->name));
      }
      ValueVec args;
      args.reserve(s->kids.size());
      for (const auto& a : s->kids) {
        ExecResult r = exec(a, env);
        if (r.failed) return r;
        args.push_back(std::move(r.value));
      }
      return it->second.run(state_, args);
    }
    case Stm::K::LemmaInvoke: {
      // Ghost statement: argument evaluation only, no state effect.
      for (const auto& a : s->kids) {
        ExecResult r = exec(a, env);
        if (r.failed) return r;
      }
      return ExecResult::ok(Value::unit());
    }
    case Stm::K::Assert: {
      ExecResult c = exec(s->kids[0], env);
      if (c.failed) return c;
      if (!c.value.is_bool()) throw std::runtime_error("assert: bool expected");
      if (!c.value.as_bool()) {
        return ExecResult::fail(s->msg.empty() ? "assertion failed" : s->msg);
      }
      return ExecResult::ok(Value::unit());
    }
    case Stm::K::Fail:
      return ExecResult::fail(s->msg.empty() ? "fail" : s->msg);
    case Stm::K::ReadReg: {
      int idx = state_.reg_table->at(s->name);
      return ExecResult::ok(state_.reg(idx));
    }
    case Stm::K::WriteReg: {
      ExecResult v = exec(s->kids[0], env);
      if (v.failed) return v;
      int idx = state_.reg_table->at(s->name);
      state_.reg(idx) = std::move(v.value);
      return ExecResult::ok(Value::unit());
    }
    case Stm::K::RecordGet: {
      ExecResult r = exec(s->kids[0], env);
      if (r.failed) return r;
      if (!r.value.is_ctor() || s->idx >= r.value.fields().size()) {
        throw std::runtime_error("record get out of range");
      }
      return ExecResult::ok(r.value.fields()[s->idx]);
    }
    case Stm::K::RecordSet: {
      ExecResult r = exec(s->kids[0], env);
      if (r.failed) return r;
      ExecResult v = exec(s->kids[1], env);
      if (v.failed) return v;
      if (!r.value.is_ctor() || s->idx >= r.value.fields().size()) {
        throw std::runtime_error("record set out of range");
      }
      ValueVec fs = r.value.fields();
      fs[s->idx] = std::move(v.value);
      return ExecResult::ok(Value::ctor(r.value.ctor_tag(), std::move(fs)));
    }
    case Stm::K::TupleProject: {
      ExecResult r = exec(s->kids[0], env);
      if (r.failed) return r;
      if (!r.value.is_tuple() || s->idx >= r.value.fields().size()) {
        throw std::runtime_error("tuple projection out of range");
      }
      return ExecResult::ok(r.value.fields()[s->idx]);
    }
  }
  throw std::runtime_error("bad statement");
}

ExecResult Interp::call(const std::string& fn, const ValueVec& args) {
  const FunctionDecl& decl = lookup_function_or_throw(prog_, fn);
  if (decl.foreign) {
    auto it = foreign_.find(decl.name);
    if (it == foreign_.end()) {
      throw std::runtime_error("unresolved foreign: " + fn);
    }
    return it->second.run(state_, args);
  }
  if (decl.params.size() != args.size()) {
    throw std::runtime_error("arity mismatch calling " + fn);
  }
  Env env;
  for (size_t i = 0; i < decl.params.size(); ++i) {
    env.push(decl.params[i], args[i]);
  }
  return exec(decl.body, env);
}

ExecResult exec_statement(const Program& prog, const ForeignTable& foreign,
                          const PurePredTable& preds, MachineState& state,
                          Env& env, const StmPtr& s) {
  Interp in(prog, foreign, preds, state);
  return in.exec(s, env);
}

Outcome run_fde_step(const Program& prog, const ForeignTable& foreign,
                     const PurePredTable& preds, MachineState& state) {
  Interp in(prog, foreign, preds, state);
  ExecResult r = in.call("fdeStep", {});
  if (r.failed) return Outcome{Outcome::K::Failure, Value::unit(), r.message};
  return Outcome{Outcome::K::Value, std::move(r.value), {}};
}

Outcome run_fde_cycle(const Program& prog, const ForeignTable& foreign,
                      const PurePredTable& preds, MachineState& state,
                      int64_t fuel) {
  Interp in(prog, foreign, preds, state);
  for (int64_t i = 0; i < fuel; ++i) {
    ExecResult r = in.call("fdeStep", {});
    if (r.failed) {
      return Outcome{Outcome::K::Failure, Value::unit(), r.message};
    }
  }
  return Outcome{Outcome::K::OutOfFuel, Value::unit(), {}};
}

namespace {

bool parse_i64(const std::string& tok, int base, int64_t* out) {
  try {
    size_t pos = 0;
    int64_t v = std::stoll(tok, &pos, base);
    if (pos != tok.size()) return false;
    *out = v;
    return true;
  } catch (...) {
    return false;
  }
}

}  // namespace

void load_image(MachineState& state, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string addr_tok;
    if (!(ls >> addr_tok)) continue;  // blank line
    int64_t addr = 0;
    if (!parse_i64(addr_tok, 16, &addr)) {
      throw ImageParseError{lineno, "bad address: " + addr_tok};
    }
    if (state.mem_kind == MachineState::MemKind::Bytes) {
      std::string word_tok;
      if (!(ls >> word_tok)) throw ImageParseError{lineno, "missing word"};
      int64_t w = 0;
      if (!parse_i64(word_tok, 16, &w) || w < 0 || w > 0xFFFFFFFFll) {
        throw ImageParseError{lineno, "bad word: " + word_tok};
      }
      std::string extra;
      if (ls >> extra) throw ImageParseError{lineno, "trailing tokens"};
      if (addr < 0 || addr + 4 > state.mem_size) {
        throw ImageParseError{lineno, "address out of range"};
      }
      state.store_word_le(addr, static_cast<uint32_t>(w));
    } else {
      std::string kind;
      if (!(ls >> kind)) throw ImageParseError{lineno, "missing entry kind"};
      if (!state.in_range(addr)) {
        throw ImageParseError{lineno, "address out of range"};
      }
      if (kind == "int") {
        std::string v_tok;
        if (!(ls >> v_tok)) throw ImageParseError{lineno, "missing value"};
        int64_t v = 0;
        if (!parse_i64(v_tok, 10, &v)) {
          throw ImageParseError{lineno, "bad value: " + v_tok};
        }
        state.words[static_cast<size_t>(addr)] =
            Value::ctor(intern("w_int"), {Value::integer(v)});
      } else if (kind == "cap") {
        std::string perm_tok;
        if (!(ls >> perm_tok)) throw ImageParseError{lineno, "missing perm"};
        uint8_t tag;
        if (perm_tok == "O") tag = kPermO;
        else if (perm_tok == "R") tag = kPermR;
        else if (perm_tok == "RW") tag = kPermRW;
        else if (perm_tok == "E") tag = kPermE;
        else throw ImageParseError{lineno, "bad perm: " + perm_tok};
        int64_t b = 0, e = 0, a = 0;
        std::string tb, te, ta;
        if (!(ls >> tb >> te >> ta) || !parse_i64(tb, 10, &b) ||
            !parse_i64(te, 10, &e) || !parse_i64(ta, 10, &a)) {
          throw ImageParseError{lineno, "bad capability fields"};
        }
        state.words[static_cast<size_t>(addr)] = Value::ctor(
            intern("w_cap"), {perm_value(static_cast<PermTag>(tag)),
                              Value::integer(b), Value::integer(e),
                              Value::integer(a)});
      } else {
        throw ImageParseError{lineno, "bad entry kind: " + kind};
      }
      std::string extra;
      if (ls >> extra) throw ImageParseError{lineno, "trailing tokens"};
    }
  }
}

}  // namespace contractile
