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

#include "contractile/minimalcaps.hpp"

#include <deque>
#include <set>
#include <stdexcept>

namespace contractile::mc {

namespace {

constexpr int kOpFail = 0;
constexpr int kOpHalt = 1;
constexpr int kOpStore = 2;
constexpr int kOpLoad = 3;
constexpr int kOpJalr = 4;
constexpr int kOpMove = 5;
constexpr int kOpLea = 6;
constexpr int kOpRestrict = 7;
constexpr int kOpSubseg = 8;
constexpr int kOpAdd = 9;
constexpr int kOpAddI = 10;
constexpr int kOpBnez = 11;

Value reg_val(uint8_t r) { return Value::enum_of(Enums::mcreg(), r); }

Value instr(const char* tag, ValueVec fields) {
  return Value::ctor(intern(tag), std::move(fields));
}

// 9-bit two's-complement immediate field.
int64_t imm_field(int64_t imm) { return imm & 0x1FF; }

}  // namespace

bool subperm(PermTag p, PermTag q) {
  if (p == kPermO) return true;
  if (p == q) return true;
  if (p == kPermR && q == kPermRW) return true;
  return false;
}

bool within_bounds(const Capability& c) {
  return c.begin <= c.cursor && c.cursor <= c.end;
}

Value int_word(int64_t z) { return instr("w_int", {Value::integer(z)}); }

Value cap_word(const Capability& c) {
  return instr("w_cap", {perm_value(c.perm), Value::integer(c.begin),
                         Value::integer(c.end), Value::integer(c.cursor)});
}

std::optional<Capability> as_cap(const Value& w) {
  if (!w.is_ctor() || w.ctor_tag() != intern("w_cap")) return std::nullopt;
  const ValueVec& f = w.fields();
  Capability c;
  c.perm = static_cast<PermTag>(f[0].enum_tag());
  c.begin = f[1].as_int();
  c.end = f[2].as_int();
  c.cursor = f[3].as_int();
  return c;
}

std::optional<int64_t> as_int(const Value& w) {
  if (!w.is_ctor() || w.ctor_tag() != intern("w_int")) return std::nullopt;
  return w.fields()[0].as_int();
}

Value i_fail() { return instr("FailInstr", {}); }
Value i_halt() { return instr("Halt", {}); }
Value i_store(uint8_t rs, uint8_t rb, int64_t imm) {
  return instr("Store", {reg_val(rs), reg_val(rb), Value::integer(imm)});
}
Value i_load(uint8_t rd, uint8_t rb, int64_t imm) {
  return instr("Load", {reg_val(rd), reg_val(rb), Value::integer(imm)});
}
Value i_jalr(uint8_t rd, uint8_t rs) {
  return instr("Jalr", {reg_val(rd), reg_val(rs)});
}
Value i_move(uint8_t rd, uint8_t rs) {
  return instr("Move", {reg_val(rd), reg_val(rs)});
}
Value i_lea(uint8_t rd, int64_t imm) {
  return instr("Lea", {reg_val(rd), Value::integer(imm)});
}
Value i_restrict(uint8_t rd, uint8_t perm_code) {
  return instr("Restrict", {reg_val(rd), Value::integer(perm_code)});
}
Value i_subseg(uint8_t rd, uint8_t r1, uint8_t r2) {
  return instr("Subseg", {reg_val(rd), reg_val(r1), reg_val(r2)});
}
Value i_add(uint8_t rd, uint8_t r1, uint8_t r2) {
  return instr("Add", {reg_val(rd), reg_val(r1), reg_val(r2)});
}
Value i_addi(uint8_t rd, uint8_t rs, int64_t imm) {
  return instr("AddI", {reg_val(rd), reg_val(rs), Value::integer(imm)});
}
Value i_bnez(uint8_t rs, int64_t imm) {
  return instr("Bnez", {reg_val(rs), Value::integer(imm)});
}

Value decode_mc(int64_t w) {
  if (w < 0 || w >= (1ll << 19)) return i_fail();
  int op = static_cast<int>(w & 0xF);
  uint8_t a = static_cast<uint8_t>((w >> 4) & 3);
  uint8_t b = static_cast<uint8_t>((w >> 6) & 3);
  uint8_t c = static_cast<uint8_t>((w >> 8) & 3);
  int64_t raw = (w >> 10) & 0x1FF;
  int64_t imm = raw >= 256 ? raw - 512 : raw;
  switch (op) {
    case kOpFail: return i_fail();
    case kOpHalt: return i_halt();
    case kOpStore: return i_store(a, b, imm);
    case kOpLoad: return i_load(a, b, imm);
    case kOpJalr: return i_jalr(a, b);
    case kOpMove: return i_move(a, b);
    case kOpLea: return i_lea(a, imm);
    case kOpRestrict:
      if (b > 2) return i_fail();  // only O/R/RW are valid targets
      return i_restrict(a, b);
    case kOpSubseg: return i_subseg(a, b, c);
    case kOpAdd: return i_add(a, b, c);
    case kOpAddI: return i_addi(a, b, imm);
    case kOpBnez: return i_bnez(a, imm);
    default: return i_fail();
  }
}

int64_t encode_mc(const Value& v) {
  if (!v.is_ctor()) throw std::runtime_error("encode_mc: not an instruction");
  auto pack = [](int op, int64_t a = 0, int64_t b = 0, int64_t c = 0,
                 int64_t imm = 0) {
    if (imm < -256 || imm > 255) {
      throw std::runtime_error("encode_mc: immediate out of range");
    }
    return static_cast<int64_t>(op) | (a << 4) | (b << 6) | (c << 8) |
           (imm_field(imm) << 10);
  };
  const std::string& tag = sym_name(v.ctor_tag());
  const ValueVec& f = v.fields();
  auto r = [&f](size_t i) { return static_cast<int64_t>(f[i].enum_tag()); };
  if (tag == "FailInstr") return pack(kOpFail);
  if (tag == "Halt") return pack(kOpHalt);
  if (tag == "Store") return pack(kOpStore, r(0), r(1), 0, f[2].as_int());
  if (tag == "Load") return pack(kOpLoad, r(0), r(1), 0, f[2].as_int());
  if (tag == "Jalr") return pack(kOpJalr, r(0), r(1));
  if (tag == "Move") return pack(kOpMove, r(0), r(1));
  if (tag == "Lea") return pack(kOpLea, r(0), 0, 0, f[1].as_int());
  if (tag == "Restrict") return pack(kOpRestrict, r(0), f[1].as_int());
  if (tag == "Subseg") return pack(kOpSubseg, r(0), r(1), r(2));
  if (tag == "Add") return pack(kOpAdd, r(0), r(1), r(2));
  if (tag == "AddI") return pack(kOpAddI, r(0), r(1), 0, f[2].as_int());
  if (tag == "Bnez") return pack(kOpBnez, r(0), 0, 0, f[1].as_int());
  throw std::runtime_error("encode_mc: unknown instruction " + tag);
}

// ---------------------------------------------------------------------------
// Program construction
// ---------------------------------------------------------------------------

namespace {

const char* kGpr[4] = {"r0", "r1", "r2", "r3"};

TermPtr tperm(PermTag p) { return tenum(Enums::perm(), p); }

TermPtr wcap_t(TermPtr p, TermPtr b, TermPtr e, TermPtr a) {
  return tctor("w_cap",
               {std::move(p), std::move(b), std::move(e), std::move(a)});
}

TermPtr wint_t(TermPtr z) { return tctor("w_int", {std::move(z)}); }

StmPtr expr(TermPtr t) { return s_expr(std::move(t)); }

StmPtr match_gpr(StmPtr scrut, const std::function<StmPtr(int)>& body) {
  std::vector<MatchCase> cases;
  for (uint8_t k = 0; k < 4; ++k) {
    cases.push_back(case_enum(Enums::mcreg(), k, body(k)));
  }
  return s_match(std::move(scrut), std::move(cases));
}

void build_program(Program& p, const BundleOptions& opts) {
  // Register file access; always inlined, so a concrete operand collapses
  // the match to a single ReadReg/WriteReg.
  p.add_internal("read_reg", {"r"},
                 match_gpr(s_var("r"), [](int k) { return s_read_reg(kGpr[k]); }));
  p.add_internal(
      "write_reg", {"r", "w"},
      match_gpr(s_var("r"),
                [](int k) { return s_write_reg(kGpr[k], s_var("w")); }));
  p.add_internal(
      "read_reg_cap", {"r"},
      s_let("w", s_call("read_reg", {s_var("r")}),
            s_match(s_var("w"),
                    {case_ctor("w_cap", {"p", "b", "e", "a"}, s_var("w")),
                     case_ctor("w_int", {"z"},
                               s_fail("expected capability in register"))})));

  p.add_internal(
      "update_pc", {},
      s_let("c", s_read_reg("pc"),
            s_match(s_var("c"),
                    {case_ctor(
                         "w_cap", {"p", "b", "e", "a"},
                         s_let("c2",
                               expr(wcap_t(tvar("p"), tvar("b"), tvar("e"),
                                           tadd(tvar("a"), tint(1)))),
                               s_seq({s_lemma("subperm_not_E",
                                              {expr(tperm(kPermR)), s_var("p")}),
                                      s_lemma("move_cursor",
                                              {s_var("c"), s_var("c2")}),
                                      s_write_reg("pc", s_var("c2"))}))),
                     case_ctor("w_int", {"z"},
                               s_fail("pc does not hold a capability"))})));

  p.add_internal(
      "fetch", {},
      s_let(
          "c", s_read_reg("pc"),
          s_match(
              s_var("c"),
              {case_ctor(
                   "w_cap", {"p", "b", "e", "a"},
                   s_seq({s_assert(
                              expr(tpred("subperm", {tperm(kPermR), tvar("p")})),
                              "fetch requires read authority"),
                          s_assert(expr(tpred("within_bounds", {tvar("c")})),
                                   "fetch requires cursor in bounds"),
                          s_callf("read_mem", {s_var("c")})})),
               case_ctor("w_int", {"z"},
                         s_fail("pc does not hold a capability"))})));

  // Execution clauses, one per instruction.
  {
    std::vector<StmPtr> store_tail;
    store_tail.push_back(
        s_lemma("subperm_not_E", {expr(tperm(kPermRW)), s_var("p")}));
    if (!opts.omit_store_move_cursor) {
      store_tail.push_back(s_lemma("move_cursor", {s_var("bc"), s_var("c")}));
    }
    store_tail.push_back(s_callf("write_mem", {s_var("c"), s_var("w")}));
    store_tail.push_back(s_call("update_pc", {}));

    std::vector<StmPtr> store_body;
    if (!opts.omit_store_write_check) {
      store_body.push_back(
          s_assert(expr(tpred("subperm", {tperm(kPermRW), tvar("p")})),
                   "store requires write permission"));
    }
    store_body.push_back(s_let("w", s_call("read_reg", {s_var("rs")}),
                               s_seq(store_tail)));
    p.add_internal(
        "exec_store", {"rs", "rb", "imm"},
        s_let("bc", s_call("read_reg_cap", {s_var("rb")}),
              s_match(s_var("bc"),
                      {case_ctor("w_cap", {"p", "b", "e", "a"},
                                 s_let("c",
                                       expr(wcap_t(tvar("p"), tvar("b"),
                                                   tvar("e"),
                                                   tadd(tvar("a"),
                                                        tvar("imm")))),
                                       s_seq(store_body)))})));
  }

  p.add_internal(
      "exec_load", {"rd", "rb", "imm"},
      s_let(
          "bc", s_call("read_reg_cap", {s_var("rb")}),
          s_match(
              s_var("bc"),
              {case_ctor(
                  "w_cap", {"p", "b", "e", "a"},
                  s_let(
                      "c",
                      expr(wcap_t(tvar("p"), tvar("b"), tvar("e"),
                                  tadd(tvar("a"), tvar("imm")))),
                      s_seq(
                          {s_assert(expr(tpred("subperm",
                                               {tperm(kPermR), tvar("p")})),
                                    "load requires read permission"),
                           s_lemma("subperm_not_E",
                                   {expr(tperm(kPermR)), s_var("p")}),
                           s_lemma("move_cursor", {s_var("bc"), s_var("c")}),
                           s_let("w", s_callf("read_mem", {s_var("c")}),
                                 s_seq(s_call("write_reg",
                                              {s_var("rd"), s_var("w")}),
                                       s_call("update_pc", {})))})))})));

  {
    // Jump target installation: enter capabilities are unsealed to R.
    StmPtr enter_case =
        s_let("t", expr(wcap_t(tperm(kPermR), tvar("b"), tvar("e"), tvar("a"))),
              s_seq(s_lemma("enter_cap_safe", {s_var("w"), s_var("t")}),
                    s_write_reg("pc", s_var("t"))));
    StmPtr install_target = s_match(
        s_var("w"),
        {case_ctor("w_int", {"z"}, s_write_reg("pc", s_var("w"))),
         case_ctor("w_cap", {"p", "b", "e", "a"},
                   s_match(s_var("p"),
                           {case_enum(Enums::perm(), kPermE, enter_case),
                            case_default(s_write_reg("pc", s_var("w")))}))});
    StmPtr link_then_jump = s_let(
        "link", expr(wint_t(tadd(tvar("pa"), tint(1)))),
        s_seq({s_lemma("int_safe", {expr(tadd(tvar("pa"), tint(1)))}),
               s_call("write_reg", {s_var("rd"), s_var("link")}),
               install_target}));
    p.add_internal(
        "exec_jalr", {"rd", "rs"},
        s_let("w", s_call("read_reg", {s_var("rs")}),
              s_let("pcv", s_read_reg("pc"),
                    s_match(s_var("pcv"),
                            {case_ctor("w_cap", {"pp", "pb", "pe", "pa"},
                                       link_then_jump)}))));
  }

  p.add_internal(
      "exec_move", {"rd", "rs"},
      s_let("w", s_call("read_reg", {s_var("rs")}),
            s_seq(s_call("write_reg", {s_var("rd"), s_var("w")}),
                  s_call("update_pc", {}))));

  p.add_internal(
      "exec_lea", {"rd", "imm"},
      s_let(
          "bc", s_call("read_reg_cap", {s_var("rd")}),
          s_match(
              s_var("bc"),
              {case_ctor(
                  "w_cap", {"p", "b", "e", "a"},
                  s_seq({s_assert(expr(tnot(teq(tvar("p"), tperm(kPermE)))),
                                  "lea on enter capability"),
                         s_let("c",
                               expr(wcap_t(tvar("p"), tvar("b"), tvar("e"),
                                           tadd(tvar("a"), tvar("imm")))),
                               s_seq({s_lemma("move_cursor",
                                              {s_var("bc"), s_var("c")}),
                                      s_call("write_reg",
                                             {s_var("rd"), s_var("c")}),
                                      s_call("update_pc", {})}))}))})));

  {
    auto restrict_to = [](PermTag q) {
      return s_seq(
          {s_assert(expr(tpred("subperm", {tperm(q), tvar("p")})),
                    "restrict must narrow the permission"),
           s_let("c", expr(wcap_t(tperm(q), tvar("b"), tvar("e"), tvar("a"))),
                 s_seq({s_lemma("narrow_safe", {s_var("bc"), s_var("c")}),
                        s_call("write_reg", {s_var("rd"), s_var("c")}),
                        s_call("update_pc", {})}))});
    };
    p.add_internal(
        "exec_restrict", {"rd", "code"},
        s_let("bc", s_call("read_reg_cap", {s_var("rd")}),
              s_match(s_var("bc"),
                      {case_ctor(
                          "w_cap", {"p", "b", "e", "a"},
                          s_match(s_var("code"),
                                  {case_int(0, restrict_to(kPermO)),
                                   case_int(1, restrict_to(kPermR)),
                                   case_int(2, restrict_to(kPermRW)),
                                   case_default(
                                       s_fail("invalid permission code"))}))})));
  }

  {
    StmPtr narrow = s_seq(
        {s_assert(expr(tnot(teq(tvar("p"), tperm(kPermE)))),
                  "subseg on enter capability"),
         s_assert(expr(tand(tle(tvar("b"), tvar("nb")),
                            tle(tvar("ne"), tvar("e")))),
                  "subseg must narrow range"),
         s_let("c", expr(wcap_t(tvar("p"), tvar("nb"), tvar("ne"), tvar("a"))),
               s_seq({s_lemma("narrow_safe", {s_var("bc"), s_var("c")}),
                      s_call("write_reg", {s_var("rd"), s_var("c")}),
                      s_call("update_pc", {})}))});
    StmPtr bounds = s_let(
        "w1", s_call("read_reg", {s_var("r1")}),
        s_match(s_var("w1"),
                {case_ctor("w_int", {"nb"},
                           s_let("w2", s_call("read_reg", {s_var("r2")}),
                                 s_match(s_var("w2"),
                                         {case_ctor("w_int", {"ne"},
                                                    narrow)})))}));
    p.add_internal(
        "exec_subseg", {"rd", "r1", "r2"},
        s_let("bc", s_call("read_reg_cap", {s_var("rd")}),
              s_match(s_var("bc"),
                      {case_ctor("w_cap", {"p", "b", "e", "a"}, bounds)})));
  }

  // rd := z1 + z2, register/register and register/immediate forms.
  p.add_internal(
      "exec_add", {"rd", "r1", "r2"},
      s_let(
          "w1", s_call("read_reg", {s_var("r1")}),
          s_match(
              s_var("w1"),
              {case_ctor(
                  "w_int", {"z1"},
                  s_let(
                      "w2", s_call("read_reg", {s_var("r2")}),
                      s_match(
                          s_var("w2"),
                          {case_ctor(
                              "w_int", {"z2"},
                              s_let("sum", expr(tadd(tvar("z1"), tvar("z2"))),
                                    s_seq({s_lemma("int_safe", {s_var("sum")}),
                                           s_call("write_reg",
                                                  {s_var("rd"),
                                                   expr(wint_t(tvar("sum")))}),
                                           s_call("update_pc", {})})))})))})));
  p.add_internal(
      "exec_addi", {"rd", "rs", "imm"},
      s_let(
          "w1", s_call("read_reg", {s_var("rs")}),
          s_match(s_var("w1"),
                  {case_ctor(
                      "w_int", {"z1"},
                      s_let("sum", expr(tadd(tvar("z1"), tvar("imm"))),
                            s_seq({s_lemma("int_safe", {s_var("sum")}),
                                   s_call("write_reg",
                                          {s_var("rd"),
                                           expr(wint_t(tvar("sum")))}),
                                   s_call("update_pc", {})})))})));

  p.add_internal(
      "exec_bnez", {"rs", "imm"},
      s_let(
          "w", s_call("read_reg", {s_var("rs")}),
          s_match(
              s_var("w"),
              {case_ctor(
                  "w_int", {"z"},
                  s_if(expr(teq(tvar("z"), tint(0))), s_call("update_pc", {}),
                       s_let(
                           "pcv", s_read_reg("pc"),
                           s_match(
                               s_var("pcv"),
                               {case_ctor(
                                   "w_cap", {"p", "b", "e", "a"},
                                   s_let(
                                       "c",
                                       expr(wcap_t(tvar("p"), tvar("b"),
                                                   tvar("e"),
                                                   tadd(tvar("a"),
                                                        tvar("imm")))),
                                       s_seq({s_lemma("subperm_not_E",
                                                      {expr(tperm(kPermR)),
                                                       s_var("p")}),
                                              s_lemma("move_cursor",
                                                      {s_var("pcv"),
                                                       s_var("c")}),
                                              s_write_reg(
                                                  "pc", s_var("c"))})))}))))})));

  p.add_internal("exec_fail", {}, s_fail("fail instruction"));
  p.add_internal("exec_halt", {}, s_fail("halt"));

  p.add_internal(
      "execute", {"i"},
      s_match(s_var("i"),
              {case_ctor("Store", {"rs", "rb", "imm"},
                         s_call("exec_store",
                                {s_var("rs"), s_var("rb"), s_var("imm")})),
               case_ctor("Load", {"rd", "rb", "imm"},
                         s_call("exec_load",
                                {s_var("rd"), s_var("rb"), s_var("imm")})),
               case_ctor("Jalr", {"rd", "rs"},
                         s_call("exec_jalr", {s_var("rd"), s_var("rs")})),
               case_ctor("Move", {"rd", "rs"},
                         s_call("exec_move", {s_var("rd"), s_var("rs")})),
               case_ctor("Lea", {"rd", "imm"},
                         s_call("exec_lea", {s_var("rd"), s_var("imm")})),
               case_ctor("Restrict", {"rd", "code"},
                         s_call("exec_restrict", {s_var("rd"), s_var("code")})),
               case_ctor("Subseg", {"rd", "r1", "r2"},
                         s_call("exec_subseg",
                                {s_var("rd"), s_var("r1"), s_var("r2")})),
               case_ctor("Add", {"rd", "r1", "r2"},
                         s_call("exec_add",
                                {s_var("rd"), s_var("r1"), s_var("r2")})),
               case_ctor("AddI", {"rd", "rs", "imm"},
                         s_call("exec_addi",
                                {s_var("rd"), s_var("rs"), s_var("imm")})),
               case_ctor("Bnez", {"rs", "imm"},
                         s_call("exec_bnez", {s_var("rs"), s_var("imm")})),
               case_ctor("FailInstr", {}, s_call("exec_fail", {})),
               case_ctor("Halt", {}, s_call("exec_halt", {}))}));

  p.add_internal("fdeStep", {},
                 s_let("w", s_call("fetch", {}),
                       s_let("i", s_callf("decode", {s_var("w")}),
                             s_call("execute", {s_var("i")}))));
  p.add_internal("fdeCycle", {},
                 s_seq(s_call("fdeStep", {}), s_call("fdeCycle", {})));

  p.add_foreign("read_mem", 1);
  p.add_foreign("write_mem", 2);
  p.add_foreign("decode", 1);
}

// ---------------------------------------------------------------------------
// Contracts and lemmas
// ---------------------------------------------------------------------------

AssertionPtr safe_of(TermPtr t) { return a_pred("safe", {std::move(t)}); }

AssertionPtr gpr_safe_part() {
  std::vector<AssertionPtr> parts;
  for (int k = 0; k < 4; ++k) {
    std::string w = std::string("wg") + std::to_string(k);
    parts.push_back(
        a_exists(w, a_star(a_reg(kGpr[k], tvar(w)), safe_of(tvar(w)))));
  }
  return a_star(std::move(parts));
}

AssertionPtr step_post() {
  return a_star(
      a_exists("c_out", a_star(a_reg("pc", tvar("c_out")),
                               a_or(safe_of(tvar("c_out")),
                                    a_pred("exec_safe", {tvar("c_out")})))),
      gpr_safe_part());
}

AssertionPtr readable_pc_part() {
  TermPtr cap = wcap_t(tvar("pp"), tvar("pb"), tvar("pe"), tvar("pa"));
  return a_exists(
      {"pp", "pb", "pe", "pa"},
      a_star({a_reg("pc", cap), safe_of(cap),
              a_pure(tpred("subperm", {tperm(kPermR), tvar("pp")}))}));
}

AssertionPtr clause_pre() {
  return a_star({readable_pc_part(), gpr_safe_part(), a_pred("cycle_hyp", {})});
}

Contract clause_contract(std::vector<std::string> params) {
  Contract c;
  for (auto& s : params) {
    c.params.push_back(intern(s));
    c.logic_vars.push_back(intern(s));
  }
  c.pre = clause_pre();
  c.result = intern("ret");
  c.post = step_post();
  return c;
}

void build_contracts(VerifyConfig& cfg) {
  {
    Contract c;
    c.pre = a_star({a_exists("c_in", a_star(a_reg("pc", tvar("c_in")),
                                            safe_of(tvar("c_in")))),
                    gpr_safe_part(), a_pred("cycle_hyp", {})});
    c.result = intern("ret");
    c.post = step_post();
    cfg.contracts[intern("fdeStep")] = std::move(c);
  }
  {
    Contract c;
    c.pre = a_exists("c_in",
                     a_star(a_reg("pc", tvar("c_in")), safe_of(tvar("c_in"))));
    c.result = intern("w_res");
    TermPtr cap = wcap_t(tvar("fp"), tvar("fb"), tvar("fe"), tvar("fa"));
    c.post = a_star(
        a_exists({"fp", "fb", "fe", "fa"},
                 a_star({a_reg("pc", cap), safe_of(cap),
                         a_pure(tpred("subperm",
                                      {tperm(kPermR), tvar("fp")}))})),
        safe_of(tvar("w_res")));
    cfg.contracts[intern("fetch")] = std::move(c);
  }
  {
    Contract c;
    TermPtr cap = wcap_t(tvar("up"), tvar("ub"), tvar("ue"), tvar("ua"));
    c.pre = a_exists(
        {"up", "ub", "ue", "ua"},
        a_star({a_reg("pc", cap), safe_of(cap),
                a_pure(tpred("subperm", {tperm(kPermR), tvar("up")}))}));
    c.result = intern("ret");
    c.post =
        a_exists("uc", a_star(a_reg("pc", tvar("uc")), safe_of(tvar("uc"))));
    cfg.contracts[intern("update_pc")] = std::move(c);
  }

  cfg.contracts[intern("exec_store")] = clause_contract({"rs", "rb", "imm"});
  cfg.contracts[intern("exec_load")] = clause_contract({"rd", "rb", "imm"});
  cfg.contracts[intern("exec_jalr")] = clause_contract({"rd", "rs"});
  cfg.contracts[intern("exec_move")] = clause_contract({"rd", "rs"});
  cfg.contracts[intern("exec_lea")] = clause_contract({"rd", "imm"});
  cfg.contracts[intern("exec_restrict")] = clause_contract({"rd", "code"});
  cfg.contracts[intern("exec_subseg")] = clause_contract({"rd", "r1", "r2"});
  cfg.contracts[intern("exec_add")] = clause_contract({"rd", "r1", "r2"});
  cfg.contracts[intern("exec_addi")] = clause_contract({"rd", "rs", "imm"});
  cfg.contracts[intern("exec_bnez")] = clause_contract({"rs", "imm"});
  cfg.contracts[intern("exec_fail")] = clause_contract({});
  cfg.contracts[intern("exec_halt")] = clause_contract({});

  // Foreign axioms, exercised dynamically by the runtime test oracle.
  {
    Contract c;
    c.params = {intern("c")};
    c.logic_vars = c.params;
    c.pre = a_star(safe_of(tvar("c")),
                   a_pure(tpred("subperm",
                                {tperm(kPermR), tproj(tvar("c"), 0)})));
    c.result = intern("w");
    c.post = a_star(safe_of(tvar("w")), safe_of(tvar("c")));
    cfg.contracts[intern("read_mem")] = std::move(c);
  }
  {
    Contract c;
    c.params = {intern("c"), intern("v")};
    c.logic_vars = c.params;
    c.pre = a_star(safe_of(tvar("c")), safe_of(tvar("v")));
    c.result = intern("ret");
    c.post = safe_of(tvar("c"));
    cfg.contracts[intern("write_mem")] = std::move(c);
  }
  {
    Contract c;
    c.params = {intern("w")};
    c.logic_vars = c.params;
    c.pre = a_pure(tbool(true));
    c.result = intern("i");
    c.post = a_pure(tbool(true));
    cfg.contracts[intern("decode")] = std::move(c);
  }
}

void build_lemmas(Bundle& b) {
  auto add = [&b](const char* name, std::vector<std::string> params,
                  AssertionPtr pre, AssertionPtr post,
                  std::function<bool(std::mt19937_64&)> oracle) {
    LemmaDecl d;
    d.name = intern(name);
    for (auto& s : params) d.params.push_back(intern(s));
    d.pre = std::move(pre);
    d.post = std::move(post);
    d.oracle = std::move(oracle);
    b.lemmas[d.name] = std::move(d);
    b.program.lemma_names.insert(intern(name));
  };

  Bundle* bp = &b;
  auto random_safe_state = [bp](std::mt19937_64& rng) {
    MachineState s = make_state(*bp);
    std::uniform_int_distribution<int64_t> zdist(-1000, 1000);
    std::uniform_int_distribution<int64_t> addr(0, bp->mem_size - 1);
    std::uniform_int_distribution<int> kind(0, 9);
    std::uniform_int_distribution<int> permd(0, 3);
    for (int64_t i = 0; i < bp->mem_size; ++i) {
      if (kind(rng) == 0) {
        int64_t x = addr(rng), y = addr(rng);
        Capability c{static_cast<PermTag>(permd(rng)), std::min(x, y),
                     std::max(x, y), addr(rng)};
        s.words[static_cast<size_t>(i)] = cap_word(c);
      } else {
        s.words[static_cast<size_t>(i)] = int_word(zdist(rng));
      }
    }
    return s;
  };
  auto random_valid_cap = [bp](std::mt19937_64& rng, bool allow_e) {
    std::uniform_int_distribution<int64_t> addr(0, bp->mem_size - 1);
    std::uniform_int_distribution<int> permd(0, allow_e ? 3 : 2);
    int64_t x = addr(rng), y = addr(rng);
    return Capability{static_cast<PermTag>(permd(rng)), std::min(x, y),
                      std::max(x, y), addr(rng)};
  };

  add("subperm_not_E", {"p", "q"},
      a_pure(tand(tor(teq(tvar("p"), tperm(kPermR)),
                      teq(tvar("p"), tperm(kPermRW))),
                  tpred("subperm", {tvar("p"), tvar("q")}))),
      a_pure(tnot(teq(tvar("q"), tperm(kPermE)))),
      [](std::mt19937_64&) {
        for (int p = 0; p < 4; ++p) {
          for (int q = 0; q < 4; ++q) {
            bool pre = (p == kPermR || p == kPermRW) &&
                       subperm(static_cast<PermTag>(p),
                               static_cast<PermTag>(q));
            if (pre && q == kPermE) return false;
          }
        }
        return true;
      });

  add("int_safe", {"z"}, a_pure(tbool(true)),
      a_pred("safe", {wint_t(tvar("z"))}),
      [bp](std::mt19937_64& rng) {
        MachineState s = make_state(*bp);
        std::uniform_int_distribution<int64_t> zdist(INT32_MIN, INT32_MAX);
        return safe_word_oracle(s, int_word(zdist(rng)));
      });

  // Word safety is independent of the cursor field.
  add("move_cursor", {"c1", "c2"},
      a_star({a_pred("safe", {tvar("c1")}),
              a_pure(tnot(teq(tproj(tvar("c1"), 0), tperm(kPermE)))),
              a_pure(tand(
                  teq(tproj(tvar("c2"), 0), tproj(tvar("c1"), 0)),
                  tand(teq(tproj(tvar("c2"), 1), tproj(tvar("c1"), 1)),
                       teq(tproj(tvar("c2"), 2), tproj(tvar("c1"), 2)))))}),
      a_star(a_pred("safe", {tvar("c1")}), a_pred("safe", {tvar("c2")})),
      [bp, random_safe_state, random_valid_cap](std::mt19937_64& rng) {
        MachineState s = random_safe_state(rng);
        Capability c1 = random_valid_cap(rng, false);
        if (!safe_word_oracle(s, cap_word(c1))) return true;  // pre unmet
        Capability c2 = c1;
        std::uniform_int_distribution<int64_t> addr(-4, bp->mem_size + 4);
        c2.cursor = addr(rng);
        return safe_word_oracle(s, cap_word(c2));
      });

  add("narrow_safe", {"c1", "c2"},
      a_star({a_pred("safe", {tvar("c1")}),
              a_pure(tpred("subperm",
                           {tproj(tvar("c2"), 0), tproj(tvar("c1"), 0)})),
              a_pure(tnot(teq(tproj(tvar("c2"), 0), tperm(kPermE)))),
              a_pure(tand(tle(tproj(tvar("c1"), 1), tproj(tvar("c2"), 1)),
                          tle(tproj(tvar("c2"), 2), tproj(tvar("c1"), 2))))}),
      a_star(a_pred("safe", {tvar("c1")}), a_pred("safe", {tvar("c2")})),
      [random_safe_state, random_valid_cap](std::mt19937_64& rng) {
        MachineState s = random_safe_state(rng);
        Capability c1 = random_valid_cap(rng, false);
        if (!safe_word_oracle(s, cap_word(c1))) return true;
        std::uniform_int_distribution<int64_t> off(0, 8);
        Capability c2 = c1;
        c2.begin = c1.begin + off(rng);
        c2.end = c1.end - off(rng);
        if (c1.perm == kPermRW && off(rng) < 4) c2.perm = kPermR;
        if (!subperm(c2.perm, c1.perm)) return true;
        return safe_word_oracle(s, cap_word(c2));
      });

  // Invoking an enter capability: authority to execute from the unsealed
  // capability, checked dynamically by bounded confinement runs.
  add("enter_cap_safe", {"c1", "c2"},
      a_star({a_pred("safe", {tvar("c1")}), a_pred("cycle_hyp", {}),
              a_pure(teq(tproj(tvar("c1"), 0), tperm(kPermE))),
              a_pure(teq(tproj(tvar("c2"), 0), tperm(kPermR))),
              a_pure(tand(
                  teq(tproj(tvar("c2"), 1), tproj(tvar("c1"), 1)),
                  tand(teq(tproj(tvar("c2"), 2), tproj(tvar("c1"), 2)),
                       teq(tproj(tvar("c2"), 3), tproj(tvar("c1"), 3)))))}),
      a_star(a_pred("safe", {tvar("c1")}), a_pred("exec_safe", {tvar("c2")})),
      [bp, random_safe_state, random_valid_cap](std::mt19937_64& rng) {
        MachineState s = random_safe_state(rng);
        Capability target = random_valid_cap(rng, false);
        target.perm = kPermR;
        s.reg("pc") = cap_word(target);
        for (int k = 0; k < 4; ++k) {
          s.reg(kGpr[k]) = cap_word(random_valid_cap(rng, true));
        }
        std::vector<bool> allowed = authority_footprint(s);
        std::vector<Value> before = s.words;
        run_fde_cycle(bp->program, bp->foreign, bp->preds, s, 100);
        for (int64_t i = 0; i < bp->mem_size; ++i) {
          if (!(s.words[static_cast<size_t>(i)] ==
                before[static_cast<size_t>(i)]) &&
              !allowed[static_cast<size_t>(i)]) {
            return false;
          }
        }
        return true;
      });
}

ExecResult mem_checks(const MachineState& s, const Capability& c,
                      PermTag need) {
  if (!subperm(need, c.perm)) return ExecResult::fail("perm");
  if (!within_bounds(c) || !s.in_range(c.cursor)) {
    return ExecResult::fail("bounds");
  }
  return ExecResult::ok(Value::unit());
}

void build_foreign(Bundle& b) {
  b.foreign[intern("read_mem")] = ForeignImpl{
      [](MachineState& s, const ValueVec& args) -> ExecResult {
        auto c = as_cap(args[0]);
        if (!c) return ExecResult::fail("read_mem: not a capability");
        ExecResult chk = mem_checks(s, *c, kPermR);
        if (chk.failed) return chk;
        if (s.log_accesses) s.access_log.push_back({c->cursor, false});
        return ExecResult::ok(s.words[static_cast<size_t>(c->cursor)]);
      },
      false,
      nullptr};
  b.foreign[intern("write_mem")] = ForeignImpl{
      [](MachineState& s, const ValueVec& args) -> ExecResult {
        auto c = as_cap(args[0]);
        if (!c) return ExecResult::fail("write_mem: not a capability");
        ExecResult chk = mem_checks(s, *c, kPermRW);
        if (chk.failed) return chk;
        if (s.log_accesses) s.access_log.push_back({c->cursor, true});
        s.words[static_cast<size_t>(c->cursor)] = args[1];
        return ExecResult::ok(Value::unit());
      },
      false,
      nullptr};
  auto decode_value = [](const ValueVec& args) -> Value {
    auto z = as_int(args[0]);
    if (!z) return i_fail();  // capabilities are not executable words
    return decode_mc(*z);
  };
  b.foreign[intern("decode")] = ForeignImpl{
      [decode_value](MachineState&, const ValueVec& args) -> ExecResult {
        return ExecResult::ok(decode_value(args));
      },
      true, decode_value};
}

void build_preds(Bundle& b) {
  b.preds["subperm"] = PurePred{
      [](const ValueVec& args) {
        return Value::boolean(
            subperm(static_cast<PermTag>(args[0].enum_tag()),
                    static_cast<PermTag>(args[1].enum_tag())));
      },
      [](const TermVec& args) -> TermPtr {
        const TermPtr& p = args[0];
        const TermPtr& q = args[1];
        return tor(teq(p, tperm(kPermO)),
                   tor(teq(p, q),
                       tand(teq(p, tperm(kPermR)), teq(q, tperm(kPermRW)))));
      }};
  b.preds["within_bounds"] = PurePred{
      [](const ValueVec& args) {
        auto c = as_cap(args[0]);
        if (!c) return Value::boolean(false);
        return Value::boolean(within_bounds(*c));
      },
      [](const TermVec& args) -> TermPtr {
        const TermPtr& c = args[0];
        if (c->k != Term::K::Ctor || c->kids.size() != 4) return nullptr;
        return tand(tle(c->kids[1], c->kids[3]), tle(c->kids[3], c->kids[2]));
      }};
}

}  // namespace

std::unique_ptr<Bundle> build_bundle(const BundleOptions& opts) {
  auto b = std::make_unique<Bundle>();
  // Word safety and the cycle hypothesis are persistent facts.
  set_pred_persistent(intern("safe"));
  set_pred_persistent(intern("exec_safe"));
  set_pred_persistent(intern("cycle_hyp"));
  b->mem_size = opts.mem_size;
  b->regs.add("pc");
  for (int k = 0; k < 4; ++k) b->regs.add(kGpr[k]);
  build_program(b->program, opts);
  build_preds(*b);
  build_foreign(*b);
  build_lemmas(*b);
  build_contracts(b->config);
  b->config.program = &b->program;
  b->config.lemmas = &b->lemmas;
  b->config.preds = &b->preds;
  b->config.pure_foreign[intern("decode")] =
      b->foreign[intern("decode")].pure_eval;
  return b;
}

MachineState make_state(const Bundle& b) {
  MachineState s = MachineState::make_words(&b.regs, b.mem_size);
  for (auto& r : s.regs) r = int_word(0);
  return s;
}

bool safe_word_oracle(const MachineState& s, const Value& w) {
  std::set<std::pair<int64_t, int64_t>> seen;
  std::deque<Capability> todo;
  auto push = [&](const Value& v) {
    auto c = as_cap(v);
    if (!c) return;
    if (c->perm == kPermO) return;  // null permission grants nothing
    if (!seen.emplace(c->begin, c->end).second) return;
    todo.push_back(*c);
  };
  push(w);
  while (!todo.empty()) {
    Capability c = todo.front();
    todo.pop_front();
    if (c.begin > c.end) continue;  // empty range grants nothing
    if (c.begin < 0 || c.end >= s.mem_size) return false;
    for (int64_t a = c.begin; a <= c.end; ++a) {
      push(s.words[static_cast<size_t>(a)]);
    }
  }
  return true;
}

std::vector<bool> authority_footprint(const MachineState& s) {
  std::vector<bool> mark(static_cast<size_t>(s.mem_size), false);
  std::set<std::pair<int64_t, int64_t>> seen;
  std::deque<Capability> todo;
  auto push = [&](const Value& v) {
    auto c = as_cap(v);
    if (!c || c->perm == kPermO) return;
    if (!seen.emplace(c->begin, c->end).second) return;
    todo.push_back(*c);
  };
  for (const auto& r : s.regs) push(r);
  while (!todo.empty()) {
    Capability c = todo.front();
    todo.pop_front();
    int64_t lo = std::max<int64_t>(0, c.begin);
    int64_t hi = std::min<int64_t>(s.mem_size - 1, c.end);
    for (int64_t a = lo; a <= hi; ++a) {
      mark[static_cast<size_t>(a)] = true;
      push(s.words[static_cast<size_t>(a)]);
    }
  }
  return mark;
}

}  // namespace contractile::mc
