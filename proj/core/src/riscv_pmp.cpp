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

#include "contractile/riscv_pmp.hpp"

#include <stdexcept>

namespace contractile::rv {

// ---------------------------------------------------------------------------
// PMP configuration and check
// ---------------------------------------------------------------------------

uint8_t pack_cfg(const PmpCfg& c) {
  uint8_t b = 0;
  if (c.r) b |= 0x01;
  if (c.w) b |= 0x02;
  if (c.x) b |= 0x04;
  if (c.tor) b |= 0x08;
  if (c.locked) b |= 0x80;
  return b;
}

PmpCfg unpack_cfg(uint8_t b) {
  PmpCfg c;
  c.r = b & 0x01;
  c.w = b & 0x02;
  c.x = b & 0x04;
  c.tor = (b & 0x18) == 0x08;
  c.locked = b & 0x80;
  return c;
}

uint8_t normalize_cfg_byte(uint8_t b) {
  uint8_t a = b & 0x18;
  if (a != 0x08) a = 0x00;  // only OFF and TOR are supported
  return static_cast<uint8_t>((b & 0x87) | a);
}

bool pmp_match_entry(int64_t addr, int64_t width, int64_t lo, int64_t hi) {
  return lo <= addr && addr + width <= hi;
}

namespace {

bool byte_allowed(int64_t b, AccessTag acc, PrivTag priv,
                  const PmpEntries& entries, const PmpVariant& var) {
  // Priority-ordered scan; in TOR mode entry i covers
  // [pmpaddr_{i-1} or 0, pmpaddr_i).
  int order[2] = {0, 1};
  int64_t lo[2], hi[2];
  if (!var.reverse_priority) {
    lo[0] = 0;
    hi[0] = entries[0].addr;
    lo[1] = entries[0].addr;
    hi[1] = entries[1].addr;
  } else {
    order[0] = 1;
    order[1] = 0;
    lo[1] = 0;
    hi[1] = entries[1].addr;
    lo[0] = entries[1].addr;
    hi[0] = entries[0].addr;
  }
  for (int k = 0; k < 2; ++k) {
    int i = order[k];
    PmpCfg cfg = unpack_cfg(entries[static_cast<size_t>(i)].cfg);
    if (!cfg.tor) continue;
    if (!pmp_match_entry(b, 1, lo[i], hi[i])) continue;
    if (priv == kPrivMachine && !cfg.locked) return true;
    switch (acc) {
      case kAccRead: return cfg.r;
      case kAccWrite: return cfg.w;
      case kAccExecute: return cfg.x;
      case kAccReadWrite: return cfg.r && cfg.w;
    }
    return false;
  }
  return priv == kPrivMachine;
}

}  // namespace

PmpResult pmp_check(int64_t addr, int64_t width, AccessTag acc, PrivTag priv,
                    const PmpEntries& entries, const PmpVariant& var) {
  if (var.always_allow) return PmpResult::Allow;
  for (int64_t b = addr; b < addr + width; ++b) {
    if (!byte_allowed(b, acc, priv, entries, var)) return PmpResult::Deny;
  }
  return PmpResult::Allow;
}

// ---------------------------------------------------------------------------
// Instructions and codec
// ---------------------------------------------------------------------------

namespace {

Value instr(const char* tag, ValueVec fields) {
  return Value::ctor(intern(tag), std::move(fields));
}

Value iv(int64_t n) { return Value::integer(n); }

int64_t sext(uint32_t v, int bits) {
  int64_t x = v & ((1u << bits) - 1);
  if (x & (1ll << (bits - 1))) x -= 1ll << bits;
  return x;
}

}  // namespace

Value r_lui(int64_t rd, int64_t imm) { return instr("Lui", {iv(rd), iv(imm)}); }
Value r_auipc(int64_t rd, int64_t imm) {
  return instr("Auipc", {iv(rd), iv(imm)});
}
Value r_jal(int64_t rd, int64_t imm) { return instr("Jal", {iv(rd), iv(imm)}); }
Value r_jalr(int64_t rd, int64_t rs1, int64_t imm) {
  return instr("JalrI", {iv(rd), iv(rs1), iv(imm)});
}
Value r_branch(int64_t funct3, int64_t rs2, int64_t rs1, int64_t imm) {
  return instr("Branch", {iv(funct3), iv(rs2), iv(rs1), iv(imm)});
}
Value r_lw(int64_t rd, int64_t rs1, int64_t imm) {
  return instr("LoadW", {iv(rd), iv(rs1), iv(imm)});
}
Value r_sw(int64_t rs2, int64_t rs1, int64_t imm) {
  return instr("StoreW", {iv(rs2), iv(rs1), iv(imm)});
}
Value r_opimm(int64_t op, int64_t rd, int64_t rs1, int64_t imm) {
  return instr("OpImm", {iv(op), iv(rd), iv(rs1), iv(imm)});
}
Value r_opreg(int64_t op, int64_t rd, int64_t rs1, int64_t rs2) {
  return instr("OpReg", {iv(op), iv(rd), iv(rs1), iv(rs2)});
}
Value r_csrrw(int64_t rd, int64_t rs1, int64_t csr) {
  return instr("Csr", {iv(rd), iv(rs1), iv(csr)});
}
Value r_ecall() { return instr("Ecall", {}); }
Value r_mret() { return instr("Mret", {}); }
Value r_illegal(uint32_t w) { return instr("Illegal", {iv(w)}); }

Value decode_rv32(uint32_t w) {
  uint32_t opcode = w & 0x7F;
  int64_t rd = (w >> 7) & 31;
  uint32_t funct3 = (w >> 12) & 7;
  int64_t rs1 = (w >> 15) & 31;
  int64_t rs2 = (w >> 20) & 31;
  uint32_t funct7 = (w >> 25) & 0x7F;
  int64_t imm_i = sext(w >> 20, 12);
  int64_t imm_s = sext(((w >> 25) << 5) | ((w >> 7) & 31), 12);
  int64_t imm_b = sext((((w >> 31) & 1) << 12) | (((w >> 7) & 1) << 11) |
                           (((w >> 25) & 0x3F) << 5) | (((w >> 8) & 0xF) << 1),
                       13);
  int64_t imm_u = w & 0xFFFFF000u;
  int64_t imm_j = sext((((w >> 31) & 1) << 20) | (((w >> 12) & 0xFF) << 12) |
                           (((w >> 20) & 1) << 11) | (((w >> 21) & 0x3FF) << 1),
                       21);
  switch (opcode) {
    case 0x37: return r_lui(rd, imm_u);
    case 0x17: return r_auipc(rd, imm_u);
    case 0x6F: return r_jal(rd, imm_j);
    case 0x67:
      if (funct3 != 0) return r_illegal(w);
      return r_jalr(rd, rs1, imm_i);
    case 0x63:
      if (funct3 == 2 || funct3 == 3) return r_illegal(w);
      return r_branch(funct3, rs2, rs1, imm_b);
    case 0x03:
      if (funct3 != 2) return r_illegal(w);  // word-only memory model
      return r_lw(rd, rs1, imm_i);
    case 0x23:
      if (funct3 != 2) return r_illegal(w);
      return r_sw(rs2, rs1, imm_s);
    case 0x13:
      if (funct3 == 1) {
        if (funct7 != 0) return r_illegal(w);
        return r_opimm(1, rd, rs1, rs2);  // SLLI, shamt
      }
      if (funct3 == 5) {
        if (funct7 == 0) return r_opimm(5, rd, rs1, rs2);
        if (funct7 == 0x20) return r_opimm(13, rd, rs1, rs2);
        return r_illegal(w);
      }
      return r_opimm(funct3, rd, rs1, imm_i);
    case 0x33:
      if (funct7 == 0x20) {
        if (funct3 != 0 && funct3 != 5) return r_illegal(w);
        return r_opreg(funct3 + 8, rd, rs1, rs2);
      }
      if (funct7 != 0) return r_illegal(w);
      return r_opreg(funct3, rd, rs1, rs2);
    case 0x73:
      if (funct3 == 1) return r_csrrw(rd, rs1, (w >> 20) & 0xFFF);
      if (funct3 == 0) {
        if (rd != 0 || rs1 != 0) return r_illegal(w);
        uint32_t imm12 = w >> 20;
        if (imm12 == 0) return r_ecall();
        if (imm12 == 0x302) return r_mret();
        return r_illegal(w);
      }
      return r_illegal(w);  // CSRRS/CSRRC and friends are out of scope
    default:
      return r_illegal(w);
  }
}

uint32_t encode_rv32(const Value& v) {
  if (!v.is_ctor()) throw std::runtime_error("encode_rv32: not an instruction");
  const std::string& tag = sym_name(v.ctor_tag());
  const ValueVec& f = v.fields();
  auto u = [](int64_t x) { return static_cast<uint32_t>(x); };
  auto enc_u = [&](uint32_t opcode, int64_t rd, int64_t imm) {
    if (imm & 0xFFF) throw std::runtime_error("encode_rv32: U-imm low bits");
    return u(imm) | (u(rd) << 7) | opcode;
  };
  auto enc_i = [&](uint32_t opcode, uint32_t funct3, int64_t rd, int64_t rs1,
                   int64_t imm) {
    if (imm < -2048 || imm > 2047) {
      throw std::runtime_error("encode_rv32: I-imm out of range");
    }
    return ((u(imm) & 0xFFF) << 20) | (u(rs1) << 15) | (funct3 << 12) |
           (u(rd) << 7) | opcode;
  };
  if (tag == "Lui") return enc_u(0x37, f[0].as_int(), f[1].as_int());
  if (tag == "Auipc") return enc_u(0x17, f[0].as_int(), f[1].as_int());
  if (tag == "Jal") {
    int64_t rd = f[0].as_int(), imm = f[1].as_int();
    if (imm < -(1 << 20) || imm >= (1 << 20) || (imm & 1)) {
      throw std::runtime_error("encode_rv32: J-imm out of range");
    }
    uint32_t i = u(imm);
    return (((i >> 20) & 1) << 31) | (((i >> 1) & 0x3FF) << 21) |
           (((i >> 11) & 1) << 20) | (((i >> 12) & 0xFF) << 12) |
           (u(rd) << 7) | 0x6F;
  }
  if (tag == "JalrI") {
    return enc_i(0x67, 0, f[0].as_int(), f[1].as_int(), f[2].as_int());
  }
  if (tag == "Branch") {
    int64_t funct3 = f[0].as_int(), rs2 = f[1].as_int(), rs1 = f[2].as_int(),
            imm = f[3].as_int();
    if (imm < -4096 || imm > 4094 || (imm & 1)) {
      throw std::runtime_error("encode_rv32: B-imm out of range");
    }
    uint32_t i = u(imm);
    return (((i >> 12) & 1) << 31) | (((i >> 5) & 0x3F) << 25) |
           (u(rs2) << 20) | (u(rs1) << 15) | (u(funct3) << 12) |
           (((i >> 1) & 0xF) << 8) | (((i >> 11) & 1) << 7) | 0x63;
  }
  if (tag == "LoadW") {
    return enc_i(0x03, 2, f[0].as_int(), f[1].as_int(), f[2].as_int());
  }
  if (tag == "StoreW") {
    int64_t rs2 = f[0].as_int(), rs1 = f[1].as_int(), imm = f[2].as_int();
    if (imm < -2048 || imm > 2047) {
      throw std::runtime_error("encode_rv32: S-imm out of range");
    }
    uint32_t i = u(imm);
    return (((i >> 5) & 0x7F) << 25) | (u(rs2) << 20) | (u(rs1) << 15) |
           (2u << 12) | ((i & 0x1F) << 7) | 0x23;
  }
  if (tag == "OpImm") {
    int64_t op = f[0].as_int(), rd = f[1].as_int(), rs1 = f[2].as_int(),
            imm = f[3].as_int();
    if (op == 1 || op == 5 || op == 13) {
      if (imm < 0 || imm > 31) {
        throw std::runtime_error("encode_rv32: shamt out of range");
      }
      uint32_t funct7 = op == 13 ? 0x20u : 0u;
      uint32_t funct3 = op == 13 ? 5u : u(op);
      return (funct7 << 25) | (u(imm) << 20) | (u(rs1) << 15) |
             (funct3 << 12) | (u(rd) << 7) | 0x13;
    }
    return enc_i(0x13, u(op), rd, rs1, imm);
  }
  if (tag == "OpReg") {
    int64_t op = f[0].as_int(), rd = f[1].as_int(), rs1 = f[2].as_int(),
            rs2 = f[3].as_int();
    uint32_t funct7 = op >= 8 ? 0x20u : 0u;
    uint32_t funct3 = u(op & 7);
    return (funct7 << 25) | (u(rs2) << 20) | (u(rs1) << 15) | (funct3 << 12) |
           (u(rd) << 7) | 0x33;
  }
  if (tag == "Csr") {
    int64_t rd = f[0].as_int(), rs1 = f[1].as_int(), csr = f[2].as_int();
    return (u(csr) << 20) | (u(rs1) << 15) | (1u << 12) | (u(rd) << 7) | 0x73;
  }
  if (tag == "Ecall") return 0x00000073;
  if (tag == "Mret") return 0x30200073;
  if (tag == "Illegal") return u(f[0].as_int());
  throw std::runtime_error("encode_rv32: unknown instruction " + tag);
}

namespace {

struct CsrDef {
  const char* name;
  uint32_t number;
};

const CsrDef kCsrs[] = {
    {"mstatus", 0x300}, {"mtvec", 0x305},   {"mepc", 0x341},
    {"mcause", 0x342},  {"pmpcfg0", 0x3A0}, {"pmpaddr0", 0x3B0},
    {"pmpaddr1", 0x3B1},
};

}  // namespace

std::optional<uint32_t> csr_number(const std::string& name) {
  for (const auto& c : kCsrs) {
    if (name == c.name) return c.number;
  }
  return std::nullopt;
}

std::optional<std::string> csr_name(uint32_t number) {
  for (const auto& c : kCsrs) {
    if (number == c.number) return std::string(c.name);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// PMP decision term
// ---------------------------------------------------------------------------

namespace {

TermPtr tpriv_t(PrivTag p) { return tenum(Enums::priv(), p); }
TermPtr tacc_t(AccessTag a) { return tenum(Enums::access(), a); }

TermPtr cfg_bit(TermPtr c, int64_t mask) {
  return tnot(teq(tbin(BinOp::BitAnd, std::move(c), tint(mask)), tint(0)));
}

TermPtr cfg_is_tor(TermPtr c) {
  return teq(tbin(BinOp::BitAnd, std::move(c), tint(0x18)), tint(0x08));
}

TermPtr rwx_for(TermPtr acc, TermPtr c) {
  return tif(teq(acc, tacc_t(kAccRead)), cfg_bit(c, 1),
             tif(teq(acc, tacc_t(kAccWrite)), cfg_bit(c, 2),
                 tif(teq(acc, tacc_t(kAccExecute)), cfg_bit(c, 4),
                     tand(cfg_bit(c, 1), cfg_bit(c, 2)))));
}

TermPtr entry_decision(TermPtr priv, TermPtr acc, TermPtr c) {
  return tif(tand(teq(priv, tpriv_t(kPrivMachine)),
                  teq(tbin(BinOp::BitAnd, c, tint(0x80)), tint(0))),
             tbool(true), rwx_for(acc, c));
}

TermPtr byte_decision(TermPtr b, TermPtr priv, TermPtr acc, TermPtr c_first,
                      TermPtr lo_first, TermPtr hi_first, TermPtr c_second,
                      TermPtr lo_second, TermPtr hi_second) {
  TermPtr match_first =
      tand(cfg_is_tor(c_first), tand(tle(lo_first, b), tlt(b, hi_first)));
  TermPtr match_second =
      tand(cfg_is_tor(c_second), tand(tle(lo_second, b), tlt(b, hi_second)));
  return tif(match_first, entry_decision(priv, acc, c_first),
             tif(match_second, entry_decision(priv, acc, c_second),
                 teq(priv, tpriv_t(kPrivMachine))));
}

}  // namespace

TermPtr pmp_allow_term(TermPtr addr, TermPtr acc, TermPtr priv, TermPtr c0,
                       TermPtr a0, TermPtr c1, TermPtr a1,
                       const BundleOptions& opts) {
  if (opts.pmp_always_allow) return tbool(true);
  TermPtr c_first = c0, lo_first = tint(0), hi_first = a0;
  TermPtr c_second = c1, lo_second = a0, hi_second = a1;
  if (opts.reverse_pmp_priority) {
    c_first = c1;
    lo_first = tint(0);
    hi_first = a1;
    c_second = c0;
    lo_second = a1;
    hi_second = a0;
  }
  TermPtr allow = tbool(true);
  for (int k = 0; k < 4; ++k) {
    TermPtr b = k == 0 ? addr : tadd(addr, tint(k));
    TermPtr dec = byte_decision(b, priv, acc, c_first, lo_first, hi_first,
                                c_second, lo_second, hi_second);
    allow = k == 0 ? dec : tand(allow, dec);
  }
  return allow;
}

// ---------------------------------------------------------------------------
// Program construction
// ---------------------------------------------------------------------------

namespace {

StmPtr expr(TermPtr t) { return s_expr(std::move(t)); }

std::string xreg(int k) { return "x" + std::to_string(k); }

TermPtr mvalue_t(TermPtr w) { return tctor("M_Value", {std::move(w)}); }
TermPtr mfault_t(TermPtr c) { return tctor("M_Fault", {std::move(c)}); }

/// Fault cause by access type: fetch 1, load 5, store 7.
TermPtr cause_term(TermPtr acc) {
  return tif(teq(acc, tacc_t(kAccExecute)), tint(1),
             tif(teq(acc, tacc_t(kAccRead)), tint(5), tint(7)));
}

TermPtr range_term(TermPtr addr, int64_t mem_size) {
  return tand(tle(tint(0), addr), tle(tadd(addr, tint(4)), tint(mem_size)));
}

TermPtr aligned_term(TermPtr addr) {
  return teq(tbin(BinOp::BitAnd, std::move(addr), tint(3)), tint(0));
}

void build_program(Program& p, const BundleOptions& opts) {
  const int64_t mem_size = opts.mem_size;

  // x0 reads as zero and ignores writes; the others live in the packed
  // GPR predicate during verification.
  {
    std::vector<MatchCase> rcases;
    for (int k = 1; k < 32; ++k) {
      rcases.push_back(case_int(k, s_read_reg(xreg(k))));
    }
    rcases.push_back(case_default(s_int(0)));
    p.add_internal(
        "rX", {"r"},
        s_if(expr(teq(tvar("r"), tint(0))), s_int(0),
             s_seq(s_lemma("open_GPRs", {}),
                   s_let("v", s_match(s_var("r"), std::move(rcases)),
                         s_seq(s_lemma("close_GPRs", {}), s_var("v"))))));
    std::vector<MatchCase> wcases;
    for (int k = 1; k < 32; ++k) {
      wcases.push_back(case_int(k, s_write_reg(xreg(k), s_var("w"))));
    }
    wcases.push_back(case_default(s_unit()));
    p.add_internal(
        "wX", {"r", "w"},
        s_if(expr(teq(tvar("r"), tint(0))), s_unit(),
             s_seq({s_lemma("open_GPRs", {}),
                    s_match(s_var("r"), std::move(wcases)),
                    s_lemma("close_GPRs", {})})));
  }

  p.add_internal(
      "update_pc_r", {},
      s_let("pcv", s_read_reg("pc"),
            s_write_reg(
                "pc", expr(tun(UnOp::Wrap32, tadd(tvar("pcv"), tint(4)))))));

  // The PMP check algorithm over the two TOR entries.
  p.add_internal(
      "pmp_ok", {"addr", "acc"},
      s_let(
          "p", s_read_reg("cur_privilege"),
          s_seq(s_lemma("open_PMP_entries", {}),
                s_let("c0", s_read_reg("pmp0cfg"),
                      s_let("a0", s_read_reg("pmpaddr0"),
                            s_let("c1", s_read_reg("pmp1cfg"),
                                  s_let("a1", s_read_reg("pmpaddr1"),
                                        s_seq(s_lemma("close_PMP_entries", {}),
                                              expr(pmp_allow_term(
                                                  tvar("addr"), tvar("acc"),
                                                  tvar("p"), tvar("c0"),
                                                  tvar("a0"), tvar("c1"),
                                                  tvar("a1"), opts))))))))));

  {
    TermPtr ok_phys =
        tand(aligned_term(tvar("addr")), range_term(tvar("addr"), mem_size));
    StmPtr do_read = s_seq(
        {s_lemma("extract_PMP_ptsto", {s_var("addr"), s_var("acc")}),
         s_let("w", s_callf("read_ram", {s_var("addr")}),
               s_seq(s_lemma("return_PMP_ptsto", {s_var("addr")}),
                     expr(mvalue_t(tvar("w")))))});
    p.add_internal(
        "mem_read", {"addr", "acc"},
        s_if(expr(tnot(ok_phys)), expr(mfault_t(cause_term(tvar("acc")))),
             s_let("ok", s_call("pmp_ok", {s_var("addr"), s_var("acc")}),
                   s_if(s_var("ok"), do_read,
                        expr(mfault_t(cause_term(tvar("acc"))))))));

    StmPtr do_write =
        s_seq({s_lemma("extract_PMP_ptsto", {s_var("addr"), s_var("acc")}),
               s_callf("write_ram", {s_var("addr"), s_var("v")}),
               s_lemma("return_PMP_ptsto", {s_var("addr")}),
               expr(mvalue_t(tint(0)))});
    p.add_internal(
        "mem_write", {"addr", "acc", "v"},
        s_if(expr(tnot(ok_phys)), expr(mfault_t(cause_term(tvar("acc")))),
             s_let("ok", s_call("pmp_ok", {s_var("addr"), s_var("acc")}),
                   s_if(s_var("ok"), do_write,
                        expr(mfault_t(cause_term(tvar("acc"))))))));
  }

  p.add_internal(
      "trap", {"cause"},
      s_let("oldpc", s_read_reg("pc"),
            s_let("p", s_read_reg("cur_privilege"),
                  s_let("h", s_read_reg("mtvec"),
                        s_seq({s_write_reg("mcause", s_var("cause")),
                               s_write_reg("mepc", s_var("oldpc")),
                               s_write_reg("mstatus", s_var("p")),
                               s_write_reg("cur_privilege",
                                           expr(tpriv_t(kPrivMachine))),
                               s_write_reg("pc", s_var("h"))})))));

  // CSR read-modify-write with the lock rules; callers check privilege.
  {
    auto lock_bit = [](const char* c) {
      return tnot(teq(tbin(BinOp::BitAnd, tvar(c), tint(0x80)), tint(0)));
    };
    auto norm_byte = [](TermPtr b) {
      TermPtr a = tif(teq(tbin(BinOp::BitAnd, b, tint(0x18)), tint(0x08)),
                      tint(0x08), tint(0x00));
      return tbin(BinOp::BitOr, tbin(BinOp::BitAnd, b, tint(0x87)), a);
    };
    auto guarded = [&opts](TermPtr locked, TermPtr oldv, TermPtr newv) {
      if (opts.skip_csr_lock_check) return newv;
      return tif(std::move(locked), std::move(oldv), std::move(newv));
    };

    StmPtr cs_mstatus = s_let(
        "ms", s_read_reg("mstatus"),
        s_let("old",
              expr(tif(teq(tvar("ms"), tpriv_t(kPrivMachine)), tint(0x1800),
                       tint(0))),
              s_seq(s_write_reg(
                        "mstatus",
                        expr(tif(teq(tbin(BinOp::BitAnd, tvar("v"),
                                          tint(0x1800)),
                                     tint(0x1800)),
                                 tpriv_t(kPrivMachine), tpriv_t(kPrivUser)))),
                    s_var("old"))));
    auto plain_csr = [](const char* reg) {
      return s_let(
          "old", s_read_reg(reg),
          s_seq(s_write_reg(reg, expr(tun(UnOp::Wrap32, tvar("v")))),
                s_var("old")));
    };

    StmPtr cs_pmpcfg0 = s_seq(
        s_lemma("open_PMP_entries", {}),
        s_let(
            "c0", s_read_reg("pmp0cfg"),
            s_let(
                "c1", s_read_reg("pmp1cfg"),
                s_let(
                    "old",
                    expr(tbin(BinOp::BitOr, tvar("c0"),
                              tbin(BinOp::Shl, tvar("c1"), tint(8)))),
                    s_seq(
                        {s_write_reg(
                             "pmp0cfg",
                             expr(guarded(
                                 lock_bit("c0"), tvar("c0"),
                                 norm_byte(tbin(BinOp::BitAnd, tvar("v"),
                                                tint(0xFF)))))),
                         s_write_reg(
                             "pmp1cfg",
                             expr(guarded(
                                 lock_bit("c1"), tvar("c1"),
                                 norm_byte(tbin(
                                     BinOp::BitAnd,
                                     tbin(BinOp::Shr, tvar("v"), tint(8)),
                                     tint(0xFF)))))),
                         s_lemma("close_PMP_entries", {}),
                         s_var("old")})))));

    // A TOR entry's base is the preceding address register, so a locked
    // entry also locks that register.
    StmPtr cs_pmpaddr0 = s_seq(
        s_lemma("open_PMP_entries", {}),
        s_let(
            "c0", s_read_reg("pmp0cfg"),
            s_let(
                "c1", s_read_reg("pmp1cfg"),
                s_let(
                    "old", s_read_reg("pmpaddr0"),
                    s_seq({s_write_reg(
                               "pmpaddr0",
                               expr(guarded(
                                   tor(lock_bit("c0"),
                                       tand(cfg_is_tor(tvar("c1")),
                                            lock_bit("c1"))),
                                   tvar("old"),
                                   tun(UnOp::Wrap32, tvar("v"))))),
                           s_lemma("close_PMP_entries", {}),
                           s_var("old")})))));
    StmPtr cs_pmpaddr1 = s_seq(
        s_lemma("open_PMP_entries", {}),
        s_let("c1", s_read_reg("pmp1cfg"),
              s_let("old", s_read_reg("pmpaddr1"),
                    s_seq({s_write_reg(
                               "pmpaddr1",
                               expr(guarded(lock_bit("c1"), tvar("old"),
                                            tun(UnOp::Wrap32, tvar("v"))))),
                           s_lemma("close_PMP_entries", {}),
                           s_var("old")}))));

    p.add_internal(
        "csr_rw", {"csr", "v"},
        s_match(s_var("csr"),
                {case_int(0x300, cs_mstatus),
                 case_int(0x305, plain_csr("mtvec")),
                 case_int(0x341, plain_csr("mepc")),
                 case_int(0x342, plain_csr("mcause")),
                 case_int(0x3A0, cs_pmpcfg0), case_int(0x3B0, cs_pmpaddr0),
                 case_int(0x3B1, cs_pmpaddr1),
                 case_default(s_fail("unknown csr"))}));
  }

  // Execution clauses.
  p.add_internal("exec_lui", {"rd", "imm"},
                 s_seq(s_call("wX", {s_var("rd"), s_var("imm")}),
                       s_call("update_pc_r", {})));
  p.add_internal(
      "exec_auipc", {"rd", "imm"},
      s_let("pcv", s_read_reg("pc"),
            s_seq(s_call("wX",
                         {s_var("rd"), expr(tun(UnOp::Wrap32,
                                                tadd(tvar("pcv"),
                                                     tvar("imm"))))}),
                  s_call("update_pc_r", {}))));
  p.add_internal(
      "exec_jal", {"rd", "imm"},
      s_let("pcv", s_read_reg("pc"),
            s_seq(s_call("wX",
                         {s_var("rd"),
                          expr(tun(UnOp::Wrap32, tadd(tvar("pcv"), tint(4))))}),
                  s_write_reg("pc", expr(tun(UnOp::Wrap32,
                                             tadd(tvar("pcv"),
                                                  tvar("imm"))))))));
  p.add_internal(
      "exec_jalri", {"rd", "rs1", "imm"},
      s_let("base", s_call("rX", {s_var("rs1")}),
            s_let("pcv", s_read_reg("pc"),
                  s_seq(s_call("wX", {s_var("rd"),
                                      expr(tun(UnOp::Wrap32,
                                               tadd(tvar("pcv"), tint(4))))}),
                        s_write_reg(
                            "pc",
                            expr(tbin(BinOp::BitAnd,
                                      tun(UnOp::Wrap32,
                                          tadd(tvar("base"), tvar("imm"))),
                                      tint(0xFFFFFFFE))))))));
  {
    auto s32 = [](const char* v) { return tun(UnOp::Signed32, tvar(v)); };
    std::vector<MatchCase> bcases;
    bcases.push_back(case_int(0, expr(teq(tvar("v1"), tvar("v2")))));
    bcases.push_back(case_int(1, expr(tne(tvar("v1"), tvar("v2")))));
    bcases.push_back(case_int(4, expr(tlt(s32("v1"), s32("v2")))));
    bcases.push_back(case_int(5, expr(tnot(tlt(s32("v1"), s32("v2"))))));
    bcases.push_back(case_int(6, expr(tlt(tvar("v1"), tvar("v2")))));
    bcases.push_back(case_int(7, expr(tnot(tlt(tvar("v1"), tvar("v2"))))));
    bcases.push_back(case_default(s_fail("bad branch kind")));
    p.add_internal(
        "exec_branch", {"op", "rs2", "rs1", "imm"},
        s_let("v1", s_call("rX", {s_var("rs1")}),
              s_let("v2", s_call("rX", {s_var("rs2")}),
                    s_let("taken", s_match(s_var("op"), std::move(bcases)),
                          s_if(s_var("taken"),
                               s_let("pcv", s_read_reg("pc"),
                                     s_write_reg(
                                         "pc",
                                         expr(tun(UnOp::Wrap32,
                                                  tadd(tvar("pcv"),
                                                       tvar("imm")))))),
                               s_call("update_pc_r", {}))))));
  }
  p.add_internal(
      "exec_loadw", {"rd", "rs1", "imm"},
      s_let("base", s_call("rX", {s_var("rs1")}),
            s_let("a",
                  expr(tun(UnOp::Wrap32, tadd(tvar("base"), tvar("imm")))),
                  s_let("res",
                        s_call("mem_read",
                               {s_var("a"), expr(tacc_t(kAccRead))}),
                        s_match(s_var("res"),
                                {case_ctor("M_Value", {"w"},
                                           s_seq(s_call("wX",
                                                        {s_var("rd"),
                                                         s_var("w")}),
                                                 s_call("update_pc_r", {}))),
                                 case_ctor("M_Fault", {"c"},
                                           s_call("trap", {s_var("c")}))})))));
  p.add_internal(
      "exec_storew", {"rs2", "rs1", "imm"},
      s_let(
          "base", s_call("rX", {s_var("rs1")}),
          s_let(
              "a", expr(tun(UnOp::Wrap32, tadd(tvar("base"), tvar("imm")))),
              s_let("v", s_call("rX", {s_var("rs2")}),
                    s_let("res",
                          s_call("mem_write",
                                 {s_var("a"), expr(tacc_t(kAccWrite)),
                                  s_var("v")}),
                          s_match(s_var("res"),
                                  {case_ctor("M_Value", {"u"},
                                             s_call("update_pc_r", {})),
                                   case_ctor("M_Fault", {"c"},
                                             s_call("trap",
                                                    {s_var("c")}))}))))));
  {
    auto w32 = [](TermPtr t) { return tun(UnOp::Wrap32, std::move(t)); };
    auto s32 = [](const char* v) { return tun(UnOp::Signed32, tvar(v)); };
    auto immp = [] { return tun(UnOp::Wrap32, tvar("imm")); };
    std::vector<MatchCase> icases;
    icases.push_back(case_int(0, expr(w32(tadd(tvar("v1"), tvar("imm"))))));
    icases.push_back(case_int(
        2, expr(tif(tlt(s32("v1"), tun(UnOp::Signed32, immp())), tint(1),
                    tint(0)))));
    icases.push_back(
        case_int(3, expr(tif(tlt(tvar("v1"), immp()), tint(1), tint(0)))));
    icases.push_back(
        case_int(4, expr(tbin(BinOp::BitXor, tvar("v1"), immp()))));
    icases.push_back(
        case_int(6, expr(tbin(BinOp::BitOr, tvar("v1"), immp()))));
    icases.push_back(
        case_int(7, expr(tbin(BinOp::BitAnd, tvar("v1"), immp()))));
    icases.push_back(
        case_int(1, expr(w32(tbin(BinOp::Shl, tvar("v1"), tvar("imm"))))));
    icases.push_back(
        case_int(5, expr(tbin(BinOp::Shr, tvar("v1"), tvar("imm")))));
    icases.push_back(
        case_int(13, expr(tbin(BinOp::Sra, tvar("v1"), tvar("imm")))));
    icases.push_back(case_default(s_fail("bad op-imm kind")));
    p.add_internal(
        "exec_opimm", {"op", "rd", "rs1", "imm"},
        s_let("v1", s_call("rX", {s_var("rs1")}),
              s_let("res", s_match(s_var("op"), std::move(icases)),
                    s_seq(s_call("wX", {s_var("rd"), s_var("res")}),
                          s_call("update_pc_r", {})))));

    std::vector<MatchCase> rcases;
    auto sh = [](const char* v) {
      return tbin(BinOp::BitAnd, tvar(v), tint(31));
    };
    rcases.push_back(case_int(0, expr(w32(tadd(tvar("v1"), tvar("v2"))))));
    rcases.push_back(case_int(8, expr(w32(tsub(tvar("v1"), tvar("v2"))))));
    rcases.push_back(
        case_int(1, expr(w32(tbin(BinOp::Shl, tvar("v1"), sh("v2"))))));
    rcases.push_back(
        case_int(2, expr(tif(tlt(s32("v1"), s32("v2")), tint(1), tint(0)))));
    rcases.push_back(
        case_int(3, expr(tif(tlt(tvar("v1"), tvar("v2")), tint(1), tint(0)))));
    rcases.push_back(
        case_int(4, expr(tbin(BinOp::BitXor, tvar("v1"), tvar("v2")))));
    rcases.push_back(
        case_int(5, expr(tbin(BinOp::Shr, tvar("v1"), sh("v2")))));
    rcases.push_back(
        case_int(13, expr(tbin(BinOp::Sra, tvar("v1"), sh("v2")))));
    rcases.push_back(
        case_int(6, expr(tbin(BinOp::BitOr, tvar("v1"), tvar("v2")))));
    rcases.push_back(
        case_int(7, expr(tbin(BinOp::BitAnd, tvar("v1"), tvar("v2")))));
    rcases.push_back(case_default(s_fail("bad op kind")));
    p.add_internal(
        "exec_opreg", {"op", "rd", "rs1", "rs2"},
        s_let("v1", s_call("rX", {s_var("rs1")}),
              s_let("v2", s_call("rX", {s_var("rs2")}),
                    s_let("res", s_match(s_var("op"), std::move(rcases)),
                          s_seq(s_call("wX", {s_var("rd"), s_var("res")}),
                                s_call("update_pc_r", {}))))));
  }
  {
    StmPtr csr_body = s_let(
        "v", s_call("rX", {s_var("rs1")}),
        s_let("old", s_call("csr_rw", {s_var("csr"), s_var("v")}),
              s_seq(s_call("wX", {s_var("rd"), s_var("old")}),
                    s_call("update_pc_r", {}))));
    std::vector<MatchCase> ccases;
    for (const auto& c : kCsrs) {
      ccases.push_back(case_int(c.number, csr_body));
    }
    ccases.push_back(case_default(s_call("trap", {s_int(2)})));
    p.add_internal(
        "exec_csr", {"rd", "rs1", "csr"},
        s_let("p", s_read_reg("cur_privilege"),
              s_if(expr(tnot(teq(tvar("p"), tpriv_t(kPrivMachine)))),
                   s_call("trap", {s_int(2)}),
                   s_match(s_var("csr"), std::move(ccases)))));
  }
  p.add_internal(
      "exec_ecall", {},
      s_let("p", s_read_reg("cur_privilege"),
            s_call("trap", {expr(tif(teq(tvar("p"), tpriv_t(kPrivMachine)),
                                     tint(11), tint(8)))})));
  p.add_internal(
      "exec_mret", {},
      s_let("p", s_read_reg("cur_privilege"),
            s_if(expr(tnot(teq(tvar("p"), tpriv_t(kPrivMachine)))),
                 s_call("trap", {s_int(2)}),
                 s_let("mpp", s_read_reg("mstatus"),
                       s_let("e", s_read_reg("mepc"),
                             s_seq({s_write_reg("cur_privilege", s_var("mpp")),
                                    s_write_reg("pc", s_var("e")),
                                    s_write_reg("mstatus",
                                                expr(tpriv_t(
                                                    kPrivUser)))}))))));
  p.add_internal("exec_illegal", {"w"}, s_call("trap", {s_int(2)}));

  p.add_internal(
      "execute", {"i"},
      s_match(
          s_var("i"),
          {case_ctor("Lui", {"rd", "imm"},
                     s_call("exec_lui", {s_var("rd"), s_var("imm")})),
           case_ctor("Auipc", {"rd", "imm"},
                     s_call("exec_auipc", {s_var("rd"), s_var("imm")})),
           case_ctor("Jal", {"rd", "imm"},
                     s_call("exec_jal", {s_var("rd"), s_var("imm")})),
           case_ctor("JalrI", {"rd", "rs1", "imm"},
                     s_call("exec_jalri",
                            {s_var("rd"), s_var("rs1"), s_var("imm")})),
           case_ctor("Branch", {"op", "rs2", "rs1", "imm"},
                     s_call("exec_branch", {s_var("op"), s_var("rs2"),
                                            s_var("rs1"), s_var("imm")})),
           case_ctor("LoadW", {"rd", "rs1", "imm"},
                     s_call("exec_loadw",
                            {s_var("rd"), s_var("rs1"), s_var("imm")})),
           case_ctor("StoreW", {"rs2", "rs1", "imm"},
                     s_call("exec_storew",
                            {s_var("rs2"), s_var("rs1"), s_var("imm")})),
           case_ctor("OpImm", {"op", "rd", "rs1", "imm"},
                     s_call("exec_opimm", {s_var("op"), s_var("rd"),
                                           s_var("rs1"), s_var("imm")})),
           case_ctor("OpReg", {"op", "rd", "rs1", "rs2"},
                     s_call("exec_opreg", {s_var("op"), s_var("rd"),
                                           s_var("rs1"), s_var("rs2")})),
           case_ctor("Csr", {"rd", "rs1", "csr"},
                     s_call("exec_csr",
                            {s_var("rd"), s_var("rs1"), s_var("csr")})),
           case_ctor("Ecall", {}, s_call("exec_ecall", {})),
           case_ctor("Mret", {}, s_call("exec_mret", {})),
           case_ctor("Illegal", {"w"},
                     s_call("exec_illegal", {s_var("w")}))}));

  p.add_internal(
      "fdeStep", {},
      s_let("pcv", s_read_reg("pc"),
            s_let("f",
                  s_call("mem_read", {s_var("pcv"), expr(tacc_t(kAccExecute))}),
                  s_match(s_var("f"),
                          {case_ctor("M_Value", {"w"},
                                     s_let("i", s_callf("decode", {s_var("w")}),
                                           s_call("execute", {s_var("i")}))),
                           case_ctor("M_Fault", {"c"},
                                     s_call("trap", {s_var("c")}))}))));
  p.add_internal("fdeCycle", {},
                 s_seq(s_call("fdeStep", {}), s_call("fdeCycle", {})));

  p.add_foreign("read_ram", 1);
  p.add_foreign("write_ram", 2);
  p.add_foreign("decode", 1);
}

// ---------------------------------------------------------------------------
// Contracts
// ---------------------------------------------------------------------------

AssertionPtr gprs_any(const char* v) {
  return a_exists(v, a_pred("gprs", {tvar(v)}));
}

/// Start-of-step machine state: known control registers, owned GPRs, PMP
/// configuration, and the PMP-authorized part of memory.
AssertionPtr normal_pre() {
  return a_star({a_exists("i0", a_reg("pc", tvar("i0"))),
                 a_reg("cur_privilege", tvar("l")), a_reg("mtvec", tvar("h")),
                 a_exists("cc0", a_reg("mcause", tvar("cc0"))),
                 a_reg("mstatus", tvar("mpp")), a_reg("mepc", tvar("e0")),
                 a_pred("pmp_entries", {tvar("es")}), gprs_any("ws0"),
                 a_pred("pmp_addr_access", {tvar("es"), tvar("l")})});
}

AssertionPtr step_post_arms() {
  AssertionPtr normal = a_star(
      {a_exists("i1", a_reg("pc", tvar("i1"))),
       a_reg("cur_privilege", tvar("l")), a_reg("mtvec", tvar("h")),
       a_exists("cc1", a_reg("mcause", tvar("cc1"))),
       a_reg("mstatus", tvar("mpp")), a_reg("mepc", tvar("e0")),
       a_pred("pmp_entries", {tvar("es")}), gprs_any("ws1"),
       a_pred("pmp_addr_access", {tvar("es"), tvar("l")})});
  // Only machine mode reaches a CSR change; the PMP-authorized memory stays
  // tied to the entries it was granted under.
  AssertionPtr csrmod = a_star(
      {a_pure(teq(tvar("l"), tpriv_t(kPrivMachine))),
       a_exists("i1", a_reg("pc", tvar("i1"))),
       a_reg("cur_privilege", tvar("l")),
       a_exists("h1", a_reg("mtvec", tvar("h1"))),
       a_exists("cc1", a_reg("mcause", tvar("cc1"))),
       a_exists("mpp1", a_reg("mstatus", tvar("mpp1"))),
       a_exists("e1", a_reg("mepc", tvar("e1"))),
       a_exists("es1", a_pred("pmp_entries", {tvar("es1")})), gprs_any("ws1"),
       a_pred("pmp_addr_access", {tvar("es"), tvar("l")})});
  AssertionPtr trap = a_star(
      {a_reg("pc", tvar("h")), a_reg("cur_privilege", tpriv_t(kPrivMachine)),
       a_reg("mtvec", tvar("h")),
       a_exists("cc1", a_reg("mcause", tvar("cc1"))),
       a_reg("mstatus", tvar("l")), a_exists("e1", a_reg("mepc", tvar("e1"))),
       a_pred("pmp_entries", {tvar("es")}), gprs_any("ws1"),
       a_pred("pmp_addr_access", {tvar("es"), tvar("l")})});
  AssertionPtr recover = a_star(
      {a_pure(teq(tvar("l"), tpriv_t(kPrivMachine))), a_reg("pc", tvar("e0")),
       a_reg("cur_privilege", tvar("mpp")), a_reg("mtvec", tvar("h")),
       a_exists("cc1", a_reg("mcause", tvar("cc1"))),
       a_reg("mstatus", tpriv_t(kPrivUser)), a_reg("mepc", tvar("e0")),
       a_pred("pmp_entries", {tvar("es")}), gprs_any("ws1"),
       a_pred("pmp_addr_access", {tvar("es"), tvar("l")})});
  return a_or(normal, a_or(csrmod, a_or(trap, recover)));
}

Contract step_contract(std::vector<std::string> params) {
  Contract c;
  for (auto& s : params) {
    c.params.push_back(intern(s));
    c.logic_vars.push_back(intern(s));
  }
  for (const char* v : {"l", "h", "mpp", "e0", "es"}) {
    c.logic_vars.push_back(intern(v));
  }
  c.pre = normal_pre();
  c.result = intern("ret");
  c.post = step_post_arms();
  return c;
}

void build_uc_contracts(VerifyConfig& cfg) {
  cfg.contracts[intern("fdeStep")] = step_contract({});
  cfg.contracts[intern("exec_lui")] = step_contract({"rd", "imm"});
  cfg.contracts[intern("exec_auipc")] = step_contract({"rd", "imm"});
  cfg.contracts[intern("exec_jal")] = step_contract({"rd", "imm"});
  cfg.contracts[intern("exec_jalri")] = step_contract({"rd", "rs1", "imm"});
  cfg.contracts[intern("exec_branch")] =
      step_contract({"op", "rs2", "rs1", "imm"});
  cfg.contracts[intern("exec_loadw")] = step_contract({"rd", "rs1", "imm"});
  cfg.contracts[intern("exec_storew")] = step_contract({"rs2", "rs1", "imm"});
  cfg.contracts[intern("exec_opimm")] =
      step_contract({"op", "rd", "rs1", "imm"});
  cfg.contracts[intern("exec_opreg")] =
      step_contract({"op", "rd", "rs1", "rs2"});
  cfg.contracts[intern("exec_csr")] = step_contract({"rd", "rs1", "csr"});
  cfg.contracts[intern("exec_ecall")] = step_contract({});
  cfg.contracts[intern("exec_mret")] = step_contract({});
  cfg.contracts[intern("exec_illegal")] = step_contract({"w"});

  {
    Contract c;
    c.params = {intern("cause")};
    c.logic_vars = c.params;
    for (const char* v : {"ti", "tl", "th", "tm"}) {
      c.logic_vars.push_back(intern(v));
    }
    c.pre = a_star(
        {a_reg("pc", tvar("ti")), a_reg("cur_privilege", tvar("tl")),
         a_reg("mtvec", tvar("th")),
         a_exists("tc", a_reg("mcause", tvar("tc"))),
         a_reg("mstatus", tvar("tm")),
         a_exists("te", a_reg("mepc", tvar("te")))});
    c.result = intern("ret");
    c.post = a_star(
        {a_reg("pc", tvar("th")),
         a_reg("cur_privilege", tpriv_t(kPrivMachine)),
         a_reg("mtvec", tvar("th")), a_reg("mcause", tvar("cause")),
         a_reg("mstatus", tvar("tl")), a_reg("mepc", tvar("ti"))});
    cfg.contracts[intern("trap")] = std::move(c);
  }
  {
    Contract c;
    c.params = {intern("r")};
    c.logic_vars = c.params;
    c.logic_vars.push_back(intern("gw"));
    c.pre = a_pred("gprs", {tvar("gw")});
    c.result = intern("v");
    c.post = a_pred("gprs", {tvar("gw")});
    cfg.contracts[intern("rX")] = std::move(c);
  }
  {
    Contract c;
    c.params = {intern("r"), intern("w")};
    c.logic_vars = c.params;
    c.logic_vars.push_back(intern("gw"));
    c.pre = a_pred("gprs", {tvar("gw")});
    c.result = intern("ret");
    c.post = a_exists("gw1", a_pred("gprs", {tvar("gw1")}));
    cfg.contracts[intern("wX")] = std::move(c);
  }
  {
    // Reading memory needs read-capable PMP authority for the address
    // under some access type, plus ownership of the cell.
    Contract c;
    c.params = {intern("addr")};
    c.logic_vars = c.params;
    for (const char* v : {"p", "es", "w"}) c.logic_vars.push_back(intern(v));
    TermPtr a = tvar("addr");
    TermPtr acc_any =
        tor(tpred("pmp_access", {a, tvar("es"), tvar("p"), tacc_t(kAccRead)}),
            tor(tpred("pmp_access",
                      {a, tvar("es"), tvar("p"), tacc_t(kAccExecute)}),
                tpred("pmp_access",
                      {a, tvar("es"), tvar("p"), tacc_t(kAccReadWrite)})));
    c.pre = a_star({a_reg("cur_privilege", tvar("p")),
                    a_pred("pmp_entries", {tvar("es")}), a_pure(acc_any),
                    a_mem(tvar("addr"), tvar("w"))});
    c.result = intern("ret");
    c.post = a_star({a_reg("cur_privilege", tvar("p")),
                     a_pred("pmp_entries", {tvar("es")}),
                     a_mem(tvar("addr"), tvar("w")),
                     a_pure(teq(tvar("ret"), tvar("w")))});
    cfg.contracts[intern("read_ram")] = std::move(c);
  }
  {
    Contract c;
    c.params = {intern("addr"), intern("v")};
    c.logic_vars = c.params;
    for (const char* vv : {"p", "es"}) c.logic_vars.push_back(intern(vv));
    TermPtr a = tvar("addr");
    TermPtr acc_any =
        tor(tpred("pmp_access", {a, tvar("es"), tvar("p"), tacc_t(kAccWrite)}),
            tpred("pmp_access",
                  {a, tvar("es"), tvar("p"), tacc_t(kAccReadWrite)}));
    c.pre = a_star({a_reg("cur_privilege", tvar("p")),
                    a_pred("pmp_entries", {tvar("es")}), a_pure(acc_any),
                    a_exists("w0", a_mem(tvar("addr"), tvar("w0")))});
    c.result = intern("ret");
    c.post = a_star({a_reg("cur_privilege", tvar("p")),
                     a_pred("pmp_entries", {tvar("es")}),
                     a_mem(tvar("addr"), tvar("v"))});
    cfg.contracts[intern("write_ram")] = std::move(c);
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

/// Basic-block configuration: everything by body except memory access,
/// which uses value-precise contracts over directly owned cells. These are
/// dynamically checked axioms; the ownership-transfer route through
/// pmp_addr_access does not apply to code the block owns outright.
void build_block_contracts(VerifyConfig& cfg, int64_t mem_size) {
  {
    Contract c;
    c.params = {intern("addr"), intern("acc")};
    c.logic_vars = c.params;
    for (const char* v : {"p", "es", "w"}) c.logic_vars.push_back(intern(v));
    c.pre = a_star(
        {a_pure(tpred("access_le", {tacc_t(kAccRead), tvar("acc")})),
         a_pure(tand(aligned_term(tvar("addr")),
                     range_term(tvar("addr"), mem_size))),
         a_reg("cur_privilege", tvar("p")),
         a_pred("pmp_entries", {tvar("es")}),
         a_pure(tpred("pmp_access",
                      {tvar("addr"), tvar("es"), tvar("p"), tvar("acc")})),
         a_mem(tvar("addr"), tvar("w"))});
    c.result = intern("res");
    c.post = a_star({a_reg("cur_privilege", tvar("p")),
                     a_pred("pmp_entries", {tvar("es")}),
                     a_mem(tvar("addr"), tvar("w")),
                     a_pure(teq(tvar("res"), mvalue_t(tvar("w"))))});
    cfg.contracts[intern("mem_read")] = std::move(c);
  }
  {
    Contract c;
    c.params = {intern("addr"), intern("acc"), intern("v")};
    c.logic_vars = c.params;
    for (const char* vv : {"p", "es"}) c.logic_vars.push_back(intern(vv));
    c.pre = a_star(
        {a_pure(tpred("access_le", {tacc_t(kAccWrite), tvar("acc")})),
         a_pure(tand(aligned_term(tvar("addr")),
                     range_term(tvar("addr"), mem_size))),
         a_reg("cur_privilege", tvar("p")),
         a_pred("pmp_entries", {tvar("es")}),
         a_pure(tpred("pmp_access",
                      {tvar("addr"), tvar("es"), tvar("p"), tvar("acc")})),
         a_exists("w0", a_mem(tvar("addr"), tvar("w0")))});
    c.result = intern("res");
    c.post = a_star({a_reg("cur_privilege", tvar("p")),
                     a_pred("pmp_entries", {tvar("es")}),
                     a_mem(tvar("addr"), tvar("v")),
                     a_pure(teq(tvar("res"), mvalue_t(tint(0))))});
    cfg.contracts[intern("mem_write")] = std::move(c);
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

// ---------------------------------------------------------------------------
// Lemmas
// ---------------------------------------------------------------------------

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

  {
    std::vector<AssertionPtr> chunks;
    std::vector<std::string> names;
    TermVec comps;
    for (int k = 1; k < 32; ++k) {
      std::string g = "g" + std::to_string(k);
      names.push_back(g);
      chunks.push_back(a_reg(xreg(k), tvar(g)));
      comps.push_back(tvar(g));
    }
    std::vector<AssertionPtr> open_post = chunks;
    open_post.push_back(a_pure(teq(tvar("gws"), ttuple(comps))));
    add("open_GPRs", {}, a_pred("gprs", {tvar("gws")}),
        a_exists(names, a_star(open_post)),
        [](std::mt19937_64&) { return true; });
    add("close_GPRs", {}, a_exists(names, a_star(chunks)),
        a_pred("gprs", {ttuple(comps)}), [](std::mt19937_64&) { return true; });
  }
  {
    std::vector<AssertionPtr> chunks = {
        a_reg("pmp0cfg", tvar("pc0")), a_reg("pmpaddr0", tvar("pa0")),
        a_reg("pmp1cfg", tvar("pc1")), a_reg("pmpaddr1", tvar("pa1"))};
    TermPtr tuple = ttuple({ttuple({tvar("pc0"), tvar("pa0")}),
                            ttuple({tvar("pc1"), tvar("pa1")})});
    std::vector<AssertionPtr> open_post = chunks;
    open_post.push_back(a_pure(teq(tvar("pes"), tuple)));
    std::vector<std::string> names = {"pc0", "pa0", "pc1", "pa1"};
    add("open_PMP_entries", {}, a_pred("pmp_entries", {tvar("pes")}),
        a_exists(names, a_star(open_post)),
        [](std::mt19937_64&) { return true; });
    add("close_PMP_entries", {}, a_exists(names, a_star(chunks)),
        a_pred("pmp_entries", {tuple}), [](std::mt19937_64&) { return true; });
  }
  {
    // Trading PMP-authorized memory for a points-to chunk plus the wand
    // that recovers it.
    AssertionPtr wand =
        a_wand(a_exists("ewq", a_mem(tvar("eaddr"), tvar("ewq"))),
               a_pred("pmp_addr_access", {tvar("ees"), tvar("ep")}));
    add("extract_PMP_ptsto", {"eaddr", "eacc"},
        a_star({a_pred("pmp_addr_access", {tvar("ees"), tvar("ep")}),
                a_pure(range_term(tvar("eaddr"), b.mem_size)),
                a_pure(tpred("pmp_access", {tvar("eaddr"), tvar("ees"),
                                            tvar("ep"), tvar("eacc")}))}),
        a_exists("ew", a_star(a_mem(tvar("eaddr"), tvar("ew")), wand)),
        [bp](std::mt19937_64& rng) {
          // The executable meaning of pmp_access matches pmp_check.
          std::uniform_int_distribution<int64_t> ad(0, bp->mem_size);
          std::uniform_int_distribution<int> byte(0, 255);
          std::uniform_int_distribution<int> small(0, 3);
          PmpEntries es = {PmpEntry{static_cast<uint8_t>(byte(rng)),
                                    static_cast<uint32_t>(ad(rng))},
                           PmpEntry{static_cast<uint8_t>(byte(rng)),
                                    static_cast<uint32_t>(ad(rng))}};
          int64_t addr = ad(rng);
          auto acc = static_cast<AccessTag>(small(rng));
          auto priv = static_cast<PrivTag>(small(rng) & 1);
          PmpVariant var{bp->opts.reverse_pmp_priority,
                         bp->opts.pmp_always_allow};
          Value es_v = Value::tuple(
              {Value::tuple(
                   {Value::integer(es[0].cfg), Value::integer(es[0].addr)}),
               Value::tuple(
                   {Value::integer(es[1].cfg), Value::integer(es[1].addr)})});
          Value got = bp->preds.at("pmp_access")
                          .eval({Value::integer(addr), es_v, priv_value(priv),
                                 access_value(acc)});
          bool want =
              pmp_check(addr, 4, acc, priv, es, var) == PmpResult::Allow;
          return got.is_bool() && got.as_bool() == want;
        });
    AssertionPtr rwand =
        a_wand(a_exists("rwq", a_mem(tvar("raddr"), tvar("rwq"))),
               a_pred("pmp_addr_access", {tvar("res_"), tvar("rp")}));
    add("return_PMP_ptsto", {"raddr"},
        a_exists("rw", a_star(a_mem(tvar("raddr"), tvar("rw")), rwand)),
        a_pred("pmp_addr_access", {tvar("res_"), tvar("rp")}),
        [](std::mt19937_64&) { return true; });
  }
}

// ---------------------------------------------------------------------------
// Runtime system
// ---------------------------------------------------------------------------

void build_foreign(Bundle& b) {
  b.foreign[intern("read_ram")] = ForeignImpl{
      [](MachineState& s, const ValueVec& args) -> ExecResult {
        int64_t addr = args[0].as_int();
        if (addr < 0 || addr + 4 > s.mem_size) {
          return ExecResult::fail("read_ram: address out of range");
        }
        if (s.log_accesses) s.access_log.push_back({addr, false});
        return ExecResult::ok(Value::integer(s.load_word_le(addr)));
      },
      false,
      nullptr};
  b.foreign[intern("write_ram")] = ForeignImpl{
      [](MachineState& s, const ValueVec& args) -> ExecResult {
        int64_t addr = args[0].as_int();
        if (addr < 0 || addr + 4 > s.mem_size) {
          return ExecResult::fail("write_ram: address out of range");
        }
        if (s.log_accesses) s.access_log.push_back({addr, true});
        s.store_word_le(addr, static_cast<uint32_t>(args[1].as_int()));
        return ExecResult::ok(Value::unit());
      },
      false,
      nullptr};
  auto decode_value = [](const ValueVec& args) -> Value {
    return decode_rv32(static_cast<uint32_t>(args[0].as_int()));
  };
  b.foreign[intern("decode")] = ForeignImpl{
      [decode_value](MachineState&, const ValueVec& args) -> ExecResult {
        return ExecResult::ok(decode_value(args));
      },
      true, decode_value};
}

std::optional<PmpEntries> entries_from_value(const Value& es) {
  if (!es.is_tuple() || es.fields().size() != 2) return std::nullopt;
  PmpEntries out;
  for (int i = 0; i < 2; ++i) {
    const Value& e = es.fields()[static_cast<size_t>(i)];
    if (!e.is_tuple() || e.fields().size() != 2) return std::nullopt;
    out[static_cast<size_t>(i)].cfg =
        static_cast<uint8_t>(e.fields()[0].as_int());
    out[static_cast<size_t>(i)].addr =
        static_cast<uint32_t>(e.fields()[1].as_int());
  }
  return out;
}

void build_preds(Bundle& b) {
  const BundleOptions opts = b.opts;
  b.preds["pmp_access"] = PurePred{
      [opts](const ValueVec& args) {
        auto es = entries_from_value(args[1]);
        if (!es) return Value::boolean(false);
        auto priv = static_cast<PrivTag>(args[2].enum_tag());
        auto acc = static_cast<AccessTag>(args[3].enum_tag());
        PmpVariant var{opts.reverse_pmp_priority, opts.pmp_always_allow};
        return Value::boolean(pmp_check(args[0].as_int(), 4, acc, priv, *es,
                                        var) == PmpResult::Allow);
      },
      [opts](const TermVec& args) -> TermPtr {
        const TermPtr& es = args[1];
        if (es->k != Term::K::Tuple || es->kids.size() != 2) return nullptr;
        const TermPtr& e0 = es->kids[0];
        const TermPtr& e1 = es->kids[1];
        if (e0->k != Term::K::Tuple || e0->kids.size() != 2 ||
            e1->k != Term::K::Tuple || e1->kids.size() != 2) {
          return nullptr;
        }
        return pmp_allow_term(args[0], args[3], args[2], e0->kids[0],
                              e0->kids[1], e1->kids[0], e1->kids[1], opts);
      }};
  b.preds["access_le"] = PurePred{
      [](const ValueVec& args) {
        auto a = static_cast<AccessTag>(args[0].enum_tag());
        auto t = static_cast<AccessTag>(args[1].enum_tag());
        bool le = a == t || (a == kAccRead && t == kAccReadWrite) ||
                  (a == kAccWrite && t == kAccReadWrite) ||
                  (a == kAccRead && t == kAccExecute);
        return Value::boolean(le);
      },
      [](const TermVec& args) -> TermPtr {
        const TermPtr& a = args[0];
        const TermPtr& t = args[1];
        return tor(
            teq(a, t),
            tor(tand(teq(a, tacc_t(kAccRead)), teq(t, tacc_t(kAccReadWrite))),
                tor(tand(teq(a, tacc_t(kAccWrite)),
                         teq(t, tacc_t(kAccReadWrite))),
                    tand(teq(a, tacc_t(kAccRead)),
                         teq(t, tacc_t(kAccExecute))))));
      }};
}

}  // namespace

std::unique_ptr<Bundle> build_bundle(const BundleOptions& opts) {
  auto b = std::make_unique<Bundle>();
  b->opts = opts;
  b->mem_size = opts.mem_size;
  b->regs.add("pc");
  for (int k = 1; k < 32; ++k) b->regs.add(xreg(k));
  b->regs.add("cur_privilege");
  b->regs.add("mstatus");
  b->regs.add("mtvec");
  b->regs.add("mcause");
  b->regs.add("mepc");
  b->regs.add("pmp0cfg");
  b->regs.add("pmp1cfg");
  b->regs.add("pmpaddr0");
  b->regs.add("pmpaddr1");
  build_program(b->program, opts);
  build_preds(*b);
  build_foreign(*b);
  build_lemmas(*b);
  build_uc_contracts(b->config);
  build_block_contracts(b->block_config, opts.mem_size);
  b->config.program = &b->program;
  b->config.lemmas = &b->lemmas;
  b->config.preds = &b->preds;
  b->config.pure_foreign[intern("decode")] =
      b->foreign[intern("decode")].pure_eval;
  b->block_config.program = &b->program;
  b->block_config.lemmas = &b->lemmas;
  b->block_config.preds = &b->preds;
  b->block_config.pure_foreign[intern("decode")] =
      b->foreign[intern("decode")].pure_eval;
  return b;
}

MachineState make_state(const Bundle& b) {
  MachineState s = MachineState::make_bytes(&b.regs, b.mem_size);
  s.reg("cur_privilege") = priv_value(kPrivMachine);
  s.reg("mstatus") = priv_value(kPrivUser);
  return s;
}

PmpEntries entries_of(const MachineState& s) {
  PmpEntries es;
  es[0].cfg = static_cast<uint8_t>(s.reg("pmp0cfg").as_int());
  es[0].addr = static_cast<uint32_t>(s.reg("pmpaddr0").as_int());
  es[1].cfg = static_cast<uint8_t>(s.reg("pmp1cfg").as_int());
  es[1].addr = static_cast<uint32_t>(s.reg("pmpaddr1").as_int());
  return es;
}

PrivTag privilege_of(const MachineState& s) {
  return static_cast<PrivTag>(s.reg("cur_privilege").enum_tag());
}

void csr_write(const Bundle& b, MachineState& s, const std::string& csr,
               uint32_t value) {
  auto num = csr_number(csr);
  if (!num) throw std::runtime_error("unknown csr: " + csr);
  Interp in(b.program, b.foreign, b.preds, s);
  if (privilege_of(s) != kPrivMachine) {
    in.call("trap", {Value::integer(2)});
    return;
  }
  ExecResult r =
      in.call("csr_rw", {Value::integer(*num), Value::integer(value)});
  if (r.failed) throw std::runtime_error("csr_rw failed: " + r.message);
}

void trap_enter(const Bundle& b, MachineState& s, uint32_t cause) {
  Interp in(b.program, b.foreign, b.preds, s);
  in.call("trap", {Value::integer(cause)});
}

void mret_return(const Bundle& b, MachineState& s) {
  Interp in(b.program, b.foreign, b.preds, s);
  in.call("exec_mret", {});
}

}  // namespace contractile::rv
