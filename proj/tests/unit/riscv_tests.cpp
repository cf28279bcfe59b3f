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

#include <random>

#include "contractile/riscv_pmp.hpp"
#include "doctest.h"

using namespace contractile;
using namespace contractile::rv;

namespace {

const Bundle& bundle() {
  static auto b = build_bundle();
  return *b;
}

// Brute-force reference: decide every byte independently, walking the
// priority-ordered entries. Written against the rules, not the code.
bool oracle_byte(int64_t b, AccessTag acc, PrivTag priv, const PmpEntries& es) {
  struct Range { uint8_t cfg; int64_t lo, hi; };
  Range ranges[2] = {{es[0].cfg, 0, static_cast<int64_t>(es[0].addr)},
                     {es[1].cfg, static_cast<int64_t>(es[0].addr),
                      static_cast<int64_t>(es[1].addr)}};
  for (const Range& r : ranges) {
    bool tor = (r.cfg & 0x18) == 0x08;
    if (!tor) continue;
    if (!(r.lo <= b && b < r.hi)) continue;
    bool locked = r.cfg & 0x80;
    if (priv == kPrivMachine && !locked) return true;
    switch (acc) {
      case kAccRead: return r.cfg & 1;
      case kAccWrite: return r.cfg & 2;
      case kAccExecute: return r.cfg & 4;
      case kAccReadWrite: return (r.cfg & 1) && (r.cfg & 2);
    }
  }
  return priv == kPrivMachine;
}

bool oracle_check(int64_t addr, int64_t width, AccessTag acc, PrivTag priv,
                  const PmpEntries& es) {
  for (int64_t b = addr; b < addr + width; ++b) {
    if (!oracle_byte(b, acc, priv, es)) return false;
  }
  return true;
}

PmpEntries femto_entries(uint32_t mem_size = 4096) {
  return PmpEntries{PmpEntry{0x00, 88}, PmpEntry{0x0F, mem_size}};
}

Outcome step(MachineState& s) {
  return run_fde_step(bundle().program, bundle().foreign, bundle().preds, s);
}

}  // namespace

TEST_CASE("pmp_match_entry is interval containment") {
  CHECK(pmp_match_entry(84, 4, 0, 88));
  CHECK_FALSE(pmp_match_entry(86, 4, 0, 88));  // straddles
  CHECK_FALSE(pmp_match_entry(0, 1, 0, 0));    // empty region
}

TEST_CASE("pmp_check matches the femtokernel policy examples") {
  PmpEntries es = femto_entries();
  CHECK(pmp_check(84, 4, kAccWrite, kPrivUser, es) == PmpResult::Deny);
  CHECK(pmp_check(84, 4, kAccWrite, kPrivMachine, es) == PmpResult::Allow);
  CHECK(pmp_check(100, 4, kAccExecute, kPrivUser, es) == PmpResult::Allow);
  // No matching entry: machine only.
  PmpEntries off = {PmpEntry{0, 0}, PmpEntry{0, 0}};
  CHECK(pmp_check(10, 4, kAccRead, kPrivUser, off) == PmpResult::Deny);
  CHECK(pmp_check(10, 4, kAccRead, kPrivMachine, off) == PmpResult::Allow);
}

TEST_CASE("pmp_check agrees with the per-byte oracle on a sample grid") {
  const uint8_t cfgs[] = {0x00, 0x07, 0x0F, 0x8F, 0x98, 0x18, 0x1F, 0x9F};
  for (uint8_t c0 : cfgs) {
    for (uint8_t c1 : cfgs) {
      for (uint32_t a0 = 0; a0 <= 24; a0 += 4) {
        for (uint32_t a1 = 0; a1 <= 24; a1 += 6) {
          PmpEntries es = {PmpEntry{c0, a0}, PmpEntry{c1, a1}};
          for (int64_t addr = 0; addr < 16; ++addr) {
            for (int64_t width : {1, 4}) {
              for (int pv = 0; pv < 2; ++pv) {
                for (int ac = 0; ac < 4; ++ac) {
                  auto acc = static_cast<AccessTag>(ac);
                  auto priv = static_cast<PrivTag>(pv);
                  bool got = pmp_check(addr, width, acc, priv, es) ==
                             PmpResult::Allow;
                  bool want = oracle_check(addr, width, acc, priv, es);
                  REQUIRE(got == want);
                }
              }
            }
          }
        }
      }
    }
  }
}

TEST_CASE("the symbolic pmp decision term evaluates like pmp_check") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int64_t> ad(0, 64);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> small(0, 3);
  for (int i = 0; i < 20000; ++i) {
    PmpEntries es = {PmpEntry{static_cast<uint8_t>(byte(rng)),
                              static_cast<uint32_t>(ad(rng))},
                     PmpEntry{static_cast<uint8_t>(byte(rng)),
                              static_cast<uint32_t>(ad(rng))}};
    int64_t addr = ad(rng);
    auto acc = static_cast<AccessTag>(small(rng));
    auto priv = static_cast<PrivTag>(small(rng) & 1);
    TermPtr t = pmp_allow_term(tint(addr), tenum(Enums::access(), acc),
                               tenum(Enums::priv(), priv), tint(es[0].cfg),
                               tint(es[0].addr), tint(es[1].cfg),
                               tint(es[1].addr), BundleOptions{});
    Value v = eval_term(t, nullptr, &bundle().preds);
    bool want = pmp_check(addr, 4, acc, priv, es) == PmpResult::Allow;
    REQUIRE(v.is_bool());
    REQUIRE(v.as_bool() == want);
  }
}

TEST_CASE("rv32i decode matches hand-assembled words") {
  CHECK(decode_rv32(0x00000013) == r_opimm(0, 0, 0, 0));  // canonical NOP
  CHECK(decode_rv32(0x30200073) == r_mret());
  CHECK(decode_rv32(0xFFFFFFFF) == r_illegal(0xFFFFFFFF));
  CHECK(decode_rv32(0x00500093) == r_opimm(0, 1, 0, 5));   // addi x1,x0,5
  CHECK(decode_rv32(0x00000097) == r_auipc(1, 0));         // auipc ra,0
  CHECK(decode_rv32(0x05808093) == r_opimm(0, 1, 1, 88));  // addi ra,ra,88
  CHECK(decode_rv32(0x3B009073) == r_csrrw(0, 1, 0x3B0));
  CHECK(decode_rv32(0x000010B7) == r_lui(1, 4096));  // lui ra,1
  CHECK(decode_rv32(0xF0008093) == r_opimm(0, 1, 1, -256));
  CHECK(decode_rv32(0x00C0A083) == r_lw(1, 1, 12));  // lw ra,12(ra)
  CHECK(decode_rv32(0x0000006F) == r_jal(0, 0));     // jal x0,0
  CHECK(decode_rv32(0x00000073) == r_ecall());
  CHECK(decode_rv32(0x00000000) == r_illegal(0));
  // Encoding is the inverse on these.
  CHECK(encode_rv32(r_opimm(0, 0, 0, 0)) == 0x00000013);
  CHECK(encode_rv32(r_mret()) == 0x30200073);
  CHECK(encode_rv32(r_lw(1, 1, 12)) == 0x00C0A083);
  CHECK(encode_rv32(r_csrrw(0, 1, 0x305)) == 0x30509073);
}

TEST_CASE("random well-formed instructions round-trip the codec") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int64_t> reg(0, 31);
  std::uniform_int_distribution<int64_t> imm12(-2048, 2047);
  std::uniform_int_distribution<int64_t> sh(0, 31);
  std::uniform_int_distribution<int> kind(0, 12);
  const int64_t iops[] = {0, 2, 3, 4, 6, 7, 1, 5, 13};
  const int64_t rops[] = {0, 8, 1, 2, 3, 4, 5, 13, 6, 7};
  const int64_t bops[] = {0, 1, 4, 5, 6, 7};
  for (int i = 0; i < 20000; ++i) {
    Value v = r_ecall();
    switch (kind(rng)) {
      case 0: v = r_lui(reg(rng), (imm12(rng) & 0xFFFFF) << 12); break;
      case 1: v = r_auipc(reg(rng), (imm12(rng) & 0xFFFFF) << 12); break;
      case 2: v = r_jal(reg(rng), (imm12(rng) * 2)); break;
      case 3: v = r_jalr(reg(rng), reg(rng), imm12(rng)); break;
      case 4:
        v = r_branch(bops[static_cast<size_t>(rng() % 6)], reg(rng), reg(rng),
                     (imm12(rng) & ~1ll));
        break;
      case 5: v = r_lw(reg(rng), reg(rng), imm12(rng)); break;
      case 6: v = r_sw(reg(rng), reg(rng), imm12(rng)); break;
      case 7: {
        int64_t op = iops[rng() % 9];
        int64_t imm = (op == 1 || op == 5 || op == 13) ? sh(rng) : imm12(rng);
        v = r_opimm(op, reg(rng), reg(rng), imm);
        break;
      }
      case 8:
        v = r_opreg(rops[rng() % 10], reg(rng), reg(rng), reg(rng));
        break;
      case 9: v = r_csrrw(reg(rng), reg(rng), rng() % 4096); break;
      case 10: v = r_ecall(); break;
      case 11: v = r_mret(); break;
      default: v = r_sw(reg(rng), reg(rng), imm12(rng)); break;
    }
    REQUIRE(decode_rv32(encode_rv32(v)) == v);
  }
}

TEST_CASE("csr_write packs pmpcfg0 into the two entry bytes") {
  MachineState s = make_state(bundle());
  csr_write(bundle(), s, "pmpcfg0", 0xf00);
  CHECK(s.reg("pmp0cfg").as_int() == 0x00);
  CHECK(s.reg("pmp1cfg").as_int() == 0x0f);
  csr_write(bundle(), s, "pmpaddr0", 88);
  CHECK(entries_of(s)[0].addr == 88);
}

TEST_CASE("csr_write from user mode takes the illegal-instruction trap") {
  MachineState s = make_state(bundle());
  s.reg("cur_privilege") = priv_value(kPrivUser);
  s.reg("mtvec") = Value::integer(72);
  s.reg("pc") = Value::integer(100);
  csr_write(bundle(), s, "pmpaddr0", 88);
  CHECK(privilege_of(s) == kPrivMachine);
  CHECK(s.reg("pc").as_int() == 72);
  CHECK(s.reg("mcause").as_int() == 2);
  CHECK(s.reg("mepc").as_int() == 100);
  CHECK(entries_of(s)[0].addr == 0);  // the write never happened
}

TEST_CASE("locked entries ignore writes, including the TOR base register") {
  MachineState s = make_state(bundle());
  csr_write(bundle(), s, "pmpaddr0", 40);
  csr_write(bundle(), s, "pmpcfg0", 0x8F08);  // entry1 locked TOR, entry0 TOR
  CHECK(s.reg("pmp0cfg").as_int() == 0x08);
  CHECK(s.reg("pmp1cfg").as_int() == 0x8F);
  // entry1 locked: its cfg and addr are write-ignored, and so is the
  // preceding address register (TOR base).
  csr_write(bundle(), s, "pmpaddr1", 99);
  CHECK(entries_of(s)[1].addr == 0);
  csr_write(bundle(), s, "pmpaddr0", 77);
  CHECK(entries_of(s)[0].addr == 40);
  csr_write(bundle(), s, "pmpcfg0", 0x0707);
  CHECK(s.reg("pmp0cfg").as_int() == 0x07);  // entry0 unlocked: applied
  CHECK(s.reg("pmp1cfg").as_int() == 0x8F);  // entry1 locked: ignored
}

TEST_CASE("lock property: writes to locked entries never change them") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<uint32_t> word(0, 0xFFFFFFFF);
  for (int i = 0; i < 2000; ++i) {
    MachineState s = make_state(bundle());
    s.reg("pmp0cfg") = Value::integer(normalize_cfg_byte(byte(rng)));
    s.reg("pmp1cfg") = Value::integer(normalize_cfg_byte(byte(rng)));
    s.reg("pmpaddr0") = Value::integer(word(rng));
    s.reg("pmpaddr1") = Value::integer(word(rng));
    PmpEntries before = entries_of(s);
    bool l0 = before[0].cfg & 0x80;
    bool l1 = before[1].cfg & 0x80;
    bool tor1 = (before[1].cfg & 0x18) == 0x08;
    const char* csrs[] = {"pmpcfg0", "pmpaddr0", "pmpaddr1"};
    std::string csr = csrs[rng() % 3];
    csr_write(bundle(), s, csr, word(rng));
    PmpEntries after = entries_of(s);
    if (l0) {
      CHECK(after[0].cfg == before[0].cfg);
      CHECK(after[0].addr == before[0].addr);
    }
    if (l1) {
      CHECK(after[1].cfg == before[1].cfg);
      CHECK(after[1].addr == before[1].addr);
      if (tor1) CHECK(after[0].addr == before[0].addr);
    }
  }
}

TEST_CASE("trap_enter and mret_return follow the privileged transfer rules") {
  MachineState s = make_state(bundle());
  s.reg("cur_privilege") = priv_value(kPrivUser);
  s.reg("mtvec") = Value::integer(72);
  s.reg("pc") = Value::integer(100);
  trap_enter(bundle(), s, 7);
  CHECK(s.reg("pc").as_int() == 72);
  CHECK(privilege_of(s) == kPrivMachine);
  CHECK(s.reg("mepc").as_int() == 100);
  CHECK(s.reg("mcause").as_int() == 7);
  CHECK(s.reg("mstatus").enum_tag() == kPrivUser);

  s.reg("mepc") = Value::integer(88);
  mret_return(bundle(), s);
  CHECK(privilege_of(s) == kPrivUser);
  CHECK(s.reg("pc").as_int() == 88);
  CHECK(s.reg("mstatus").enum_tag() == kPrivUser);

  // MRET in user mode traps.
  MachineState s2 = make_state(bundle());
  s2.reg("cur_privilege") = priv_value(kPrivUser);
  s2.reg("mtvec") = Value::integer(72);
  mret_return(bundle(), s2);
  CHECK(privilege_of(s2) == kPrivMachine);
  CHECK(s2.reg("mcause").as_int() == 2);
}

TEST_CASE("read_ram and write_ram are little-endian with a range guard") {
  MachineState s = make_state(bundle());
  Interp in(bundle().program, bundle().foreign, bundle().preds, s);
  ExecResult r = in.call("write_ram", {Value::integer(84), Value::integer(42)});
  CHECK_FALSE(r.failed);
  CHECK(s.bytes[84] == 42);
  CHECK(s.bytes[85] == 0);
  r = in.call("read_ram", {Value::integer(84)});
  CHECK_FALSE(r.failed);
  CHECK(r.value == Value::integer(42));
  r = in.call("read_ram", {Value::integer(s.mem_size)});
  CHECK(r.failed);
}

TEST_CASE("basic instruction semantics: addi, store, traps") {
  MachineState s = make_state(bundle());
  s.store_word_le(0, encode_rv32(r_opimm(0, 1, 0, 5)));  // addi x1,x0,5
  Outcome o = step(s);
  CHECK(o.is_value());
  CHECK(s.reg("x1").as_int() == 5);
  CHECK(s.reg("pc").as_int() == 4);

  // User-mode store into the protected region traps.
  MachineState s2 = make_state(bundle());
  csr_write(bundle(), s2, "pmpaddr0", 88);
  csr_write(bundle(), s2, "pmpaddr1", 4096);
  csr_write(bundle(), s2, "pmpcfg0", 0xf00);
  s2.reg("cur_privilege") = priv_value(kPrivUser);
  s2.reg("mtvec") = Value::integer(72);
  s2.reg("pc") = Value::integer(100);
  s2.store_word_le(100, encode_rv32(r_sw(1, 0, 84)));  // sw x1,84(x0)
  Outcome o2 = step(s2);
  CHECK(o2.is_value());
  CHECK(privilege_of(s2) == kPrivMachine);  // trapped, not failed
  CHECK(s2.reg("pc").as_int() == 72);
  CHECK(s2.reg("mcause").as_int() == 7);
  CHECK(s2.reg("mepc").as_int() == 100);

  // Misaligned load takes the access-fault cause.
  MachineState s3 = make_state(bundle());
  s3.reg("mtvec") = Value::integer(64);
  s3.store_word_le(0, encode_rv32(r_lw(1, 0, 2)));
  Outcome o3 = step(s3);
  CHECK(o3.is_value());
  CHECK(s3.reg("mcause").as_int() == 5);
  CHECK(s3.reg("pc").as_int() == 64);
}

TEST_CASE("riscv bundle program is wellformed") {
  CHECK(check_wellformed(bundle().program).empty());
}

TEST_CASE("every contracted riscv function verifies") {
  BundleReport rep = verify_all(bundle().config);
  for (const auto& f : rep.functions) {
    INFO(f.function, ": ", status_name(f.result.status), " ", f.result.message,
         "\n", f.result.verified() ? "" : vc_str(f.result.vc));
    CHECK(f.result.verified());
  }
  CHECK(rep.functions.size() >= 17);
}

TEST_CASE("riscv lemma oracles hold on random ground instances") {
  std::mt19937_64 rng(71);
  for (const auto& [name, lem] : bundle().lemmas) {
    for (int i = 0; i < 1000; ++i) {
      INFO("lemma ", sym_name(name));
      REQUIRE(lem.oracle(rng));
    }
  }
}
