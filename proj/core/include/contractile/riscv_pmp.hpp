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

#include <array>
#include <memory>
#include <optional>

#include "contractile/machine.hpp"
#include "contractile/symexec.hpp"

namespace contractile::rv {

/// One PMP configuration byte: bit0=R, bit1=W, bit2=X, bits3..4=A
/// (00=OFF, 01=TOR), bit7=L. Bits 5 and 6 read as zero.
struct PmpCfg {
  bool locked = false;
  bool tor = false;  // address-matching mode: OFF when false
  bool x = false;
  bool w = false;
  bool r = false;
};

uint8_t pack_cfg(const PmpCfg& c);
PmpCfg unpack_cfg(uint8_t b);
/// Write normalization: clears bits 5/6 and folds unsupported A modes to OFF.
uint8_t normalize_cfg_byte(uint8_t b);

struct PmpEntry {
  uint8_t cfg = 0;
  uint32_t addr = 0;
};
using PmpEntries = std::array<PmpEntry, 2>;

/// True iff [addr, addr+width) is contained in [lo, hi).
bool pmp_match_entry(int64_t addr, int64_t width, int64_t lo, int64_t hi);

enum class PmpResult : uint8_t { Allow, Deny };

struct PmpVariant {
  bool reverse_priority = false;  // scan entry 1 first, rebasing TOR at 0
  bool always_allow = false;
};

/// Access check: every byte is decided by the first TOR entry containing
/// it ([pmpaddr_{i-1} or 0, pmpaddr_i)); machine mode passes unlocked
/// matches and unmatched bytes, other modes need the RWX bit for the
/// access type (ReadWrite needs both R and W).
PmpResult pmp_check(int64_t addr, int64_t width, AccessTag acc, PrivTag priv,
                    const PmpEntries& entries, const PmpVariant& var = {});

// Instruction values. Registers are integers 0..31.
Value r_lui(int64_t rd, int64_t imm);    // imm already shifted (bits 31:12)
Value r_auipc(int64_t rd, int64_t imm);  // imm already shifted
Value r_jal(int64_t rd, int64_t imm);
Value r_jalr(int64_t rd, int64_t rs1, int64_t imm);
Value r_branch(int64_t funct3, int64_t rs2, int64_t rs1, int64_t imm);
Value r_lw(int64_t rd, int64_t rs1, int64_t imm);
Value r_sw(int64_t rs2, int64_t rs1, int64_t imm);
// op: funct3, +8 for the funct7-bit-30 variants (SRAI / SUB / SRA).
Value r_opimm(int64_t op, int64_t rd, int64_t rs1, int64_t imm);
Value r_opreg(int64_t op, int64_t rd, int64_t rs1, int64_t rs2);
Value r_csrrw(int64_t rd, int64_t rs1, int64_t csr);
Value r_ecall();
Value r_mret();
Value r_illegal(uint32_t w);

/// Standard RV32I decode; anything unsupported becomes Illegal(w).
Value decode_rv32(uint32_t w);
uint32_t encode_rv32(const Value& instr);

/// CSR numbers used by the encoder (standard assignments).
std::optional<uint32_t> csr_number(const std::string& name);
std::optional<std::string> csr_name(uint32_t number);

struct BundleOptions {
  int64_t mem_size = 4096;  // bytes
  // Mutations used by the acceptance suite.
  bool reverse_pmp_priority = false;
  bool skip_csr_lock_check = false;
  bool pmp_always_allow = false;
};

/// RV32I+PMP definition: executable program, the step-contract
/// verification configuration, and the basic-block configuration (register
/// and memory access resolved for known code).
struct Bundle {
  Program program;
  RegTable regs;
  LemmaTable lemmas;
  PurePredTable preds;
  ForeignTable foreign;
  VerifyConfig config;        // step-contract verification
  VerifyConfig block_config;  // basic-block verification
  int64_t mem_size = 4096;
  BundleOptions opts;
};

std::unique_ptr<Bundle> build_bundle(const BundleOptions& opts = {});

/// Reset state: machine mode, pc 0, all CSRs and GPRs zero.
MachineState make_state(const Bundle& b);

PmpEntries entries_of(const MachineState& s);
PrivTag privilege_of(const MachineState& s);

// State-transforming operations, run through the executable definition.
// A privilege violation takes the illegal-instruction trap.
void csr_write(const Bundle& b, MachineState& s, const std::string& csr,
               uint32_t value);
void trap_enter(const Bundle& b, MachineState& s, uint32_t cause);
void mret_return(const Bundle& b, MachineState& s);

/// The symbolic term of the PMP decision for a 4-byte access, shared by
/// the executable definition and the pmp_access predicate unfolding.
TermPtr pmp_allow_term(TermPtr addr, TermPtr acc, TermPtr priv, TermPtr c0,
                       TermPtr a0, TermPtr c1, TermPtr a1,
                       const BundleOptions& opts);

}  // namespace contractile::rv
