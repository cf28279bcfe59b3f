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

#include <memory>
#include <optional>

#include "contractile/machine.hpp"
#include "contractile/symexec.hpp"

namespace contractile::mc {

/// Capability: authority over the word-address range [begin, end]
/// (inclusive) with a movable cursor.
struct Capability {
  PermTag perm = kPermO;
  int64_t begin = 0;
  int64_t end = 0;
  int64_t cursor = 0;
};

/// Permission order: O below everything, R below RW, E above only O.
bool subperm(PermTag p, PermTag q);
bool within_bounds(const Capability& c);

// Machine words are either integers or capabilities.
Value int_word(int64_t z);
Value cap_word(const Capability& c);
std::optional<Capability> as_cap(const Value& w);
std::optional<int64_t> as_int(const Value& w);

// Instruction values. Registers are mcreg enum tags 0..3.
Value i_fail();
Value i_halt();
Value i_store(uint8_t rs, uint8_t rb, int64_t imm);
Value i_load(uint8_t rd, uint8_t rb, int64_t imm);
Value i_jalr(uint8_t rd, uint8_t rs);
Value i_move(uint8_t rd, uint8_t rs);
Value i_lea(uint8_t rd, int64_t imm);
Value i_restrict(uint8_t rd, uint8_t perm_code);  // 0=O 1=R 2=RW
Value i_subseg(uint8_t rd, uint8_t r1, uint8_t r2);
Value i_add(uint8_t rd, uint8_t r1, uint8_t r2);
Value i_addi(uint8_t rd, uint8_t rs, int64_t imm);
Value i_bnez(uint8_t rs, int64_t imm);

/// Encoding: quasi-opaque packed integer; any word outside the defined
/// opcode space decodes to the fail instruction.
Value decode_mc(int64_t w);
int64_t encode_mc(const Value& instr);

/// The capability-machine definition: executable program, verification
/// configuration, runtime system, and test oracles.
struct Bundle {
  Program program;
  RegTable regs;  // pc, r0..r3
  LemmaTable lemmas;
  PurePredTable preds;
  ForeignTable foreign;
  VerifyConfig config;
  int64_t mem_size = 1024;
};

struct BundleOptions {
  int64_t mem_size = 1024;
  // Mutations used by the acceptance suite.
  bool omit_store_write_check = false;
  bool omit_store_move_cursor = false;
};

std::unique_ptr<Bundle> build_bundle(const BundleOptions& opts = {});

MachineState make_state(const Bundle& b);

/// Executable word-safety oracle: every capability transitively reachable
/// from `w` has a valid (or empty) range. Used by lemma oracles and the
/// differential harness.
bool safe_word_oracle(const MachineState& s, const Value& w);

/// Word addresses transitively reachable with authority from the current
/// register file (closure through memory until fixpoint).
std::vector<bool> authority_footprint(const MachineState& s);

}  // namespace contractile::mc
