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

#include "contractile/minimalcaps.hpp"
#include "doctest.h"

using namespace contractile;
using namespace contractile::mc;

namespace {

const Bundle& bundle() {
  static auto b = build_bundle();
  return *b;
}

Outcome step(MachineState& s) {
  return run_fde_step(bundle().program, bundle().foreign, bundle().preds, s);
}

}  // namespace

TEST_CASE("subperm is the expected partial order") {
  // Oracle: reflexive-transitive closure of O<R, R<RW, O<E.
  bool expected[4][4] = {};
  for (int p = 0; p < 4; ++p) expected[p][p] = true;
  expected[kPermO][kPermR] = true;
  expected[kPermO][kPermRW] = true;
  expected[kPermO][kPermE] = true;
  expected[kPermR][kPermRW] = true;
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      CHECK(subperm(static_cast<PermTag>(p), static_cast<PermTag>(q)) ==
            expected[p][q]);
    }
  }
  CHECK(subperm(kPermR, kPermRW));
  CHECK(subperm(kPermRW, kPermRW));
  CHECK_FALSE(subperm(kPermRW, kPermR));
  // Partial order laws over the 4-element set.
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      auto pp = static_cast<PermTag>(p);
      auto qq = static_cast<PermTag>(q);
      if (subperm(pp, qq) && subperm(qq, pp)) CHECK(p == q);
      for (int r = 0; r < 4; ++r) {
        auto rr = static_cast<PermTag>(r);
        if (subperm(pp, qq) && subperm(qq, rr)) CHECK(subperm(pp, rr));
      }
    }
  }
}

TEST_CASE("within_bounds is inclusive at the end address") {
  CHECK(within_bounds({kPermRW, 0, 10, 10}));
  CHECK_FALSE(within_bounds({kPermRW, 0, 10, 11}));
  CHECK_FALSE(within_bounds({kPermRW, 5, 4, 5}));
}

TEST_CASE("instruction encoding round-trips over the full space") {
  CHECK(encode_mc(i_fail()) == 0);
  CHECK(decode_mc(0) == i_fail());
  CHECK(decode_mc(encode_mc(i_store(1, 0, 5))) == i_store(1, 0, 5));
  CHECK(decode_mc(1ll << 40) == i_fail());
  CHECK(decode_mc(-3) == i_fail());

  // Full space: all register/immediate combinations within +-128.
  for (uint8_t a = 0; a < 4; ++a) {
    for (uint8_t b = 0; b < 4; ++b) {
      CHECK(decode_mc(encode_mc(i_jalr(a, b))) == i_jalr(a, b));
      CHECK(decode_mc(encode_mc(i_move(a, b))) == i_move(a, b));
      for (uint8_t c = 0; c < 4; ++c) {
        CHECK(decode_mc(encode_mc(i_subseg(a, b, c))) == i_subseg(a, b, c));
        CHECK(decode_mc(encode_mc(i_add(a, b, c))) == i_add(a, b, c));
      }
      for (int64_t imm = -128; imm <= 128; imm += 16) {
        CHECK(decode_mc(encode_mc(i_store(a, b, imm))) == i_store(a, b, imm));
        CHECK(decode_mc(encode_mc(i_load(a, b, imm))) == i_load(a, b, imm));
        CHECK(decode_mc(encode_mc(i_addi(a, b, imm))) == i_addi(a, b, imm));
      }
    }
    for (int64_t imm = -128; imm <= 128; ++imm) {
      CHECK(decode_mc(encode_mc(i_lea(a, imm))) == i_lea(a, imm));
      CHECK(decode_mc(encode_mc(i_bnez(a, imm))) == i_bnez(a, imm));
    }
    for (uint8_t code = 0; code <= 2; ++code) {
      CHECK(decode_mc(encode_mc(i_restrict(a, code))) == i_restrict(a, code));
    }
  }
  CHECK(decode_mc(encode_mc(i_halt())) == i_halt());
}

TEST_CASE("store writes through a capability and advances pc") {
  MachineState s = make_state(bundle());
  s.reg("pc") = cap_word({kPermR, 0, 100, 0});
  s.words[0] = int_word(encode_mc(i_store(1, 0, 5)));
  s.reg("r0") = cap_word({kPermRW, 0, 100, 20});
  s.reg("r1") = int_word(7);
  Outcome o = step(s);
  CHECK(o.is_value());
  CHECK(s.words[25] == int_word(7));
  auto pc = as_cap(s.reg("pc"));
  REQUIRE(pc.has_value());
  CHECK(pc->cursor == 1);
}

TEST_CASE("store with read-only capability fail-stops") {
  MachineState s = make_state(bundle());
  s.reg("pc") = cap_word({kPermR, 0, 100, 0});
  s.words[0] = int_word(encode_mc(i_store(1, 0, 5)));
  s.reg("r0") = cap_word({kPermR, 0, 100, 20});
  s.reg("r1") = int_word(7);
  Outcome o = step(s);
  CHECK(o.is_failure());
  CHECK(o.message == "store requires write permission");
}

TEST_CASE("fetch requires read authority on the pc capability") {
  MachineState s = make_state(bundle());
  s.reg("pc") = cap_word({kPermO, 0, 100, 0});
  Outcome o = step(s);
  CHECK(o.is_failure());

  s.reg("pc") = int_word(4);
  o = step(s);
  CHECK(o.is_failure());
}

TEST_CASE("jalr through an enter capability unseals it to R") {
  MachineState s = make_state(bundle());
  s.reg("pc") = cap_word({kPermR, 0, 100, 3});
  s.words[3] = int_word(encode_mc(i_jalr(0, 1)));
  s.reg("r1") = cap_word({kPermE, 10, 20, 12});
  Outcome o = step(s);
  CHECK(o.is_value());
  auto pc = as_cap(s.reg("pc"));
  REQUIRE(pc.has_value());
  CHECK(pc->perm == kPermR);
  CHECK(pc->begin == 10);
  CHECK(pc->end == 20);
  CHECK(pc->cursor == 12);
  CHECK(s.reg("r0") == int_word(4));  // link = old cursor + 1
}

TEST_CASE("restrict narrows permission or fail-stops") {
  MachineState s = make_state(bundle());
  s.reg("pc") = cap_word({kPermR, 0, 100, 0});
  s.words[0] = int_word(encode_mc(i_restrict(0, 1)));  // to R
  s.reg("r0") = cap_word({kPermRW, 0, 9, 0});
  Outcome o = step(s);
  CHECK(o.is_value());
  auto c = as_cap(s.reg("r0"));
  REQUIRE(c.has_value());
  CHECK(c->perm == kPermR);

  // Widening R -> RW must fail.
  MachineState s2 = make_state(bundle());
  s2.reg("pc") = cap_word({kPermR, 0, 100, 0});
  s2.words[0] = int_word(encode_mc(i_restrict(0, 2)));
  s2.reg("r0") = cap_word({kPermR, 0, 9, 0});
  o = step(s2);
  CHECK(o.is_failure());
}

TEST_CASE("read_mem and write_mem enforce permission then bounds") {
  MachineState s = make_state(bundle());
  s.words[20] = int_word(7);
  Interp in(bundle().program, bundle().foreign, bundle().preds, s);
  ExecResult r = in.call("read_mem", {cap_word({kPermR, 0, 100, 20})});
  CHECK_FALSE(r.failed);
  CHECK(r.value == int_word(7));

  r = in.call("read_mem", {cap_word({kPermO, 0, 100, 20})});
  CHECK(r.failed);
  CHECK(r.message == "perm");

  r = in.call("read_mem", {cap_word({kPermRW, 0, 10, 11})});
  CHECK(r.failed);
  CHECK(r.message == "bounds");

  r = in.call("write_mem", {cap_word({kPermRW, 0, 100, 25}), int_word(9)});
  CHECK_FALSE(r.failed);
  CHECK(s.words[25] == int_word(9));

  r = in.call("write_mem", {cap_word({kPermR, 0, 100, 25}), int_word(9)});
  CHECK(r.failed);
  CHECK(r.message == "perm");

  r = in.call("write_mem", {cap_word({kPermE, 0, 100, 25}), int_word(9)});
  CHECK(r.failed);
  CHECK(r.message == "perm");
}

TEST_CASE("update_pc advances any non-enter capability cursor") {
  MachineState s = make_state(bundle());
  s.reg("pc") = cap_word({kPermR, 0, 100, 3});
  Interp in(bundle().program, bundle().foreign, bundle().preds, s);
  ExecResult r = in.call("update_pc", {});
  CHECK_FALSE(r.failed);
  CHECK(as_cap(s.reg("pc"))->cursor == 4);

  // The update itself is unchecked for enter capabilities; fetch enforces R.
  s.reg("pc") = cap_word({kPermE, 0, 100, 3});
  r = in.call("update_pc", {});
  CHECK_FALSE(r.failed);
  CHECK(as_cap(s.reg("pc"))->cursor == 4);

  s.reg("pc") = int_word(5);
  r = in.call("update_pc", {});
  CHECK(r.failed);
}

TEST_CASE("bundled program is wellformed") {
  CHECK(check_wellformed(bundle().program).empty());
}

TEST_CASE("exec_store contract verifies") {
  VerificationResult r = verify_contract(bundle().config, "exec_store");
  INFO(r.message);
  CHECK(r.verified());
  CHECK(r.stats.paths > 0);
}

TEST_CASE("every contracted capability-machine function verifies") {
  BundleReport rep = verify_all(bundle().config);
  for (const auto& f : rep.functions) {
    INFO(f.function, ": ", status_name(f.result.status), " ",
         f.result.message);
    CHECK(f.result.verified());
  }
  CHECK(rep.functions.size() >= 15);
}

TEST_CASE("dropping the write-permission check breaks store verification") {
  BundleOptions opts;
  opts.omit_store_write_check = true;
  auto mut = build_bundle(opts);
  VerificationResult r = verify_contract(mut->config, "exec_store");
  CHECK_FALSE(r.verified());
}

TEST_CASE("dropping the move_cursor ghost call breaks store verification") {
  BundleOptions opts;
  opts.omit_store_move_cursor = true;
  auto mut = build_bundle(opts);
  VerificationResult r = verify_contract(mut->config, "exec_store");
  CHECK(r.status == VerificationResult::Status::Failed);
}

TEST_CASE("lemma oracles hold on random ground instances") {
  std::mt19937_64 rng(7);
  for (const auto& [name, lem] : bundle().lemmas) {
    int trials = name == intern("enter_cap_safe") ? 25 : 1000;
    for (int i = 0; i < trials; ++i) {
      INFO("lemma ", sym_name(name));
      REQUIRE(lem.oracle(rng));
    }
  }
}

TEST_CASE("word safety oracle accepts in-range and rejects out-of-range") {
  MachineState s = make_state(bundle());
  CHECK(safe_word_oracle(s, int_word(42)));
  CHECK(safe_word_oracle(s, cap_word({kPermO, -50, 4000, 0})));
  CHECK(safe_word_oracle(s, cap_word({kPermRW, 0, 1023, 5})));
  CHECK_FALSE(safe_word_oracle(s, cap_word({kPermRW, 0, 1024, 5})));
  CHECK(safe_word_oracle(s, cap_word({kPermRW, 9, 3, 0})));  // empty range
  // A safe cap over memory holding an unsafe cap is unsafe.
  s.words[4] = cap_word({kPermR, -1, 3, 0});
  CHECK_FALSE(safe_word_oracle(s, cap_word({kPermRW, 0, 9, 0})));
}
