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
#include "doctest.h"

using namespace contractile;

namespace {

Program tiny_program() {
  Program p;
  p.add_internal("fdeStep", {}, s_unit());
  p.add_internal("fdeCycle", {},
                 s_seq(s_call("fdeStep", {}), s_call("fdeCycle", {})));
  return p;
}

}  // namespace

TEST_CASE("fresh_name yields the smallest unused counter name") {
  CHECK(fresh_name({}) == "v0");
  CHECK(fresh_name({"v0"}) == "v1");
  CHECK(fresh_name({"v0", "v1"}) == "v2");
  CHECK(fresh_name({"v1"}) == "v0");
}

TEST_CASE("lookup_function finds declared functions") {
  Program p = tiny_program();
  CHECK(lookup_function(p, "fdeStep") != nullptr);
  CHECK(lookup_function(p, "zzz") == nullptr);
  CHECK_THROWS(lookup_function_or_throw(p, "zzz"));
}

TEST_CASE("check_wellformed accepts the minimal entry pair") {
  Program p = tiny_program();
  CHECK(check_wellformed(p).empty());
  // Idempotent and pure: a second run yields the same (empty) answer.
  CHECK(check_wellformed(p).empty());
}

TEST_CASE("check_wellformed flags unknown call targets by name") {
  Program p = tiny_program();
  p.add_internal("f", {}, s_call("nope", {}));
  auto diags = check_wellformed(p);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("nope") != std::string::npos);
  CHECK(diags[0].location != 0);
}

TEST_CASE("check_wellformed flags a malformed fdeCycle") {
  Program p;
  p.add_internal("fdeStep", {}, s_unit());
  p.add_internal("fdeCycle", {}, s_int(0));
  auto diags = check_wellformed(p);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("fdeCycle shape") != std::string::npos);
}

TEST_CASE("check_wellformed flags unbound variables") {
  Program p = tiny_program();
  p.add_internal("g", {"x"}, s_var("y"));
  auto diags = check_wellformed(p);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("y") != std::string::npos);

  Program q = tiny_program();
  q.add_internal("h", {"x"}, s_let("y", s_var("x"), s_var("y")));
  CHECK(check_wellformed(q).empty());
}

TEST_CASE("check_wellformed flags arity and linkage mistakes") {
  Program p = tiny_program();
  p.add_foreign("ff", 2);
  p.add_internal("g", {}, s_callf("ff", {s_int(1)}));
  auto diags = check_wellformed(p);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("arity") != std::string::npos);

  Program q = tiny_program();
  q.add_foreign("ff", 1);
  q.add_internal("g", {}, s_call("ff", {s_int(1)}));
  auto d2 = check_wellformed(q);
  REQUIRE(d2.size() == 1);
  CHECK(d2[0].message.find("foreign") != std::string::npos);
}

TEST_CASE("match binders are in scope only inside their case") {
  Program p = tiny_program();
  p.add_internal(
      "g", {"w"},
      s_seq(s_match(s_var("w"),
                    {case_ctor("w_int", {"z"}, s_var("z")),
                     case_default(s_unit())}),
            s_var("z")));
  auto diags = check_wellformed(p);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("z") != std::string::npos);
}
