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

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "contractile/ast.hpp"
#include "contractile/machine.hpp"
#include "contractile/seplogic.hpp"
#include "contractile/solver.hpp"

namespace contractile {

struct VC;
using VCPtr = std::shared_ptr<const VC>;

/// Syntactic verification-condition tree. A tree without Assert or
/// Unprovable nodes is valid by construction.
struct VC {
  enum class K : uint8_t {
    ForAll,
    ExistsVC,
    Assume,
    Assert,
    Branch,
    Trivial,
    Unprovable
  };

  K k = K::Trivial;
  SymId var = 0;            // ForAll / ExistsVC
  TermPtr term;             // Assume / Assert
  std::string message;      // Assert / Unprovable
  std::vector<VCPtr> kids;  // continuation(s)
};

VCPtr vc_trivial();
VCPtr vc_unprovable(const std::string& msg);
VCPtr vc_forall(SymId var, VCPtr k);
VCPtr vc_exists(SymId var, VCPtr k);
VCPtr vc_assume(TermPtr t, VCPtr k);
VCPtr vc_assert(TermPtr t, const std::string& msg, VCPtr k);
VCPtr vc_branch(std::vector<VCPtr> kids);

bool vc_is_trivial(const VCPtr& vc);
std::string vc_str(const VCPtr& vc);

/// Ground truth evaluation of a VC under an assignment for its free/ForAll
/// variables. Used as a test oracle for the simplifier.
bool eval_vc_ground(const VCPtr& vc,
                    const std::unordered_map<SymId, Value>& assignment,
                    const PurePredTable& preds);

/// Simplifies a VC: ground evaluation, assumption substitution, pruning of
/// contradictory branches, user-predicate evaluation/unfolding.
VCPtr solve(const VCPtr& vc, const PurePredTable& preds);

/// How the executor treats a call to a given function.
enum class CallMode : uint8_t { ByContract, Inline };

/// Everything the symbolic executor needs to know about one ISA, for one
/// verification configuration.
struct VerifyConfig {
  const Program* program = nullptr;
  const LemmaTable* lemmas = nullptr;
  const PurePredTable* preds = nullptr;
  std::map<SymId, Contract> contracts;
  // Foreign functions with a pure evaluator, applied when arguments are
  // ground (decoding, mostly).
  std::unordered_map<SymId, std::function<Value(const ValueVec&)>> pure_foreign;
  // Explicit interpretation choices; contracts default to ByContract and
  // everything else to Inline.
  std::unordered_map<SymId, CallMode> call_modes;

  CallMode mode_of(SymId fn) const {
    auto it = call_modes.find(fn);
    if (it != call_modes.end()) return it->second;
    return contracts.count(fn) ? CallMode::ByContract : CallMode::Inline;
  }
};

struct VerifyStats {
  int paths = 0;
  int chunk_matches = 0;
  int calls_by_contract = 0;
  int calls_by_body = 0;
  double millis = 0;
};

struct VerificationResult {
  enum class Status : uint8_t { Verified, Residual, Failed };
  Status status = Status::Verified;
  std::string message;  // failure descriptions
  VCPtr vc;             // simplified residual
  VerifyStats stats;

  bool verified() const { return status == Status::Verified; }
};

const char* status_name(VerificationResult::Status s);

/// A residual pure obligation, positioned before the `at`-th assumed
/// condition of its path (assumptions after that point may depend on it,
/// so the VC must assert it first).
struct Obligation {
  TermPtr term;
  std::string message;
  size_t at = 0;
};

/// One control path through a symbolic execution.
struct SymPathResult {
  bool failed_stop = false;  // ended in Fail / failed Assert branch
  TermPtr result;            // meaningful when !failed_stop
  Heap heap;
  PathCtx path;
  std::vector<Obligation> obligations;
  std::string spatial_error; // non-empty: consume failed on this path
};

class SymExec {
 public:
  explicit SymExec(const VerifyConfig& cfg) : cfg_(cfg) {}

  /// Forward symbolic execution of one statement over every path. The
  /// returned paths carry grown heaps, path conditions, and any residual
  /// pure obligations emitted by contract/lemma application.
  std::vector<SymPathResult> exec(const StmPtr& s, const Valuation& env,
                                  Heap heap, PathCtx path);

  VerifyStats& stats() { return stats_; }

 private:
  struct St;
  void exec_rec(const StmPtr& s, const Valuation& env, St st,
                std::vector<SymPathResult>& out, int depth);

  const VerifyConfig& cfg_;
  VerifyStats stats_;
};

/// Consumes a postcondition from a finished path and applies the leak
/// check: register/memory chunks may not be left over; abstract predicate
/// and wand chunks may.
struct PostCheck {
  bool ok = false;
  std::string error;
  SymPathResult path;  // with post obligations appended
};
PostCheck consume_post(const VerifyConfig& cfg, const AssertionPtr& post,
                       const Valuation& val, SymPathResult pr,
                       bool leak_check);

/// Verifies one function against its registered contract. Throws
/// std::invalid_argument for foreign functions, fdeCycle, or functions
/// without a contract.
VerificationResult verify_contract(const VerifyConfig& cfg,
                                   const std::string& fn_name);

struct FunctionReport {
  std::string function;
  VerificationResult result;
};

struct BundleReport {
  std::vector<FunctionReport> functions;  // sorted by name
  bool all_verified() const {
    for (const auto& f : functions) {
      if (!f.result.verified()) return false;
    }
    return true;
  }
};

/// Runs verify_contract on every contracted internal function, in name
/// order. fdeCycle is never verified symbolically.
BundleReport verify_all(const VerifyConfig& cfg, bool parallel = true);

std::string report_text(const BundleReport& r);
std::string report_json(const BundleReport& r);

}  // namespace contractile
