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

#include "contractile/symexec.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace contractile {

namespace {

VCPtr mkvc(VC v) { return std::make_shared<const VC>(std::move(v)); }

}  // namespace

VCPtr vc_trivial() {
  static VCPtr t = mkvc(VC{});
  return t;
}

VCPtr vc_unprovable(const std::string& msg) {
  VC v;
  v.k = VC::K::Unprovable;
  v.message = msg;
  return mkvc(std::move(v));
}

VCPtr vc_forall(SymId var, VCPtr k) {
  VC v;
  v.k = VC::K::ForAll;
  v.var = var;
  v.kids = {std::move(k)};
  return mkvc(std::move(v));
}

VCPtr vc_exists(SymId var, VCPtr k) {
  VC v;
  v.k = VC::K::ExistsVC;
  v.var = var;
  v.kids = {std::move(k)};
  return mkvc(std::move(v));
}

VCPtr vc_assume(TermPtr t, VCPtr k) {
  VC v;
  v.k = VC::K::Assume;
  v.term = std::move(t);
  v.kids = {std::move(k)};
  return mkvc(std::move(v));
}

VCPtr vc_assert(TermPtr t, const std::string& msg, VCPtr k) {
  VC v;
  v.k = VC::K::Assert;
  v.term = std::move(t);
  v.message = msg;
  v.kids = {std::move(k)};
  return mkvc(std::move(v));
}

VCPtr vc_branch(std::vector<VCPtr> kids) {
  if (kids.empty()) return vc_trivial();
  if (kids.size() == 1) return kids[0];
  VC v;
  v.k = VC::K::Branch;
  v.kids = std::move(kids);
  return mkvc(std::move(v));
}

bool vc_is_trivial(const VCPtr& vc) {
  switch (vc->k) {
    case VC::K::Trivial:
      return true;
    case VC::K::Assert:
    case VC::K::Unprovable:
      return false;
    default:
      for (const auto& k : vc->kids) {
        if (!vc_is_trivial(k)) return false;
      }
      return true;
  }
}

namespace {

void vc_str_rec(const VCPtr& vc, std::ostringstream& os, int indent) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  switch (vc->k) {
    case VC::K::Trivial:
      os << pad << "trivial\n";
      return;
    case VC::K::Unprovable:
      os << pad << "unprovable: " << vc->message << "\n";
      return;
    case VC::K::ForAll:
      os << pad << "forall " << sym_name(vc->var) << ".\n";
      break;
    case VC::K::ExistsVC:
      os << pad << "exists " << sym_name(vc->var) << ".\n";
      break;
    case VC::K::Assume:
      os << pad << "assume " << term_str(vc->term) << "\n";
      break;
    case VC::K::Assert:
      os << pad << "assert " << term_str(vc->term);
      if (!vc->message.empty()) os << "   ; " << vc->message;
      os << "\n";
      break;
    case VC::K::Branch:
      os << pad << "all-of\n";
      break;
  }
  for (const auto& k : vc->kids) vc_str_rec(k, os, indent + 1);
}

}  // namespace

std::string vc_str(const VCPtr& vc) {
  std::ostringstream os;
  vc_str_rec(vc, os, 0);
  return os.str();
}

bool eval_vc_ground(const VCPtr& vc,
                    const std::unordered_map<SymId, Value>& assignment,
                    const PurePredTable& preds) {
  auto lookup = [&assignment](SymId v) -> std::optional<Value> {
    auto it = assignment.find(v);
    if (it == assignment.end()) return std::nullopt;
    return it->second;
  };
  switch (vc->k) {
    case VC::K::Trivial:
      return true;
    case VC::K::Unprovable:
      return false;
    case VC::K::ForAll:
    case VC::K::ExistsVC:
      return eval_vc_ground(vc->kids[0], assignment, preds);
    case VC::K::Assume: {
      Value c = eval_term(vc->term, lookup, &preds);
      if (!c.is_bool()) throw std::runtime_error("vc assume: bool expected");
      if (!c.as_bool()) return true;  // vacuous
      return eval_vc_ground(vc->kids[0], assignment, preds);
    }
    case VC::K::Assert: {
      Value c = eval_term(vc->term, lookup, &preds);
      if (!c.is_bool()) throw std::runtime_error("vc assert: bool expected");
      if (!c.as_bool()) return false;
      return eval_vc_ground(vc->kids[0], assignment, preds);
    }
    case VC::K::Branch:
      for (const auto& k : vc->kids) {
        if (!eval_vc_ground(k, assignment, preds)) return false;
      }
      return true;
  }
  return false;
}

namespace {

VCPtr solve_rec(const VCPtr& vc, PathCtx ctx) {
  switch (vc->k) {
    case VC::K::Trivial:
    case VC::K::Unprovable:
      return vc;
    case VC::K::ForAll:
    case VC::K::ExistsVC: {
      VCPtr k = solve_rec(vc->kids[0], ctx);
      if (k->k == VC::K::Trivial) return k;
      return vc->k == VC::K::ForAll ? vc_forall(vc->var, k)
                                    : vc_exists(vc->var, k);
    }
    case VC::K::Assume: {
      TermPtr t = normalize(ctx, vc->term);
      ctx.assume(t);
      if (ctx.dead) return vc_trivial();  // unreachable path
      VCPtr k = solve_rec(vc->kids[0], std::move(ctx));
      if (k->k == VC::K::Trivial) return k;
      return vc_assume(t, k);
    }
    case VC::K::Assert: {
      bool proved = prove(ctx, vc->term) == ProveResult::Proved;
      VCPtr k = solve_rec(vc->kids[0], ctx);
      if (proved) return k;
      return vc_assert(normalize(ctx, vc->term), vc->message, k);
    }
    case VC::K::Branch: {
      std::vector<VCPtr> kids;
      for (const auto& k : vc->kids) {
        VCPtr s = solve_rec(k, ctx);
        if (s->k != VC::K::Trivial) kids.push_back(s);
      }
      return vc_branch(std::move(kids));
    }
  }
  return vc;
}

}  // namespace

VCPtr solve(const VCPtr& vc, const PurePredTable& preds) {
  PathCtx ctx;
  ctx.preds = &preds;
  return solve_rec(vc, std::move(ctx));
}

// ---------------------------------------------------------------------------
// Symbolic execution
// ---------------------------------------------------------------------------

struct SymExec::St {
  Heap heap;
  PathCtx path;
  std::vector<Obligation> obls;
};

namespace {

TermPtr subst_env(const TermPtr& t, const Valuation& env) {
  return env.empty() ? t : subst_term(t, env);
}

int find_reg_chunk(const Heap& heap, SymId reg) {
  for (size_t i = 0; i < heap.size(); ++i) {
    if (heap[i].k == Chunk::K::Reg && heap[i].reg == reg) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

}  // namespace

std::vector<SymPathResult> SymExec::exec(const StmPtr& s, const Valuation& env,
                                         Heap heap, PathCtx path) {
  std::vector<SymPathResult> out;
  St st{std::move(heap), std::move(path), {}};
  exec_rec(s, env, std::move(st), out, 0);
  return out;
}

void SymExec::exec_rec(const StmPtr& s, const Valuation& env, St st,
                       std::vector<SymPathResult>& out, int depth) {
  if (depth > 512) {
    SymPathResult r;
    r.spatial_error = "inline depth limit exceeded";
    r.heap = std::move(st.heap);
    r.path = std::move(st.path);
    out.push_back(std::move(r));
    return;
  }
  auto make_result = [](St&& stt, TermPtr result) {
    SymPathResult r;
    r.result = std::move(result);
    r.heap = std::move(stt.heap);
    r.path = std::move(stt.path);
    r.obligations = std::move(stt.obls);
    return r;
  };
  auto make_failstop = [](St&& stt) {
    SymPathResult r;
    r.failed_stop = true;
    r.heap = std::move(stt.heap);
    r.path = std::move(stt.path);
    r.obligations = std::move(stt.obls);
    return r;
  };
  auto make_spatial = [](St&& stt, std::string msg) {
    SymPathResult r;
    r.spatial_error = std::move(msg);
    r.heap = std::move(stt.heap);
    r.path = std::move(stt.path);
    r.obligations = std::move(stt.obls);
    return r;
  };
  auto reopen = [](SymPathResult&& r) {
    return St{std::move(r.heap), std::move(r.path), std::move(r.obligations)};
  };

  switch (s->k) {
    case Stm::K::Literal:
      out.push_back(make_result(std::move(st),
                                normalize(st.path, value_to_term(s->lit))));
      return;
    case Stm::K::Var: {
      auto it = env.find(s->name);
      if (it == env.end()) {
        throw std::runtime_error("symexec: unbound var " + sym_name(s->name));
      }
      TermPtr r = normalize(st.path, it->second);
      out.push_back(make_result(std::move(st), std::move(r)));
      return;
    }
    case Stm::K::Expr: {
      TermPtr r = normalize(st.path, subst_env(s->term, env));
      out.push_back(make_result(std::move(st), std::move(r)));
      return;
    }
    case Stm::K::Let: {
      std::vector<SymPathResult> bound;
      exec_rec(s->kids[0], env, std::move(st), bound, depth + 1);
      for (auto& b : bound) {
        if (b.failed_stop || !b.spatial_error.empty()) {
          out.push_back(std::move(b));
          continue;
        }
        Valuation env2 = env;
        env2[s->name] = b.result;
        exec_rec(s->kids[1], env2, reopen(std::move(b)), out, depth + 1);
      }
      return;
    }
    case Stm::K::Seq: {
      std::vector<SymPathResult> first;
      exec_rec(s->kids[0], env, std::move(st), first, depth + 1);
      for (auto& f : first) {
        if (f.failed_stop || !f.spatial_error.empty()) {
          out.push_back(std::move(f));
          continue;
        }
        exec_rec(s->kids[1], env, reopen(std::move(f)), out, depth + 1);
      }
      return;
    }
    case Stm::K::If: {
      std::vector<SymPathResult> conds;
      exec_rec(s->kids[0], env, std::move(st), conds, depth + 1);
      for (auto& c : conds) {
        if (c.failed_stop || !c.spatial_error.empty()) {
          out.push_back(std::move(c));
          continue;
        }
        TermPtr cond = c.result;
        St base = reopen(std::move(c));
        if (cond->is_bool_lit(true)) {
          exec_rec(s->kids[1], env, std::move(base), out, depth + 1);
          continue;
        }
        if (cond->is_bool_lit(false)) {
          exec_rec(s->kids[2], env, std::move(base), out, depth + 1);
          continue;
        }
        if (!branch_infeasible(base.path, cond)) {
          St then_st = base;
          if (then_st.path.assume(cond)) {
            exec_rec(s->kids[1], env, std::move(then_st), out, depth + 1);
          }
        }
        TermPtr ncond = tnot(cond);
        if (!branch_infeasible(base.path, ncond)) {
          St else_st = std::move(base);
          if (else_st.path.assume(ncond)) {
            exec_rec(s->kids[2], env, std::move(else_st), out, depth + 1);
          }
        }
      }
      return;
    }
    case Stm::K::Match: {
      std::vector<SymPathResult> scruts;
      exec_rec(s->kids[0], env, std::move(st), scruts, depth + 1);
      for (auto& sc : scruts) {
        if (sc.failed_stop || !sc.spatial_error.empty()) {
          out.push_back(std::move(sc));
          continue;
        }
        TermPtr v = sc.result;
        St base = reopen(std::move(sc));
        bool ground = v->k == Term::K::Ctor || v->is_lit();
        if (ground) {
          bool selected = false;
          for (const auto& c : s->cases) {
            switch (c.pat.k) {
              case Pattern::K::Ctor:
                if (v->k == Term::K::Ctor && v->sym == c.pat.ctor &&
                    v->kids.size() == c.pat.binders.size()) {
                  Valuation env2 = env;
                  for (size_t i = 0; i < c.pat.binders.size(); ++i) {
                    env2[c.pat.binders[i]] = v->kids[i];
                  }
                  exec_rec(c.body, env2, std::move(base), out, depth + 1);
                  selected = true;
                }
                break;
              case Pattern::K::EnumTag:
                if (v->is_lit() && v->lit.is_enum() &&
                    v->lit.enum_type() == c.pat.enum_type &&
                    v->lit.enum_tag() == c.pat.enum_tag) {
                  exec_rec(c.body, env, std::move(base), out, depth + 1);
                  selected = true;
                }
                break;
              case Pattern::K::IntLit:
                if (v->is_lit() && v->lit.is_int() &&
                    v->lit.as_int() == c.pat.int_lit) {
                  exec_rec(c.body, env, std::move(base), out, depth + 1);
                  selected = true;
                }
                break;
              case Pattern::K::Default:
                exec_rec(c.body, env, std::move(base), out, depth + 1);
                selected = true;
                break;
            }
            if (selected) break;
          }
          if (!selected) {
            out.push_back(make_failstop(std::move(base)));
          }
          continue;
        }
        // Symbolic scrutinee: demonic split over the listed cases. Branches
        // the path refutes are pruned; a missing case is a fail-stop and
        // needs no branch at all.
        TermVec negatives;
        for (const auto& c : s->cases) {
          switch (c.pat.k) {
            case Pattern::K::Ctor: {
              St branch = base;
              TermVec fields;
              for (size_t i = 0; i < c.pat.binders.size(); ++i) {
                fields.push_back(branch.path.fresh_var());
              }
              TermPtr cond = teq(v, tctor(c.pat.ctor, fields));
              if (branch_infeasible(branch.path, cond)) break;
              if (!branch.path.assume(cond)) break;
              Valuation env2 = env;
              for (size_t i = 0; i < c.pat.binders.size(); ++i) {
                env2[c.pat.binders[i]] = fields[i];
              }
              exec_rec(c.body, env2, std::move(branch), out, depth + 1);
              break;
            }
            case Pattern::K::EnumTag: {
              TermPtr cond = teq(v, tenum(c.pat.enum_type, c.pat.enum_tag));
              St branch = base;
              if (!branch_infeasible(branch.path, cond) &&
                  branch.path.assume(cond)) {
                exec_rec(c.body, env, std::move(branch), out, depth + 1);
              }
              negatives.push_back(tnot(cond));
              break;
            }
            case Pattern::K::IntLit: {
              TermPtr cond = teq(v, tint(c.pat.int_lit));
              St branch = base;
              if (!branch_infeasible(branch.path, cond) &&
                  branch.path.assume(cond)) {
                exec_rec(c.body, env, std::move(branch), out, depth + 1);
              }
              negatives.push_back(tnot(cond));
              break;
            }
            case Pattern::K::Default: {
              St branch = base;
              bool feasible = true;
              for (const auto& n : negatives) {
                if (branch_infeasible(branch.path, n) ||
                    !branch.path.assume(n)) {
                  feasible = false;
                  break;
                }
              }
              if (feasible) {
                exec_rec(c.body, env, std::move(branch), out, depth + 1);
              }
              break;
            }
          }
        }
      }
      return;
    }
    case Stm::K::CallInternal:
    case Stm::K::CallForeign: {
      struct ArgsState {
        St st;
        TermVec args;
      };
      std::vector<ArgsState> states;
      states.push_back(ArgsState{std::move(st), {}});
      for (const auto& arg : s->kids) {
        std::vector<ArgsState> next;
        for (auto& a : states) {
          std::vector<SymPathResult> rs;
          exec_rec(arg, env, std::move(a.st), rs, depth + 1);
          for (auto& r : rs) {
            if (r.failed_stop || !r.spatial_error.empty()) {
              out.push_back(std::move(r));
              continue;
            }
            ArgsState n;
            TermPtr res = r.result;
            n.st = St{std::move(r.heap), std::move(r.path),
                      std::move(r.obligations)};
            n.args = a.args;
            n.args.push_back(std::move(res));
            next.push_back(std::move(n));
          }
        }
        states = std::move(next);
      }

      auto fit = cfg_.program->functions.find(s->name);
      if (fit == cfg_.program->functions.end()) {
        throw std::runtime_error("symexec: unknown function " +
                                 sym_name(s->name));
      }
      const FunctionDecl& decl = fit->second;

      for (auto& a : states) {
        if (decl.foreign) {
          auto pf = cfg_.pure_foreign.find(s->name);
          if (pf != cfg_.pure_foreign.end()) {
            bool ground = true;
            ValueVec vals;
            for (const auto& t : a.args) {
              auto v = term_to_value(normalize(a.st.path, t));
              if (!v) {
                ground = false;
                break;
              }
              vals.push_back(*v);
            }
            if (ground) {
              TermPtr res = normalize(a.st.path, value_to_term(pf->second(vals)));
              out.push_back(make_result(std::move(a.st), std::move(res)));
              continue;
            }
          }
        }

        CallMode mode =
            decl.foreign ? CallMode::ByContract : cfg_.mode_of(s->name);
        if (mode == CallMode::Inline) {
          ++stats_.calls_by_body;
          Valuation callee_env;
          for (size_t i = 0; i < decl.params.size(); ++i) {
            callee_env[decl.params[i]] = a.args[i];
          }
          exec_rec(decl.body, callee_env, std::move(a.st), out, depth + 1);
          continue;
        }

        ++stats_.calls_by_contract;
        auto cit = cfg_.contracts.find(s->name);
        if (cit == cfg_.contracts.end()) {
          throw std::runtime_error("symexec: no contract for " +
                                   sym_name(s->name));
        }
        const Contract& con = cit->second;
        if (con.params.size() != a.args.size()) {
          throw std::runtime_error("symexec: contract arity mismatch for " +
                                   sym_name(s->name));
        }
        Valuation val;
        for (size_t i = 0; i < con.params.size(); ++i) {
          val[con.params[i]] = a.args[i];
        }
        St cur = std::move(a.st);
        std::vector<ConsumeAlt> alts = consume(con.pre, val, cur.heap, cur.path);
        if (alts.empty()) {
          std::ostringstream os;
          os << "calling " << sym_name(s->name) << ": no chunk matches "
             << assertion_str(con.pre);
          out.push_back(make_spatial(std::move(cur), os.str()));
          continue;
        }
        size_t chosen = 0;
        bool clean = false;
        for (size_t i = 0; i < alts.size(); ++i) {
          bool all = true;
          for (const auto& o : alts[i].obligations) {
            if (prove(cur.path, o) != ProveResult::Proved) {
              all = false;
              break;
            }
          }
          if (all) {
            chosen = i;
            clean = true;
            break;
          }
        }
        const ConsumeAlt& alt = alts[chosen];
        stats_.chunk_matches +=
            static_cast<int>(cur.heap.size() - alt.remaining.size());
        for (const auto& o : alt.obligations) {
          if (!clean && prove(cur.path, o) != ProveResult::Proved) {
            cur.obls.push_back(Obligation{
                o, "precondition of " + sym_name(s->name),
                cur.path.conds.size()});
          }
          cur.path.assume(o);
        }
        Valuation post_val = val;
        for (const auto& [k, v] : alt.binding) post_val[k] = v;
        TermPtr res = cur.path.fresh_var();
        if (con.result != 0) post_val[con.result] = res;
        std::vector<ProduceBranch> branches =
            produce(con.post, post_val, alt.remaining, std::move(cur.path));
        for (auto& b : branches) {
          if (b.path.dead) continue;
          St done{std::move(b.heap), std::move(b.path), cur.obls};
          out.push_back(make_result(std::move(done), res));
        }
      }
      return;
    }
    case Stm::K::LemmaInvoke: {
      struct ArgsState {
        St st;
        TermVec args;
      };
      std::vector<ArgsState> states;
      states.push_back(ArgsState{std::move(st), {}});
      for (const auto& arg : s->kids) {
        std::vector<ArgsState> next;
        for (auto& a : states) {
          std::vector<SymPathResult> rs;
          exec_rec(arg, env, std::move(a.st), rs, depth + 1);
          for (auto& r : rs) {
            if (r.failed_stop || !r.spatial_error.empty()) {
              out.push_back(std::move(r));
              continue;
            }
            ArgsState n;
            TermPtr res = r.result;
            n.st = St{std::move(r.heap), std::move(r.path),
                      std::move(r.obligations)};
            n.args = a.args;
            n.args.push_back(std::move(res));
            next.push_back(std::move(n));
          }
        }
        states = std::move(next);
      }
      for (auto& a : states) {
        size_t before = a.st.heap.size();
        LemmaApp app =
            apply_lemma(*cfg_.lemmas, s->name, a.args, a.st.heap, a.st.path);
        if (!app.ok) {
          out.push_back(make_spatial(std::move(a.st), app.error));
          continue;
        }
        if (app.heap.size() < before) {
          stats_.chunk_matches += static_cast<int>(before - app.heap.size());
        }
        St cur{std::move(app.heap), std::move(app.path), std::move(a.st.obls)};
        for (const auto& o : app.obligations) {
          if (prove(cur.path, o) != ProveResult::Proved) {
            cur.obls.push_back(Obligation{
                o, "requirement of lemma " + sym_name(s->name),
                cur.path.conds.size()});
          }
          cur.path.assume(o);
        }
        out.push_back(make_result(std::move(cur), tunit()));
      }
      return;
    }
    case Stm::K::Assert: {
      std::vector<SymPathResult> conds;
      exec_rec(s->kids[0], env, std::move(st), conds, depth + 1);
      for (auto& c : conds) {
        if (c.failed_stop || !c.spatial_error.empty()) {
          out.push_back(std::move(c));
          continue;
        }
        TermPtr cond = c.result;
        St base = reopen(std::move(c));
        if (cond->is_bool_lit(true)) {
          out.push_back(make_result(std::move(base), tunit()));
          continue;
        }
        if (cond->is_bool_lit(false)) {
          out.push_back(make_failstop(std::move(base)));
          continue;
        }
        // Success path assumes the condition; the failing branch is a
        // machine fail-stop and carries no obligations.
        if (!branch_infeasible(base.path, cond)) {
          St okst = base;
          if (okst.path.assume(cond)) {
            out.push_back(make_result(std::move(okst), tunit()));
          }
        }
        TermPtr ncond = tnot(cond);
        if (!branch_infeasible(base.path, ncond)) {
          St failst = std::move(base);
          if (failst.path.assume(ncond)) {
            out.push_back(make_failstop(std::move(failst)));
          }
        }
      }
      return;
    }
    case Stm::K::Fail:
      out.push_back(make_failstop(std::move(st)));
      return;
    case Stm::K::ReadReg: {
      int idx = find_reg_chunk(st.heap, s->name);
      if (idx < 0) {
        out.push_back(make_spatial(
            std::move(st), "read of unowned register " + sym_name(s->name)));
        return;
      }
      ++stats_.chunk_matches;
      TermPtr v = normalize(st.path, st.heap[static_cast<size_t>(idx)].val);
      out.push_back(make_result(std::move(st), std::move(v)));
      return;
    }
    case Stm::K::WriteReg: {
      std::vector<SymPathResult> vals;
      exec_rec(s->kids[0], env, std::move(st), vals, depth + 1);
      for (auto& v : vals) {
        if (v.failed_stop || !v.spatial_error.empty()) {
          out.push_back(std::move(v));
          continue;
        }
        TermPtr res = v.result;
        St cur = reopen(std::move(v));
        int idx = find_reg_chunk(cur.heap, s->name);
        if (idx < 0) {
          out.push_back(make_spatial(
              std::move(cur), "write of unowned register " + sym_name(s->name)));
          continue;
        }
        ++stats_.chunk_matches;
        cur.heap[static_cast<size_t>(idx)].val = res;
        out.push_back(make_result(std::move(cur), tunit()));
      }
      return;
    }
    case Stm::K::RecordGet:
    case Stm::K::TupleProject: {
      std::vector<SymPathResult> rs;
      exec_rec(s->kids[0], env, std::move(st), rs, depth + 1);
      for (auto& r : rs) {
        if (r.failed_stop || !r.spatial_error.empty()) {
          out.push_back(std::move(r));
          continue;
        }
        r.result = normalize(r.path, tproj(r.result, s->idx));
        out.push_back(std::move(r));
      }
      return;
    }
    case Stm::K::RecordSet: {
      std::vector<SymPathResult> recs;
      exec_rec(s->kids[0], env, std::move(st), recs, depth + 1);
      for (auto& rec : recs) {
        if (rec.failed_stop || !rec.spatial_error.empty()) {
          out.push_back(std::move(rec));
          continue;
        }
        TermPtr base = rec.result;
        std::vector<SymPathResult> vals;
        exec_rec(s->kids[1], env, reopen(std::move(rec)), vals, depth + 1);
        for (auto& v : vals) {
          if (v.failed_stop || !v.spatial_error.empty()) {
            out.push_back(std::move(v));
            continue;
          }
          TermPtr b = normalize(v.path, base);
          if (b->k != Term::K::Ctor || s->idx >= b->kids.size()) {
            throw std::runtime_error(
                "symexec: record update on opaque value; destructure first");
          }
          TermVec kids = b->kids;
          kids[s->idx] = v.result;
          v.result = tctor(b->sym, std::move(kids));
          out.push_back(std::move(v));
        }
      }
      return;
    }
  }
  throw std::runtime_error("symexec: bad statement");
}

// ---------------------------------------------------------------------------
// Contract verification
// ---------------------------------------------------------------------------

PostCheck consume_post(const VerifyConfig& cfg, const AssertionPtr& post,
                       const Valuation& val, SymPathResult pr,
                       bool leak_check) {
  (void)cfg;
  PostCheck out;
  std::vector<ConsumeAlt> alts = consume(post, val, pr.heap, pr.path);
  if (alts.empty()) {
    out.error = "postcondition: no chunk matches " + assertion_str(post);
    out.path = std::move(pr);
    return out;
  }
  auto leaks = [leak_check](const Heap& h) {
    if (!leak_check) return false;
    for (const auto& c : h) {
      if (c.k == Chunk::K::Reg || c.k == Chunk::K::Mem) return true;
    }
    return false;
  };
  // Prefer an alternative that discharges all obligations without leaks,
  // then any leak-free one, then give up on the first.
  int chosen = -1;
  for (size_t i = 0; i < alts.size(); ++i) {
    if (leaks(alts[i].remaining)) continue;
    bool all = true;
    for (const auto& o : alts[i].obligations) {
      if (prove(pr.path, o) != ProveResult::Proved) {
        all = false;
        break;
      }
    }
    if (all) {
      chosen = static_cast<int>(i);
      break;
    }
    if (chosen < 0) chosen = static_cast<int>(i);
  }
  if (chosen < 0) {
    out.error = "leaked chunk: " + alts[0].remaining.front().str();
    for (const auto& c : alts[0].remaining) {
      if (c.k == Chunk::K::Reg || c.k == Chunk::K::Mem) {
        out.error = "leaked chunk: " + c.str();
        break;
      }
    }
    out.path = std::move(pr);
    return out;
  }
  const ConsumeAlt& alt = alts[static_cast<size_t>(chosen)];
  for (const auto& o : alt.obligations) {
    if (prove(pr.path, o) != ProveResult::Proved) {
      pr.obligations.push_back(
          Obligation{o, "postcondition", pr.path.conds.size()});
    }
  }
  pr.heap = alt.remaining;
  out.ok = true;
  out.path = std::move(pr);
  return out;
}

const char* status_name(VerificationResult::Status s) {
  switch (s) {
    case VerificationResult::Status::Verified:
      return "Verified";
    case VerificationResult::Status::Residual:
      return "Residual";
    case VerificationResult::Status::Failed:
      return "Failed";
  }
  return "?";
}

VerificationResult verify_contract(const VerifyConfig& cfg,
                                   const std::string& fn_name) {
  auto start = std::chrono::steady_clock::now();
  const FunctionDecl* decl = lookup_function(*cfg.program, fn_name);
  if (!decl) throw std::invalid_argument("unknown function: " + fn_name);
  if (decl->foreign) {
    throw std::invalid_argument("foreign functions are axioms: " + fn_name);
  }
  if (fn_name == "fdeCycle") {
    throw std::invalid_argument("fdeCycle is not verified symbolically");
  }
  auto cit = cfg.contracts.find(intern(fn_name));
  if (cit == cfg.contracts.end()) {
    throw std::invalid_argument("no contract registered for " + fn_name);
  }
  const Contract& con = cit->second;

  VerificationResult result;
  SymExec ex(cfg);

  PathCtx path0;
  path0.preds = cfg.preds;
  Valuation val;
  for (SymId v : con.logic_vars) val[v] = tvar(v);

  std::vector<ProduceBranch> pre_branches = produce(con.pre, val, {}, path0);
  std::vector<VCPtr> path_vcs;
  for (auto& pb : pre_branches) {
    if (pb.path.dead) continue;
    Valuation env;
    for (size_t i = 0; i < decl->params.size(); ++i) {
      env[decl->params[i]] = val.at(con.params[i]);
    }
    std::vector<SymPathResult> paths =
        ex.exec(decl->body, env, std::move(pb.heap), std::move(pb.path));
    for (auto& p : paths) {
      if (p.path.dead) continue;
      ++ex.stats().paths;
      if (p.failed_stop) continue;  // fail-stop satisfies every contract
      if (!p.spatial_error.empty()) {
        result.status = VerificationResult::Status::Failed;
        if (!result.message.empty()) result.message += "; ";
        result.message += p.spatial_error;
        path_vcs.push_back(vc_unprovable(p.spatial_error));
        continue;
      }
      Valuation post_val = val;
      if (con.result != 0) post_val[con.result] = p.result;
      PostCheck pc = consume_post(cfg, con.post, post_val, std::move(p), true);
      if (!pc.ok) {
        result.status = VerificationResult::Status::Failed;
        if (!result.message.empty()) result.message += "; ";
        result.message += pc.error;
        path_vcs.push_back(vc_unprovable(pc.error));
        continue;
      }
      // Interleave: each residual obligation is asserted before the
      // assumptions that were made at or after its emission point, so an
      // obligation can never discharge itself.
      VCPtr tail = vc_trivial();
      const auto& conds = pc.path.path.conds;
      const auto& obls = pc.path.obligations;
      size_t oi = obls.size();
      for (size_t i = conds.size(); i-- > 0;) {
        while (oi > 0 && obls[oi - 1].at > i) {
          --oi;
          tail = vc_assert(obls[oi].term, obls[oi].message, tail);
        }
        tail = vc_assume(conds[i], tail);
      }
      while (oi > 0) {
        --oi;
        tail = vc_assert(obls[oi].term, obls[oi].message, tail);
      }
      path_vcs.push_back(tail);
    }
  }

  VCPtr vc = vc_branch(std::move(path_vcs));
  for (size_t i = con.logic_vars.size(); i-- > 0;) {
    vc = vc_forall(con.logic_vars[i], vc);
  }
  result.vc = solve(vc, *cfg.preds);
  if (result.status != VerificationResult::Status::Failed) {
    result.status = vc_is_trivial(result.vc)
                        ? VerificationResult::Status::Verified
                        : VerificationResult::Status::Residual;
  }
  result.stats = ex.stats();
  result.stats.millis = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return result;
}

BundleReport verify_all(const VerifyConfig& cfg, bool parallel) {
  std::vector<std::string> names;
  for (const auto& [sym, con] : cfg.contracts) {
    const std::string& n = sym_name(sym);
    const FunctionDecl* decl = lookup_function(*cfg.program, n);
    if (!decl || decl->foreign || n == "fdeCycle") continue;
    names.push_back(n);
  }
  std::sort(names.begin(), names.end());

  BundleReport report;
  report.functions.resize(names.size());
  auto work = [&](size_t i) {
    report.functions[i].function = names[i];
    report.functions[i].result = verify_contract(cfg, names[i]);
  };
  if (parallel && names.size() > 1) {
    std::vector<std::future<void>> futs;
    futs.reserve(names.size());
    for (size_t i = 0; i < names.size(); ++i) {
      futs.push_back(std::async(std::launch::async, work, i));
    }
    for (auto& f : futs) f.get();
  } else {
    for (size_t i = 0; i < names.size(); ++i) work(i);
  }
  return report;
}

std::string report_text(const BundleReport& r) {
  std::ostringstream os;
  size_t w = 8;
  for (const auto& f : r.functions) w = std::max(w, f.function.size());
  for (const auto& f : r.functions) {
    os << f.function << std::string(w - f.function.size() + 2, ' ')
       << status_name(f.result.status) << "  paths=" << f.result.stats.paths
       << " chunks=" << f.result.stats.chunk_matches
       << " millis=" << f.result.stats.millis << "\n";
    if (f.result.status == VerificationResult::Status::Residual) {
      os << "  residual:\n" << vc_str(f.result.vc);
    }
    if (!f.result.message.empty()) {
      os << "  " << f.result.message << "\n";
    }
  }
  return os.str();
}

std::string report_json(const BundleReport& r) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& f : r.functions) {
    nlohmann::json e;
    e["function"] = f.function;
    e["status"] = status_name(f.result.status);
    e["paths"] = f.result.stats.paths;
    e["chunks_matched"] = f.result.stats.chunk_matches;
    e["residual"] = f.result.verified() ? "" : vc_str(f.result.vc);
    e["millis"] = f.result.stats.millis;
    arr.push_back(std::move(e));
  }
  return arr.dump(2);
}

}  // namespace contractile
