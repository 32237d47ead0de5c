#pragma once

#include <set>
#include <string>
#include <vector>

#include "fh/subtyping.hpp"

namespace fh {

// Label on casts introduced by selfification. Like the subtyping wrapper
// label it is reserved: user programs never carry it.
inline constexpr const char* kSelfLabel = "$self";

// The most precise type of `e` at `t`: base types gain a singleton equation,
// function and quantified types selfify their codomain at the applied term,
// refined types selfify the base and rebind the original predicate through a
// cast. Type variables are left alone.
TypePtr selfify(const TypePtr& t, const TermPtr& e);

struct RewriteEntry {
  std::string path;     // site address like /fn/arg2; / is the root
  std::string rule;     // ReflElim UpcastElim SelfAssist DecompFun
                        // DecompForall DecompPrecheck ForgetSource BetaCleanup
  std::string context;  // printed typing context at the site
  std::string before;
  std::string after;
  std::string aux;       // rule-specific: selfified type, peeled candidate
  std::string justification;
};

struct OptConfig {
  std::set<std::string> passes = {"reflexive", "upcast", "selfassist",
                                  "decompose", "forget", "beta"};
  bool decompose_precheck = false;  // also split base-to-refined casts
  int max_rounds = 5;
  ProverConfig prover;
};

struct OptimizeResult {
  TermPtr term;
  std::vector<RewriteEntry> log;
  int rounds = 0;
};

// Pass pipeline per round: reflexive, upcast, selfassist, decompose, forget,
// beta; runs to a fixpoint or max_rounds. Every rewrite carries a
// justification; nothing fires on an Unknown verdict.
OptimizeResult optimize(const Context& ctx, const TermPtr& e,
                        const Signature& sig, const OptConfig& cfg = {});

// Re-checks one log entry from its recorded strings alone: the rule's side
// condition must re-verify and `after` must be the rule's result for
// `before`, up to alpha.
bool replay_entry(const RewriteEntry& entry, const Signature& sig,
                  const ProverConfig& prover = {});

// Behavioral decompositions of composite casts; also the optimizer's rewrite
// targets. Blame labels are preserved.
TermPtr fun_cast_wrapper(const TypePtr& src, const TypePtr& tgt,
                         const std::string& label);
TermPtr forall_cast_wrapper(const TypePtr& src, const TypePtr& tgt,
                            const std::string& label);
TermPtr precheck_cast_wrapper(const TypePtr& src, const TypePtr& tgt,
                              const std::string& label);

}  // namespace fh
