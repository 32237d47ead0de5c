#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fh/ops.hpp"
#include "fh/syntax.hpp"

namespace fh {

enum class Tri { Yes, No, Unknown };
const char* tri_name(Tri t);

// Compatibility: alpha-equality of refinement-erased skeletons.
TypePtr erase_refinements(const TypePtr& t);
bool compatible(const TypePtr& a, const TypePtr& b);

// Type conversion: closed terms embedded in either side are normalized under
// a shared step budget, then the results are compared up to alpha. Unknown is
// reported only when normalization hit the budget.
Tri conv_equiv(const TypePtr& a, const TypePtr& b, const Signature& sig,
               std::size_t budget = 2048);

enum class TcErr {
  None,
  UnboundVar,
  UnboundTypeVar,
  NotAFunction,
  NotAForall,
  ArgMismatch,
  IncompatibleCast,
  IllFormedType,
  PredicateNotBool,
  ConversionUnknown,
  BlameNoUniqueType,
  UnknownOp,
  OpArity,
  CheckForm,
};
const char* tc_err_name(TcErr e);

struct TcOptions {
  // Admit dropped source refinements, and refinements a closed value can be
  // checked to satisfy, at comparison points. Off for source programs; the
  // optimizer turns it on when revalidating rewritten terms.
  bool runtime_rules = false;
  std::size_t conv_budget = 2048;
  std::size_t check_budget = 512;
};

struct TcResult {
  std::optional<TypePtr> type;
  TcErr err = TcErr::None;
  std::string message;
  bool ok() const { return type.has_value(); }
};

// Type synthesis. There is no subsumption rule: every use site must match up
// to conversion, and casts are the only way to move along subtyping.
TcResult typecheck(const Context& ctx, const TermPtr& e, const Signature& sig,
                   const TcOptions& opt = {});

bool wf_type(const Context& ctx, const TypePtr& t, const Signature& sig,
             std::string* err = nullptr, const TcOptions& opt = {});
bool wf_context(const Context& ctx, const Signature& sig,
                std::string* err = nullptr);

// Checks every operation in the signature: well-formed dependent chain, a
// known selector that is defined on all argument tuples passing their
// refinements, and sampled evidence that results satisfy the declared result
// refinement.
struct SignatureReport {
  bool ok = true;
  std::vector<std::string> problems;
};
SignatureReport validate_signature(const Signature& sig, std::uint64_t seed = 1,
                                   int samples_per_op = 64);

}  // namespace fh
