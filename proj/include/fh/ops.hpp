#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fh/syntax.hpp"

namespace fh {

// Operations are monomorphic dependent chains x1:T1 -> ... -> xn:Tn -> T over
// (possibly refined) base types; they are applied saturated, never curried.
struct OpSig {
  std::string name;
  std::vector<std::pair<std::string, TypePtr>> params;
  TypePtr result;
  std::string selector;  // key into the built-in denotation table
};

struct Signature {
  std::map<std::string, OpSig> ops;

  static const Signature& core();
  Signature with(const std::vector<OpSig>& extra) const;
  const OpSig* find(const std::string& name) const;
};

// ty(k): Bool for booleans, Int for integer literals.
TypePtr const_type(const ConstVal& k);

// Raw denotation, no refinement gating: nullopt when the selector is unknown
// or the argument shapes do not fit. Arithmetic wraps on overflow.
std::optional<ConstVal> apply_selector(const std::string& selector,
                                       const std::vector<ConstVal>& args);
bool has_selector(const std::string& selector);

// Surface symbols for infix operations; everything else prints as a call.
const std::map<std::string, std::string>& infix_ops();

bool prime_trial_division(std::int64_t n);

}  // namespace fh
