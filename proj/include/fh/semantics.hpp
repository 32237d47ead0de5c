#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "fh/ops.hpp"
#include "fh/syntax.hpp"

namespace fh {

// Evaluation contexts, innermost frame last:
//   E ::= [] | op(v.., E, e..) | E e | v E | E T | <<{x:T|e}, E>>^l | <{x:T|e}, E, v>^l
struct FrameOp { std::string op; std::vector<TermPtr> left; std::vector<TermPtr> right; };
struct FrameAppL { TermPtr arg; };
struct FrameAppR { TermPtr fn; };
struct FrameTyApp { TypePtr arg; };
struct FrameWait { TypePtr ref; std::string label; };
struct FrameActive { TypePtr ref; TermPtr value; std::string label; };
using Frame = std::variant<FrameOp, FrameAppL, FrameAppR, FrameTyApp, FrameWait, FrameActive>;

struct EvalContext {
  std::vector<Frame> frames;  // outermost first
  TermPtr plug(TermPtr hole) const;
};

// Unique decomposition of a non-value into (E, r) with r a redex, or (E, blame)
// with E nonempty. nullopt: the term is a value, a bare blame, or stuck.
struct Decomposition {
  EvalContext ctx;
  TermPtr inner;
  bool inner_is_blame;
};
std::optional<Decomposition> decompose(const TermPtr& e, const Signature& sig);

// Denotation of an operation on constant arguments; undefined exactly when
// some argument fails its (dependently instantiated) argument refinement.
std::optional<TermPtr> op_denotation(const Signature& sig, const std::string& op,
                                     const std::vector<TermPtr>& args);

// One contraction of a redex; nullopt when no rule applies. step_index feeds
// the deterministic fresh-name choice of the function-cast rule.
std::optional<TermPtr> reduce(const TermPtr& redex, const Signature& sig,
                              std::size_t step_index = 0);

struct StepResult {
  enum class Kind { Stepped, Value, Blame, Stuck } kind;
  TermPtr term;       // next state, the value, or the stuck term
  std::string label;  // blame only
};
StepResult step(const TermPtr& e, const Signature& sig, std::size_t step_index = 0);

struct Outcome {
  enum class Kind { Value, Blame, Stuck, FuelExhausted } kind;
  TermPtr result;     // final state (value / stuck term / last state on fuel)
  std::string label;  // blame only
  std::size_t steps = 0;
};

constexpr std::size_t kDefaultFuel = 10000;

Outcome evaluate(const TermPtr& e, const Signature& sig, std::size_t fuel = kDefaultFuel);

// All states from the initial term to the final one; size <= steps + 1.
struct EvalTrace {
  std::vector<TermPtr> states;
  Outcome outcome;
};
EvalTrace trace(const TermPtr& e, const Signature& sig, std::size_t fuel = kDefaultFuel);

// Reduces closed redex subterms (children first) up to `budget` total steps;
// open subterms are left alone. Used by type conversion. Second component is
// true when the budget ran out.
std::pair<TermPtr, bool> normalize_embedded(const TermPtr& e, const Signature& sig,
                                            std::size_t budget);
std::pair<TypePtr, bool> normalize_embedded(const TypePtr& t, const Signature& sig,
                                            std::size_t budget);

}  // namespace fh
