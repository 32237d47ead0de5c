#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fh/typesystem.hpp"

namespace fh {

// Label used on the casts that subtyping premises wrap around hypothesis
// variables. It never appears in user programs and never gets blamed by the
// prover itself.
inline constexpr const char* kSubLabel = "$sub";

// A refutation the caller can replay: under `assignment` every hypothesis
// refinement holds, yet `goal` does not evaluate to true.
struct Counterexample {
  std::vector<std::pair<std::string, TermPtr>> assignment;
  TermPtr goal;
  std::string detail;
};

struct SubtypeVerdict {
  Tri verdict = Tri::Unknown;
  std::string derivation;                 // filled for Yes
  std::optional<Counterexample> witness;  // filled for No when value-level
  std::string reason;                     // filled for No/Unknown
};

struct ProverConfig {
  std::size_t conv_budget = 2048;
  std::size_t eval_budget = 2048;
  int sample_trials = 64;
  std::uint64_t seed = 20260815;
  std::size_t max_enum_vars = 8;
  bool int_bounds = true;  // interval tactic; switchable for comparison runs
};

// Entailment: does `goal` evaluate to true under every closed instantiation
// of the context's term variables that passes their refinements? Decided by a
// fixed tactic ladder: literal truth, closed evaluation after singleton
// narrowing, hypothesis matching, boolean enumeration, integer bounds, and
// finally sampling for a refutation.
SubtypeVerdict satisfies(const Context& ctx, const TermPtr& goal,
                         const Signature& sig, const ProverConfig& cfg = {});

// Declarative subtyping, directed by the target: refined targets keep their
// hypotheses (refine-r first), refined sources against unrefined targets drop
// a layer (refine-l), everything else is structural.
SubtypeVerdict subtype(const Context& ctx, const TypePtr& sub,
                       const TypePtr& super, const Signature& sig,
                       const ProverConfig& cfg = {});

std::string explain(const SubtypeVerdict& v);

// Strips prover wrapper casts: applications of a bare cast to a variable
// become the variable again. Used to compare goals against hypotheses.
TermPtr strip_wrapper_casts(const TermPtr& e);

}  // namespace fh
