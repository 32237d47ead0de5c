#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fh/semantics.hpp"
#include "fh/typesystem.hpp"

namespace fh {

// All randomness flows through one engine so (seed, config) pins every
// report; raw draws use modulo reduction on purpose — replayability matters
// here, not statistical polish.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  std::uint64_t next() { return eng(); }
  std::size_t pick(std::size_t n) { return n ? next() % n : 0; }
  bool coin() { return next() % 2 == 0; }
  std::int64_t small_int() {
    static const std::int64_t pool[] = {0, 1, -1, 2, -2, 3, -3, 5, 7, -7, 13};
    return pool[pick(sizeof(pool) / sizeof(pool[0]))];
  }
};

// Closed types with refinements from a curated pool (so the provers and all
// reduction rules get exercised); tyvars only under their own quantifier.
TypePtr gen_type(Rng& rng, int depth,
                 const std::vector<std::string>& tyvars = {});

// Random refinement layers over a refinement-free skeleton; the result is
// always compatible with the input (and with any other redecoration of it).
TypePtr redecorate(Rng& rng, const TypePtr& skel);

// Type-directed generation: the result synthesizes exactly `target` (up to
// alpha) under ctx, by construction. nullopt when backtracking gave up.
std::optional<TermPtr> gen_term(Rng& rng, const Context& ctx,
                                const TypePtr& target, const Signature& sig,
                                int size);

struct GenTerm {
  TypePtr type;
  TermPtr term;
};
// Draws (type, closed term) pairs, retrying generator dead ends.
std::optional<GenTerm> gen_well_typed(Rng& rng, const Signature& sig, int size,
                                      int attempts = 40);

// A static evaluation context: op / application / type-application frames
// only, never run-time check frames above the hole. The hole is the reserved
// free variable $hole of `body`; plugging substitutes it.
inline constexpr const char* kHoleVar = "$hole";
struct StaticContext {
  TermPtr body;
  TypePtr result;
};
StaticContext gen_static_context(Rng& rng, const TypePtr& hole_type,
                                 const Signature& sig, int size);
TermPtr plug_context(const StaticContext& c, const TermPtr& e);

// Closing substitution respecting a context: values pass their (substituted)
// refinements, checked by evaluation; types are closed and well formed.
struct ClosingSubst {
  std::vector<std::pair<std::string, TypePtr>> types;
  std::vector<std::pair<std::string, TermPtr>> values;
};
std::optional<ClosingSubst> gen_closing_subst(Rng& rng, const Context& ctx,
                                              const Signature& sig,
                                              int value_size = 6,
                                              int attempts = 64);
TermPtr apply_subst(const ClosingSubst& s, TermPtr e);
TypePtr apply_subst(const ClosingSubst& s, TypePtr t);
std::string show_subst(const ClosingSubst& s);

std::string outcome_string(const Outcome& o);

// Observable equivalence of closed terms: outcome classes only — values are
// not compared here, blame labels must match, stuck agrees with stuck; fuel
// exhaustion on either side is Inconclusive.
enum class Obs { Equal, Differ, Inconclusive };
struct ObsResult {
  Obs obs;
  std::string detail;
};
ObsResult obs_equiv(const TermPtr& e1, const TermPtr& e2, const Signature& sig,
                    std::size_t fuel);

struct Witness {
  int trial = 0;
  std::string context;
  std::string substitution;
  std::string left, right;
};
struct EquivReport {
  int trials = 0;
  int agreements = 0;
  int inconclusive = 0;
  std::vector<Witness> witnesses;
  bool equal() const { return witnesses.empty(); }
};

struct CiuConfig {
  int trials = 200;
  std::size_t fuel = 10000;
  std::uint64_t seed = 1;
  int ctx_size = 10;
  int subst_size = 6;
};

// CIU equivalence as a refuting oracle: e1 must typecheck at `type` under
// ctx; e2 may be ill typed. Each trial draws a closing substitution and a
// static context; at base result types constants are additionally compared.
EquivReport ciu_test(const Context& ctx, const TypePtr& type,
                     const TermPtr& e1, const TermPtr& e2,
                     const Signature& sig, const CiuConfig& cfg = {});

// Cotermination sampling: (e with one free x, closed e1 with e1 -> e2);
// e[e1/x] and e[e2/x] must agree observably, and when both land on Bool
// constants the constants must be equal.
EquivReport cotermination_test(const Signature& sig, int trials,
                               std::size_t fuel, std::uint64_t seed);

// Exhaustive search over every frame-respecting split of e into an
// evaluation context and a redex (or lifted blame); the oracle the unique-
// decomposition property is checked against.
struct Split {
  EvalContext ctx;
  TermPtr inner;
  bool inner_is_blame;
};
std::vector<Split> all_splits(const TermPtr& e, const Signature& sig);

}  // namespace fh
