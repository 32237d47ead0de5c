#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fh/harness.hpp"
#include "fh/ops.hpp"
#include "fh/parser.hpp"
#include "fh/printer.hpp"
#include "fh/semantics.hpp"
#include "fh/typesystem.hpp"

using namespace fh;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SourceFile load(const char* name) {
  return parse_source(slurp(std::filesystem::path(FH_CORPUS_DIR) / (std::string(name) + ".fh")));
}

TcResult tc(const std::string& s, const Signature& sig = Signature::core()) {
  return typecheck({}, parse_term(s, sig), sig);
}

}  // namespace

TEST_CASE("conversion normalizes embedded closed terms") {
  auto sig = Signature::core();
  CHECK(conv_equiv(parse_type("{y:Int | y > 1 + 1}"), parse_type("{y:Int | y > 2}"), sig) == Tri::Yes);
  CHECK(conv_equiv(parse_type("{y:Int | y > 1}"), parse_type("{y:Int | y > 2}"), sig) == Tri::No);
  CHECK(conv_equiv(parse_type("{x:Int | x > 0}"), parse_type("{v:Int | v > 0}"), sig) == Tri::Yes);
  CHECK(conv_equiv(parse_type("Int -> Int"), parse_type("Int"), sig) == Tri::No);
  // Open subterms block normalization but alpha-equality still applies.
  CHECK(conv_equiv(parse_type("(x:Int) -> {y:Int | y >= x}"),
                   parse_type("(z:Int) -> {w:Int | w >= z}"), sig) == Tri::Yes);

  // A tiny budget on a genuinely deep difference is Unknown, not a guess.
  std::string deep = "0";
  for (int i = 0; i < 60; ++i) deep = "1 + (" + deep + ")";
  auto a = parse_type("{y:Int | y > " + deep + "}");
  auto b = parse_type("{y:Int | y > 60}");
  CHECK(conv_equiv(a, b, sig, 4) == Tri::Unknown);
  CHECK(conv_equiv(a, b, sig, 4096) == Tri::Yes);
}

TEST_CASE("compatibility erases refinements only") {
  CHECK(compatible(parse_type("{x:Int | x > 0}"), parse_type("Int")));
  CHECK(compatible(parse_type("{y:{x:Int | x > 0} | y == 1}"), parse_type("{v:Int | prime?(v)}")));
  CHECK(compatible(parse_type("(x:{v:Int | v > 0}) -> Bool"), parse_type("Int -> Bool")));
  CHECK_FALSE(compatible(parse_type("Int"), parse_type("Bool")));
  CHECK_FALSE(compatible(parse_type("Int -> Int"), parse_type("Int")));
  CHECK_FALSE(compatible(parse_type("forall a. a"), parse_type("Int")));
  CHECK(alpha_eq(erase_refinements(parse_type("{y:{x:Int | x > 0} | y == 1}")), tbase("Int")));
}

TEST_CASE("synthesis has no subsumption") {
  // A refined result does not feed a plain parameter without a cast.
  auto bad = tc("(fun (x:Int) x) (<Int => {v:Int | v > 0}>^l 3)");
  CHECK_FALSE(bad.ok());
  CHECK(bad.err == TcErr::ArgMismatch);
  auto good = tc("(fun (x:Int) x) (<{v:Int | v > 0} => Int>^f (<Int => {v:Int | v > 0}>^l 3))");
  REQUIRE(good.ok());
  CHECK(alpha_eq(*good.type, tbase("Int")));
}

TEST_CASE("application substitutes argument terms into dependent results") {
  auto r = tc("(fun (x:Int) <Int => {y:Int | y >= x}>^ld (x + 1)) 41");
  REQUIRE(r.ok());
  CHECK(alpha_eq(*r.type, parse_type("{y:Int | y >= 41}")));

  // Operation results substitute too, with actual argument terms.
  auto f = load("gates");
  Signature sig = Signature::core().with(f.sig_ext);
  auto inner = typecheck({}, parse_term("inc(0)", sig), sig);
  REQUIRE(inner.ok());
  CHECK(alpha_eq(*inner.type, parse_type("{y:Int | y > 0}", sig)));
  auto whole = typecheck(f.ctx, f.term, sig);
  REQUIRE(whole.ok());
  CHECK(alpha_eq(*whole.type, tbase("Int")));
}

TEST_CASE("cast typing requires compatibility, not subtyping") {
  auto r = tc("<{x:Int | x >= 0} => {x:Int | x != 0}>^l");
  REQUIRE(r.ok());  // not a subtype in either direction, still castable
  CHECK(alpha_eq(*r.type, parse_type("(_:{x:Int | x >= 0}) -> {x:Int | x != 0}")));
  auto bad = tc("<Int => Bool>^l 5");
  CHECK_FALSE(bad.ok());
  CHECK(bad.err == TcErr::IncompatibleCast);
}

TEST_CASE("type errors are specific") {
  CHECK(tc("x").err == TcErr::UnboundVar);
  CHECK(tc("fun (x:a) x").err == TcErr::UnboundTypeVar);
  CHECK(tc("5 3").err == TcErr::NotAFunction);
  CHECK(tc("5 [Int]").err == TcErr::NotAForall);
  CHECK(tc("add(1)").err == TcErr::OpArity);
  CHECK(tc("add(1, true)").err == TcErr::ArgMismatch);
  CHECK(tc("nosuchop(1)").err == TcErr::UnboundVar);
  CHECK(tc("blame l").err == TcErr::BlameNoUniqueType);
  CHECK(tc("fun (x:{y:Int | y + 1}) x").err == TcErr::PredicateNotBool);
  CHECK(typecheck({}, opapp("nosuch", {cint(1)}), Signature::core()).err == TcErr::UnknownOp);
}

TEST_CASE("blame only fails the typed fragment, never evaluation") {
  for (const char* name : {"illtyped_refl", "illtyped_forget"}) {
    CAPTURE(name);
    auto f = load(name);
    auto r = typecheck(f.ctx, f.term, Signature::core());
    CHECK_FALSE(r.ok());
    auto o = evaluate(f.term, Signature::core());
    REQUIRE(o.kind == Outcome::Kind::Blame);
    CHECK(o.label == "l");
  }
  // A bare constant never converts to a refined cast source: these two run
  // (source refinements are not checked) but do not typecheck.
  for (const char* name : {"prime_pass", "prime_blame"}) {
    CAPTURE(name);
    auto f = load(name);
    CHECK(typecheck(f.ctx, f.term, Signature::core()).err == TcErr::ArgMismatch);
    CHECK(evaluate(f.term, Signature::core()).kind != Outcome::Kind::Stuck);
  }
}

TEST_CASE("check states must be actual intermediates") {
  auto sig = Signature::core();
  auto ok = tc("<{x:Int | 0 < x}, 0 < 5, 5>^l");
  REQUIRE(ok.ok());
  CHECK(alpha_eq(*ok.type, parse_type("{x:Int | 0 < x}")));
  auto mid = tc("<{x:Int | 0 < x}, true, 5>^l");
  CHECK(mid.ok());
  auto bogus = tc("<{x:Int | 0 < x}, 1 < 5, 5>^l");
  CHECK_FALSE(bogus.ok());
  CHECK(bogus.err == TcErr::CheckForm);

  auto w = tc("<<{x:Int | 0 < x}, 2 + 3>>^l");
  REQUIRE(w.ok());
  CHECK(alpha_eq(*w.type, parse_type("{x:Int | 0 < x}")));
}

TEST_CASE("refinement well-formedness observes the binder at the refined type") {
  auto sig = Signature::core();
  // The binder of an outer layer has the refined inner type; applying a base
  // operation to it directly is ill formed without a forget cast.
  std::string err;
  CHECK_FALSE(wf_type({}, parse_type("{y:{x:Int | x > 0} | y == 5}"), sig, &err));
  CHECK(!err.empty());
  CHECK(wf_type({}, parse_type("{y:{x:Int | x > 0} | (<{x:Int | x > 0} => Int>^f y) == 5}"), sig));
  CHECK(wf_type({}, parse_type("(x:Int) -> {y:Int | y >= x}"), sig));
  CHECK_FALSE(wf_type({}, parse_type("{y:Int | y >= x}"), sig));  // x unbound

  std::string werr;
  CHECK(wf_context(load("open_term").ctx, sig, &werr));
  Context dup{{"x", tbase("Int")}, {"x", tbase("Bool")}};
  CHECK_FALSE(wf_context(dup, sig, &werr));
  CHECK(!werr.empty());
}

TEST_CASE("runtime rules admit what evaluation established") {
  auto sig = Signature::core();
  TcOptions rt;
  rt.runtime_rules = true;

  // A closed value checked against the refinement it satisfies.
  auto exact = app(lam("x", parse_type("{v:Int | v == 5}"), var("x")), cint(5));
  CHECK_FALSE(typecheck({}, exact, sig).ok());
  CHECK(typecheck({}, exact, sig, rt).ok());
  auto exact_bad = app(lam("x", parse_type("{v:Int | v == 5}"), var("x")), cint(6));
  CHECK_FALSE(typecheck({}, exact_bad, sig, rt).ok());

  // A refined argument where a plain one is expected (dropped source layer).
  Context ctx{{"n", parse_type("{v:Int | v > 0}")}};
  auto forget = app(lam("x", tbase("Int"), var("x")), var("n"));
  CHECK_FALSE(typecheck(ctx, forget, sig).ok());
  CHECK(typecheck(ctx, forget, sig, rt).ok());
}

TEST_CASE("signature validation") {
  auto core = validate_signature(Signature::core());
  CHECK(core.ok);
  CHECK(core.problems.empty());

  auto f = load("stack");
  auto stacked = validate_signature(Signature::core().with(f.sig_ext));
  CHECK(stacked.ok);

  // A result refinement the selector does not actually satisfy.
  auto lie = OpSig{"lie", {{"x", tbase("Int")}},
                   parse_type("{y:Int | y > x + 1}"), "succ"};
  auto bad = validate_signature(Signature::core().with({lie}));
  CHECK_FALSE(bad.ok);
  REQUIRE(!bad.problems.empty());
  CHECK(bad.problems[0].find("lie") != std::string::npos);

  // Unknown selectors are reported.
  auto ghost = OpSig{"ghost", {{"x", tbase("Int")}}, tbase("Int"), "warp"};
  CHECK_FALSE(validate_signature(Signature::core().with({ghost})).ok);
}

TEST_CASE("corpus programs synthesize their documented types") {
  struct Row { const char* name; const char* type; };
  const Row rows[] = {
      {"cast_pos", "{x:Int | 0 < x}"},
      {"poly_id", "Int"},
      {"runtime_forms", "{x:Int | x > 0}"},
      {"dependent_fun", "{y:Int | y >= 41}"},
      {"stack", "Int"},
      {"open_term", "Int"},
  };
  for (auto& row : rows) {
    CAPTURE(row.name);
    auto f = load(row.name);
    Signature sig = Signature::core().with(f.sig_ext);
    auto r = typecheck(f.ctx, f.term, sig);
    REQUIRE(r.ok());
    CHECK(alpha_eq(*r.type, parse_type(row.type, sig)));
  }
}

TEST_CASE("generated programs synthesize their generation targets") {
  auto sig = Signature::core();
  Rng rng(515);
  int made = 0;
  while (made < 250) {
    auto g = gen_well_typed(rng, sig, 8);
    if (!g) continue;
    ++made;
    auto r = typecheck({}, g->term, sig);
    CAPTURE(print_term(g->term));
    REQUIRE(r.ok());
    CHECK(conv_equiv(*r.type, g->type, sig) == Tri::Yes);
  }
}
