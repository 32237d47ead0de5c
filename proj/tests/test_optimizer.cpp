#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fh/harness.hpp"
#include "fh/optimizer.hpp"
#include "fh/ops.hpp"
#include "fh/parser.hpp"
#include "fh/printer.hpp"
#include "fh/semantics.hpp"

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

bool has_rule(const OptimizeResult& r, const std::string& rule) {
  for (auto& e : r.log)
    if (e.rule == rule) return true;
  return false;
}

}  // namespace

TEST_CASE("selfification equations") {
  auto sig = Signature::core();
  auto v = var("v");

  SUBCASE("base types gain a singleton equation") {
    CHECK(alpha_eq(selfify(tbase("Int"), v),
                   trefine("x", tbase("Int"), opapp("eqInt", {var("x"), v}))));
    CHECK(alpha_eq(selfify(tbase("Bool"), v),
                   trefine("x", tbase("Bool"), opapp("eqBool", {var("x"), v}))));
    // The equation binder avoids the subject's free variables.
    auto s = selfify(tbase("Int"), var("x"));
    CHECK(alpha_eq(s, trefine("z", tbase("Int"), opapp("eqInt", {var("z"), var("x")}))));
  }

  SUBCASE("type variables are left alone") {
    CHECK(alpha_eq(selfify(tvar("a"), v), tvar("a")));
  }

  SUBCASE("function types selfify the codomain at the applied subject") {
    auto t = tfun("y", tbase("Int"), tbase("Int"));
    auto want = tfun("y", tbase("Int"),
                     trefine("x", tbase("Int"),
                             opapp("eqInt", {var("x"), app(v, var("y"))})));
    CHECK(alpha_eq(selfify(t, v), want));
    // A subject mentioning the binder forces a rename.
    auto clash = selfify(t, var("y"));
    auto want2 = tfun("w", tbase("Int"),
                      trefine("x", tbase("Int"),
                              opapp("eqInt", {var("x"), app(var("y"), var("w"))})));
    CHECK(alpha_eq(clash, want2));
  }

  SUBCASE("quantified types selfify the body at the type application") {
    auto t = tforall("a", tbase("Int"));
    auto want = tforall("a", trefine("x", tbase("Int"),
                                     opapp("eqInt", {var("x"), tyapp(v, tvar("a"))})));
    CHECK(alpha_eq(selfify(t, v), want));
    CHECK(alpha_eq(selfify(tforall("a", tvar("a")), v), tforall("a", tvar("a"))));
  }

  SUBCASE("refined types selfify the base and rebind the predicate") {
    auto sig2 = Signature::core();
    auto t = parse_type("{n:Int | n > 0}", sig2);
    auto inner = trefine("x", tbase("Int"),
                         opapp("eqInt", {var("x"), app(cast(t, tbase("Int"), kSelfLabel), v)}));
    auto want = trefine(
        "n", inner,
        let_("n", tbase("Int"),
             app(cast(inner, tbase("Int"), kSelfLabel), var("n")),
             opapp("gt", {var("n"), cint(0)})));
    CHECK(alpha_eq(selfify(t, v), want));
  }

  SUBCASE("selfified types stay well formed and compatible") {
    Rng rng(88);
    Context ctx{{"v", nullptr}};  // placeholder; subjects below are closed
    for (int i = 0; i < 60; ++i) {
      auto t = gen_type(rng, 2);
      auto g = gen_term(rng, {}, t, sig, 5);
      if (!g) continue;
      auto s = selfify(t, *g);
      CHECK(compatible(s, t));
      CHECK(wf_type({}, s, sig));
    }
  }
}

TEST_CASE("cast decompositions have the documented shapes") {
  auto src = parse_type("(x:Int) -> {y:Int | y >= x}");
  auto tgt = parse_type("(x:{v:Int | v > 0}) -> Int");
  auto w = fun_cast_wrapper(src, tgt, "lf");
  // fun (z:src) fun (x:dom2) let y:dom1 = <dom2 => dom1>^l x
  //   in <cod1[y/x1] => cod2[x/x2]>^l (z y)
  auto dom2 = parse_type("{v:Int | v > 0}");
  auto cod1y = trefine("w", tbase("Int"), opapp("ge", {var("w"), var("y")}));
  auto want = lam("z", src,
                  lam("x", dom2,
                      let_("y", tbase("Int"), app(cast(dom2, tbase("Int"), "lf"), var("x")),
                           app(cast(cod1y, tbase("Int"), "lf"),
                               app(var("z"), var("y"))))));
  CHECK(alpha_eq(w, want));
  CHECK(is_value(w));

  auto fsrc = tforall("a", tvar("a"));
  auto ftgt = tforall("b", tvar("b"));
  auto fw = forall_cast_wrapper(fsrc, ftgt, "la");
  // fun (x:src) tyfun (a) <src-body => tgt-body>^l (x [a])
  auto fwant = lam("x", fsrc, tylam("a", app(cast(tvar("a"), tvar("a"), "la"),
                                             tyapp(var("x"), tvar("a")))));
  CHECK(alpha_eq(fw, fwant));

  auto rtgt = parse_type("{x:Int | x > 0}");
  auto pw = precheck_cast_wrapper(tbase("Int"), rtgt, "lp");
  // fun (x:src) <<{y:T|p}, <src => T>^l x>>^l
  auto pwant = lam("x", tbase("Int"),
                   wait(rtgt, app(cast(tbase("Int"), tbase("Int"), "lp"), var("x")), "lp"));
  CHECK(alpha_eq(pw, pwant));
}

TEST_CASE("reflexive casts vanish; undischargeable checks stay") {
  auto sig = Signature::core();
  // q is opaque, so the inner widening cast cannot be proved away; the outer
  // cast's sides differ only in binder names and dies.
  auto e = parse_term("fun (q:Int) <{x:Int | x > 0} => {y:Int | y > 0}>^l (<Int => {x:Int | x > 0}>^m q)", sig);
  auto r = optimize({}, e, sig);
  CHECK(has_rule(r, "ReflElim"));
  CHECK(cast_count(r.term) < cast_count(e));
  auto printed = print_term(r.term);
  CHECK(printed.find("^l") == std::string::npos);
  CHECK(printed.find("^m") != std::string::npos);
  CHECK(alpha_eq(r.term, parse_term("fun (q:Int) <Int => {x:Int | x > 0}>^m q", sig)));
}

TEST_CASE("upcasts are eliminated when subtyping proves them") {
  auto sig = Signature::core();
  auto e = parse_term("fun (q:{v:Int | v > 4}) <{x:Int | x > 4} => {y:Int | y > 2}>^l (<{v:Int | v > 4} => {x:Int | x > 4}>^m q)", sig);
  auto r = optimize({}, e, sig);
  CHECK(has_rule(r, "UpcastElim"));
  bool found = false;
  for (auto& en : r.log)
    if (en.rule == "UpcastElim" && en.before.find("^l") != std::string::npos) {
      CHECK(en.justification.find("refine-r") != std::string::npos);
      found = true;
    }
  CHECK(found);
  auto o1 = evaluate(app(e, cint(7)), sig);
  auto o2 = evaluate(app(r.term, cint(7)), sig);
  REQUIRE(o1.kind == Outcome::Kind::Value);
  REQUIRE(o2.kind == Outcome::Kind::Value);
  CHECK(alpha_eq(o1.result, o2.result));

  // Not a subtype: the cast must stay, whatever the pass order.
  auto keep = parse_term("fun (q:{v:Int | v >= 0}) <{x:Int | x >= 0} => {y:Int | y != 0}>^l (<{v:Int | v >= 0} => {x:Int | x >= 0}>^m q)", sig);
  auto kr = optimize({}, keep, sig);
  CHECK(print_term(kr.term).find("^l") != std::string::npos);
}

TEST_CASE("source refinements may be forgotten when that unlocks progress") {
  auto sig = Signature::core();
  // With upcast elimination switched off, only peeling the source layer
  // exposes the reflexive core.
  auto e = parse_term(
      "<{y:{x:Int | x > 0} | true} => {x:Int | x > 0}>^l ((fun (q:Int) <Int => Int>^m q) 5)",
      sig);
  OptConfig cfg;
  cfg.passes = {"reflexive", "forget", "beta"};
  auto r = optimize({}, e, sig, cfg);
  CHECK(has_rule(r, "ForgetSource"));
  auto o = evaluate(r.term, sig);
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(alpha_eq(o.result, cint(5)));
  // The default pipeline reaches the same end by proving the upcast outright.
  auto d = optimize({}, e, sig);
  CHECK(alpha_eq(d.term, cint(5)));
}

TEST_CASE("function casts decompose and the provable half dies") {
  auto sig = Signature::core();
  auto f = load("fun_cast");
  auto r = optimize({}, f.term, sig);
  CHECK(has_rule(r, "DecompFun"));
  CHECK(has_rule(r, "UpcastElim"));
  // The domain check {v >= 0} => {v != 0} is not provable and must remain.
  CHECK(print_term(r.term).find("<{v:Int | v >= 0} => {v:Int | v != 0}>^l8") != std::string::npos);
  // The original composite cast is gone.
  CHECK(print_term(r.term).find("->") == std::string::npos);
}

TEST_CASE("self-assist discharges checks pinned by a let binding") {
  auto sig0 = Signature::core();
  auto f = load("stack");
  Signature sig = sig0.with(f.sig_ext);
  auto r = optimize({}, f.term, sig);
  CHECK(has_rule(r, "SelfAssist"));
  bool saw = false;
  for (auto& en : r.log)
    if (en.rule == "SelfAssist") {
      saw = true;
      CHECK(en.before.find("^l1") != std::string::npos);
      CHECK(!en.aux.empty());
      CHECK(en.justification.find("narrowing") != std::string::npos);
    }
  CHECK(saw);
  CHECK(cast_count(r.term) == 0);
  auto o = evaluate(r.term, sig);
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(alpha_eq(o.result, cint(0)));
}

TEST_CASE("beta cleanup only touches trivial redexes") {
  auto sig = Signature::core();
  // Identity-on-anything and lambda-on-value collapse;
  // effectful arguments stay.
  auto e1 = parse_term("(fun (x:Int) x) (1 + 2)", sig);
  auto r1 = optimize({}, e1, sig);
  CHECK(alpha_eq(r1.term, parse_term("1 + 2", sig)));
  auto e2 = parse_term("(fun (x:Int) x + x) 5", sig);
  auto r2 = optimize({}, e2, sig);
  CHECK(alpha_eq(r2.term, parse_term("5 + 5", sig)));
  auto e3 = parse_term("(fun (x:Int) x + x) (1 + 2)", sig);
  auto r3 = optimize({}, e3, sig);
  CHECK(alpha_eq(r3.term, e3));  // duplicating a redex is not cleanup
}

TEST_CASE("disabled passes do not fire") {
  auto sig = Signature::core();
  auto f = load("fun_cast");
  OptConfig cfg;
  cfg.passes = {"reflexive", "upcast", "beta"};
  auto r = optimize({}, f.term, sig, cfg);
  CHECK_FALSE(has_rule(r, "DecompFun"));
  CHECK_FALSE(has_rule(r, "ForgetSource"));
  // Without decomposition the composite function cast is opaque and stays.
  const auto* top = std::get_if<App>(&r.term->v);
  REQUIRE(top != nullptr);
  const auto* c = std::get_if<Cast>(&top->fn->v);
  REQUIRE(c != nullptr);
  CHECK(c->label == "l8");
  const auto* orig = std::get_if<App>(&f.term->v);
  CHECK(alpha_eq(c->src, std::get_if<Cast>(&orig->fn->v)->src));
}

TEST_CASE("rewrite logs replay and never cite an unknown verdict") {
  auto sig0 = Signature::core();
  for (const char* name : {"stack", "fun_cast", "cast_pos", "nested_refl", "gates"}) {
    CAPTURE(name);
    auto f = load(name);
    Signature sig = sig0.with(f.sig_ext);
    auto r = optimize(f.ctx, f.term, sig);
    for (auto& en : r.log) {
      CAPTURE(en.rule + " @ " + en.path);
      CHECK(replay_entry(en, sig));
      CHECK(en.justification.find("nknown") == std::string::npos);
      CHECK(!en.before.empty());
      CHECK(!en.after.empty());
    }
  }
}

TEST_CASE("optimization is idempotent and meaning-preserving on generated terms") {
  auto sig = Signature::core();
  Rng rng(1212);
  int made = 0, rewrites = 0;
  while (made < 150) {
    auto g = gen_well_typed(rng, sig, 9);
    if (!g) continue;
    ++made;
    auto r1 = optimize({}, g->term, sig);
    auto r2 = optimize({}, r1.term, sig);
    CAPTURE(print_term(g->term));
    CHECK(alpha_eq(r2.term, r1.term));
    CHECK(r2.log.empty());
    rewrites += static_cast<int>(r1.log.size());
    for (auto& en : r1.log) {
      CAPTURE(en.rule + " @ " + en.path + " | before: " + en.before +
              " | after: " + en.after + " | aux: " + en.aux);
      CHECK(replay_entry(en, sig));
    }
    // Outcome classes agree; constants agree exactly. Result values that
    // are functions may legitimately differ syntactically.
    auto o1 = evaluate(g->term, sig);
    auto o2 = evaluate(r1.term, sig);
    CHECK(o1.kind == o2.kind);
    CHECK(o1.label == o2.label);
    if (o1.kind == Outcome::Kind::Value && is_const(o1.result))
      CHECK(alpha_eq(o1.result, o2.result));
  }
  CHECK(rewrites > 50);  // the corpus must actually exercise the passes
}

TEST_CASE("cast count is monotone without decomposition") {
  auto sig = Signature::core();
  Rng rng(3434);
  OptConfig cfg;
  cfg.passes = {"reflexive", "upcast", "selfassist", "forget", "beta"};
  int made = 0;
  while (made < 150) {
    auto g = gen_well_typed(rng, sig, 9);
    if (!g) continue;
    ++made;
    auto r = optimize({}, g->term, sig, cfg);
    CHECK(cast_count(r.term) <= cast_count(g->term));
  }
}
