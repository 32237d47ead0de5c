// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Each criterion re-derives its evidence from scratch so a regression in any
// layer (parser, machine, checker, prover, optimizer, harness) surfaces here.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fh/harness.hpp"
#include "fh/optimizer.hpp"
#include "fh/ops.hpp"
#include "fh/parser.hpp"
#include "fh/printer.hpp"
#include "fh/semantics.hpp"

using namespace fh;

namespace {

struct Crit {
  bool ok = true;
  std::string detail;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
  void note(const std::string& d) {
    if (ok) detail = d;
  }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in.good()) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string l;
  while (std::getline(is, l)) out.push_back(l);
  return out;
}

SourceFile load(const char* name) {
  return parse_source(slurp(std::filesystem::path(FH_CORPUS_DIR) / (std::string(name) + ".fh")));
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// ---------------------------------------------------------------- criterion 1
// Golden traces, token for token, plus the documented outcome of each strand:
// base-cast pass/blame, the prime upcast, the fussy nested reflexive cast
// visiting both waiting checks, and the two ill-typed reflexive programs that
// blame anyway.
Crit crit1() {
  Crit c;
  struct Row {
    const char* program;
    const char* golden;
  };
  const Row rows[] = {
      {"cast_pos", "trace_pos"},
      {"cast_neg", "trace_neg"},
      {"prime_blame", "trace_prime_blame"},
      {"prime_pass", "trace_prime_pass"},
      {"nested_refl", "trace_nested_refl"},
      {"illtyped_refl", "trace_illtyped_refl"},
      {"illtyped_forget", "trace_illtyped_forget"},
  };
  auto sig = Signature::core();
  std::map<std::string, Outcome> outs;
  for (auto& row : rows) {
    auto src = parse_source(slurp(std::filesystem::path(FH_CORPUS_DIR) /
                                  (std::string(row.program) + ".fh")));
    auto tr = trace(src.term, sig, kDefaultFuel);
    auto want = lines_of(slurp(std::filesystem::path(FH_GOLDEN_DIR) /
                               (std::string(row.golden) + ".txt")));
    c.expect(tr.states.size() == want.size(),
             std::string(row.program) + ": trace length differs from golden");
    for (std::size_t i = 0; i < want.size() && i < tr.states.size(); ++i)
      c.expect(print_term(tr.states[i]) == want[i],
               std::string(row.program) + ": state " + std::to_string(i) + " differs");
    outs.emplace(row.program, tr.outcome);
    if (std::string(row.program) == "nested_refl") {
      bool outer = false, inner = false;
      for (auto& st : tr.states) {
        auto s = print_term(st);
        if (contains(s, "<<{x:{y:Int | y > 2} | prime?(x)},")) outer = true;
        if (contains(s, "<<{y:Int | y > 2},")) inner = true;
      }
      c.expect(outer && inner, "nested_refl: missing a waiting check for one refinement layer");
    }
  }
  auto is_value_of = [&](const char* p, std::int64_t n) {
    auto& o = outs.at(p);
    return o.kind == Outcome::Kind::Value && alpha_eq(o.result, cint(n));
  };
  auto blames_l = [&](const char* p) {
    auto& o = outs.at(p);
    return o.kind == Outcome::Kind::Blame && o.label == "l";
  };
  c.expect(is_value_of("cast_pos", 5), "positive base cast must return 5");
  c.expect(blames_l("cast_neg"), "negative base cast must blame l");
  c.expect(blames_l("prime_blame"), "prime cast on 2 must blame l");
  c.expect(is_value_of("prime_pass", 5), "prime cast on 5 must return 5");
  c.expect(blames_l("illtyped_refl"), "reflexive unsatisfiable cast must blame l");
  c.expect(blames_l("illtyped_forget"), "forgetting cast into unsatisfiable target must blame l");
  c.note("7 traces token-identical; pass/blame strands all as documented");
  return c;
}

// ---------------------------------------------------------------- criterion 2
// Soundness sampling: 500 well-typed closed terms, seed 42, fuel 10^4. No
// stuck outcomes; fuel exhaustion at most 2%; every value passes each
// refinement layer of its static type.
Crit crit2() {
  Crit c;
  auto sig = Signature::core();
  Rng rng(42);
  int made = 0, fuel = 0, stuck = 0, inversion_bad = 0;
  while (made < 500) {
    auto g = gen_well_typed(rng, sig, 8);
    if (!g) continue;
    ++made;
    auto o = evaluate(g->term, sig, 10000);
    if (o.kind == Outcome::Kind::Stuck) ++stuck;
    if (o.kind == Outcome::Kind::FuelExhausted) ++fuel;
    if (o.kind == Outcome::Kind::Value) {
      for (auto& layer : refines(g->type)) {
        auto probe = evaluate(app(layer, o.result), sig, 10000);
        if (probe.kind != Outcome::Kind::Value || !is_true(probe.result)) ++inversion_bad;
      }
    }
  }
  c.expect(stuck == 0, std::to_string(stuck) + " stuck outcomes");
  c.expect(inversion_bad == 0, std::to_string(inversion_bad) + " value-inversion failures");
  c.expect(fuel * 50 <= made, std::to_string(fuel) + "/500 fuel exhaustions exceeds 2%");
  c.note("500 terms: 0 stuck, 0 inversion failures, " + std::to_string(fuel) +
         " fuel exhaustions (<= 10 allowed)");
  return c;
}

// ---------------------------------------------------------------- criterion 3
// Determinism and unique decomposition: on every state of every trace the
// one-hole decomposition agrees with the exhaustive all-positions oracle, and
// re-evaluating gives a bit-identical trace.
Crit crit3() {
  Crit c;
  auto sig = Signature::core();
  Rng rng(909);
  int made = 0, states = 0;
  while (made < 300) {
    int size = 4 + static_cast<int>(rng.pick(9));  // 4..12
    auto g = gen_well_typed(rng, sig, size);
    if (!g) continue;
    ++made;
    auto t1 = trace(g->term, sig, kDefaultFuel);
    auto t2 = trace(g->term, sig, kDefaultFuel);
    c.expect(t1.states.size() == t2.states.size(), "trace lengths differ between runs");
    for (std::size_t i = 0; i < t1.states.size() && i < t2.states.size(); ++i)
      c.expect(print_term(t1.states[i]) == print_term(t2.states[i]),
               "re-evaluation produced a different state");
    for (auto& st : t1.states) {
      ++states;
      auto d = decompose(st, sig);
      auto splits = all_splits(st, sig);
      if (!d) {
        c.expect(splits.empty(), "oracle found a split the machine missed");
      } else {
        c.expect(splits.size() == 1, "oracle found a non-unique decomposition");
        if (splits.size() == 1) {
          c.expect(alpha_eq(splits[0].inner, d->inner), "decomposed inner term differs");
          c.expect(splits[0].inner_is_blame == d->inner_is_blame, "blame lifting differs");
          c.expect(print_term(d->ctx.plug(d->inner)) == print_term(st),
                   "plugging the decomposition does not restore the state");
        }
      }
    }
  }
  c.note("300 terms, " + std::to_string(states) +
         " states: decomposition unique and re-evaluation bit-identical");
  return c;
}

// ---------------------------------------------------------------- criterion 4
Crit crit4() {
  Crit c;
  auto rep = cotermination_test(Signature::core(), 300, 10000, 2026);
  c.expect(rep.trials == 300, "wrong trial count");
  c.expect(rep.witnesses.empty(),
           std::to_string(rep.witnesses.size()) + " cotermination witnesses");
  c.note("300 triples: " + std::to_string(rep.agreements) + " agreements, " +
         std::to_string(rep.inconclusive) + " inconclusive, 0 witnesses");
  return c;
}

// ---------------------------------------------------------------- criterion 5
// Upcast elimination: curated provable pairs plus generated Yes verdicts are
// behaviorally equal to the identity; the canonical non-upcast is refuted.
Crit crit5() {
  Crit c;
  auto sig = Signature::core();
  const char* curated[][2] = {
      {"{b:Bool | b}", "Bool"},
      {"{x:Int | prime?(x)}", "Int"},
      {"{x:{y:Int | y > 2} | prime?(<{y:Int | y > 2} => Int>^lf x)}", "Int"},
      {"Bool", "{c:Bool | c or not(c)}"},
      {"{b:Bool | b}", "{c:Bool | c}"},
      {"{b:Bool | b and b}", "{c:Bool | c or c}"},
      {"{b:Bool | not(b)}", "{c:Bool | not(c) or c}"},
      {"{b:Bool | false}", "{c:Bool | c}"},
      {"{b:Bool | b and not(b)}", "{c:Bool | not(c)}"},
      {"{x:Int | prime?(x)}", "{y:Int | prime?(y)}"},
      {"{x:{y:Int | y > 2} | prime?(<{y:Int | y > 2} => Int>^lf x)}", "{z:Int | z > 2}"},
      {"{x:{y:Int | y > 2} | prime?(<{y:Int | y > 2} => Int>^lf x)}", "{z:Int | prime?(z)}"},
      {"{x:Int | x > 5}", "{y:Int | y > 5}"},
      {"{x:Int | x >= 10}", "{y:Int | y >= 10}"},
      {"{x:{y:Int | prime?(y)} | <{y:Int | prime?(y)} => Int>^lf x > 2}", "{z:Int | prime?(z)}"},
      {"{x:{y:Int | prime?(y)} | <{y:Int | prime?(y)} => Int>^lf x > 2}", "{z:Int | z > 2}"},
      {"{b:{c:Bool | c} | not(not(<{c:Bool | c} => Bool>^lf b))}", "{d:Bool | d}"},
      {"{x:Int | x == 7}", "{y:Int | y == 7}"},
      {"(x:Int) -> {y:Int | prime?(y)}", "(x:{v:Int | v > 2}) -> {y:Int | prime?(y)}"},
      {"forall a. (x:Bool) -> {y:Bool | y}", "forall a. (x:Bool) -> {y:Bool | y or not(y)}"},
  };
  int idx = 0, ciu_clean = 0;
  auto check_pair = [&](const TypePtr& t1, const TypePtr& t2, const std::string& tag) {
    ++idx;
    auto v = subtype({}, t1, t2, sig);
    c.expect(v.verdict == Tri::Yes, tag + ": prover did not say yes");
    if (v.verdict != Tri::Yes) return;
    CiuConfig cfg;
    cfg.trials = 200;
    cfg.seed = 100 + idx;
    auto rep = ciu_test({}, tfun("_", t1, t2), cast(t1, t2, "l"),
                        lam("x", t1, var("x")), sig, cfg);
    c.expect(rep.equal(), tag + ": " + std::to_string(rep.witnesses.size()) +
                              " witnesses against the identity");
    if (rep.equal()) ++ciu_clean;
  };
  for (auto& row : curated)
    check_pair(parse_type(row[0], sig), parse_type(row[1], sig),
               std::string("curated <") + row[0] + " => " + row[1] + ">");

  Rng rng(4242);
  int gen_yes = 0, draws = 0;
  while (gen_yes < 20 && draws < 300) {
    ++draws;
    auto skel = erase_refinements(gen_type(rng, 2));
    auto t1 = redecorate(rng, skel);
    auto t2 = redecorate(rng, skel);
    if (subtype({}, t1, t2, sig).verdict != Tri::Yes) continue;
    ++gen_yes;
    check_pair(t1, t2, "generated " + print_type(t1) + " => " + print_type(t2));
  }
  c.expect(gen_yes >= 10, "too few generated yes verdicts to be meaningful");

  CiuConfig neg;
  neg.trials = 200;
  neg.seed = 7;
  auto nsrc = parse_type("{x:Int | x >= 0}", sig);
  auto ntgt = parse_type("{x:Int | x != 0}", sig);
  auto nrep = ciu_test({}, tfun("_", nsrc, ntgt), cast(nsrc, ntgt, "l"),
                       lam("x", nsrc, var("x")), sig, neg);
  c.expect(!nrep.witnesses.empty(), "negative control produced no witness");
  c.note(std::to_string(ciu_clean) + " upcasts (20 curated + " + std::to_string(gen_yes) +
         " generated) identity-equivalent at 200 trials; negative control: " +
         std::to_string(nrep.witnesses.size()) + " witnesses");
  return c;
}

// ---------------------------------------------------------------- criterion 6
// Selfification: the structural equations, then the cast-elimination behavior
// <T => selfify(T,e)>^l e ~ e over the corpus and generated subjects.
Crit crit6() {
  Crit c;
  auto sig = Signature::core();
  auto v = var("v");

  c.expect(alpha_eq(selfify(tbase("Int"), v),
                    trefine("x", tbase("Int"), opapp("eqInt", {var("x"), v}))),
           "base equation (Int) differs");
  c.expect(alpha_eq(selfify(tbase("Bool"), v),
                    trefine("x", tbase("Bool"), opapp("eqBool", {var("x"), v}))),
           "base equation (Bool) differs");
  c.expect(alpha_eq(selfify(tvar("a"), v), tvar("a")), "type variables must be untouched");
  c.expect(alpha_eq(selfify(tfun("y", tbase("Int"), tbase("Int")), v),
                    tfun("y", tbase("Int"),
                         trefine("x", tbase("Int"),
                                 opapp("eqInt", {var("x"), app(v, var("y"))})))),
           "function equation differs");
  c.expect(alpha_eq(selfify(tforall("a", tbase("Int")), v),
                    tforall("a", trefine("x", tbase("Int"),
                                         opapp("eqInt", {var("x"), tyapp(v, tvar("a"))})))),
           "quantifier equation differs");
  {
    auto t = parse_type("{n:Int | n > 0}", sig);
    auto inner = trefine("x", tbase("Int"),
                         opapp("eqInt", {var("x"), app(cast(t, tbase("Int"), kSelfLabel), v)}));
    auto want = trefine("n", inner,
                        let_("n", tbase("Int"),
                             app(cast(inner, tbase("Int"), kSelfLabel), var("n")),
                             opapp("gt", {var("n"), cint(0)})));
    c.expect(alpha_eq(selfify(t, v), want), "refinement equation differs");
  }

  int subjects = 0;
  auto behavioral = [&](const Context& ctx, const TermPtr& e, const Signature& s,
                        int trials, std::uint64_t seed, const std::string& tag) {
    auto tc = typecheck(ctx, e, s);
    c.expect(tc.ok(), tag + ": subject does not typecheck");
    if (!tc.ok()) return;
    auto self = selfify(*tc.type, e);
    CiuConfig cfg;
    cfg.trials = trials;
    cfg.seed = seed;
    auto rep = ciu_test(ctx, self, app(cast(*tc.type, self, "lself"), e), e, s, cfg);
    c.expect(rep.equal(), tag + ": " + std::to_string(rep.witnesses.size()) +
                              " witnesses for the selfification cast");
    if (rep.equal()) ++subjects;
  };
  for (const char* name : {"cast_pos", "poly_id", "runtime_forms", "dependent_fun",
                           "gates", "fun_cast", "stack", "open_term"}) {
    auto f = load(name);
    behavioral(f.ctx, f.term, Signature::core().with(f.sig_ext), 100, 600 + subjects,
               std::string("corpus ") + name);
  }
  Rng rng(52);
  int made = 0;
  while (made < 25) {
    auto g = gen_well_typed(rng, sig, 7);
    if (!g) continue;
    ++made;
    behavioral({}, g->term, sig, 40, 700 + made, "generated subject " + std::to_string(made));
  }
  c.note("structural equations hold; " + std::to_string(subjects) +
         " subjects (8 corpus + 25 generated) selfification-cast clean");
  return c;
}

// ---------------------------------------------------------------- criterion 7
// Cast decomposition laws, 50 generated instances each: function, quantifier,
// precheck (whose wrapper must re-typecheck), and reflexive-vs-identity.
Crit crit7() {
  Crit c;
  auto sig = Signature::core();
  auto run = [&](const TypePtr& ty, const TermPtr& e1, const TermPtr& e2,
                 std::uint64_t seed, const std::string& tag) {
    CiuConfig cfg;
    cfg.trials = 40;
    cfg.seed = seed;
    auto rep = ciu_test({}, ty, e1, e2, sig, cfg);
    c.expect(rep.equal(),
             tag + ": " + std::to_string(rep.witnesses.size()) + " witnesses");
  };

  Rng rf(71);
  for (int i = 0; i < 50; ++i) {
    TypePtr src, tgt;
    do {
      auto skel = tfun("x", erase_refinements(gen_type(rf, 1)),
                       erase_refinements(gen_type(rf, 1)));
      src = redecorate(rf, skel);
      tgt = redecorate(rf, skel);
    } while (!std::holds_alternative<TFun>(src->v) || !std::holds_alternative<TFun>(tgt->v));
    run(tfun("_", src, tgt), cast(src, tgt, "l"), fun_cast_wrapper(src, tgt, "l"),
        1000 + i, "fun law #" + std::to_string(i));
  }

  Rng ra(72);
  for (int i = 0; i < 50; ++i) {
    TypePtr src, tgt;
    do {
      auto skel = tforall("a", erase_refinements(gen_type(ra, 1, {"a"})));
      src = redecorate(ra, skel);
      tgt = redecorate(ra, skel);
    } while (!std::holds_alternative<TForall>(src->v) ||
             !std::holds_alternative<TForall>(tgt->v));
    run(tfun("_", src, tgt), cast(src, tgt, "l"), forall_cast_wrapper(src, tgt, "l"),
        2000 + i, "forall law #" + std::to_string(i));
  }

  Rng rp(73);
  int retypecheck_ok = 0;
  for (int i = 0; i < 50; ++i) {
    auto base = tbase(rp.coin() ? "Int" : "Bool");
    TypePtr tgt;
    do tgt = redecorate(rp, base);
    while (!std::holds_alternative<TRefine>(tgt->v));
    auto src = redecorate(rp, base);
    auto w = precheck_cast_wrapper(src, tgt, "l");
    if (typecheck({}, w, sig).ok()) ++retypecheck_ok;
    run(tfun("_", src, tgt), cast(src, tgt, "l"), w, 3000 + i,
        "precheck law #" + std::to_string(i));
  }
  c.expect(retypecheck_ok == 50, std::to_string(50 - retypecheck_ok) +
                                     " precheck wrappers failed to re-typecheck");

  Rng rr(74);
  for (int i = 0; i < 50; ++i) {
    auto t = gen_type(rr, 2);
    run(tfun("_", t, t), cast(t, t, "l"), lam("x", t, var("x")), 4000 + i,
        "refl law #" + std::to_string(i));
  }
  c.note("fun/forall/precheck/refl: 50 instances each ciu-clean; "
         "all 50 precheck wrappers re-typecheck");
  return c;
}

// ---------------------------------------------------------------- criterion 8
// The worked function cast: decomposition kills the provable codomain half,
// keeps the domain half, and the optimized program is a behavioral match.
Crit crit8() {
  Crit c;
  auto f = load("fun_cast");
  auto sig = Signature::core().with(f.sig_ext);
  auto r = optimize({}, f.term, sig);
  bool decomp = false, upcast = false;
  for (auto& e : r.log) {
    if (e.rule == "DecompFun") decomp = true;
    if (e.rule == "UpcastElim" && contains(e.before, "prime?")) upcast = true;
  }
  c.expect(decomp, "no function-cast decomposition fired");
  c.expect(upcast, "the codomain upcast was not eliminated");
  auto printed = print_term(r.term);
  c.expect(contains(printed, "<{v:Int | v >= 0} => {v:Int | v != 0}>^l8"),
           "the domain cast must survive");
  c.expect(!contains(printed, "=> {y:Int | y > 0}"), "the codomain cast must be gone");
  c.expect(!contains(printed, "->"), "a composite function cast survived");

  auto tc = typecheck({}, f.term, sig);
  c.expect(tc.ok(), "original program does not typecheck");
  if (tc.ok()) {
    CiuConfig cfg;
    cfg.trials = 200;
    cfg.seed = 7;
    auto rep = ciu_test({}, *tc.type, f.term, r.term, sig, cfg);
    c.expect(rep.equal(), std::to_string(rep.witnesses.size()) +
                              " witnesses between original and optimized");
  }
  c.note("codomain upcast eliminated, domain cast retained; 200-trial difftest clean");
  return c;
}

// ---------------------------------------------------------------- criterion 9
// The stack program: the self-assisted pass removes the guarding cast, and
// the optimized program still runs the pops to the empty-depth value.
Crit crit9() {
  Crit c;
  auto f = load("stack");
  auto sig = Signature::core().with(f.sig_ext);
  auto r = optimize({}, f.term, sig);
  bool selfassist = false;
  for (auto& e : r.log)
    if (e.rule == "SelfAssist" && contains(e.before, "^l1")) selfassist = true;
  c.expect(selfassist, "the self-assisted pass did not remove the guarded cast");
  c.expect(cast_count(r.term) == 0, "casts remain after optimization");
  auto o = evaluate(r.term, sig, kDefaultFuel);
  c.expect(o.kind == Outcome::Kind::Value && alpha_eq(o.result, cint(0)),
           "optimized stack program must evaluate to the empty depth 0");
  CiuConfig cfg;
  cfg.trials = 200;
  cfg.seed = 11;
  auto tc = typecheck({}, f.term, sig);
  c.expect(tc.ok(), "stack program does not typecheck");
  if (tc.ok()) {
    auto rep = ciu_test({}, *tc.type, f.term, r.term, sig, cfg);
    c.expect(rep.equal(), std::to_string(rep.witnesses.size()) +
                              " witnesses between original and optimized");
  }
  c.note("guarding cast removed by self-assist; optimized run returns 0; difftest clean");
  return c;
}

// --------------------------------------------------------------- criterion 10
// Optimizer hygiene: idempotence, full log replay, no Unknown-justified
// rewrite — over every corpus file and a generated batch.
Crit crit10() {
  Crit c;
  int rewrites = 0, programs = 0;
  auto audit = [&](const Context& ctx, const TermPtr& e, const Signature& sig,
                   const std::string& tag) {
    ++programs;
    auto r1 = optimize(ctx, e, sig);
    auto r2 = optimize(ctx, r1.term, sig);
    c.expect(alpha_eq(r2.term, r1.term), tag + ": second pass changed the term");
    c.expect(r2.log.empty(), tag + ": second pass logged rewrites");
    for (auto& entry : r1.log) {
      ++rewrites;
      c.expect(replay_entry(entry, sig), tag + ": entry did not replay (" + entry.rule +
                                             " @ " + entry.path + ")");
      c.expect(!contains(entry.justification, "nknown"),
               tag + ": rewrite justified by an unknown verdict");
    }
  };
  for (auto& p : std::filesystem::directory_iterator(FH_CORPUS_DIR)) {
    if (p.path().extension() != ".fh") continue;
    auto f = parse_source(slurp(p.path()));
    audit(f.ctx, f.term, Signature::core().with(f.sig_ext), p.path().stem().string());
  }
  auto sig = Signature::core();
  Rng rng(777);
  int made = 0;
  while (made < 100) {
    auto g = gen_well_typed(rng, sig, 8);
    if (!g) continue;
    ++made;
    audit({}, g->term, sig, "generated #" + std::to_string(made));
  }
  c.expect(rewrites > 50, "too few rewrites exercised to be meaningful");
  c.note(std::to_string(programs) + " programs: optimize is idempotent; " +
         std::to_string(rewrites) + " log entries replayed; no unknown justifications");
  return c;
}

}  // namespace

int main() {
  struct Row {
    int n;
    Crit (*fn)();
  };
  const Row rows[] = {
      {1, crit1}, {2, crit2}, {3, crit3}, {4, crit4}, {5, crit5},
      {6, crit6}, {7, crit7}, {8, crit8}, {9, crit9}, {10, crit10},
  };
  int failed = 0;
  for (auto& row : rows) {
    Crit c;
    try {
      c = row.fn();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.detail = std::string("exception: ") + ex.what();
    }
    if (!c.ok) ++failed;
    std::printf("criterion %d: %s - %s\n", row.n, c.ok ? "PASS" : "FAIL", c.detail.c_str());
    std::fflush(stdout);
  }
  if (failed) std::printf("%d of 10 criteria failing\n", failed);
  return failed ? 1 : 0;
}
