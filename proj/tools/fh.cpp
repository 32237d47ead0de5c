// Command-line front end: check, eval, optimize, difftest, quickcheck.
// Exit codes: 0 success/equal, 1 definite failure or witness, 2 inconclusive,
// 3 usage or parse error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fh/harness.hpp"
#include "fh/optimizer.hpp"
#include "fh/parser.hpp"
#include "fh/printer.hpp"
#include "fh/semantics.hpp"
#include "fh/subtyping.hpp"
#include "fh/typesystem.hpp"

namespace {

constexpr int kOk = 0, kFail = 1, kInconclusive = 2, kUsage = 3;

struct Loaded {
  fh::SourceFile src;
  fh::Signature sig;
};

std::optional<Loaded> load(const std::string& path, std::string& err) {
  std::ifstream in(path);
  if (!in) {
    err = "cannot open " + path;
    return std::nullopt;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    Loaded l;
    l.src = fh::parse_source(buf.str());
    l.sig = fh::Signature::core().with(l.src.sig_ext);
    return l;
  } catch (const fh::ParseError& e) {
    err = path + ": " + e.what();
    return std::nullopt;
  }
}

std::set<std::string> split_list(const std::string& s) {
  std::set<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.insert(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.insert(cur);
  return out;
}

int outcome_exit(const fh::Outcome& o) {
  switch (o.kind) {
    case fh::Outcome::Kind::Value:
    case fh::Outcome::Kind::Blame: return kOk;
    case fh::Outcome::Kind::Stuck: return kFail;
    default: return kInconclusive;
  }
}

void print_report(const fh::EquivReport& rep, std::uint64_t seed) {
  std::cout << "trials: " << rep.trials << "  agreements: " << rep.agreements
            << "  inconclusive: " << rep.inconclusive
            << "  witnesses: " << rep.witnesses.size() << "\n";
  for (const auto& w : rep.witnesses) {
    nlohmann::json j;
    j["seed"] = seed;
    j["trial"] = w.trial;
    j["context"] = w.context;
    j["substitution"] = w.substitution;
    j["left"] = w.left;
    j["right"] = w.right;
    std::cout << j.dump() << "\n";
  }
}

int report_exit(const fh::EquivReport& rep) {
  if (!rep.witnesses.empty()) return kFail;
  if (rep.trials > 0 && rep.agreements == 0 && rep.inconclusive == rep.trials)
    return kInconclusive;
  return kOk;
}

int cmd_check(const std::string& file) {
  std::string err;
  auto l = load(file, err);
  if (!l) {
    std::cerr << err << "\n";
    return kUsage;
  }
  auto sigrep = fh::validate_signature(l->sig);
  if (!sigrep.ok) {
    for (const auto& p : sigrep.problems) std::cerr << "signature: " << p << "\n";
    return kFail;
  }
  std::string werr;
  if (!fh::wf_context(l->src.ctx, l->sig, &werr)) {
    std::cerr << "context ill-formed: " << werr << "\n";
    return kFail;
  }
  fh::TcResult r = fh::typecheck(l->src.ctx, l->src.term, l->sig);
  if (r.ok()) {
    std::cout << fh::print_type(*r.type) << "\n";
    return kOk;
  }
  std::cerr << "error: " << fh::tc_err_name(r.err);
  if (!r.message.empty()) std::cerr << ": " << r.message;
  std::cerr << "\n";
  return r.err == fh::TcErr::ConversionUnknown ? kInconclusive : kFail;
}

int cmd_eval(const std::string& file, std::size_t fuel, bool show_trace) {
  std::string err;
  auto l = load(file, err);
  if (!l) {
    std::cerr << err << "\n";
    return kUsage;
  }
  if (!fh::is_closed(l->src.term)) {
    std::cerr << "term is not closed; evaluation needs a closed program\n";
    return kFail;
  }
  if (show_trace) {
    fh::EvalTrace tr = fh::trace(l->src.term, l->sig, fuel);
    for (const auto& s : tr.states) std::cout << fh::print_term(s) << "\n";
    if (tr.outcome.kind == fh::Outcome::Kind::Stuck)
      std::cout << "stuck\n";
    else if (tr.outcome.kind == fh::Outcome::Kind::FuelExhausted)
      std::cout << "fuel-exhausted\n";
    return outcome_exit(tr.outcome);
  }
  fh::Outcome o = fh::evaluate(l->src.term, l->sig, fuel);
  if (o.kind == fh::Outcome::Kind::Value)
    std::cout << fh::print_term(o.result) << "\n";
  else
    std::cout << fh::outcome_string(o) << "\n";
  return outcome_exit(o);
}

int cmd_optimize(const std::string& file, const std::string& passes,
                 bool no_forget, bool precheck, int rounds,
                 const std::string& prover, const std::string& report) {
  std::string err;
  auto l = load(file, err);
  if (!l) {
    std::cerr << err << "\n";
    return kUsage;
  }
  fh::OptConfig cfg;
  if (!passes.empty()) cfg.passes = split_list(passes);
  if (no_forget) cfg.passes.erase("forget");
  cfg.decompose_precheck = precheck;
  if (rounds > 0) cfg.max_rounds = rounds;
  for (const auto& tok : split_list(prover)) {
    if (tok == "no-bounds") cfg.prover.int_bounds = false;
    else if (tok == "bounds") cfg.prover.int_bounds = true;
    else if (tok.rfind("trials=", 0) == 0)
      cfg.prover.sample_trials = std::stoi(tok.substr(7));
    else if (tok.rfind("seed=", 0) == 0)
      cfg.prover.seed = std::stoull(tok.substr(5));
    else {
      std::cerr << "unknown prover option: " << tok << "\n";
      return kUsage;
    }
  }
  fh::OptimizeResult res = fh::optimize(l->src.ctx, l->src.term, l->sig, cfg);
  fh::SourceFile out = l->src;
  out.term = res.term;
  std::cout << fh::print_source(out);
  if (!report.empty()) {
    std::ofstream rf(report);
    if (!rf) {
      std::cerr << "cannot write " << report << "\n";
      return kFail;
    }
    rf << res.log.size() << " rewrites in " << res.rounds << " rounds\n";
    for (const auto& en : res.log) {
      rf << en.rule << " @ " << en.path << "\n";
      rf << "  context: " << en.context << "\n";
      rf << "  before: " << en.before << "\n";
      rf << "  after: " << en.after << "\n";
      if (!en.aux.empty()) rf << "  aux: " << en.aux << "\n";
      rf << "  justification: " << en.justification << "\n";
    }
  }
  return kOk;
}

int cmd_difftest(const std::string& f1, const std::string& f2, int trials,
                 std::uint64_t seed, std::size_t fuel, const std::string& ctx_s,
                 const std::string& type_s) {
  std::string err;
  auto l1 = load(f1, err);
  if (!l1) {
    std::cerr << err << "\n";
    return kUsage;
  }
  auto l2 = load(f2, err);
  if (!l2) {
    std::cerr << err << "\n";
    return kUsage;
  }
  fh::Context ctx = l1->src.ctx;
  fh::TypePtr type;
  try {
    if (!ctx_s.empty()) ctx = fh::parse_context(ctx_s, l1->sig);
    if (!type_s.empty()) type = fh::parse_type(type_s, l1->sig);
  } catch (const fh::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  if (!type) {
    fh::TcResult r = fh::typecheck(ctx, l1->src.term, l1->sig);
    if (!r.ok()) {
      std::cerr << "left program does not typecheck ("
                << fh::tc_err_name(r.err) << "); pass --type explicitly\n";
      return kFail;
    }
    type = *r.type;
  }
  fh::CiuConfig cfg;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.fuel = fuel;
  fh::EquivReport rep =
      fh::ciu_test(ctx, type, l1->src.term, l2->src.term, l1->sig, cfg);
  print_report(rep, seed);
  return report_exit(rep);
}

// quickcheck suites ---------------------------------------------------------

int suite_soundness(int trials, std::uint64_t seed) {
  fh::Signature sig = fh::Signature::core();
  fh::Rng rng(seed);
  int stuck = 0, fuel_out = 0, values = 0, blames = 0, inv_fail = 0,
      tc_fail = 0, made = 0;
  for (int i = 0; i < trials; ++i) {
    auto g = fh::gen_well_typed(rng, sig, 8);
    if (!g) continue;
    ++made;
    fh::TcResult tc = fh::typecheck({}, g->term, sig);
    if (!tc.ok()) {
      ++tc_fail;
      if (tc_fail <= 5)
        std::cout << "typecheck failure (" << fh::tc_err_name(tc.err) << " "
                  << tc.message << "): " << fh::print_term(g->term) << " : "
                  << fh::print_type(g->type) << "\n";
    }
    fh::Outcome o = fh::evaluate(g->term, sig, 10000);
    switch (o.kind) {
      case fh::Outcome::Kind::Value: {
        ++values;
        for (const auto& lay : fh::refines(g->type)) {
          fh::Outcome c = fh::evaluate(fh::app(lay, o.result), sig, 10000);
          if (c.kind != fh::Outcome::Kind::Value || !fh::is_true(c.result)) {
            ++inv_fail;
            std::cout << "inversion failure: " << fh::print_term(g->term)
                      << " : " << fh::print_type(g->type) << "\n";
            break;
          }
        }
        break;
      }
      case fh::Outcome::Kind::Blame: ++blames; break;
      case fh::Outcome::Kind::Stuck:
        ++stuck;
        std::cout << "stuck: " << fh::print_term(g->term) << "\n";
        break;
      default: ++fuel_out; break;
    }
  }
  std::cout << "generated: " << made << "  values: " << values
            << "  blames: " << blames << "  stuck: " << stuck
            << "  fuel-exhausted: " << fuel_out
            << "  inversion-failures: " << inv_fail
            << "  typecheck-failures: " << tc_fail << "\n";
  bool pass = made == trials && stuck == 0 && inv_fail == 0 && tc_fail == 0 &&
              fuel_out * 50 <= trials;
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kOk : kFail;
}

int suite_coterm(int trials, std::uint64_t seed) {
  fh::EquivReport rep =
      fh::cotermination_test(fh::Signature::core(), trials, 10000, seed);
  print_report(rep, seed);
  bool pass = rep.trials == trials && rep.witnesses.empty();
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kOk : kFail;
}

int suite_decomp(int trials, std::uint64_t seed) {
  fh::Signature sig = fh::Signature::core();
  fh::Rng rng(seed);
  int made = 0, mismatches = 0, nondet = 0;
  while (made < trials) {
    auto g = fh::gen_well_typed(rng, sig, 1 + static_cast<int>(rng.pick(12)));
    if (!g) continue;
    ++made;
    fh::EvalTrace tr = fh::trace(g->term, sig, 200);
    for (const auto& s : tr.states) {
      auto d = fh::decompose(s, sig);
      auto ss = fh::all_splits(s, sig);
      bool ok;
      if (d) {
        ok = ss.size() == 1 && fh::alpha_eq(ss[0].inner, d->inner) &&
             ss[0].inner_is_blame == d->inner_is_blame &&
             fh::alpha_eq(ss[0].ctx.plug(ss[0].inner), s) &&
             fh::alpha_eq(d->ctx.plug(d->inner), s);
      } else {
        ok = ss.empty();
      }
      if (!ok) {
        ++mismatches;
        std::cout << "decomposition mismatch: " << fh::print_term(s) << "\n";
        break;
      }
    }
    fh::Outcome a = fh::evaluate(g->term, sig, 10000);
    fh::Outcome b = fh::evaluate(g->term, sig, 10000);
    if (a.kind != b.kind || a.steps != b.steps ||
        fh::outcome_string(a) != fh::outcome_string(b)) {
      ++nondet;
      std::cout << "nondeterministic result: " << fh::print_term(g->term) << "\n";
    }
  }
  std::cout << "terms: " << made << "  mismatches: " << mismatches
            << "  nondeterminism: " << nondet << "\n";
  bool pass = mismatches == 0 && nondet == 0;
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kOk : kFail;
}

int suite_laws(int per_law, std::uint64_t seed) {
  fh::Signature sig = fh::Signature::core();
  fh::Rng rng(seed);
  int witnesses = 0, retc_fail = 0, run = 0;
  auto run_pair = [&](const fh::TypePtr& t1, const fh::TypePtr& t2,
                      const fh::TermPtr& rhs, const char* name) {
    fh::TermPtr c = fh::cast(t1, t2, "l");
    fh::CiuConfig cfg;
    cfg.trials = 40;
    cfg.seed = rng.next();
    fh::EquivReport rep =
        fh::ciu_test({}, fh::tfun("_", t1, t2), c, rhs, sig, cfg);
    ++run;
    if (!rep.witnesses.empty()) {
      witnesses += static_cast<int>(rep.witnesses.size());
      std::cout << name << " law witness: " << fh::print_type(t1) << " => "
                << fh::print_type(t2) << "\n";
    }
  };
  for (int i = 0; i < per_law; ++i) {
    // function casts against their wrapper
    fh::TypePtr skel = fh::tfun(
        "_", rng.coin() ? fh::tbase("Int") : fh::tbase("Bool"),
        rng.coin() ? fh::tbase("Int") : fh::tbase("Bool"));
    fh::TypePtr t1 = fh::unref(fh::redecorate(rng, skel));
    fh::TypePtr t2 = fh::unref(fh::redecorate(rng, skel));
    run_pair(t1, t2, fh::fun_cast_wrapper(t1, t2, "l"), "fun");

    // forall casts against their wrapper
    fh::TypePtr b = rng.coin() ? fh::tbase("Int") : fh::tvar("a");
    fh::TypePtr q1 = fh::tforall("a", fh::redecorate(rng, b));
    fh::TypePtr q2 = fh::tforall("a", fh::redecorate(rng, b));
    run_pair(q1, q2, fh::forall_cast_wrapper(q1, q2, "l"), "forall");

    // prechecking a refined target
    fh::TypePtr base = rng.coin() ? fh::tbase("Int") : fh::tbase("Bool");
    fh::TypePtr tgt = fh::redecorate(rng, base);
    if (!std::get_if<fh::TRefine>(&tgt->v))
      tgt = fh::trefine("x", base, fh::cbool(true));
    fh::TermPtr w = fh::precheck_cast_wrapper(base, tgt, "l");
    run_pair(base, tgt, w, "precheck");
    if (!fh::typecheck({}, w, sig).ok()) {
      ++retc_fail;
      std::cout << "precheck wrapper fails to typecheck: "
                << fh::print_type(tgt) << "\n";
    }

    // reflexive casts against the identity
    fh::TypePtr t = fh::gen_type(rng, 2);
    run_pair(t, t, fh::lam("x", t, fh::var("x")), "refl");
  }
  std::cout << "pairs: " << run << "  witnesses: " << witnesses
            << "  precheck-retypecheck-failures: " << retc_fail << "\n";
  bool pass = witnesses == 0 && retc_fail == 0;
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"manifest contract calculus tools"};
  cli.require_subcommand(1);

  std::string file, file2, passes, prover, report, ctx_s, type_s, suite;
  std::size_t fuel = fh::kDefaultFuel;
  bool show_trace = false, no_forget = false, precheck = false;
  int trials = -1, rounds = 0;
  std::uint64_t seed = 42;

  auto* c_check = cli.add_subcommand("check", "typecheck a source file");
  c_check->add_option("file", file)->required();

  auto* c_eval = cli.add_subcommand("eval", "evaluate a source file");
  c_eval->add_option("file", file)->required();
  c_eval->add_option("--fuel", fuel);
  c_eval->add_flag("--trace", show_trace, "print every state");

  auto* c_opt = cli.add_subcommand("optimize", "optimize casts in a source file");
  c_opt->add_option("file", file)->required();
  c_opt->add_option("--passes", passes, "comma-separated pass names");
  c_opt->add_flag("--no-forget", no_forget, "disable the source-forget pass");
  c_opt->add_flag("--precheck", precheck, "also decompose base-to-refined casts");
  c_opt->add_option("--rounds", rounds, "max optimizer rounds");
  c_opt->add_option("--prover", prover,
                    "prover options: bounds,no-bounds,trials=N,seed=N");
  c_opt->add_option("--report", report, "write the rewrite log here");

  auto* c_diff = cli.add_subcommand("difftest", "behavioral comparison");
  c_diff->add_option("file1", file)->required();
  c_diff->add_option("file2", file2)->required();
  c_diff->add_option("--trials", trials);
  c_diff->add_option("--seed", seed);
  c_diff->add_option("--fuel", fuel);
  c_diff->add_option("--ctx", ctx_s, "typing context, e.g. \"x:Int, a\"");
  c_diff->add_option("--type", type_s, "common type of both programs");

  auto* c_qc = cli.add_subcommand("quickcheck", "randomized property suites");
  c_qc->add_option("--suite", suite)
      ->required()
      ->check(CLI::IsMember({"soundness", "coterm", "decomp", "laws"}));
  c_qc->add_option("--trials", trials);
  c_qc->add_option("--seed", seed);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = cli.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (c_check->parsed()) return cmd_check(file);
  if (c_eval->parsed()) return cmd_eval(file, fuel, show_trace);
  if (c_opt->parsed())
    return cmd_optimize(file, passes, no_forget, precheck, rounds, prover,
                        report);
  if (c_diff->parsed())
    return cmd_difftest(file, file2, trials < 0 ? 200 : trials, seed, fuel,
                        ctx_s, type_s);
  if (c_qc->parsed()) {
    if (suite == "soundness") return suite_soundness(trials < 0 ? 500 : trials, seed);
    if (suite == "coterm") return suite_coterm(trials < 0 ? 300 : trials, seed);
    if (suite == "decomp") return suite_decomp(trials < 0 ? 300 : trials, seed);
    return suite_laws(trials < 0 ? 50 : trials, seed);
  }
  return kUsage;
}
