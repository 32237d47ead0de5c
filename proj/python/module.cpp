// String-in, string-out bindings over the core library. Terms and types
// travel in surface syntax so the python side needs no mirror AST.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fh/harness.hpp"
#include "fh/optimizer.hpp"
#include "fh/parser.hpp"
#include "fh/printer.hpp"
#include "fh/semantics.hpp"
#include "fh/subtyping.hpp"
#include "fh/typesystem.hpp"

namespace py = pybind11;

namespace {

struct Prog {
  fh::SourceFile src;
  fh::Signature sig;
};

Prog load(const std::string& text) {
  Prog p;
  p.src = fh::parse_source(text);
  p.sig = fh::Signature::core().with(p.src.sig_ext);
  return p;
}

py::dict check(const std::string& text) {
  Prog p = load(text);
  fh::TcResult r = fh::typecheck(p.src.ctx, p.src.term, p.sig);
  py::dict d;
  d["ok"] = r.ok();
  if (r.ok()) d["type"] = fh::print_type(*r.type);
  else {
    d["error"] = fh::tc_err_name(r.err);
    d["message"] = r.message;
  }
  return d;
}

std::string eval_str(const std::string& text, std::size_t fuel) {
  Prog p = load(text);
  fh::Outcome o = fh::evaluate(p.src.term, p.sig, fuel);
  // Same convention as the command line: a value prints bare, every other
  // outcome is tagged.
  if (o.kind == fh::Outcome::Kind::Value) return fh::print_term(o.result);
  return fh::outcome_string(o);
}

std::vector<std::string> trace_strs(const std::string& text, std::size_t fuel) {
  Prog p = load(text);
  fh::EvalTrace tr = fh::trace(p.src.term, p.sig, fuel);
  std::vector<std::string> out;
  for (const auto& s : tr.states) out.push_back(fh::print_term(s));
  return out;
}

py::dict optimize_str(const std::string& text) {
  Prog p = load(text);
  fh::OptimizeResult res = fh::optimize(p.src.ctx, p.src.term, p.sig);
  fh::SourceFile out = p.src;
  out.term = res.term;
  py::dict d;
  d["program"] = fh::print_source(out);
  d["rounds"] = res.rounds;
  py::list log;
  for (const auto& en : res.log) {
    py::dict e;
    e["path"] = en.path;
    e["rule"] = en.rule;
    e["before"] = en.before;
    e["after"] = en.after;
    e["justification"] = en.justification;
    log.append(e);
  }
  d["log"] = log;
  return d;
}

std::string subtype_str(const std::string& t1, const std::string& t2) {
  fh::Signature sig = fh::Signature::core();
  fh::SubtypeVerdict v =
      fh::subtype({}, fh::parse_type(t1, sig), fh::parse_type(t2, sig), sig);
  return fh::tri_name(v.verdict);
}

py::dict ciu(const std::string& p1, const std::string& p2, int trials,
             std::uint64_t seed) {
  Prog a = load(p1), b = load(p2);
  fh::TcResult r = fh::typecheck(a.src.ctx, a.src.term, a.sig);
  if (!r.ok()) throw std::runtime_error("left program does not typecheck");
  fh::CiuConfig cfg;
  cfg.trials = trials;
  cfg.seed = seed;
  fh::EquivReport rep =
      fh::ciu_test(a.src.ctx, *r.type, a.src.term, b.src.term, a.sig, cfg);
  py::dict d;
  d["trials"] = rep.trials;
  d["agreements"] = rep.agreements;
  d["inconclusive"] = rep.inconclusive;
  d["witnesses"] = static_cast<int>(rep.witnesses.size());
  return d;
}

std::string selfify_str(const std::string& type, const std::string& term) {
  fh::Signature sig = fh::Signature::core();
  return fh::print_type(
      fh::selfify(fh::parse_type(type, sig), fh::parse_term(term, sig)));
}

std::string roundtrip(const std::string& term) {
  return fh::print_term(fh::parse_term(term));
}

}  // namespace

PYBIND11_MODULE(_fhcalc, m) {
  m.doc() = "manifest contract calculus: parse, evaluate, typecheck, optimize";
  m.def("roundtrip", &roundtrip, py::arg("term"),
        "parse a term and print it back");
  m.def("check", &check, py::arg("program"));
  m.def("evaluate", &eval_str, py::arg("program"),
        py::arg("fuel") = fh::kDefaultFuel);
  m.def("trace", &trace_strs, py::arg("program"),
        py::arg("fuel") = fh::kDefaultFuel);
  m.def("optimize", &optimize_str, py::arg("program"));
  m.def("subtype", &subtype_str, py::arg("sub"), py::arg("super"));
  m.def("ciu_test", &ciu, py::arg("left"), py::arg("right"),
        py::arg("trials") = 200, py::arg("seed") = 1);
  m.def("selfify", &selfify_str, py::arg("type"), py::arg("term"));
}
