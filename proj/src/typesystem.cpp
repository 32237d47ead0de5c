#include "fh/typesystem.hpp"

#include <random>
#include <utility>

#include "fh/printer.hpp"
#include "fh/semantics.hpp"

namespace fh {

const char* tri_name(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    case Tri::Unknown: return "unknown";
  }
  return "?";
}

const char* tc_err_name(TcErr e) {
  switch (e) {
    case TcErr::None: return "none";
    case TcErr::UnboundVar: return "unbound-var";
    case TcErr::UnboundTypeVar: return "unbound-type-var";
    case TcErr::NotAFunction: return "not-a-function";
    case TcErr::NotAForall: return "not-a-forall";
    case TcErr::ArgMismatch: return "arg-mismatch";
    case TcErr::IncompatibleCast: return "incompatible-cast";
    case TcErr::IllFormedType: return "ill-formed-type";
    case TcErr::PredicateNotBool: return "predicate-not-bool";
    case TcErr::ConversionUnknown: return "conversion-unknown";
    case TcErr::BlameNoUniqueType: return "blame-no-unique-type";
    case TcErr::UnknownOp: return "unknown-op";
    case TcErr::OpArity: return "op-arity";
    case TcErr::CheckForm: return "check-form";
  }
  return "?";
}

TypePtr erase_refinements(const TypePtr& t) {
  return std::visit(
      overloaded{
          [&](const TBase&) { return t; },
          [&](const TVar&) { return t; },
          [&](const TFun& n) {
            TypePtr d = erase_refinements(n.dom), c = erase_refinements(n.cod);
            return d == n.dom && c == n.cod ? t : tfun(n.var, d, c);
          },
          [&](const TForall& n) {
            TypePtr b = erase_refinements(n.body);
            return b == n.body ? t : tforall(n.var, b);
          },
          [&](const TRefine& n) { return erase_refinements(n.base); },
      },
      t->v);
}

bool compatible(const TypePtr& a, const TypePtr& b) {
  return alpha_eq(erase_refinements(a), erase_refinements(b));
}

Tri conv_equiv(const TypePtr& a, const TypePtr& b, const Signature& sig,
               std::size_t budget) {
  if (alpha_eq(a, b)) return Tri::Yes;
  auto [na, la] = normalize_embedded(a, sig, budget / 2);
  auto [nb, lb] = normalize_embedded(b, sig, budget - budget / 2);
  if (alpha_eq(na, nb)) return Tri::Yes;
  return (la || lb) ? Tri::Unknown : Tri::No;
}

namespace {

std::set<std::string> ctx_names(const Context& ctx) {
  std::set<std::string> s;
  for (const auto& e : ctx) s.insert(e.name);
  return s;
}

struct Checker {
  const Signature& sig;
  TcOptions opt;

  TcResult fail(TcErr err, std::string msg) const {
    return {std::nullopt, err, std::move(msg)};
  }

  // One comparison point: does a term of type `actual` fit where `expected`
  // is required? Conversion always applies; with runtime_rules also dropping
  // refinement layers of `actual`, and target refinements that evaluate to
  // true on a closed value.
  Tri matches(const TypePtr& expected, const TypePtr& actual,
              const TermPtr& term) const {
    Tri c = conv_equiv(actual, expected, sig, opt.conv_budget);
    if (c == Tri::Yes) return c;
    if (opt.runtime_rules) {
      if (const auto* r = std::get_if<TRefine>(&actual->v)) {
        Tri f = matches(expected, r->base, term);
        if (f == Tri::Yes) return f;
        if (f == Tri::Unknown) c = Tri::Unknown;
      }
      if (const auto* r = std::get_if<TRefine>(&expected->v)) {
        if (is_value(term) && is_closed(term)) {
          Tri f = matches(r->base, actual, term);
          if (f == Tri::Yes) {
            Outcome o = evaluate(subst_term(r->pred, r->var, term), sig,
                                 opt.check_budget);
            if (o.kind == Outcome::Kind::Value && is_true(o.result))
              return Tri::Yes;
            if (o.kind == Outcome::Kind::FuelExhausted) c = Tri::Unknown;
          } else if (f == Tri::Unknown) {
            c = Tri::Unknown;
          }
        }
      }
    }
    return c;
  }

  TcResult mismatch(const TypePtr& expected, const TypePtr& actual, Tri verdict,
                    const std::string& where) const {
    TcErr err = verdict == Tri::Unknown ? TcErr::ConversionUnknown
                                        : TcErr::ArgMismatch;
    return fail(err, where + ": expected " + print_type(expected) + ", got " +
                         print_type(actual) +
                         (verdict == Tri::Unknown
                              ? " (conversion ran out of budget)"
                              : ""));
  }

  std::optional<TcResult> wf(const Context& ctx, const TypePtr& t) const {
    return std::visit(
        overloaded{
            [&](const TBase& n) -> std::optional<TcResult> {
              if (n.name == "Bool" || n.name == "Int") return std::nullopt;
              return fail(TcErr::IllFormedType, "unknown base type " + n.name);
            },
            [&](const TVar& n) -> std::optional<TcResult> {
              const CtxEntry* e = ctx_lookup(ctx, n.name);
              if (e && !e->type) return std::nullopt;
              return fail(TcErr::UnboundTypeVar,
                          "unbound type variable " + n.name);
            },
            [&](const TFun& n) -> std::optional<TcResult> {
              if (auto bad = wf(ctx, n.dom)) return bad;
              auto [c2, cod] = extend_term(ctx, n.var, n.dom, n.cod);
              return wf(c2, cod);
            },
            [&](const TForall& n) -> std::optional<TcResult> {
              auto [c2, body] = extend_type(ctx, n.var, n.body);
              return wf(c2, body);
            },
            [&](const TRefine& n) -> std::optional<TcResult> {
              if (auto bad = wf(ctx, n.base)) return bad;
              auto [c2, pred] = extend_term_pred(ctx, n.var, n.base, n.pred);
              TcResult rp = synth(c2, pred);
              if (!rp.ok()) return rp;
              Tri c = conv_equiv(*rp.type, tbase("Bool"), sig, opt.conv_budget);
              if (c == Tri::Yes) return std::nullopt;
              if (c == Tri::Unknown)
                return fail(TcErr::ConversionUnknown,
                            "refinement predicate type not confirmed as Bool "
                            "within budget");
              return fail(TcErr::PredicateNotBool,
                          "refinement predicate has type " +
                              print_type(*rp.type) + ", wanted Bool");
            },
        },
        t->v);
  }

  // Context extension with renaming when the binder shadows an entry.
  std::pair<Context, TypePtr> extend_term(const Context& ctx,
                                          const std::string& x,
                                          const TypePtr& ann,
                                          const TypePtr& under) const {
    std::string x2 = x;
    TypePtr u = under;
    if (ctx_lookup(ctx, x)) {
      auto avoid = ctx_names(ctx);
      auto fv = free_term_vars(under);
      avoid.insert(fv.begin(), fv.end());
      x2 = fresh_name(x, avoid);
      u = subst_term(under, x, fh::var(x2));
    }
    return {ctx_extend(ctx, x2, ann), u};
  }
  std::pair<Context, TermPtr> extend_term_pred(const Context& ctx,
                                               const std::string& x,
                                               const TypePtr& ann,
                                               const TermPtr& under) const {
    std::string x2 = x;
    TermPtr u = under;
    if (ctx_lookup(ctx, x)) {
      auto avoid = ctx_names(ctx);
      auto fv = free_term_vars(under);
      avoid.insert(fv.begin(), fv.end());
      x2 = fresh_name(x, avoid);
      u = subst_term(under, x, fh::var(x2));
    }
    return {ctx_extend(ctx, x2, ann), u};
  }
  std::pair<Context, TypePtr> extend_type(const Context& ctx,
                                          const std::string& a,
                                          const TypePtr& under) const {
    std::string a2 = a;
    TypePtr u = under;
    if (ctx_lookup(ctx, a)) {
      auto avoid = ctx_names(ctx);
      auto fv = free_type_vars(under);
      avoid.insert(fv.begin(), fv.end());
      a2 = fresh_name(a, avoid);
      u = subst_type(under, a, tvar(a2));
    }
    return {ctx_extend(ctx, a2, nullptr), u};
  }
  TcResult synth(const Context& ctx, const TermPtr& e) const {
    return std::visit(
        overloaded{
            [&](const Const& n) -> TcResult {
              return {const_type(n.k), TcErr::None, ""};
            },
            [&](const Var& n) -> TcResult {
              const CtxEntry* entry = ctx_lookup(ctx, n.name);
              if (!entry)
                return fail(TcErr::UnboundVar, "unbound variable " + n.name);
              if (!entry->type)
                return fail(TcErr::UnboundVar,
                            n.name + " is a type variable, not a term");
              return {entry->type, TcErr::None, ""};
            },
            [&](const Lam& n) -> TcResult {
              if (auto bad = wf(ctx, n.ann)) return *bad;
              std::string x = n.var;
              TermPtr body = n.body;
              if (ctx_lookup(ctx, x)) {
                auto avoid = ctx_names(ctx);
                auto fv = free_term_vars(body);
                avoid.insert(fv.begin(), fv.end());
                x = fresh_name(n.var, avoid);
                body = subst_term(body, n.var, fh::var(x));
              }
              TcResult rb = synth(ctx_extend(ctx, x, n.ann), body);
              if (!rb.ok()) return rb;
              return {tfun(x, n.ann, *rb.type), TcErr::None, ""};
            },
            [&](const TyLam& n) -> TcResult {
              std::string a = n.var;
              TermPtr body = n.body;
              if (ctx_lookup(ctx, a)) {
                auto avoid = ctx_names(ctx);
                auto fv = free_type_vars(body);
                avoid.insert(fv.begin(), fv.end());
                a = fresh_name(n.var, avoid);
                body = subst_type(body, n.var, tvar(a));
              }
              TcResult rb = synth(ctx_extend(ctx, a, nullptr), body);
              if (!rb.ok()) return rb;
              return {tforall(a, *rb.type), TcErr::None, ""};
            },
            [&](const App& n) -> TcResult {
              TcResult rf = synth(ctx, n.fn);
              if (!rf.ok()) return rf;
              const auto* f = std::get_if<TFun>(&(*rf.type)->v);
              if (!f) {
                std::string extra =
                    std::holds_alternative<TRefine>((*rf.type)->v)
                        ? " (the function type is refined; cast it first)"
                        : "";
                return fail(TcErr::NotAFunction,
                            "application head has type " +
                                print_type(*rf.type) + extra);
              }
              TcResult ra = synth(ctx, n.arg);
              if (!ra.ok()) return ra;
              Tri m = matches(f->dom, *ra.type, n.arg);
              if (m != Tri::Yes)
                return mismatch(f->dom, *ra.type, m, "argument");
              return {subst_term(f->cod, f->var, n.arg), TcErr::None, ""};
            },
            [&](const TyApp& n) -> TcResult {
              TcResult rf = synth(ctx, n.fn);
              if (!rf.ok()) return rf;
              const auto* q = std::get_if<TForall>(&(*rf.type)->v);
              if (!q)
                return fail(TcErr::NotAForall, "type application head has type " +
                                                   print_type(*rf.type));
              if (auto bad = wf(ctx, n.arg)) return *bad;
              return {subst_type(q->body, q->var, n.arg), TcErr::None, ""};
            },
            [&](const Cast& n) -> TcResult {
              if (auto bad = wf(ctx, n.src)) return *bad;
              if (auto bad = wf(ctx, n.tgt)) return *bad;
              if (!compatible(n.src, n.tgt))
                return fail(TcErr::IncompatibleCast,
                            "cast between incompatible skeletons: " +
                                print_type(n.src) + " vs " + print_type(n.tgt));
              return {tfun("_", n.src, n.tgt), TcErr::None, ""};
            },
            [&](const OpApp& n) -> TcResult {
              const OpSig* s = sig.find(n.op);
              if (!s) return fail(TcErr::UnknownOp, "unknown operation " + n.op);
              if (s->params.size() != n.args.size())
                return fail(TcErr::OpArity,
                            n.op + " expects " +
                                std::to_string(s->params.size()) +
                                " arguments, got " +
                                std::to_string(n.args.size()));
              for (std::size_t i = 0; i < n.args.size(); ++i) {
                TcResult ra = synth(ctx, n.args[i]);
                if (!ra.ok()) return ra;
                TypePtr expect = s->params[i].second;
                for (std::size_t j = 0; j < i; ++j)
                  expect = subst_term(expect, s->params[j].first, n.args[j]);
                Tri m = matches(expect, *ra.type, n.args[i]);
                if (m != Tri::Yes)
                  return mismatch(expect, *ra.type, m,
                                  n.op + " argument " + std::to_string(i + 1));
              }
              TypePtr res = s->result;
              for (std::size_t j = 0; j < s->params.size(); ++j)
                res = subst_term(res, s->params[j].first, n.args[j]);
              return {res, TcErr::None, ""};
            },
            [&](const Wait& n) -> TcResult {
              const auto* r = std::get_if<TRefine>(&n.ref->v);
              if (!r)
                return fail(TcErr::CheckForm,
                            "waiting check needs a refinement type");
              if (auto bad = wf(ctx, n.ref)) return *bad;
              TcResult rs = synth(ctx, n.subject);
              if (!rs.ok()) return rs;
              Tri m = matches(r->base, *rs.type, n.subject);
              if (m != Tri::Yes)
                return mismatch(r->base, *rs.type, m, "checked subject");
              return {n.ref, TcErr::None, ""};
            },
            [&](const Active& n) -> TcResult {
              const auto* r = std::get_if<TRefine>(&n.ref->v);
              if (!r)
                return fail(TcErr::CheckForm,
                            "active check needs a refinement type");
              Context empty;
              if (auto bad = wf(empty, n.ref)) return *bad;
              if (!is_value(n.value) || !is_closed(n.value))
                return fail(TcErr::CheckForm,
                            "active check carries a non-closed-value subject");
              if (!is_closed(n.state))
                return fail(TcErr::CheckForm, "active check state is open");
              TcResult rv = synth(empty, n.value);
              if (!rv.ok()) return rv;
              Tri mv = matches(r->base, *rv.type, n.value);
              if (mv != Tri::Yes)
                return mismatch(r->base, *rv.type, mv, "checked value");
              TcResult rs = synth(empty, n.state);
              if (!rs.ok()) return rs;
              Tri ms = conv_equiv(*rs.type, tbase("Bool"), sig, opt.conv_budget);
              if (ms != Tri::Yes)
                return mismatch(tbase("Bool"), *rs.type, ms, "check state");
              // The state must be an actual intermediate state of the
              // instantiated predicate (searched under a step budget).
              EvalTrace tr = trace(subst_term(r->pred, r->var, n.value), sig,
                                   opt.check_budget);
              for (const auto& st : tr.states)
                if (alpha_eq(st, n.state)) return {n.ref, TcErr::None, ""};
              if (tr.outcome.kind == Outcome::Kind::FuelExhausted)
                return fail(TcErr::ConversionUnknown,
                            "could not confirm the check state within budget");
              return fail(TcErr::CheckForm,
                          "check state is not a reduct of the predicate");
            },
            [&](const Blame&) -> TcResult {
              return fail(TcErr::BlameNoUniqueType,
                          "blame synthesizes no unique type; it checks "
                          "against any well-formed type");
            },
        },
        e->v);
  }
};

}  // namespace

TcResult typecheck(const Context& ctx, const TermPtr& e, const Signature& sig,
                   const TcOptions& opt) {
  std::string err;
  if (!wf_context(ctx, sig, &err))
    return {std::nullopt, TcErr::IllFormedType, err};
  Checker c{sig, opt};
  return c.synth(ctx, e);
}

bool wf_type(const Context& ctx, const TypePtr& t, const Signature& sig,
             std::string* err, const TcOptions& opt) {
  Checker c{sig, opt};
  if (auto bad = c.wf(ctx, t)) {
    if (err) *err = bad->message;
    return false;
  }
  return true;
}

bool wf_context(const Context& ctx, const Signature& sig, std::string* err) {
  Context prefix;
  for (const auto& e : ctx) {
    if (ctx_lookup(prefix, e.name)) {
      if (err) *err = "duplicate context entry " + e.name;
      return false;
    }
    if (e.type && !wf_type(prefix, e.type, sig, err)) return false;
    prefix.push_back(e);
  }
  return true;
}

namespace {

bool holds_on(const Signature& sig, const TypePtr& refined, const TermPtr& v,
              std::string* why) {
  for (const auto& layer : refines(refined)) {
    Outcome o = evaluate(app(layer, v), sig, 4096);
    if (o.kind != Outcome::Kind::Value || !is_true(o.result)) {
      if (why) *why = print_term(app(layer, v));
      return false;
    }
  }
  return true;
}

}  // namespace

SignatureReport validate_signature(const Signature& sig, std::uint64_t seed,
                                   int samples_per_op) {
  SignatureReport rep;
  auto problem = [&](const std::string& s) {
    rep.ok = false;
    rep.problems.push_back(s);
  };
  std::mt19937_64 rng(seed);

  for (const auto& [name, op] : sig.ops) {
    std::string err;
    Context ctx;
    bool shape_ok = true;
    for (const auto& [px, pt] : op.params) {
      if (!wf_type(ctx, pt, sig, &err)) {
        problem(name + ": parameter " + px + ": " + err);
        shape_ok = false;
        break;
      }
      if (!std::holds_alternative<TBase>(unref(pt)->v)) {
        problem(name + ": parameter " + px + " is not base-skeleton");
        shape_ok = false;
        break;
      }
      ctx = ctx_extend(ctx, px, pt);
    }
    if (shape_ok && !wf_type(ctx, op.result, sig, &err)) {
      problem(name + ": result: " + err);
      shape_ok = false;
    }
    if (shape_ok && !std::holds_alternative<TBase>(unref(op.result)->v)) {
      problem(name + ": result is not base-skeleton");
      shape_ok = false;
    }
    if (!has_selector(op.selector)) {
      problem(name + ": unknown selector " + op.selector);
      shape_ok = false;
    }
    if (!shape_ok) continue;

    const std::vector<std::int64_t> ints = {-13, -7, -3, -2, -1, 0,
                                            1,   2,  3,  5,  7,  13};
    std::size_t permitted = 0;
    int rounds = op.params.empty() ? 1 : samples_per_op;
    for (int s = 0; s < rounds; ++s) {
      std::vector<TermPtr> args;
      std::vector<ConstVal> ks;
      for (const auto& [px, pt] : op.params) {
        TypePtr skel = unref(pt);
        const auto* b = std::get_if<TBase>(&skel->v);
        if (b->name == "Bool") {
          bool v = rng() % 2 == 0;
          args.push_back(cbool(v));
          ks.push_back(v);
        } else {
          std::int64_t v = s < samples_per_op / 2
                               ? ints[rng() % ints.size()]
                               : static_cast<std::int64_t>(rng() % 101) - 50;
          args.push_back(cint(v));
          ks.push_back(v);
        }
      }
      bool gate_ok = true;
      for (std::size_t i = 0; i < args.size() && gate_ok; ++i) {
        TypePtr pt = op.params[i].second;
        for (std::size_t j = 0; j < i; ++j)
          pt = subst_term(pt, op.params[j].first, args[j]);
        gate_ok = holds_on(sig, pt, args[i], nullptr);
      }
      auto raw = apply_selector(op.selector, ks);
      if (gate_ok) {
        ++permitted;
        if (!raw) {
          problem(name + ": selector undefined on permitted arguments " +
                  print_term(opapp(name, args)));
          break;
        }
        TypePtr rt = op.result;
        for (std::size_t j = 0; j < op.params.size(); ++j)
          rt = subst_term(rt, op.params[j].first, args[j]);
        TermPtr rv = std::visit(
            overloaded{[](bool b) { return cbool(b); },
                       [](std::int64_t v) { return cint(v); }},
            *raw);
        std::string why;
        if (!alpha_eq(unref(rt), const_type(*raw))) {
          problem(name + ": result constant has the wrong base type");
          break;
        }
        if (!holds_on(sig, rt, rv, &why)) {
          problem(name + ": result refinement fails: " + why);
          break;
        }
      }
    }
    if (!op.params.empty() && permitted == 0)
      problem(name + ": no sampled argument tuple passes the refinements");
  }
  return rep;
}

}  // namespace fh
