#include "fh/optimizer.hpp"

#include <tuple>
#include <utility>

#include "fh/parser.hpp"
#include "fh/printer.hpp"
#include "fh/semantics.hpp"

namespace fh {

TypePtr selfify(const TypePtr& t, const TermPtr& e) {
  return std::visit(
      overloaded{
          [&](const TBase& n) {
            std::string x = fresh_name("x", free_term_vars(e));
            const char* eq = n.name == "Bool" ? "eqBool" : "eqInt";
            return trefine(x, t, opapp(eq, {fh::var(x), e}));
          },
          [&](const TVar&) { return t; },
          [&](const TFun& n) {
            std::string x = n.var;
            TypePtr cod = n.cod;
            auto fv = free_term_vars(e);
            if (fv.count(x)) {
              auto avoid = fv;
              auto fc = free_term_vars(cod);
              avoid.insert(fc.begin(), fc.end());
              x = fresh_name(n.var, avoid);
              cod = subst_term(cod, n.var, fh::var(x));
            }
            return tfun(x, n.dom, selfify(cod, app(e, fh::var(x))));
          },
          [&](const TForall& n) {
            std::string a = n.var;
            TypePtr body = n.body;
            auto fv = free_type_vars(e);
            if (fv.count(a)) {
              auto avoid = fv;
              auto fb = free_type_vars(body);
              avoid.insert(fb.begin(), fb.end());
              a = fresh_name(n.var, avoid);
              body = subst_type(body, n.var, tvar(a));
            }
            return tforall(a, selfify(body, tyapp(e, tvar(a))));
          },
          [&](const TRefine& n) {
            TypePtr inner =
                selfify(n.base, app(cast(t, n.base, kSelfLabel), e));
            return trefine(
                n.var, inner,
                let_(n.var, n.base,
                     app(cast(inner, n.base, kSelfLabel), fh::var(n.var)),
                     n.pred));
          },
      },
      t->v);
}

namespace {

std::set<std::string> type_term_fvs(const TypePtr& a, const TypePtr& b) {
  auto s = free_term_vars(a);
  auto t = free_term_vars(b);
  s.insert(t.begin(), t.end());
  return s;
}

}  // namespace

TermPtr fun_cast_wrapper(const TypePtr& src, const TypePtr& tgt,
                         const std::string& label) {
  const auto& f1 = std::get<TFun>(src->v);
  const auto& f2 = std::get<TFun>(tgt->v);
  auto avoid = type_term_fvs(src, tgt);
  std::string z = fresh_name("z", avoid);
  avoid.insert(z);
  std::string x = fresh_name(f2.var, avoid);
  TypePtr cod2 = x == f2.var ? f2.cod : subst_term(f2.cod, f2.var, fh::var(x));
  avoid.insert(x);
  std::string y = fresh_name("y", avoid);
  TypePtr cod1 = subst_term(f1.cod, f1.var, fh::var(y));
  return lam(z, src,
             lam(x, f2.dom,
                 let_(y, f1.dom, app(cast(f2.dom, f1.dom, label), fh::var(x)),
                      app(cast(cod1, cod2, label),
                          app(fh::var(z), fh::var(y))))));
}

TermPtr forall_cast_wrapper(const TypePtr& src, const TypePtr& tgt,
                            const std::string& label) {
  const auto& q1 = std::get<TForall>(src->v);
  const auto& q2 = std::get<TForall>(tgt->v);
  auto avoid = type_term_fvs(src, tgt);
  std::string x = fresh_name("x", avoid);
  auto tvs = free_type_vars(src);
  auto tv2 = free_type_vars(tgt);
  tvs.insert(tv2.begin(), tv2.end());
  std::string a = fresh_name(q2.var, tvs);
  TypePtr b1 = a == q1.var ? q1.body : subst_type(q1.body, q1.var, tvar(a));
  TypePtr b2 = a == q2.var ? q2.body : subst_type(q2.body, q2.var, tvar(a));
  return lam(x, src,
             tylam(a, app(cast(b1, b2, label), tyapp(fh::var(x), tvar(a)))));
}

TermPtr precheck_cast_wrapper(const TypePtr& src, const TypePtr& tgt,
                              const std::string& label) {
  const auto& r = std::get<TRefine>(tgt->v);
  auto avoid = type_term_fvs(src, tgt);
  std::string y = fresh_name("y", avoid);
  return lam(y, src,
             wait(tgt, app(cast(src, r.base, label), fh::var(y)), label));
}

namespace {

enum class Pass { Reflexive, Upcast, SelfAssist, Decompose, Forget, Beta };

const char* pass_key(Pass p) {
  switch (p) {
    case Pass::Reflexive: return "reflexive";
    case Pass::Upcast: return "upcast";
    case Pass::SelfAssist: return "selfassist";
    case Pass::Decompose: return "decompose";
    case Pass::Forget: return "forget";
    case Pass::Beta: return "beta";
  }
  return "";
}

Context ctx_shadow(const Context& ctx, const std::string& name, TypePtr type) {
  Context out;
  for (const auto& e : ctx)
    if (e.name != name) out.push_back(e);
  out.push_back({name, std::move(type)});
  return out;
}

TermPtr identity_for(const TypePtr& t) { return lam("x", t, fh::var("x")); }

struct LetBinding {
  std::string var;
  TypePtr ann;
  TermPtr rhs;  // null when the binder is opaque (plain lambda)
};

OptimizeResult optimize_impl(const Context& ctx, const TermPtr& e,
                             const Signature& sig, const OptConfig& cfg);

struct Sweep {
  const Signature& sig;
  const OptConfig& cfg;
  Pass pass;
  std::vector<RewriteEntry>* log;

  std::string join(const std::string& site, const std::string& child) const {
    return site == "/" ? "/" + child : site + "/" + child;
  }

  void record(const std::string& path, const std::string& rule,
              const Context& ctx, const TermPtr& before, const TermPtr& after,
              std::string aux, std::string just) const {
    log->push_back({path, rule, print_context(ctx), print_term(before),
                    print_term(after), std::move(aux), std::move(just)});
  }

  TermPtr walk(const Context& ctx, const std::vector<LetBinding>& env,
               const TermPtr& e, const std::string& path) const {
    TermPtr cur = std::visit(
        overloaded{
            [&](const Const&) { return e; },
            [&](const Var&) { return e; },
            [&](const Cast&) { return e; },
            [&](const Blame&) { return e; },
            [&](const Lam& n) {
              Context c2 = ctx_shadow(ctx, n.var, n.ann);
              auto env2 = env;
              env2.push_back({n.var, n.ann, nullptr});
              TermPtr b = walk(c2, env2, n.body, join(path, "body"));
              return b == n.body ? e : lam(n.var, n.ann, b);
            },
            [&](const TyLam& n) {
              Context c2 = ctx_shadow(ctx, n.var, nullptr);
              auto env2 = env;
              env2.push_back({n.var, nullptr, nullptr});
              TermPtr b = walk(c2, env2, n.body, join(path, "body"));
              return b == n.body ? e : tylam(n.var, b);
            },
            [&](const App& n) {
              TermPtr arg = walk(ctx, env, n.arg, join(path, "arg"));
              TermPtr fn;
              if (const auto* l = std::get_if<Lam>(&n.fn->v)) {
                // A reducible application is a let: the binder's right-hand
                // side is visible to the body.
                Context c2 = ctx_shadow(ctx, l->var, l->ann);
                auto env2 = env;
                env2.push_back({l->var, l->ann, arg});
                TermPtr b =
                    walk(c2, env2, l->body, join(join(path, "fn"), "body"));
                fn = b == l->body ? n.fn : lam(l->var, l->ann, b);
              } else {
                fn = walk(ctx, env, n.fn, join(path, "fn"));
              }
              return fn == n.fn && arg == n.arg ? e : app(fn, arg);
            },
            [&](const TyApp& n) {
              TermPtr f = walk(ctx, env, n.fn, join(path, "fn"));
              return f == n.fn ? e : tyapp(f, n.arg);
            },
            [&](const OpApp& n) {
              std::vector<TermPtr> args;
              bool changed = false;
              for (std::size_t i = 0; i < n.args.size(); ++i) {
                args.push_back(walk(ctx, env, n.args[i],
                                    join(path, "arg" + std::to_string(i + 1))));
                changed |= args.back() != n.args[i];
              }
              return changed ? opapp(n.op, std::move(args)) : e;
            },
            [&](const Wait& n) {
              TermPtr s = walk(ctx, env, n.subject, join(path, "subject"));
              return s == n.subject ? e : wait(n.ref, s, n.label);
            },
            [&](const Active& n) {
              TermPtr s = walk(ctx, env, n.state, join(path, "state"));
              TermPtr v = walk(ctx, env, n.value, join(path, "value"));
              return s == n.state && v == n.value ? e
                                                  : active(n.ref, s, v, n.label);
            },
        },
        e->v);
    return local(ctx, env, cur, path);
  }

  TermPtr local(const Context& ctx, const std::vector<LetBinding>& env,
                const TermPtr& e, const std::string& path) const {
    switch (pass) {
      case Pass::Reflexive: {
        const auto* c = std::get_if<Cast>(&e->v);
        if (c && alpha_eq(c->src, c->tgt)) {
          TermPtr after = identity_for(c->src);
          record(path, "ReflElim", ctx, e, after, "",
                 "source and target are alpha-equal");
          return after;
        }
        return e;
      }
      case Pass::Upcast: {
        const auto* c = std::get_if<Cast>(&e->v);
        if (!c) return e;
        SubtypeVerdict v = subtype(ctx, c->src, c->tgt, sig, cfg.prover);
        if (v.verdict != Tri::Yes) return e;
        TermPtr after = identity_for(c->src);
        record(path, "UpcastElim", ctx, e, after, "", explain(v));
        return after;
      }
      case Pass::SelfAssist: {
        const auto* a = std::get_if<App>(&e->v);
        if (!a) return e;
        const auto* c = std::get_if<Cast>(&a->fn->v);
        if (!c) return e;
        TypePtr direct = selfify(c->src, a->arg);
        if (alpha_eq(c->tgt, direct)) {
          record(path, "SelfAssist", ctx, e, a->arg, print_type(direct),
                 "target is the selfified source at the applied term");
          return a->arg;
        }
        TypePtr s;
        if (is_value(a->arg)) {
          s = direct;
        } else if (const auto* x = std::get_if<Var>(&a->arg->v)) {
          const LetBinding* hit = nullptr;
          for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->var == x->name) {
              hit = &*it;
              break;
            }
          s = hit && hit->rhs ? selfify(hit->ann, hit->rhs) : direct;
        } else {
          return e;
        }
        SubtypeVerdict v = subtype(ctx, s, c->tgt, sig, cfg.prover);
        if (v.verdict != Tri::Yes) return e;
        record(path, "SelfAssist", ctx, e, a->arg, print_type(s),
               "selfified argument type entails the target\n" + explain(v));
        return a->arg;
      }
      case Pass::Decompose: {
        const auto* c = std::get_if<Cast>(&e->v);
        if (!c) return e;
        if (std::holds_alternative<TFun>(c->src->v) &&
            std::holds_alternative<TFun>(c->tgt->v)) {
          TermPtr after = fun_cast_wrapper(c->src, c->tgt, c->label);
          record(path, "DecompFun", ctx, e, after, "",
                 "function cast splits into domain and codomain casts");
          return after;
        }
        if (std::holds_alternative<TForall>(c->src->v) &&
            std::holds_alternative<TForall>(c->tgt->v)) {
          TermPtr after = forall_cast_wrapper(c->src, c->tgt, c->label);
          record(path, "DecompForall", ctx, e, after, "",
                 "quantified cast splits at a fresh type variable");
          return after;
        }
        if (cfg.decompose_precheck &&
            std::holds_alternative<TRefine>(c->tgt->v) &&
            !std::holds_alternative<TRefine>(c->src->v)) {
          TermPtr after = precheck_cast_wrapper(c->src, c->tgt, c->label);
          record(path, "DecompPrecheck", ctx, e, after, "",
                 "refined-target cast splits into a waiting check");
          return after;
        }
        return e;
      }
      case Pass::Forget: {
        const auto* c = std::get_if<Cast>(&e->v);
        if (!c) return e;
        const auto* r = std::get_if<TRefine>(&c->src->v);
        if (!r) return e;
        TermPtr candidate = cast(r->base, c->tgt, c->label);
        OptConfig mini;
        mini.passes = {"reflexive", "upcast", "forget"};
        mini.max_rounds = 3;
        mini.prover = cfg.prover;
        OptimizeResult sub = optimize_impl(ctx, candidate, sig, mini);
        if (alpha_eq(sub.term, candidate)) return e;  // peeling bought nothing
        record(path, "ForgetSource", ctx, e, sub.term, print_term(candidate),
               "source refinements are never checked at run time");
        for (auto& le : sub.log) {
          le.path = le.path == "/" ? path : join(path, le.path.substr(1));
          log->push_back(std::move(le));
        }
        return sub.term;
      }
      case Pass::Beta: {
        const auto* a = std::get_if<App>(&e->v);
        if (!a) return e;
        const auto* l = std::get_if<Lam>(&a->fn->v);
        if (!l) return e;
        const auto* bv = std::get_if<Var>(&l->body->v);
        if (bv && bv->name == l->var) {
          record(path, "BetaCleanup", ctx, e, a->arg, "",
                 "identity function application");
          return a->arg;
        }
        if (is_value(a->arg) || std::holds_alternative<Var>(a->arg->v)) {
          TermPtr after = subst_term(l->body, l->var, a->arg);
          record(path, "BetaCleanup", ctx, e, after, "",
                 "argument is a value or a variable; contracted");
          return after;
        }
        return e;
      }
    }
    return e;
  }
};

OptimizeResult optimize_impl(const Context& ctx, const TermPtr& e,
                             const Signature& sig, const OptConfig& cfg) {
  static const Pass order[] = {Pass::Reflexive, Pass::Upcast, Pass::SelfAssist,
                               Pass::Decompose, Pass::Forget, Pass::Beta};
  OptimizeResult res{e, {}, 0};
  for (int round = 0; round < cfg.max_rounds; ++round) {
    TermPtr before = res.term;
    for (Pass p : order) {
      if (!cfg.passes.count(pass_key(p))) continue;
      Sweep sweep{sig, cfg, p, &res.log};
      res.term = sweep.walk(ctx, {}, res.term, "/");
    }
    ++res.rounds;
    if (alpha_eq(res.term, before)) break;
  }
  return res;
}

}  // namespace

OptimizeResult optimize(const Context& ctx, const TermPtr& e,
                        const Signature& sig, const OptConfig& cfg) {
  return optimize_impl(ctx, e, sig, cfg);
}

bool replay_entry(const RewriteEntry& entry, const Signature& sig,
                  const ProverConfig& prover) {
  try {
    Context ctx;
    if (entry.context.find_first_not_of(" \t\n") != std::string::npos)
      ctx = parse_context(entry.context, sig);
    TermPtr before = parse_term(entry.before, sig);
    TermPtr after = parse_term(entry.after, sig);
    if (entry.rule == "ReflElim") {
      const auto* c = std::get_if<Cast>(&before->v);
      return c && alpha_eq(c->src, c->tgt) &&
             alpha_eq(after, identity_for(c->src));
    }
    if (entry.rule == "UpcastElim") {
      const auto* c = std::get_if<Cast>(&before->v);
      if (!c || !alpha_eq(after, identity_for(c->src))) return false;
      return subtype(ctx, c->src, c->tgt, sig, prover).verdict == Tri::Yes;
    }
    if (entry.rule == "SelfAssist") {
      const auto* a = std::get_if<App>(&before->v);
      if (!a) return false;
      const auto* c = std::get_if<Cast>(&a->fn->v);
      if (!c || !alpha_eq(after, a->arg)) return false;
      if (alpha_eq(c->tgt, selfify(c->src, a->arg))) return true;
      TypePtr s = parse_type(entry.aux, sig);
      return subtype(ctx, s, c->tgt, sig, prover).verdict == Tri::Yes;
    }
    if (entry.rule == "DecompFun" || entry.rule == "DecompForall" ||
        entry.rule == "DecompPrecheck") {
      const auto* c = std::get_if<Cast>(&before->v);
      if (!c) return false;
      TermPtr expect;
      if (entry.rule == "DecompFun")
        expect = fun_cast_wrapper(c->src, c->tgt, c->label);
      else if (entry.rule == "DecompForall")
        expect = forall_cast_wrapper(c->src, c->tgt, c->label);
      else
        expect = precheck_cast_wrapper(c->src, c->tgt, c->label);
      return alpha_eq(after, expect);
    }
    if (entry.rule == "ForgetSource") {
      const auto* c = std::get_if<Cast>(&before->v);
      if (!c) return false;
      const auto* r = std::get_if<TRefine>(&c->src->v);
      if (!r) return false;
      TermPtr candidate = cast(r->base, c->tgt, c->label);
      if (!alpha_eq(candidate, parse_term(entry.aux, sig))) return false;
      OptConfig mini;
      mini.passes = {"reflexive", "upcast", "forget"};
      mini.max_rounds = 3;
      mini.prover = prover;
      return alpha_eq(optimize(ctx, candidate, sig, mini).term, after);
    }
    if (entry.rule == "BetaCleanup") {
      const auto* a = std::get_if<App>(&before->v);
      if (!a) return false;
      const auto* l = std::get_if<Lam>(&a->fn->v);
      if (!l) return false;
      const auto* bv = std::get_if<Var>(&l->body->v);
      if (bv && bv->name == l->var) return alpha_eq(after, a->arg);
      if (!is_value(a->arg) && !std::holds_alternative<Var>(a->arg->v))
        return false;
      return alpha_eq(after, subst_term(l->body, l->var, a->arg));
    }
    return false;
  } catch (const ParseError&) {
    return false;
  }
}

}  // namespace fh
