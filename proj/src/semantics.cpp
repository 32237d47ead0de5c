#include "fh/semantics.hpp"

#include <utility>

namespace fh {

namespace {

// Fuel for the refinement gate inside op_denotation. Predicates on op
// arguments are tiny closed terms; anything that needs more than this is
// treated as undefined rather than looping.
constexpr std::size_t kOpGateFuel = 4096;

TermPtr wrap(const Frame& f, TermPtr hole) {
  return std::visit(
      overloaded{
          [&](const FrameOp& fr) {
            std::vector<TermPtr> args(fr.left);
            args.push_back(hole);
            args.insert(args.end(), fr.right.begin(), fr.right.end());
            return opapp(fr.op, std::move(args));
          },
          [&](const FrameAppL& fr) { return app(hole, fr.arg); },
          [&](const FrameAppR& fr) { return app(fr.fn, hole); },
          [&](const FrameTyApp& fr) { return tyapp(hole, fr.arg); },
          [&](const FrameWait& fr) { return wait(fr.ref, hole, fr.label); },
          [&](const FrameActive& fr) {
            return active(fr.ref, hole, fr.value, fr.label);
          },
      },
      f);
}

bool is_blame(const TermPtr& e) { return std::holds_alternative<Blame>(e->v); }

// Recursive decomposition worker: returns the frames from this node down to
// the hole plus the inner redex (or lifted blame).
bool dec(const TermPtr& e, const Signature& sig, std::vector<Frame>& frames,
         TermPtr& inner, bool& inner_is_blame);

// Enter child position `c` under frame `f`.
bool enter(const TermPtr& c, Frame f, const Signature& sig,
           std::vector<Frame>& frames, TermPtr& inner, bool& inner_is_blame) {
  frames.push_back(std::move(f));
  if (is_blame(c)) {
    inner = c;
    inner_is_blame = true;
    return true;
  }
  if (dec(c, sig, frames, inner, inner_is_blame)) return true;
  frames.pop_back();
  return false;
}

// `e` itself is the candidate redex; keep it only if a rule fires.
bool here(const TermPtr& e, const Signature& sig, TermPtr& inner,
          bool& inner_is_blame) {
  if (!reduce(e, sig, 0)) return false;
  inner = e;
  inner_is_blame = false;
  return true;
}

bool dec(const TermPtr& e, const Signature& sig, std::vector<Frame>& frames,
         TermPtr& inner, bool& inner_is_blame) {
  if (is_value(e) || is_blame(e)) return false;
  return std::visit(
      overloaded{
          [&](const OpApp& n) {
            for (std::size_t i = 0; i < n.args.size(); ++i) {
              if (is_value(n.args[i])) continue;
              FrameOp fr{n.op,
                         std::vector<TermPtr>(n.args.begin(), n.args.begin() + i),
                         std::vector<TermPtr>(n.args.begin() + i + 1, n.args.end())};
              return enter(n.args[i], std::move(fr), sig, frames, inner,
                           inner_is_blame);
            }
            return here(e, sig, inner, inner_is_blame);
          },
          [&](const App& n) {
            if (!is_value(n.fn))
              return enter(n.fn, FrameAppL{n.arg}, sig, frames, inner,
                           inner_is_blame);
            if (!is_value(n.arg))
              return enter(n.arg, FrameAppR{n.fn}, sig, frames, inner,
                           inner_is_blame);
            return here(e, sig, inner, inner_is_blame);
          },
          [&](const TyApp& n) {
            if (!is_value(n.fn))
              return enter(n.fn, FrameTyApp{n.arg}, sig, frames, inner,
                           inner_is_blame);
            return here(e, sig, inner, inner_is_blame);
          },
          [&](const Wait& n) {
            if (!is_value(n.subject))
              return enter(n.subject, FrameWait{n.ref, n.label}, sig, frames,
                           inner, inner_is_blame);
            return here(e, sig, inner, inner_is_blame);
          },
          [&](const Active& n) {
            if (!is_value(n.state))
              return enter(n.state, FrameActive{n.ref, n.value, n.label}, sig,
                           frames, inner, inner_is_blame);
            return here(e, sig, inner, inner_is_blame);
          },
          [&](const auto&) { return false; },  // Var: open terms get stuck
      },
      e->v);
}

}  // namespace

TermPtr EvalContext::plug(TermPtr hole) const {
  TermPtr cur = std::move(hole);
  for (auto it = frames.rbegin(); it != frames.rend(); ++it)
    cur = wrap(*it, std::move(cur));
  return cur;
}

std::optional<Decomposition> decompose(const TermPtr& e, const Signature& sig) {
  Decomposition d;
  d.inner_is_blame = false;
  if (!dec(e, sig, d.ctx.frames, d.inner, d.inner_is_blame)) return std::nullopt;
  return d;
}

std::optional<TermPtr> op_denotation(const Signature& sig, const std::string& op,
                                     const std::vector<TermPtr>& args) {
  const OpSig* s = sig.find(op);
  if (!s || s->params.size() != args.size()) return std::nullopt;
  std::vector<ConstVal> ks;
  ks.reserve(args.size());
  for (const auto& a : args) {
    const auto* c = std::get_if<Const>(&a->v);
    if (!c) return std::nullopt;
    ks.push_back(c->k);
  }
  // Gate each argument on its declared refinements, with earlier parameters
  // instantiated by the actual constants (the chains are dependent).
  for (std::size_t i = 0; i < args.size(); ++i) {
    TypePtr pt = s->params[i].second;
    for (std::size_t j = 0; j < i; ++j)
      pt = subst_term(pt, s->params[j].first, args[j]);
    if (!alpha_eq(unref(pt), const_type(ks[i]))) return std::nullopt;
    for (const auto& layer : refines(pt)) {
      Outcome o = evaluate(app(layer, args[i]), sig, kOpGateFuel);
      if (o.kind != Outcome::Kind::Value || !is_true(o.result))
        return std::nullopt;
    }
  }
  std::optional<ConstVal> r = apply_selector(s->selector, ks);
  if (!r) return std::nullopt;
  return TermPtr(std::visit(
      overloaded{[](bool b) { return cbool(b); },
                 [](std::int64_t n) { return cint(n); }},
      *r));
}

std::optional<TermPtr> reduce(const TermPtr& redex, const Signature& sig,
                              std::size_t step_index) {
  using R = std::optional<TermPtr>;
  return std::visit(
      overloaded{
          [&](const OpApp& n) -> R {
            for (const auto& a : n.args)
              if (!is_const(a)) return std::nullopt;
            return op_denotation(sig, n.op, n.args);
          },
          [&](const App& n) -> R {
            if (!is_value(n.fn) || !is_value(n.arg)) return std::nullopt;
            if (const auto* l = std::get_if<Lam>(&n.fn->v))
              return subst_term(l->body, l->var, n.arg);
            const auto* c = std::get_if<Cast>(&n.fn->v);
            if (!c) return std::nullopt;
            const TermPtr& v = n.arg;
            // Source refinements are forgotten one layer at a time, never
            // checked, and take priority over every other cast rule.
            if (const auto* r = std::get_if<TRefine>(&c->src->v))
              return app(cast(r->base, c->tgt, c->label), v);
            if (const auto* rt = std::get_if<TRefine>(&c->tgt->v))
              return wait(c->tgt, app(cast(c->src, rt->base, c->label), v),
                          c->label);
            if (const auto* b1 = std::get_if<TBase>(&c->src->v)) {
              const auto* b2 = std::get_if<TBase>(&c->tgt->v);
              if (b2 && b1->name == b2->name) return v;
              return std::nullopt;
            }
            if (const auto* f1 = std::get_if<TFun>(&c->src->v)) {
              const auto* f2 = std::get_if<TFun>(&c->tgt->v);
              if (!f2) return std::nullopt;
              std::set<std::string> avoid = free_term_vars(v);
              for (const auto& t : {f1->dom, f1->cod, f2->dom, f2->cod}) {
                auto fv = free_term_vars(t);
                avoid.insert(fv.begin(), fv.end());
              }
              std::string x = fresh_name(f2->var, avoid);
              TypePtr cod2 =
                  x == f2->var ? f2->cod : subst_term(f2->cod, f2->var, fh::var(x));
              avoid.insert(x);
              std::string y = fresh_name(
                  "y$" + c->label + "$" + std::to_string(step_index), avoid);
              TypePtr cod1 = subst_term(f1->cod, f1->var, fh::var(y));
              TermPtr body =
                  app(cast(cod1, cod2, c->label), app(v, fh::var(y)));
              return lam(x, f2->dom,
                         let_(y, f1->dom,
                              app(cast(f2->dom, f1->dom, c->label), fh::var(x)),
                              body));
            }
            if (const auto* q1 = std::get_if<TForall>(&c->src->v)) {
              const auto* q2 = std::get_if<TForall>(&c->tgt->v);
              if (!q2) return std::nullopt;
              std::set<std::string> avoid = free_type_vars(v);
              for (const auto& t : {q1->body, q2->body}) {
                auto fv = free_type_vars(t);
                avoid.insert(fv.begin(), fv.end());
              }
              std::string a = fresh_name(q2->var, avoid);
              TypePtr s1 = a == q1->var ? q1->body
                                        : subst_type(q1->body, q1->var, tvar(a));
              TypePtr s2 = a == q2->var ? q2->body
                                        : subst_type(q2->body, q2->var, tvar(a));
              return tylam(a, app(cast(s1, s2, c->label), tyapp(v, tvar(a))));
            }
            return std::nullopt;
          },
          [&](const TyApp& n) -> R {
            if (const auto* tl = std::get_if<TyLam>(&n.fn->v))
              return subst_type(tl->body, tl->var, n.arg);
            return std::nullopt;
          },
          [&](const Wait& n) -> R {
            if (!is_value(n.subject)) return std::nullopt;
            const auto* r = std::get_if<TRefine>(&n.ref->v);
            if (!r) return std::nullopt;
            return active(n.ref, subst_term(r->pred, r->var, n.subject),
                          n.subject, n.label);
          },
          [&](const Active& n) -> R {
            if (is_true(n.state)) return n.value;
            if (is_false(n.state)) return blame(n.label);
            return std::nullopt;
          },
          [&](const auto&) -> R { return std::nullopt; },
      },
      redex->v);
}

StepResult step(const TermPtr& e, const Signature& sig, std::size_t step_index) {
  if (is_value(e)) return {StepResult::Kind::Value, e, ""};
  if (const auto* b = std::get_if<Blame>(&e->v))
    return {StepResult::Kind::Blame, e, b->label};
  auto d = decompose(e, sig);
  if (!d) return {StepResult::Kind::Stuck, e, ""};
  if (d->inner_is_blame)
    return {StepResult::Kind::Stepped, d->inner,
            std::get<Blame>(d->inner->v).label};
  auto r = reduce(d->inner, sig, step_index);
  if (!r) return {StepResult::Kind::Stuck, e, ""};  // unreachable by construction
  return {StepResult::Kind::Stepped, d->ctx.plug(*r), ""};
}

Outcome evaluate(const TermPtr& e, const Signature& sig, std::size_t fuel) {
  TermPtr cur = e;
  for (std::size_t i = 0; i < fuel; ++i) {
    StepResult s = step(cur, sig, i);
    switch (s.kind) {
      case StepResult::Kind::Value:
        return {Outcome::Kind::Value, cur, "", i};
      case StepResult::Kind::Blame:
        return {Outcome::Kind::Blame, cur, s.label, i};
      case StepResult::Kind::Stuck:
        return {Outcome::Kind::Stuck, cur, "", i};
      case StepResult::Kind::Stepped:
        cur = s.term;
        break;
    }
  }
  return {Outcome::Kind::FuelExhausted, cur, "", fuel};
}

EvalTrace trace(const TermPtr& e, const Signature& sig, std::size_t fuel) {
  EvalTrace t;
  t.states.push_back(e);
  TermPtr cur = e;
  for (std::size_t i = 0; i < fuel; ++i) {
    StepResult s = step(cur, sig, i);
    switch (s.kind) {
      case StepResult::Kind::Value:
        t.outcome = {Outcome::Kind::Value, cur, "", i};
        return t;
      case StepResult::Kind::Blame:
        t.outcome = {Outcome::Kind::Blame, cur, s.label, i};
        return t;
      case StepResult::Kind::Stuck:
        t.outcome = {Outcome::Kind::Stuck, cur, "", i};
        return t;
      case StepResult::Kind::Stepped:
        cur = s.term;
        t.states.push_back(cur);
        break;
    }
  }
  t.outcome = {Outcome::Kind::FuelExhausted, cur, "", fuel};
  return t;
}

namespace {

// Shared-budget normalizer for terms embedded in types: children first, then
// run any closed non-value to an answer if the budget allows.
struct Normalizer {
  const Signature& sig;
  std::size_t budget;
  bool limited = false;
  std::size_t idx = 0;

  TermPtr term(const TermPtr& e) {
    TermPtr out = std::visit(
        overloaded{
            [&](const Const&) { return e; },
            [&](const Var&) { return e; },
            [&](const Blame&) { return e; },
            [&](const Lam& n) {
              TypePtr a = type(n.ann);
              TermPtr b = term(n.body);
              return a == n.ann && b == n.body ? e : lam(n.var, a, b);
            },
            [&](const TyLam& n) {
              TermPtr b = term(n.body);
              return b == n.body ? e : tylam(n.var, b);
            },
            [&](const App& n) {
              TermPtr f = term(n.fn), a = term(n.arg);
              return f == n.fn && a == n.arg ? e : app(f, a);
            },
            [&](const TyApp& n) {
              TermPtr f = term(n.fn);
              TypePtr a = type(n.arg);
              return f == n.fn && a == n.arg ? e : tyapp(f, a);
            },
            [&](const Cast& n) {
              TypePtr s = type(n.src), t = type(n.tgt);
              return s == n.src && t == n.tgt ? e : cast(s, t, n.label);
            },
            [&](const OpApp& n) {
              std::vector<TermPtr> args;
              bool changed = false;
              for (const auto& a : n.args) {
                args.push_back(term(a));
                changed |= args.back() != a;
              }
              return changed ? opapp(n.op, std::move(args)) : e;
            },
            [&](const Wait& n) {
              TypePtr r = type(n.ref);
              TermPtr s = term(n.subject);
              return r == n.ref && s == n.subject ? e : wait(r, s, n.label);
            },
            [&](const Active& n) {
              TypePtr r = type(n.ref);
              TermPtr s = term(n.state), v = term(n.value);
              return r == n.ref && s == n.state && v == n.value
                         ? e
                         : active(r, s, v, n.label);
            },
        },
        e->v);
    if (is_value(out) || is_blame(out) || !is_closed(out)) return out;
    for (;;) {
      if (budget == 0) {
        limited = true;
        return out;
      }
      StepResult s = step(out, sig, idx++);
      if (s.kind != StepResult::Kind::Stepped) return out;
      --budget;
      out = s.term;
    }
  }

  TypePtr type(const TypePtr& t) {
    return std::visit(
        overloaded{
            [&](const TBase&) { return t; },
            [&](const TVar&) { return t; },
            [&](const TFun& n) {
              TypePtr d = type(n.dom), c = type(n.cod);
              return d == n.dom && c == n.cod ? t : tfun(n.var, d, c);
            },
            [&](const TForall& n) {
              TypePtr b = type(n.body);
              return b == n.body ? t : tforall(n.var, b);
            },
            [&](const TRefine& n) {
              TypePtr b = type(n.base);
              TermPtr p = term(n.pred);
              return b == n.base && p == n.pred ? t : trefine(n.var, b, p);
            },
        },
        t->v);
  }
};

}  // namespace

std::pair<TermPtr, bool> normalize_embedded(const TermPtr& e, const Signature& sig,
                                            std::size_t budget) {
  Normalizer n{sig, budget};
  TermPtr out = n.term(e);
  return {out, n.limited};
}

std::pair<TypePtr, bool> normalize_embedded(const TypePtr& t, const Signature& sig,
                                            std::size_t budget) {
  Normalizer n{sig, budget};
  TypePtr out = n.type(t);
  return {out, n.limited};
}

}  // namespace fh
