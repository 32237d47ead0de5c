#include "fh/subtyping.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "fh/printer.hpp"
#include "fh/semantics.hpp"

namespace fh {

TermPtr strip_wrapper_casts(const TermPtr& e) {
  auto st = [](const TermPtr& x) { return strip_wrapper_casts(x); };
  return std::visit(
      overloaded{
          [&](const Const&) { return e; },
          [&](const Var&) { return e; },
          [&](const Blame&) { return e; },
          [&](const Lam& n) {
            TermPtr b = st(n.body);
            return b == n.body ? e : lam(n.var, n.ann, b);
          },
          [&](const TyLam& n) {
            TermPtr b = st(n.body);
            return b == n.body ? e : tylam(n.var, b);
          },
          [&](const App& n) {
            if (std::holds_alternative<Cast>(n.fn->v) &&
                std::holds_alternative<Var>(n.arg->v))
              return n.arg;
            TermPtr f = st(n.fn), a = st(n.arg);
            return f == n.fn && a == n.arg ? e : app(f, a);
          },
          [&](const TyApp& n) {
            TermPtr f = st(n.fn);
            return f == n.fn ? e : tyapp(f, n.arg);
          },
          [&](const Cast&) { return e; },
          [&](const OpApp& n) {
            std::vector<TermPtr> args;
            bool changed = false;
            for (const auto& a : n.args) {
              args.push_back(st(a));
              changed |= args.back() != a;
            }
            return changed ? opapp(n.op, std::move(args)) : e;
          },
          [&](const Wait& n) {
            TermPtr s = st(n.subject);
            return s == n.subject ? e : wait(n.ref, s, n.label);
          },
          [&](const Active& n) {
            TermPtr s = st(n.state), v = st(n.value);
            return s == n.state && v == n.value ? e
                                                : active(n.ref, s, v, n.label);
          },
      },
      e->v);
}

namespace {

std::set<std::string> names_of(const Context& ctx) {
  std::set<std::string> s;
  for (const auto& e : ctx) s.insert(e.name);
  return s;
}

struct Hyp {
  std::string var;
  TypePtr type;
  std::vector<TermPtr> preds;  // refinement layers instantiated at var
};

std::vector<Hyp> term_hyps(const Context& ctx) {
  std::vector<Hyp> out;
  for (const auto& e : ctx) {
    if (!e.type) continue;
    Hyp h{e.name, e.type, {}};
    for (const auto& layer : refines(e.type)) {
      const auto& l = std::get<Lam>(layer->v);
      h.preds.push_back(
          strip_wrapper_casts(subst_term(l.body, l.var, fh::var(e.name))));
    }
    out.push_back(std::move(h));
  }
  return out;
}

const TBase* base_skeleton(const TypePtr& t) {
  TypePtr u = unref(t);
  return std::get_if<TBase>(&u->v);
}

using Assignment = std::vector<std::pair<std::string, TermPtr>>;

TermPtr apply_assignment(TermPtr e, const Assignment& as) {
  for (const auto& [x, v] : as) e = subst_term(e, x, v);
  return e;
}

std::string show_assignment(const Assignment& as) {
  std::string s = "[";
  for (std::size_t i = 0; i < as.size(); ++i) {
    if (i) s += ", ";
    s += as[i].first + " := " + print_term(as[i].second);
  }
  return s + "]";
}

// Integer interval with optional endpoints.
struct IB {
  std::optional<std::int64_t> lo, hi;
};

void tighten_lo(IB& b, std::int64_t v) {
  if (!b.lo || *b.lo < v) b.lo = v;
}
void tighten_hi(IB& b, std::int64_t v) {
  if (!b.hi || *b.hi > v) b.hi = v;
}

const Var* as_var(const TermPtr& e) { return std::get_if<Var>(&e->v); }
std::optional<std::int64_t> as_int(const TermPtr& e) {
  if (const auto* c = std::get_if<Const>(&e->v))
    if (const auto* n = std::get_if<std::int64_t>(&c->k)) return *n;
  return std::nullopt;
}

constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

void harvest(const TermPtr& pred, std::map<std::string, IB>& bounds) {
  const auto* op = std::get_if<OpApp>(&pred->v);
  if (!op) return;
  if (op->op == "and" && op->args.size() == 2) {
    harvest(op->args[0], bounds);
    harvest(op->args[1], bounds);
    return;
  }
  if (op->op == "prime?" && op->args.size() == 1) {
    if (const auto* v = as_var(op->args[0])) tighten_lo(bounds[v->name], 2);
    return;
  }
  if (op->args.size() != 2) return;
  const Var* lv = as_var(op->args[0]);
  const Var* rv = as_var(op->args[1]);
  auto lc = as_int(op->args[0]);
  auto rc = as_int(op->args[1]);
  if (lv && rc) {
    IB& b = bounds[lv->name];
    std::int64_t c = *rc;
    if (op->op == "lt" && c != kMin) tighten_hi(b, c - 1);
    else if (op->op == "le") tighten_hi(b, c);
    else if (op->op == "gt" && c != kMax) tighten_lo(b, c + 1);
    else if (op->op == "ge") tighten_lo(b, c);
    else if (op->op == "eqInt") { tighten_lo(b, c); tighten_hi(b, c); }
  } else if (rv && lc) {
    IB& b = bounds[rv->name];
    std::int64_t c = *lc;
    if (op->op == "lt" && c != kMax) tighten_lo(b, c + 1);   // c < y
    else if (op->op == "le") tighten_lo(b, c);               // c <= y
    else if (op->op == "gt" && c != kMin) tighten_hi(b, c - 1);  // c > y
    else if (op->op == "ge") tighten_hi(b, c);               // c >= y
    else if (op->op == "eqInt") { tighten_lo(b, c); tighten_hi(b, c); }
  }
}

bool prove_from_bounds(const TermPtr& goal,
                       const std::map<std::string, IB>& bounds) {
  const auto* op = std::get_if<OpApp>(&goal->v);
  if (!op) return false;
  if (op->op == "and" && op->args.size() == 2)
    return prove_from_bounds(op->args[0], bounds) &&
           prove_from_bounds(op->args[1], bounds);
  if (op->op == "or" && op->args.size() == 2)
    return prove_from_bounds(op->args[0], bounds) ||
           prove_from_bounds(op->args[1], bounds);
  if (op->args.size() != 2) return false;
  const Var* lv = as_var(op->args[0]);
  const Var* rv = as_var(op->args[1]);
  auto lc = as_int(op->args[0]);
  auto rc = as_int(op->args[1]);
  const IB* b = nullptr;
  std::int64_t c = 0;
  bool var_left = false;
  if (lv && rc) {
    auto it = bounds.find(lv->name);
    if (it == bounds.end()) return false;
    b = &it->second;
    c = *rc;
    var_left = true;
  } else if (rv && lc) {
    auto it = bounds.find(rv->name);
    if (it == bounds.end()) return false;
    b = &it->second;
    c = *lc;
  } else {
    return false;
  }
  auto lo = b->lo, hi = b->hi;
  const std::string& o = op->op;
  if (var_left) {
    if (o == "gt") return lo && *lo > c;
    if (o == "ge") return lo && *lo >= c;
    if (o == "lt") return hi && *hi < c;
    if (o == "le") return hi && *hi <= c;
    if (o == "eqInt") return lo && hi && *lo == *hi && *lo == c;
    if (o == "neq") return (lo && c < *lo) || (hi && c > *hi);
  } else {  // c OP y
    if (o == "gt") return hi && c > *hi;
    if (o == "ge") return hi && c >= *hi;
    if (o == "lt") return lo && c < *lo;
    if (o == "le") return lo && c <= *lo;
    if (o == "eqInt") return lo && hi && *lo == *hi && *lo == c;
    if (o == "neq") return (lo && c < *lo) || (hi && c > *hi);
  }
  return false;
}

struct Prover {
  const Signature& sig;
  ProverConfig cfg;
  bool inconclusive = false;  // some tactic ran out of budget

  Outcome run(const TermPtr& e) const { return evaluate(e, sig, cfg.eval_budget); }

  // True/false/unknown evaluation of a closed boolean term.
  Tri truth(const TermPtr& e) {
    Outcome o = run(e);
    if (o.kind == Outcome::Kind::Value && is_true(o.result)) return Tri::Yes;
    if (o.kind == Outcome::Kind::FuelExhausted) {
      inconclusive = true;
      return Tri::Unknown;
    }
    return Tri::No;  // false, blame, stuck: not satisfied
  }

  SubtypeVerdict yes(std::string how) {
    return {Tri::Yes, std::move(how), std::nullopt, ""};
  }
  SubtypeVerdict no(Counterexample w, std::string reason) {
    return {Tri::No, "", std::move(w), std::move(reason)};
  }

  SubtypeVerdict satisfies(const Context& ctx, const TermPtr& goal) {
    // (1) literal truth
    if (is_true(goal)) return yes("literal");

    std::vector<Hyp> hyps = term_hyps(ctx);
    bool goal_has_tyvars = !free_type_vars(goal).empty();

    // (2) closed evaluation after singleton narrowing: a refinement layer
    // y == e with closed e pins y to e's value; narrowed values feed the
    // layers of later bindings.
    Assignment narrows;
    bool narrows_feasible = true;
    bool narrows_complete = true;  // every term binding pinned and checked
    for (const auto& h : hyps) {
      TypePtr t = h.type;
      for (const auto& [x, v] : narrows) t = subst_term(t, x, v);
      std::optional<TermPtr> pinned;
      std::vector<TermPtr> layers;
      for (const auto& layer : refines(t)) {
        const auto& l = std::get<Lam>(layer->v);
        layers.push_back(
            strip_wrapper_casts(subst_term(l.body, l.var, fh::var(h.var))));
      }
      for (const auto& p : layers) {
        const auto* op = std::get_if<OpApp>(&p->v);
        if (!op || (op->op != "eqInt" && op->op != "eqBool") ||
            op->args.size() != 2)
          continue;
        const Var* l0 = as_var(op->args[0]);
        const Var* r0 = as_var(op->args[1]);
        TermPtr rhs;
        if (l0 && l0->name == h.var && is_closed(op->args[1]))
          rhs = op->args[1];
        else if (r0 && r0->name == h.var && is_closed(op->args[0]))
          rhs = op->args[0];
        else
          continue;
        Outcome o = run(rhs);
        if (o.kind == Outcome::Kind::Value && is_const(o.result)) {
          pinned = o.result;
          break;
        }
        if (o.kind == Outcome::Kind::FuelExhausted) inconclusive = true;
      }
      if (!pinned) {
        narrows_complete = false;
        continue;
      }
      narrows.emplace_back(h.var, *pinned);
      // Check the pinned value against this binding's own layers.
      for (const auto& p : layers) {
        TermPtr inst = apply_assignment(p, narrows);
        if (!is_closed(inst)) {
          narrows_complete = false;
          continue;
        }
        Tri tv = truth(inst);
        if (tv == Tri::No) narrows_feasible = false;
        if (tv == Tri::Unknown) narrows_complete = false;
      }
    }
    if (!narrows_feasible)
      return yes("vacuous: singleton refinements are contradictory " +
                 show_assignment(narrows));
    if (!goal_has_tyvars) {
      TermPtr g = apply_assignment(goal, narrows);
      if (is_closed(g)) {
        Tri tv = truth(g);
        if (tv == Tri::Yes)
          return yes(narrows.empty()
                         ? "closed evaluation"
                         : "closed evaluation after narrowing " +
                               show_assignment(narrows));
        if (tv == Tri::No && narrows_complete)
          return no({narrows, goal, "forced by singleton refinements"},
                    "goal is false under the only permitted assignment");
        if (tv == Tri::No) inconclusive = true;
      }
    }

    // (3) hypothesis match, modulo embedded-term normalization and prover
    // wrapper casts, against every refinement layer in scope.
    auto canon = [&](const TermPtr& e) {
      return strip_wrapper_casts(
          normalize_embedded(strip_wrapper_casts(e), sig, cfg.conv_budget)
              .first);
    };
    TermPtr cg = canon(goal);
    for (const auto& h : hyps)
      for (const auto& p : h.preds)
        if (alpha_eq(canon(p), cg)) return yes("hypothesis " + h.var);

    // (4) boolean enumeration when every term binding is boolean.
    bool all_bool = true;
    for (const auto& h : hyps) {
      const TBase* b = base_skeleton(h.type);
      if (!b || b->name != "Bool") all_bool = false;
    }
    if (all_bool && !goal_has_tyvars && hyps.size() <= cfg.max_enum_vars) {
      bool complete = true;
      for (std::size_t bits = 0; bits < (std::size_t{1} << hyps.size());
           ++bits) {
        Assignment as;
        for (std::size_t i = 0; i < hyps.size(); ++i)
          as.emplace_back(hyps[i].var, cbool((bits >> i) & 1));
        bool feasible = true;
        for (const auto& h : hyps) {
          for (const auto& p : h.preds) {
            Tri tv = truth(apply_assignment(p, as));
            if (tv == Tri::No) feasible = false;
            if (tv == Tri::Unknown) {
              feasible = false;
              complete = false;
            }
          }
        }
        if (!feasible) continue;
        Tri tv = truth(apply_assignment(goal, as));
        if (tv == Tri::No)
          return no({as, goal, "found by boolean enumeration"},
                    "goal fails under " + show_assignment(as));
        if (tv == Tri::Unknown) complete = false;
      }
      if (complete)
        return yes("boolean enumeration over " +
                   std::to_string(hyps.size()) + " binding(s)");
      inconclusive = true;
    }

    // (5) integer bounds over atomic comparisons, plus primality implying
    // a lower bound of two.
    if (cfg.int_bounds) {
      std::map<std::string, IB> bounds;
      for (const auto& h : hyps)
        if (const TBase* b = base_skeleton(h.type); b && b->name == "Int")
          for (const auto& p : h.preds) harvest(p, bounds);
      TermPtr sg = strip_wrapper_casts(goal);
      if (prove_from_bounds(sg, bounds))
        return yes("integer bounds");
      // Singleton intervals force values; try substituting them.
      Assignment singles;
      for (const auto& [x, b] : bounds)
        if (b.lo && b.hi && *b.lo == *b.hi) singles.emplace_back(x, cint(*b.lo));
      if (!singles.empty() && !goal_has_tyvars) {
        TermPtr g = apply_assignment(goal, singles);
        if (is_closed(g) && truth(g) == Tri::Yes)
          return yes("integer bounds pin " + show_assignment(singles));
      }
    }

    // (6) sampling for a refutation: random feasible assignments.
    bool can_sample = !goal_has_tyvars;
    for (const auto& h : hyps) {
      const TBase* b = base_skeleton(h.type);
      if (!b) can_sample = false;
    }
    if (can_sample) {
      const std::vector<std::int64_t> pool = {0,  1,  -1, 2,  -2, 3, -3,
                                              5,  -5, 7,  -7, 13, -13};
      std::mt19937_64 rng(cfg.seed);
      int total = cfg.sample_trials + static_cast<int>(pool.size()) * 2;
      for (int t = 0; t < total; ++t) {
        Assignment as;
        for (const auto& h : hyps) {
          const TBase* b = base_skeleton(h.type);
          if (b->name == "Bool") {
            bool v = t < static_cast<int>(pool.size()) * 2
                         ? (t % 2 == 0)
                         : rng() % 2 == 0;
            as.emplace_back(h.var, cbool(v));
          } else {
            std::int64_t v =
                t < static_cast<int>(pool.size()) * 2
                    ? pool[t / 2]
                    : static_cast<std::int64_t>(rng() % 201) - 100;
            as.emplace_back(h.var, cint(v));
          }
        }
        bool feasible = true;
        for (const auto& h : hyps)
          for (const auto& p : h.preds)
            if (feasible && truth(apply_assignment(p, as)) != Tri::Yes)
              feasible = false;
        if (!feasible) continue;
        if (truth(apply_assignment(goal, as)) == Tri::No)
          return no({as, goal,
                     "sampling trial " + std::to_string(t) + ", seed " +
                         std::to_string(cfg.seed)},
                    "goal fails under " + show_assignment(as));
      }
    }

    return {Tri::Unknown, "", std::nullopt,
            "no tactic proved the goal and sampling found no counterexample"};
  }
};

std::string indent(const std::string& s) {
  std::string out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out += "  " + line + "\n";
  if (!out.empty()) out.pop_back();
  return out;
}

struct SubProver {
  const Signature& sig;
  ProverConfig cfg;

  SubtypeVerdict sub(const Context& ctx, const TypePtr& a, const TypePtr& b) {
    // Refined target first: the hypothesis keeps the source refinements.
    if (const auto* rb = std::get_if<TRefine>(&b->v)) {
      SubtypeVerdict base = sub(ctx, a, rb->base);
      if (base.verdict == Tri::No) {
        base.reason = "target base: " + base.reason;
        return base;
      }
      auto avoid = names_of(ctx);
      for (const auto& s :
           {free_term_vars(rb->pred), free_term_vars(a), free_term_vars(b)})
        avoid.insert(s.begin(), s.end());
      std::string x = fresh_name(rb->var, avoid);
      Context c2 = ctx_extend(ctx, x, a);
      TermPtr goal = subst_term(
          rb->pred, rb->var, app(cast(a, rb->base, kSubLabel), fh::var(x)));
      Prover p{sig, cfg};
      SubtypeVerdict sat = p.satisfies(c2, goal);
      if (sat.verdict == Tri::No) {
        sat.reason = "refinement goal: " + sat.reason;
        return sat;
      }
      if (base.verdict == Tri::Yes && sat.verdict == Tri::Yes)
        return {Tri::Yes,
                "refine-r " + x + "\n" + indent(base.derivation) + "\n" +
                    indent("goal: " + sat.derivation),
                std::nullopt, ""};
      return {Tri::Unknown, "", std::nullopt,
              base.verdict != Tri::Yes ? base.reason : sat.reason};
    }
    // Refined source against an unrefined target drops a layer.
    if (const auto* ra = std::get_if<TRefine>(&a->v)) {
      SubtypeVerdict inner = sub(ctx, ra->base, b);
      if (inner.verdict == Tri::Yes)
        inner.derivation = "refine-l\n" + indent(inner.derivation);
      return inner;
    }
    return std::visit(
        overloaded{
            [&](const TBase& na) -> SubtypeVerdict {
              const auto* nb = std::get_if<TBase>(&b->v);
              if (nb && nb->name == na.name)
                return {Tri::Yes, "base " + na.name, std::nullopt, ""};
              return {Tri::No, "", std::nullopt,
                      "base type " + na.name + " vs " + print_type(b)};
            },
            [&](const TVar& na) -> SubtypeVerdict {
              const auto* nb = std::get_if<TVar>(&b->v);
              if (nb && nb->name == na.name)
                return {Tri::Yes, "tyvar " + na.name, std::nullopt, ""};
              return {Tri::No, "", std::nullopt,
                      "type variable " + na.name + " vs " + print_type(b)};
            },
            [&](const TFun& na) -> SubtypeVerdict {
              const auto* nb = std::get_if<TFun>(&b->v);
              if (!nb)
                return {Tri::No, "", std::nullopt,
                        "function vs " + print_type(b)};
              SubtypeVerdict dom = sub(ctx, nb->dom, na.dom);
              if (dom.verdict == Tri::No) {
                dom.reason = "domain (contravariant): " + dom.reason;
                return dom;
              }
              auto avoid = names_of(ctx);
              for (const auto& s :
                   {free_term_vars(na.cod), free_term_vars(nb->cod),
                    free_term_vars(na.dom), free_term_vars(nb->dom)})
                avoid.insert(s.begin(), s.end());
              std::string x = fresh_name(nb->var, avoid);
              Context c2 = ctx_extend(ctx, x, nb->dom);
              TypePtr codA = subst_term(
                  na.cod, na.var,
                  app(cast(nb->dom, na.dom, kSubLabel), fh::var(x)));
              TypePtr codB = subst_term(nb->cod, nb->var, fh::var(x));
              SubtypeVerdict cod = sub(c2, codA, codB);
              if (cod.verdict == Tri::No) {
                cod.reason = "codomain: " + cod.reason;
                return cod;
              }
              if (dom.verdict == Tri::Yes && cod.verdict == Tri::Yes)
                return {Tri::Yes,
                        "fun " + x + "\n" + indent("dom: " + dom.derivation) +
                            "\n" + indent("cod: " + cod.derivation),
                        std::nullopt, ""};
              return {Tri::Unknown, "", std::nullopt,
                      dom.verdict != Tri::Yes ? dom.reason : cod.reason};
            },
            [&](const TForall& na) -> SubtypeVerdict {
              const auto* nb = std::get_if<TForall>(&b->v);
              if (!nb)
                return {Tri::No, "", std::nullopt,
                        "polymorphic vs " + print_type(b)};
              auto avoid = names_of(ctx);
              for (const auto& s :
                   {free_type_vars(na.body), free_type_vars(nb->body)})
                avoid.insert(s.begin(), s.end());
              std::string v = fresh_name(nb->var, avoid);
              Context c2 = ctx_extend(ctx, v, nullptr);
              SubtypeVerdict body =
                  sub(c2, subst_type(na.body, na.var, tvar(v)),
                      subst_type(nb->body, nb->var, tvar(v)));
              if (body.verdict == Tri::Yes)
                body.derivation = "forall " + v + "\n" + indent(body.derivation);
              return body;
            },
            [&](const TRefine&) -> SubtypeVerdict {
              return {Tri::Unknown, "", std::nullopt, "unreachable"};
            },
        },
        a->v);
  }
};

}  // namespace

SubtypeVerdict satisfies(const Context& ctx, const TermPtr& goal,
                         const Signature& sig, const ProverConfig& cfg) {
  Prover p{sig, cfg};
  return p.satisfies(ctx, goal);
}

SubtypeVerdict subtype(const Context& ctx, const TypePtr& sub,
                       const TypePtr& super, const Signature& sig,
                       const ProverConfig& cfg) {
  SubProver p{sig, cfg};
  return p.sub(ctx, sub, super);
}

std::string explain(const SubtypeVerdict& v) {
  switch (v.verdict) {
    case Tri::Yes:
      return "yes\n" + indent(v.derivation);
    case Tri::No: {
      std::string s = "no: " + v.reason;
      if (v.witness) {
        s += "\n  assignment " + show_assignment(v.witness->assignment);
        s += "\n  goal " + print_term(v.witness->goal);
        if (!v.witness->detail.empty()) s += "\n  (" + v.witness->detail + ")";
      }
      return s;
    }
    case Tri::Unknown:
      return "unknown: " + v.reason;
  }
  return "?";
}

}  // namespace fh
