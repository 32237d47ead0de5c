#include "fh/harness.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "fh/printer.hpp"

namespace fh {
namespace {

std::string gen_label(Rng& rng) { return "l" + std::to_string(rng.pick(97)); }

std::set<std::string> all_names(const Context& ctx) {
  std::set<std::string> s;
  for (const auto& en : ctx) s.insert(en.name);
  return s;
}

std::vector<std::string> vars_at(const Context& ctx, const TypePtr& t) {
  std::vector<std::string> out;
  for (const auto& en : ctx)
    if (en.type && alpha_eq(en.type, t)) out.push_back(en.name);
  return out;
}

// Refinement pool; `x` is the binder occurrence, already at plain Int/Bool.
TermPtr int_pred_on(Rng& rng, const TermPtr& x) {
  switch (rng.pick(8)) {
    case 0: return cbool(true);
    case 1: return opapp("gt", {x, cint(0)});
    case 2: return opapp("ge", {x, cint(0)});
    case 3: return opapp("neq", {x, cint(0)});
    case 4: return opapp("eqInt", {x, cint(rng.small_int())});
    case 5: return opapp("prime?", {x});
    case 6:
      return opapp("and",
                   {opapp("gt", {x, cint(0)}), opapp("lt", {x, cint(10)})});
    default:
      return opapp("or",
                   {opapp("lt", {x, cint(0)}), opapp("gt", {x, cint(3)})});
  }
}

TermPtr bool_pred_on(Rng& rng, const TermPtr& x) {
  switch (rng.pick(4)) {
    case 0: return cbool(true);
    case 1: return x;
    case 2: return opapp("not", {x});
    default: return opapp("eqBool", {x, cbool(rng.coin())});
  }
}

TermPtr int_pred(Rng& rng, const std::string& x) {
  return int_pred_on(rng, var(x));
}
TermPtr bool_pred(Rng& rng, const std::string& x) {
  return bool_pred_on(rng, var(x));
}

// A second refinement layer over an already refined base: the binder has the
// refined type, so its occurrences go through a forget cast back to the
// skeleton before any operation sees them.
TypePtr outer_layer(Rng& rng, const TypePtr& inner, bool on_int) {
  TypePtr skel = unref(inner);
  TermPtr occ = app(cast(inner, skel, gen_label(rng)), var("y"));
  TermPtr pred = on_int ? int_pred_on(rng, occ) : bool_pred_on(rng, occ);
  return trefine("y", inner, pred);
}

// A constant that passes every refinement layer of `target`, if the small
// candidate pool holds one. Keeps generated casts from blaming constantly.
std::optional<TermPtr> satisfying_const(Rng& rng, const TypePtr& target,
                                        const Signature& sig) {
  TypePtr skel = unref(target);
  const auto* b = std::get_if<TBase>(&skel->v);
  if (!b) return std::nullopt;
  std::vector<TermPtr> cands;
  if (b->name == "Int") {
    static const std::int64_t pool[] = {0, 1,  2,  3,  5,  7,  11,
                                        13, -1, -2, -3, -7, 4,  6};
    const std::size_t n = sizeof(pool) / sizeof(pool[0]);
    std::size_t off = rng.pick(n);
    for (std::size_t i = 0; i < n; ++i) cands.push_back(cint(pool[(off + i) % n]));
  } else {
    bool first = rng.coin();
    cands.push_back(cbool(first));
    cands.push_back(cbool(!first));
  }
  auto layers = refines(target);
  for (const auto& c : cands) {
    bool ok = true;
    for (const auto& lay : layers) {
      Outcome o = evaluate(app(lay, c), sig, 2048);
      if (o.kind != Outcome::Kind::Value || !is_true(o.result)) {
        ok = false;
        break;
      }
    }
    if (ok) return c;
  }
  return std::nullopt;
}

struct Gen {
  Rng& rng;
  const Signature& sig;

  // Operations whose result is the wanted base and whose parameters are all
  // plain bases; those synthesize exactly regardless of argument terms.
  std::optional<TermPtr> base_op(const Context& ctx, const std::string& bname,
                                 int size) {
    std::vector<const OpSig*> ops;
    for (const auto& [n, op] : sig.ops) {
      const auto* rb = std::get_if<TBase>(&op.result->v);
      if (!rb || rb->name != bname || op.params.empty()) continue;
      bool plain = true;
      for (const auto& [pn, pt] : op.params)
        if (!std::get_if<TBase>(&pt->v)) { plain = false; break; }
      if (!plain || static_cast<int>(op.params.size()) + 1 > size) continue;
      ops.push_back(&op);
    }
    if (ops.empty()) return std::nullopt;
    const OpSig* op = ops[rng.pick(ops.size())];
    int per = std::max(1, (size - 1) / static_cast<int>(op->params.size()));
    std::vector<TermPtr> args;
    for (const auto& [pn, pt] : op->params) {
      auto a = go(ctx, pt, per);
      if (!a) return std::nullopt;
      args.push_back(*a);
    }
    return opapp(op->name, std::move(args));
  }

  // Generated terms synthesize exactly the target type, by construction.
  std::optional<TermPtr> go(const Context& ctx, const TypePtr& target,
                            int size) {
    if (size < 1) size = 1;
    return std::visit(
        overloaded{
            [&](const TBase& b) -> std::optional<TermPtr> {
              auto leaf = [&]() -> TermPtr {
                auto vs = vars_at(ctx, target);
                if (!vs.empty() && rng.coin()) return var(vs[rng.pick(vs.size())]);
                return b.name == "Int" ? cint(rng.small_int()) : cbool(rng.coin());
              };
              if (size <= 2) return leaf();
              for (int attempt = 0; attempt < 3; ++attempt) {
                switch (rng.pick(6)) {
                  case 0:
                  case 1: return leaf();
                  case 2: {
                    if (auto r = base_op(ctx, b.name, size)) return r;
                    break;
                  }
                  case 3: {  // (fun (u:D) body) arg
                    if (size < 4) break;
                    TypePtr d = rng.coin() ? tbase("Int") : tbase("Bool");
                    std::string u = fresh_name("u", all_names(ctx));
                    auto body = go(ctx_extend(ctx, u, d), target, size - 3);
                    auto arg = go(ctx, d, 2);
                    if (body && arg) return app(lam(u, d, *body), *arg);
                    break;
                  }
                  case 4: {  // round-trip through a refinement of this base
                    if (size < 5) break;
                    TermPtr pred = b.name == "Int" ? int_pred(rng, "x")
                                                   : bool_pred(rng, "x");
                    TypePtr r = trefine("x", target, pred);
                    auto inner = go(ctx, target, size - 4);
                    if (!inner) break;
                    return app(cast(r, target, gen_label(rng)),
                               app(cast(target, r, gen_label(rng)), *inner));
                  }
                  case 5: {  // (tyfun (a) e) [Int], a unused
                    if (size < 3) break;
                    std::string a = fresh_name("a", all_names(ctx));
                    auto body = go(ctx_extend(ctx, a, nullptr), target, size - 2);
                    if (body) return tyapp(tylam(a, *body), tbase("Int"));
                    break;
                  }
                }
              }
              return leaf();
            },
            [&](const TVar&) -> std::optional<TermPtr> {
              auto vs = vars_at(ctx, target);
              if (vs.empty()) return std::nullopt;
              return var(vs[rng.pick(vs.size())]);
            },
            [&](const TFun& f) -> std::optional<TermPtr> {
              auto vs = vars_at(ctx, target);
              if (!vs.empty() && rng.pick(3) == 0)
                return var(vs[rng.pick(vs.size())]);
              bool nondep = free_term_vars(f.cod).count(f.var) == 0;
              bool castable = nondep && compatible(f.dom, f.cod);
              if (castable && rng.pick(3) == 0)
                return cast(f.dom, f.cod, gen_label(rng));
              std::string base = f.var == "_" ? "x" : f.var;
              std::string x = fresh_name(base, all_names(ctx));
              TypePtr cod = x == f.var ? f.cod : subst_term(f.cod, f.var, var(x));
              if (auto body = go(ctx_extend(ctx, x, f.dom), cod, size - 1))
                return lam(x, f.dom, *body);
              if (castable) return cast(f.dom, f.cod, gen_label(rng));
              return std::nullopt;
            },
            [&](const TForall& q) -> std::optional<TermPtr> {
              auto vs = vars_at(ctx, target);
              if (!vs.empty() && rng.pick(3) == 0)
                return var(vs[rng.pick(vs.size())]);
              std::string a = fresh_name(q.var, all_names(ctx));
              TypePtr bt = a == q.var ? q.body : subst_type(q.body, q.var, tvar(a));
              if (auto body = go(ctx_extend(ctx, a, nullptr), bt, size - 1))
                return tylam(a, *body);
              return std::nullopt;
            },
            [&](const TRefine&) -> std::optional<TermPtr> {
              auto vs = vars_at(ctx, target);
              if (!vs.empty() && rng.pick(3) == 0)
                return var(vs[rng.pick(vs.size())]);
              TypePtr skel = unref(target);
              std::string l = gen_label(rng);
              if (rng.pick(4) != 0)
                if (auto c = satisfying_const(rng, target, sig))
                  return app(cast(skel, target, l), *c);
              auto inner = go(ctx, skel, std::max(1, size - 2));
              if (!inner) return std::nullopt;
              return app(cast(skel, target, l), *inner);
            },
        },
        target->v);
  }
};

}  // namespace

TypePtr gen_type(Rng& rng, int depth, const std::vector<std::string>& tyvars) {
  if (depth <= 0) {
    if (!tyvars.empty() && rng.pick(4) == 0)
      return tvar(tyvars[rng.pick(tyvars.size())]);
    return rng.coin() ? tbase("Int") : tbase("Bool");
  }
  switch (rng.pick(10)) {
    case 0:
    case 1:
    case 2: return gen_type(rng, 0, tyvars);
    case 3:
    case 4:
    case 5: {
      bool on_int = rng.pick(3) != 0;
      TypePtr t = on_int ? trefine("x", tbase("Int"), int_pred(rng, "x"))
                         : trefine("x", tbase("Bool"), bool_pred(rng, "x"));
      if (depth >= 2 && rng.pick(4) == 0) t = outer_layer(rng, t, on_int);
      return t;
    }
    case 6:
    case 7:
    case 8: {
      TypePtr dom = gen_type(rng, depth - 1, tyvars);
      const auto* db = std::get_if<TBase>(&dom->v);
      if (db && db->name == "Int" && rng.pick(5) == 0) {
        TermPtr pred = rng.coin() ? opapp("ge", {var("y"), var("x")})
                                  : opapp("eqInt", {var("y"), var("x")});
        return tfun("x", dom, trefine("y", tbase("Int"), pred));
      }
      return tfun("_", dom, gen_type(rng, depth - 1, tyvars));
    }
    default: {
      std::set<std::string> avoid(tyvars.begin(), tyvars.end());
      std::string a = fresh_name("a", avoid);
      auto scope = tyvars;
      scope.push_back(a);
      return tforall(a, gen_type(rng, depth - 1, scope));
    }
  }
}

TypePtr redecorate(Rng& rng, const TypePtr& skel) {
  return std::visit(
      overloaded{
          [&](const TBase& b) -> TypePtr {
            if (rng.pick(3) == 0) return skel;
            TypePtr t = b.name == "Int"
                            ? trefine("x", skel, int_pred(rng, "x"))
                            : trefine("x", skel, bool_pred(rng, "x"));
            if (rng.pick(5) == 0) t = outer_layer(rng, t, b.name == "Int");
            return t;
          },
          [&](const TVar&) -> TypePtr { return skel; },
          [&](const TFun& f) -> TypePtr {
            TypePtr t = tfun(f.var, redecorate(rng, f.dom),
                             redecorate(rng, f.cod));
            if (rng.pick(6) == 0) t = trefine("f", t, cbool(true));
            return t;
          },
          [&](const TForall& q) -> TypePtr {
            return tforall(q.var, redecorate(rng, q.body));
          },
          [&](const TRefine& r) -> TypePtr {
            return trefine(r.var, redecorate(rng, r.base), r.pred);
          },
      },
      skel->v);
}

std::optional<TermPtr> gen_term(Rng& rng, const Context& ctx,
                                const TypePtr& target, const Signature& sig,
                                int size) {
  Gen g{rng, sig};
  return g.go(ctx, target, size);
}

std::optional<GenTerm> gen_well_typed(Rng& rng, const Signature& sig, int size,
                                      int attempts) {
  Gen g{rng, sig};
  for (int i = 0; i < attempts; ++i) {
    TypePtr t = gen_type(rng, static_cast<int>(rng.pick(4)));
    if (auto e = g.go({}, t, size)) return GenTerm{t, *e};
  }
  return std::nullopt;
}

StaticContext gen_static_context(Rng& rng, const TypePtr& hole_type,
                                 const Signature& sig, int size) {
  Gen g{rng, sig};
  TermPtr body = var(kHoleVar);
  TypePtr cur = hole_type;

  // One frame layer; returns false when nothing applies any more.
  auto wrap = [&](bool finishing) -> bool {
    if (const auto* b = std::get_if<TBase>(&cur->v)) {
      if (finishing) return false;  // already at a base result
      if (b->name == "Int") {
        switch (rng.pick(5)) {
          case 0: {  // arithmetic frame, hole at either side
            static const char* arith[] = {"add", "sub", "mul"};
            const char* op = arith[rng.pick(3)];
            TermPtr k = cint(rng.small_int());
            body = rng.coin() ? opapp(op, {body, k}) : opapp(op, {k, body});
            return true;
          }
          case 1: {  // comparison frame
            static const char* cmp[] = {"eqInt", "neq", "lt", "le", "gt", "ge"};
            const char* op = cmp[rng.pick(6)];
            TermPtr k = cint(rng.small_int());
            body = rng.coin() ? opapp(op, {body, k}) : opapp(op, {k, body});
            cur = tbase("Bool");
            return true;
          }
          default: {  // observer application: (fun (z:Int) e) []
            TypePtr tgt = rng.coin() ? tbase("Int") : tbase("Bool");
            auto inner = g.go({{"z", cur}}, tgt, 3);
            if (!inner) return false;
            body = app(lam("z", cur, *inner), body);
            cur = tgt;
            return true;
          }
        }
      }
      switch (rng.pick(4)) {
        case 0: body = opapp("not", {body}); return true;
        case 1:
          body = rng.coin() ? opapp("and", {body, cbool(true)})
                            : opapp("and", {cbool(rng.coin()), body});
          return true;
        case 2:
          body = rng.coin() ? opapp("or", {body, cbool(false)})
                            : opapp("or", {cbool(rng.coin()), body});
          return true;
        default: body = opapp("eqBool", {body, cbool(rng.coin())}); return true;
      }
    }
    if (std::get_if<TRefine>(&cur->v)) {
      // observer that forgets the refinement: (fun (z:T) <T => B>^l z) []
      TypePtr skel = unref(cur);
      TermPtr z = var("z");
      body = app(lam("z", cur, app(cast(cur, skel, gen_label(rng)), z)), body);
      cur = skel;
      return true;
    }
    if (const auto* f = std::get_if<TFun>(&cur->v)) {
      if (auto arg = g.go({}, f->dom, 4)) {
        body = app(body, *arg);
        cur = subst_term(f->cod, f->var, *arg);
        return true;
      }
      body = app(lam("z", cur, cint(0)), body);  // discard observer
      cur = tbase("Int");
      return true;
    }
    if (const auto* q = std::get_if<TForall>(&cur->v)) {
      body = tyapp(body, tbase("Int"));
      cur = subst_type(q->body, q->var, tbase("Int"));
      return true;
    }
    // Type-variable holes cannot arise from closed hole types; discard.
    body = app(lam("z", cur, cint(0)), body);
    cur = tbase("Int");
    return true;
  };

  int frames = 1 + static_cast<int>(rng.pick(
                       static_cast<std::size_t>(std::max(1, size / 2))));
  for (int i = 0; i < frames; ++i)
    if (!wrap(false)) break;
  // Drive the result down to a base skeleton so constants are comparable.
  for (int i = 0; i < 8 && !std::get_if<TBase>(&unref(cur)->v); ++i)
    if (!wrap(true)) break;
  return {body, cur};
}

TermPtr plug_context(const StaticContext& c, const TermPtr& e) {
  return subst_term(c.body, kHoleVar, e);
}

std::optional<ClosingSubst> gen_closing_subst(Rng& rng, const Context& ctx,
                                              const Signature& sig,
                                              int value_size, int attempts) {
  Gen g{rng, sig};
  ClosingSubst s;
  for (const auto& en : ctx) {
    if (!en.type) {
      TypePtr t;
      switch (rng.pick(5)) {
        case 0: t = tbase("Bool"); break;
        case 1:
          t = trefine("x", tbase("Int"), opapp("gt", {var("x"), cint(0)}));
          break;
        default: t = tbase("Int"); break;
      }
      s.types.emplace_back(en.name, t);
      continue;
    }
    TypePtr t = apply_subst(s, en.type);
    TypePtr skel = unref(t);
    bool found = false;
    for (int i = 0; i < attempts && !found; ++i) {
      TermPtr cand;
      if (const auto* b = std::get_if<TBase>(&skel->v)) {
        cand = b->name == "Int" ? cint(rng.small_int()) : cbool(rng.coin());
      } else if (std::get_if<TVar>(&skel->v)) {
        break;  // no closed value inhabits a free type variable
      } else {
        auto got = g.go({}, skel, value_size);
        if (!got || !is_value(*got)) continue;
        cand = *got;
      }
      bool ok = true;
      for (const auto& lay : refines(t)) {
        Outcome o = evaluate(app(lay, cand), sig, 2048);
        if (o.kind != Outcome::Kind::Value || !is_true(o.result)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        s.values.emplace_back(en.name, cand);
        found = true;
      }
    }
    if (!found) return std::nullopt;
  }
  return s;
}

TermPtr apply_subst(const ClosingSubst& s, TermPtr e) {
  for (const auto& [a, t] : s.types) e = subst_type(e, a, t);
  for (const auto& [x, v] : s.values) e = subst_term(e, x, v);
  return e;
}

TypePtr apply_subst(const ClosingSubst& s, TypePtr t) {
  for (const auto& [a, ty] : s.types) t = subst_type(t, a, ty);
  for (const auto& [x, v] : s.values) t = subst_term(t, x, v);
  return t;
}

std::string show_subst(const ClosingSubst& s) {
  std::string out;
  for (const auto& [a, t] : s.types) {
    if (!out.empty()) out += "; ";
    out += a + " := " + print_type(t);
  }
  for (const auto& [x, v] : s.values) {
    if (!out.empty()) out += "; ";
    out += x + " := " + print_term(v);
  }
  return out.empty() ? "(empty)" : out;
}

std::string outcome_string(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Value: return "value " + print_term(o.result);
    case Outcome::Kind::Blame: return "blame " + o.label;
    case Outcome::Kind::Stuck: return "stuck " + print_term(o.result);
    default: return "fuel-exhausted";
  }
}

ObsResult obs_equiv(const TermPtr& e1, const TermPtr& e2, const Signature& sig,
                    std::size_t fuel) {
  Outcome a = evaluate(e1, sig, fuel);
  Outcome b = evaluate(e2, sig, fuel);
  std::string d = outcome_string(a) + " vs " + outcome_string(b);
  if (a.kind == Outcome::Kind::FuelExhausted ||
      b.kind == Outcome::Kind::FuelExhausted)
    return {Obs::Inconclusive, d};
  if (a.kind != b.kind) return {Obs::Differ, d};
  if (a.kind == Outcome::Kind::Blame && a.label != b.label)
    return {Obs::Differ, d};
  return {Obs::Equal, d};
}

EquivReport ciu_test(const Context& ctx, const TypePtr& type,
                     const TermPtr& e1, const TermPtr& e2,
                     const Signature& sig, const CiuConfig& cfg) {
  EquivReport rep;
  TcResult tc = typecheck(ctx, e1, sig);
  if (!tc.ok() || conv_equiv(*tc.type, type, sig, 2048) != Tri::Yes) {
    rep.witnesses.push_back({-1, "(precondition)", "",
                             "left term does not typecheck at the stated type",
                             tc.message});
    return rep;
  }
  Rng rng(cfg.seed);
  for (int t = 0; t < cfg.trials; ++t) {
    ++rep.trials;
    auto sub = gen_closing_subst(rng, ctx, sig, cfg.subst_size);
    if (!sub) {
      ++rep.inconclusive;
      continue;
    }
    TypePtr ts = apply_subst(*sub, type);
    StaticContext c = gen_static_context(rng, ts, sig, cfg.ctx_size);
    Outcome a = evaluate(plug_context(c, apply_subst(*sub, e1)), sig, cfg.fuel);
    Outcome b = evaluate(plug_context(c, apply_subst(*sub, e2)), sig, cfg.fuel);
    if (a.kind == Outcome::Kind::FuelExhausted ||
        b.kind == Outcome::Kind::FuelExhausted) {
      ++rep.inconclusive;
      continue;
    }
    bool differ = a.kind != b.kind ||
                  (a.kind == Outcome::Kind::Blame && a.label != b.label);
    if (!differ && a.kind == Outcome::Kind::Value) {
      TypePtr rskel = unref(c.result);
      if (std::get_if<TBase>(&rskel->v)) {
        bool ca = is_const(a.result), cb = is_const(b.result);
        if (ca != cb || (ca && !alpha_eq(a.result, b.result))) differ = true;
      }
    }
    if (differ)
      rep.witnesses.push_back({t, print_term(c.body), show_subst(*sub),
                               outcome_string(a), outcome_string(b)});
    else
      ++rep.agreements;
  }
  return rep;
}

EquivReport cotermination_test(const Signature& sig, int trials,
                               std::size_t fuel, std::uint64_t seed) {
  EquivReport rep;
  Rng rng(seed);
  int guard = trials * 40;
  while (rep.trials < trials && guard-- > 0) {
    auto gt = gen_well_typed(rng, sig, 7);
    if (!gt) continue;
    StepResult sr = step(gt->term, sig, 0);
    if (sr.kind != StepResult::Kind::Stepped) continue;
    TermPtr e1 = gt->term, e2 = sr.term;
    Context hctx = {{"x", gt->type}};
    TermPtr e;
    bool have = false;
    for (int k = 0; k < 3 && !have; ++k) {
      auto cand = gen_term(rng, hctx, gen_type(rng, 2), sig, 8);
      if (!cand) continue;
      if (k < 2 && free_term_vars(*cand).count("x") == 0) continue;
      e = *cand;
      have = true;
    }
    if (!have) continue;
    ++rep.trials;
    Outcome a = evaluate(subst_term(e, "x", e1), sig, fuel);
    Outcome b = evaluate(subst_term(e, "x", e2), sig, fuel);
    if (a.kind == Outcome::Kind::FuelExhausted ||
        b.kind == Outcome::Kind::FuelExhausted) {
      ++rep.inconclusive;
      continue;
    }
    bool differ = a.kind != b.kind ||
                  (a.kind == Outcome::Kind::Blame && a.label != b.label);
    if (!differ && a.kind == Outcome::Kind::Value && is_const(a.result) &&
        is_const(b.result)) {
      const auto* ka = std::get_if<Const>(&a.result->v);
      const auto* kb = std::get_if<Const>(&b.result->v);
      if (std::get_if<bool>(&ka->k) && std::get_if<bool>(&kb->k) &&
          !alpha_eq(a.result, b.result))
        differ = true;  // Bool observations must agree on the constant
    }
    if (differ)
      rep.witnesses.push_back({rep.trials - 1, print_term(e),
                               "x := " + print_term(e1) + " ~> " + print_term(e2),
                               outcome_string(a), outcome_string(b)});
    else
      ++rep.agreements;
  }
  return rep;
}

namespace {

void splits_go(const TermPtr& e, const Signature& sig,
               std::vector<Frame>& prefix, std::vector<Split>& out) {
  if (std::get_if<Blame>(&e->v)) {
    if (!prefix.empty()) out.push_back({EvalContext{prefix}, e, true});
    return;
  }
  if (reduce(e, sig, 0)) out.push_back({EvalContext{prefix}, e, false});
  std::visit(
      overloaded{
          [&](const OpApp& o) {
            for (std::size_t i = 0; i < o.args.size(); ++i) {
              bool left_vals = true;
              for (std::size_t j = 0; j < i; ++j)
                if (!is_value(o.args[j])) { left_vals = false; break; }
              if (!left_vals) break;
              std::vector<TermPtr> L(o.args.begin(), o.args.begin() + i);
              std::vector<TermPtr> R(o.args.begin() + i + 1, o.args.end());
              prefix.push_back(FrameOp{o.op, std::move(L), std::move(R)});
              splits_go(o.args[i], sig, prefix, out);
              prefix.pop_back();
            }
          },
          [&](const App& a) {
            prefix.push_back(FrameAppL{a.arg});
            splits_go(a.fn, sig, prefix, out);
            prefix.pop_back();
            if (is_value(a.fn)) {
              prefix.push_back(FrameAppR{a.fn});
              splits_go(a.arg, sig, prefix, out);
              prefix.pop_back();
            }
          },
          [&](const TyApp& ta) {
            prefix.push_back(FrameTyApp{ta.arg});
            splits_go(ta.fn, sig, prefix, out);
            prefix.pop_back();
          },
          [&](const Wait& w) {
            prefix.push_back(FrameWait{w.ref, w.label});
            splits_go(w.subject, sig, prefix, out);
            prefix.pop_back();
          },
          [&](const Active& ac) {
            prefix.push_back(FrameActive{ac.ref, ac.value, ac.label});
            splits_go(ac.state, sig, prefix, out);
            prefix.pop_back();
          },
          [&](const auto&) {},
      },
      e->v);
}

}  // namespace

std::vector<Split> all_splits(const TermPtr& e, const Signature& sig) {
  std::vector<Split> out;
  std::vector<Frame> prefix;
  splits_go(e, sig, prefix, out);
  return out;
}

}  // namespace fh
