#include "fh/syntax.hpp"

#include <map>

namespace fh {

TypePtr tbase(std::string name) { return std::make_shared<TypeNode>(TypeNode{TBase{std::move(name)}}); }
TypePtr tvar(std::string name) { return std::make_shared<TypeNode>(TypeNode{TVar{std::move(name)}}); }
TypePtr tfun(std::string var, TypePtr dom, TypePtr cod) {
  return std::make_shared<TypeNode>(TypeNode{TFun{std::move(var), std::move(dom), std::move(cod)}});
}
TypePtr tforall(std::string var, TypePtr body) {
  return std::make_shared<TypeNode>(TypeNode{TForall{std::move(var), std::move(body)}});
}
TypePtr trefine(std::string var, TypePtr base, TermPtr pred) {
  return std::make_shared<TypeNode>(TypeNode{TRefine{std::move(var), std::move(base), std::move(pred)}});
}

TermPtr cbool(bool b) { return std::make_shared<TermNode>(TermNode{Const{ConstVal{b}}}); }
TermPtr cint(std::int64_t n) { return std::make_shared<TermNode>(TermNode{Const{ConstVal{n}}}); }
TermPtr var(std::string name) { return std::make_shared<TermNode>(TermNode{Var{std::move(name)}}); }
TermPtr lam(std::string var, TypePtr ann, TermPtr body) {
  return std::make_shared<TermNode>(TermNode{Lam{std::move(var), std::move(ann), std::move(body)}});
}
TermPtr tylam(std::string var, TermPtr body) {
  return std::make_shared<TermNode>(TermNode{TyLam{std::move(var), std::move(body)}});
}
TermPtr app(TermPtr fn, TermPtr arg) {
  return std::make_shared<TermNode>(TermNode{App{std::move(fn), std::move(arg)}});
}
TermPtr tyapp(TermPtr fn, TypePtr arg) {
  return std::make_shared<TermNode>(TermNode{TyApp{std::move(fn), std::move(arg)}});
}
TermPtr cast(TypePtr src, TypePtr tgt, std::string label) {
  return std::make_shared<TermNode>(TermNode{Cast{std::move(src), std::move(tgt), std::move(label)}});
}
TermPtr opapp(std::string op, std::vector<TermPtr> args) {
  return std::make_shared<TermNode>(TermNode{OpApp{std::move(op), std::move(args)}});
}
TermPtr wait(TypePtr ref, TermPtr subject, std::string label) {
  return std::make_shared<TermNode>(TermNode{Wait{std::move(ref), std::move(subject), std::move(label)}});
}
TermPtr active(TypePtr ref, TermPtr state, TermPtr value, std::string label) {
  return std::make_shared<TermNode>(
      TermNode{Active{std::move(ref), std::move(state), std::move(value), std::move(label)}});
}
TermPtr blame(std::string label) { return std::make_shared<TermNode>(TermNode{Blame{std::move(label)}}); }

TermPtr let_(std::string var, TypePtr ann, TermPtr bound, TermPtr body) {
  return app(lam(std::move(var), std::move(ann), std::move(body)), std::move(bound));
}

const CtxEntry* ctx_lookup(const Context& ctx, const std::string& name) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
    if (it->name == name) return &*it;
  return nullptr;
}

Context ctx_extend(Context ctx, std::string name, TypePtr type) {
  ctx.push_back(CtxEntry{std::move(name), std::move(type)});
  return ctx;
}

bool is_const(const TermPtr& e) { return std::holds_alternative<Const>(e->v); }
bool is_true(const TermPtr& e) {
  auto* c = std::get_if<Const>(&e->v);
  return c && std::holds_alternative<bool>(c->k) && std::get<bool>(c->k);
}
bool is_false(const TermPtr& e) {
  auto* c = std::get_if<Const>(&e->v);
  return c && std::holds_alternative<bool>(c->k) && !std::get<bool>(c->k);
}

bool is_value(const TermPtr& e) {
  return std::visit(overloaded{
                        [](const Const&) { return true; },
                        [](const Lam&) { return true; },
                        [](const TyLam&) { return true; },
                        [](const Cast&) { return true; },
                        [](const auto&) { return false; },
                    },
                    e->v);
}

namespace {

void ftv_term(const TermPtr& e, std::set<std::string>& bound, std::set<std::string>& out);
void ftv_type(const TypePtr& t, std::set<std::string>& bound, std::set<std::string>& out);

void fv_term(const TermPtr& e, std::set<std::string>& bound, std::set<std::string>& out);

void fv_type(const TypePtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(overloaded{
                 [](const TBase&) {},
                 [](const TVar&) {},
                 [&](const TFun& f) {
                   fv_type(f.dom, bound, out);
                   bool fresh = bound.insert(f.var).second;
                   fv_type(f.cod, bound, out);
                   if (fresh) bound.erase(f.var);
                 },
                 [&](const TForall& f) { fv_type(f.body, bound, out); },
                 [&](const TRefine& r) {
                   fv_type(r.base, bound, out);
                   bool fresh = bound.insert(r.var).second;
                   fv_term(r.pred, bound, out);
                   if (fresh) bound.erase(r.var);
                 },
             },
             t->v);
}

void fv_term(const TermPtr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(overloaded{
                 [](const Const&) {},
                 [&](const Var& v) {
                   if (!bound.count(v.name)) out.insert(v.name);
                 },
                 [&](const Lam& l) {
                   fv_type(l.ann, bound, out);
                   bool fresh = bound.insert(l.var).second;
                   fv_term(l.body, bound, out);
                   if (fresh) bound.erase(l.var);
                 },
                 [&](const TyLam& l) { fv_term(l.body, bound, out); },
                 [&](const App& a) {
                   fv_term(a.fn, bound, out);
                   fv_term(a.arg, bound, out);
                 },
                 [&](const TyApp& a) {
                   fv_term(a.fn, bound, out);
                   fv_type(a.arg, bound, out);
                 },
                 [&](const Cast& c) {
                   fv_type(c.src, bound, out);
                   fv_type(c.tgt, bound, out);
                 },
                 [&](const OpApp& o) {
                   for (auto& a : o.args) fv_term(a, bound, out);
                 },
                 [&](const Wait& w) {
                   fv_type(w.ref, bound, out);
                   fv_term(w.subject, bound, out);
                 },
                 [&](const Active& a) {
                   fv_type(a.ref, bound, out);
                   fv_term(a.state, bound, out);
                   fv_term(a.value, bound, out);
                 },
                 [](const Blame&) {},
             },
             e->v);
}

void ftv_type(const TypePtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(overloaded{
                 [](const TBase&) {},
                 [&](const TVar& v) {
                   if (!bound.count(v.name)) out.insert(v.name);
                 },
                 [&](const TFun& f) {
                   ftv_type(f.dom, bound, out);
                   ftv_type(f.cod, bound, out);
                 },
                 [&](const TForall& f) {
                   bool fresh = bound.insert(f.var).second;
                   ftv_type(f.body, bound, out);
                   if (fresh) bound.erase(f.var);
                 },
                 [&](const TRefine& r) {
                   ftv_type(r.base, bound, out);
                   ftv_term(r.pred, bound, out);
                 },
             },
             t->v);
}

void ftv_term(const TermPtr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(overloaded{
                 [](const Const&) {},
                 [](const Var&) {},
                 [&](const Lam& l) {
                   ftv_type(l.ann, bound, out);
                   ftv_term(l.body, bound, out);
                 },
                 [&](const TyLam& l) {
                   bool fresh = bound.insert(l.var).second;
                   ftv_term(l.body, bound, out);
                   if (fresh) bound.erase(l.var);
                 },
                 [&](const App& a) {
                   ftv_term(a.fn, bound, out);
                   ftv_term(a.arg, bound, out);
                 },
                 [&](const TyApp& a) {
                   ftv_term(a.fn, bound, out);
                   ftv_type(a.arg, bound, out);
                 },
                 [&](const Cast& c) {
                   ftv_type(c.src, bound, out);
                   ftv_type(c.tgt, bound, out);
                 },
                 [&](const OpApp& o) {
                   for (auto& a : o.args) ftv_term(a, bound, out);
                 },
                 [&](const Wait& w) {
                   ftv_type(w.ref, bound, out);
                   ftv_term(w.subject, bound, out);
                 },
                 [&](const Active& a) {
                   ftv_type(a.ref, bound, out);
                   ftv_term(a.state, bound, out);
                   ftv_term(a.value, bound, out);
                 },
                 [](const Blame&) {},
             },
             e->v);
}

}  // namespace

std::set<std::string> free_term_vars(const TermPtr& e) {
  std::set<std::string> bound, out;
  fv_term(e, bound, out);
  return out;
}
std::set<std::string> free_term_vars(const TypePtr& t) {
  std::set<std::string> bound, out;
  fv_type(t, bound, out);
  return out;
}
std::set<std::string> free_type_vars(const TermPtr& e) {
  std::set<std::string> bound, out;
  ftv_term(e, bound, out);
  return out;
}
std::set<std::string> free_type_vars(const TypePtr& t) {
  std::set<std::string> bound, out;
  ftv_type(t, bound, out);
  return out;
}
bool is_closed(const TermPtr& e) { return free_term_vars(e).empty() && free_type_vars(e).empty(); }

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string cand = base + "'" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

namespace {

// Shared renaming step for term binders: if the binder would capture a free
// variable of v (or shadow x in a way that blocks the walk), rename it.
struct TermSubst {
  const std::string& x;
  const TermPtr& v;
  std::set<std::string> fv_v;

  TermSubst(const std::string& x, const TermPtr& v) : x(x), v(v), fv_v(free_term_vars(v)) {}

  TermPtr term(const TermPtr& e) {
    return std::visit(
        overloaded{
            [&](const Const&) { return e; },
            [&](const Var& w) { return w.name == x ? v : e; },
            [&](const Lam& l) {
              auto ann = type(l.ann);
              if (l.var == x) return lam(l.var, ann, l.body);
              auto [b, body] = binder(l.var, l.body);
              return lam(b, ann, term(body));
            },
            [&](const TyLam& l) { return tylam(l.var, term(l.body)); },
            [&](const App& a) { return app(term(a.fn), term(a.arg)); },
            [&](const TyApp& a) { return tyapp(term(a.fn), type(a.arg)); },
            [&](const Cast& c) { return cast(type(c.src), type(c.tgt), c.label); },
            [&](const OpApp& o) {
              std::vector<TermPtr> args;
              args.reserve(o.args.size());
              for (auto& a : o.args) args.push_back(term(a));
              return opapp(o.op, std::move(args));
            },
            [&](const Wait& w) { return wait(type(w.ref), term(w.subject), w.label); },
            [&](const Active& a) { return active(type(a.ref), term(a.state), term(a.value), a.label); },
            [&](const Blame&) { return e; },
        },
        e->v);
  }

  TypePtr type(const TypePtr& t) {
    return std::visit(
        overloaded{
            [&](const TBase&) { return t; },
            [&](const TVar&) { return t; },
            [&](const TFun& f) {
              auto dom = type(f.dom);
              if (f.var == x) return tfun(f.var, dom, f.cod);
              auto [b, cod] = binder_t(f.var, f.cod);
              return tfun(b, dom, type(cod));
            },
            [&](const TForall& f) { return tforall(f.var, type(f.body)); },
            [&](const TRefine& r) {
              auto base = type(r.base);
              if (r.var == x) return trefine(r.var, base, r.pred);
              auto [b, pred] = binder(r.var, r.pred);
              return trefine(b, base, term(pred));
            },
        },
        t->v);
  }

 private:
  std::pair<std::string, TermPtr> binder(const std::string& b, const TermPtr& body) {
    if (!fv_v.count(b)) return {b, body};
    auto avoid = fv_v;
    for (auto& n : free_term_vars(body)) avoid.insert(n);
    avoid.insert(x);
    auto b2 = fresh_name(b, avoid);
    return {b2, subst_term(body, b, var(b2))};
  }
  std::pair<std::string, TypePtr> binder_t(const std::string& b, const TypePtr& body) {
    if (!fv_v.count(b)) return {b, body};
    auto avoid = fv_v;
    for (auto& n : free_term_vars(body)) avoid.insert(n);
    avoid.insert(x);
    auto b2 = fresh_name(b, avoid);
    return {b2, subst_term(body, b, var(b2))};
  }
};

struct TypeSubst {
  const std::string& a;
  const TypePtr& s;
  std::set<std::string> ftv_s;

  TypeSubst(const std::string& a, const TypePtr& s) : a(a), s(s), ftv_s(free_type_vars(s)) {}

  TermPtr term(const TermPtr& e) {
    return std::visit(
        overloaded{
            [&](const Const&) { return e; },
            [&](const Var&) { return e; },
            [&](const Lam& l) { return lam(l.var, type(l.ann), term(l.body)); },
            [&](const TyLam& l) {
              if (l.var == a) return e;
              auto [b, body] = binder(l.var, l.body);
              return tylam(b, term(body));
            },
            [&](const App& ap) { return app(term(ap.fn), term(ap.arg)); },
            [&](const TyApp& ap) { return tyapp(term(ap.fn), type(ap.arg)); },
            [&](const Cast& c) { return cast(type(c.src), type(c.tgt), c.label); },
            [&](const OpApp& o) {
              std::vector<TermPtr> args;
              args.reserve(o.args.size());
              for (auto& x : o.args) args.push_back(term(x));
              return opapp(o.op, std::move(args));
            },
            [&](const Wait& w) { return wait(type(w.ref), term(w.subject), w.label); },
            [&](const Active& ac) { return active(type(ac.ref), term(ac.state), term(ac.value), ac.label); },
            [&](const Blame&) { return e; },
        },
        e->v);
  }

  TypePtr type(const TypePtr& t) {
    return std::visit(
        overloaded{
            [&](const TBase&) { return t; },
            [&](const TVar& v) { return v.name == a ? s : t; },
            [&](const TFun& f) { return tfun(f.var, type(f.dom), type(f.cod)); },
            [&](const TForall& f) {
              if (f.var == a) return t;
              auto [b, body] = binder_t(f.var, f.body);
              return tforall(b, type(body));
            },
            [&](const TRefine& r) { return trefine(r.var, type(r.base), term(r.pred)); },
        },
        t->v);
  }

 private:
  std::pair<std::string, TermPtr> binder(const std::string& b, const TermPtr& body) {
    if (!ftv_s.count(b)) return {b, body};
    auto avoid = ftv_s;
    for (auto& n : free_type_vars(body)) avoid.insert(n);
    avoid.insert(a);
    auto b2 = fresh_name(b, avoid);
    return {b2, subst_type(body, b, tvar(b2))};
  }
  std::pair<std::string, TypePtr> binder_t(const std::string& b, const TypePtr& body) {
    if (!ftv_s.count(b)) return {b, body};
    auto avoid = ftv_s;
    for (auto& n : free_type_vars(body)) avoid.insert(n);
    avoid.insert(a);
    auto b2 = fresh_name(b, avoid);
    return {b2, subst_type(body, b, tvar(b2))};
  }
};

}  // namespace

TermPtr subst_term(const TermPtr& e, const std::string& x, const TermPtr& v) {
  return TermSubst(x, v).term(e);
}
TypePtr subst_term(const TypePtr& t, const std::string& x, const TermPtr& v) {
  return TermSubst(x, v).type(t);
}
TermPtr subst_type(const TermPtr& e, const std::string& a, const TypePtr& s) {
  return TypeSubst(a, s).term(e);
}
TypePtr subst_type(const TypePtr& t, const std::string& a, const TypePtr& s) {
  return TypeSubst(a, s).type(t);
}

namespace {

// Alpha-equivalence via de Bruijn leveling of binders on both sides.
struct AlphaEnv {
  std::map<std::string, int> lt, rt;  // term binders
  std::map<std::string, int> la, ra;  // type binders
  int next = 0;

  bool var_eq(const std::string& l, const std::string& r) const {
    auto il = lt.find(l), ir = rt.find(r);
    if (il != lt.end() || ir != rt.end())
      return il != lt.end() && ir != rt.end() && il->second == ir->second;
    return l == r;
  }
  bool tvar_eq(const std::string& l, const std::string& r) const {
    auto il = la.find(l), ir = ra.find(r);
    if (il != la.end() || ir != ra.end())
      return il != la.end() && ir != ra.end() && il->second == ir->second;
    return l == r;
  }
};

bool aeq_term(const TermPtr& a, const TermPtr& b, AlphaEnv env);

bool aeq_type(const TypePtr& a, const TypePtr& b, AlphaEnv env) {
  if (a->v.index() != b->v.index()) return false;
  return std::visit(
      overloaded{
          [&](const TBase& x) { return x.name == std::get<TBase>(b->v).name; },
          [&](const TVar& x) { return env.tvar_eq(x.name, std::get<TVar>(b->v).name); },
          [&](const TFun& x) {
            auto& y = std::get<TFun>(b->v);
            if (!aeq_type(x.dom, y.dom, env)) return false;
            auto env2 = env;
            env2.lt[x.var] = env2.rt[y.var] = env2.next++;
            return aeq_type(x.cod, y.cod, env2);
          },
          [&](const TForall& x) {
            auto& y = std::get<TForall>(b->v);
            auto env2 = env;
            env2.la[x.var] = env2.ra[y.var] = env2.next++;
            return aeq_type(x.body, y.body, env2);
          },
          [&](const TRefine& x) {
            auto& y = std::get<TRefine>(b->v);
            if (!aeq_type(x.base, y.base, env)) return false;
            auto env2 = env;
            env2.lt[x.var] = env2.rt[y.var] = env2.next++;
            return aeq_term(x.pred, y.pred, env2);
          },
      },
      a->v);
}

bool aeq_term(const TermPtr& a, const TermPtr& b, AlphaEnv env) {
  if (a->v.index() != b->v.index()) return false;
  return std::visit(
      overloaded{
          [&](const Const& x) { return x.k == std::get<Const>(b->v).k; },
          [&](const Var& x) { return env.var_eq(x.name, std::get<Var>(b->v).name); },
          [&](const Lam& x) {
            auto& y = std::get<Lam>(b->v);
            if (!aeq_type(x.ann, y.ann, env)) return false;
            auto env2 = env;
            env2.lt[x.var] = env2.rt[y.var] = env2.next++;
            return aeq_term(x.body, y.body, env2);
          },
          [&](const TyLam& x) {
            auto& y = std::get<TyLam>(b->v);
            auto env2 = env;
            env2.la[x.var] = env2.ra[y.var] = env2.next++;
            return aeq_term(x.body, y.body, env2);
          },
          [&](const App& x) {
            auto& y = std::get<App>(b->v);
            return aeq_term(x.fn, y.fn, env) && aeq_term(x.arg, y.arg, env);
          },
          [&](const TyApp& x) {
            auto& y = std::get<TyApp>(b->v);
            return aeq_term(x.fn, y.fn, env) && aeq_type(x.arg, y.arg, env);
          },
          [&](const Cast& x) {
            auto& y = std::get<Cast>(b->v);
            return x.label == y.label && aeq_type(x.src, y.src, env) && aeq_type(x.tgt, y.tgt, env);
          },
          [&](const OpApp& x) {
            auto& y = std::get<OpApp>(b->v);
            if (x.op != y.op || x.args.size() != y.args.size()) return false;
            for (std::size_t i = 0; i < x.args.size(); ++i)
              if (!aeq_term(x.args[i], y.args[i], env)) return false;
            return true;
          },
          [&](const Wait& x) {
            auto& y = std::get<Wait>(b->v);
            return x.label == y.label && aeq_type(x.ref, y.ref, env) && aeq_term(x.subject, y.subject, env);
          },
          [&](const Active& x) {
            auto& y = std::get<Active>(b->v);
            return x.label == y.label && aeq_type(x.ref, y.ref, env) &&
                   aeq_term(x.state, y.state, env) && aeq_term(x.value, y.value, env);
          },
          [&](const Blame& x) { return x.label == std::get<Blame>(b->v).label; },
      },
      a->v);
}

}  // namespace

bool alpha_eq(const TermPtr& a, const TermPtr& b) { return aeq_term(a, b, {}); }
bool alpha_eq(const TypePtr& a, const TypePtr& b) { return aeq_type(a, b, {}); }

TypePtr unref(const TypePtr& t) {
  auto cur = t;
  while (auto* r = std::get_if<TRefine>(&cur->v)) cur = r->base;
  return cur;
}

std::vector<TermPtr> refines(const TypePtr& t) {
  std::vector<TermPtr> out;
  auto cur = t;
  while (auto* r = std::get_if<TRefine>(&cur->v)) {
    out.push_back(lam(r->var, r->base, r->pred));
    cur = r->base;
  }
  return out;
}

std::size_t term_size(const TypePtr& t) {
  return std::visit(overloaded{
                        [](const TBase&) -> std::size_t { return 0; },
                        [](const TVar&) -> std::size_t { return 0; },
                        [](const TFun& f) { return term_size(f.dom) + term_size(f.cod); },
                        [](const TForall& f) { return term_size(f.body); },
                        [](const TRefine& r) { return term_size(r.base) + term_size(r.pred); },
                    },
                    t->v);
}

std::size_t term_size(const TermPtr& e) {
  return 1 + std::visit(overloaded{
                            [](const Const&) -> std::size_t { return 0; },
                            [](const Var&) -> std::size_t { return 0; },
                            [](const Lam& l) { return term_size(l.ann) + term_size(l.body); },
                            [](const TyLam& l) { return term_size(l.body); },
                            [](const App& a) { return term_size(a.fn) + term_size(a.arg); },
                            [](const TyApp& a) { return term_size(a.fn) + term_size(a.arg); },
                            [](const Cast& c) { return term_size(c.src) + term_size(c.tgt); },
                            [](const OpApp& o) {
                              std::size_t n = 0;
                              for (auto& a : o.args) n += term_size(a);
                              return n;
                            },
                            [](const Wait& w) { return term_size(w.ref) + term_size(w.subject); },
                            [](const Active& a) {
                              return term_size(a.ref) + term_size(a.state) + term_size(a.value);
                            },
                            [](const Blame&) -> std::size_t { return 0; },
                        },
                        e->v);
}

std::size_t cast_count(const TypePtr& t) {
  return std::visit(overloaded{
                        [](const TBase&) -> std::size_t { return 0; },
                        [](const TVar&) -> std::size_t { return 0; },
                        [](const TFun& f) { return cast_count(f.dom) + cast_count(f.cod); },
                        [](const TForall& f) { return cast_count(f.body); },
                        [](const TRefine& r) { return cast_count(r.base) + cast_count(r.pred); },
                    },
                    t->v);
}

std::size_t cast_count(const TermPtr& e) {
  return std::visit(overloaded{
                        [](const Const&) -> std::size_t { return 0; },
                        [](const Var&) -> std::size_t { return 0; },
                        [](const Lam& l) { return cast_count(l.ann) + cast_count(l.body); },
                        [](const TyLam& l) { return cast_count(l.body); },
                        [](const App& a) { return cast_count(a.fn) + cast_count(a.arg); },
                        [](const TyApp& a) { return cast_count(a.fn) + cast_count(a.arg); },
                        [](const Cast& c) { return 1 + cast_count(c.src) + cast_count(c.tgt); },
                        [](const OpApp& o) {
                          std::size_t n = 0;
                          for (auto& a : o.args) n += cast_count(a);
                          return n;
                        },
                        [](const Wait& w) { return cast_count(w.ref) + cast_count(w.subject); },
                        [](const Active& a) {
                          return cast_count(a.ref) + cast_count(a.state) + cast_count(a.value);
                        },
                        [](const Blame&) -> std::size_t { return 0; },
                    },
                    e->v);
}

}  // namespace fh
