#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace fh {

template <class... Fs> struct overloaded : Fs... { using Fs::operator()...; };
template <class... Fs> overloaded(Fs...) -> overloaded<Fs...>;

struct TypeNode;
struct TermNode;
using TypePtr = std::shared_ptr<const TypeNode>;
using TermPtr = std::shared_ptr<const TermNode>;

// Types: B | a | (x:T)->T | forall a. T | {x:T | e}
struct TBase   { std::string name; };
struct TVar    { std::string name; };
struct TFun    { std::string var; TypePtr dom; TypePtr cod; };
struct TForall { std::string var; TypePtr body; };
struct TRefine { std::string var; TypePtr base; TermPtr pred; };

struct TypeNode {
  std::variant<TBase, TVar, TFun, TForall, TRefine> v;
};

// Terms. Wait/Active/Blame are run-time forms; they parse and print so
// traces can be written down, but source programs normally avoid them.
using ConstVal = std::variant<bool, std::int64_t>;

struct Const  { ConstVal k; };
struct Var    { std::string name; };
struct Lam    { std::string var; TypePtr ann; TermPtr body; };
struct TyLam  { std::string var; TermPtr body; };
struct App    { TermPtr fn; TermPtr arg; };
struct TyApp  { TermPtr fn; TypePtr arg; };
struct Cast   { TypePtr src; TypePtr tgt; std::string label; };
struct OpApp  { std::string op; std::vector<TermPtr> args; };
struct Wait   { TypePtr ref; TermPtr subject; std::string label; };        // <<{x:T|e}, e'>>^l
struct Active { TypePtr ref; TermPtr state; TermPtr value; std::string label; }; // <{x:T|e}, e', v>^l
struct Blame  { std::string label; };

struct TermNode {
  std::variant<Const, Var, Lam, TyLam, App, TyApp, Cast, OpApp, Wait, Active, Blame> v;
};

// Constructors.
TypePtr tbase(std::string name);
TypePtr tvar(std::string name);
TypePtr tfun(std::string var, TypePtr dom, TypePtr cod);
TypePtr tforall(std::string var, TypePtr body);
TypePtr trefine(std::string var, TypePtr base, TermPtr pred);

TermPtr cbool(bool b);
TermPtr cint(std::int64_t n);
TermPtr var(std::string name);
TermPtr lam(std::string var, TypePtr ann, TermPtr body);
TermPtr tylam(std::string var, TermPtr body);
TermPtr app(TermPtr fn, TermPtr arg);
TermPtr tyapp(TermPtr fn, TypePtr arg);
TermPtr cast(TypePtr src, TypePtr tgt, std::string label);
TermPtr opapp(std::string op, std::vector<TermPtr> args);
TermPtr wait(TypePtr ref, TermPtr subject, std::string label);
TermPtr active(TypePtr ref, TermPtr state, TermPtr value, std::string label);
TermPtr blame(std::string label);

// let x:T = e1 in e2 is sugar for (fun (x:T) e2) e1; the parser desugars.
TermPtr let_(std::string var, TypePtr ann, TermPtr bound, TermPtr body);

// Ordered typing context; a null type marks a type-variable binding.
// Well-formed contexts have pairwise distinct names.
struct CtxEntry {
  std::string name;
  TypePtr type;
};
using Context = std::vector<CtxEntry>;

const CtxEntry* ctx_lookup(const Context& ctx, const std::string& name);
Context ctx_extend(Context ctx, std::string name, TypePtr type);

bool is_const(const TermPtr& e);
bool is_true(const TermPtr& e);
bool is_false(const TermPtr& e);

// Values: constants, term/type abstractions, bare casts.
bool is_value(const TermPtr& e);

std::set<std::string> free_term_vars(const TermPtr& e);
std::set<std::string> free_term_vars(const TypePtr& t);
std::set<std::string> free_type_vars(const TermPtr& e);
std::set<std::string> free_type_vars(const TypePtr& t);
bool is_closed(const TermPtr& e);

// First candidate not in avoid: base, base'1, base'2, ...
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// Capture-avoiding substitution; binders are freshened on demand.
TermPtr subst_term(const TermPtr& e, const std::string& x, const TermPtr& v);
TypePtr subst_term(const TypePtr& t, const std::string& x, const TermPtr& v);
TermPtr subst_type(const TermPtr& e, const std::string& a, const TypePtr& s);
TypePtr subst_type(const TypePtr& t, const std::string& a, const TypePtr& s);

bool alpha_eq(const TermPtr& a, const TermPtr& b);
bool alpha_eq(const TypePtr& a, const TypePtr& b);

// unref strips all outer refinement layers; refines collects each layer's
// predicate as fun (x:T) e, outermost first.
TypePtr unref(const TypePtr& t);
std::vector<TermPtr> refines(const TypePtr& t);

// Node counts: term constructors only (refinement predicates included).
std::size_t term_size(const TermPtr& e);
std::size_t term_size(const TypePtr& t);
// Cast nodes anywhere in the tree, annotations included.
std::size_t cast_count(const TermPtr& e);
std::size_t cast_count(const TypePtr& t);

}  // namespace fh
