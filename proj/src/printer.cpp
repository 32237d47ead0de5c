#include "fh/printer.hpp"

#include <sstream>

#include "fh/ops.hpp"

namespace fh {

namespace {

// Term precedence, loosest to tightest.
enum { P_BODY = 0, P_OR = 1, P_AND = 2, P_CMP = 3, P_ADD = 4, P_MUL = 5, P_APP = 6, P_ATOM = 7 };
// Type precedence.
enum { TP_FORALL = 0, TP_ARROW = 1, TP_ATOM = 2 };

void pt(std::ostream& os, const TermPtr& e, int need);

void py(std::ostream& os, const TypePtr& t, int need) {
  std::visit(overloaded{
                 [&](const TBase& b) { os << b.name; },
                 [&](const TVar& v) { os << v.name; },
                 [&](const TFun& f) {
                   if (need > TP_ARROW) os << '(';
                   if (free_term_vars(f.cod).count(f.var)) {
                     os << '(' << f.var << ':';
                     py(os, f.dom, TP_FORALL);
                     os << ") -> ";
                   } else {
                     py(os, f.dom, TP_ATOM);
                     os << " -> ";
                   }
                   py(os, f.cod, TP_ARROW);
                   if (need > TP_ARROW) os << ')';
                 },
                 [&](const TForall& f) {
                   if (need > TP_FORALL) os << '(';
                   os << "forall " << f.var << ". ";
                   py(os, f.body, TP_FORALL);
                   if (need > TP_FORALL) os << ')';
                 },
                 [&](const TRefine& r) {
                   os << '{' << r.var << ':';
                   py(os, r.base, TP_FORALL);
                   os << " | ";
                   pt(os, r.pred, P_BODY);
                   os << '}';
                 },
             },
             t->v);
}

void paren(std::ostream& os, bool p, const char* s) {
  if (p) os << s;
}

void pt(std::ostream& os, const TermPtr& e, int need) {
  std::visit(
      overloaded{
          [&](const Const& c) {
            if (auto* b = std::get_if<bool>(&c.k)) {
              os << (*b ? "true" : "false");
            } else {
              auto n = std::get<std::int64_t>(c.k);
              if (n < 0)
                os << '(' << n << ')';
              else
                os << n;
            }
          },
          [&](const Var& v) { os << v.name; },
          [&](const Lam& l) {
            paren(os, need > P_BODY, "(");
            os << "fun (" << l.var << ':';
            py(os, l.ann, TP_FORALL);
            os << ") ";
            pt(os, l.body, P_BODY);
            paren(os, need > P_BODY, ")");
          },
          [&](const TyLam& l) {
            paren(os, need > P_BODY, "(");
            os << "tyfun (" << l.var << ") ";
            pt(os, l.body, P_BODY);
            paren(os, need > P_BODY, ")");
          },
          [&](const App& a) {
            paren(os, need > P_APP, "(");
            pt(os, a.fn, P_APP);
            os << ' ';
            pt(os, a.arg, P_ATOM);
            paren(os, need > P_APP, ")");
          },
          [&](const TyApp& a) {
            paren(os, need > P_APP, "(");
            pt(os, a.fn, P_APP);
            os << " [";
            py(os, a.arg, TP_FORALL);
            os << ']';
            paren(os, need > P_APP, ")");
          },
          [&](const Cast& c) {
            os << '<';
            py(os, c.src, TP_FORALL);
            os << " => ";
            py(os, c.tgt, TP_FORALL);
            os << ">^" << c.label;
          },
          [&](const OpApp& o) {
            auto& inf = infix_ops();
            auto it = inf.find(o.op);
            if (it != inf.end() && o.args.size() == 2) {
              const auto& sym = it->second;
              if (o.op == "or") {
                paren(os, need > P_OR, "(");
                pt(os, o.args[0], P_OR);
                os << " or ";
                pt(os, o.args[1], P_AND);
                paren(os, need > P_OR, ")");
              } else if (o.op == "and") {
                paren(os, need > P_AND, "(");
                pt(os, o.args[0], P_AND);
                os << " and ";
                pt(os, o.args[1], P_CMP);
                paren(os, need > P_AND, ")");
              } else if (o.op == "add" || o.op == "sub") {
                paren(os, need > P_ADD, "(");
                pt(os, o.args[0], P_ADD);
                os << ' ' << sym << ' ';
                pt(os, o.args[1], P_MUL);
                paren(os, need > P_ADD, ")");
              } else if (o.op == "mul") {
                paren(os, need > P_MUL, "(");
                pt(os, o.args[0], P_MUL);
                os << ' ' << sym << ' ';
                pt(os, o.args[1], P_APP);
                paren(os, need > P_MUL, ")");
              } else {
                paren(os, need > P_CMP, "(");
                pt(os, o.args[0], P_ADD);
                os << ' ' << sym << ' ';
                pt(os, o.args[1], P_ADD);
                paren(os, need > P_CMP, ")");
              }
              return;
            }
            os << o.op << '(';
            for (std::size_t i = 0; i < o.args.size(); ++i) {
              if (i) os << ", ";
              pt(os, o.args[i], P_BODY);
            }
            os << ')';
          },
          [&](const Wait& w) {
            os << "<<";
            py(os, w.ref, TP_FORALL);
            os << ", ";
            pt(os, w.subject, P_BODY);
            os << ">>^" << w.label;
          },
          [&](const Active& a) {
            os << '<';
            py(os, a.ref, TP_FORALL);
            os << ", ";
            pt(os, a.state, P_BODY);
            os << ", ";
            pt(os, a.value, P_BODY);
            os << ">^" << a.label;
          },
          [&](const Blame& b) {
            paren(os, need > P_BODY, "(");
            os << "blame " << b.label;
            paren(os, need > P_BODY, ")");
          },
      },
      e->v);
}

}  // namespace

std::string print_term(const TermPtr& e) {
  std::ostringstream os;
  pt(os, e, P_BODY);
  return os.str();
}

std::string print_type(const TypePtr& t) {
  std::ostringstream os;
  py(os, t, TP_FORALL);
  return os.str();
}

std::string print_const(const ConstVal& k) {
  if (auto* b = std::get_if<bool>(&k)) return *b ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(k));
}

std::string print_context(const Context& ctx) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) os << ", ";
    os << ctx[i].name;
    if (ctx[i].type) {
      os << ':';
      py(os, ctx[i].type, TP_FORALL);
    }
  }
  return os.str();
}

}  // namespace fh
