#include "fh/parser.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "fh/printer.hpp"

namespace fh {

namespace {

struct Tok {
  enum Kind { Id, Int, Punct, End } kind;
  std::string text;
  int line, col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '?' || c == '$';
}

std::vector<Tok> lex(const std::string& s) {
  std::vector<Tok> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') adv(1);
      continue;
    }
    int tl = line, tc = col;
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < s.size() && ident_char(s[j])) ++j;
      out.push_back({Tok::Id, s.substr(i, j - i), tl, tc});
      adv(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Int, s.substr(i, j - i), tl, tc});
      adv(j - i);
      continue;
    }
    static const char* two[] = {"<<", ">>", "=>", "==", "!=", "<=", ">=", "->"};
    bool took = false;
    for (auto* t : two) {
      if (s.compare(i, 2, t) == 0) {
        out.push_back({Tok::Punct, t, tl, tc});
        adv(2);
        took = true;
        break;
      }
    }
    if (took) continue;
    static const std::string singles = "(){}[]<>,:.^|=+-*";
    if (singles.find(c) != std::string::npos) {
      out.push_back({Tok::Punct, std::string(1, c), tl, tc});
      adv(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

struct Parser {
  std::vector<Tok> toks;
  std::size_t pos = 0;
  Signature sig;

  explicit Parser(const std::string& text, Signature sig0) : toks(lex(text)), sig(std::move(sig0)) {}

  const Tok& peek(std::size_t k = 0) const { return toks[std::min(pos + k, toks.size() - 1)]; }
  Tok take() { return toks[pos == toks.size() - 1 ? pos : pos++]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().col);
  }

  bool at_punct(const std::string& p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool at_id(const std::string& w, std::size_t k = 0) const {
    return peek(k).kind == Tok::Id && peek(k).text == w;
  }
  void expect_punct(const std::string& p) {
    if (!at_punct(p)) fail("expected '" + p + "'");
    ++pos;
  }
  // A '>' may be the first half of a lexed '>>'.
  void expect_gt() {
    if (at_punct(">")) {
      ++pos;
      return;
    }
    if (at_punct(">>")) {
      toks[pos].text = ">";
      return;
    }
    fail("expected '>'");
  }
  void expect_gtgt() {
    if (at_punct(">>")) {
      ++pos;
      return;
    }
    if (at_punct(">")) {
      ++pos;
      expect_gt();
      return;
    }
    fail("expected '>>'");
  }

  static bool reserved(const std::string& w) {
    static const std::set<std::string> r = {"fun", "tyfun",  "forall", "let",  "in",  "blame",
                                            "true", "false", "and",    "or",   "Bool", "Int"};
    return r.count(w) > 0;
  }

  std::string ident(const char* what) {
    if (peek().kind != Tok::Id || reserved(peek().text)) fail(std::string("expected ") + what);
    return take().text;
  }

  std::string label() {
    expect_punct("^");
    if (peek().kind != Tok::Id) fail("expected label");
    return take().text;
  }

  // ---- types ----

  TypePtr type() {
    if (at_id("forall")) {
      ++pos;
      auto a = ident("type variable");
      expect_punct(".");
      return tforall(a, type());
    }
    TypePtr t;
    if (at_punct("(") && peek(1).kind == Tok::Id && !reserved(peek(1).text) && at_punct(":", 2)) {
      ++pos;
      auto x = take().text;
      ++pos;  // ':'
      auto dom = type();
      expect_punct(")");
      expect_punct("->");
      return tfun(x, dom, type());
    }
    t = type_atom();
    if (at_punct("->")) {
      ++pos;
      return tfun("_", t, type());
    }
    return t;
  }

  TypePtr type_atom() {
    if (at_punct("(")) {
      ++pos;
      auto t = type();
      expect_punct(")");
      return t;
    }
    if (at_punct("{")) {
      ++pos;
      auto x = ident("refinement binder");
      expect_punct(":");
      auto base = type();
      expect_punct("|");
      auto pred = term();
      expect_punct("}");
      return trefine(x, base, pred);
    }
    if (at_id("Bool") || at_id("Int")) return tbase(take().text);
    if (peek().kind == Tok::Id && !reserved(peek().text)) return tvar(take().text);
    fail("expected type");
  }

  // ---- terms ----

  TermPtr term() {
    if (at_id("fun")) {
      ++pos;
      expect_punct("(");
      auto x = ident("variable");
      expect_punct(":");
      auto t = type();
      expect_punct(")");
      return lam(x, t, term());
    }
    if (at_id("tyfun")) {
      ++pos;
      expect_punct("(");
      auto a = ident("type variable");
      expect_punct(")");
      return tylam(a, term());
    }
    if (at_id("let")) {
      ++pos;
      auto x = ident("variable");
      expect_punct(":");
      auto t = type();
      expect_punct("=");
      auto bound = term();
      if (!at_id("in")) fail("expected 'in'");
      ++pos;
      return let_(x, t, bound, term());
    }
    return or_expr();
  }

  TermPtr or_expr() {
    auto l = and_expr();
    while (at_id("or")) {
      ++pos;
      l = opapp("or", {l, and_expr()});
    }
    return l;
  }

  TermPtr and_expr() {
    auto l = cmp_expr();
    while (at_id("and")) {
      ++pos;
      l = opapp("and", {l, cmp_expr()});
    }
    return l;
  }

  TermPtr cmp_expr() {
    auto l = add_expr();
    static const std::map<std::string, std::string> cmps = {
        {"==", "eqInt"}, {"!=", "neq"}, {"<", "lt"}, {"<=", "le"}, {">", "gt"}, {">=", "ge"}};
    if (peek().kind == Tok::Punct) {
      auto it = cmps.find(peek().text);
      // A trailing '>' may close an enclosing active-check form; only treat a
      // comparison symbol as infix when an operand follows.
      if (it != cmps.end() && starts_expr(1)) {
        ++pos;
        return opapp(it->second, {l, add_expr()});
      }
    }
    return l;
  }

  TermPtr add_expr() {
    auto l = mul_expr();
    while (at_punct("+") || at_punct("-")) {
      auto op = take().text == "+" ? "add" : "sub";
      l = opapp(op, {l, mul_expr()});
    }
    return l;
  }

  TermPtr mul_expr() {
    auto l = app_expr();
    while (at_punct("*")) {
      ++pos;
      l = opapp("mul", {l, app_expr()});
    }
    return l;
  }

  bool starts_atom(std::size_t k = 0) const {
    if (peek(k).kind == Tok::Int) return true;
    if (peek(k).kind == Tok::Id) {
      const auto& w = peek(k).text;
      return w == "true" || w == "false" || w == "blame" || !reserved(w);
    }
    return at_punct("(", k) || at_punct("<", k) || at_punct("<<", k);
  }

  bool starts_expr(std::size_t k = 0) const {
    return starts_atom(k) || (at_punct("-", k) && peek(k + 1).kind == Tok::Int);
  }

  TermPtr app_expr() {
    auto l = atom();
    for (;;) {
      if (at_punct("[")) {
        ++pos;
        auto t = type();
        expect_punct("]");
        l = tyapp(l, t);
      } else if (at_punct("<") || at_punct("<<")) {
        // '<' here is either a cast/check argument or an infix comparison;
        // tentatively parse the atom and hand '<' back on failure.
        std::size_t saved = pos;
        try {
          l = app(l, atom());
        } catch (const ParseError&) {
          pos = saved;
          break;
        }
      } else if (starts_atom()) {
        l = app(l, atom());
      } else {
        break;
      }
    }
    return l;
  }

  TermPtr atom() {
    if (peek().kind == Tok::Int) return cint(int_lit(take().text, false));
    if (at_punct("-") && peek(1).kind == Tok::Int) {
      ++pos;
      return cint(int_lit(take().text, true));
    }
    if (at_id("true")) {
      ++pos;
      return cbool(true);
    }
    if (at_id("false")) {
      ++pos;
      return cbool(false);
    }
    if (at_id("blame")) {
      ++pos;
      if (peek().kind != Tok::Id) fail("expected label");
      return blame(take().text);
    }
    if (at_punct("(")) {
      ++pos;
      auto e = term();
      expect_punct(")");
      return e;
    }
    if (at_punct("<<")) return wait_form();
    if (at_punct("<")) return cast_or_active();
    if (peek().kind == Tok::Id && !reserved(peek().text)) {
      auto name = take().text;
      if (sig.find(name)) {
        expect_punct("(");
        std::vector<TermPtr> args;
        if (!at_punct(")")) {
          args.push_back(term());
          while (at_punct(",")) {
            ++pos;
            args.push_back(term());
          }
        }
        expect_punct(")");
        return opapp(name, std::move(args));
      }
      return var(name);
    }
    fail("expected term");
  }

  std::int64_t int_lit(const std::string& digits, bool neg) {
    errno = 0;
    std::string s = neg ? "-" + digits : digits;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size()) fail("integer literal out of range");
    return v;
  }

  TermPtr wait_form() {
    ++pos;  // '<<'
    auto ref = type();
    if (!std::holds_alternative<TRefine>(ref->v)) fail("waiting check needs a refinement type");
    expect_punct(",");
    auto subject = term();
    expect_gtgt();
    return wait(ref, subject, label());
  }

  TermPtr cast_or_active() {
    ++pos;  // '<'
    auto t1 = type();
    if (at_punct("=>")) {
      ++pos;
      auto t2 = type();
      expect_gt();
      return cast(t1, t2, label());
    }
    if (at_punct(",")) {
      if (!std::holds_alternative<TRefine>(t1->v)) fail("active check needs a refinement type");
      ++pos;
      auto state = term();
      expect_punct(",");
      auto value = term();
      expect_gt();
      return active(t1, state, value, label());
    }
    fail("expected '=>' or ',' in cast form");
  }

  // ---- source files ----

  OpSig op_decl() {
    ++pos;  // 'op'
    auto name = ident("operation name");
    expect_punct("(");
    std::vector<std::pair<std::string, TypePtr>> params;
    if (!at_punct(")")) {
      for (;;) {
        auto x = ident("parameter");
        expect_punct(":");
        params.emplace_back(x, type());
        if (!at_punct(",")) break;
        ++pos;
      }
    }
    expect_punct(")");
    expect_punct("->");
    auto result = type();
    expect_punct("=");
    auto selector = ident("selector");
    if (!has_selector(selector)) fail("unknown denotation selector '" + selector + "'");
    return OpSig{name, std::move(params), result, selector};
  }

  Context context_entries() {
    Context ctx;
    for (;;) {
      auto n = ident("context entry");
      if (at_punct(":")) {
        ++pos;
        ctx.push_back({n, type()});
      } else {
        ctx.push_back({n, nullptr});
      }
      if (!at_punct(",")) break;
      ++pos;
    }
    return ctx;
  }

  SourceFile source() {
    SourceFile f;
    while (at_id("op") && peek(1).kind == Tok::Id) {
      // Declarations may use previously declared operations in refinements.
      auto o = op_decl();
      sig.ops[o.name] = o;
      f.sig_ext.push_back(std::move(o));
    }
    if (at_id("ctx") && peek(1).kind == Tok::Id) {
      ++pos;
      f.ctx = context_entries();
    }
    f.term = term();
    if (peek().kind != Tok::End) fail("trailing input after term");
    return f;
  }
};

}  // namespace

TermPtr parse_term(const std::string& text, const Signature& sig) {
  Parser p(text, sig);
  auto e = p.term();
  if (p.peek().kind != Tok::End) p.fail("trailing input after term");
  return e;
}

TypePtr parse_type(const std::string& text, const Signature& sig) {
  Parser p(text, sig);
  auto t = p.type();
  if (p.peek().kind != Tok::End) p.fail("trailing input after type");
  return t;
}

Context parse_context(const std::string& text, const Signature& sig) {
  Parser p(text, sig);
  auto c = p.context_entries();
  if (p.peek().kind != Tok::End) p.fail("trailing input after context");
  return c;
}

SourceFile parse_source(const std::string& text, const Signature& base) {
  Parser p(text, base);
  return p.source();
}

std::string print_source(const SourceFile& f) {
  std::ostringstream os;
  for (auto& o : f.sig_ext) {
    os << "op " << o.name << '(';
    for (std::size_t i = 0; i < o.params.size(); ++i) {
      if (i) os << ", ";
      os << o.params[i].first << ':' << print_type(o.params[i].second);
    }
    os << ") -> " << print_type(o.result) << " = " << o.selector << '\n';
  }
  if (!f.ctx.empty()) os << "ctx " << print_context(f.ctx) << '\n';
  if (!f.sig_ext.empty() || !f.ctx.empty()) os << '\n';
  os << print_term(f.term) << '\n';
  return os.str();
}

}  // namespace fh
