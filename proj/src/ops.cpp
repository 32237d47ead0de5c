#include "fh/ops.hpp"

namespace fh {

namespace {

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

std::optional<bool> as_bool(const ConstVal& v) {
  if (auto* b = std::get_if<bool>(&v)) return *b;
  return std::nullopt;
}
std::optional<std::int64_t> as_int(const ConstVal& v) {
  if (auto* n = std::get_if<std::int64_t>(&v)) return *n;
  return std::nullopt;
}

}  // namespace

bool prime_trial_division(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t i = 2; i <= n / i; ++i)
    if (n % i == 0) return false;
  return true;
}

std::optional<ConstVal> apply_selector(const std::string& sel, const std::vector<ConstVal>& a) {
  auto ii = [&](auto f) -> std::optional<ConstVal> {
    if (a.size() != 2) return std::nullopt;
    auto x = as_int(a[0]), y = as_int(a[1]);
    if (!x || !y) return std::nullopt;
    return ConstVal{f(*x, *y)};
  };
  auto bb = [&](auto f) -> std::optional<ConstVal> {
    if (a.size() != 2) return std::nullopt;
    auto x = as_bool(a[0]), y = as_bool(a[1]);
    if (!x || !y) return std::nullopt;
    return ConstVal{f(*x, *y)};
  };

  if (sel == "not") {
    if (a.size() != 1) return std::nullopt;
    auto x = as_bool(a[0]);
    if (!x) return std::nullopt;
    return ConstVal{!*x};
  }
  if (sel == "and") return bb([](bool x, bool y) { return x && y; });
  if (sel == "or") return bb([](bool x, bool y) { return x || y; });
  if (sel == "eqBool") return bb([](bool x, bool y) { return x == y; });
  if (sel == "add") return ii([](auto x, auto y) { return wrap_add(x, y); });
  if (sel == "sub") return ii([](auto x, auto y) { return wrap_sub(x, y); });
  if (sel == "mul") return ii([](auto x, auto y) { return wrap_mul(x, y); });
  if (sel == "eqInt") return ii([](auto x, auto y) { return ConstVal{x == y}; });
  if (sel == "neq") return ii([](auto x, auto y) { return ConstVal{x != y}; });
  if (sel == "lt") return ii([](auto x, auto y) { return ConstVal{x < y}; });
  if (sel == "le") return ii([](auto x, auto y) { return ConstVal{x <= y}; });
  if (sel == "gt") return ii([](auto x, auto y) { return ConstVal{x > y}; });
  if (sel == "ge") return ii([](auto x, auto y) { return ConstVal{x >= y}; });
  if (sel == "prime?") {
    if (a.size() != 1) return std::nullopt;
    auto x = as_int(a[0]);
    if (!x) return std::nullopt;
    return ConstVal{prime_trial_division(*x)};
  }
  if (sel == "const_zero") {
    if (!a.empty()) return std::nullopt;
    return ConstVal{std::int64_t{0}};
  }
  if (sel == "is_zero") {
    if (a.size() != 1) return std::nullopt;
    auto x = as_int(a[0]);
    if (!x) return std::nullopt;
    return ConstVal{*x == 0};
  }
  if (sel == "pred") {
    if (a.size() != 1) return std::nullopt;
    auto x = as_int(a[0]);
    if (!x) return std::nullopt;
    return ConstVal{wrap_sub(*x, 1)};
  }
  if (sel == "succ") {
    if (a.size() != 1) return std::nullopt;
    auto x = as_int(a[0]);
    if (!x) return std::nullopt;
    return ConstVal{wrap_add(*x, 1)};
  }
  // depth_push(x, s) = |s| + 1: never zero, so a not-is_zero result refinement
  // holds on every input.
  if (sel == "depth_push") {
    if (a.size() != 2) return std::nullopt;
    auto x = as_int(a[0]), s = as_int(a[1]);
    if (!x || !s) return std::nullopt;
    std::uint64_t m = *s < 0 ? std::uint64_t{0} - static_cast<std::uint64_t>(*s)
                             : static_cast<std::uint64_t>(*s);
    return ConstVal{static_cast<std::int64_t>(m + 1)};
  }
  return std::nullopt;
}

bool has_selector(const std::string& sel) {
  return apply_selector(sel, {ConstVal{false}}).has_value() ||
         apply_selector(sel, {ConstVal{std::int64_t{0}}}).has_value() ||
         apply_selector(sel, {ConstVal{std::int64_t{0}}, ConstVal{std::int64_t{0}}}).has_value() ||
         apply_selector(sel, {ConstVal{false}, ConstVal{false}}).has_value() ||
         apply_selector(sel, {}).has_value();
}

TypePtr const_type(const ConstVal& k) {
  return std::holds_alternative<bool>(k) ? tbase("Bool") : tbase("Int");
}

const Signature& Signature::core() {
  static const Signature sig = [] {
    Signature s;
    auto B = tbase("Bool");
    auto I = tbase("Int");
    auto add = [&](std::string name, std::vector<std::pair<std::string, TypePtr>> ps, TypePtr r) {
      s.ops[name] = OpSig{name, std::move(ps), std::move(r), name};
    };
    add("not", {{"b", B}}, B);
    add("and", {{"a", B}, {"b", B}}, B);
    add("or", {{"a", B}, {"b", B}}, B);
    add("eqBool", {{"a", B}, {"b", B}}, B);
    add("add", {{"a", I}, {"b", I}}, I);
    add("sub", {{"a", I}, {"b", I}}, I);
    add("mul", {{"a", I}, {"b", I}}, I);
    add("eqInt", {{"a", I}, {"b", I}}, B);
    add("neq", {{"a", I}, {"b", I}}, B);
    add("lt", {{"a", I}, {"b", I}}, B);
    add("le", {{"a", I}, {"b", I}}, B);
    add("gt", {{"a", I}, {"b", I}}, B);
    add("ge", {{"a", I}, {"b", I}}, B);
    add("prime?", {{"n", I}}, B);
    return s;
  }();
  return sig;
}

Signature Signature::with(const std::vector<OpSig>& extra) const {
  Signature out = *this;
  for (auto& o : extra) out.ops[o.name] = o;
  return out;
}

const OpSig* Signature::find(const std::string& name) const {
  auto it = ops.find(name);
  return it == ops.end() ? nullptr : &it->second;
}

const std::map<std::string, std::string>& infix_ops() {
  static const std::map<std::string, std::string> m = {
      {"add", "+"}, {"sub", "-"}, {"mul", "*"},  {"eqInt", "=="}, {"neq", "!="}, {"lt", "<"},
      {"le", "<="}, {"gt", ">"},  {"ge", ">="},  {"and", "and"},  {"or", "or"},
  };
  return m;
}

}  // namespace fh
