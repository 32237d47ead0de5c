#pragma once

#include <string>

#include "fh/syntax.hpp"

namespace fh {

// Deterministic surface printing with minimal parentheses. Negative integer
// literals always print parenthesized so application stays unambiguous.
std::string print_term(const TermPtr& e);
std::string print_type(const TypePtr& t);
std::string print_const(const ConstVal& k);
std::string print_context(const Context& ctx);

}  // namespace fh
