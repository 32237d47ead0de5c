#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fh/ops.hpp"
#include "fh/syntax.hpp"

namespace fh {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
        line(line),
        col(col) {}
};

// A source file: optional `op` declarations extending the signature, an
// optional `ctx` line naming a typing context, then one term.
struct SourceFile {
  std::vector<OpSig> sig_ext;
  Context ctx;
  TermPtr term;
};

TermPtr parse_term(const std::string& text, const Signature& sig = Signature::core());
TypePtr parse_type(const std::string& text, const Signature& sig = Signature::core());
Context parse_context(const std::string& text, const Signature& sig = Signature::core());
SourceFile parse_source(const std::string& text, const Signature& base = Signature::core());

std::string print_source(const SourceFile& f);

}  // namespace fh
