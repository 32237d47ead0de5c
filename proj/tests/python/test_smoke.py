"""End-to-end smoke of the python bindings: parse/print, evaluate, trace,
typecheck, subtype, optimize, ciu, selfify — string-in/string-out only."""

import os

import _fhcalc as fh


def corpus(name):
    path = os.path.join(os.environ["FH_CORPUS_DIR"], name + ".fh")
    with open(path, encoding="utf-8") as f:
        return f.read()


# Parse/print round-trips, including printer conventions.
assert fh.roundtrip("5") == "5"
assert fh.roundtrip("0 - -3") == "0 - (-3)"
assert fh.roundtrip("let x:Int = 5 in x + 1") == "(fun (x:Int) x + 1) 5"
assert fh.roundtrip("<Int => {x:Int | 0 < x}>^l 5") == "<Int => {x:Int | 0 < x}>^l 5"

# Evaluation and blame.
assert fh.evaluate("<Int => {x:Int | 0 < x}>^l 5") == "5"
assert fh.evaluate("<Int => {x:Int | 0 < x}>^l (-1)") == "blame l"
assert fh.evaluate(corpus("stack")) == "0"
assert fh.evaluate(corpus("gates")) == "2"

# Traces are full state sequences, first state the program itself.
tr = fh.trace("<Int => {x:Int | 0 < x}>^l 5")
assert tr[0] == "<Int => {x:Int | 0 < x}>^l 5"
assert tr[-1] == "5"
assert any(s.startswith("<<{x:Int | 0 < x},") for s in tr)

# Typechecking: synthesized types, and the absence of subsumption.
assert fh.check("fun (x:Int) x + 1")["type"] == "Int -> Int"
assert fh.check(corpus("dependent_fun"))["type"] == "{y:Int | y >= 41}"
bad = fh.check("(fun (x:{v:Int | v > 0}) x) 5")
assert not bad["ok"] and bad["error"] == "arg-mismatch"
assert fh.check(corpus("open_term"))["ok"]

# Subtyping verdicts.
assert fh.subtype("{x:Int | x > 2}", "{y:Int | y > 0}") == "yes"
assert fh.subtype("{x:Int | x >= 0}", "{y:Int | y != 0}") == "no"
assert fh.subtype("Int", "Bool") == "no"

# The worked function cast: decomposition plus upcast elimination, and the
# optimized program is ciu-equivalent to the original.
opt = fh.optimize(corpus("fun_cast"))
rules = {e["rule"] for e in opt["log"]}
assert "DecompFun" in rules and "UpcastElim" in rules
assert "<{v:Int | v >= 0} => {v:Int | v != 0}>^l8" in opt["program"]
assert "=> {y:Int | y > 0}" not in opt["program"]
rep = fh.ciu_test(corpus("fun_cast"), opt["program"], trials=60, seed=7)
assert rep["witnesses"] == 0 and rep["trials"] == 60

# ciu refutes genuinely different programs, deterministically per seed.
diff = fh.ciu_test("5", "6", trials=40, seed=9)
assert diff["witnesses"] > 0
assert diff == fh.ciu_test("5", "6", trials=40, seed=9)

# Selfification at a base type is the singleton equation.
assert fh.selfify("Int", "v") == "{x:Int | x == v}"

print("ok")
