"""Random closed formulas over the fixture signature, used to produce
eta-long beta-normal terms of type t for the extraction round-trip suite."""

import random

from polysem.hol import Atom, Conn, ConstApp, Formula, Hilbert, HVar, Quant
from polysem.syntax import Signature, etype

PREDICATES = {
    "heavy": ("phys",),
    "interesting": ("info",),
    "barks": ("dog",),
    "sleeps": ("ani",),
    "dog?": ("dog",),
}

INDIVIDUALS = {"b": "book", "rex": "dog", "chr": "chair", "liv": "town"}

FUNCTIONS = {
    "f0": ("book", "info"),
    "g0": ("book", "phys"),
    "dogAni": ("dog", "ani"),
    "aniPhys": ("ani", "phys"),
    "chairPhys": ("chair", "phys"),
    "townToClub": ("town", "club"),
}


def random_formula(rng: random.Random, sig: Signature, depth: int = 0,
                   env: tuple = ()) -> Formula:
    choices = ["atom", "atom"]
    if depth < 4:
        choices += ["conn", "conn", "quant", "quant"]
    match rng.choice(choices):
        case "atom":
            pred = rng.choice(sorted(PREDICATES))
            args = tuple(_holterm_of_sort(rng, sig, s, env, depth)
                         for s in PREDICATES[pred])
            return Atom(pred, sig.constant_type(pred), (), args)
        case "conn":
            conn = rng.choice(["and", "not", "implies"])
            n = 1 if conn == "not" else 2
            return Conn(conn, tuple(random_formula(rng, sig, depth + 1, env)
                                    for _ in range(n)))
        case "quant":
            kind = rng.choice(["forall", "exists"])
            sort = rng.choice(sorted({s for args in PREDICATES.values() for s in args}))
            var = f"q{len(env)}"
            body = random_formula(rng, sig, depth + 1, env + ((var, sort),))
            return Quant(kind, var, etype(sort), body)
    raise AssertionError


def _grounded(sig: Signature, sort: str):
    """eps v:sort. P(v) for the first predicate over the sort: a closed term
    of any predicate-argument sort, the generator's base case."""
    pred = next(p for p, args in sorted(PREDICATES.items()) if args == (sort,))
    var = "w"
    body = Atom(pred, sig.constant_type(pred), (), (HVar(var, etype(sort)),))
    return Hilbert("epsilon", var, etype(sort), body)


def _holterm_of_sort(rng: random.Random, sig: Signature, sort: str, env: tuple,
                     depth: int):
    in_scope = [name for name, s in env if s == sort]
    options = []
    if in_scope:
        options += ["var", "var", "var"]
    if any(s == sort for s in INDIVIDUALS.values()):
        options.append("const")
    funs = [f for f, (_, to) in FUNCTIONS.items() if to == sort]
    if funs and depth < 5:
        options += ["fun", "fun"]
    if depth < 5:
        options.append("hilbert")
    if not options:
        return _grounded(sig, sort)
    match rng.choice(options):
        case "var":
            name = rng.choice(in_scope)
            return HVar(name, etype(sort))
        case "const":
            name = rng.choice(sorted(c for c, s in INDIVIDUALS.items() if s == sort))
            return ConstApp(name, sig.constant_type(name), (), ())
        case "fun":
            fun = rng.choice(sorted(funs))
            src = FUNCTIONS[fun][0]
            arg = _holterm_of_sort(rng, sig, src, env, depth + 1)
            return ConstApp(fun, sig.constant_type(fun), (), (arg,))
        case "hilbert":
            kind = rng.choice(["epsilon", "tau"])
            var = f"h{len(env)}"
            body = random_formula(rng, sig, depth + 2, env + ((var, sort),))
            return Hilbert(kind, var, etype(sort), body)
    raise AssertionError
