"""Type and term languages of the polymorphic glue logic.

Types are built from one proposition sort `t`, a family of entity sorts
`e:name`, type variables, arrows and universal quantification.  Terms are
Church-style: every binder is annotated, every constant carries its declared
type.  Equality on both syntactic families is alpha-equivalence; binder names
are presentation only.

The concrete grammar is fully parenthesized s-expressions:

    types   t | e:IDENT | IDENT (tyvar) | (-> T T) | (all v T) | (set T)
    terms   IDENT | (lam (v T) M) | (app M N) | (tlam v M) | (tapp M T)

Application nodes are strictly binary.  `(set T)` is only produced by the
finite-set extension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .errors import (
    IllFormedType,
    ParseError,
    UnknownConstant,
    UnknownSort,
)

# ---------------------------------------------------------------------------
# Sorts


@dataclass(frozen=True)
class Sort:
    """A base sort: the proposition sort or a named entity sort."""

    kind: str  # "prop" | "entity"
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("prop", "entity"):
            raise ValueError(f"bad sort kind {self.kind!r}")
        if self.kind == "prop" and self.name:
            raise ValueError("the proposition sort is unnamed")
        if self.kind == "entity" and not self.name:
            raise ValueError("entity sorts must be named")

    def __str__(self) -> str:
        return "t" if self.kind == "prop" else f"e:{self.name}"


PROP_SORT = Sort("prop")


def entity_sort(name: str) -> Sort:
    return Sort("entity", name)


# ---------------------------------------------------------------------------
# Types


class Type:
    """Base class of the type language.  Equality is alpha-equivalence."""

    __slots__ = ()

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Type):
            return NotImplemented
        return canon_type(self) == canon_type(other)

    def __ne__(self, other) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self) -> int:
        return hash(canon_type(self))

    def __str__(self) -> str:
        return print_type(self)


@dataclass(frozen=True, eq=False, repr=False)
class Base(Type):
    sort: Sort

    def __repr__(self):
        return f"Base({self.sort})"


@dataclass(frozen=True, eq=False, repr=False)
class TyVar(Type):
    name: str

    def __repr__(self):
        return f"TyVar({self.name})"


@dataclass(frozen=True, eq=False, repr=False)
class Arrow(Type):
    domain: Type
    codomain: Type

    def __repr__(self):
        return f"Arrow({self.domain!r}, {self.codomain!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Forall(Type):
    binder: str
    body: Type

    def __repr__(self):
        return f"Forall({self.binder}, {self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class SetOf(Type):
    """Finite-set type former; a structural node so that type substitution
    can rewrite under it (a reserved base-sort family could not)."""

    elem: Type

    def __repr__(self):
        return f"SetOf({self.elem!r})"


PROP = Base(PROP_SORT)


def etype(name: str) -> Type:
    return Base(entity_sort(name))


def arrows(*types: Type) -> Type:
    """Right-fold arrow: arrows(A, B, C) = A -> (B -> C)."""
    out = types[-1]
    for ty in reversed(types[:-1]):
        out = Arrow(ty, out)
    return out


# ---------------------------------------------------------------------------
# Terms


class Term:
    """Base class of the term language.  Equality is alpha-equivalence."""

    __slots__ = ()

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return canon_term(self) == canon_term(other)

    def __ne__(self, other) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self) -> int:
        return hash(canon_term(self))

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True, eq=False, repr=False)
class Var(Term):
    name: str

    def __repr__(self):
        return f"Var({self.name})"


@dataclass(frozen=True, eq=False, repr=False)
class Const(Term):
    name: str
    declared_type: Type

    def __repr__(self):
        return f"Const({self.name})"


@dataclass(frozen=True, eq=False, repr=False)
class Lam(Term):
    binder: str
    binder_type: Type
    body: Term

    def __repr__(self):
        return f"Lam({self.binder}:{self.binder_type}, {self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class App(Term):
    fn: Term
    arg: Term

    def __repr__(self):
        return f"App({self.fn!r}, {self.arg!r})"


@dataclass(frozen=True, eq=False, repr=False)
class TyLam(Term):
    binder: str
    body: Term

    def __repr__(self):
        return f"TyLam({self.binder}, {self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class TyApp(Term):
    fn: Term
    ty_arg: Type

    def __repr__(self):
        return f"TyApp({self.fn!r}, {self.ty_arg})"


def apps(head: Term, *args) -> Term:
    """Left-fold applications; Type arguments become type applications."""
    out = head
    for a in args:
        out = TyApp(out, a) if isinstance(a, Type) else App(out, a)
    return out


def spine(term: Term) -> tuple[Term, list[Union[Term, Type]]]:
    """Decompose nested applications into (head, eliminations)."""
    elims: list[Union[Term, Type]] = []
    while True:
        if isinstance(term, App):
            elims.append(term.arg)
            term = term.fn
        elif isinstance(term, TyApp):
            elims.append(term.ty_arg)
            term = term.fn
        else:
            return term, list(reversed(elims))


# ---------------------------------------------------------------------------
# Canonical (de Bruijn) keys: the carrier of alpha-equivalence and hashing


def canon_type(ty: Type, env: Mapping[str, int] = {}, depth: int = 0):
    match ty:
        case Base(sort):
            return ("b", sort.kind, sort.name)
        case TyVar(name):
            if name in env:
                return ("i", depth - env[name])
            return ("f", name)
        case Arrow(dom, cod):
            return ("->", canon_type(dom, env, depth), canon_type(cod, env, depth))
        case Forall(binder, body):
            inner = dict(env)
            inner[binder] = depth
            return ("all", canon_type(body, inner, depth + 1))
        case SetOf(elem):
            return ("set", canon_type(elem, env, depth))
    raise TypeError(f"not a Type: {ty!r}")


def canon_term(term: Term, tenv: Mapping[str, int] = {}, tyenv: Mapping[str, int] = {}, depth: int = 0):
    match term:
        case Var(name):
            if name in tenv:
                return ("i", depth - tenv[name])
            return ("fv", name)
        case Const(name, declared):
            return ("c", name, canon_type(declared, tyenv, depth))
        case Lam(binder, binder_type, body):
            inner = dict(tenv)
            inner[binder] = depth
            return (
                "lam",
                canon_type(binder_type, tyenv, depth),
                canon_term(body, inner, tyenv, depth + 1),
            )
        case App(fn, arg):
            return ("app", canon_term(fn, tenv, tyenv, depth), canon_term(arg, tenv, tyenv, depth))
        case TyLam(binder, body):
            inner = dict(tyenv)
            inner[binder] = depth
            return ("tlam", canon_term(body, tenv, inner, depth + 1))
        case TyApp(fn, ty_arg):
            return ("tapp", canon_term(fn, tenv, tyenv, depth), canon_type(ty_arg, tyenv, depth))
    raise TypeError(f"not a Term: {term!r}")


def alpha_eq(a, b) -> bool:
    """Alpha-equivalence, over both Terms and Types."""
    if isinstance(a, Type) and isinstance(b, Type):
        return canon_type(a) == canon_type(b)
    if isinstance(a, Term) and isinstance(b, Term):
        return canon_term(a) == canon_term(b)
    return False


# ---------------------------------------------------------------------------
# Free variables and well-formedness


def free_tyvars(ty: Type) -> frozenset[str]:
    match ty:
        case Base():
            return frozenset()
        case TyVar(name):
            return frozenset((name,))
        case Arrow(dom, cod):
            return free_tyvars(dom) | free_tyvars(cod)
        case Forall(binder, body):
            return free_tyvars(body) - {binder}
        case SetOf(elem):
            return free_tyvars(elem)
    raise TypeError(f"not a Type: {ty!r}")


def free_vars(term: Term) -> frozenset[str]:
    match term:
        case Var(name):
            return frozenset((name,))
        case Const():
            return frozenset()
        case Lam(binder, _, body):
            return free_vars(body) - {binder}
        case App(fn, arg):
            return free_vars(fn) | free_vars(arg)
        case TyLam(_, body):
            return free_vars(body)
        case TyApp(fn, _):
            return free_vars(fn)
    raise TypeError(f"not a Term: {term!r}")


def free_tyvars_in_term(term: Term) -> frozenset[str]:
    match term:
        case Var():
            return frozenset()
        case Const(_, declared):
            return free_tyvars(declared)
        case Lam(_, binder_type, body):
            return free_tyvars(binder_type) | free_tyvars_in_term(body)
        case App(fn, arg):
            return free_tyvars_in_term(fn) | free_tyvars_in_term(arg)
        case TyLam(binder, body):
            return free_tyvars_in_term(body) - {binder}
        case TyApp(fn, ty_arg):
            return free_tyvars_in_term(fn) | free_tyvars(ty_arg)
    raise TypeError(f"not a Term: {term!r}")


def check_wf_type(ty: Type, sorts: frozenset[Sort], tyvars: frozenset[str] = frozenset(), path: tuple = ()) -> None:
    """Raise IllFormedType unless `ty` only mentions declared sorts and
    bound/context type variables."""
    match ty:
        case Base(sort):
            if sort.kind == "entity" and sort not in sorts:
                raise IllFormedType(f"undeclared sort {sort}", path)
        case TyVar(name):
            if name not in tyvars:
                raise IllFormedType(f"unbound type variable {name}", path)
        case Arrow(dom, cod):
            check_wf_type(dom, sorts, tyvars, path + ("domain",))
            check_wf_type(cod, sorts, tyvars, path + ("codomain",))
        case Forall(binder, body):
            check_wf_type(body, sorts, tyvars | {binder}, path + ("body",))
        case SetOf(elem):
            check_wf_type(elem, sorts, tyvars, path + ("elem",))
        case _:
            raise TypeError(f"not a Type: {ty!r}")


def fresh_name(base: str, avoid) -> str:
    """A name not in `avoid`, derived from `base` by priming."""
    if base not in avoid:
        return base
    stem = base.split("'", 1)[0] or "x"
    k = 1
    while f"{stem}'{k}" in avoid:
        k += 1
    return f"{stem}'{k}"


# ---------------------------------------------------------------------------
# Signature


@dataclass(frozen=True)
class Signature:
    """Declared sorts plus typed constants.

    `definitions` holds transparently definable constants (expanded before
    composition; the kernel itself treats all constants as opaque).  `rules`
    holds recursor reduction rules registered by the inductive extensions.
    """

    sorts: frozenset[Sort] = frozenset((PROP_SORT,))
    constants: dict[str, Type] = field(default_factory=dict)
    definitions: dict[str, Term] = field(default_factory=dict)
    rules: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "sorts", frozenset(self.sorts) | {PROP_SORT})

    def has_constant(self, name: str) -> bool:
        return name in self.constants

    def constant_type(self, name: str) -> Type:
        try:
            return self.constants[name]
        except KeyError:
            raise UnknownConstant(f"unknown constant {name!r}") from None

    def const(self, name: str) -> Const:
        return Const(name, self.constant_type(name))

    def extend(self, sorts=(), constants: Optional[Mapping[str, Type]] = None,
               definitions: Optional[Mapping[str, Term]] = None, rules=()) -> "Signature":
        new_consts = dict(self.constants)
        new_consts.update(constants or {})
        new_defs = dict(self.definitions)
        new_defs.update(definitions or {})
        return Signature(
            sorts=self.sorts | frozenset(sorts),
            constants=new_consts,
            definitions=new_defs,
            rules=self.rules + tuple(rules),
        )

    def entity_sorts(self) -> list[Sort]:
        return sorted((s for s in self.sorts if s.kind == "entity"), key=lambda s: s.name)

    def validate(self) -> None:
        """Check every constant type is closed and well-formed, and that the
        distinguished logical constants carry exactly their required types."""
        for name, ty in self.constants.items():
            check_wf_type(ty, self.sorts, frozenset(), (name,))
        required = {
            "∧": arrows(PROP, PROP, PROP),
            "¬": Arrow(PROP, PROP),
            "⊃": arrows(PROP, PROP, PROP),
            "∀": Forall("a", Arrow(Arrow(TyVar("a"), PROP), PROP)),
            "∃": Forall("a", Arrow(Arrow(TyVar("a"), PROP), PROP)),
            "ε": Forall("a", Arrow(Arrow(TyVar("a"), PROP), TyVar("a"))),
            "τ": Forall("a", Arrow(Arrow(TyVar("a"), PROP), TyVar("a"))),
        }
        for name, expected in required.items():
            if name in self.constants and self.constants[name] != expected:
                raise IllFormedType(
                    f"constant {name} must have type {expected}, has {self.constants[name]}"
                )


# ---------------------------------------------------------------------------
# S-expression reader


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            col += 1
            i += 1
        elif c in "()":
            tokens.append(_Token(c, line, col))
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in "() \t\r\n":
                i += 1
                col += 1
            tokens.append(_Token(text[start:i], line, start_col))
    return tokens


class _SexprNode:
    __slots__ = ("items", "atom", "line", "col")

    def __init__(self, items=None, atom=None, line=0, col=0):
        self.items = items
        self.atom = atom
        self.line = line
        self.col = col


def _read_sexpr(tokens: list[_Token], pos: int) -> tuple[_SexprNode, int]:
    if pos >= len(tokens):
        raise ParseError("unexpected end of input")
    tok = tokens[pos]
    if tok.text == ")":
        raise ParseError("unexpected ')'", tok.line, tok.col)
    if tok.text == "(":
        items = []
        pos += 1
        while True:
            if pos >= len(tokens):
                raise ParseError("unclosed '('", tok.line, tok.col)
            if tokens[pos].text == ")":
                return _SexprNode(items=items, line=tok.line, col=tok.col), pos + 1
            node, pos = _read_sexpr(tokens, pos)
            items.append(node)
    return _SexprNode(atom=tok.text, line=tok.line, col=tok.col), pos + 1


def parse_sexpr(text: str) -> _SexprNode:
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input")
    node, pos = _read_sexpr(tokens, 0)
    if pos != len(tokens):
        t = tokens[pos]
        raise ParseError(f"trailing input {t.text!r}", t.line, t.col)
    return node


# ---------------------------------------------------------------------------
# Type and term parsing


def _type_from_sexpr(node: _SexprNode, known_sorts) -> Type:
    if node.atom is not None:
        a = node.atom
        if a == "t":
            return PROP
        if a.startswith("e:"):
            name = a[2:]
            if not name:
                raise ParseError("empty entity sort name", node.line, node.col)
            if known_sorts is not None and entity_sort(name) not in known_sorts:
                raise UnknownSort(f"undeclared sort e:{name}", node.line, node.col)
            return etype(name)
        return TyVar(a)
    items = node.items
    if not items or items[0].atom is None:
        raise ParseError("expected a type form", node.line, node.col)
    head = items[0].atom
    if head == "->":
        if len(items) != 3:
            raise ParseError("(-> T T) takes exactly two types", node.line, node.col)
        return Arrow(_type_from_sexpr(items[1], known_sorts), _type_from_sexpr(items[2], known_sorts))
    if head == "all":
        if len(items) != 3 or items[1].atom is None:
            raise ParseError("(all v T) takes a variable and a type", node.line, node.col)
        return Forall(items[1].atom, _type_from_sexpr(items[2], known_sorts))
    if head == "set":
        if len(items) != 2:
            raise ParseError("(set T) takes exactly one type", node.line, node.col)
        return SetOf(_type_from_sexpr(items[1], known_sorts))
    raise ParseError(f"unknown type form {head!r}", node.line, node.col)


def parse_type(text: str, known_sorts=None) -> Type:
    """Parse a type.  When `known_sorts` (a collection of Sort) is given,
    undeclared entity sorts raise UnknownSort."""
    return _type_from_sexpr(parse_sexpr(text), known_sorts)


def _term_from_sexpr(node: _SexprNode, sig: Signature, bound: frozenset[str], allow_free: bool) -> Term:
    if node.atom is not None:
        name = node.atom
        if name in bound:
            return Var(name)
        if sig.has_constant(name):
            return Const(name, sig.constants[name])
        if allow_free:
            return Var(name)
        raise UnknownConstant(f"unknown constant {name!r}", node.line, node.col)
    items = node.items
    if not items or items[0].atom is None:
        raise ParseError("expected a term form", node.line, node.col)
    head = items[0].atom
    if head == "lam":
        if (len(items) != 3 or items[1].items is None or len(items[1].items) != 2
                or items[1].items[0].atom is None):
            raise ParseError("(lam (v T) M) expected", node.line, node.col)
        binder = items[1].items[0].atom
        binder_type = _type_from_sexpr(items[1].items[1], None)
        body = _term_from_sexpr(items[2], sig, bound | {binder}, allow_free)
        return Lam(binder, binder_type, body)
    if head == "app":
        if len(items) != 3:
            raise ParseError("(app M N) is strictly binary", node.line, node.col)
        return App(
            _term_from_sexpr(items[1], sig, bound, allow_free),
            _term_from_sexpr(items[2], sig, bound, allow_free),
        )
    if head == "tlam":
        if len(items) != 3 or items[1].atom is None:
            raise ParseError("(tlam v M) expected", node.line, node.col)
        return TyLam(items[1].atom, _term_from_sexpr(items[2], sig, bound, allow_free))
    if head == "tapp":
        if len(items) != 3:
            raise ParseError("(tapp M T) expected", node.line, node.col)
        return TyApp(
            _term_from_sexpr(items[1], sig, bound, allow_free),
            _type_from_sexpr(items[2], None),
        )
    raise ParseError(f"unknown term form {head!r}", node.line, node.col)


def parse_term(text: str, sig: Signature, allow_free: bool = True) -> Term:
    """Parse a term against `sig`.  Identifiers resolve first to enclosing
    binders, then to signature constants; anything else is a free variable
    unless `allow_free` is false, in which case it raises UnknownConstant."""
    return _term_from_sexpr(parse_sexpr(text), sig, frozenset(), allow_free)


# ---------------------------------------------------------------------------
# Printing (inverse of parsing, up to alpha-equivalence)


def print_type(ty: Type) -> str:
    match ty:
        case Base(sort):
            return str(sort)
        case TyVar(name):
            return name
        case Arrow(dom, cod):
            return f"(-> {print_type(dom)} {print_type(cod)})"
        case Forall(binder, body):
            return f"(all {binder} {print_type(body)})"
        case SetOf(elem):
            return f"(set {print_type(elem)})"
    raise TypeError(f"not a Type: {ty!r}")


def print_term(term: Term) -> str:
    match term:
        case Var(name):
            return name
        case Const(name, _):
            return name
        case Lam(binder, binder_type, body):
            return f"(lam ({binder} {print_type(binder_type)}) {print_term(body)})"
        case App(fn, arg):
            return f"(app {print_term(fn)} {print_term(arg)})"
        case TyLam(binder, body):
            return f"(tlam {binder} {print_term(body)})"
        case TyApp(fn, ty_arg):
            return f"(tapp {print_term(fn)} {print_type(ty_arg)})"
    raise TypeError(f"not a Term: {term!r}")
