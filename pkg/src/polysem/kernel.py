"""Kernel: typing, substitution, reduction and normal forms.

Terms are Church-style, so typechecking is syntax-directed and needs no
unification.  Reduction contracts beta-redexes, type-beta-redexes and any
recursor rules registered on the signature; constants are otherwise opaque
heads.  Eta-long forms are computed only after beta-normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    FuelExhausted,
    IllFormedType,
    TypeMismatch,
    UnboundVariable,
)
from .syntax import (
    App,
    Arrow,
    Base,
    Const,
    Forall,
    Lam,
    SetOf,
    Signature,
    Term,
    TyApp,
    TyLam,
    TyVar,
    Type,
    Var,
    check_wf_type,
    free_tyvars,
    free_tyvars_in_term,
    free_vars,
    fresh_name,
    spine,
)

LEFTMOST_OUTERMOST = "leftmost-outermost"
RIGHTMOST_INNERMOST = "rightmost-innermost"

DEFAULT_FUEL = 100_000


@dataclass(frozen=True)
class TypingContext:
    """Term-variable typings plus the type variables in scope."""

    term_vars: dict[str, Type] = field(default_factory=dict)
    ty_vars: frozenset[str] = frozenset()

    def bind(self, name: str, ty: Type) -> "TypingContext":
        new = dict(self.term_vars)
        new[name] = ty
        return TypingContext(new, self.ty_vars)

    def bind_ty(self, name: str) -> "TypingContext":
        return TypingContext(dict(self.term_vars), self.ty_vars | {name})


EMPTY_CONTEXT = TypingContext()


@dataclass(frozen=True)
class NormalForm:
    term: Term
    eta_long: bool
    beta_normal: bool


# ---------------------------------------------------------------------------
# Substitution


def subst_type(ty: Type, var: str, replacement: Type) -> Type:
    """Capture-avoiding [var := replacement] on a type."""
    match ty:
        case Base():
            return ty
        case TyVar(name):
            return replacement if name == var else ty
        case Arrow(dom, cod):
            return Arrow(subst_type(dom, var, replacement), subst_type(cod, var, replacement))
        case Forall(binder, body):
            if binder == var:
                return ty
            if binder in free_tyvars(replacement) and var in free_tyvars(body):
                fresh = fresh_name(binder, free_tyvars(replacement) | free_tyvars(body) | {var})
                body = subst_type(body, binder, TyVar(fresh))
                binder = fresh
            return Forall(binder, subst_type(body, var, replacement))
        case SetOf(elem):
            return SetOf(subst_type(elem, var, replacement))
    raise TypeError(f"not a Type: {ty!r}")


def substitute(term: Term, var: str, replacement: Term) -> Term:
    """Capture-avoiding term substitution [var := replacement]."""
    fv = None  # computed lazily; replacement is often closed

    def go(t: Term) -> Term:
        nonlocal fv
        match t:
            case Var(name):
                return replacement if name == var else t
            case Const():
                return t
            case Lam(binder, binder_type, body):
                if binder == var:
                    return t
                if var not in free_vars(body):
                    return t
                if fv is None:
                    fv = free_vars(replacement)
                if binder in fv:
                    fresh = fresh_name(binder, fv | free_vars(body) | {var})
                    body = substitute(body, binder, Var(fresh))
                    binder = fresh
                return Lam(binder, binder_type, go(body))
            case App(fn, arg):
                return App(go(fn), go(arg))
            case TyLam(binder, body):
                if var not in free_vars(body):
                    return t
                if fv is None:
                    fv = free_vars(replacement)
                ftv = free_tyvars_in_term(replacement)
                if binder in ftv:
                    fresh = fresh_name(binder, ftv | free_tyvars_in_term(body))
                    body = substitute_ty(body, binder, TyVar(fresh))
                    binder = fresh
                return TyLam(binder, go(body))
            case TyApp(fn, ty_arg):
                return TyApp(go(fn), ty_arg)
        raise TypeError(f"not a Term: {t!r}")

    return go(term)


def substitute_ty(term: Term, var: str, replacement: Type) -> Term:
    """Capture-avoiding type substitution [var := replacement] inside a term."""

    def go(t: Term) -> Term:
        match t:
            case Var():
                return t
            case Const():
                # constant types are closed over the signature's sorts
                return t
            case Lam(binder, binder_type, body):
                return Lam(binder, subst_type(binder_type, var, replacement), go(body))
            case App(fn, arg):
                return App(go(fn), go(arg))
            case TyLam(binder, body):
                if binder == var:
                    return t
                if binder in free_tyvars(replacement) and var in free_tyvars_in_term(body):
                    fresh = fresh_name(binder, free_tyvars(replacement) | free_tyvars_in_term(body) | {var})
                    body = substitute_ty(body, binder, TyVar(fresh))
                    binder = fresh
                return TyLam(binder, go(body))
            case TyApp(fn, ty_arg):
                return TyApp(go(fn), subst_type(ty_arg, var, replacement))
        raise TypeError(f"not a Term: {t!r}")

    return go(term)


# ---------------------------------------------------------------------------
# Typechecking


def typecheck(term: Term, sig: Signature, ctx: TypingContext = EMPTY_CONTEXT, path: tuple = ()) -> Type:
    """The unique type of `term` under `ctx`, or a TypeCheckError."""
    match term:
        case Var(name):
            ty = ctx.term_vars.get(name)
            if ty is None:
                raise UnboundVariable(f"unbound variable {name}", path)
            return ty
        case Const(name, declared):
            sig_ty = sig.constants.get(name)
            if sig_ty is None:
                raise UnboundVariable(f"constant {name} not in signature", path)
            if declared != sig_ty:
                raise TypeMismatch(sig_ty, declared, path)
            return declared
        case Lam(binder, binder_type, body):
            try:
                check_wf_type(binder_type, sig.sorts, ctx.ty_vars)
            except IllFormedType as e:
                raise IllFormedType(str(e), path) from None
            body_ty = typecheck(body, sig, ctx.bind(binder, binder_type), path + ("body",))
            return Arrow(binder_type, body_ty)
        case App(fn, arg):
            fn_ty = typecheck(fn, sig, ctx, path + ("fn",))
            arg_ty = typecheck(arg, sig, ctx, path + ("arg",))
            if not isinstance(fn_ty, Arrow):
                raise TypeMismatch(f"a function accepting {arg_ty}", fn_ty, path + ("fn",))
            if fn_ty.domain != arg_ty:
                raise TypeMismatch(fn_ty.domain, arg_ty, path + ("arg",))
            return fn_ty.codomain
        case TyLam(binder, body):
            if binder in ctx.ty_vars:
                fresh = fresh_name(binder, ctx.ty_vars | free_tyvars_in_term(body))
                body = substitute_ty(body, binder, TyVar(fresh))
                binder = fresh
            body_ty = typecheck(body, sig, ctx.bind_ty(binder), path + ("body",))
            return Forall(binder, body_ty)
        case TyApp(fn, ty_arg):
            fn_ty = typecheck(fn, sig, ctx, path + ("fn",))
            if not isinstance(fn_ty, Forall):
                raise TypeMismatch("a universally quantified type", fn_ty, path + ("fn",))
            try:
                check_wf_type(ty_arg, sig.sorts, ctx.ty_vars)
            except IllFormedType as e:
                raise IllFormedType(str(e), path) from None
            return subst_type(fn_ty.body, fn_ty.binder, ty_arg)
    raise TypeError(f"not a Term: {term!r}")


# ---------------------------------------------------------------------------
# Reduction


def _contract(term: Term, sig: Signature) -> Optional[Term]:
    """Contract `term` if it is itself a redex; None otherwise."""
    match term:
        case App(Lam(binder, _, body), arg):
            return substitute(body, binder, arg)
        case TyApp(TyLam(binder, body), ty_arg):
            return substitute_ty(body, binder, ty_arg)
    for rule in sig.rules:
        out = rule.try_rewrite(term)
        if out is not None:
            return out
    return None


def reduce_once(term: Term, sig: Signature, strategy: str = LEFTMOST_OUTERMOST) -> Optional[Term]:
    """Contract exactly one redex per the strategy; None when beta-normal."""
    if strategy == LEFTMOST_OUTERMOST:
        return _reduce_lo(term, sig)
    if strategy == RIGHTMOST_INNERMOST:
        return _reduce_ri(term, sig)
    raise ValueError(f"unknown strategy {strategy!r}")


def _reduce_lo(term: Term, sig: Signature) -> Optional[Term]:
    out = _contract(term, sig)
    if out is not None:
        return out
    match term:
        case Lam(binder, binder_type, body):
            b = _reduce_lo(body, sig)
            return None if b is None else Lam(binder, binder_type, b)
        case App(fn, arg):
            f = _reduce_lo(fn, sig)
            if f is not None:
                return App(f, arg)
            a = _reduce_lo(arg, sig)
            return None if a is None else App(fn, a)
        case TyLam(binder, body):
            b = _reduce_lo(body, sig)
            return None if b is None else TyLam(binder, b)
        case TyApp(fn, ty_arg):
            f = _reduce_lo(fn, sig)
            return None if f is None else TyApp(f, ty_arg)
    return None


def _reduce_ri(term: Term, sig: Signature) -> Optional[Term]:
    match term:
        case Lam(binder, binder_type, body):
            b = _reduce_ri(body, sig)
            if b is not None:
                return Lam(binder, binder_type, b)
        case App(fn, arg):
            a = _reduce_ri(arg, sig)
            if a is not None:
                return App(fn, a)
            f = _reduce_ri(fn, sig)
            if f is not None:
                return App(f, arg)
        case TyLam(binder, body):
            b = _reduce_ri(body, sig)
            if b is not None:
                return TyLam(binder, b)
        case TyApp(fn, ty_arg):
            f = _reduce_ri(fn, sig)
            if f is not None:
                return TyApp(f, ty_arg)
    return _contract(term, sig)


def is_beta_normal(term: Term, sig: Signature) -> bool:
    if _contract(term, sig) is not None:
        return False
    match term:
        case Var() | Const():
            return True
        case Lam(_, _, body) | TyLam(_, body):
            return is_beta_normal(body, sig)
        case App(fn, arg):
            return is_beta_normal(fn, sig) and is_beta_normal(arg, sig)
        case TyApp(fn, _):
            return is_beta_normal(fn, sig)
    raise TypeError(f"not a Term: {term!r}")


def normalize(term: Term, sig: Signature, fuel: int = DEFAULT_FUEL,
              strategy: str = LEFTMOST_OUTERMOST) -> NormalForm:
    """Beta-normalize (including type-beta and recursor rules)."""
    current = term
    steps = 0
    while True:
        nxt = reduce_once(current, sig, strategy)
        if nxt is None:
            return NormalForm(current, eta_long=is_eta_long(current, sig), beta_normal=True)
        steps += 1
        if steps > fuel:
            raise FuelExhausted(f"no normal form within {fuel} steps")
        current = nxt


# ---------------------------------------------------------------------------
# Eta-long forms


def eta_expand(term: Term, sig: Signature, ctx: TypingContext = EMPTY_CONTEXT) -> NormalForm:
    """Eta-long form of a beta-normal, well-typed term."""
    ty = typecheck(term, sig, ctx)
    out = _eta(term, ty, sig, ctx)
    return NormalForm(out, eta_long=True, beta_normal=True)


def _eta(term: Term, ty: Type, sig: Signature, ctx: TypingContext) -> Term:
    match ty:
        case Arrow(dom, cod):
            if isinstance(term, Lam):
                inner = ctx.bind(term.binder, term.binder_type)
                return Lam(term.binder, term.binder_type, _eta(term.body, cod, sig, inner))
            x = fresh_name("x", free_vars(term) | set(ctx.term_vars))
            inner = ctx.bind(x, dom)
            return Lam(x, dom, _eta(App(term, Var(x)), cod, sig, inner))
        case Forall(binder, body_ty):
            if isinstance(term, TyLam):
                a = term.binder
                inner = ctx.bind_ty(a)
                return TyLam(a, _eta(term.body, subst_type(body_ty, binder, TyVar(a)), sig, inner))
            a = fresh_name(binder, free_tyvars_in_term(term) | ctx.ty_vars)
            inner = ctx.bind_ty(a)
            return TyLam(a, _eta(TyApp(term, TyVar(a)), subst_type(body_ty, binder, TyVar(a)), sig, inner))
        case _:
            return _eta_spine(term, sig, ctx)


def _eta_spine(term: Term, sig: Signature, ctx: TypingContext) -> Term:
    head, elims = spine(term)
    match head:
        case Var(name):
            head_ty = ctx.term_vars[name]
        case Const(_, declared):
            head_ty = declared
        case _:
            # beta-normal atomic-type spines can only be headed by a
            # variable or constant
            raise TypeMismatch("a neutral spine head", head, ())
    out: Term = head
    cur = head_ty
    for e in elims:
        if isinstance(e, Type):
            assert isinstance(cur, Forall)
            out = TyApp(out, e)
            cur = subst_type(cur.body, cur.binder, e)
        else:
            assert isinstance(cur, Arrow)
            out = App(out, _eta(e, cur.domain, sig, ctx))
            cur = cur.codomain
    return out


def is_eta_long(term: Term, sig: Signature, ctx: TypingContext = EMPTY_CONTEXT) -> bool:
    """Structural check of the eta-long discipline on a beta-normal term."""
    try:
        ty = typecheck(term, sig, ctx)
    except Exception:
        return False
    return _is_eta_long(term, ty, sig, ctx)


def _is_eta_long(term: Term, ty: Type, sig: Signature, ctx: TypingContext) -> bool:
    match ty:
        case Arrow(_, cod):
            if not isinstance(term, Lam):
                return False
            inner = ctx.bind(term.binder, term.binder_type)
            return _is_eta_long(term.body, cod, sig, inner)
        case Forall(binder, body_ty):
            if not isinstance(term, TyLam):
                return False
            inner = ctx.bind_ty(term.binder)
            return _is_eta_long(term.body, subst_type(body_ty, binder, TyVar(term.binder)), sig, inner)
        case _:
            head, elims = spine(term)
            match head:
                case Var(name):
                    cur = ctx.term_vars.get(name)
                    if cur is None:
                        return False
                case Const(_, declared):
                    cur = declared
                case _:
                    return False
            for e in elims:
                if isinstance(e, Type):
                    if not isinstance(cur, Forall):
                        return False
                    cur = subst_type(cur.body, cur.binder, e)
                else:
                    if not isinstance(cur, Arrow):
                        return False
                    if not _is_eta_long(e, cur.domain, sig, ctx):
                        return False
                    cur = cur.codomain
            return not isinstance(cur, (Arrow, Forall))


# ---------------------------------------------------------------------------
# First-order matching of a domain pattern against an argument type


def match_type(pattern: Type, subject: Type, holes: frozenset[str],
               theta: Optional[dict[str, Type]] = None) -> Optional[dict[str, Type]]:
    """First-order syntactic matching: instantiate `holes` occurring in
    `pattern` so that it alpha-equals `subject`.  Returns the substitution or
    None.  No unification: `subject` is never rewritten."""
    theta = dict(theta) if theta else {}
    if _match(pattern, subject, holes, theta, {}, frozenset()):
        return theta
    return None


def _match(pat: Type, sub: Type, holes, theta, bound_pairs: dict, sub_bound: frozenset) -> bool:
    match pat:
        case TyVar(name) if name in bound_pairs:
            return isinstance(sub, TyVar) and sub.name == bound_pairs[name]
        case TyVar(name) if name in holes:
            if free_tyvars(sub) & sub_bound:
                return False  # subject-bound variables may not escape
            if name in theta:
                return theta[name] == sub
            theta[name] = sub
            return True
        case TyVar(name):
            return isinstance(sub, TyVar) and sub.name == name
        case Base(sort):
            return isinstance(sub, Base) and sub.sort == sort
        case Arrow(dom, cod):
            return (isinstance(sub, Arrow)
                    and _match(dom, sub.domain, holes, theta, bound_pairs, sub_bound)
                    and _match(cod, sub.codomain, holes, theta, bound_pairs, sub_bound))
        case Forall(binder, body):
            if not isinstance(sub, Forall):
                return False
            inner = dict(bound_pairs)
            inner[binder] = sub.binder
            return _match(body, sub.body, holes, theta, inner, sub_bound | {sub.binder})
        case SetOf(elem):
            return isinstance(sub, SetOf) and _match(elem, sub.elem, holes, theta, bound_pairs, sub_bound)
    raise TypeError(f"not a Type: {pat!r}")


# ---------------------------------------------------------------------------
# Definable constants


def expand_definitions(term: Term, sig: Signature) -> Term:
    """Replace every definable constant by its definition.  Definitions are
    closed and non-recursive, so one bottom-up pass suffices."""
    if not sig.definitions:
        return term

    def go(t: Term) -> Term:
        match t:
            case Const(name, _):
                d = sig.definitions.get(name)
                return go(d) if d is not None else t
            case Var():
                return t
            case Lam(binder, binder_type, body):
                return Lam(binder, binder_type, go(body))
            case App(fn, arg):
                return App(go(fn), go(arg))
            case TyLam(binder, body):
                return TyLam(binder, go(body))
            case TyApp(fn, ty_arg):
                return TyApp(go(fn), ty_arg)
        raise TypeError(f"not a Term: {t!r}")

    return go(term)
