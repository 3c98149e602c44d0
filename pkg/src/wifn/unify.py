"""Sorted syntactic unification of message-space patterns against sent messages.

Sorts: constants are rigid, parameters bind only to atoms, variables bind to
anything (with occurs check). When a context is supplied, a parameter binds
only to an atom of the same kind: principals to principals, keys to keys,
and any other atom only to one with the same base name.
"""
from __future__ import annotations

import itertools
from collections import deque
from typing import Protocol

from .errors import SortError
from .terms import (
    Enc, Hash, Pair, Param, Position, Substitution, Term, Var,
    alpha_rename, apply, children, is_atom, params, variables, walk,
)


class Sorts(Protocol):
    def kind(self, name: str) -> str: ...


def compatible(p: Param, atom: Term, sorts: Sorts | None) -> bool:
    if sorts is None:
        return True
    kp, ka = sorts.kind(p.name), sorts.kind(atom.name)
    if kp != ka:
        return False
    return kp in ("principal", "key") or p.name == atom.name


def _occurs(v: Var, t: Term) -> bool:
    return any(s == v for _, s in walk(t))


def mgu(pattern: Term, target: Term, sorts: Sorts | None = None) -> Substitution | None:
    """Most general sorted unifier, or None.

    Flexible symbols of the pattern are bound in preference to those of the
    target, so parameter bindings read pattern -> target.

    >>> from wifn.terms import parse_term
    >>> s = mgu(parse_term("{?Y1.A@4}kB@5"), parse_term("{Na.A}kb"))
    >>> sorted(f"{k} -> {v}" for k, v in s.items())
    ['?Y1 -> Na', 'A@4 -> A', 'kB@5 -> kb']
    """
    try:
        return _mgu(pattern, target, sorts)
    except SortError:  # a key variable would have to become compound
        return None


def _mgu(pattern: Term, target: Term, sorts: Sorts | None) -> Substitution | None:
    sigma: dict[Term, Term] = {}
    todo = deque([(pattern, target)])

    def bind(x: Term, t: Term):
        one = {x: t}
        for k in list(sigma):
            sigma[k] = apply(one, sigma[k])
        sigma[x] = t

    while todo:
        s, t = todo.popleft()
        s, t = apply(sigma, s), apply(sigma, t)
        if s == t:
            continue
        if isinstance(s, Var):
            if _occurs(s, t):
                return None
            bind(s, t)
        elif isinstance(t, Var):
            if _occurs(t, s):
                return None
            bind(t, s)
        elif isinstance(s, Param) and is_atom(t):
            if not compatible(s, t, sorts):
                return None
            bind(s, t)
        elif isinstance(t, Param) and is_atom(s):
            if not compatible(t, s, sorts):
                return None
            bind(t, s)
        elif type(s) is type(t) and isinstance(s, (Pair, Enc, Hash)):
            todo.extend(zip(children(s), children(t)))
        else:
            return None
    return Substitution(sigma)


def _focus_free(pattern: Term, target: Term, sigma: Substitution, focus: Var) -> bool:
    """The focus variable must stay generic: it may only meet pattern variables."""
    if not isinstance(apply(sigma, focus), Var):
        return False
    for pos, s in walk(target):
        if s != focus:
            continue
        node = pattern
        for i in pos:
            if isinstance(node, Var):
                break
            node = children(node)[i]
        if not isinstance(node, Var):
            return False
    return True


def rename_apart(pattern: Term, target: Term) -> Term:
    """Deterministically rename pattern so it shares no Var/Param with target."""
    taken = variables(target) | params(target)
    renamed = pattern
    for n in itertools.count():
        if not (variables(renamed) | params(renamed)) & taken:
            return renamed
        renamed = alpha_rename(pattern, f"r{n}")


def unifiable_patterns(space, target: Term, sorts: Sorts | None = None,
                       focus: Var | None | str = "all") -> list[tuple[Term, Substitution]]:
    """Patterns of the space (renamed apart) that unify with target, in order.

    Bare-variable patterns are skipped unless the target is itself a bare
    variable: they match everything and have no static part. Variables of
    the target in `focus` (by default all of them) must only be aligned with
    pattern variables, never instantiated.
    """
    if focus == "all":
        focused = variables(target)
    elif focus is None:
        focused = frozenset()
    else:
        focused = frozenset({focus})
    hits = []
    for pattern in space:
        if isinstance(pattern, Var) and not isinstance(target, Var):
            continue
        renamed = rename_apart(pattern, target)
        sigma = mgu(renamed, target, sorts)
        if sigma is None:
            continue
        if all(_focus_free(renamed, target, sigma, v) for v in focused):
            hits.append((renamed, sigma))
    return hits


def align(pattern: Term, pos: Position) -> tuple[Position, Term]:
    """Follow pos into pattern, stopping early at a variable."""
    node, taken = pattern, ()
    for i in pos:
        if isinstance(node, Var) or not children(node):
            break
        node = children(node)[i]
        taken += (i,)
    return taken, node

