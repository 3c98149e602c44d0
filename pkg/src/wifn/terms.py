"""Message algebra: terms, substitutions, theory normalization and derivation.

Text syntax (also used by every input file)::

    Na  kb  A          constants
    Na@s  kB@4         parameters (static names) with a rename tag
    ?X                 variables
    a.b.c              pairing, right associative; parentheses group
    {m}k  or  {m}_k    encryption of m under the atomic key k
    h(m)               hash
    eps                the empty message
"""
from __future__ import annotations

import re
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from enum import Enum

from .errors import ParseError, SortError


class Theory(Enum):
    EMPTY = "empty"
    HOMOMORPHIC = "homomorphic"


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Param(Term):
    """A flexible atom: binds only to atoms during unification."""

    name: str
    tag: str

    @property
    def label(self) -> str:
        return f"{self.name}@{self.tag}"


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Enc(Term):
    body: Term
    key: Term

    def __post_init__(self):
        if not isinstance(self.key, (Const, Param, Var)):
            raise SortError(f"encryption key must be atomic, got {self.key!r}")


@dataclass(frozen=True, slots=True)
class Hash(Term):
    body: Term


@dataclass(frozen=True, slots=True)
class Epsilon(Term):
    pass


EPS = Epsilon()
Atom = Const | Param
Position = tuple[int, ...]


def is_atom(t: Term) -> bool:
    return isinstance(t, (Const, Param))


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, Pair):
        return (t.left, t.right)
    if isinstance(t, Enc):
        return (t.body, t.key)
    if isinstance(t, Hash):
        return (t.body,)
    return ()


def rebuild(t: Term, kids: tuple[Term, ...]) -> Term:
    if isinstance(t, Pair):
        return Pair(*kids)
    if isinstance(t, Enc):
        return Enc(*kids)
    if isinstance(t, Hash):
        return Hash(*kids)
    return t


def walk(t: Term, pos: Position = ()) -> Iterator[tuple[Position, Term]]:
    """Pre-order traversal yielding (position, subterm)."""
    yield pos, t
    for i, c in enumerate(children(t)):
        yield from walk(c, pos + (i,))


def subterm(t: Term, pos: Position) -> Term:
    for i in pos:
        t = children(t)[i]
    return t


def atoms(m: Term) -> frozenset[Term]:
    """Constants and parameters occurring anywhere, keys included."""
    return frozenset(s for _, s in walk(m) if is_atom(s))


def variables(m: Term) -> frozenset[Var]:
    return frozenset(s for _, s in walk(m) if isinstance(s, Var))


def params(m: Term) -> frozenset[Param]:
    return frozenset(s for _, s in walk(m) if isinstance(s, Param))


def split_pairs(m: Term) -> list[Term]:
    """Flatten the top-level pairing tree into its components."""
    if isinstance(m, Pair):
        return split_pairs(m.left) + split_pairs(m.right)
    return [m]


def size(m: Term) -> int:
    return sum(1 for _ in walk(m))


def depth(m: Term) -> int:
    kids = children(m)
    return 1 + max((depth(c) for c in kids), default=0)


# Substitutions

class Substitution(Mapping):
    """Finite map from Vars and Params to terms.

    Params may only be bound to atoms or variables; identity bindings are dropped.
    """

    __slots__ = ("_map",)

    def __init__(self, bindings: Mapping[Term, Term] | None = None):
        clean = {}
        for k, v in (bindings or {}).items():
            if not isinstance(k, (Var, Param)):
                raise SortError(f"cannot bind non-variable {k}")
            if isinstance(k, Param) and not isinstance(v, (Const, Param, Var)):
                raise SortError(f"parameter {k} bound to compound {v}")
            if k != v:
                clean[k] = v
        self._map = clean

    def __getitem__(self, k):
        return self._map[k]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __call__(self, m: Term) -> Term:
        return apply(self, m)

    def compose(self, other: Substitution) -> Substitution:
        """Substitution equal to applying self, then other."""
        out = {k: apply(other, v) for k, v in self._map.items()}
        for k, v in other.items():
            out.setdefault(k, v)
        return Substitution(out)

    def restrict(self, keep) -> Substitution:
        return Substitution({k: v for k, v in self._map.items() if keep(k)})

    def is_idempotent(self) -> bool:
        dom = set(self._map)
        return not any(dom & (variables(v) | params(v)) for v in self._map.values())

    def __repr__(self):
        inner = ", ".join(f"{format_term(k)} -> {format_term(v)}" for k, v in self._map.items())
        return "{" + inner + "}"


def apply(sigma: Mapping[Term, Term], m: Term) -> Term:
    """Simultaneous replacement of every bound Var/Param in m."""
    if isinstance(m, (Var, Param)):
        return sigma.get(m, m)
    if isinstance(m, Pair):
        return Pair(apply(sigma, m.left), apply(sigma, m.right))
    if isinstance(m, Enc):
        key = apply(sigma, m.key)
        if not isinstance(key, (Const, Param, Var)):
            raise SortError(f"substitution makes key {m.key} compound")
        return Enc(apply(sigma, m.body), key)
    if isinstance(m, Hash):
        return Hash(apply(sigma, m.body))
    return m


# Normalization

def _pair(left: Term, right: Term) -> Term:
    if left == EPS:
        return right
    if right == EPS:
        return left
    return Pair(left, right)


def _enc(body: Term, key: Term, theory: Theory) -> Term:
    if body == EPS:
        return EPS
    if theory is Theory.HOMOMORPHIC and isinstance(body, Pair):
        return _pair(_enc(body.left, key, theory), _enc(body.right, key, theory))
    return Enc(body, key)


def normalize(m: Term, theory: Theory = Theory.EMPTY) -> Term:
    """Innermost rewriting to the unique normal form.

    Both theories eliminate eps; the homomorphic one also distributes
    encryption over pairing ({a.b}k -> {a}k.{b}k), never through a hash.

    >>> print(normalize(parse_term("{Na.A}kb"), Theory.HOMOMORPHIC))
    {Na}kb.{A}kb
    """
    if isinstance(m, Pair):
        return _pair(normalize(m.left, theory), normalize(m.right, theory))
    if isinstance(m, Enc):
        return _enc(normalize(m.body, theory), m.key, theory)
    if isinstance(m, Hash):
        body = normalize(m.body, theory)
        return EPS if body == EPS else Hash(body)
    return m


def one_step_rewrites(m: Term, theory: Theory = Theory.EMPTY) -> Iterator[Term]:
    """Every term reachable from m by one rule application at one position."""
    if isinstance(m, Pair):
        if m.left == EPS:
            yield m.right
        if m.right == EPS:
            yield m.left
    elif isinstance(m, Enc):
        if m.body == EPS:
            yield EPS
        if theory is Theory.HOMOMORPHIC and isinstance(m.body, Pair):
            yield Pair(Enc(m.body.left, m.key), Enc(m.body.right, m.key))
    elif isinstance(m, Hash) and m.body == EPS:
        yield EPS
    kids = children(m)
    for i, c in enumerate(kids):
        for r in one_step_rewrites(c, theory):
            if isinstance(m, Enc) and i == 1:
                continue
            yield rebuild(m, kids[:i] + (r,) + kids[i + 1:])


def is_normal(m: Term, theory: Theory = Theory.EMPTY) -> bool:
    return next(one_step_rewrites(m, theory), None) is None


def derive(m: Term, keep: Var | None = None) -> Term:
    """Erase every variable except `keep`, then eliminate eps.

    A ciphertext whose key is an erased variable loses its encryption layer
    (the conservative reading: an unknown key protects nothing statically).

    >>> print(derive(parse_term("{A.?U.{B.?V}kas}kbs"), keep=Var("U")))
    {A.?U.{B}kas}kbs
    """
    return normalize(_erase(m, keep), Theory.EMPTY)


def _erase(m: Term, keep: Var | None) -> Term:
    if isinstance(m, Var):
        return m if m == keep else EPS
    if isinstance(m, Pair):
        return Pair(_erase(m.left, keep), _erase(m.right, keep))
    if isinstance(m, Enc):
        body = _erase(m.body, keep)
        if isinstance(m.key, Var) and m.key != keep:
            return body
        return Enc(body, m.key)
    if isinstance(m, Hash):
        return Hash(_erase(m.body, keep))
    return m


# Renaming

def alpha_rename(m: Term, salt: str) -> Term:
    """Rename every Param and Var injectively by appending `salt`."""
    if isinstance(m, Param):
        return Param(m.name, f"{m.tag}_{salt}" if m.tag else salt)
    if isinstance(m, Var):
        return Var(f"{m.name}_{salt}")
    kids = children(m)
    return rebuild(m, tuple(alpha_rename(c, salt) for c in kids)) if kids else m


def alpha_equivalent(a: Term, b: Term) -> bool:
    """Equal up to a bijective renaming of Vars and of same-named Params."""
    fwd: dict[Term, Term] = {}
    bwd: dict[Term, Term] = {}

    def same(x: Term, y: Term) -> bool:
        if isinstance(x, Var) or isinstance(x, Param):
            if type(x) is not type(y):
                return False
            if isinstance(x, Param) and x.name != y.name:
                return False
            if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
                return False
            return True
        if type(x) is not type(y):
            return False
        kx, ky = children(x), children(y)
        if not kx:
            return x == y
        return all(same(p, q) for p, q in zip(kx, ky))

    return same(a, b)


# Text form

def format_term(m: Term) -> str:
    if isinstance(m, Const):
        return m.name
    if isinstance(m, Param):
        return m.label
    if isinstance(m, Var):
        return f"?{m.name}"
    if isinstance(m, Epsilon):
        return "eps"
    if isinstance(m, Pair):
        left = format_term(m.left)
        if isinstance(m.left, Pair):
            left = f"({left})"
        return f"{left}.{format_term(m.right)}"
    if isinstance(m, Enc):
        return "{" + format_term(m.body) + "}" + format_term(m.key)
    if isinstance(m, Hash):
        return f"h({format_term(m.body)})"
    raise TypeError(f"not a term: {m!r}")


_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      | (?P<var>\?[A-Za-z][A-Za-z0-9_']*)
      | (?P<name>[A-Za-z][A-Za-z0-9_']*(?:@[A-Za-z0-9_]+)?)
      | (?P<sym>[{}().]|_)""",
    re.VERBOSE,
)


class _Parser:
    def __init__(self, text: str, line: int, column: int, source: str | None):
        self.text, self.line, self.col0, self.source = text, line, column, source
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if mt is None:
                self.fail(f"unexpected character {text[pos]!r}", pos)
            if mt.lastgroup != "ws":
                self.tokens.append((mt.lastgroup, mt.group(), pos))
            pos = mt.end()
        self.i = 0

    def fail(self, message: str, offset: int | None = None):
        if offset is None:
            offset = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        raise ParseError(message, self.line, self.col0 + offset, self.source)

    def peek(self) -> str | None:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else None

    def take(self, expected: str | None = None) -> tuple[str, str, int]:
        if self.i >= len(self.tokens):
            self.fail(f"expected {expected or 'a term'}, found end of input")
        tok = self.tokens[self.i]
        if expected is not None and tok[1] != expected:
            self.fail(f"expected {expected!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def term(self) -> Term:
        left = self.unit()
        if self.peek() == ".":
            self.take(".")
            return Pair(left, self.term())
        return left

    def unit(self) -> Term:
        kind, text, _ = self.take()
        if text == "{":
            body = self.term()
            self.take("}")
            if self.peek() == "_":
                self.take("_")
            if self.peek() in ("{", "(") or (self.peek() == "h" and self._next_is_paren()):
                self.fail("compound keys are not supported")
            key = self.unit()
            if not isinstance(key, (Const, Param, Var)):
                self.fail("encryption key must be an atom or variable")
            return Enc(body, key)
        if text == "(":
            inner = self.term()
            self.take(")")
            return inner
        if kind == "var":
            return Var(text[1:])
        if kind == "name":
            if text == "h" and self.peek() == "(":
                self.take("(")
                body = self.term()
                self.take(")")
                return Hash(body)
            if text == "eps":
                return EPS
            if "@" in text:
                name, tag = text.split("@", 1)
                return Param(name, tag)
            return Const(text)
        self.i -= 1
        self.fail(f"unexpected {text!r}")

    def _next_is_paren(self) -> bool:
        return self.i + 1 < len(self.tokens) and self.tokens[self.i + 1][1] == "("


def parse_term(text: str, line: int = 1, column: int = 1, source: str | None = None) -> Term:
    """Parse the text form; errors carry line and column.

    >>> parse_term("{?X}kb")
    Enc(body=Var(name='X'), key=Const(name='kb'))
    """
    p = _Parser(text, line, column, source)
    if not p.tokens:
        p.fail("empty term")
    t = p.term()
    if p.i != len(p.tokens):
        p.fail(f"trailing input {p.peek()!r}")
    return t
