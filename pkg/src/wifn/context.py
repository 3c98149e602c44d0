"""The verification context: principals, typing, key inverses, theory."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ContextError, ParseError
from .lattice import ALL, SecurityLevel, parse_level
from .terms import Const, Param, Term, Theory

_IDENT = r"[A-Za-z][A-Za-z0-9_']*"
_NAME_RE = re.compile(_IDENT + "$")


@dataclass(frozen=True)
class Context:
    principals: frozenset[str]
    intruder: str
    typing: dict[str, SecurityLevel] = field(default_factory=dict, hash=False)
    inverses: dict[str, str] = field(default_factory=dict, hash=False)
    theory: Theory = Theory.EMPTY
    constants: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.intruder not in self.principals:
            raise ContextError(f"intruder {self.intruder} is not a declared principal")
        for k, v in self.inverses.items():
            if self.inverses.get(v) != k:
                raise ContextError(f"inverse map is not an involution at {k} -> {v}")
        for k in self.inverses:
            if k not in self.typing:
                raise ContextError(f"key {k} has an inverse but no type")

    def with_theory(self, theory: Theory) -> Context:
        return replace(self, theory=theory)

    def is_principal(self, t: Term | str) -> bool:
        return _base(t) in self.principals

    def is_key(self, t: Term | str) -> bool:
        return _base(t) in self.inverses

    def kind(self, name: str) -> str:
        """Sort used by unification: principal, key or data."""
        if name in self.principals:
            return "principal"
        if name in self.inverses:
            return "key"
        return "data"


def _base(t: Term | str) -> str:
    if isinstance(t, (Const, Param)):
        return t.name
    if isinstance(t, str):
        return t.split("@", 1)[0]
    raise ContextError(f"{t} is not an atom")


def type_of(ctx: Context, atom: Term | str) -> SecurityLevel:
    """Declared level of an atom; parameters are typed by their base name.

    Principals default to ALL.
    """
    name = _base(atom)
    if name in ctx.typing:
        return ctx.typing[name]
    if name in ctx.principals:
        return ALL
    raise ContextError(f"atom {name} has no declared type")


def inverse(ctx: Context, key: Term | str) -> str:
    name = _base(key)
    try:
        return ctx.inverses[name]
    except KeyError:
        raise ContextError(f"unknown key {name}") from None


def _names(text: str, lineno: int, col: int) -> list[str]:
    names = [n.strip() for n in text.split(",")]
    for n in names:
        if not _NAME_RE.match(n):
            raise ParseError(f"bad identifier {n!r}", lineno, col)
    return names


def load_context(text: str, source: str | None = None) -> Context:
    """Parse the line-oriented context format.

    >>> ctx = load_context("principals A, I\\nintruder I\\ntype k = {A}\\ninv k = k")
    >>> inverse(ctx, "k")
    'k'
    """
    principals: list[str] = []
    intruder = None
    theory = Theory.EMPTY
    constants: set[str] = set()
    typing: dict[str, SecurityLevel] = {}
    inverses: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        word, _, rest = line.strip().partition(" ")
        rest = rest.strip()
        rcol = col + len(word) + 1
        try:
            if word == "principals":
                principals.extend(n for n in _names(rest, lineno, rcol) if n not in principals)
            elif word == "intruder":
                (intruder,) = _names(rest, lineno, rcol)
            elif word == "theory":
                try:
                    theory = Theory(rest)
                except ValueError:
                    raise ParseError(f"unknown theory {rest!r}", lineno, rcol) from None
            elif word == "const":
                constants.update(_names(rest, lineno, rcol))
            elif word == "type":
                name, eq, level = rest.partition("=")
                name = name.strip()
                if not eq or not _NAME_RE.match(name):
                    raise ParseError("expected: type <atom> = <level>", lineno, rcol)
                if name in typing:
                    raise ParseError(f"duplicate type for {name}", lineno, rcol)
                typing[name] = parse_level(level, lineno, rcol + rest.index("=") + 1)
            elif word == "inv":
                a, eq, b = rest.partition("=")
                a, b = a.strip(), b.strip()
                if not eq or not _NAME_RE.match(a) or not _NAME_RE.match(b):
                    raise ParseError("expected: inv <key> = <key>", lineno, rcol)
                for k, v in ((a, b), (b, a)):
                    if inverses.get(k, v) != v:
                        raise ParseError(f"inverse of {k} declared twice", lineno, rcol)
                    inverses[k] = v
            else:
                raise ParseError(f"unknown directive {word!r}", lineno, col)
        except ParseError as e:
            e.source = source
            raise
    if intruder is None:
        raise ContextError("missing intruder declaration")
    return Context(
        principals=frozenset(principals),
        intruder=intruder,
        typing=typing,
        inverses=inverses,
        theory=theory,
        constants=frozenset(constants),
    )


def load_context_file(path: str | Path) -> Context:
    p = Path(path)
    return load_context(p.read_text(), source=str(p))


def dump_context(ctx: Context) -> str:
    lines = [
        "principals " + ", ".join(sorted(ctx.principals)),
        f"intruder {ctx.intruder}",
        f"theory {ctx.theory.value}",
    ]
    if ctx.constants:
        lines.append("const " + ", ".join(sorted(ctx.constants)))
    for name in sorted(ctx.typing):
        lines.append(f"type {name} = {ctx.typing[name]}")
    seen = set()
    for k in sorted(ctx.inverses):
        v = ctx.inverses[k]
        if v not in seen:
            lines.append(f"inv {k} = {v}")
            seen.update((k, v))
    return "\n".join(lines) + "\n"
