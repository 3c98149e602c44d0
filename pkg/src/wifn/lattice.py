"""Security levels: the powerset of principals ordered by reverse inclusion.

Smaller sets are more secret. ALL (every principal, i.e. public) is the
bottom; the empty set is the top. meet is union, join is intersection.
"""
from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass
from functools import reduce

from .errors import ParseError


@dataclass(frozen=True, slots=True)
class SecurityLevel:
    principals: frozenset[str] | None  # None stands for ALL

    @classmethod
    def of(cls, *names: str) -> SecurityLevel:
        return cls(frozenset(names))

    @property
    def is_all(self) -> bool:
        return self.principals is None

    @property
    def is_top(self) -> bool:
        return self.principals is not None and not self.principals

    def __str__(self) -> str:
        if self.principals is None:
            return "ALL"
        return "{" + ",".join(sorted(self.principals)) + "}"

    def to_json(self):
        return "ALL" if self.principals is None else sorted(self.principals)

    @classmethod
    def from_json(cls, value) -> SecurityLevel:
        if value == "ALL":
            return ALL
        return cls(frozenset(value))


ALL = SecurityLevel(None)
TOP = SecurityLevel(frozenset())


def meet(a: SecurityLevel, b: SecurityLevel) -> SecurityLevel:
    """Greatest lower bound: union, ALL absorbing.

    >>> print(meet(SecurityLevel.of("A", "C", "D"), SecurityLevel.of("A", "B")))
    {A,B,C,D}
    """
    if a.principals is None or b.principals is None:
        return ALL
    return SecurityLevel(a.principals | b.principals)


def join(a: SecurityLevel, b: SecurityLevel) -> SecurityLevel:
    """Least upper bound: intersection, ALL neutral."""
    if a.principals is None:
        return b
    if b.principals is None:
        return a
    return SecurityLevel(a.principals & b.principals)


def geq(a: SecurityLevel, b: SecurityLevel) -> bool:
    """a is at least as secret as b, i.e. a is a subset of b."""
    if b.principals is None:
        return True
    if a.principals is None:
        return False
    return a.principals <= b.principals


def meet_all(levels: Iterable[SecurityLevel]) -> SecurityLevel:
    return reduce(meet, levels, TOP)


def join_all(levels: Iterable[SecurityLevel]) -> SecurityLevel:
    return reduce(join, levels, ALL)


_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_']*(?:@[A-Za-z0-9_]+)?$")


def parse_level(text: str, line: int = 1, column: int = 1) -> SecurityLevel:
    """Read ``ALL``, ``{}`` or ``{A, B}``."""
    s = text.strip()
    if s == "ALL":
        return ALL
    if not (s.startswith("{") and s.endswith("}")):
        raise ParseError(f"expected ALL or {{...}}, found {s!r}", line, column)
    body = s[1:-1].strip()
    if not body:
        return TOP
    names = [n.strip() for n in body.split(",")]
    for n in names:
        if not _NAME.match(n):
            raise ParseError(f"bad principal name {n!r}", line, column)
    return SecurityLevel(frozenset(names))
