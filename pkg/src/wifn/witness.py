"""Selections, the reliable valuation, and the static bounds of the witness function.

The valuation of an atom alpha in a message is computed on the theory normal
form: find, for each occurrence of alpha, the outermost encryption whose
inverse key is at least as secret as alpha (the external protective key),
select what travels with alpha under it, and map that selection to the set
of principals allowed to know it. Occurrences combine by meet.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

from .context import Context, inverse, type_of
from .errors import WifnError
from .lattice import ALL, TOP, SecurityLevel, geq, join_all, meet, meet_all
from .roles import GeneralizedRole, MessageSpace
from .terms import (
    Enc, Hash, Param, Position, Substitution, Term, Var,
    apply, children, derive, format_term, is_atom, normalize, split_pairs, walk,
)
from .unify import align, unifiable_patterns


class Variant(Enum):
    MAX = "max"
    EK = "ek"
    N = "n"


@dataclass(frozen=True)
class Identity:
    atom: Term


@dataclass(frozen=True)
class InverseKey:
    key: Term


@dataclass(frozen=True)
class Selection:
    """What travels with alpha. `exposed` marks an unprotected occurrence."""

    entries: frozenset = frozenset()
    exposed: bool = False

    def issubset(self, other: Selection) -> bool:
        if other.exposed:
            return True
        return not self.exposed and self.entries <= other.entries


@dataclass(frozen=True)
class BoundCase:
    protective_key: str | None
    value: SecurityLevel


def label(t: Term) -> str:
    return format_term(t)


# Occurrences and protection

@dataclass(frozen=True)
class _Occurrence:
    position: Position
    encs: tuple[tuple[Position, Enc], ...]  # enclosing ciphertexts, outermost first
    hidden: bool  # under a hash or used as a key


def _occurrences(alpha: Term, m: Term) -> list[_Occurrence]:
    out = []

    def go(t: Term, pos: Position, encs, hidden: bool):
        if t == alpha:
            out.append(_Occurrence(pos, tuple(encs), hidden))
            return
        if isinstance(t, Enc):
            go(t.body, pos + (0,), encs + [(pos, t)], hidden)
            go(t.key, pos + (1,), encs, True)
        elif isinstance(t, Hash):
            go(t.body, pos + (0,), encs, True)
        else:
            for i, c in enumerate(children(t)):
                go(c, pos + (i,), encs, hidden)

    go(m, (), [], False)
    return out


def is_visible(alpha: Term, m: Term) -> bool:
    """alpha occurs somewhere other than under a hash or in key position."""
    return any(not o.hidden for o in _occurrences(alpha, m))


def _protective(alpha: Term, enc: Enc, ctx: Context) -> bool:
    if isinstance(enc.key, Var):
        return False
    if isinstance(alpha, Var):
        return True
    return geq(type_of(ctx, inverse(ctx, enc.key)), type_of(ctx, alpha))


def _options(alpha: Term, occ: _Occurrence, ctx: Context) -> list:
    """Candidate external protective ciphertexts for one occurrence (None: exposed)."""
    cands = [e for e in occ.encs if _protective(alpha, e[1], ctx)]
    if not cands:
        return [None]
    return cands if isinstance(alpha, Var) else cands[:1]


def _cases(alpha: Term, m: Term, ctx: Context) -> list[tuple]:
    visible = [o for o in _occurrences(alpha, m) if not o.hidden]
    if not visible:
        return [()]
    if not isinstance(alpha, Var):
        type_of(ctx, alpha)  # untyped atoms are an error even when exposed
    return list(itertools.product(*(_options(alpha, o, ctx) for o in visible)))


def _case_key(case: tuple) -> str | None:
    keys = []
    for choice in case:
        if choice is not None and label(choice[1].key) not in keys:
            keys.append(label(choice[1].key))
    return ",".join(keys) or None


def _select_case(variant: Variant, alpha: Term, case: tuple, ctx: Context) -> Selection:
    entries: set = set()
    for choice in case:
        if choice is None:
            return Selection(exposed=True)
        _, enc = choice
        if variant in (Variant.MAX, Variant.N):
            entries |= {
                Identity(a) for _, a in walk(enc.body)
                if is_atom(a) and a != alpha and ctx.is_principal(a)
            }
        if variant in (Variant.MAX, Variant.EK):
            entries.add(InverseKey(enc.key))
    return Selection(frozenset(entries))


def external_protective_key(alpha: Term, m: Term, ctx: Context) -> list[str]:
    """Candidate external protective keys, outermost first.

    A typed atom has at most one per occurrence; a variable (type unknown)
    has every enclosing key as a separate case.
    """
    occs = _occurrences(alpha, m)
    if not occs:
        raise WifnError(f"{label(alpha)} does not occur in {label(m)}")
    keys: list[str] = []
    for o in occs:
        if o.hidden:
            continue
        for choice in _options(alpha, o, ctx):
            if choice is not None and label(choice[1].key) not in keys:
                keys.append(label(choice[1].key))
    return keys


def select(variant: Variant, alpha: Term, m: Term, ctx: Context, key: str | None = None) -> Selection:
    """Selection on m as given (no normalization).

    For a variable, `key` picks the protective-key case; by default the
    outermost one.
    """
    cases = _cases(alpha, m, ctx)
    if key is not None:
        for case in cases:
            if all(c is None or label(c[1].key) == key for c in case):
                return _select_case(variant, alpha, case, ctx)
        raise WifnError(f"{key} is not a protective key of {label(alpha)} in {label(m)}")
    return _select_case(variant, alpha, cases[0], ctx)


def selection_level(sel: Selection, ctx: Context) -> SecurityLevel:
    """Map a selection to principals: identities to themselves, inverse keys to their type."""
    if sel.exposed:
        return ALL
    level = TOP
    for e in sel.entries:
        if isinstance(e, Identity):
            level = meet(level, SecurityLevel.of(label(e.atom)))
        else:
            level = meet(level, type_of(ctx, inverse(ctx, e.key)))
    return level


def security_cases(variant: Variant, alpha: Term, m: Term, ctx: Context) -> list[BoundCase]:
    """Valuation of alpha in m, one entry per protective-key case."""
    m = normalize(m, ctx.theory)
    return [
        BoundCase(_case_key(c), selection_level(_select_case(variant, alpha, c, ctx), ctx))
        for c in _cases(alpha, m, ctx)
    ]


def security_value(variant: Variant, alpha: Term, m: Term, ctx: Context) -> SecurityLevel:
    """The reliable valuation F(alpha, m); for a variable, the meet over its cases.

    ALL when alpha is exposed, the top level when it is absent (or only hashed).
    """
    return meet_all(c.value for c in security_cases(variant, alpha, m, ctx))


# Derivatives and bounds

def derivative_cases(variant: Variant, alpha: Term, pattern: Term, sigma: Substitution,
                     ctx: Context, target: Term | None = None) -> list[BoundCase]:
    """Valuation of alpha through a unified pattern's static part.

    Parameter bindings are applied first (the static neighbourhood). If alpha
    then appears in the derived pattern it is valued there; otherwise alpha
    lies inside the binding of some pattern variable X, which is valued in
    the pattern derived on X.
    """
    static = sigma.restrict(lambda k: isinstance(k, Param))
    fixed = apply(static, pattern)
    if is_atom(alpha):
        derived = derive(fixed)
        if any(s == alpha for _, s in walk(derived)):
            return security_cases(variant, alpha, derived, ctx)
    if target is None:
        target = apply(sigma, pattern)
    blocks: list[Var] = []
    for o in _occurrences(alpha, target):
        if o.hidden:
            continue
        _, node = align(fixed, o.position)
        if isinstance(node, Var) and node not in blocks:
            blocks.append(node)
    if not blocks:
        raise WifnError(f"cannot trace {label(alpha)} into pattern {label(pattern)}")
    results = [security_cases(variant, x, derive(fixed, keep=x), ctx) for x in blocks]
    if len(results) == 1:
        return results[0]
    return [BoundCase(None, meet_all(c.value for r in results for c in r))]


@dataclass(frozen=True)
class Source:
    component: Term
    pattern: Term
    sigma: Substitution
    value: SecurityLevel


def lower_sources(variant: Variant, alpha: Term, r_plus: Term, space: MessageSpace,
                  ctx: Context) -> list[Source]:
    out = []
    for comp in split_pairs(r_plus):
        if not is_visible(alpha, comp):
            continue
        focus = alpha if isinstance(alpha, Var) else None
        for pattern, sigma in unifiable_patterns(space, comp, ctx, focus=focus):
            cases = derivative_cases(variant, alpha, pattern, sigma, ctx, target=comp)
            out.append(Source(comp, pattern, sigma, meet_all(c.value for c in cases)))
    return out


def lower_bound(variant: Variant, alpha: Term, r_plus: Term, space: MessageSpace,
                ctx: Context) -> SecurityLevel:
    """Meet, over every pattern unifiable with a component of r_plus, of its derivative value.

    Components where alpha is absent (or only hashed) contribute the top level.
    """
    return meet_all(s.value for s in lower_sources(variant, alpha, r_plus, space, ctx))


def upper_bound(variant: Variant, alpha: Term, r_minus: list[Term], ctx: Context) -> list[BoundCase]:
    """Meet over the received messages of alpha's valuation in their derived forms."""
    keep = alpha if isinstance(alpha, Var) else None
    cases = [BoundCase(None, TOP)]
    for m in r_minus:
        more = security_cases(variant, alpha, derive(m, keep=keep), ctx)
        cases = [
            BoundCase(",".join(k for k in (a.protective_key, b.protective_key) if k) or None,
                      meet(a.value, b.value))
            for a in cases for b in more
        ]
    return cases


# The growth check

@dataclass(frozen=True)
class CaseVerdict:
    key: str | None
    lower: SecurityLevel
    upper: SecurityLevel
    passed: bool


@dataclass(frozen=True)
class AnalysisRow:
    role: str
    role_index: int
    session: str
    step: int
    atom: str
    kind: str  # "atom" or "variable"
    r_minus: tuple[str, ...]
    r_plus: str
    atom_type: SecurityLevel | None
    lower: SecurityLevel
    upper: SecurityLevel
    passed: bool
    cases: tuple[CaseVerdict, ...] = ()


def analyzed_elements(role: GeneralizedRole, position: int, ctx: Context) -> list[Term]:
    """Atoms and variables of the sent payload (identities and pure keys skipped),
    then variables received earlier but not forwarded."""
    r_plus = role.steps[position].payload
    seen: list[Term] = []
    for pos, t in walk(r_plus):
        if not (is_atom(t) or isinstance(t, Var)) or t in seen:
            continue
        if is_atom(t) and ctx.is_principal(t):
            continue
        if all(o.position[-1:] == (1,) and isinstance(_parent(r_plus, o.position), Enc)
               for o in _occurrences(t, r_plus)):
            continue
        seen.append(t)
    for m in role.received_before(position):
        for _, t in walk(m):
            if isinstance(t, Var) and t not in seen:
                seen.append(t)
    return seen


def _parent(m: Term, pos: Position) -> Term | None:
    if not pos:
        return None
    node = m
    for i in pos[:-1]:
        node = children(node)[i]
    return node


def check_step(variant: Variant, role: GeneralizedRole, position: int, space: MessageSpace,
               ctx: Context) -> list[AnalysisRow]:
    """Rows for one sending step: pass iff lower is at least as secret as type meet upper,
    in every protective-key case."""
    step = role.steps[position]
    r_plus = step.payload
    r_minus = role.received_before(position)
    rows = []
    for alpha in analyzed_elements(role, position, ctx):
        is_var = isinstance(alpha, Var)
        atype = None if is_var else type_of(ctx, alpha)
        lower = lower_bound(variant, alpha, r_plus, space, ctx)
        uppers = upper_bound(variant, alpha, r_minus, ctx)
        base = TOP if is_var else atype
        verdicts = tuple(
            CaseVerdict(u.protective_key, lower, u.value, geq(lower, meet(base, u.value)))
            for u in uppers
        )
        rows.append(AnalysisRow(
            role=role.agent,
            role_index=role.index,
            session=role.session,
            step=step.number,
            atom=label(alpha),
            kind="variable" if is_var else "atom",
            r_minus=tuple(label(m) for m in r_minus),
            r_plus=label(r_plus),
            atom_type=atype,
            lower=lower,
            upper=join_all(v.upper for v in verdicts),
            passed=all(v.passed for v in verdicts),
            cases=verdicts if len(verdicts) > 1 else (),
        ))
    return sorted(rows, key=lambda r: r.atom)
