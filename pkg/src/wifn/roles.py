"""Protocol narrations, generalized roles and the pattern message space."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .context import Context, inverse, type_of
from .errors import ContextError, ParseError, RoleError
from .terms import (
    Const, Enc, Hash, Pair, Param, Term, Var,
    alpha_equivalent, atoms, format_term, parse_term, params, split_pairs, variables,
)

_IDENT = r"[A-Za-z][A-Za-z0-9_']*"


class Direction(Enum):
    RECV = "recv"
    SEND = "send"


@dataclass(frozen=True)
class Step:
    index: int
    sender: str
    receiver: str
    payload: Term


@dataclass(frozen=True)
class Narration:
    name: str
    principals: tuple[str, ...]
    steps: tuple[Step, ...]
    fresh: dict[str, frozenset[str]] = field(default_factory=dict, hash=False)
    intruder: str | None = None
    context_ref: str | None = None

    def fresh_owner(self, atom: str) -> str | None:
        for who, names in self.fresh.items():
            if atom in names:
                return who
        return None


@dataclass(frozen=True)
class RoleStep:
    direction: Direction
    payload: Term
    number: int


@dataclass(frozen=True)
class GeneralizedRole:
    agent: str
    index: int
    session: str
    steps: tuple[RoleStep, ...]

    @property
    def name(self) -> str:
        return f"{self.agent}{self.index}"

    def received_before(self, position: int) -> list[Term]:
        return [s.payload for s in self.steps[:position] if s.direction is Direction.RECV]

    def send_positions(self) -> list[int]:
        return [i for i, s in enumerate(self.steps) if s.direction is Direction.SEND]


@dataclass(frozen=True)
class MessageSpace:
    patterns: tuple[Term, ...]

    def __iter__(self):
        return iter(self.patterns)

    def __len__(self):
        return len(self.patterns)

    def __getitem__(self, i):
        return self.patterns[i]

    def __str__(self):
        return "\n".join(format_term(p) for p in self.patterns)


# Narrations

_STEP = re.compile(rf"step\s+(\d+)\s*:\s*({_IDENT})\s*->\s*({_IDENT})\s*:(.*)$")


def _split_names(text: str, lineno: int, col: int) -> list[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    for n in names:
        if not re.fullmatch(_IDENT, n):
            raise ParseError(f"bad identifier {n!r}", lineno, col)
    return names


def parse_narration(text: str, source: str | None = None) -> Narration:
    """Read a narration: header lines, then ``step n: P -> Q : term``."""
    name = None
    principals: list[str] = []
    intruder = None
    context_ref = None
    fresh: dict[str, set[str]] = {}
    steps: list[Step] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        body = line.strip()
        word, _, rest = body.partition(" ")
        rest = rest.strip()
        rcol = col + len(word) + 1
        if word == "protocol":
            name = rest
        elif word == "principals":
            principals += [p for p in _split_names(rest, lineno, rcol) if p not in principals]
        elif word == "intruder":
            intruder = rest
        elif word == "uses-context":
            context_ref = rest
        elif word == "fresh":
            who, colon, names = rest.partition(":")
            who = who.strip()
            if not colon or who not in principals:
                raise ParseError(f"fresh needs a declared principal, found {who!r}", lineno, rcol, source)
            fresh.setdefault(who, set()).update(_split_names(names, lineno, rcol))
        elif word == "step":
            mt = _STEP.match(body)
            if mt is None:
                raise ParseError("expected: step n: P -> Q : term", lineno, col, source)
            idx, snd, rcv, payload_text = mt.groups()
            for who in (snd, rcv):
                if who not in principals:
                    raise ParseError(f"undeclared principal {who}", lineno, col, source)
            pcol = col + mt.start(4)
            payload = parse_term(payload_text, lineno, pcol, source)
            if variables(payload) or params(payload):
                raise ParseError("narrations use plain atoms only (no ?X or @tag)", lineno, pcol, source)
            steps.append(Step(int(idx), snd, rcv, payload))
        else:
            raise ParseError(f"unknown directive {word!r}", lineno, col, source)
    if name is None:
        raise ParseError("missing 'protocol' header", 1, 1, source)
    if not steps:
        raise ParseError("narration has no steps", 1, 1, source)
    for expected, st in enumerate(steps, 1):
        if st.index != expected:
            raise RoleError(f"step numbering must be contiguous from 1: found {st.index}, expected {expected}")
    if intruder is not None and intruder not in principals:
        principals.append(intruder)
    return Narration(
        name=name,
        principals=tuple(principals),
        steps=tuple(steps),
        fresh={k: frozenset(v) for k, v in fresh.items()},
        intruder=intruder,
        context_ref=context_ref,
    )


# Generalization

def _var_names():
    base = ["X", "Y", "Z", "U", "V", "W"]
    yield from base
    for n in itertools.count(1):
        for b in base:
            yield f"{b}{n}"


class _Agent:
    """Knowledge of one agent while its steps are replayed."""

    def __init__(self, agent: str, narration: Narration, ctx: Context, session: str, names):
        self.agent, self.n, self.ctx, self.session, self.names = agent, narration, ctx, session, names
        self.learned: dict[Term, Var] = {}

    def knows(self, c: Const) -> bool:
        if c.name in self.ctx.principals or c.name in self.ctx.constants:
            return True
        owner = self.n.fresh_owner(c.name)
        if owner is not None:
            return owner == self.agent
        level = type_of(self.ctx, c)
        return level.is_all or self.agent in level.principals

    def can_decrypt(self, key: Term) -> bool:
        if not isinstance(key, Const) or not self.knows_key(key):
            return False
        level = type_of(self.ctx, inverse(self.ctx, key))
        return level.is_all or self.agent in level.principals

    def knows_key(self, key: Term) -> bool:
        return isinstance(key, Const) and key.name in self.ctx.inverses

    def fresh_var(self, original: Term) -> Var:
        v = Var(next(self.names))
        self.learned[original] = v
        return v

    def render(self, t: Term) -> Term:
        """Rewrite a term in the agent's vocabulary (session tags, learned vars)."""
        if t in self.learned:
            return self.learned[t]
        if isinstance(t, Const):
            return Param(t.name, self.session) if self.n.fresh_owner(t.name) == self.agent else t
        if isinstance(t, Pair):
            return Pair(self.render(t.left), self.render(t.right))
        if isinstance(t, Enc):
            return Enc(self.render(t.body), self.render(t.key))
        if isinstance(t, Hash):
            return Hash(self.render(t.body))
        return t

    def checkable(self, t: Term) -> bool:
        return all(a in self.learned or self.knows(a) for a in atoms(t))

    def receive(self, t: Term) -> Term:
        if t in self.learned:
            return self.learned[t]
        if isinstance(t, Const):
            return self.render(t) if self.knows(t) else self.fresh_var(t)
        if isinstance(t, Pair):
            return Pair(self.receive(t.left), self.receive(t.right))
        if isinstance(t, Enc) and self.can_decrypt(t.key):
            return Enc(self.receive(t.body), self.render(t.key))
        if isinstance(t, (Enc, Hash)) and self.checkable(t):
            return self.render(t)
        return self.fresh_var(t)


def generalize(n: Narration, ctx: Context, session: str = "s") -> list[GeneralizedRole]:
    """Project the narration on each agent, replacing unverifiable content by variables.

    One role per prefix of an agent's step sequence ending in a send, plus the
    complete sequence when it ends with a receive after some send.
    """
    for st in n.steps:
        for a in atoms(st.payload):
            if not (a.name in ctx.principals or a.name in ctx.typing or a.name in ctx.constants):
                raise ContextError(f"atom {a.name} in step {st.index} has no declared type")
    agents: list[str] = []
    for st in n.steps:
        for who in (st.sender, st.receiver):
            if who not in agents:
                agents.append(who)
    names = _var_names()
    roles: list[GeneralizedRole] = []
    for agent in agents:
        view = _Agent(agent, n, ctx, session, names)
        steps: list[RoleStep] = []
        for st in n.steps:
            if st.sender == agent:
                steps.append(RoleStep(Direction.SEND, view.render(st.payload), st.index))
            elif st.receiver == agent:
                steps.append(RoleStep(Direction.RECV, view.receive(st.payload), st.index))
        cuts = [i + 1 for i, s in enumerate(steps) if s.direction is Direction.SEND]
        if cuts and cuts[-1] < len(steps):
            cuts.append(len(steps))
        for k, cut in enumerate(cuts, 1):
            roles.append(GeneralizedRole(agent, k, session, tuple(steps[:cut])))
    return roles


# Role files

_ROLE = re.compile(rf"role\s+({_IDENT})\s+(\d+)\s+session\s+([A-Za-z0-9_]+)$")
_LINE = re.compile(r"(recv|send)(?:\s+(\d+))?\s*:(.*)$")


def _where(source: str | None, lineno: int) -> str:
    return f"{source}:{lineno}: " if source else f"{lineno}: "


def _check_role(role: GeneralizedRole, lineno: int, source: str | None):
    if not role.steps:
        raise ParseError(f"role {role.name} has no steps", lineno, 1, source)
    if not role.send_positions():
        raise RoleError(f"{_where(source, lineno)}role {role.name} never sends")
    seen: set[Var] = set()
    for st in role.steps:
        if st.direction is Direction.RECV:
            seen |= variables(st.payload)
        elif not variables(st.payload) <= seen:
            bad = sorted(v.name for v in variables(st.payload) - seen)
            raise RoleError(f"{_where(source, lineno)}role {role.name} sends unreceived variable(s) {bad}")


def parse_roles(text: str, source: str | None = None) -> list[GeneralizedRole]:
    """Read explicit generalized roles.

    Step numbers are optional (``send 3: ...``); they default to positions.
    A role may end with a receive, but must send at least once.
    """
    roles: list[GeneralizedRole] = []
    header = None
    steps: list[RoleStep] = []

    def close(lineno):
        if header is not None:
            agent, k, session, at = header
            role = GeneralizedRole(agent, k, session, tuple(steps))
            _check_role(role, at, source)
            roles.append(role)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        body = line.strip()
        if body.startswith("role"):
            mt = _ROLE.match(body)
            if mt is None:
                raise ParseError("expected: role <Agent> <k> session <salt>", lineno, col, source)
            close(lineno)
            header = (mt.group(1), int(mt.group(2)), mt.group(3), lineno)
            steps = []
            continue
        mt = _LINE.match(body)
        if mt is None:
            raise ParseError("expected 'recv: term' or 'send: term'", lineno, col, source)
        if header is None:
            raise ParseError("step before any role header", lineno, col, source)
        number = int(mt.group(2)) if mt.group(2) else len(steps) + 1
        payload = parse_term(mt.group(3), lineno, col + mt.start(3), source)
        steps.append(RoleStep(Direction(mt.group(1)), payload, number))
    close(None)
    if not roles:
        raise ParseError("no roles found", 1, 1, source)
    return roles


def format_roles(roles: list[GeneralizedRole]) -> str:
    out = []
    for r in roles:
        out.append(f"role {r.agent} {r.index} session {r.session}")
        for st in r.steps:
            out.append(f"{st.direction.value} {st.number}: {format_term(st.payload)}")
    return "\n".join(out) + "\n"


def load_roles_file(path: str | Path) -> list[GeneralizedRole]:
    p = Path(path)
    return parse_roles(p.read_text(), source=str(p))


def load_narration_file(path: str | Path) -> Narration:
    p = Path(path)
    return parse_narration(p.read_text(), source=str(p))


# Message space

def _staticize(t: Term, salt: str, constants: frozenset[str]) -> Term:
    """Turn session atoms into static names tagged with salt; rename variables."""
    if isinstance(t, Const):
        return t if t.name in constants else Param(t.name, salt)
    if isinstance(t, Param):
        return Param(t.name, salt)
    if isinstance(t, Var):
        return Var(f"{t.name}_{salt}")
    if isinstance(t, Pair):
        return Pair(_staticize(t.left, salt, constants), _staticize(t.right, salt, constants))
    if isinstance(t, Enc):
        return Enc(_staticize(t.body, salt, constants), _staticize(t.key, salt, constants))
    if isinstance(t, Hash):
        return Hash(_staticize(t.body, salt, constants))
    return t


def message_space(roles, ctx: Context | None = None, keep_identities: bool = False) -> MessageSpace:
    """Deduplicated patterns of every sent and received component.

    Entries are numbered in order of first appearance; an entry that is
    alpha-equivalent to an earlier one is dropped.
    """
    principals = ctx.principals if ctx else frozenset(r.agent for r in roles)
    constants = ctx.constants if ctx else frozenset()
    entries: list[Term] = []
    for role in roles:
        for st in role.steps:
            for comp in split_pairs(st.payload):
                if not keep_identities and isinstance(comp, (Const, Param)) and comp.name in principals:
                    continue
                entry = _staticize(comp, str(len(entries) + 1), constants)
                if not any(alpha_equivalent(entry, e) for e in entries):
                    entries.append(entry)
    return MessageSpace(tuple(entries))
