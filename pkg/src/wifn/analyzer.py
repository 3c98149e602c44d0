"""Whole-protocol analysis and report rendering."""
from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .context import Context, load_context_file
from .lattice import SecurityLevel
from .roles import (
    GeneralizedRole, generalize, load_narration_file, load_roles_file, message_space,
)
from .terms import Hash, Theory, walk
from .witness import AnalysisRow, CaseVerdict, Variant, check_step

INCREASING = "Increasing"
NOT_INCREASING = "NotIncreasing"
HASH_NOTE = "hashes are treated as opaque: atoms under h(.) are never derived from a digest"


@dataclass(frozen=True)
class Report:
    protocol: str
    theory: Theory
    variant: Variant
    rows: tuple[AnalysisRow, ...]
    assumptions: tuple[str, ...] = ()

    @property
    def overall(self) -> str:
        return INCREASING if all(r.passed for r in self.rows) else NOT_INCREASING

    @property
    def exit_code(self) -> int:
        return 0 if self.overall == INCREASING else 1

    def row(self, atom: str, step: int | None = None, role: str | None = None) -> AnalysisRow:
        """First row for an atom display name (optionally narrowed by step / agent)."""
        for r in self.rows:
            if r.atom == atom and step in (None, r.step) and role in (None, r.role):
                return r
        raise KeyError(atom)


def analyze_roles(name: str, roles: list[GeneralizedRole], ctx: Context,
                  variant: Variant = Variant.MAX) -> Report:
    space = message_space(roles, ctx)
    agents: list[str] = []
    done = set()
    rows: list[AnalysisRow] = []
    for role in roles:
        if role.agent not in agents:
            agents.append(role.agent)
        for pos in role.send_positions():
            st = role.steps[pos]
            key = (role.agent, role.session, st.number, st.payload, tuple(role.received_before(pos)))
            if key in done:
                continue
            done.add(key)
            rows.extend(check_step(variant, role, pos, space, ctx))
    rows.sort(key=lambda r: (agents.index(r.role), r.step, r.atom))
    uses_hash = any(isinstance(t, Hash) for r in roles for s in r.steps for _, t in walk(s.payload))
    return Report(name, ctx.theory, variant, tuple(rows), (HASH_NOTE,) if uses_hash else ())


def analyze(context_file, protocol_file, roles_file=None, variant: Variant | str = Variant.MAX,
            theory: Theory | str | None = None) -> Report:
    """Load the inputs, generalize (unless explicit roles are given) and check every send."""
    ctx = load_context_file(context_file)
    if theory is not None:
        ctx = ctx.with_theory(Theory(theory))
    narration = load_narration_file(protocol_file)
    if roles_file is not None:
        roles = load_roles_file(roles_file)
    else:
        roles = generalize(narration, ctx)
    return analyze_roles(narration.name, roles, ctx, Variant(variant))


# Rendering

def _level_json(level: SecurityLevel | None):
    return None if level is None else level.to_json()


def report_to_dict(report: Report) -> dict:
    rows = []
    for r in report.rows:
        d = {
            "role": r.role,
            "session": r.session,
            "step": r.step,
            "atom": r.atom,
            "kind": r.kind,
            "type": _level_json(r.atom_type),
            "lower": r.lower.to_json(),
            "upper": r.upper.to_json(),
            "verdict": "pass" if r.passed else "fail",
        }
        if r.cases:
            d["cases"] = [
                {"key": c.key, "lower": c.lower.to_json(), "upper": c.upper.to_json(),
                 "verdict": "pass" if c.passed else "fail"}
                for c in r.cases
            ]
        d["role_index"] = r.role_index
        d["r_minus"] = list(r.r_minus)
        d["r_plus"] = r.r_plus
        rows.append(d)
    return {
        "protocol": report.protocol,
        "theory": report.theory.value,
        "variant": report.variant.value,
        "overall": report.overall,
        "rows": rows,
        "assumptions": list(report.assumptions),
    }


def render_json(report: Report) -> str:
    return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"


def report_from_json(text: str) -> Report:
    data = json.loads(text)
    rows = []
    for d in data["rows"]:
        cases = tuple(
            CaseVerdict(c["key"], SecurityLevel.from_json(c["lower"]),
                        SecurityLevel.from_json(c["upper"]), c["verdict"] == "pass")
            for c in d.get("cases", ())
        )
        rows.append(AnalysisRow(
            role=d["role"],
            role_index=d.get("role_index", 1),
            session=d["session"],
            step=d["step"],
            atom=d["atom"],
            kind=d["kind"],
            r_minus=tuple(d.get("r_minus", ())),
            r_plus=d.get("r_plus", ""),
            atom_type=None if d["type"] is None else SecurityLevel.from_json(d["type"]),
            lower=SecurityLevel.from_json(d["lower"]),
            upper=SecurityLevel.from_json(d["upper"]),
            passed=d["verdict"] == "pass",
            cases=cases,
        ))
    return Report(data["protocol"], Theory(data["theory"]), Variant(data["variant"]),
                  tuple(rows), tuple(data.get("assumptions", ())))


def _color_enabled(stream) -> bool:
    if os.environ.get("WIFN_COLOR", "1") == "0":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def render_text(report: Report, color: bool = False) -> str:
    ok, bad = ("\x1b[32m✓\x1b[0m", "\x1b[31m✗\x1b[0m") if color else ("✓", "✗")
    header = ["#", "atom", "role", "step", "R-", "r+", "type", "lower", "upper", ""]
    table = []
    for i, r in enumerate(report.rows, 1):
        table.append([
            str(i), r.atom, f"{r.role}{r.role_index}", str(r.step),
            "; ".join(r.r_minus) or "-", r.r_plus,
            "?" if r.atom_type is None else str(r.atom_type),
            str(r.lower), str(r.upper), "",
        ])
    widths = [max(len(row[c]) for row in [header] + table) for c in range(len(header))]

    def fmt(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    out = [f"protocol {report.protocol}  theory {report.theory.value}  selection {report.variant.value}", ""]
    out.append(fmt(header))
    for r, cells in zip(report.rows, table):
        out.append(fmt(cells[:-1]) + "  " + (ok if r.passed else bad))
        for c in r.cases:
            mark = ok if c.passed else bad
            out.append(f"      case key {c.key}: lower {c.lower}, upper {c.upper}  {mark}")
    out.append("")
    if report.overall == INCREASING:
        out.append("Overall: Increasing. Every sent atom keeps at least its received security level,")
        out.append("which is sufficient for secrecy.")
    else:
        failed = sum(not r.passed for r in report.rows)
        out.append(f"Overall: NotIncreasing. {failed} row(s) do not meet the growth condition.")
        out.append("The criterion is only sufficient: a failing row points at a step to inspect,")
        out.append("it does not by itself establish an attack.")
    for note in report.assumptions:
        out.append(f"Assumption: {note}.")
    return "\n".join(out) + "\n"


def write_report(report: Report, fmt: str = "text", out: str | Path | None = None) -> None:
    if out is not None:
        text = render_json(report) if fmt == "json" else render_text(report)
        Path(out).write_text(text)
        return
    if fmt == "json":
        sys.stdout.write(render_json(report))
    else:
        sys.stdout.write(render_text(report, color=_color_enabled(sys.stdout)))


__all__ = [
    "Report", "analyze", "analyze_roles", "render_json", "render_text", "report_from_json",
    "report_to_dict", "write_report", "INCREASING", "NOT_INCREASING",
]
