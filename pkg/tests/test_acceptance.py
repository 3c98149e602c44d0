"""The seven acceptance criteria, one test each; a PASS/FAIL line per criterion
is printed in the terminal summary."""
import subprocess
import sys
import time
from pathlib import Path

from wifn import DATA
from wifn.analyzer import INCREASING, NOT_INCREASING, analyze
from wifn.cli import main
from wifn.lattice import SecurityLevel, meet
from wifn.terms import Const, Theory, parse_term
from wifn.unify import unifiable_patterns
from wifn.witness import Variant, security_value

L = SecurityLevel.of
HERE = Path(__file__).parent


def test_criterion_1_nsl_homomorphic_table():
    start = time.perf_counter()
    report = analyze(DATA / "nsl.ctx", DATA / "nsl.proto")
    elapsed = time.perf_counter() - start
    assert report.theory is Theory.HOMOMORPHIC
    assert [(r.atom, r.passed) for r in report.rows] == [
        ("Na@s", True), ("?X", False), ("?Y", False), ("Nb@s", True)]
    na, x, y, nb = report.rows
    assert na.lower == L("B")
    assert (x.lower, x.upper) == (L("B"), L("A"))
    assert (y.lower, y.upper) == (L("A"), L("B"))
    assert nb.lower == L("A") and meet(nb.atom_type, nb.upper) == L("A", "B")
    assert report.overall == NOT_INCREASING
    assert elapsed < 1.0


def test_criterion_2_selection_example(example_ctx):
    m = parse_term("{A.C.{alpha.D}kas}kab")
    alpha = Const("alpha")
    empty = example_ctx.with_theory(Theory.EMPTY)
    hom = example_ctx.with_theory(Theory.HOMOMORPHIC)
    assert security_value(Variant.MAX, alpha, m, empty) == L("A", "B", "C", "D")
    assert security_value(Variant.MAX, alpha, m, hom) == L("A", "B")


def test_criterion_3_woolam_amended():
    report = analyze(DATA / "woolam.ctx", DATA / "woolam_amended.proto")
    assert len(report.rows) == 7
    assert all(r.passed for r in report.rows)
    assert report.overall == INCREASING
    assert report.row("kab@s").lower == L("A", "B", "S")
    assert report.row("?U").lower == L("A", "B", "S")
    assert report.row("?V").lower == L("A", "B", "S")
    assert main(["analyze", "--protocol", str(DATA / "woolam_amended.proto")]) == 0


def test_criterion_4_woolam_flawed():
    report = analyze(DATA / "woolam.ctx", DATA / "woolam_flawed.proto")
    failing = {r.atom for r in report.rows if not r.passed}
    assert failing == {"kab@s", "?U", "?V"}
    kab = report.row("kab@s")
    assert kab.lower == L("A", "S", "A@4")  # A renamed for the session of space entry 4
    assert not kab.lower.principals <= {"A", "B", "S"}
    assert report.overall == NOT_INCREASING
    assert main(["analyze", "--protocol", str(DATA / "woolam_flawed.proto")]) == 1


def test_criterion_5_nsl_message_space(nsl_space, nsl_ctx):
    assert len(nsl_space) == 7
    hits = {t: len(unifiable_patterns(nsl_space, parse_term(t), nsl_ctx))
            for t in ["{Na@s.A}kb", "{?X}kb", "{B.Nb@s}ka", "{B.?Y}ka"]}
    assert hits == {"{Na@s.A}kb": 3, "{?X}kb": 1, "{B.Nb@s}ka": 3, "{B.?Y}ka": 2}


def test_criterion_6_hashed_nsl():
    report = analyze(DATA / "nsl.ctx", DATA / "nsl_hash.proto")
    # hand-computed oracle under the hash-opacity rule: a hashed component hides
    # the atom, so the forwarded variables only meet the top level
    expected = {
        "Na@s": (L("B"), L()), "?X": (L(), L("A")), "?Y": (L(), L("B")), "Nb@s": (L("A"), L()),
    }
    assert {r.atom: (r.lower, r.upper) for r in report.rows} == expected
    assert report.overall == INCREASING and report.assumptions
    assert main(["analyze", "--protocol", str(DATA / "nsl_hash.proto")]) == 0


def test_criterion_7_property_suites(request, outcomes):
    ran = {k: v for k, v in outcomes.items() if k.split("::")[0].endswith("test_properties.py")}
    expected = [i.nodeid for i in request.session.items if i.path.name == "test_properties.py"]
    if expected and all(n in ran for n in expected):
        assert all(ran[n] for n in expected), [n for n in expected if not ran[n]]
        return
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                           str(HERE / "test_properties.py")], capture_output=True, text=True,
                          cwd=HERE.parent)
    assert proc.returncode == 0, proc.stdout[-2000:]
