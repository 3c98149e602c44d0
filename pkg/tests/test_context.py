import pytest

from wifn.context import dump_context, inverse, load_context, type_of
from wifn.errors import ContextError, ParseError
from wifn.lattice import ALL, SecurityLevel
from wifn.terms import Param, Theory

L = SecurityLevel.of


def test_nsl_context(nsl_ctx):
    assert type_of(nsl_ctx, "Na") == L("A", "B")
    assert type_of(nsl_ctx, "A") == ALL
    assert inverse(nsl_ctx, "kb") == "kb_inv"
    assert type_of(nsl_ctx, "kb_inv") == L("B")
    assert inverse(nsl_ctx, inverse(nsl_ctx, "ka")) == "ka"
    assert nsl_ctx.theory is Theory.HOMOMORPHIC


def test_symmetric_key(example_ctx):
    assert inverse(example_ctx, "kab") == "kab"


def test_params_typed_by_base_name(nsl_ctx):
    assert type_of(nsl_ctx, Param("Na", "s")) == L("A", "B")
    assert type_of(nsl_ctx, "Na@7") == L("A", "B")


def test_unknown_atom_and_key(nsl_ctx):
    with pytest.raises(ContextError):
        type_of(nsl_ctx, "Nz")
    with pytest.raises(ContextError):
        inverse(nsl_ctx, "kz")


def test_round_trip(nsl_ctx, woolam_ctx, example_ctx):
    for ctx in (nsl_ctx, woolam_ctx, example_ctx):
        assert load_context(dump_context(ctx)) == ctx


def test_missing_intruder():
    with pytest.raises(ContextError):
        load_context("principals A, B\n")


def test_intruder_must_be_principal():
    with pytest.raises(ContextError):
        load_context("principals A\nintruder I\n")


def test_duplicate_type_reports_line():
    with pytest.raises(ParseError) as err:
        load_context("principals A, I\nintruder I\ntype k = {A}\ntype k = {}\n")
    assert err.value.line == 4


def test_non_involutive_inverses():
    with pytest.raises(ParseError):
        load_context("principals A, I\nintruder I\ntype a = ALL\ntype b = ALL\ntype c = ALL\n"
                     "inv a = b\ninv b = c\n")


def test_key_without_type():
    with pytest.raises(ContextError):
        load_context("principals A, I\nintruder I\ninv k = k\n")


def test_comments_and_unknown_directive():
    ctx = load_context("# c\nprincipals A, I  # trailing\nintruder I\nconst c0\n")
    assert ctx.constants == {"c0"}
    with pytest.raises(ParseError):
        load_context("principals A, I\nintruder I\nfoo bar\n")
