from wifn.terms import Const, Param, Var, apply, parse_term
from wifn.unify import align, mgu, rename_apart, unifiable_patterns

P = parse_term


def test_mgu_binds_pattern_side_first():
    sigma = mgu(P("?X"), P("?Y"))
    assert sigma == {Var("X"): Var("Y")}


def test_mgu_occurs_check():
    assert mgu(P("?X"), P("h(?X)")) is None


def test_mgu_clash():
    assert mgu(P("{a}k"), P("h(a)")) is None
    assert mgu(P("a"), P("b")) is None


def test_param_binds_atoms_only():
    assert mgu(P("k@1"), P("kb")) == {Param("k", "1"): Const("kb")}
    assert mgu(P("k@1"), P("a.b")) is None


def test_variable_key_cannot_become_compound():
    assert mgu(P("{a}?K"), P("{a}k")) == {Var("K"): Const("k")}
    assert mgu(P("{?X}?K.?K"), P("{a}k.(b.c)")) is None


def test_sorted_params(nsl_ctx):
    assert mgu(P("Na@1"), P("Nb@s"), nsl_ctx) is None
    assert mgu(P("B@1"), P("Na@s"), nsl_ctx) is None
    assert mgu(P("B@1"), P("A"), nsl_ctx) is not None
    assert mgu(P("kb@1"), P("ka"), nsl_ctx) is not None
    assert mgu(P("Na@1"), P("Na@s"), nsl_ctx) is not None


def test_mgu_is_unifier():
    p, t = P("{?X.b}k@1"), P("{a.?Y}k")
    sigma = mgu(p, t)
    assert apply(sigma, p) == apply(sigma, t) == P("{a.b}k")


def test_rename_apart_only_on_clash():
    p = P("{?X.A@1}k")
    assert rename_apart(p, P("{?Y}k")) == p
    renamed = rename_apart(p, P("?X"))
    assert renamed != p and not ({Var("X")} & set(x for x in [renamed]))


def test_align_stops_at_variable():
    assert align(P("{?X}k"), (0, 1)) == ((0,), Var("X"))
    assert align(P("{a.b}k"), (0, 1)) == ((0, 1), Const("b"))


def test_nsl_hit_sets(nsl_space, nsl_ctx):
    expected = {"{Na@s.A}kb": 3, "{?X}kb": 1, "{B.Nb@s}ka": 3, "{B.?Y}ka": 2}
    for target, n in expected.items():
        assert len(unifiable_patterns(nsl_space, P(target), nsl_ctx)) == n, target


def test_focused_variable_not_instantiated(nsl_space, nsl_ctx):
    hits = unifiable_patterns(nsl_space, P("{?X}kb"), nsl_ctx)
    (pattern, sigma), = hits
    assert str(pattern) == "{?X_4}kb@4"
    unfocused = unifiable_patterns(nsl_space, P("{?X}kb"), nsl_ctx, focus=None)
    assert len(unfocused) > 1


def test_bare_variable_pattern_only_for_bare_target():
    space = [P("?Z"), P("{?W}k")]
    assert [str(p) for p, _ in unifiable_patterns(space, P("{a}k"))] == ["{?W}k"]
    assert [str(p) for p, _ in unifiable_patterns(space, P("?X"))] == ["?Z"]
