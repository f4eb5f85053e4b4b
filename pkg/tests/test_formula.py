"""Parser, normal form, lasso semantics, and the benchmark family."""

import random

import pytest

from cocoa import (
    Alphabet, InvalidParameter, LassoWord, ParseError, UnknownAtom,
    enumerate_lassos, eval_lasso, lower_bound_alphabet, lower_bound_family,
    neg, parse_lasso, parse_ltl, to_nnf,
)
from cocoa.formula import (
    ATOM, FINALLY, GLOBALLY, IMPLIES, NOT, RELEASE, UNTIL, canonical_lasso,
    is_nnf, subformulas,
)

from conftest import formula_corpus, lassos_up_to


def test_parse_single_operator():
    f = parse_ltl("G a", ["a"])
    assert f.kind == GLOBALLY and f.args[0].kind == ATOM and f.args[0].name == "a"


def test_parse_precedence():
    f = parse_ltl("GF a -> GF b", ["a", "b"])
    assert f.kind == IMPLIES
    left, right = f.args
    assert left.kind == GLOBALLY and left.args[0].kind == FINALLY
    assert right.kind == GLOBALLY and str(right.args[0].args[0]) == "b"


def test_parse_until_right_assoc():
    f = parse_ltl("a U b U a", ["a", "b"])
    assert f.kind == UNTIL and f.args[1].kind == UNTIL


def test_parse_and_binds_tighter_than_or():
    f = parse_ltl("a & b | a", ["a", "b"])
    assert f.kind == "or" and f.args[0].kind == "and"


def test_parse_truncated_input():
    with pytest.raises(ParseError):
        parse_ltl("a U", ["a"])


def test_parse_unknown_atom():
    with pytest.raises(UnknownAtom):
        parse_ltl("G c", ["a", "b"])


def test_parse_roundtrip_through_render():
    for f, aps in formula_corpus(25, seed=11):
        again = parse_ltl(str(f), aps)
        assert again == f


def test_nnf_globally_duality():
    f = to_nnf(neg(parse_ltl("G a", ["a"])))
    assert f == parse_ltl("F !a", ["a"])


def test_nnf_until_duality():
    f = to_nnf(neg(parse_ltl("a U b", ["a", "b"])))
    assert f.kind == RELEASE
    assert f.args[0].kind == NOT and f.args[1].kind == NOT


def test_nnf_idempotent_on_nnf_input():
    f = parse_ltl("F !a", ["a"])
    assert to_nnf(f) == f


def test_nnf_invariants_on_corpus():
    for f, aps in formula_corpus(40, seed=5):
        assert is_nnf(to_nnf(neg(f)))
        assert is_nnf(to_nnf(f))


def test_eval_fg_eventually_always():
    alpha = Alphabet.from_aps(["a"])
    w = LassoWord(alpha, (frozenset(),), (frozenset({"a"}),))
    assert eval_lasso(parse_ltl("FG a", ["a"]), w) is True


def test_eval_gf_never():
    alpha = Alphabet.from_aps(["b"])
    w = LassoWord(alpha, (), (frozenset(),))
    assert eval_lasso(parse_ltl("GF b", ["b"]), w) is False


def test_eval_implication_counterexample():
    alpha = Alphabet.from_aps(["a", "b"])
    w = LassoWord(alpha, (), (frozenset({"a"}),))
    assert eval_lasso(parse_ltl("GF a -> GF b", ["a", "b"]), w) is False


def test_eval_negation_consistency():
    rng = random.Random(77)
    for f, aps in formula_corpus(30, seed=42):
        alpha = Alphabet.from_aps(aps)
        lassos = enumerate_lassos(alpha, 1, 2)
        nnf_neg = to_nnf(neg(f))
        for w in rng.sample(lassos, min(8, len(lassos))):
            assert eval_lasso(f, w) == (not eval_lasso(nnf_neg, w))


def test_eval_unrolling_invariance():
    for f, aps in formula_corpus(20, seed=43):
        alpha = Alphabet.from_aps(aps)
        for w in lassos_up_to(alpha, 1, 2)[:20]:
            unrolled = LassoWord(alpha, w.prefix + w.period, w.period)
            assert eval_lasso(f, w) == eval_lasso(f, unrolled)


def test_nnf_preserves_semantics():
    for f, aps in formula_corpus(30, seed=44):
        alpha = Alphabet.from_aps(aps)
        nnf = to_nnf(f)
        for w in lassos_up_to(alpha, 1, 2):
            assert eval_lasso(f, w) == eval_lasso(nnf, w)


def test_lasso_parse_and_text():
    alpha = Alphabet.from_aps(["a", "b"])
    w = parse_lasso("{a b}{};{a}", alpha)
    assert w.prefix == (frozenset({"a", "b"}), frozenset())
    assert w.period == (frozenset({"a"}),)
    assert parse_lasso(w.text(), alpha) == w


def test_lasso_parse_errors():
    alpha = Alphabet.from_aps(["a"])
    with pytest.raises(ParseError):
        parse_lasso("{a}", alpha)  # no separator
    with pytest.raises(ParseError):
        parse_lasso("{a};", alpha)  # empty period
    with pytest.raises(UnknownAtom):
        parse_lasso("{c};{a}", alpha)


def test_lasso_period_required():
    alpha = Alphabet.from_aps(["a"])
    with pytest.raises(ValueError):
        LassoWord(alpha, (), ())


def test_canonical_lasso_folds_duplicates():
    a = frozenset({"a"})
    b = frozenset()
    # u.v^w with the period rotated back into the prefix
    assert canonical_lasso((a,), (b, a)) == canonical_lasso((), (a, b))
    # powers of a shorter period collapse
    assert canonical_lasso((), (a, b, a, b)) == canonical_lasso((), (a, b))


def test_enumerate_lassos_distinct_words():
    alpha = Alphabet.from_aps(["a"])
    lassos = enumerate_lassos(alpha, 2, 2)
    seen = set()
    for w in lassos:
        key = tuple(w.letter_at(i) for i in range(8))  # long unrolling
        assert key not in seen
        seen.add(key)


def test_lower_bound_family_size_linear():
    sizes = [lower_bound_family(n).size() for n in (1, 2, 3, 4)]
    diffs = {b - a for a, b in zip(sizes, sizes[1:])}
    assert len(diffs) == 1  # constant increment
    assert sizes[0] <= 120


def test_lower_bound_family_shape():
    f = lower_bound_family(1)
    assert f.kind == NOT
    alpha = lower_bound_alphabet(1)
    assert set(alpha.aps) == {"a1", "b1", "#", "$"}
    assert len(alpha.letters) == 4  # restricted to singletons


def test_lower_bound_family_membership():
    # a well-formed word: one block, separator, the same block, marker tail
    alpha = lower_bound_alphabet(1)
    h, d, a1, b1 = (frozenset({p}) for p in ("#", "$", "a1", "b1"))
    psi = neg(lower_bound_family(1))
    good = LassoWord(alpha, (h, a1, d, a1), (h,))
    copy_violation = LassoWord(alpha, (h, a1, d, b1), (h,))
    no_separator = LassoWord(alpha, (h, a1), (h,))
    assert eval_lasso(psi, good) is True
    assert eval_lasso(psi, copy_violation) is False
    assert eval_lasso(psi, no_separator) is False
    two_blocks = LassoWord(alpha, (h, b1, h, a1, d, b1), (h,))
    assert eval_lasso(psi, two_blocks) is True


def test_lower_bound_family_rejects_bad_n():
    with pytest.raises(InvalidParameter):
        lower_bound_family(0)
    with pytest.raises(InvalidParameter):
        lower_bound_alphabet(0)
