import pytest
from hypothesis import given
from hypothesis import strategies as st

from lacunary.errors import WorkCapExceeded
from lacunary.oracles import (
    AbelianOracle,
    BallClosureOracle,
    Certificate,
    DehnOracle,
    FiniteTableOracle,
    FreeOracle,
    FreeProductOracle,
    Presentation,
    Verdict,
    abelian_oracle,
    auto_oracle,
    cyclic_oracle,
    dehn_solve,
    equal_words,
    exponent_sums,
    factor_presentations,
    finite_oracle,
    format_presentation,
    is_trivial,
    parse_presentation,
)
from lacunary.words import free_reduce, inverse


def test_parse_and_format_round_trip(genus2):
    text = format_presentation(genus2, ["comment"])
    assert text.startswith("# comment")
    assert parse_presentation(text) == genus2


@pytest.mark.parametrize("bad", [
    "[generators] a\n[relator] b\n",
    "[generators] a\n[relator] aA\n",
    "[generators] a a\n",
    "[relator] a\n",
    "[generators] a\n[bogus] a\n",
])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_presentation(bad)


def test_from_words_normalises():
    p = Presentation.from_words("ab", ["baB", "aA", "a"])
    assert p.relators == ("a",)


def test_free_oracle(f2):
    assert f2.is_trivial("abBA") is Verdict.TRIVIAL
    assert f2.is_trivial("ab") is Verdict.NONTRIVIAL
    assert equal_words(f2, "aB", "abBB") is Verdict.TRIVIAL
    with pytest.raises(ValueError):
        is_trivial(f2, "c")


def test_abelian_oracle(z2):
    assert z2.is_trivial("abAB") is Verdict.TRIVIAL
    assert z2.word_length("abab") == 4
    z = AbelianOracle("ab", [4, 0])
    assert z.is_trivial("aaaa") is Verdict.TRIVIAL
    assert z.word_length("aaa") == 1


def test_abelian_from_presentation():
    p = parse_presentation("[generators] a b\n[relator] abAB\n[relator] aaaaaa\n")
    o = abelian_oracle(p)
    assert o.orders == (6, 0)
    with pytest.raises(ValueError):
        abelian_oracle(parse_presentation("[generators] a b\n[relator] aaa\n"))


def test_cyclic_and_finite():
    z6 = cyclic_oracle(6)
    assert z6.is_trivial("a" * 6) is Verdict.TRIVIAL
    assert z6.word_length("aaaa") == 2
    s3 = finite_oracle(parse_presentation("[generators] a b\n[relator] aaa\n[relator] bb\n[relator] abab\n"))
    assert isinstance(s3, FiniteTableOracle)
    assert s3.order == 6
    with pytest.raises(WorkCapExceeded):
        finite_oracle(parse_presentation("[generators] a b\n[relator] abAB\n"), max_radius=3)


def test_dehn_genus2(genus2):
    assert dehn_solve(genus2, "abABcdCD") is Verdict.TRIVIAL
    assert dehn_solve(genus2, "abAB") is Verdict.NONTRIVIAL
    assert dehn_solve(genus2, "cdCDabAB") is Verdict.TRIVIAL
    # [c,d][b,a] is [c,d] squared
    assert dehn_solve(genus2, "cdCDbaBA") is Verdict.NONTRIVIAL
    assert DehnOracle(genus2).certificate is Certificate.CERTIFIED


def test_dehn_not_certified_gives_unknown():
    p = parse_presentation("[generators] a b\n[relator] abAB\n")
    o = DehnOracle(p)
    assert o.certificate is Certificate.BEST_EFFORT
    assert o.is_trivial("ab") is Verdict.UNKNOWN
    assert o.is_trivial("abAB") is Verdict.TRIVIAL


def test_exponent_sum_invariant(genus2):
    assert exponent_sums(genus2, "abAB") == (0, 0, 0, 0)
    assert exponent_sums(genus2, "aab") == (2, 1, 0, 0)


def test_free_product(z4_z6):
    assert z4_z6.is_trivial("aaaabbbbbb") is Verdict.TRIVIAL
    assert z4_z6.is_trivial("abAB") is Verdict.NONTRIVIAL
    assert z4_z6.key("aaaaab") == z4_z6.key("ab")
    assert z4_z6.word_length("aaab") == 2


def test_ball_closure_finite_group_is_certified():
    p = parse_presentation("[generators] a\n[relator] aaaaaa\n")
    o = BallClosureOracle(p, 3)
    assert o.complete and o.size == 6
    assert o.certificate is Certificate.CERTIFIED
    assert o.is_trivial("aaaaaa") is Verdict.TRIVIAL
    assert o.is_trivial("aa") is Verdict.NONTRIVIAL


def test_ball_closure_margin_rule(genus2):
    small = BallClosureOracle(genus2, 2)
    assert small.certificate is Certificate.BEST_EFFORT
    assert small.is_trivial("ab") is Verdict.UNKNOWN
    big = BallClosureOracle(genus2, 4)
    assert big.is_trivial("abABcdCD") is Verdict.TRIVIAL
    assert big.is_trivial("ab") is Verdict.NONTRIVIAL


def test_auto_oracle_choices(genus2):
    assert isinstance(auto_oracle(Presentation(("a",), ())), FreeOracle)
    assert isinstance(auto_oracle(parse_presentation("[generators] a\n[relator] aaaaaaaa\n")), FiniteTableOracle)
    assert isinstance(auto_oracle(genus2), DehnOracle)


finite_words = st.text(alphabet="abAB", max_size=14)


@given(finite_words)
def test_finite_backends_agree(w):
    # Z/4 * Z/6 three ways: free-product normal form, Dehn (C'(1/6) holds), closure table
    fp = FreeProductOracle([cyclic_oracle(4, "a"), cyclic_oracle(6, "b")])
    p = parse_presentation("[generators] a b\n[relator] aaaa\n[relator] bbbbbb\n")
    assert fp.is_trivial(w) is DehnOracle(p).is_trivial(w)


@given(st.text(alphabet="abAB", max_size=10))
def test_s3_table_vs_closure(w):
    p = parse_presentation("[generators] a b\n[relator] aaa\n[relator] bb\n[relator] abab\n")
    t = finite_oracle(p)
    c = BallClosureOracle(p, 3)
    assert t.is_trivial(w) is c.is_trivial(w)


@given(st.text(alphabet="abcdABCD", max_size=12))
def test_dehn_closure_trivial_agreement(w):
    p = parse_presentation("[generators] a b c d\n[relator] abABcdCD\n")
    # closure TRIVIAL verdicts are sound, so they must be confirmed by Dehn
    if BallClosureOracle(p, 3).is_trivial(w) is Verdict.TRIVIAL:
        assert dehn_solve(p, w) is Verdict.TRIVIAL
    assert dehn_solve(p, w + inverse(w)) is Verdict.TRIVIAL
    assert dehn_solve(p, free_reduce(w)) is dehn_solve(p, w)


def test_factor_presentations():
    p = parse_presentation("[generators] a b c d\n[relator] aaaa\n[relator] bcBC\n")
    fs = factor_presentations(p)
    assert [f.generators for f in fs] == [("a",), ("b", "c"), ("d",)]
    assert fs[2].relators == ()


def test_auto_oracle_structured_backends():
    z2 = auto_oracle(parse_presentation("[generators] a b\n[relator] abAB\n"))
    assert isinstance(z2, AbelianOracle) and z2.is_trivial("aabABA") is Verdict.TRIVIAL
    fp = auto_oracle(parse_presentation("[generators] a b\n[relator] aaaa\n[relator] bbbbbb\n"))
    assert isinstance(fp, FreeProductOracle)
    assert fp.generators == ("a", "b")
    mixed = auto_oracle(parse_presentation("[generators] b a c\n[relator] aa\n"))
    assert mixed.generators == ("b", "a", "c")
    assert mixed.is_trivial("baaB") is Verdict.TRIVIAL
    assert mixed.is_trivial("bc") is Verdict.NONTRIVIAL
