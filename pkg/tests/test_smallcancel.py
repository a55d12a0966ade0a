import os.path
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lacunary.cayley import Ball
from lacunary.errors import GuardViolation
from lacunary.oracles import (
    AbelianOracle,
    FreeOracle,
    FreeProductOracle,
    GroupOracle,
    Verdict,
    cyclic_oracle,
    parse_presentation,
)
from lacunary.smallcancel import (
    ScParams,
    check_classical,
    check_generalized,
    classical_pieces,
    exact,
    find_epsilon_pieces,
    find_same_relator_pieces,
    proper_power_guard,
    quasigeodesic_check,
    quotient_delta_check,
    replay_piece,
)
from lacunary.words import cyclic_reduce, symmetrize


class Keyless(GroupOracle):
    """Hides keys and lengths so searches take the generic word-problem route."""

    def __init__(self, inner: GroupOracle):
        self.inner = inner
        self.backend = inner.backend
        self.certificate = inner.certificate
        self.generators = inner.generators

    def is_trivial(self, w: str) -> Verdict:
        return self.inner.is_trivial(w)


def naive_max_piece(R) -> int:
    rs = sorted(R)
    return max((len(os.path.commonprefix([r, s])) for r in rs for s in rs if r != s), default=0)


def test_exact():
    assert exact(0.4) == Fraction(2, 5)
    assert exact("1/6") == Fraction(1, 6)


def test_params_validation():
    with pytest.raises(ValueError):
        ScParams(mu=1)
    with pytest.raises(ValueError):
        ScParams(lam=Fraction(1, 2))
    with pytest.raises(ValueError):
        ScParams(eps=-1)
    assert ScParams(rho=10**8, eps=1, mu=Fraction(1, 6)).large_rho_regime()


def test_commutator_pieces():
    R = symmetrize(["abAB"])
    assert check_classical(R, Fraction(3, 10)).passed
    rep = check_classical(R, Fraction(1, 4))
    assert not rep.passed and rep.max_piece == 1
    assert rep.clauses["C'(mu)"] == "FAIL"


def test_genus2_is_c_sixth():
    rep = check_classical(symmetrize(["abABcdCD"]), Fraction(1, 6))
    assert rep.passed and rep.max_piece == 1


def test_two_block_relator_piece():
    # a^6 b a^6 is shared by two different rotations
    rep = check_classical(symmetrize(["a" * 6 + "b" + "a" * 7 + "b"]), Fraction(1, 6), pairs=True)
    assert rep.max_piece == 13
    assert rep.max_piece == naive_max_piece(symmetrize(["a" * 6 + "b" + "a" * 7 + "b"]))
    assert not rep.passed


def test_check_classical_rejects_unsymmetrized():
    with pytest.raises(ValueError):
        check_classical({"abAB"}, Fraction(1, 6))


rel_lists = st.lists(st.text(alphabet="abAB", min_size=2, max_size=9), min_size=1, max_size=3)


@given(rel_lists)
def test_neighbour_maxima_match_pair_table(rels):
    rels = [cyclic_reduce(r) for r in rels if cyclic_reduce(r)]
    if not rels:
        return
    R = symmetrize(rels)
    rep = check_classical(R, Fraction(1, 6), pairs=True)
    assert rep.max_piece == naive_max_piece(R)
    table = classical_pieces(R)
    for r in R:
        assert rep.per_relator[r] == max([v for (a, _), v in table.items() if a == r], default=0)


@given(rel_lists)
def test_eps_zero_over_free_group_is_classical(rels):
    rels = [cyclic_reduce(r) for r in rels if cyclic_reduce(r)]
    if not rels:
        return
    R = symmetrize(rels)
    gen = find_epsilon_pieces(FreeOracle("ab"), R, 0)
    classical = {k: v for k, v in classical_pieces(R).items() if v > 0}
    assert gen.pieces == classical


@pytest.mark.parametrize("oracle,rels,eps", [
    (AbelianOracle("ab"), ["aaaabaaaaab"], 1),
    (AbelianOracle("ab"), ["abAB", "aab"], 1),
    (FreeOracle("ab"), ["aabab", "abbb"], 1),
    (FreeProductOracle([cyclic_oracle(4, "a"), cyclic_oracle(6, "b")]), ["abAbb"], 1),
])
def test_keyed_and_generic_routes_agree(oracle, rels, eps):
    R = symmetrize(rels)
    keyed = find_epsilon_pieces(oracle, R, eps)
    generic = find_epsilon_pieces(Keyless(oracle), R, eps)
    assert keyed.pieces == generic.pieces
    assert keyed.per_relator == generic.per_relator
    for w in keyed.witnesses:
        assert replay_piece(oracle, w, eps)


def test_z2_pieces_are_short():
    # in an abelian group every rotation is conjugate to the relator, so clause (c) leaves inverses only
    R = symmetrize(["aaaabaaaaab"])
    rep = find_epsilon_pieces(AbelianOracle("ab"), R, 1)
    assert rep.max_piece == 2
    assert all(w.R2 != w.R for w in rep.witnesses)


def test_epsilon_piece_longer_than_classical():
    R = symmetrize(["aabab", "abbb"])
    free0 = find_epsilon_pieces(FreeOracle("ab"), R, 0).max_piece
    free1 = find_epsilon_pieces(FreeOracle("ab"), R, 1).max_piece
    assert free1 >= free0 == naive_max_piece(R)


def test_quasigeodesic():
    z2 = AbelianOracle("ab")
    assert quasigeodesic_check(z2, "abab").passed
    rep = quasigeodesic_check(z2, "abAB")
    assert not rep.passed and rep.witness == (0, 4, "abAB")
    assert quasigeodesic_check(z2, "abAB", lam=1, c=4).passed
    assert quasigeodesic_check(z2, "abAB", lam=2, c=2).passed


@given(st.text(alphabet="abAB", min_size=1, max_size=7))
def test_quasigeodesic_length_route_matches_ball(w):
    z2 = AbelianOracle("ab")
    fast = quasigeodesic_check(z2, w, 2, 1)
    slow = quasigeodesic_check(Ball(z2, 7), w, 2, 1)
    assert (fast.passed, fast.margin, fast.witness) == (slow.passed, slow.margin, slow.witness)


def test_quasigeodesic_guard():
    with pytest.raises(GuardViolation):
        quasigeodesic_check(Ball(Keyless(AbelianOracle("ab")), 2), "abab")


def test_generalized_over_free_group():
    rep = check_generalized(FreeOracle("abcd"), symmetrize(["abABcdCD"]), ScParams(mu=Fraction(1, 6), rho=8))
    assert rep.passed
    assert rep.clauses == {"C1": "PASS", "C2": "PASS", "C3": "PASS"}
    assert rep.max_piece == 1


def test_generalized_c1_and_c2_fail_over_z2():
    rep = check_generalized(AbelianOracle("ab"), symmetrize(["abAB"]), ScParams(rho=5))
    assert rep.clauses["C1"] == "FAIL"
    assert rep.clauses["C2"] == "FAIL"
    assert "C1_witness" in rep.details


def test_same_relator_pieces():
    found = find_same_relator_pieces(FreeOracle("ab"), ["aabaaab"], 0)
    assert found and found[0].U2 == found[0].U
    assert found[0].length >= 2


def test_proper_power_guard():
    p = ScParams(mu=Fraction(1, 200), rho=10**4, eps=1)
    ok = proper_power_guard("ab" * 5, p)
    assert ok.passed and ok.values["length_bound"] == "49"
    assert not proper_power_guard(49, p).passed
    assert not proper_power_guard(1, ScParams(mu=Fraction(1, 6), rho=10**4)).passed


def test_quotient_delta_check():
    base = parse_presentation("[generators] a\n")
    rep = quotient_delta_check(base, ["aaaaa"], Ball(cyclic_oracle(5), 3), 6)
    assert rep.status == "PASS" and rep.bound == 20
    assert quotient_delta_check(base, [], Ball(cyclic_oracle(5), 3), 4).status == "SKIPPED"
