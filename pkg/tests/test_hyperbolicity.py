from fractions import Fraction

import pytest

from lacunary.cayley import Ball, path_from_word
from lacunary.errors import GuardViolation
from lacunary.hyperbolicity import (
    Mode,
    brute_force_ngon_violations,
    brute_force_triangle_sup,
    four_point_delta,
    hyperbolicity_function,
    ngon_factor,
    ngon_neighborhood_check,
    ngon_sweep,
    slimness,
    sublinearity_report,
    synchronized_report,
    thinness_and_insize,
    triangle_measure,
    tripod,
)
from lacunary.oracles import AbelianOracle, FreeOracle, FreeProductOracle, cyclic_oracle


@pytest.fixture(scope="module")
def z2b():
    return Ball(AbelianOracle("ab"), 5)


def test_free_group_profile_is_zero():
    p = hyperbolicity_function(Ball(FreeOracle("ab"), 4), 8)
    assert [s.f for s in p.samples] == [0] * 9


def test_profile_guard():
    with pytest.raises(GuardViolation):
        hyperbolicity_function(Ball(FreeOracle("ab"), 3), 8)


@pytest.mark.parametrize("oracle,radius,t_max", [
    (AbelianOracle("ab"), 4, 8),
    (FreeProductOracle([cyclic_oracle(2, "a"), cyclic_oracle(3, "b")]), 4, 8),
    (cyclic_oracle(7), 4, 9),
    (FreeOracle("ab"), 3, 6),
])
def test_profile_matches_brute_force(oracle, radius, t_max):
    b = Ball(oracle, radius)
    assert [s.f for s in hyperbolicity_function(b, t_max).samples] == brute_force_triangle_sup(b, t_max)


def test_z2_square_triangle(z2b):
    # right triangle 1 -> a^2 -> a^2 b^2 -> 1 along the two legs and the staircase hypotenuse
    x, y = z2b.locate("aa"), z2b.locate("aabb")
    sides = [path_from_word(z2b, 0, "aa"), path_from_word(z2b, x, "bb"),
             path_from_word(z2b, y, "BABA")]
    assert slimness(z2b, sides) == 1
    m = triangle_measure(z2b, sides)
    assert m.perimeter == 8 and m.slim == 1
    t = tripod(z2b, 0, x, y)
    assert t.a + t.b == 2 and t.a + t.c == 4 and t.b + t.c == 2
    thin, insize = thinness_and_insize(z2b, sides)
    assert thin >= insize >= 0


def test_sublinearity_z2():
    p = hyperbolicity_function(Ball(AbelianOracle("ab"), 6), 12)
    for k in range(1, 4):
        assert p.f(4 * k) >= k
    rep = sublinearity_report(p, [4, 8])
    assert [s.f for s in p.samples] == [0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3]
    assert all(r >= Fraction(1, 4) for t, r in rep.ratios if t % 4 == 0)
    assert rep.liminf_proxy == [(4, Fraction(1, 7)), (8, Fraction(2, 11))]
    assert rep.running_min[-1][1] == 0


def test_modes_order():
    b = Ball(AbelianOracle("ab"), 4)
    ex = hyperbolicity_function(b, 8, Mode.EXACT)
    for mode in Mode:
        assert len(hyperbolicity_function(b, 8, mode).samples) == 9
    assert ex.csv().splitlines()[0].startswith("t,")


def test_ngon_factor():
    assert ngon_factor(3) == 2.0
    assert ngon_factor(5) == 3.0


def test_ngon_check_square(z2b):
    x, y, z = z2b.locate("aa"), z2b.locate("aabb"), z2b.locate("bb")
    square = [path_from_word(z2b, 0, "aa"), path_from_word(z2b, x, "bb"),
              path_from_word(z2b, y, "AA"), path_from_word(z2b, z, "BB")]
    rep = ngon_neighborhood_check(z2b, square, 0)
    assert not rep.passed and rep.side_values == [1, 1, 1, 1]
    assert ngon_neighborhood_check(z2b, square, 1).passed
    with pytest.raises(ValueError):
        ngon_neighborhood_check(z2b, square[:3], 1)


@pytest.mark.parametrize("bound,expect_pass", [(0, False), (1, True)])
def test_ngon_sweep_vs_brute_force_z2(bound, expect_pass):
    b = Ball(AbelianOracle("ab"), 2)
    rep = ngon_sweep(b, 1, [3, 4], bound)
    brute = sum(brute_force_ngon_violations(b, 1, n, lambda P: bound) for n in (3, 4))
    assert rep.passed == expect_pass
    assert rep.passed == (brute == 0)


def test_ngon_sweep_vs_brute_force_tree():
    b = Ball(FreeOracle("ab"), 2)
    rep = ngon_sweep(b, 1, [3, 4], 0)
    assert rep.passed
    assert brute_force_ngon_violations(b, 1, 4, lambda P: 0) == 0


def test_ngon_sweep_vs_brute_force_free_product():
    fp = FreeProductOracle([cyclic_oracle(2, "a"), cyclic_oracle(3, "b")])
    b = Ball(fp, 4)
    prof = hyperbolicity_function(b, 9)
    rep = ngon_sweep(b, 2, [3, 4], prof)
    brute = sum(brute_force_ngon_violations(b, 2, n, lambda P: prof.f(min(P, prof.t_max))) for n in (3, 4))
    assert rep.passed == (brute == 0)


def test_ngon_sweep_guard():
    with pytest.raises(GuardViolation):
        ngon_sweep(Ball(FreeOracle("ab"), 3), 2, [3], 1)


def test_synchronized_report():
    z4, z6 = cyclic_oracle(4, "a"), cyclic_oracle(6, "b")
    pa = hyperbolicity_function(Ball(z4, 5), 10)
    pb = hyperbolicity_function(Ball(z6, 5), 10)
    pp = hyperbolicity_function(Ball(FreeProductOracle([z4, z6]), 5), 10)
    rep = synchronized_report([pa, pb], [2, 4, 8, 10], Fraction(1, 10), product=pp)
    assert rep.sandwich_holds
    assert rep.status in ("PASS-AT-SCALES", "FAIL-AT-SCALES")
    assert rep.lines()[0].startswith("label: FINITE-SCALE EVIDENCE")
    with pytest.raises(ValueError):
        synchronized_report([pa], [11])


def test_four_point():
    assert four_point_delta(Ball(FreeOracle("ab"), 2)) == 0
    b = Ball(AbelianOracle("ab"), 2)
    # corners of a 2x2 square: diagonal pairing 4+4 against side pairings 2+2
    assert four_point_delta(b) == Fraction(2)
