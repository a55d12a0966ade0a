from fractions import Fraction

import pytest

from lacunary.chains import (
    ChainParams,
    Membership,
    RankOneSpec,
    StepKind,
    audit_chain,
    audit_csv,
    build_monster_chain,
    build_rips_chain,
    chain_from_presentations,
    monster_blocks,
    probe_commensurable,
    probe_elementary,
    random_reduced_word,
    read_plan,
    select_index,
)
from lacunary.errors import InfeasibleError
from lacunary.oracles import (
    AbelianOracle,
    FreeOracle,
    FreeProductOracle,
    Presentation,
    cyclic_oracle,
    parse_presentation,
)
from lacunary.words import OrderedAlphabet, enumerate_pairs, is_reduced

Q_TEXT = "[generators] g\n[relator] gg\n"


@pytest.fixture(scope="module")
def rips(genus2):
    return build_rips_chain(parse_presentation(Q_TEXT), genus2, 3)


@pytest.fixture(scope="module")
def monster():
    g0 = parse_presentation("[generators] a b c d\n")
    return build_monster_chain(g0, [RankOneSpec((2, 2))], 1)


def test_probe_elementary_abelian():
    rep = probe_elementary(AbelianOracle("ab"), "a", "b", 4)
    assert rep.verdict is Membership.MEMBER_PLUS and rep.witness == 1 and rep.sign == 1


def test_probe_elementary_free():
    rep = probe_elementary(FreeOracle("ab"), "a", "b", 6)
    assert rep.verdict is Membership.NOT_WITHIN_BOUND and rep.witness is None
    assert probe_elementary(FreeOracle("ab"), "a", "aa", 3).verdict is Membership.MEMBER_PLUS


def test_probe_elementary_inverting():
    # infinite dihedral group: a conjugates ab to its inverse
    d = FreeProductOracle([cyclic_oracle(2, "a"), cyclic_oracle(2, "b")])
    rep = probe_elementary(d, "ab", "a", 3)
    assert rep.verdict is Membership.MEMBER_MINUS and rep.witness == 1
    assert rep.torsion_order == 2
    assert "verdict: MEMBER(-)" in rep.lines()


def test_probe_commensurable():
    rep = probe_commensurable(FreeOracle("ab"), "a", "Bab", 3, 1)
    assert rep.witness == (1, 1, "b")
    assert probe_commensurable(FreeOracle("ab"), "aa", "a", 3, 1).witness == (1, 2, "")
    none = probe_commensurable(FreeOracle("ab"), "a", "b", 3, 2)
    assert none.witness is None and none.verdict == "NOT_WITHIN_BOUND"


def test_rank_one_spec():
    s = RankOneSpec((2, 3))
    assert [s.multiplier(i) for i in range(4)] == [2, 3, 3, 3]
    with pytest.raises(ValueError):
        RankOneSpec((1,))
    with pytest.raises(ValueError):
        RankOneSpec((2,), (3, 1))


def test_random_word_reduced():
    import random

    rng = random.Random(1)
    for n in range(1, 12):
        w = random_reduced_word(rng, OrderedAlphabet("ab").letters, n)
        assert len(w) == n and is_reduced(w)


def test_rips_structure(rips, genus2):
    kinds = [s.kind for s in rips.steps]
    assert kinds == [StepKind.BASE, StepKind.OSIN_QUOTIENT, StepKind.SC_QUOTIENT]
    assert rips.steps[0].presentation.generators == genus2.generators + ("g",)
    assert len(rips.steps[1].new_relators) == 8
    assert rips.steps[2].new_relators == ("ggaaabaaaa",)
    assert rips.check_generator_images()
    assert all(rips.step_map(k) == {g: g for g in rips.steps[k - 1].presentation.generators}
               for k in range(1, len(rips)))


def test_rips_w_source(genus2):
    plan = build_rips_chain(parse_presentation(Q_TEXT), genus2, 2, w_source={"Gag": "ab"}, audit=False)
    assert "Gagab" in plan.steps[1].new_relators
    assert plan.steps[1].params["w[Gag]"] == "ab"


def test_rips_rejects_unsorted_q(genus2):
    q = parse_presentation("[generators] g\n[relator] ggg\n[relator] gg\n")
    with pytest.raises(ValueError):
        build_rips_chain(q, genus2, 3)


def test_rips_free_q(genus2):
    plan = build_rips_chain(parse_presentation("[generators] g\n"), genus2, 4, audit=False)
    assert len(plan) == 2
    assert any(k == "note" for k, _ in plan.ledger)


def test_rips_round_trip(rips, tmp_path):
    rips.write(tmp_path)
    back = read_plan(tmp_path)
    assert [s.presentation for s in back.steps] == [s.presentation for s in rips.steps]
    assert [s.kind for s in back.steps] == [s.kind for s in rips.steps]
    assert (tmp_path / "ledger.txt").read_text().startswith("plan: rips")
    assert (tmp_path / "audit.csv").read_text().startswith("step,kind")


def test_rips_audit_radii(rips):
    for step in rips.steps[1:]:
        assert "injectivity_radius" in step.audit


def test_read_plan_errors(tmp_path):
    with pytest.raises(ValueError):
        read_plan(tmp_path)
    (tmp_path / "step_1.pres").write_text("[generators] a\n")
    with pytest.raises(ValueError):
        read_plan(tmp_path)


def test_select_index():
    pairs = enumerate_pairs(OrderedAlphabet("ab"), 6, distinct=True)
    assert select_index(FreeOracle("ab"), pairs, 1, 4).index == 1
    with pytest.raises(InfeasibleError):
        select_index(AbelianOracle("ab"), pairs, 1, 4)


def test_monster_structure(monster):
    kinds = [s.kind for s in monster.steps]
    assert kinds == [StepKind.BASE, StepKind.AMALGAM, StepKind.SC_QUOTIENT]
    amalgam = monster.steps[1]
    assert amalgam.params["u_k"] == "A"
    assert amalgam.new_generators == ("e",)
    assert amalgam.new_relators == ("AEE",)
    assert monster.check_generator_images()


def test_monster_blocks_disjoint(monster):
    (y, z), = monster_blocks(monster)
    assert y == [3, 4]
    assert z[0] == 6 and len(z) == len(set(z))
    assert not set(y) & set(z)
    sc = monster.steps[2]
    assert len(sc.new_relators) == int(sc.params["Y_block_relators"]) + int(sc.params["Z_block_relators"])


def test_monster_rejects_empty_family():
    with pytest.raises(ValueError):
        build_monster_chain(parse_presentation("[generators] a b\n"), [], 1)


def test_chain_from_presentations():
    plan = chain_from_presentations([Presentation(("a",), ()), Presentation(("a", "b"), ()),
                                     Presentation(("a", "b"), ("ab",))])
    assert [s.kind for s in plan.steps] == [StepKind.BASE, StepKind.AMALGAM, StepKind.SC_QUOTIENT]


def test_audit_cyclic_quotient():
    plan = chain_from_presentations([Presentation(("a",), ()), Presentation(("a",), ("a" * 8,))])
    rows = audit_chain(plan, [5], 4)
    assert len(rows) == 1
    assert rows[0].injectivity == "3"
    assert rows[0].f_tmax == "0" and rows[0].ratio == "0"
    assert audit_csv(rows).splitlines()[0].startswith("step,kind,radius")


def test_audit_identity_chain():
    p = Presentation(("a", "b"), ())
    rows = audit_chain(chain_from_presentations([p, p]), [2, 3], 4)
    assert [r.injectivity for r in rows] == ["UNBOUNDED_UP_TO(2)", "UNBOUNDED_UP_TO(3)"]


def test_chain_params_validation():
    with pytest.raises(ValueError):
        ChainParams(m1=1)
    assert ChainParams(mu="1/6").mu == Fraction(1, 6)
