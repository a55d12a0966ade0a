"""Truncated quotient chains: plan generation, bounded side-condition probes, audits.

A plan is a list of presentations G_0, G_1, ... in which every step map
sends each generator of G_{k-1} to the generator of the same name in G_k.
Amalgam steps add generators; quotient steps add relators.  Conditions that
no finite computation can settle are stored as ASSUMED flags together with
the bounded evidence that was gathered.
"""

from __future__ import annotations

import csv
import enum
import io
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .cayley import Ball, Homomorphism, InjectivityRadius, injectivity_radius
from .errors import InfeasibleError
from .hyperbolicity import hyperbolicity_function
from .oracles import (
    Certificate,
    GroupOracle,
    Presentation,
    Verdict,
    auto_oracle,
    format_presentation,
    parse_presentation,
    weakest,
)
from .smallcancel import check_classical, exact
from .words import (
    OrderedAlphabet,
    enumerate_pairs,
    free_reduce,
    inverse,
    power,
    symmetrize,
)
from .wordsystems import build_schedule, build_word_system


# ---------------------------------------------------------------------------
# elementary subgroup and commensurability probes


class Membership(enum.Enum):
    MEMBER_PLUS = "MEMBER(+)"
    MEMBER_MINUS = "MEMBER(-)"
    NOT_WITHIN_BOUND = "NOT_WITHIN_BOUND"


@dataclass
class ElementaryProbeReport:
    g: str
    x: str
    n_max: int
    verdict: Membership
    witness: int | None
    torsion_order: int | None
    certificate: Certificate

    @property
    def sign(self) -> int | None:
        return {Membership.MEMBER_PLUS: 1, Membership.MEMBER_MINUS: -1}.get(self.verdict)

    def lines(self) -> list[str]:
        return [
            f"g: {self.g or '1'}",
            f"x: {self.x or '1'}",
            f"n_max: {self.n_max}",
            f"verdict: {self.verdict.value}",
            f"witness_n: {'none' if self.witness is None else self.witness}",
            f"torsion_order_of_x: {'none' if self.torsion_order is None else self.torsion_order}",
            f"certificate: {self.certificate.value}",
        ]


def probe_elementary(o: GroupOracle, g: str, x: str, n_max: int) -> ElementaryProbeReport:
    """Smallest n <= n_max with x g^n x^-1 = g^(+-n); never claims non-membership."""
    o.check_word(g)
    o.check_word(x)
    cert = o.certificate
    verdict, witness = Membership.NOT_WITHIN_BOUND, None
    xi = inverse(x)
    for n in range(1, n_max + 1):
        gn = power(g, n)
        conj = x + gn + xi
        found = None
        for sign, target in ((Membership.MEMBER_PLUS, gn), (Membership.MEMBER_MINUS, inverse(gn))):
            v = o.is_trivial(conj + inverse(target))
            if v is Verdict.UNKNOWN:
                cert = Certificate.BEST_EFFORT
            elif v is Verdict.TRIVIAL:
                found = sign
                break
        if found is not None:
            verdict, witness = found, n
            break
    torsion = None
    for k in range(1, n_max + 1):
        v = o.is_trivial(power(x, k))
        if v is Verdict.TRIVIAL:
            torsion = k
            break
        if v is Verdict.UNKNOWN:
            cert = Certificate.BEST_EFFORT
    return ElementaryProbeReport(g, x, n_max, verdict, witness, torsion, cert)


@dataclass
class CommensurabilityReport:
    g: str
    h: str
    k_max: int
    conj_radius: int
    witness: tuple[int, int, str] | None
    certificate: Certificate

    @property
    def verdict(self) -> str:
        return "COMMENSURABLE" if self.witness else "NOT_WITHIN_BOUND"

    def lines(self) -> list[str]:
        w = "none" if self.witness is None else f"k={self.witness[0]} l={self.witness[1]} a={self.witness[2] or '1'}"
        return [f"g: {self.g}", f"h: {self.h}", f"k_max: {self.k_max}", f"conjugator_radius: {self.conj_radius}",
                f"verdict: {self.verdict}", f"witness: {w}", f"certificate: {self.certificate.value}"]


def _signed(n: int) -> list[int]:
    return [s for k in range(1, n + 1) for s in (k, -k)]


def probe_commensurable(o: GroupOracle, g: str, h: str, k_max: int = 4, conj_radius: int = 2,
                        ball: Ball | None = None) -> CommensurabilityReport:
    """Search g^k = a h^l a^-1 with 0 < |k|, |l| <= k_max and |a| <= conj_radius.

    Witnesses are ordered by |k|, then sign, then |l|, then the conjugator in shortlex order.
    """
    o.check_word(g)
    o.check_word(h)
    b = ball if ball is not None and ball.radius >= conj_radius else Ball(o, conj_radius, permissive=True)
    cert = weakest(o.certificate, b.certificate)
    conjugators = [w for w, d in zip(b.words, b.dist) if d <= conj_radius]
    for k in _signed(k_max):
        gk = power(g, k) if k > 0 else power(inverse(g), -k)
        for l in _signed(k_max):
            hl = power(h, l) if l > 0 else power(inverse(h), -l)
            for a in conjugators:
                v = o.is_trivial(gk + a + inverse(hl) + inverse(a))
                if v is Verdict.TRIVIAL:
                    return CommensurabilityReport(g, h, k_max, conj_radius, (k, l, a), cert)
                if v is Verdict.UNKNOWN:
                    cert = Certificate.BEST_EFFORT
    return CommensurabilityReport(g, h, k_max, conj_radius, None, cert)


# ---------------------------------------------------------------------------
# plan types


class StepKind(enum.Enum):
    BASE = "BASE"
    AMALGAM = "AMALGAM"
    SC_QUOTIENT = "SC_QUOTIENT"
    OSIN_QUOTIENT = "OSIN_QUOTIENT"


@dataclass(frozen=True)
class RankOneSpec:
    multipliers: tuple[int, ...]
    torsion_cosets: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "multipliers", tuple(int(m) for m in self.multipliers))
        if not self.multipliers:
            raise ValueError("need at least one multiplier")
        if any(m < 2 for m in self.multipliers):
            raise ValueError("multipliers must be >= 2")
        if self.torsion_cosets is not None:
            t = tuple(int(n) for n in self.torsion_cosets)
            if any(a > b for a, b in zip(t, t[1:])) or any(n < 0 for n in t):
                raise ValueError("torsion coset counts must be non-negative and non-decreasing")
            object.__setattr__(self, "torsion_cosets", t)

    def multiplier(self, stage: int) -> int:
        """Multiplier used at a stage; the last entry repeats past the given prefix."""
        return self.multipliers[min(stage, len(self.multipliers) - 1)]


@dataclass
class ChainStep:
    index: int
    kind: StepKind
    presentation: Presentation
    new_generators: tuple[str, ...] = ()
    new_relators: tuple[str, ...] = ()
    params: dict[str, str] = field(default_factory=dict)
    audit: dict[str, str] = field(default_factory=dict)
    assumptions: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    certificate: Certificate = Certificate.CERTIFIED

    def comments(self) -> list[str]:
        out = [f"step: {self.index}", f"kind: {self.kind.value}"]
        out += [f"new_generators: {' '.join(self.new_generators) or 'none'}",
                f"new_relators: {len(self.new_relators)}"]
        return out


@dataclass
class ChainPlan:
    name: str
    steps: list[ChainStep]
    ledger: list[tuple[str, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def record(self, key: str, value) -> None:
        self.ledger.append((key, str(value)))

    def step_map(self, k: int) -> dict[str, str]:
        """Images of the generators of step k-1 in step k (always the same letter)."""
        prev = self.steps[k - 1].presentation
        return {g: g for g in prev.generators}

    def check_generator_images(self) -> bool:
        """Every step map sends generators onto generators and relators only grow."""
        for k in range(1, len(self.steps)):
            prev, cur = self.steps[k - 1].presentation, self.steps[k].presentation
            if not set(prev.generators) <= set(cur.generators):
                return False
            extra = set(cur.generators) - set(prev.generators)
            if extra != set(self.steps[k].new_generators):
                return False
            if not set(prev.relators) <= set(cur.relators):
                return False
        return True

    def ledger_lines(self) -> list[str]:
        out = [f"plan: {self.name}", f"steps: {len(self.steps)}"]
        out += [f"{k}: {v}" for k, v in self.ledger]
        for s in self.steps:
            p = f"step_{s.index}"
            out.append(f"{p}.kind: {s.kind.value}")
            out.append(f"{p}.generators: {' '.join(s.presentation.generators)}")
            out.append(f"{p}.relator_count: {len(s.presentation.relators)}")
            out.append(f"{p}.new_generators: {' '.join(s.new_generators) or 'none'}")
            for i, r in enumerate(s.new_relators, 1):
                out.append(f"{p}.new_relator_{i}: {r}")
            out += [f"{p}.{k}: {v}" for k, v in s.params.items()]
            out += [f"{p}.audit.{k}: {v}" for k, v in s.audit.items()]
            out += [f"{p}.assumed: {a}" for a in s.assumptions]
            out += [f"{p}.note: {n}" for n in s.notes]
            out.append(f"{p}.certificate: {s.certificate.value}")
        return out

    def audit_rows(self) -> list[dict[str, str]]:
        rows = []
        for s in self.steps:
            rows.append({
                "step": str(s.index),
                "kind": s.kind.value,
                "new_generators": str(len(s.new_generators)),
                "new_relators": str(len(s.new_relators)),
                "max_piece": s.audit.get("max_piece", ""),
                "classical_mu": s.audit.get("classical", ""),
                "injectivity_radius": s.audit.get("injectivity_radius", ""),
                "certificate": s.certificate.value,
            })
        return rows

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for s in self.steps:
            (out / f"step_{s.index}.pres").write_text(format_presentation(s.presentation, s.comments()))
        (out / "ledger.txt").write_text("\n".join(self.ledger_lines()) + "\n")
        (out / "audit.csv").write_text(rows_to_csv(self.audit_rows()))


def rows_to_csv(rows: Sequence[Mapping[str, str]]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


_STEP_FILE = re.compile(r"step_(\d+)\.pres$")
_KIND_LINE = re.compile(r"^#\s*kind:\s*(\w+)", re.M)


def read_plan(plan_dir) -> ChainPlan:
    """Load the presentations of a plan directory (ledger and audits are not reloaded)."""
    files = sorted((int(m.group(1)), p) for p in Path(plan_dir).iterdir() if (m := _STEP_FILE.search(p.name)))
    if not files:
        raise ValueError(f"no step_k.pres files in {plan_dir}")
    if [k for k, _ in files] != list(range(len(files))):
        raise ValueError("step files must be numbered 0..n-1 without gaps")
    steps = []
    prev: Presentation | None = None
    for k, path in files:
        text = path.read_text()
        p = parse_presentation(text)
        m = _KIND_LINE.search(text)
        kind = StepKind(m.group(1)) if m else (StepKind.BASE if k == 0 else StepKind.SC_QUOTIENT)
        new_g = tuple(g for g in p.generators if prev is None or g not in prev.generators) if prev else ()
        new_r = tuple(r for r in p.relators if prev is None or r not in prev.relators) if prev else ()
        steps.append(ChainStep(k, kind, p, new_g, new_r))
        prev = p
    return ChainPlan(Path(plan_dir).name, steps)


def chain_from_presentations(presentations: Sequence[Presentation], name: str = "custom") -> ChainPlan:
    steps = []
    for k, p in enumerate(presentations):
        if k == 0:
            steps.append(ChainStep(0, StepKind.BASE, p))
            continue
        prev = presentations[k - 1]
        new_g = tuple(g for g in p.generators if g not in prev.generators)
        new_r = tuple(r for r in p.relators if r not in prev.relators)
        kind = StepKind.AMALGAM if new_g else StepKind.SC_QUOTIENT
        steps.append(ChainStep(k, kind, p, new_g, new_r))
    return ChainPlan(name, steps)


# ---------------------------------------------------------------------------
# per-step audit used while generating plans


@dataclass(frozen=True)
class ChainParams:
    m1: int = 3
    seed: int = 0
    w_length: int = 8
    mu: Fraction = Fraction(1, 6)
    audit_radius: int = 2
    closure_radius: int = 3
    probe_n_max: int = 6
    probe_k_max: int = 3
    conj_radius: int = 1
    U: str | None = None
    V: str | None = None
    c_words: tuple[str, str] | None = None
    candidate_length: int = 3

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", exact(self.mu))
        if self.m1 < 2:
            raise ValueError("m1 must be >= 2")
        if self.w_length < 1:
            raise ValueError("w_length must be >= 1")


def _oracle(p: Presentation, params: ChainParams) -> GroupOracle:
    return auto_oracle(p, max(params.closure_radius, params.audit_radius + 1))


def _audit_step(prev: ChainStep, step: ChainStep, params: ChainParams) -> None:
    if step.new_relators:
        rep = check_classical(symmetrize(step.new_relators), params.mu)
        step.audit["max_piece"] = str(rep.max_piece)
        step.audit["classical"] = f"C'({params.mu}) {'PASS' if rep.passed else 'FAIL'}"
    try:
        dom = _oracle(prev.presentation, params)
        cod = _oracle(step.presentation, params)
        ball = Ball(dom, params.audit_radius, permissive=True)
        h = Homomorphism({g: g for g in prev.presentation.generators}, cod)
        r = injectivity_radius(h, ball, cod)
    except InfeasibleError as e:
        step.audit["injectivity_radius"] = "INFEASIBLE"
        step.notes.append(f"injectivity audit skipped: {e}")
        step.certificate = Certificate.BEST_EFFORT
        return
    step.audit["injectivity_radius"] = str(r)
    step.audit["injectivity_backends"] = f"{dom.backend.value}->{cod.backend.value}"
    if r.witness:
        step.audit["injectivity_witness"] = f"{r.witness[0] or '1'} = {r.witness[1] or '1'}"
    step.certificate = weakest(step.certificate, r.certificate)


def _fresh_letters(taken: Iterable[str], count: int, prefer: Sequence[str] = ()) -> list[str]:
    used = set(taken)
    out = []
    for x in list(prefer) + [chr(c) for c in range(ord("a"), ord("z") + 1)]:
        if len(out) == count:
            break
        if x not in used:
            out.append(x)
            used.add(x)
    if len(out) < count:
        raise ValueError("ran out of single-letter generator names")
    return out


def _rename(w: str, table: Mapping[str, str]) -> str:
    return "".join(table[x] if x.islower() else table[x.lower()].upper() for x in w)


def random_reduced_word(rng: random.Random, letters: Sequence[str], length: int) -> str:
    out: list[str] = []
    while len(out) < length:
        x = rng.choice(letters)
        if out and out[-1] == x.swapcase():
            continue
        out.append(x)
    return "".join(out)


# ---------------------------------------------------------------------------
# Rips-type chain


def build_rips_chain(Q: Presentation, H: Presentation, steps: int, params: ChainParams = ChainParams(),
                     w_source: Mapping[str, str] | None = None, audit: bool = True) -> ChainPlan:
    """G_0 = H * F(Q generators); conjugation quotient; one word-system relator per relator of Q.

    ``w_source`` maps each conjugation word t (e.g. ``"Gag"``) to a word over
    H; missing entries are drawn pseudorandomly from ``params.seed``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    lengths = [len(r) for r in Q.relators]
    if lengths != sorted(lengths):
        raise ValueError("relators of Q must be listed in non-decreasing length")
    plan = ChainPlan("rips", [])
    q_new = _fresh_letters(H.generators, len(Q.generators),
                           prefer=[g for g in Q.generators if g not in H.generators])
    ren = dict(zip(Q.generators, q_new))
    plan.record("H_generators", " ".join(H.generators))
    plan.record("Q_generators", " ".join(Q.generators))
    plan.record("Q_renaming", ", ".join(f"{a}->{b}" for a, b in ren.items()))
    plan.record("m1", params.m1)
    plan.record("seed", params.seed)
    plan.record("mu", params.mu)
    q_rel = [_rename(r, ren) for r in Q.relators]

    g0 = Presentation(tuple(H.generators) + tuple(q_new), tuple(H.relators))
    plan.steps.append(ChainStep(0, StepKind.BASE, g0, notes=["free product of H with the free group on Q's generators"]))
    if steps == 1:
        return plan

    # conjugation relators t * w_t, t in {g^-1 x g, g x g^-1}
    rng = random.Random(params.seed)
    h_letters = OrderedAlphabet(H.generators).letters
    conj_words = []
    for g in q_new:
        for x in H.generators:
            conj_words += [g.upper() + x + g, g + x + g.upper()]
    relators = []
    unverified = False
    w_used = {}
    for t in conj_words:
        if w_source is not None and t in w_source:
            w = free_reduce(w_source[t])
        else:
            w = random_reduced_word(rng, h_letters, params.w_length)
            unverified = True
        w_used[t] = w
        relators.append(free_reduce(t + w))
    g1 = Presentation.from_words(g0.generators, list(g0.relators) + relators)
    added = tuple(r for r in g1.relators if r not in g0.relators)
    step1 = ChainStep(1, StepKind.OSIN_QUOTIENT, g1, (), added,
                      params={"conjugation_words": str(len(conj_words)), "w_length": str(params.w_length)})
    for t, w in w_used.items():
        step1.params[f"w[{t}]"] = w
    step1.assumptions.append("image of H in the quotient is suitable (existence only; words not verified)")
    if unverified:
        step1.assumptions.append("w_t drawn pseudorandomly: UNVERIFIED")
        step1.certificate = Certificate.BEST_EFFORT
    plan.steps.append(step1)
    if audit:
        _audit_step(plan.steps[0], step1, params)

    if not q_rel:
        plan.record("note", "Q has no relators: word-system stage empty; skeleton is (quotient of H) by Z")
        return plan
    count = min(steps - 2, len(q_rel))
    if count <= 0:
        return plan
    U = params.U or H.generators[0]
    V = params.V or (H.generators[1] if len(H.generators) > 1 else H.generators[0].upper())
    sched = build_schedule(params.m1, count)
    ws = build_word_system(q_rel[:count], U, V, sched)
    plan.record("U", U)
    plan.record("V", V)
    plan.record("U_V_choice", "ASSUMED non-commensurable elements of the image of H with trivially meeting elementary closures")
    prev = step1
    for i in range(1, count + 1):
        r = ws.relators[i - 1]
        p = Presentation.from_words(prev.presentation.generators, list(prev.presentation.relators) + [r])
        st = ChainStep(i + 1, StepKind.SC_QUOTIENT, p, (), tuple(x for x in p.relators if x not in prev.presentation.relators),
                       params={"z": q_rel[i - 1], "exponents": ",".join(map(str, sched.row(i))),
                               "relator_length": str(len(r))})
        st.notes += list(w for w in ws.warnings if w.startswith(f"R{i}:"))
        st.assumptions.append("system satisfies the generalized small-cancellation condition at the chosen parameters")
        plan.steps.append(st)
        if audit:
            _audit_step(prev, st, params)
        prev = st
    return plan


# ---------------------------------------------------------------------------
# monster-type chain


@dataclass
class StageSelection:
    index: int
    u: str
    v: str
    probe: ElementaryProbeReport


def select_index(o: GroupOracle, pairs: Sequence[tuple[str, str]], start: int, n_max: int) -> StageSelection:
    """Smallest j >= start whose pair (u_j, v_j) shows no membership v_j in E(u_j) up to n_max."""
    for j in range(start, len(pairs) + 1):
        u, v = pairs[j - 1]
        rep = probe_elementary(o, u, v, n_max)
        if rep.verdict is Membership.NOT_WITHIN_BOUND:
            return StageSelection(j, u, v, rep)
    raise InfeasibleError(f"no admissible pair index in [{start}, {len(pairs)}] within probe bound {n_max}")


def _non_commensurable_pair(o: GroupOracle, avoid: Sequence[str], params: ChainParams,
                            letters: Sequence[str]) -> tuple[tuple[str, str], list[str]]:
    """Two words outside E(u) for every u in ``avoid`` and not commensurable with each other (bounded)."""
    evidence = []
    cands = _candidates(letters, params.candidate_length)
    chosen: list[str] = []
    for w in cands:
        if any(probe_elementary(o, u, w, params.probe_n_max).verdict is not Membership.NOT_WITHIN_BOUND
               for u in avoid):
            continue
        if any(probe_commensurable(o, w, c, params.probe_k_max, params.conj_radius).witness for c in chosen):
            continue
        chosen.append(w)
        if len(chosen) == 2:
            evidence.append(f"c, c' = {chosen[0]}, {chosen[1]}: no membership within n<={params.probe_n_max}, "
                            f"no commensurability within k<={params.probe_k_max}, |a|<={params.conj_radius}")
            return (chosen[0], chosen[1]), evidence
    raise InfeasibleError("bounded search found no pair c, c'")


def _candidates(letters: Sequence[str], max_len: int) -> list[str]:
    from .words import reduced_words_up_to

    return [w for w in reduced_words_up_to(OrderedAlphabet(tuple(x for x in letters if x.islower())), max_len)
            if len(w) >= 2 and w[0] != w[-1].swapcase()]


def build_monster_chain(G0: Presentation, family: Sequence[RankOneSpec], steps: int,
                        params: ChainParams = ChainParams(), audit: bool = True) -> ChainPlan:
    """Stages of amalgams with cyclic groups followed by two word-system quotients.

    Stage i: pick j_i, amalgamate u_k = (g_k)^m for k <= j_i, then add the
    systems R(Y_i, c_i, c_i') and R(Z_i, u_{j_i}, v_{j_i}).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not family:
        raise ValueError("family must contain at least one rank-one specification")
    plan = ChainPlan("monster", [])
    plan.record("G0_generators", " ".join(G0.generators))
    plan.record("family", "; ".join(",".join(map(str, f.multipliers)) for f in family))
    plan.record("multiplier_reading", "family k supplies the multiplier of g^k at stage i from its i-th entry")
    plan.record("pair_order", "Cantor diagonal over shortlex-enumerated non-empty reduced words, u != v")
    plan.record("m1", params.m1)
    plan.steps.append(ChainStep(0, StepKind.BASE, G0))
    x_letters = OrderedAlphabet(G0.generators).letters
    pair_count = max(steps + 4, 8)
    pairs = enumerate_pairs(OrderedAlphabet(G0.generators), pair_count, distinct=True)
    current = G0
    amalgamated: dict[int, str] = {}
    for stage in range(steps):
        base_oracle = _oracle(current, params)
        sel = select_index(base_oracle, pairs, stage + 1, params.probe_n_max)
        plan.record(f"stage_{stage}.j", sel.index)
        plan.record(f"stage_{stage}.pair", f"u={sel.u} v={sel.v}")
        plan.record(f"stage_{stage}.ASSUMED", f"v not in E(u): probe {sel.probe.verdict.value} for n<={sel.probe.n_max}")

        # amalgams: u_k = (g^k)^m for every k <= j_i
        ys = []
        for k in range(1, sel.index + 1):
            fam = family[(k - 1) % len(family)]
            m = fam.multiplier(stage)
            prev_step = plan.steps[-1]
            letter = _fresh_letters(current.generators, 1)[0]
            u_k = pairs[k - 1][0]
            # a root from an earlier stage becomes a power of the new root
            target = amalgamated.get(k, u_k)
            rel = free_reduce(target + power(letter.upper(), m))
            p = Presentation.from_words(current.generators + (letter,), list(current.relators) + [rel])
            st = ChainStep(len(plan.steps), StepKind.AMALGAM, p, (letter,),
                           tuple(r for r in p.relators if r not in current.relators),
                           params={"stage": str(stage), "k": str(k), "u_k": u_k, "multiplier": str(m),
                                   "amalgamated_word": target})
            st.assumptions.append("amalgamated element generates a maximal elementary subgroup (ASSUMED)")
            plan.steps.append(st)
            if audit:
                _audit_step(prev_step, st, params)
            amalgamated[k] = letter
            ys.append(letter)
            current = p

        # quotient by R(Y_i, c_i, c_i') and R(Z_i, u_j, v_j)
        q_oracle = base_oracle
        if params.c_words is not None:
            (c1, c2), evidence = params.c_words, ["c, c' designated by the user"]
        else:
            avoid = [pairs[k - 1][0] for k in range(1, sel.index + 1)] + [sel.v]
            (c1, c2), evidence = _non_commensurable_pair(q_oracle, avoid, params, x_letters)
        z_set = []
        for x in G0.generators:
            rep = probe_elementary(q_oracle, sel.u, x, params.probe_n_max)
            if rep.verdict is Membership.NOT_WITHIN_BOUND:
                z_set.append(x)
        if not z_set:
            raise InfeasibleError(f"stage {stage}: every generator appears to lie in E(u)")
        sched_y = build_schedule(params.m1, len(ys))
        ws_y = build_word_system(ys, c1, c2, sched_y)
        sched_z = build_schedule(params.m1 * 2 ** len(ys), len(z_set))
        ws_z = build_word_system(z_set, sel.u, sel.v, sched_z)
        prev_step = plan.steps[-1]
        rels = list(ws_y.relators) + list(ws_z.relators)
        p = Presentation.from_words(current.generators, list(current.relators) + rels)
        st = ChainStep(len(plan.steps), StepKind.SC_QUOTIENT, p, (),
                       tuple(r for r in p.relators if r not in current.relators),
                       params={"stage": str(stage), "Y": " ".join(ys), "c": c1, "c_prime": c2,
                               "Y_seed": str(sched_y.m_seed), "Z": " ".join(z_set),
                               "Z_seed": str(sched_z.m_seed), "U": sel.u, "V": sel.v,
                               "Y_block_relators": str(len(ws_y.relators)),
                               "Z_block_relators": str(len(ws_z.relators))})
        st.assumptions += evidence
        st.assumptions.append("Z_i membership decided by bounded probes (ASSUMED outside E(u))")
        st.notes += list(ws_y.warnings) + list(ws_z.warnings)
        plan.steps.append(st)
        if audit:
            _audit_step(prev_step, st, params)
        current = p
    return plan


def monster_blocks(plan: ChainPlan) -> list[tuple[list[int], list[int]]]:
    """Exponent rows of the two word-system blocks of each quotient step."""
    out = []
    for s in plan.steps:
        if s.kind is StepKind.SC_QUOTIENT and "Y_seed" in s.params:
            ny = len(s.params["Y"].split())
            nz = len(s.params["Z"].split())
            ys = build_schedule(int(s.params["Y_seed"]), ny)
            zs = build_schedule(int(s.params["Z_seed"]), nz)
            out.append(([m for row in ys.rows for m in row], [m for row in zs.rows for m in row]))
    return out


# ---------------------------------------------------------------------------
# audits


@dataclass
class AuditRow:
    step: int
    kind: str
    radius: int
    injectivity: str
    injectivity_certificate: str
    f_tmax: str
    ratio: str
    profile_certificate: str
    gap: str = ""

    def as_dict(self) -> dict[str, str]:
        return {k: str(v) for k, v in self.__dict__.items()}


def audit_chain(plan: ChainPlan, radii: Sequence[int], t_max: int, profile_radius: int | None = None,
                closure_radius: int = 3) -> list[AuditRow]:
    """Per step: injectivity-radius lower bounds, quotient profile value f(t_max), and their ratio.

    A finite-scale proxy for the requirement that hyperbolicity constants be
    small relative to injectivity radii; it is evidence, not a certificate.
    """
    prof_r = profile_radius if profile_radius is not None else max(1, (t_max + 1) // 2)
    rows: list[AuditRow] = []
    oracles: dict[int, GroupOracle] = {}

    def oracle(k: int) -> GroupOracle:
        if k not in oracles:
            oracles[k] = auto_oracle(plan.steps[k].presentation, max(closure_radius, max(radii) + 1))
        return oracles[k]

    for k in range(1, len(plan.steps)):
        step = plan.steps[k]
        f_val, f_cert, gap = None, "", ""
        try:
            prof = hyperbolicity_function(Ball(oracle(k), prof_r, permissive=True), t_max)
            f_val, f_cert = prof.f(t_max), prof.certificate.value
        except InfeasibleError as e:
            gap = f"profile: {e}"
        for r in radii:
            inj: InjectivityRadius | None = None
            g = gap
            try:
                dom = Ball(oracle(k - 1), r, permissive=True)
                h = Homomorphism(plan.step_map(k), oracle(k))
                inj = injectivity_radius(h, dom, oracle(k))
            except InfeasibleError as e:
                g = (g + "; " if g else "") + f"injectivity: {e}"
            ratio = ""
            if inj is not None and f_val is not None:
                ratio = "0" if f_val == 0 else ("inf" if inj.value == 0 else str(Fraction(f_val, inj.value)))
            rows.append(AuditRow(
                step=k, kind=step.kind.value, radius=r,
                injectivity="" if inj is None else str(inj),
                injectivity_certificate="" if inj is None else inj.certificate.value,
                f_tmax="" if f_val is None else str(f_val),
                ratio=ratio, profile_certificate=f_cert, gap=g,
            ))
    return rows


def audit_csv(rows: Sequence[AuditRow]) -> str:
    if not rows:
        return "step,kind,radius,injectivity,injectivity_certificate,f_tmax,ratio,profile_certificate,gap\n"
    return rows_to_csv([r.as_dict() for r in rows])
