"""Small-cancellation word systems R_i = z_i U^m V U^m' V ... V U^m''.

Row i of an exponent schedule starts at ``2**(i-1) * m_seed`` and has
``2**(i-1) * m_seed - 1`` consecutive exponents, so rows occupy disjoint
ranges and no exponent repeats anywhere in the system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cayley import Ball
from .oracles import GroupOracle
from .smallcancel import PieceReport, ScParams, check_generalized, exact
from .words import free_reduce, is_reduced, power, symmetrize


@dataclass(frozen=True)
class ExponentSchedule:
    m_seed: int
    k: int

    def __post_init__(self) -> None:
        if self.m_seed < 2:
            raise ValueError("m_seed must be >= 2")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        flat = [m for row in self.rows for m in row]
        if len(flat) != len(set(flat)):
            raise AssertionError("exponent schedule repeats an exponent")

    def first(self, i: int) -> int:
        return 2 ** (i - 1) * self.m_seed

    def length(self, i: int) -> int:
        """Number of U-blocks in row i (j_i)."""
        return self.first(i) - 1

    def row(self, i: int) -> tuple[int, ...]:
        if not 1 <= i <= self.k:
            raise IndexError(i)
        m = self.first(i)
        return tuple(range(m, m + self.length(i)))

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.row(i) for i in range(1, self.k + 1))

    @property
    def min_exponent(self) -> int:
        return self.m_seed

    def max_exponent(self, i: int) -> int:
        return self.row(i)[-1]


def build_schedule(m_seed: int, k: int) -> ExponentSchedule:
    return ExponentSchedule(int(m_seed), int(k))


def assemble_relator(z: str, U: str, V: str, exponents: Sequence[int]) -> str:
    """Template instantiation before free reduction."""
    return z + V.join(power(U, m) for m in exponents)


@dataclass(frozen=True)
class WordSystem:
    Z: tuple[str, ...]
    U: str
    V: str
    schedule: ExponentSchedule
    relators: tuple[str, ...]
    warnings: tuple[str, ...] = ()

    @property
    def L(self) -> int:
        return max(len(self.U), len(self.V), *(len(z) for z in self.Z))

    @property
    def symmetrized(self) -> frozenset[str]:
        return symmetrize(self.relators)

    def expected_length(self, i: int) -> int:
        row = self.schedule.row(i)
        return len(self.Z[i - 1]) + len(self.U) * sum(row) + len(self.V) * (len(row) - 1)

    def lines(self) -> list[str]:
        out = [f"m_seed: {self.schedule.m_seed}", f"k: {self.schedule.k}",
               f"U: {self.U}", f"V: {self.V}", f"L: {self.L}"]
        for i, r in enumerate(self.relators, 1):
            out.append(f"R{i}_exponents: {','.join(map(str, self.schedule.row(i)))}")
            out.append(f"R{i}_length: {len(r)}")
        out += [f"warning: {w}" for w in self.warnings]
        return out


def build_word_system(Z: Sequence[str], U: str, V: str, schedule: ExponentSchedule) -> WordSystem:
    Z = tuple(Z)
    if not U or not V:
        raise ValueError("U and V must be non-empty")
    for w in (U, V, *Z):
        if not w or not is_reduced(w):
            raise ValueError(f"word {w!r} must be non-empty and freely reduced")
    if len(Z) != schedule.k:
        raise ValueError(f"need {schedule.k} words z_i, got {len(Z)}")
    relators = []
    warnings = []
    for i, z in enumerate(Z, 1):
        raw = assemble_relator(z, U, V, schedule.row(i))
        red = free_reduce(raw)
        if len(red) != len(raw):
            warnings.append(f"R{i}: free reduction cancelled {len(raw) - len(red)} letters at junctions")
        if red and red[0] == red[-1].swapcase():
            warnings.append(f"R{i}: relator is not cyclically reduced")
        relators.append(red)
    return WordSystem(Z, U, V, schedule, tuple(relators), tuple(warnings))


# ---------------------------------------------------------------------------
# parameter conditions


def epsilon_prime(eps, c, R_stability, delta) -> Fraction:
    """eps + 2|c| + 5(2 R + 182 delta + |c|/2), with c the scalar quasi-geodesic constant."""
    c = abs(exact(c))
    return exact(eps) + 2 * c + 5 * (2 * exact(R_stability) + 182 * exact(delta) + c / 2)


@dataclass
class ConditionRow:
    relator: int
    clause: str
    lhs: Fraction | None
    rhs: Fraction | None
    status: str

    def line(self) -> str:
        if self.status == "INDETERMINATE":
            return f"R{self.relator}_{self.clause}: INDETERMINATE"
        return f"R{self.relator}_{self.clause}: {self.status} ({self.lhs}, {self.rhs})"


@dataclass
class ConditionReport:
    rows: list[ConditionRow]
    eps_prime: Fraction | None
    notes: list[str] = field(default_factory=list)

    @property
    def status(self) -> str:
        st = {r.status for r in self.rows}
        if "FAIL" in st:
            return "FAIL"
        return "INDETERMINATE" if "INDETERMINATE" in st else "PASS"

    def row(self, i: int, clause: str) -> ConditionRow:
        return next(r for r in self.rows if r.relator == i and r.clause == clause)

    def lines(self) -> list[str]:
        out = [f"result: {self.status}",
               f"eps_prime: {'INDETERMINATE' if self.eps_prime is None else self.eps_prime}"]
        out += [r.line() for r in self.rows]
        out += [f"note: {n}" for n in self.notes]
        return out


def _ge(lhs, rhs) -> str:
    return "PASS" if lhs >= rhs else "FAIL"


def validate_conditions(ws: WordSystem, p: ScParams, delta=None, R_stability=None) -> ConditionReport:
    """Four inequalities per relator, each shown as (lhs, rhs) with lhs >= rhs required.

    clause1: |R_i| >= rho
    clause2: min exponent >= Ktilde
    clause3: mu * rho >= 6 L (max_i + 1)
    clause4: min exponent >= (2 eps' / |U|) * 12 lambda
    """
    delta = p.delta if delta is None else delta
    R_stability = p.Rstab if R_stability is None else R_stability
    eps_p = None
    if delta is not None and R_stability is not None:
        eps_p = epsilon_prime(p.eps, p.c, R_stability, delta)
    m_low = Fraction(ws.schedule.min_exponent)
    rows: list[ConditionRow] = []
    for i, r in enumerate(ws.relators, 1):
        n = Fraction(len(r))
        rows.append(ConditionRow(i, "clause1", n, p.rho, _ge(n, p.rho)))
        if p.Ktilde is None:
            rows.append(ConditionRow(i, "clause2", m_low, None, "INDETERMINATE"))
        else:
            rows.append(ConditionRow(i, "clause2", m_low, p.Ktilde, _ge(m_low, p.Ktilde)))
        lhs = p.mu * p.rho
        rhs = Fraction(6 * ws.L * (ws.schedule.max_exponent(i) + 1))
        rows.append(ConditionRow(i, "clause3", lhs, rhs, _ge(lhs, rhs)))
        if eps_p is None:
            rows.append(ConditionRow(i, "clause4", m_low, None, "INDETERMINATE"))
        else:
            rhs = 2 * eps_p / len(ws.U) * 12 * p.lam
            rows.append(ConditionRow(i, "clause4", m_low, rhs, _ge(m_low, rhs)))
    notes = []
    if p.Ktilde is None:
        notes.append("Ktilde not supplied; clause2 left undecided")
    if eps_p is None:
        notes.append("delta or Rstab not supplied; clause4 left undecided")
    return ConditionReport(rows, eps_p, notes)


def system_piece_audit(ws: WordSystem, o: GroupOracle, eps=0, mu=Fraction(1, 6), rho=1, lam=1, c=0,
                       ball: Ball | None = None, prime: bool = False) -> PieceReport:
    p = ScParams(lam=lam, c=c, eps=eps, mu=mu, rho=rho)
    return check_generalized(o, ws.symmetrized, p, ball, prime)
