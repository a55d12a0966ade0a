"""Small-cancellation checks: classical pieces, pieces up to short connectors,
quasi-geodesic words, and the parameter guards used by the quotient chains."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable

from .cayley import Ball, build_ball
from .errors import GuardViolation
from .oracles import Certificate, GroupOracle, Presentation, Verdict, weakest
from .words import free_reduce, inverse, is_symmetric


def exact(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float literal."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class ScParams:
    lam: Fraction = Fraction(1)
    c: Fraction = Fraction(0)
    eps: int = 0
    mu: Fraction = Fraction(1, 6)
    rho: Fraction = Fraction(1)
    Ktilde: Fraction | None = None
    delta: Fraction | None = None
    Rstab: Fraction | None = None

    def __post_init__(self) -> None:
        for name in ("lam", "c", "mu", "rho"):
            object.__setattr__(self, name, exact(getattr(self, name)))
        for name in ("Ktilde", "delta", "Rstab"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, exact(v))
        if self.lam < 1:
            raise ValueError("lambda must be >= 1")
        if self.c < 0:
            raise ValueError("c must be >= 0")
        if int(self.eps) != self.eps or self.eps < 0:
            raise ValueError("eps must be a non-negative integer")
        object.__setattr__(self, "eps", int(self.eps))
        if not 0 < self.mu < 1:
            raise ValueError("mu must lie in (0, 1)")
        if self.rho <= 0:
            raise ValueError("rho must be positive")

    def large_rho_regime(self) -> bool:
        """rho > 10**6 * eps / mu, the regime required for the quotient to stay hyperbolic."""
        return self.rho > Fraction(10**6) * self.eps / self.mu


# ---------------------------------------------------------------------------
# classical pieces


def _lcp(u: str, v: str) -> int:
    n = min(len(u), len(v))
    i = 0
    while i < n and u[i] == v[i]:
        i += 1
    return i


@dataclass
class PieceReport:
    passed: bool
    max_piece: int
    # (R, R') -> longest piece found for that ordered pair
    pieces: dict[tuple[str, str], int] = field(default_factory=dict)
    per_relator: dict[str, int] = field(default_factory=dict)
    witnesses: list[tuple] = field(default_factory=list)
    clauses: dict[str, str] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)
    certificate: Certificate = Certificate.CERTIFIED

    def lines(self) -> list[str]:
        out = [f"result: {'PASS' if self.passed else 'FAIL'}", f"max_piece: {self.max_piece}"]
        for k, v in self.clauses.items():
            out.append(f"{k}: {v}")
        for k, v in self.details.items():
            out.append(f"{k}: {v}")
        out.append(f"certificate: {self.certificate.value}")
        return out


def classical_pieces(R: Iterable[str]) -> dict[tuple[str, str], int]:
    groups: dict[str, list[str]] = {}
    for r in sorted(set(R)):
        groups.setdefault(r[:1], []).append(r)
    out: dict[tuple[str, str], int] = {}
    # words with different first letters share no piece
    for rs in groups.values():
        for r in rs:
            for s in rs:
                if r != s:
                    out[(r, s)] = _lcp(r, s)
    return out


def _neighbour_lcps(rs: list[str]) -> list[int]:
    """For sorted words, lcp of each with its sorted neighbours; the largest lcp of a
    word with any other word is attained by a neighbour."""
    adj = [_lcp(a, b) for a, b in zip(rs, rs[1:])]
    return [max(adj[i - 1] if i else 0, adj[i] if i < len(adj) else 0) for i in range(len(rs))]


def check_classical(R: Iterable[str], mu, pairs: bool = False) -> PieceReport:
    """C'(mu): every piece of R is strictly shorter than mu * |R|.

    ``pairs`` also fills ``pieces`` with every ordered pair sharing a piece,
    which is quadratic in the size of the symmetrized set.
    """
    rs = sorted(set(R))
    if not rs or not is_symmetric(rs):
        raise ValueError("relator set must be non-empty and symmetrized")
    mu = exact(mu)
    best = _neighbour_lcps(rs)
    per = dict(zip(rs, best))
    bad = [r for r in rs if not per[r] < mu * len(r)]
    mx = max(best)
    witnesses = []
    for a, b in zip(rs, rs[1:]):
        if mx and _lcp(a, b) == mx:
            witnesses += [(a, b, a[:mx]), (b, a, a[:mx])]
    rep = PieceReport(
        passed=not bad,
        max_piece=mx,
        pieces=classical_pieces(rs) if pairs else {},
        per_relator=per,
        witnesses=sorted(witnesses)[:8],
        clauses={"C'(mu)": "FAIL" if bad else "PASS"},
        details={"mu": str(mu), "relators": str(len(rs))},
    )
    if bad:
        r = bad[0]
        rep.details["violating_relator"] = f"{r} piece {per[r]} >= {mu * len(r)}"
    return rep


# ---------------------------------------------------------------------------
# quasi-geodesic words


@dataclass
class QuasiGeodesicReport:
    passed: bool
    witness: tuple[int, int, str] | None
    margin: Fraction | None
    certificate: Certificate = Certificate.CERTIFIED

    def lines(self) -> list[str]:
        w = "none" if self.witness is None else f"{self.witness[2] or '1'} [{self.witness[0]}:{self.witness[1]}]"
        return [f"quasigeodesic: {'PASS' if self.passed else 'FAIL'}", f"worst_subword: {w}",
                f"margin: {self.margin}"]


def quasigeodesic_check(o: GroupOracle | Ball, w: str, lam=1, c=0) -> QuasiGeodesicReport:
    """Check |w[s:t]|_G >= (t - s)/lam - c for every subword.

    The returned witness is the subword with the smallest slack.
    """
    lam, c = exact(lam), exact(c)
    if not isinstance(o, Ball) and o.word_length(w) is not None:
        return _quasigeodesic_by_length(o, w, lam, c)
    need = max(0, int(Fraction(len(w)) / lam - c) + 1)
    if isinstance(o, Ball):
        ball = o
        if ball.radius < min(need, len(w)):
            raise GuardViolation(f"ball radius {ball.radius} too small to certify word of length {len(w)}")
    else:
        ball = build_ball(o, min(need, len(w)))
    worst: tuple[Fraction, int, int] | None = None
    for s in range(len(w)):
        for t in range(s + 1, len(w) + 1):
            j = ball.locate(w[s:t])
            d = Fraction(ball.radius + 1) if j is None else Fraction(ball.dist[j])
            slack = d - (Fraction(t - s) / lam - c)
            if j is None and slack < 0:
                raise GuardViolation("subword distance exceeds the ball radius")
            if worst is None or (slack, -(t - s), s) < (worst[0], -(worst[2] - worst[1]), worst[1]):
                worst = (slack, s, t)
    if worst is None:
        return QuasiGeodesicReport(True, None, None, ball.certificate)
    slack, s, t = worst
    return QuasiGeodesicReport(slack >= 0, (s, t, w[s:t]), slack, ball.certificate)


def _quasigeodesic_by_length(o: GroupOracle, w: str, lam: Fraction, c: Fraction) -> QuasiGeodesicReport:
    worst: tuple[Fraction, int, int] | None = None
    for s in range(len(w)):
        for t in range(s + 1, len(w) + 1):
            slack = Fraction(o.word_length(w[s:t])) - (Fraction(t - s) / lam - c)
            if worst is None or (slack, -(t - s), s) < (worst[0], -(worst[2] - worst[1]), worst[1]):
                worst = (slack, s, t)
    if worst is None:
        return QuasiGeodesicReport(True, None, None, o.certificate)
    slack, s, t = worst
    return QuasiGeodesicReport(slack >= 0, (s, t, w[s:t]), slack, o.certificate)


# ---------------------------------------------------------------------------
# pieces up to connectors of length <= eps


@dataclass(frozen=True)
class EpsPiece:
    R: str
    R2: str
    U: str
    U2: str
    Y: str
    Z: str

    @property
    def length(self) -> int:
        return max(len(self.U), len(self.U2))


def _connector_ball(o: GroupOracle, eps: int, ball: Ball | None) -> Ball:
    if ball is not None and ball.oracle is o and ball.radius >= eps:
        return ball
    return build_ball(o, eps)


def _short(b: Ball, w: str, eps: int) -> str | None:
    """Canonical word of length <= eps equal to ``w`` in the group, if one exists."""
    j = b.locate(w)
    if j is None or b.dist[j] > eps:
        return None
    return b.words[j]


def replay_piece(o: GroupOracle, p: EpsPiece, eps: int, same_relator: bool = False) -> bool:
    """Re-verify the defining clauses of a recorded witness."""
    if len(p.Y) > eps or len(p.Z) > eps:
        return False
    if not (p.R.startswith(p.U) and p.U):
        return False
    if same_relator:
        body = p.R[len(p.U):]
        if p.U2 not in body:
            return False
        target = p.U if p.R2 == "+" else inverse(p.U)
        return o.is_trivial(p.U2 + inverse(p.Y + target + p.Z)) is Verdict.TRIVIAL
    if not p.R2.startswith(p.U2):
        return False
    if o.is_trivial(p.U2 + inverse(p.Y + p.U + p.Z)) is not Verdict.TRIVIAL:
        return False
    return o.is_trivial(p.Y + p.R + inverse(p.Y) + inverse(p.R2)) is Verdict.NONTRIVIAL


def find_epsilon_pieces(o: GroupOracle, R: Iterable[str], eps: int, ball: Ball | None = None) -> PieceReport:
    """Exhaustive search for pieces up to connectors Y, Z of length <= eps.

    A witness is (R, R', U, U', Y, Z) with U a non-empty prefix of R, U' a
    prefix of R', U' = Y U Z in the group and Y R Y^-1 != R'.  Y and Z are
    searched independently.
    """
    rs = sorted(set(R))
    if not rs or not is_symmetric(rs):
        raise ValueError("relator set must be non-empty and symmetrized")
    b = _connector_ball(o, eps, ball)
    cert = weakest(o.certificate, b.certificate)
    connectors = [w for w, d in zip(b.words, b.dist) if d <= eps]
    # distinct keys prove distinct elements only for certified oracles
    if o.has_keys and o.certificate is Certificate.CERTIFIED:
        best, keyed_cert = _keyed_pieces(o, rs, connectors)
        cert = weakest(cert, keyed_cert)
        return _piece_report(rs, best, eps, cert)
    best: dict[tuple[str, str], EpsPiece] = {}
    for r in rs:
        for r2 in rs:
            for y in connectors:
                v = o.is_trivial(y + r + inverse(y) + inverse(r2))
                if v is Verdict.UNKNOWN:
                    cert = Certificate.BEST_EFFORT
                    continue
                if v is Verdict.TRIVIAL:
                    continue
                yi = inverse(y)
                for i in range(1, len(r) + 1):
                    ui = inverse(r[:i]) + yi
                    for j in range(len(r2) + 1):
                        z = _short(b, ui + r2[:j], eps)
                        if z is None:
                            continue
                        _offer(best, EpsPiece(r, r2, r[:i], r2[:j], y, z))
    return _piece_report(rs, best, eps, cert)


def _offer(best: dict[tuple[str, str], EpsPiece], cand: EpsPiece) -> None:
    old = best.get((cand.R, cand.R2))
    if old is None or _rank(cand) > _rank(old):
        best[(cand.R, cand.R2)] = cand


def _rank(p: EpsPiece) -> tuple:
    # longest piece first, then shortest connectors; ties fall to the earliest found
    return (p.length, -len(p.Y) - len(p.Z), len(p.U), len(p.U2))


def _keyed_pieces(o: GroupOracle, rs: list[str], connectors: list[str]) -> tuple[dict, Certificate]:
    """Same search as the generic path, matching U' = Y U Z through element keys."""
    cert = Certificate.CERTIFIED
    prefix_index: dict[Hashable, list[tuple[str, int]]] = {}
    rel_key: dict[str, Hashable] = {}
    for r2 in rs:
        rel_key[r2] = o.key(r2)
        for j in range(len(r2) + 1):
            k = o.key(r2[:j])
            if k is None:
                cert = Certificate.BEST_EFFORT
                continue
            prefix_index.setdefault(k, []).append((r2, j))
    best: dict[tuple[str, str], EpsPiece] = {}
    for r in rs:
        for y in connectors:
            yi = inverse(y)
            conj = o.key(y + r + yi)
            if conj is None:
                cert = Certificate.BEST_EFFORT
                continue
            for i in range(1, len(r) + 1):
                u = r[:i]
                for z in connectors:
                    k = o.key(y + u + z)
                    if k is None:
                        cert = Certificate.BEST_EFFORT
                        continue
                    for r2, j in prefix_index.get(k, ()):
                        if rel_key[r2] is None:
                            cert = Certificate.BEST_EFFORT
                            continue
                        if rel_key[r2] == conj:
                            continue
                        _offer(best, EpsPiece(r, r2, u, r2[:j], y, z))
    return best, cert


def _piece_report(rs: list[str], best: dict[tuple[str, str], EpsPiece], eps: int, cert: Certificate) -> PieceReport:
    pieces = {k: p.length for k, p in best.items()}
    per: dict[str, int] = {r: 0 for r in rs}
    for (r, _), k in pieces.items():
        per[r] = max(per[r], k)
    mx = max(per.values())
    rep = PieceReport(passed=True, max_piece=mx, pieces=pieces, per_relator=per,
                      witnesses=[best[k] for k in sorted(best)], certificate=cert)
    rep.details = {"eps": str(eps), "relators": str(len(rs))}
    return rep


def find_same_relator_pieces(o: GroupOracle, R: Iterable[str], eps: int, ball: Ball | None = None,
                             min_length: int = 1) -> list[EpsPiece]:
    """Pieces inside one relator: R = U V U' V' with U' = Y U^{+-1} Z.

    ``R2`` of each witness holds the sign ("+" or "-").  Only pieces with
    max(|U|, |U'|) >= ``min_length`` are returned, longest per relator first.
    """
    rs = sorted(set(R))
    b = _connector_ball(o, eps, ball)
    connectors = [w for w, d in zip(b.words, b.dist) if d <= eps]
    out: list[EpsPiece] = []
    for r in rs:
        best: EpsPiece | None = None
        n = len(r)
        for i in range(1, n):
            u = r[:i]
            for sign, target in (("+", u), ("-", inverse(u))):
                ti = inverse(target)
                for y in connectors:
                    pre = ti + inverse(y)
                    for s in range(i, n + 1):
                        for e in range(s, n + 1):
                            if max(i, e - s) < min_length:
                                continue
                            if best is not None and max(i, e - s) <= best.length:
                                continue
                            z = _short(b, pre + r[s:e], eps)
                            if z is not None:
                                best = EpsPiece(r, sign, u, r[s:e], y, z)
        if best is not None:
            out.append(best)
    return out


def check_generalized(o: GroupOracle, R: Iterable[str], p: ScParams, ball: Ball | None = None,
                      prime: bool = False) -> PieceReport:
    """Evaluate C1 (quasi-geodesic words), C2 (length >= rho), C3 (pieces < mu|R|).

    With ``lam = 1`` and ``c = 0`` C1 is plain geodesicity.  ``prime`` adds
    the same-relator clause.
    """
    rs = sorted(set(R))
    if not rs or not is_symmetric(rs):
        raise ValueError("relator set must be non-empty and symmetrized")
    clauses: dict[str, str] = {}
    details: dict[str, str] = {}
    cert = o.certificate

    base = sorted({min(r[i:] + r[:i] for i in range(len(r))) for r in rs})
    c1_bad = None
    for r in base:
        q = quasigeodesic_check(o, r, p.lam, p.c)
        cert = weakest(cert, q.certificate)
        if not q.passed:
            c1_bad = (r, q)
            break
    clauses["C1"] = "PASS" if c1_bad is None else "FAIL"
    if c1_bad is not None:
        details["C1_witness"] = f"{c1_bad[0]} subword {c1_bad[1].witness[2] or '1'}"

    short = [r for r in base if len(r) < p.rho]
    clauses["C2"] = "PASS" if not short else "FAIL"
    if short:
        details["C2_witness"] = f"{short[0]} length {len(short[0])} < rho {p.rho}"

    pieces = find_epsilon_pieces(o, rs, p.eps, ball)
    cert = weakest(cert, pieces.certificate)
    c3_bad = [w for w in pieces.witnesses
              if not (len(w.U) < p.mu * len(w.R) and len(w.U2) < p.mu * len(w.R))]
    clauses["C3"] = "PASS" if not c3_bad else "FAIL"
    if c3_bad:
        w = max(c3_bad, key=lambda x: (x.length, x.R, x.R2))
        details["C3_witness"] = (f"R={w.R} R'={w.R2} U={w.U} U'={w.U2 or '1'} "
                                 f"Y={w.Y or '1'} Z={w.Z or '1'} bound={p.mu * len(w.R)}")
    mx = pieces.max_piece
    if prime:
        limit = min(math.ceil(p.mu * len(r)) for r in rs)
        same = find_same_relator_pieces(o, rs, p.eps, ball, min_length=max(1, limit))
        same_bad = [w for w in same if not (len(w.U) < p.mu * len(w.R) and len(w.U2) < p.mu * len(w.R))]
        clauses["C3prime"] = "PASS" if not same_bad else "FAIL"
        if same_bad:
            w = same_bad[0]
            details["C3prime_witness"] = (f"R={w.R} U={w.U} U'={w.U2} sign={w.R2} "
                                          f"Y={w.Y or '1'} Z={w.Z or '1'}")
    details.update({"lambda": str(p.lam), "c": str(p.c), "eps": str(p.eps),
                    "mu": str(p.mu), "rho": str(p.rho)})
    if not p.large_rho_regime():
        details["regime"] = "below rho > 1e6*eps/mu; checks are exact at these parameters only"
    return PieceReport(
        passed=all(v == "PASS" for v in clauses.values()),
        max_piece=mx,
        pieces=pieces.pieces,
        per_relator=pieces.per_relator,
        witnesses=pieces.witnesses,
        clauses=clauses,
        details=details,
        certificate=cert,
    )


# ---------------------------------------------------------------------------
# parameter guards


@dataclass
class GuardReport:
    passed: bool
    values: dict[str, str]

    def lines(self) -> list[str]:
        return [f"result: {'PASS' if self.passed else 'FAIL'}"] + [f"{k}: {v}" for k, v in self.values.items()]


def proper_power_guard(U: str | int, p: ScParams) -> GuardReport:
    """|U| < (mu*rho - c)/lam - eps together with 1 - 122*lam*mu > 0."""
    n = U if isinstance(U, int) else len(U)
    bound = (p.mu * p.rho - p.c) / p.lam - p.eps
    side = 1 - 122 * p.lam * p.mu
    length_ok = n < bound
    side_ok = side > 0
    return GuardReport(length_ok and side_ok, {
        "length": str(n),
        "length_bound": str(bound),
        "length_clause": "PASS" if length_ok else "FAIL",
        "side_value": str(side),
        "side_clause": "PASS" if side_ok else "FAIL",
    })


@dataclass
class QuotientDeltaReport:
    status: str
    bound: Fraction | None
    samples: list[tuple[int, int]]
    note: str = ""
    certificate: Certificate = Certificate.CERTIFIED

    @property
    def passed(self) -> bool:
        return self.status in ("PASS", "SKIPPED")

    def lines(self) -> list[str]:
        out = [f"result: {self.status}", f"bound: {self.bound}"]
        out += [f"f({t}): {f}" for t, f in self.samples]
        if self.note:
            out.append(f"note: {self.note}")
        out.append(f"certificate: {self.certificate.value}")
        return out


def quotient_delta_check(base: Presentation, R: Iterable[str], quotient_ball: Ball, t_max: int,
                         bound=None, mode: str = "exact", geodesic_cap: int = 10**6) -> QuotientDeltaReport:
    """Compare the quotient's hyperbolicity function with 4 * max|R| on sampled scales."""
    from .hyperbolicity import hyperbolicity_function

    rs = [free_reduce(r) for r in R]
    if not rs:
        return QuotientDeltaReport("SKIPPED", None, [], "no added relators; quotient equals the base")
    L = max(len(r) for r in rs)
    limit = exact(4 * L if bound is None else bound)
    prof = hyperbolicity_function(quotient_ball, t_max, mode, geodesic_cap)
    samples = [(s.t, s.f) for s in prof.samples]
    bad = [(t, f) for t, f in samples if f > limit]
    note = "finite-scale check on one ball"
    if bound is not None:
        note += f"; bound overridden (4L = {4 * L})"
    return QuotientDeltaReport("FAIL" if bad else "PASS", limit, samples, note, prof.certificate)
