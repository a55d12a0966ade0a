"""Thin and slim triangles, the hyperbolicity function, polygon checks and
finite-scale sublinearity reports.

Triangles are pinned at the identity: a Cayley graph is vertex-transitive, so
every triangle of perimeter at most t is a translate of one with a vertex at
the identity, and every side of it is the side opposite the identity in some
pinned translate.  With that, the supremum over all geodesic side choices
reduces to bottleneck path problems on the geodesic DAG, which is how EXACT
mode evaluates it.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .cayley import Ball, _guard, build_ball, geodesic_steps, is_geodesic_path, parallel_map
from .errors import CapExceeded, GuardViolation
from .oracles import Certificate
from .words import inverse

Path = Sequence[int]


class Mode(enum.Enum):
    EXACT = "exact"
    INTERVAL = "interval"


# ---------------------------------------------------------------------------
# single triangles


def _check_triangle(b: Ball, sides: Sequence[Path]) -> tuple[int, int, int]:
    if len(sides) != 3:
        raise ValueError("a triangle has three sides")
    s0, s1, s2 = sides
    if s0[-1] != s1[0] or s1[-1] != s2[0] or s2[-1] != s0[0]:
        raise ValueError("sides must run x->y, y->z, z->x")
    for s in sides:
        if not is_geodesic_path(b, s):
            raise ValueError(f"side {[b.words[i] for i in s]} is not geodesic")
    perimeter = sum(len(s) - 1 for s in sides)
    if perimeter // 2 > b.radius:
        raise GuardViolation("triangle too large for exact distances in this ball")
    return s0[0], s1[0], s2[0]


def _side_distance(dm: np.ndarray, side: Path, others: Sequence[Path]) -> int:
    pts = sorted({q for o in others for q in o})
    return int(dm[np.ix_(list(side), pts)].min(axis=1).max())


def slimness(b: Ball, sides: Sequence[Path]) -> int:
    """Max over side points of the distance to the union of the other two sides."""
    _check_triangle(b, sides)
    dm = b.distance_matrix()
    return max(_side_distance(dm, sides[k], [sides[(k + 1) % 3], sides[(k + 2) % 3]]) for k in range(3))


@dataclass
class TreeComparison:
    a: Fraction
    b: Fraction
    c: Fraction


@dataclass
class TriangleMeasure:
    vertices: tuple[int, int, int]
    perimeter: int
    slim: int
    thin: int
    insize: int
    tripod: TreeComparison


def tripod(b: Ball, x: int, y: int, z: int) -> TreeComparison:
    dm = b.distance_matrix()
    dxy, dxz, dyz = int(dm[x, y]), int(dm[x, z]), int(dm[y, z])
    return TreeComparison(Fraction(dxy + dxz - dyz, 2), Fraction(dxy + dyz - dxz, 2), Fraction(dxz + dyz - dxy, 2))


def thinness_and_insize(b: Ball, sides: Sequence[Path]) -> tuple[int, int]:
    """Distances between side points at equal arc length from a shared vertex.

    Matching runs over integer arc lengths up to the floor of the Gromov
    product.  ``insize`` is the largest distance among the three side points
    at (the floor of) the tripod centre.
    """
    x, y, z = _check_triangle(b, sides)
    s0, s1, s2 = (list(s) for s in sides)
    dm = b.distance_matrix()
    t = tripod(b, x, y, z)
    thin = 0
    for first, second, arm in ((s0, s2[::-1], t.a), (s0[::-1], s1, t.b), (s1[::-1], s2, t.c)):
        for k in range(1, math.floor(arm) + 1):
            thin = max(thin, int(dm[first[k], second[k]]))
    centre = [s0[math.floor(t.a)], s1[math.floor(t.b)], s2[math.floor(t.c)]]
    insize = max(int(dm[p, q]) for p in centre for q in centre)
    return thin, insize


def triangle_measure(b: Ball, sides: Sequence[Path]) -> TriangleMeasure:
    x, y, z = _check_triangle(b, sides)
    thin, ins = thinness_and_insize(b, sides)
    return TriangleMeasure((x, y, z), sum(len(s) - 1 for s in sides), slimness(b, sides), thin, ins,
                           tripod(b, x, y, z))


# ---------------------------------------------------------------------------
# hyperbolicity function


@dataclass
class Sample:
    t: int
    f: int
    mode: Mode
    triangles: int


@dataclass
class HyperbolicityProfile:
    samples: list[Sample]
    radius: int
    certificate: Certificate
    mode: Mode

    def f(self, t: int) -> int:
        if t < 0:
            return 0
        if t > self.t_max:
            raise ValueError(f"profile only covers t <= {self.t_max}")
        return self.samples[t].f

    @property
    def t_max(self) -> int:
        return self.samples[-1].t

    def csv(self) -> str:
        rows = ["t,f,mode,triangles"]
        label = "EXACT" if self.mode is Mode.EXACT else "INTERVAL_LOWER"
        rows += [f"{s.t},{s.f},{label},{s.triangles}" for s in self.samples]
        return "\n".join(rows) + "\n"


def geodesic_counts(b: Ball) -> list[int]:
    """Number of geodesic words for each ball element."""
    ways = [0] * len(b)
    ways[0] = 1
    for i in range(1, len(b)):
        ways[i] = sum(ways[j] for j in b.predecessors(i))
    return ways


def side_distance_table(b: Ball, mode: Mode) -> np.ndarray:
    """Column q: distance from every point to a geodesic from e to q.

    EXACT takes the max over geodesics (bottleneck path); INTERVAL takes the
    distance to the whole interval I(e, q), a lower bound.
    """
    dm = b.distance_matrix().astype(np.int32)
    n = len(b)
    out = np.empty((n, n), dtype=np.int32)
    out[:, 0] = dm[:, 0]
    combine = np.maximum if mode is Mode.EXACT else np.minimum
    for q in range(1, n):
        preds = b.predecessors(q)
        acc = out[:, preds[0]].copy()
        for j in preds[1:]:
            acc = combine(acc, out[:, j])
        out[:, q] = np.minimum(acc, dm[:, q])
    return out


def hyperbolicity_function(b: Ball, t_max: int, mode: Mode | str = Mode.EXACT,
                           geodesic_cap: int = 10**6) -> HyperbolicityProfile:
    """f(t) for 0 <= t <= t_max: sup of triangle slimness over perimeter <= t."""
    mode = Mode(mode) if isinstance(mode, str) else mode
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    if t_max > 2 * b.radius + 1:
        raise GuardViolation(f"t_max {t_max} needs a ball of radius >= {t_max // 2}")
    half = t_max // 2
    if mode is Mode.EXACT:
        counts = geodesic_counts(b)
        worst = max(counts[i] for i in b.within(half))
        if worst > geodesic_cap:
            raise CapExceeded(f"{worst} geodesics to one element exceed cap {geodesic_cap}")
    dm = b.distance_matrix()
    table = side_distance_table(b, mode)
    dist = np.array(b.dist)
    # ids are ordered by distance, so "within r" is a prefix
    prefix = [int(np.searchsorted(dist, r, side="right")) for r in range(b.radius + 2)]
    xs = list(range(prefix[half]))

    def scan(x: int) -> tuple[list[int], list[int]]:
        best = [0] * (t_max + 1)
        cnt = [0] * (t_max + 1)
        dx = b.dist[x]
        for y in range(x, prefix[min(half, t_max - dx)] if t_max - dx >= 0 else 0):
            dxy = int(dm[x, y])
            per = dx + b.dist[y] + dxy
            if per > t_max:
                continue
            m = prefix[per // 2]
            mask = (dm[x, :m] + dm[y, :m]) == dxy
            v = int(np.minimum(table[:m, x], table[:m, y])[mask].max())
            cnt[per] += 1
            if v > best[per]:
                best[per] = v
        return best, cnt

    results = parallel_map(scan, xs)
    best = [0] * (t_max + 1)
    cnt = [0] * (t_max + 1)
    for bx, cx in results:
        for t in range(t_max + 1):
            best[t] = max(best[t], bx[t])
            cnt[t] += cx[t]
    samples = []
    run_f = run_c = 0
    for t in range(t_max + 1):
        run_f = max(run_f, best[t])
        run_c += cnt[t]
        samples.append(Sample(t, run_f, mode, run_c))
    return HyperbolicityProfile(samples, b.radius, b.certificate, mode)


def brute_force_triangle_sup(b: Ball, t_max: int, cap: int = 10**5) -> list[int]:
    """Reference f(t) by enumerating every pinned triangle and every geodesic side triple.

    Exponential; intended as an independent check on small balls.
    """
    from .cayley import enumerate_geodesics

    best = [0] * (t_max + 1)
    dm = b.distance_matrix()
    ids = b.within(t_max // 2)
    for x in ids:
        for y in ids:
            per = b.dist[x] + b.dist[y] + int(dm[x, y])
            if per > t_max:
                continue
            for s0 in enumerate_geodesics(b, 0, x, cap):
                for s1 in enumerate_geodesics(b, x, y, cap):
                    for s2 in enumerate_geodesics(b, y, 0, cap):
                        sides = (s0, s1, s2)
                        v = max(_side_distance(dm, sides[k], [sides[(k + 1) % 3], sides[(k + 2) % 3]])
                                for k in range(3))
                        best[per] = max(best[per], v)
    out, run = [], 0
    for v in best:
        run = max(run, v)
        out.append(run)
    return out


# ---------------------------------------------------------------------------
# polygons


def ngon_factor(n: int) -> float:
    return 1 + math.log2(n - 1)


@dataclass
class NgonReport:
    passed: bool
    n: int
    bound: float
    side_values: list[int]
    worst_margin: float
    perimeter: int

    def lines(self) -> list[str]:
        return [f"result: {'PASS' if self.passed else 'FAIL'}", f"n: {self.n}", f"perimeter: {self.perimeter}",
                f"bound: {self.bound:.6f}", f"side_values: {' '.join(map(str, self.side_values))}",
                f"worst_margin: {self.worst_margin:.6f}"]


def ngon_neighborhood_check(b: Ball, polygon: Sequence[Path], bound_input: HyperbolicityProfile | float | int
                            ) -> NgonReport:
    """Each side within (1 + log2(n-1)) * bound of the union of the other sides.

    ``bound_input`` is a profile (bound = f(perimeter), clamped to the
    profile's range, which only makes the check stricter) or a constant delta.
    """
    n = len(polygon)
    if not 3 <= n <= 12:
        raise ValueError("polygon must have between 3 and 12 sides")
    for k in range(n):
        if polygon[k][-1] != polygon[(k + 1) % n][0]:
            raise ValueError("polygon is not closed")
        if not is_geodesic_path(b, polygon[k]):
            raise ValueError(f"side {k} is not geodesic")
    perimeter = sum(len(s) - 1 for s in polygon)
    if isinstance(bound_input, HyperbolicityProfile):
        base = bound_input.f(min(perimeter, bound_input.t_max))
    else:
        base = bound_input
    bound = ngon_factor(n) * float(base)
    dm = b.distance_matrix()
    values = [_side_distance(dm, polygon[k], [polygon[j] for j in range(n) if j != k]) for k in range(n)]
    return NgonReport(all(v <= bound + 1e-12 for v in values), n, bound, values,
                      bound - max(values), perimeter)


@dataclass
class NgonSweepReport:
    violations: int
    checked_sides: int
    vertex_count: int
    n_values: list[int]
    example: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def lines(self) -> list[str]:
        return [f"result: {'PASS' if self.passed else 'FAIL'}", f"violations: {self.violations}",
                f"sides_checked: {self.checked_sides}", f"vertices: {self.vertex_count}",
                f"n_values: {' '.join(map(str, self.n_values))}"]


def _pair_bottlenecks(b: Ball, vertices: Sequence[int], points: np.ndarray) -> np.ndarray:
    """W[k, i, j]: max over geodesics from vertex i to vertex j of the distance to point k."""
    dm = b.distance_matrix()
    m = len(vertices)
    W = np.empty((len(points), m, m), dtype=np.int32)
    for i, u in enumerate(vertices):
        for j, v in enumerate(vertices):
            if j < i:
                W[:, i, j] = W[:, j, i]
                continue
            layers, succ = geodesic_steps(b, u, v)
            val = {u: dm[points, u]}
            for layer in layers[1:]:
                for q in layer:
                    preds = [p for p in val if q in succ.get(p, ())]
                    acc = val[preds[0]]
                    for p in preds[1:]:
                        acc = np.maximum(acc, val[p])
                    val[q] = np.minimum(acc, dm[points, q])
            W[:, i, j] = val[v]
    return W


def ngon_sweep(b: Ball, vertex_radius: int, n_values: Sequence[int],
               bound: Callable[[int], float] | HyperbolicityProfile | float) -> NgonSweepReport:
    """Check the polygon bound for every geodesic n-gon with vertices in a sub-ball.

    Covers every vertex tuple and every choice of geodesic sides (vertices may
    repeat).  For a side and a point on it, a violating polygon is a closed
    chain of n - 1 further sides that all stay farther than the bound from the
    point; the search finds the shortest such chain by min-plus iteration.
    """
    if isinstance(bound, HyperbolicityProfile):
        prof = bound
        base = lambda P: prof.f(min(P, prof.t_max))  # noqa: E731
        levels = sorted({s.f for s in prof.samples})
    elif callable(bound):
        base = bound
        levels = None
    else:
        const = bound
        base = lambda P: const  # noqa: E731
        levels = [const]
    verts = b.within(vertex_radius)
    if 2 * vertex_radius > b.radius:
        raise GuardViolation("ball must have radius >= twice the vertex radius")
    dm = b.distance_matrix()
    cap = b.radius + 1
    for u in verts:
        for v in verts:
            _guard(b, u, v)
    points = np.array(sorted({p for u in verts for v in verts
                              for p in np.flatnonzero((dm[u] + dm[v]) == dm[u, v]).tolist()}))
    pos = {int(p): k for k, p in enumerate(points)}
    W = _pair_bottlenecks(b, verts, points)
    L = dm[np.ix_(verts, verts)].astype(np.int64)
    big = np.int64(1 << 40)
    violations = 0
    checked = 0
    example = None
    m = len(verts)
    for n in n_values:
        if not 3 <= n <= 12:
            raise ValueError("n must lie in 3..12")
        kappa = ngon_factor(n)
        for i in range(m):
            for j in range(i, m):
                u, v = verts[i], verts[j]
                for p in np.flatnonzero((dm[u] + dm[v]) == dm[u, v]).tolist():
                    checked += 1
                    Wp = W[pos[p]]
                    lv = levels
                    if lv is None:
                        lv = sorted({base(P) for P in range(int(L.max()) * n + 1)})
                    for phi in lv:
                        tau = kappa * phi
                        if tau >= cap:
                            raise GuardViolation("bound exceeds the exact-distance range of the ball")
                        cost = np.where(Wp > tau, L, big)
                        cur = np.full(m, big)
                        cur[j] = 0
                        for _ in range(n - 1):
                            cur = (cur[:, None] + cost).min(axis=0)
                        P = int(cur[i])
                        if P >= big:
                            continue
                        P += int(dm[u, v])
                        if base(P) <= phi:
                            violations += 1
                            if example is None:
                                example = (n, b.words[u], b.words[v], b.words[p], P, phi)
                            break
    return NgonSweepReport(violations, checked, m, list(n_values), example)


def brute_force_ngon_violations(b: Ball, vertex_radius: int, n: int, bound: Callable[[int], float],
                                cap: int = 10**4) -> int:
    """Number of (polygon, side, point) violations found by explicit enumeration.

    Returns 0 or a positive count; exponential, for cross-checks on tiny inputs.
    """
    from itertools import product

    from .cayley import enumerate_geodesics

    verts = b.within(vertex_radius)
    dm = b.distance_matrix()
    bad = 0
    for tup in product(verts, repeat=n):
        choices = [enumerate_geodesics(b, tup[k], tup[(k + 1) % n], cap) for k in range(n)]
        P = sum(len(c[0]) - 1 for c in choices)
        limit = ngon_factor(n) * bound(P)
        for sides in product(*choices):
            for k in range(n):
                if _side_distance(dm, sides[k], [sides[j] for j in range(n) if j != k]) > limit:
                    bad += 1
    return bad


# ---------------------------------------------------------------------------
# reports


EVIDENCE_LABEL = "FINITE-SCALE EVIDENCE (not a hyperbolicity certificate)"


@dataclass
class SublinearityReport:
    ratios: list[tuple[int, Fraction]]
    running_min: list[tuple[int, Fraction]]
    liminf_proxy: list[tuple[int, Fraction | None]]

    def lines(self) -> list[str]:
        out = [f"label: {EVIDENCE_LABEL}"]
        for (t, r), (_, m) in zip(self.ratios, self.running_min):
            out.append(f"ratio[{t}]: {r} running_min: {m}")
        for t0, v in self.liminf_proxy:
            out.append(f"liminf_proxy[{t0}]: {'INSUFFICIENT DATA' if v is None else v}")
        return out


def sublinearity_report(p: HyperbolicityProfile, cuts: Sequence[int] | None = None) -> SublinearityReport:
    if not p.samples:
        raise ValueError("empty profile")
    ratios = [(s.t, Fraction(s.f, s.t)) for s in p.samples if s.t > 0]
    run, cur = [], None
    for t, r in ratios:
        cur = r if cur is None else min(cur, r)
        run.append((t, cur))
    cuts = list(range(1, p.t_max + 1)) if cuts is None else list(cuts)
    proxy = []
    for t0 in cuts:
        tail = [r for t, r in ratios if t >= t0]
        proxy.append((t0, min(tail) if tail else None))
    return SublinearityReport(ratios, run, proxy)


@dataclass
class SyncReport:
    sums: list[tuple[int, Fraction]]
    status: str
    tolerance: Fraction
    sandwich: dict[int, tuple[bool, bool]] = field(default_factory=dict)

    @property
    def sandwich_holds(self) -> bool:
        return all(a and b for a, b in self.sandwich.values())

    def lines(self) -> list[str]:
        out = [f"label: {EVIDENCE_LABEL}", f"status: {self.status}", f"tolerance: {self.tolerance}"]
        out += [f"sum_ratio[{t}]: {s}" for t, s in self.sums]
        for t, (lo, hi) in sorted(self.sandwich.items()):
            out.append(f"sandwich[{t}]: factor<=product {'PASS' if lo else 'FAIL'}, "
                       f"product<=max {'PASS' if hi else 'FAIL'}")
        return out


def synchronized_report(profiles: Sequence[HyperbolicityProfile], scales: Sequence[int], tolerance=Fraction(1, 10),
                        product: HyperbolicityProfile | None = None) -> SyncReport:
    """Sum of f_i(x)/x across groups per scale; PASS-AT-SCALES if the minimum is below tolerance.

    With a free-product profile, also checks factor <= product <= max(factors) at every scale.
    """
    tol = Fraction(str(tolerance)) if not isinstance(tolerance, Fraction) else tolerance
    for x in scales:
        if x <= 0:
            raise ValueError("scales must be positive")
        for p in list(profiles) + ([product] if product else []):
            if x > p.t_max:
                raise ValueError(f"scale {x} not covered by a profile with t_max {p.t_max}")
    sums = [(x, sum((Fraction(p.f(x), x) for p in profiles), Fraction(0))) for x in scales]
    status = "PASS-AT-SCALES" if sums and min(s for _, s in sums) < tol else "FAIL-AT-SCALES"
    sandwich = {}
    if product is not None:
        for x in scales:
            fs = [p.f(x) for p in profiles]
            sandwich[x] = (all(v <= product.f(x) for v in fs), product.f(x) <= max(fs))
    return SyncReport(sums, status, tol, sandwich)


# ---------------------------------------------------------------------------
# four-point condition


def exact_distances(b: Ball, ids: Sequence[int], lookup: Ball | None = None) -> np.ndarray:
    """Pairwise distances among ``ids`` that are exact beyond the ball radius."""
    if lookup is None:
        lookup = build_ball(b.oracle, 2 * max(b.dist[i] for i in ids))
    n = len(ids)
    out = np.zeros((n, n), dtype=np.int32)
    for a in range(n):
        inv = inverse(b.words[ids[a]])
        for c in range(a + 1, n):
            j = lookup.locate(inv + b.words[ids[c]])
            if j is None:
                raise GuardViolation("distance lookup ball too small")
            out[a, c] = out[c, a] = lookup.dist[j]
    return out


def four_point_delta(b: Ball, sample_cap: int = 10**7, seed: int = 0, lookup: Ball | None = None) -> Fraction:
    """Max over quadruples of (largest - middle)/2 among the three pairings of distance sums."""
    ids = list(range(len(b)))
    D = exact_distances(b, ids, lookup).astype(np.int64)
    n = len(ids)
    best = 0
    if n ** 4 <= sample_cap:
        for x in range(n):
            # pairings: d(x,y)+d(z,w), d(x,z)+d(y,w), d(x,w)+d(y,z)
            a = D[x][:, None, None] + D[None, :, :]
            bb = D[x][None, :, None] + D[:, None, :]
            c = D[x][None, None, :] + D[:, :, None]
            st = np.sort(np.stack([a, bb, c]), axis=0)
            best = max(best, int((st[2] - st[1]).max()))
    else:
        rng = random.Random(seed)
        for _ in range(max(1, sample_cap // 16)):
            x, y, z, w = (rng.randrange(n) for _ in range(4))
            s = sorted((D[x, y] + D[z, w], D[x, z] + D[y, w], D[x, w] + D[y, z]))
            best = max(best, int(s[2] - s[1]))
    return Fraction(best, 2)
