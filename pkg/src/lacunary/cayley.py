"""Balls in Cayley graphs, intervals, geodesics and injectivity radii."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import CapExceeded, GuardViolation, OracleUnknown
from .oracles import Certificate, GroupOracle, Verdict, weakest
from .words import free_reduce, inverse

WORKERS_ENV = "LACUNARY_WORKERS"


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def parallel_map(fn, items: Sequence, workers: int | None = None) -> list:
    """Map preserving order; results never depend on the worker count."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


class Ball:
    """Ball about the identity.  Element ids follow shortlex order of representatives."""

    def __init__(self, oracle: GroupOracle, radius: int, permissive: bool = False):
        if radius < 0:
            raise ValueError("radius must be >= 0")
        self.oracle = oracle
        self.radius = radius
        self.permissive = permissive
        self.letters = oracle.alphabet.letters
        self.words: list[str] = [""]
        self.dist: list[int] = [0]
        self.edges: list[dict[str, int]] = [{}]
        self.certificate = oracle.certificate
        self.caveats: list[str] = list(oracle.caveats)
        self._index: dict[Hashable, int] = {}
        self._buckets: dict[Hashable, list[int]] = {}
        self._dm: np.ndarray | None = None
        self._register("", 0)
        self._build()

    # construction ---------------------------------------------------------

    def _invariant(self, w: str) -> Hashable:
        inv = getattr(self.oracle, "invariant", None)
        return inv(w) if inv is not None else None

    def _register(self, w: str, d: int) -> int:
        i = len(self.words) if w else 0
        if w:
            self.words.append(w)
            self.dist.append(d)
            self.edges.append({})
        if self.oracle.has_keys:
            k = self.oracle.key(w)
            self._index[k] = i
        else:
            self._buckets.setdefault(self._invariant(w), []).append(i)
        return i

    def _unknown(self, msg: str) -> None:
        if not self.permissive:
            raise OracleUnknown(msg)
        self.certificate = Certificate.BEST_EFFORT
        if msg not in self.caveats:
            self.caveats.append("permissive: undecided comparisons treated as distinct")

    def _match(self, w: str, layers: Iterable[int] | None) -> int | None:
        """Id of the registered element equal to ``w``, if any."""
        if self.oracle.has_keys:
            k = self.oracle.key(w)
            if k is None:
                self._unknown(f"oracle cannot name element {w!r}")
                return None
            return self._index.get(k)
        allowed = None if layers is None else set(layers)
        for i in self._buckets.get(self._invariant(w), ()):
            if allowed is not None and self.dist[i] not in allowed:
                continue
            v = self.oracle.is_trivial(w + inverse(self.words[i]))
            if v is Verdict.TRIVIAL:
                return i
            if v is Verdict.UNKNOWN:
                self._unknown(f"oracle undecided on {w!r} vs {self.words[i]!r}")
        return None

    def _build(self) -> None:
        layer = [0]
        for d in range(1, self.radius + 2):
            new: list[int] = []
            for i in layer:
                rep = self.words[i]
                for x in self.letters:
                    if x in self.edges[i]:
                        continue
                    w = free_reduce(rep + x)
                    j = self._match(w, (d - 2, d - 1, d))
                    if j is None:
                        if d > self.radius:
                            continue
                        j = self._register(w, d)
                        new.append(j)
                    self.edges[i][x] = j
                    self.edges[j][x.swapcase()] = i
            layer = new
            if not layer:
                break

    # queries ----------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.words)

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def diameter(self) -> int:
        return max(self.dist)

    def locate(self, w: str) -> int | None:
        """Id of the element represented by ``w``, or ``None`` if outside the ball."""
        self.oracle.check_word(w)
        return self._match(free_reduce(w), None)

    def sphere(self, d: int) -> list[int]:
        return [i for i, k in enumerate(self.dist) if k == d]

    def within(self, d: int) -> list[int]:
        return [i for i, k in enumerate(self.dist) if k <= d]

    def distance(self, i: int, j: int) -> int | None:
        """d(g_i, g_j), or ``None`` when it exceeds the radius."""
        if self._dm is not None:
            v = int(self._dm[i, j])
            return None if v > self.radius else v
        k = self.locate(inverse(self.words[i]) + self.words[j])
        return None if k is None else self.dist[k]

    def distance_matrix(self) -> np.ndarray:
        """All-pairs distances; entries above the radius are stored as ``radius + 1``."""
        if self._dm is None:
            n = len(self.words)
            cap = self.radius + 1

            def row(i: int) -> list[int]:
                inv = inverse(self.words[i])
                out = []
                for j in range(n):
                    if j < i:
                        out.append(-1)
                        continue
                    k = self._match(free_reduce(inv + self.words[j]), None)
                    out.append(cap if k is None else self.dist[k])
                return out

            rows = parallel_map(row, list(range(n)))
            dm = np.array(rows, dtype=np.int32).reshape(n, n)
            iu = np.triu_indices(n)
            dm.T[iu] = dm[iu]
            self._dm = dm
        return self._dm

    def predecessors(self, i: int) -> list[int]:
        return sorted({j for j in self.edges[i].values() if self.dist[j] == self.dist[i] - 1})


def build_ball(o: GroupOracle, radius: int, permissive: bool = False) -> Ball:
    return Ball(o, radius, permissive)


# ---------------------------------------------------------------------------
# intervals and geodesics


def _guard(b: Ball, x: int, y: int) -> int:
    dm = b.distance_matrix()
    d = int(dm[x, y])
    # every point of a geodesic from x to y lies within (|x|+|y|+d)/2 of the identity
    if d > b.radius or (b.dist[x] + b.dist[y] + d) // 2 > b.radius:
        raise GuardViolation(f"geodesics between {b.words[x]!r} and {b.words[y]!r} may leave the ball")
    return d


def interval_mask(b: Ball, x: int, y: int) -> np.ndarray:
    d = _guard(b, x, y)
    dm = b.distance_matrix()
    return (dm[x] + dm[y]) == d


def interval(b: Ball, x: int, y: int) -> set[int]:
    """Points lying on some geodesic from ``x`` to ``y``."""
    return set(np.flatnonzero(interval_mask(b, x, y)).tolist())


def _interval_layers(b: Ball, x: int, y: int) -> list[list[int]]:
    d = _guard(b, x, y)
    dm = b.distance_matrix()
    mask = (dm[x] + dm[y]) == d
    layers: list[list[int]] = [[] for _ in range(d + 1)]
    for p in np.flatnonzero(mask).tolist():
        layers[int(dm[x, p])].append(p)
    return layers


def geodesic_steps(b: Ball, x: int, y: int) -> tuple[list[list[int]], dict[int, list[int]]]:
    """Interval layers from ``x`` and, per point, its successors one step closer to ``y``."""
    layers = _interval_layers(b, x, y)
    dm = b.distance_matrix()
    succ: dict[int, list[int]] = {}
    for k in range(len(layers) - 1):
        nxt = set(layers[k + 1])
        for p in layers[k]:
            succ[p] = sorted(q for q in set(b.edges[p].values()) if q in nxt and dm[p, q] == 1)
    if layers:
        for p in layers[-1]:
            succ[p] = []
    return layers, succ


def count_geodesics(b: Ball, x: int, y: int) -> int:
    layers, succ = geodesic_steps(b, x, y)
    ways = {y: 1}
    for layer in reversed(layers[:-1]):
        for p in layer:
            ways[p] = sum(ways.get(q, 0) for q in succ[p])
    return ways.get(x, 0)


def enumerate_geodesics(b: Ball, x: int, y: int, cap: int) -> list[tuple[int, ...]]:
    """All edge paths of length d(x, y) from ``x`` to ``y``; at most ``cap`` of them."""
    n = count_geodesics(b, x, y)
    if n > cap:
        raise CapExceeded(f"{n} geodesics between {b.words[x]!r} and {b.words[y]!r} exceed cap {cap}")
    _, succ = geodesic_steps(b, x, y)
    out: list[tuple[int, ...]] = []

    def walk(path: list[int]) -> None:
        p = path[-1]
        if p == y:
            out.append(tuple(path))
            return
        for q in succ[p]:
            path.append(q)
            walk(path)
            path.pop()

    walk([x])
    return out


def path_from_word(b: Ball, start: int, w: str) -> tuple[int, ...]:
    """Vertices visited reading ``w`` from ``start``; must stay inside the ball."""
    out = [start]
    v = start
    for x in w:
        nxt = b.edges[v].get(x)
        if nxt is None:
            raise GuardViolation(f"path {w!r} leaves the ball")
        v = nxt
        out.append(v)
    return tuple(out)


def is_geodesic_path(b: Ball, path: Sequence[int]) -> bool:
    dm = b.distance_matrix()
    if int(dm[path[0], path[-1]]) != len(path) - 1:
        return False
    return all(int(dm[p, q]) == 1 for p, q in zip(path, path[1:]))


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class Homomorphism:
    images: Mapping[str, str]
    codomain: GroupOracle

    def __post_init__(self) -> None:
        for g, w in self.images.items():
            self.codomain.check_word(w)

    def apply(self, w: str) -> str:
        out = []
        for x in w:
            img = self.images[x.lower()]
            out.append(img if x.islower() else inverse(img))
        return free_reduce("".join(out))


def parse_map(spec: str, domain_generators: Iterable[str]) -> dict[str, str]:
    """Parse ``"a->ab,b->b"``; unspecified generators map to themselves."""
    images = {g: g for g in domain_generators}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "->" not in part:
            raise ValueError(f"bad map entry {part!r}")
        src, dst = (s.strip() for s in part.split("->", 1))
        if src not in images:
            raise ValueError(f"{src!r} is not a domain generator")
        images[src] = "" if dst == "1" else dst
    return images


@dataclass
class InjectivityRadius:
    value: int
    unbounded: bool
    certificate: Certificate
    witness: tuple[str, str] | None = None

    def __str__(self) -> str:
        return f"UNBOUNDED_UP_TO({self.value})" if self.unbounded else str(self.value)


def injectivity_radius(h: Homomorphism, dom_ball: Ball, cod_oracle: GroupOracle | None = None) -> InjectivityRadius:
    """Largest r such that ``h`` is injective on the r-ball of the domain."""
    cod = cod_oracle or h.codomain
    cert = weakest(dom_ball.certificate, cod.certificate)
    images = [h.apply(w) for w in dom_ball.words]
    first_collision: tuple[int, int] | None = None
    if cod.has_keys:
        seen: dict[Hashable, int] = {}
        for i, w in enumerate(images):
            k = cod.key(w)
            if k is None:
                cert = Certificate.BEST_EFFORT
                continue
            j = seen.setdefault(k, i)
            if j != i:
                first_collision = (j, i)
                break
    else:
        for i, w in enumerate(images):
            for j in range(i):
                v = cod.is_trivial(w + inverse(images[j]))
                if v is Verdict.UNKNOWN:
                    cert = Certificate.BEST_EFFORT
                elif v is Verdict.TRIVIAL:
                    first_collision = (j, i)
                    break
            if first_collision:
                break
    if first_collision is None:
        return InjectivityRadius(dom_ball.radius, True, cert)
    j, i = first_collision
    # ids follow distance order, so i is the first element meeting an earlier image
    return InjectivityRadius(dom_ball.dist[i] - 1, False, cert, (dom_ball.words[j], dom_ball.words[i]))
