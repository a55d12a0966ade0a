"""Word-problem oracles.

Every oracle answers ``is_trivial`` and carries a certificate level.  Oracles
that can also name elements canonically implement ``key``; ball construction
uses keys when available and falls back to pairwise equality otherwise.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .errors import WorkCapExceeded
from .words import (
    OrderedAlphabet,
    cyclic_reduce,
    free_reduce,
    inverse,
    is_cyclically_reduced,
    parse_word,
    reduced_words_up_to,
    render,
    symmetrize,
)


class Verdict(enum.Enum):
    TRIVIAL = "TRIVIAL"
    NONTRIVIAL = "NONTRIVIAL"
    UNKNOWN = "UNKNOWN"


class Certificate(enum.Enum):
    CERTIFIED = "CERTIFIED"
    BEST_EFFORT = "BEST_EFFORT"


def weakest(*certs: Certificate) -> Certificate:
    if any(c is Certificate.BEST_EFFORT for c in certs):
        return Certificate.BEST_EFFORT
    return Certificate.CERTIFIED


class Backend(enum.Enum):
    FREE = "FREE"
    FINITE_TABLE = "FINITE_TABLE"
    FREE_PRODUCT = "FREE_PRODUCT"
    DEHN = "DEHN"
    BALL_CLOSURE = "BALL_CLOSURE"
    DIRECT_ABELIAN = "DIRECT_ABELIAN"


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        alphabet = OrderedAlphabet(tuple(self.generators))
        for r in self.relators:
            if not r:
                raise ValueError("empty relator")
            if r not in alphabet:
                raise ValueError(f"relator {r!r} uses letters outside {self.generators}")
            if not is_cyclically_reduced(r):
                raise ValueError(f"relator {r!r} is not cyclically reduced")

    @classmethod
    def from_words(cls, generators: Iterable[str], relators: Iterable[str]) -> "Presentation":
        """Cyclically reduce relators, drop trivial ones and exact duplicates."""
        rels: list[str] = []
        for r in relators:
            c = cyclic_reduce(r)
            if c and c not in rels:
                rels.append(c)
        return cls(tuple(generators), tuple(rels))

    @property
    def alphabet(self) -> OrderedAlphabet:
        return OrderedAlphabet(tuple(self.generators))

    def symmetrized(self) -> frozenset[str]:
        return symmetrize(self.relators)

    @property
    def max_relator_length(self) -> int:
        return max((len(r) for r in self.relators), default=0)


def parse_presentation(text: str) -> Presentation:
    gens: list[str] | None = None
    rels: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[generators]"):
            if gens is not None:
                raise ValueError(f"line {lineno}: duplicate [generators]")
            gens = line[len("[generators]"):].split()
        elif line.startswith("[relator]"):
            rels.append(line[len("[relator]"):].strip())
        else:
            raise ValueError(f"line {lineno}: unrecognised line {raw!r}")
    if gens is None:
        raise ValueError("missing [generators] line")
    return Presentation(tuple(gens), tuple(parse_word(r, gens) for r in rels))


def format_presentation(p: Presentation, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append("[generators] " + " ".join(p.generators))
    lines.extend(f"[relator] {render(r)}" for r in p.relators)
    return "\n".join(lines) + "\n"


def read_presentation(path) -> Presentation:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())


# ---------------------------------------------------------------------------
# oracle interface


class GroupOracle:
    backend: Backend
    certificate: Certificate
    generators: tuple[str, ...]
    caveats: tuple[str, ...] = ()

    @property
    def alphabet(self) -> OrderedAlphabet:
        return OrderedAlphabet(self.generators)

    @property
    def has_keys(self) -> bool:
        return False

    def is_trivial(self, w: str) -> Verdict:
        raise NotImplementedError

    def key(self, w: str) -> Hashable | None:
        """Canonical element key, or ``None`` if the element cannot be named."""
        return None

    def word_length(self, w: str) -> int | None:
        """Exact word-metric length of ``w`` when the backend knows it cheaply."""
        return None

    def check_word(self, w: str) -> None:
        if w not in self.alphabet:
            raise ValueError(f"word {w!r} is not over alphabet {self.generators}")


def exponent_sums(p: Presentation, w: str) -> tuple[int, ...]:
    """Exponent sums of the generators whose sum vanishes on every relator."""
    free = _balanced_generators(p)
    sums = dict.fromkeys(free, 0)
    for x in w:
        g = x.lower()
        if g in sums:
            sums[g] += 1 if x.islower() else -1
    return tuple(sums[g] for g in free)


@functools.lru_cache(maxsize=256)
def _balanced_generators(p: Presentation) -> tuple[str, ...]:
    out = []
    for g in p.generators:
        if all(r.count(g) == r.count(g.upper()) for r in p.relators):
            out.append(g)
    return tuple(out)


def is_trivial(o: GroupOracle, w: str) -> Verdict:
    o.check_word(w)
    return o.is_trivial(w)


def equal_words(o: GroupOracle, u: str, v: str) -> Verdict:
    return is_trivial(o, u + inverse(v))


class FreeOracle(GroupOracle):
    backend = Backend.FREE
    certificate = Certificate.CERTIFIED

    def __init__(self, generators: Iterable[str]):
        self.generators = tuple(generators)
        OrderedAlphabet(self.generators)

    @property
    def has_keys(self) -> bool:
        return True

    def is_trivial(self, w: str) -> Verdict:
        return Verdict.NONTRIVIAL if free_reduce(w) else Verdict.TRIVIAL

    def key(self, w: str) -> str:
        return free_reduce(w)

    def word_length(self, w: str) -> int:
        return len(free_reduce(w))


def free_oracle(generators: Iterable[str] | int) -> FreeOracle:
    if isinstance(generators, int):
        return FreeOracle(OrderedAlphabet.of_size(generators).generators)
    return FreeOracle(generators)


class AbelianOracle(GroupOracle):
    """Direct product of cyclic groups, one per generator; order 0 means infinite."""

    backend = Backend.DIRECT_ABELIAN
    certificate = Certificate.CERTIFIED

    def __init__(self, generators: Iterable[str], orders: Sequence[int] | None = None):
        self.generators = tuple(generators)
        OrderedAlphabet(self.generators)
        self.orders = tuple(orders) if orders is not None else (0,) * len(self.generators)
        if len(self.orders) != len(self.generators) or any(n < 0 for n in self.orders):
            raise ValueError("one non-negative order per generator")
        self._pos = {g: i for i, g in enumerate(self.generators)}

    @property
    def has_keys(self) -> bool:
        return True

    def exponents(self, w: str) -> tuple[int, ...]:
        v = [0] * len(self.generators)
        for x in w:
            v[self._pos[x.lower()]] += 1 if x.islower() else -1
        return tuple(e % n if n else e for e, n in zip(v, self.orders))

    def key(self, w: str) -> tuple[int, ...]:
        return self.exponents(w)

    def word_length(self, w: str) -> int:
        # the Cayley graph is a product of cycles and lines, so lengths add
        return sum(min(e, n - e) if n else abs(e) for e, n in zip(self.exponents(w), self.orders))

    def is_trivial(self, w: str) -> Verdict:
        return Verdict.NONTRIVIAL if any(self.exponents(w)) else Verdict.TRIVIAL


def abelian_oracle(p: Presentation) -> AbelianOracle:
    """Read a presentation of a direct product of cyclic groups.

    Every pair of generators must commute by a listed relator and every other
    relator must be a power of a single generator.
    """
    gens = p.generators
    commuting: set[frozenset[str]] = set()
    orders = {g: 0 for g in gens}
    for r in p.relators:
        shifts = {r[i:] + r[:i] for i in range(len(r))} | {inverse(r)[i:] + inverse(r)[:i] for i in range(len(r))}
        comm = None
        for s in shifts:
            if len(s) == 4 and s[0].islower() and s[1].islower() and s[2] == s[0].upper() and s[3] == s[1].upper():
                comm = frozenset((s[0], s[1]))
                break
        if comm is not None and len(comm) == 2:
            commuting.add(comm)
            continue
        letters = {x.lower() for x in r}
        if len(letters) != 1 or len(set(r)) != 1:
            raise ValueError(f"relator {r!r} is neither a commutator of generators nor a generator power")
        g = r[0].lower()
        orders[g] = math.gcd(orders[g], len(r))
    for i, g in enumerate(gens):
        for h in gens[i + 1:]:
            if frozenset((g, h)) not in commuting:
                raise ValueError(f"generators {g} and {h} are not declared to commute")
    return AbelianOracle(gens, [orders[g] for g in gens])


class FiniteTableOracle(GroupOracle):
    """Finite group given by its right-regular action.

    ``table[v][x]`` is the vertex reached from ``v`` by letter ``x`` (both
    signs present); vertex 0 is the identity.
    """

    backend = Backend.FINITE_TABLE
    certificate = Certificate.CERTIFIED

    def __init__(self, generators: Iterable[str], table: Sequence[dict[str, int]]):
        self.generators = tuple(generators)
        letters = OrderedAlphabet(self.generators).letters
        self.table = [dict(row) for row in table]
        for v, row in enumerate(self.table):
            for x in letters:
                if x not in row:
                    raise ValueError(f"vertex {v} lacks letter {x}")
                if self.table[row[x]][x.swapcase()] != v:
                    raise ValueError("table is not closed under inverse letters")
        self._lengths: list[int] | None = None

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def has_keys(self) -> bool:
        return True

    def key(self, w: str) -> int:
        v = 0
        for x in w:
            v = self.table[v][x]
        return v

    def is_trivial(self, w: str) -> Verdict:
        return Verdict.TRIVIAL if self.key(w) == 0 else Verdict.NONTRIVIAL

    def word_length(self, w: str) -> int:
        if self._lengths is None:
            lengths = [-1] * len(self.table)
            lengths[0] = 0
            frontier = [0]
            while frontier:
                nxt = []
                for v in frontier:
                    for u in self.table[v].values():
                        if lengths[u] < 0:
                            lengths[u] = lengths[v] + 1
                            nxt.append(u)
                frontier = nxt
            self._lengths = lengths
        return self._lengths[self.key(w)]


def cyclic_oracle(n: int, letter: str = "a") -> FiniteTableOracle:
    if n < 1:
        raise ValueError("order must be positive")
    table = [{letter: (v + 1) % n, letter.upper(): (v - 1) % n} for v in range(n)]
    return FiniteTableOracle((letter,), table)


# ---------------------------------------------------------------------------
# Dehn's algorithm


class _DehnRules:
    def __init__(self, p: Presentation):
        rules: dict[str, str] = {}
        for r in sorted(p.symmetrized()):
            n = len(r)
            for k in range(n // 2 + 1, n + 1):
                u, rep = r[:k], inverse(r[k:])
                old = rules.get(u)
                if old is None or (len(rep), rep) < (len(old), old):
                    rules[u] = rep
        self.rules = rules
        self.lengths = sorted({len(u) for u in rules}, reverse=True)

    def reduce(self, w: str) -> str:
        w = free_reduce(w)
        while True:
            hit = self._find(w)
            if hit is None:
                return w
            i, k = hit
            w = free_reduce(w[:i] + self.rules[w[i:i + k]] + w[i + k:])

    def _find(self, w: str) -> tuple[int, int] | None:
        rules = self.rules
        for i in range(len(w)):
            for k in self.lengths:
                if i + k <= len(w) and w[i:i + k] in rules:
                    return i, k
        return None


_dehn_cache: dict[Presentation, _DehnRules] = {}
_dehn_certified: dict[Presentation, bool] = {}


def dehn_certified(p: Presentation) -> bool:
    """True when the symmetrized relators satisfy C'(1/6), so greedy rewriting decides triviality."""
    hit = _dehn_certified.get(p)
    if hit is None:
        from fractions import Fraction

        from .smallcancel import check_classical

        hit = not p.relators or check_classical(p.symmetrized(), Fraction(1, 6)).passed
        _dehn_certified[p] = hit
    return hit


def _dehn_setup(p: Presentation) -> tuple[_DehnRules, bool]:
    rules = _dehn_cache.get(p)
    if rules is None:
        rules = _dehn_cache[p] = _DehnRules(p)
    return rules, dehn_certified(p)


def dehn_reduce(p: Presentation, w: str) -> str:
    """Terminal word of the greedy Dehn rewriting."""
    return _dehn_setup(p)[0].reduce(w)


def dehn_solve(p: Presentation, w: str) -> Verdict:
    """Greedy Dehn rewriting; NONTRIVIAL only when the relators are C'(1/6)."""
    if w not in p.alphabet:
        raise ValueError(f"word {w!r} is not over alphabet {p.generators}")
    rules, certified = _dehn_setup(p)
    if not rules.reduce(w):
        return Verdict.TRIVIAL
    return Verdict.NONTRIVIAL if certified else Verdict.UNKNOWN


class DehnOracle(GroupOracle):
    backend = Backend.DEHN

    def __init__(self, p: Presentation):
        self.presentation = p
        self.generators = p.generators
        certified = dehn_certified(p)
        self.certificate = Certificate.CERTIFIED if certified else Certificate.BEST_EFFORT
        if not certified:
            self.caveats = ("relators fail C'(1/6); Dehn rewriting only proves triviality",)

    def is_trivial(self, w: str) -> Verdict:
        return dehn_solve(self.presentation, w)

    def invariant(self, w: str) -> Hashable:
        return exponent_sums(self.presentation, w)


def dehn_oracle(p: Presentation) -> DehnOracle:
    return DehnOracle(p)


# ---------------------------------------------------------------------------
# free products


@dataclass(frozen=True)
class Syllable:
    factor: int
    word: str


class FreeProductOracle(GroupOracle):
    backend = Backend.FREE_PRODUCT

    def __init__(self, factors: Sequence[GroupOracle], order: Sequence[str] | None = None):
        """``order`` fixes the generator order (and so the shortlex order of balls)."""
        if not factors:
            raise ValueError("need at least one factor")
        self.factors = tuple(factors)
        gens: list[str] = []
        self._owner: dict[str, int] = {}
        for i, f in enumerate(self.factors):
            for g in f.generators:
                if g in self._owner:
                    raise ValueError(f"generator {g} appears in two factors")
                self._owner[g] = i
                gens.append(g)
        if order is not None:
            if sorted(order) != sorted(gens):
                raise ValueError("order must list each factor generator once")
            gens = list(order)
        self.generators = tuple(gens)
        OrderedAlphabet(self.generators)
        self.certificate = weakest(*(f.certificate for f in self.factors))
        self.caveats = tuple(c for f in self.factors for c in f.caveats)

    @property
    def has_keys(self) -> bool:
        return all(f.has_keys for f in self.factors)

    def normal_form(self, w: str) -> tuple[Syllable, ...] | None:
        """Alternating syllables with no trivial entries; ``None`` if a factor is undecided."""
        stack: list[Syllable] = []
        i = 0
        w = free_reduce(w)
        while i < len(w):
            f = self._owner[w[i].lower()]
            j = i
            while j < len(w) and self._owner[w[j].lower()] == f:
                j += 1
            run = w[i:j]
            i = j
            if stack and stack[-1].factor == f:
                run = free_reduce(stack.pop().word + run)
            verdict = self.factors[f].is_trivial(run)
            if verdict is Verdict.UNKNOWN:
                return None
            if verdict is Verdict.NONTRIVIAL:
                stack.append(Syllable(f, run))
        return tuple(stack)

    def is_trivial(self, w: str) -> Verdict:
        nf = self.normal_form(w)
        if nf is None:
            return Verdict.UNKNOWN
        return Verdict.NONTRIVIAL if nf else Verdict.TRIVIAL

    def key(self, w: str) -> Hashable | None:
        nf = self.normal_form(w)
        if nf is None:
            return None
        out = []
        for s in nf:
            k = self.factors[s.factor].key(s.word)
            if k is None:
                return None
            out.append((s.factor, k))
        return tuple(out)

    def invariant(self, w: str) -> Hashable:
        """Per-factor images under the retractions onto each factor."""
        out = []
        for f in self.factors:
            proj = "".join(x for x in w if x.lower() in f.generators)
            # keys are total functions of the element only for certified backends
            if f.has_keys and f.certificate is Certificate.CERTIFIED:
                out.append(f.key(proj))
            else:
                inv = getattr(f, "invariant", None)
                out.append(inv(proj) if inv is not None else None)
        return tuple(out)

    def word_length(self, w: str) -> int | None:
        nf = self.normal_form(w)
        if nf is None:
            return None
        total = 0
        for s in nf:
            n = self.factors[s.factor].word_length(s.word)
            if n is None:
                return None
            total += n
        return total


def free_product_oracle(factors: Sequence[GroupOracle]) -> FreeProductOracle:
    return FreeProductOracle(factors)


# ---------------------------------------------------------------------------
# ball closure


class BallClosureOracle(GroupOracle):
    """Coset graph of the free ball of a given radius, closed under relators.

    Vertices start as the reduced words of length at most ``radius``.  Tracing
    every relator at every vertex forces identifications and missing edges;
    this repeats to a fixed point.  Every identification is a consequence of
    the relators, so TRIVIAL verdicts are always sound.  If the graph ends up
    complete (every vertex has every edge) it is the Cayley graph of a finite
    group and the oracle is CERTIFIED.
    """

    backend = Backend.BALL_CLOSURE

    def __init__(self, p: Presentation, radius: int, work_cap: int = 10**8):
        if radius < 1:
            raise ValueError("radius must be >= 1")
        self.presentation = p
        self.generators = p.generators
        self.radius = radius
        self.work_cap = work_cap
        self.work = 0
        alphabet = p.alphabet
        self._letters = alphabet.letters
        words = reduced_words_up_to(alphabet, radius)
        self._words = words
        index = {w: i for i, w in enumerate(words)}
        self._parent = list(range(len(words)))
        self._table: list[dict[str, int]] = [dict() for _ in words]
        for i, w in enumerate(words):
            if len(w) < radius:
                for x in self._letters:
                    if w and w[-1] == x.swapcase():
                        continue
                    j = index[w + x]
                    self._table[i][x] = j
                    self._table[j][x.swapcase()] = i
        self._close()
        live = [v for v in range(len(words)) if self._find(v) == v]
        self.complete = all(len(self._table[v]) == len(self._letters) and
                            all(x in self._table[v] for x in self._letters) for v in live)
        self.size = len(live)
        if self.complete:
            self.certificate = Certificate.CERTIFIED
        else:
            self.certificate = Certificate.BEST_EFFORT
            self.caveats = ("NONTRIVIAL verdicts rest on a truncated coset graph",)
        self._margin_ok = 2 * radius >= p.max_relator_length

    # union-find with lazy edge resolution
    def _find(self, v: int) -> int:
        parent = self._parent
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def _merge(self, a: int, b: int) -> None:
        queue = [(a, b)]
        table = self._table
        while queue:
            a, b = queue.pop()
            a, b = self._find(a), self._find(b)
            if a == b:
                continue
            if b < a:
                a, b = b, a
            self._parent[b] = a
            self._changed += 1
            row_a = table[a]
            for x, c in table[b].items():
                c = self._find(c)
                d = row_a.get(x)
                if d is None:
                    row_a[x] = c
                else:
                    d = self._find(d)
                    if d != c:
                        queue.append((d, c))
            table[b] = {}

    def _edge(self, v: int, x: str) -> int | None:
        t = self._table[v].get(x)
        return None if t is None else self._find(t)

    def _scan(self, v: int, r: str) -> None:
        n = len(r)
        f, i = v, 0
        while i < n:
            nxt = self._edge(f, r[i])
            if nxt is None:
                break
            f, i = nxt, i + 1
        if i == n:
            self.work += n
            if f != v:
                self._merge(f, v)
            return
        b, j = v, n
        while j > i:
            prv = self._edge(b, r[j - 1].swapcase())
            if prv is None:
                break
            b, j = prv, j - 1
        self.work += i + (n - j)
        if j == i:
            if f != b:
                self._merge(f, b)
        elif j == i + 1:
            x = r[i]
            self._table[f][x] = b
            self._changed += 1
            back = self._edge(b, x.swapcase())
            if back is None:
                self._table[b][x.swapcase()] = f
            elif back != f:
                self._merge(back, f)

    def _close(self) -> None:
        rels = self.presentation.relators
        while True:
            self._changed = 0
            for v in range(len(self._words)):
                for r in rels:
                    if self._find(v) != v:
                        break
                    self._scan(v, r)
                    if self.work > self.work_cap:
                        raise WorkCapExceeded(
                            f"ball closure exceeded work cap {self.work_cap} at radius {self.radius}")
            if not self._changed:
                return

    def locate(self, w: str) -> int | None:
        v = self._find(0)
        for x in w:
            v = self._edge(v, x)
            if v is None:
                return None
        return v

    def representative(self, v: int) -> str:
        return self._words[self._find(v)]

    @property
    def has_keys(self) -> bool:
        return True

    def key(self, w: str) -> int | None:
        return self.locate(free_reduce(w))

    def is_trivial(self, w: str) -> Verdict:
        w = free_reduce(w)
        n = len(w)
        f, i = self._find(0), 0
        while i < n:
            nxt = self._edge(f, w[i])
            if nxt is None:
                break
            f, i = nxt, i + 1
        b, j = self._find(0), n
        while j > i:
            prv = self._edge(b, w[j - 1].swapcase())
            if prv is None:
                break
            b, j = prv, j - 1
        if j > i:
            return Verdict.UNKNOWN
        if f == b:
            return Verdict.TRIVIAL
        if self.complete or self._margin_ok:
            return Verdict.NONTRIVIAL
        return Verdict.UNKNOWN

    def elements_within(self, d: int) -> list[str]:
        """Class representatives (shortlex-least ball word) of distance at most ``d``."""
        seen: dict[int, str] = {}
        for i, w in enumerate(self._words):
            if len(w) > d:
                break
            seen.setdefault(self._find(i), w)
        return list(seen.values())


def ball_closure_oracle(p: Presentation, radius: int, work_cap: int = 10**8) -> BallClosureOracle:
    return BallClosureOracle(p, radius, work_cap)


def _table_from_closure(c: BallClosureOracle) -> FiniteTableOracle:
    live = sorted({c._find(v) for v in range(len(c._words))})
    # renumber so the identity is 0 and order follows shortlex representatives
    order = sorted(live, key=lambda v: c.alphabet.key(c._words[v]))
    ren = {v: i for i, v in enumerate(order)}
    table = [{x: ren[c._edge(v, x)] for x in c._letters} for v in order]
    return FiniteTableOracle(c.generators, table)


def finite_oracle(p: Presentation, work_cap: int = 10**7, max_radius: int = 64) -> FiniteTableOracle:
    """Regular representation of a finite group, found by growing the ball closure."""
    r = max(1, (p.max_relator_length + 1) // 2)
    while r <= max_radius:
        c = BallClosureOracle(p, r, work_cap)
        if c.complete:
            return _table_from_closure(c)
        r += 1
    raise WorkCapExceeded(f"closure did not complete by radius {max_radius}; group may be infinite")


def free_ball_size(rank: int, radius: int) -> int:
    if rank == 0:
        return 1
    if rank == 1:
        return 2 * radius + 1
    return 1 + 2 * rank * ((2 * rank - 1) ** radius - 1) // (2 * rank - 2)


def factor_presentations(p: Presentation) -> list[Presentation]:
    """Free factors: generators linked through a common relator share a factor.

    Generators that occur in no relator are collected into one free factor.
    """
    parent = {g: g for g in p.generators}

    def find(g: str) -> str:
        while parent[g] != g:
            parent[g] = parent[parent[g]]
            g = parent[g]
        return g

    for r in p.relators:
        letters = sorted({x.lower() for x in r})
        for x in letters[1:]:
            parent[find(x)] = find(letters[0])
    used = {x.lower() for r in p.relators for x in r}
    groups: dict[str, list[str]] = {}
    free: list[str] = []
    for g in p.generators:
        if g in used:
            groups.setdefault(find(g), []).append(g)
        else:
            free.append(g)
    out = [Presentation(tuple(gens), tuple(r for r in p.relators if r[0].lower() in gens))
           for gens in groups.values()]
    if free:
        out.append(Presentation(tuple(free), ()))
    return out


def auto_oracle(p: Presentation, closure_radius: int = 3, work_cap: int = 10**7,
                vertex_cap: int = 200_000) -> GroupOracle:
    """Strongest available backend.

    Tried in order: free group, abelian normal form, free product of the
    connected factors, finite table, certified Dehn, truncated closure.  The
    closure radius is raised to half the longest relator when the free ball
    of that radius has at most ``vertex_cap`` words.
    """
    if not p.relators:
        return FreeOracle(p.generators)
    if len(p.generators) > 1:
        try:
            return abelian_oracle(p)
        except ValueError:
            pass
    factors = factor_presentations(p)
    if len(factors) > 1:
        return FreeProductOracle([auto_oracle(f, closure_radius, work_cap, vertex_cap) for f in factors],
                                 order=p.generators)
    r = closure_radius
    half = (p.max_relator_length + 1) // 2
    if half > r and free_ball_size(len(p.generators), half) <= vertex_cap:
        r = half
    c = BallClosureOracle(p, r, work_cap)
    if c.complete:
        return _table_from_closure(c)
    if dehn_certified(p):
        return DehnOracle(p)
    return c
