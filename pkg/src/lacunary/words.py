"""Free-group words over single-letter generators.

A word is a plain ``str``: lowercase letters are generators, uppercase letters
their inverses.  The empty string is the identity and renders as ``"1"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count as _count
from string import ascii_lowercase
from typing import Iterable, Iterator

IDENTITY_SYMBOL = "1"


def inverse_letter(x: str) -> str:
    return x.swapcase()


def inverse(w: str) -> str:
    """Formal inverse: reverse and swap case."""
    return w[::-1].swapcase()


def free_reduce(w: str) -> str:
    """Cancel adjacent ``xX`` / ``Xx`` pairs until none remain."""
    out: list[str] = []
    for x in w:
        if out and out[-1] == x.swapcase():
            out.pop()
        else:
            out.append(x)
    return "".join(out)


def is_reduced(w: str) -> bool:
    return all(w[i] != w[i + 1].swapcase() for i in range(len(w) - 1))


def is_cyclically_reduced(w: str) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != w[-1].swapcase())


def cyclic_reduce(w: str) -> str:
    """Return a cyclically reduced conjugate of ``w``."""
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == w[j - 1].swapcase():
        i += 1
        j -= 1
    return w[i:j]


def cyclic_shifts(w: str) -> list[str]:
    return [w[i:] + w[:i] for i in range(len(w))] if w else [""]


def power(w: str, n: int) -> str:
    """``w**n`` as a (not necessarily reduced) word; negative ``n`` uses the inverse."""
    return w * n if n >= 0 else inverse(w) * (-n)


def symmetrize(relators: Iterable[str]) -> frozenset[str]:
    """Close a set of cyclically reduced words under cyclic shift and inversion."""
    out: set[str] = set()
    for r in relators:
        if not r:
            raise ValueError("empty relator")
        if not is_cyclically_reduced(r):
            raise ValueError(f"relator {r!r} is not cyclically reduced")
        out.update(cyclic_shifts(r))
        out.update(cyclic_shifts(inverse(r)))
    return frozenset(out)


def is_symmetric(relators: Iterable[str]) -> bool:
    rs = set(relators)
    # closure under one-step rotation and inversion generates the full closure
    return all(r and is_cyclically_reduced(r) and r[1:] + r[0] in rs and inverse(r) in rs for r in rs)


def render(w: str) -> str:
    return w if w else IDENTITY_SYMBOL


def parse_word(text: str, generators: Iterable[str] | None = None) -> str:
    """Parse ASCII notation.  ``"1"`` (or blank) is the identity; whitespace is ignored."""
    s = "".join(text.split())
    if s in ("", IDENTITY_SYMBOL):
        return ""
    if not s.isalpha() or not s.isascii():
        raise ValueError(f"bad word {text!r}")
    if generators is not None:
        gens = set(generators)
        for x in s:
            if x.lower() not in gens:
                raise ValueError(f"letter {x!r} not in alphabet {sorted(gens)}")
    return s


def shortlex_key(w: str) -> tuple[int, str]:
    # ASCII puts every uppercase letter before every lowercase one, which is
    # exactly x1^-1 < ... < xn^-1 < x1 < ... < xn for letters named a, b, ...
    return (len(w), w)


@dataclass(frozen=True)
class OrderedAlphabet:
    """Generators ``a, b, ...`` with the letter order A < B < ... < a < b < ..."""

    generators: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        if len(self.generators) > 26:
            raise ValueError("at most 26 generators")
        for g in self.generators:
            if len(g) != 1 or g not in ascii_lowercase:
                raise ValueError(f"generator {g!r} must be a lowercase letter")
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("duplicate generator")

    @classmethod
    def of_size(cls, n: int) -> "OrderedAlphabet":
        return cls(tuple(ascii_lowercase[:n]))

    @property
    def letters(self) -> tuple[str, ...]:
        """Signed letters in increasing order."""
        return tuple(g.upper() for g in self.generators) + self.generators

    def rank(self, x: str) -> int:
        return self.letters.index(x)

    def key(self, w: str) -> tuple[int, tuple[int, ...]]:
        """Shortlex key under this alphabet's letter order."""
        order = {x: i for i, x in enumerate(self.letters)}
        return (len(w), tuple(order[x] for x in w))

    def __contains__(self, w: object) -> bool:
        return isinstance(w, str) and all(x.lower() in self.generators for x in w)


def iter_reduced_words(alphabet: OrderedAlphabet, min_length: int = 1) -> Iterator[str]:
    """Reduced words in shortlex order, starting at ``min_length``."""
    letters = alphabet.letters
    if not letters:
        if min_length == 0:
            yield ""
        return
    for n in _count(min_length):
        layer = [""]
        for _ in range(n):
            layer = [w + x for w in layer for x in letters if not w or w[-1] != x.swapcase()]
        yield from layer


def reduced_words_up_to(alphabet: OrderedAlphabet, length: int) -> list[str]:
    """All reduced words of length at most ``length``, identity first, shortlex order."""
    out = [""]
    layer = [""]
    for _ in range(length):
        layer = [w + x for w in layer for x in alphabet.letters if not w or w[-1] != x.swapcase()]
        out.extend(layer)
    return out


def enumerate_reduced_words(alphabet: OrderedAlphabet, count: int) -> list[str]:
    """First ``count`` non-empty reduced words in shortlex order."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if not alphabet.generators:
        raise ValueError("empty alphabet has no non-empty words")
    it = iter_reduced_words(alphabet, 1)
    return [next(it) for _ in range(count)]


def diagonal_index_pairs(count: int, distinct: bool = False) -> list[tuple[int, int]]:
    """0-based rank pairs ordered by (i + j, i); ``distinct`` drops pairs with i == j."""
    out: list[tuple[int, int]] = []
    s = 0
    while len(out) < count:
        for i in range(s + 1):
            if distinct and i == s - i:
                continue
            out.append((i, s - i))
            if len(out) == count:
                break
        s += 1
    return out


def enumerate_pairs(alphabet: OrderedAlphabet, count: int, distinct: bool = False) -> list[tuple[str, str]]:
    """First ``count`` pairs of non-empty reduced words in Cantor-diagonal order."""
    if count < 1:
        raise ValueError("count must be >= 1")
    idx = diagonal_index_pairs(count, distinct)
    need = max(max(i, j) for i, j in idx) + 1
    words = enumerate_reduced_words(alphabet, need)
    return [(words[i], words[j]) for i, j in idx]
