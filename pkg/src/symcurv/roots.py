from __future__ import annotations
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
import re
from typing import Sequence, Union
import numpy as np
from .errors import SymcurvError
from .exact import BilinearForm

FAMILIES = ("A", "B", "C", "D", "E", "F", "G")


class InvalidRank(SymcurvError):
    pass


class NotInteger(SymcurvError):
    pass


@dataclass(frozen=True, order=True)
class LieType:
    """A complex simple Lie algebra, e.g. LieType("B", 4). Node numbering follows the
    usual drawings: B_l has alpha_l short, C_l has alpha_l long, F4 has alpha_3, alpha_4
    short, G2 has alpha_1 short, and the E-series puts alpha_2 on the branch."""
    family: str
    rank: int

    def __post_init__(self) -> None:
        fam, l = self.family, self.rank
        if fam not in FAMILIES:
            raise InvalidRank(f"Unknown family '{fam}'")
        minimum = {"A": 1, "B": 2, "C": 3, "D": 4}
        if fam in minimum and l < minimum[fam]:
            raise InvalidRank(f"{fam}{l} is not a valid simple type (needs rank >= {minimum[fam]})")
        if fam == "E" and l not in (6, 7, 8):
            raise InvalidRank(f"E{l} does not exist; use E6, E7 or E8")
        if fam == "F" and l != 4:
            raise InvalidRank("F only exists in rank 4")
        if fam == "G" and l != 2:
            raise InvalidRank("G only exists in rank 2")

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    def __str__(self) -> str:
        return self.name

    @classmethod
    def parse(cls, text: str) -> "LieType":
        match = re.fullmatch(r"\s*([A-Ga-g])\s*(\d+)\s*", text)
        if not match:
            raise InvalidRank(f"Cannot parse Lie type '{text}' (expected e.g. A3, E6, G2)")
        return canonical_type(match.group(1).upper(), int(match.group(2)))[0]


# Low-rank coincidences: native type -> (canonical type, native node -> canonical node).
_ALIASES: dict[tuple[str, int], tuple[tuple[str, int], tuple[int, ...]]] = {
    ("C", 2): (("B", 2), (1, 0)),
    ("D", 3): (("A", 3), (1, 0, 2)),
}


def canonical_type(family: str, rank: int) -> tuple[LieType, tuple[int, ...]]:
    """Resolve C2 -> B2 and D3 -> A3; also return the 0-based node relabelling."""
    alias = _ALIASES.get((family, rank))
    if alias:
        (fam, l), relabel = alias
        return LieType(fam, l), relabel
    return LieType(family, rank), tuple(range(rank))


def all_types(max_rank: int) -> list[LieType]:
    types: list[LieType] = []
    for fam in ("A", "B", "C", "D"):
        start = {"A": 1, "B": 2, "C": 3, "D": 4}[fam]
        types.extend(LieType(fam, l) for l in range(start, max_rank + 1))
    for fam, l in (("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2)):
        if l <= max_rank:
            types.append(LieType(fam, l))
    return types


@dataclass(frozen=True)
class Root:
    coeffs: tuple[int, ...]

    @property
    def height(self) -> int:
        return sum(self.coeffs)

    @property
    def is_positive(self) -> bool:
        return all(c >= 0 for c in self.coeffs) and any(self.coeffs)

    def __neg__(self) -> "Root":
        return Root(tuple(-c for c in self.coeffs))

    def __add__(self, other: "Root") -> "Root":
        return Root(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Root") -> "Root":
        return Root(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def label(self) -> str:
        parts = []
        for idx, c in enumerate(self.coeffs, start=1):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            parts.append(f"{sign}{'' if mag == 1 else mag}a{idx}")
        text = "".join(parts)
        return text[1:] if text.startswith("+") else (text or "0")


RootLike = Union[Root, Sequence[int]]


def _coeffs(r: RootLike) -> tuple[int, ...]:
    return r.coeffs if isinstance(r, Root) else tuple(int(c) for c in r)


def root_sort_key(r: Root) -> tuple:
    """Height ascending, then coefficient vectors lexicographically descending."""
    return (r.height, tuple(-c for c in r.coeffs))


def highest_key(r: Root) -> tuple:
    """Maximal height wins; ties go to the lexicographically largest coefficients."""
    return (r.height, r.coeffs)


def cartan_matrix(t: LieType) -> np.ndarray:
    """Integer Cartan matrix with A[i, j] = 2(alpha_i, alpha_j)/(alpha_j, alpha_j)."""
    l = t.rank
    A = 2 * np.eye(l, dtype=int)
    if t.family in "ABC" or t.family == "F":
        A[range(l - 1), range(1, l)] = -1
        A[range(1, l), range(l - 1)] = -1
    if t.family == "B":
        # alpha_l short
        A[l - 2, l - 1] = -2
    elif t.family == "C":
        # alpha_l long
        A[l - 1, l - 2] = -2
    elif t.family == "D":
        A[range(l - 2), range(1, l - 1)] = -1
        A[range(1, l - 1), range(l - 2)] = -1
        A[l - 3, l - 1] = A[l - 1, l - 3] = -1
    elif t.family == "E":
        # alpha_1 - alpha_3 - alpha_4 - ... - alpha_l, alpha_2 hangs off alpha_4
        chain = [0] + list(range(2, l))
        for a, b in zip(chain, chain[1:]):
            A[a, b] = A[b, a] = -1
        A[1, 3] = A[3, 1] = -1
    elif t.family == "F":
        A[1, 2] = -2
    elif t.family == "G":
        A[0, 1] = -1
        A[1, 0] = -3
    return A


def _neighbours(A: np.ndarray, i: int) -> list[int]:
    return [j for j in range(A.shape[0]) if j != i and A[i, j] != 0]


def relative_lengths(A: np.ndarray) -> list[Fraction]:
    """Squared lengths of simple roots up to one global scalar (alpha_1 set to 1)."""
    l = A.shape[0]
    d: list[Fraction | None] = [None] * l
    d[0] = Fraction(1)
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in _neighbours(A, i):
            if d[j] is None:
                d[j] = Fraction(int(A[j, i]), int(A[i, j])) * d[i]
                queue.append(j)
    if any(x is None for x in d):
        raise InvalidRank("Dynkin diagram is not connected")
    return [x for x in d if x is not None]


def _chain_enumeration(A: np.ndarray) -> list[Root]:
    l = A.shape[0]
    units = [tuple(int(i == j) for j in range(l)) for i in range(l)]
    known: set[tuple[int, ...]] = set(units)
    level = list(units)
    found = list(units)
    while level:
        nxt: list[tuple[int, ...]] = []
        for beta in level:
            for i in range(l):
                p = 0
                cur = list(beta)
                while True:
                    cur[i] -= 1
                    if tuple(cur) in known:
                        p += 1
                    else:
                        break
                a_beta_i = sum(beta[k] * int(A[k, i]) for k in range(l))
                if p - a_beta_i > 0:
                    new = tuple(c + (k == i) for k, c in enumerate(beta))
                    if new not in known:
                        known.add(new)
                        nxt.append(new)
        found.extend(nxt)
        level = nxt
    return sorted((Root(c) for c in found), key=root_sort_key)


def enumerate_positive_roots(t: LieType) -> list[Root]:
    return list(root_system(t).positive_roots)


def killing_gram(t: LieType) -> BilinearForm:
    return root_system(t).gram


@dataclass(frozen=True)
class RootSystem:
    lie_type: LieType
    cartan: tuple[tuple[int, ...], ...]
    gram: BilinearForm
    positive_roots: tuple[Root, ...]
    highest: Root
    positive_set: frozenset[Root] = field(default=frozenset(), repr=False, compare=False)

    @property
    def rank(self) -> int:
        return self.lie_type.rank

    def simple_root(self, i: int) -> Root:
        """0-based simple root alpha_{i+1}."""
        return Root(tuple(int(i == j) for j in range(self.rank)))

    def roots(self) -> list[Root]:
        return list(self.positive_roots) + [-r for r in self.positive_roots]

    def inner(self, a: RootLike, b: RootLike) -> Fraction:
        return self.gram(_coeffs(a), _coeffs(b))

    def sq_length(self, a: RootLike) -> Fraction:
        return self.inner(a, a)

    def cartan_integer(self, beta: RootLike, alpha: RootLike) -> int:
        value = 2 * self.inner(beta, alpha) / self.inner(alpha, alpha)
        if value.denominator != 1:
            raise NotInteger(f"2(beta, alpha)/(alpha, alpha) = {value} is not an integer")
        return int(value)

    def root_sign(self, v: RootLike) -> int:
        c = _coeffs(v)
        if Root(c) in self.positive_set:
            return 1
        if Root(tuple(-x for x in c)) in self.positive_set:
            return -1
        return 0

    def is_root(self, v: RootLike) -> bool:
        return self.root_sign(v) != 0

    def sq_length_values(self) -> list[Fraction]:
        return sorted({self.sq_length(r) for r in self.positive_roots})

    def max_sq_length(self) -> Fraction:
        return self.sq_length_values()[-1]

    @cached_property
    def root_matrix(self) -> np.ndarray:
        """Positive roots as the rows of an integer object array."""
        return np.array([r.coeffs for r in self.positive_roots], dtype=object)


@lru_cache(maxsize=None)
def root_system(t: LieType) -> RootSystem:
    A = cartan_matrix(t)
    positive = _chain_enumeration(A)
    rel = relative_lengths(A)
    l = t.rank
    rel_gram = [[Fraction(int(A[i, j])) * rel[j] / 2 for j in range(l)] for i in range(l)]
    # fix the scale so that (a1, a1) * sum_beta a_{beta a1}^2 = 2
    s = sum(sum(r.coeffs[k] * int(A[k, 0]) for k in range(l)) ** 2 for r in positive)
    scale = Fraction(2, s) / rel_gram[0][0]
    gram = BilinearForm.from_rows([[x * scale for x in row] for row in rel_gram])
    return RootSystem(
        lie_type=t,
        cartan=tuple(tuple(int(x) for x in row) for row in A),
        gram=gram,
        positive_roots=tuple(positive),
        highest=max(positive, key=highest_key),
        positive_set=frozenset(positive),
    )


def inner(rs: RootSystem, a: RootLike, b: RootLike) -> Fraction:
    return rs.inner(a, b)


def cartan_integer(rs: RootSystem, beta: RootLike, alpha: RootLike) -> int:
    return rs.cartan_integer(beta, alpha)


def is_root(rs: RootSystem, v: RootLike) -> bool:
    return rs.is_root(v)


def highest_root(rs: RootSystem) -> Root:
    return rs.highest


def expected_root_count(t: LieType) -> int:
    l = t.rank
    closed = {
        "A": l * (l + 1) // 2,
        "B": l * l,
        "C": l * l,
        "D": l * (l - 1),
    }
    fixed = {"E6": 36, "E7": 63, "E8": 120, "F4": 24, "G2": 6}
    return closed.get(t.family) or fixed[t.name]


def epsilon_embedding(t: LieType) -> tuple[Fraction, list[tuple[int, ...]]]:
    """Classical simple roots in orthogonal epsilon-coordinates plus |eps_j|^2.

    Independent of the Cartan-matrix construction; used to cross-check it.
    """
    l = t.rank

    def e(i: int, dim: int) -> list[int]:
        return [int(k == i) for k in range(dim)]

    if t.family == "A":
        dim, eps_sq = l + 1, Fraction(1, 2 * (l + 1))
    elif t.family == "B":
        dim, eps_sq = l, Fraction(1, 2 * (2 * l - 1))
    elif t.family == "C":
        dim, eps_sq = l, Fraction(1, 4 * (l + 1))
    elif t.family == "D":
        dim, eps_sq = l, Fraction(1, 4 * (l - 1))
    else:
        raise InvalidRank(f"No epsilon-coordinates for exceptional type {t.name}")
    simple = [tuple(a - b for a, b in zip(e(j, dim), e(j + 1, dim))) for j in range(l - 1)]
    if t.family == "A":
        simple.append(tuple(a - b for a, b in zip(e(l - 1, dim), e(l, dim))))
    elif t.family == "B":
        simple.append(tuple(e(l - 1, dim)))
    elif t.family == "C":
        simple.append(tuple(2 * x for x in e(l - 1, dim)))
    else:
        simple.append(tuple(a + b for a, b in zip(e(l - 2, dim), e(l - 1, dim))))
    return eps_sq, simple
