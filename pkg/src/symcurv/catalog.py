from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import re
from typing import Any, Callable, Mapping
import numpy as np
from .errors import ConsistencyError, SymcurvError
from .roots import LieType, Root, RootSystem, all_types, canonical_type, root_system


class InvalidParams(SymcurvError):
    pass


class UnknownLabel(SymcurvError):
    pass


class Unsupported(SymcurvError):
    pass


class CaseTag(str, Enum):
    INNER = "INNER"
    SPLIT_AI = "SPLIT_AI"
    PURE_OUTER = "PURE_OUTER"
    MIXED = "MIXED"
    EQUAL_LENGTH_RULE = "EQUAL_LENGTH_RULE"
    GROUP_MANIFOLD = "GROUP_MANIFOLD"


@dataclass(frozen=True)
class SweepLimits:
    max_n: int = 12
    max_pq: int = 12
    max_rank: int = 8

    def __post_init__(self) -> None:
        for name in ("max_n", "max_pq", "max_rank"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InvalidParams(f"Sweep limit {name} must be a positive integer (got {value!r})")


@dataclass(frozen=True)
class DiagramAutomorphism:
    """Involutive permutation of the Dynkin nodes (0-based)."""
    perm: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)):
            raise ConsistencyError(f"{self.perm} is not a permutation")
        if any(self.perm[self.perm[i]] != i for i in range(n)):
            raise ConsistencyError(f"{self.perm} is not an involution")

    @classmethod
    def identity(cls, rank: int) -> "DiagramAutomorphism":
        return cls(tuple(range(rank)))

    @property
    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.perm))

    def preserves(self, cartan: np.ndarray | tuple) -> bool:
        A = np.asarray(cartan, dtype=int)
        idx = list(self.perm)
        return bool(np.array_equal(A[np.ix_(idx, idx)], A))

    def two_cycles(self) -> list[tuple[int, int]]:
        return [(j, p) for j, p in enumerate(self.perm) if j < p]

    def apply(self, root: Root) -> Root:
        out = [0] * len(self.perm)
        for j, c in enumerate(root.coeffs):
            out[self.perm[j]] = c
        return Root(tuple(out))

    def to_json(self) -> list[int]:
        return [p + 1 for p in self.perm]


@dataclass(frozen=True)
class GantmacherDatum:
    """theta = theta0 * exp(2 pi i ad h_i); index_i is 1-based."""
    theta0: DiagramAutomorphism
    index_i: int | None
    case_tag: CaseTag

    def __post_init__(self) -> None:
        tag, ident, idx = self.case_tag, self.theta0.is_identity, self.index_i
        if tag is CaseTag.INNER and (not ident or idx is None):
            raise ConsistencyError("INNER needs theta0 = 1 and an index i")
        if tag is CaseTag.PURE_OUTER and (ident or idx is not None):
            raise ConsistencyError("PURE_OUTER needs theta0 != 1 and no index")
        if tag is CaseTag.MIXED and (ident or idx is None):
            raise ConsistencyError("MIXED needs theta0 != 1 and an index i")
        if idx is not None and not 1 <= idx <= len(self.theta0.perm):
            raise ConsistencyError(f"index i={idx} out of range")


@dataclass(frozen=True)
class RootPartition:
    moved: tuple[Root, ...]
    noncompact: tuple[Root, ...]
    compact: tuple[Root, ...]

    def noncompact_positive(self) -> list[Root]:
        return [r for r in self.noncompact if r.is_positive]

    def moved_positive(self) -> list[Root]:
        return [r for r in self.moved if r.is_positive]


@dataclass(frozen=True)
class SpaceSpec:
    label: str
    params: tuple[tuple[str, int], ...]
    lie_type: LieType
    datum: GantmacherDatum
    meta_rank: int
    meta_dim: int
    space_name: str = ""
    bound_formula: str = ""
    closed_form_bound: Fraction = field(default=Fraction(0))

    @property
    def param_dict(self) -> dict[str, int]:
        return dict(self.params)

    @property
    def case_tag(self) -> CaseTag:
        return self.datum.case_tag

    @property
    def is_group(self) -> bool:
        return self.case_tag is CaseTag.GROUP_MANIFOLD

    @property
    def display(self) -> str:
        if self.is_group:
            return f"GROUP({self.lie_type.name})"
        if not self.params:
            return self.label
        inside = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.label}({inside})"

    def root_system(self) -> RootSystem:
        return root_system(self.lie_type)

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "params": self.param_dict,
            "lie_type": self.lie_type.name,
            "case_tag": self.case_tag.value,
            "theta0_perm": self.datum.theta0.to_json(),
            "index_i": self.datum.index_i,
            "rank": self.meta_rank,
            "dim": self.meta_dim,
        }


@dataclass(frozen=True)
class FamilyDefinition:
    label: str
    params: tuple[str, ...]
    space: Callable[..., str]
    rank: Callable[..., int]
    dim: Callable[..., int]
    bound_formula: Callable[..., str]
    bound: Callable[..., Fraction]
    # returns (native family, native rank, tag, native theta0 or None, native 1-based index or None)
    build: Callable[..., tuple[str, int, CaseTag, tuple[int, ...] | None, int | None]]
    validate: Callable[..., str | None] = lambda **_: None


def _reversal(l: int) -> tuple[int, ...]:
    return tuple(l - 1 - j for j in range(l))


def _d_swap(l: int) -> tuple[int, ...]:
    perm = list(range(l))
    perm[l - 2], perm[l - 1] = l - 1, l - 2
    return tuple(perm)


E6_SWAP = (5, 1, 4, 3, 2, 0)


def _bdi_build(p: int, q: int):
    total = p + q
    l = total // 2
    fam = "B" if total % 2 else "D"
    if p % 2 == 0:
        return fam, l, CaseTag.INNER, None, p // 2
    if total % 2:
        return fam, l, CaseTag.INNER, None, q // 2
    if p == 1:
        return fam, l, CaseTag.PURE_OUTER, _d_swap(l), None
    return fam, l, CaseTag.MIXED, _d_swap(l), (p - 1) // 2


def _bdi_bound(p: int, q: int) -> Fraction:
    if min(p, q) == 1:
        return Fraction(1, 2 * (p + q - 2))
    return Fraction(1, p + q - 2)


def _need(cond: bool, message: str) -> str | None:
    return None if cond else message


FAMILY_LIBRARY: dict[str, FamilyDefinition] = {
    "AI": FamilyDefinition(
        label="AI",
        params=("n",),
        space=lambda n: f"SU({n})/SO({n})",
        rank=lambda n: n - 1,
        dim=lambda n: (n - 1) * (n + 2) // 2,
        bound_formula=lambda n: "1/n",
        bound=lambda n: Fraction(1, n),
        build=lambda n: ("A", n - 1, CaseTag.SPLIT_AI, _reversal(n - 1), (n // 2) if n % 2 == 0 else None),
        validate=lambda n: _need(n >= 2, "AI needs n >= 2"),
    ),
    "AII": FamilyDefinition(
        label="AII",
        params=("n",),
        space=lambda n: f"SU({2 * n})/Sp({n})",
        rank=lambda n: n - 1,
        dim=lambda n: (n - 1) * (2 * n + 1),
        bound_formula=lambda n: "1/(4n)",
        bound=lambda n: Fraction(1, 4 * n),
        build=lambda n: ("A", 2 * n - 1, CaseTag.PURE_OUTER, _reversal(2 * n - 1), None),
        validate=lambda n: _need(n >= 2, "AII needs n >= 2"),
    ),
    "AIII": FamilyDefinition(
        label="AIII",
        params=("p", "q"),
        space=lambda p, q: f"SU({p + q})/S(U({p})xU({q}))",
        rank=lambda p, q: min(p, q),
        dim=lambda p, q: 2 * p * q,
        bound_formula=lambda p, q: "1/(p+q)",
        bound=lambda p, q: Fraction(1, p + q),
        build=lambda p, q: ("A", p + q - 1, CaseTag.INNER, None, min(p, q)),
        validate=lambda p, q: _need(min(p, q) >= 1, "AIII needs p, q >= 1"),
    ),
    "BDI": FamilyDefinition(
        label="BDI",
        params=("p", "q"),
        space=lambda p, q: f"SO({p + q})/SO({p})xSO({q})",
        rank=lambda p, q: min(p, q),
        dim=lambda p, q: p * q,
        bound_formula=lambda p, q: "1/(2(p+q-2))" if min(p, q) == 1 else "1/(p+q-2)",
        bound=_bdi_bound,
        build=_bdi_build,
        validate=lambda p, q: _need(min(p, q) >= 1 and p + q >= 5, "BDI needs p, q >= 1 and p + q >= 5"),
    ),
    "DIII": FamilyDefinition(
        label="DIII",
        params=("n",),
        space=lambda n: f"SO({2 * n})/U({n})",
        rank=lambda n: n // 2,
        dim=lambda n: n * (n - 1),
        bound_formula=lambda n: "1/(2n-2)",
        bound=lambda n: Fraction(1, 2 * n - 2),
        build=lambda n: ("D", n, CaseTag.INNER, None, n),
        validate=lambda n: _need(n >= 3, "DIII needs n >= 3"),
    ),
    "CI": FamilyDefinition(
        label="CI",
        params=("n",),
        space=lambda n: f"Sp({n})/U({n})",
        rank=lambda n: n,
        dim=lambda n: n * (n + 1),
        bound_formula=lambda n: "1/(n+1)",
        bound=lambda n: Fraction(1, n + 1),
        build=lambda n: ("C", n, CaseTag.INNER, None, n),
        validate=lambda n: _need(n >= 2, "CI needs n >= 2"),
    ),
    "CII": FamilyDefinition(
        label="CII",
        params=("p", "q"),
        space=lambda p, q: f"Sp({p + q})/Sp({p})xSp({q})",
        rank=lambda p, q: min(p, q),
        dim=lambda p, q: 4 * p * q,
        bound_formula=lambda p, q: "1/(2(p+q+1))",
        bound=lambda p, q: Fraction(1, 2 * (p + q + 1)),
        build=lambda p, q: ("C", p + q, CaseTag.INNER, None, min(p, q)),
        validate=lambda p, q: _need(min(p, q) >= 1, "CII needs p, q >= 1"),
    ),
}


def _fixed(label: str, fam: str, l: int, tag: CaseTag, rank: int, dim: int, bound: Fraction,
           theta0: tuple[int, ...] | None = None, index: int | None = None) -> FamilyDefinition:
    text = f"{bound.numerator}/{bound.denominator}"
    return FamilyDefinition(
        label=label,
        params=(),
        space=lambda: "",
        rank=lambda: rank,
        dim=lambda: dim,
        bound_formula=lambda: text,
        bound=lambda: bound,
        build=lambda: (fam, l, tag, theta0, index),
    )


_ELR = CaseTag.EQUAL_LENGTH_RULE
FAMILY_LIBRARY.update({
    "EI": _fixed("EI", "E", 6, _ELR, 6, 42, Fraction(1, 12)),
    "EII": _fixed("EII", "E", 6, _ELR, 4, 40, Fraction(1, 12)),
    "EIII": _fixed("EIII", "E", 6, _ELR, 2, 32, Fraction(1, 12)),
    "EIV": _fixed("EIV", "E", 6, CaseTag.PURE_OUTER, 2, 26, Fraction(1, 24), theta0=E6_SWAP),
    "EV": _fixed("EV", "E", 7, _ELR, 7, 70, Fraction(1, 18)),
    "EVI": _fixed("EVI", "E", 7, _ELR, 4, 64, Fraction(1, 18)),
    "EVII": _fixed("EVII", "E", 7, _ELR, 3, 54, Fraction(1, 18)),
    "EVIII": _fixed("EVIII", "E", 8, _ELR, 8, 128, Fraction(1, 30)),
    "EIX": _fixed("EIX", "E", 8, _ELR, 4, 112, Fraction(1, 30)),
    "FI": _fixed("FI", "F", 4, CaseTag.INNER, 4, 28, Fraction(1, 9), index=1),
    "FII": _fixed("FII", "F", 4, CaseTag.INNER, 1, 16, Fraction(1, 18), index=4),
    "G": _fixed("G", "G", 2, CaseTag.INNER, 2, 8, Fraction(1, 4), index=2),
})

PARAMETRIC_FAMILIES = ("AI", "AII", "AIII", "BDI", "DIII", "CI", "CII")
EXCEPTIONAL_FAMILIES = ("EI", "EII", "EIII", "EIV", "EV", "EVI", "EVII", "EVIII", "EIX", "FI", "FII", "G")
SYMMETRIC_PARAMS = {"AIII", "BDI", "CII"}

# |delta|^2 of each simple type as a closed form in the rank
_GROUP_BOUND: dict[str, tuple[str, Callable[[int], Fraction]]] = {
    "A": ("1/(l+1)", lambda l: Fraction(1, l + 1)),
    "B": ("1/(2l-1)", lambda l: Fraction(1, 2 * l - 1)),
    "C": ("1/(l+1)", lambda l: Fraction(1, l + 1)),
    "D": ("1/(2l-2)", lambda l: Fraction(1, 2 * l - 2)),
    "E": ("", lambda l: {6: Fraction(1, 12), 7: Fraction(1, 18), 8: Fraction(1, 30)}[l]),
    "F": ("", lambda l: Fraction(1, 9)),
    "G": ("", lambda l: Fraction(1, 4)),
}


def available_labels() -> list[str]:
    return list(PARAMETRIC_FAMILIES) + list(EXCEPTIONAL_FAMILIES) + ["GROUP"]


def _canonical_datum(fam: str, l: int, tag: CaseTag, theta0: tuple[int, ...] | None,
                     index: int | None) -> tuple[LieType, GantmacherDatum]:
    t, relabel = canonical_type(fam, l)
    perm = list(range(t.rank))
    if theta0 is not None:
        for j, image in enumerate(theta0):
            perm[relabel[j]] = relabel[image]
    idx = relabel[index - 1] + 1 if index is not None else None
    return t, GantmacherDatum(DiagramAutomorphism(tuple(perm)), idx, tag)


def _check_datum(t: LieType, datum: GantmacherDatum) -> None:
    rs = root_system(t)
    if not datum.theta0.preserves(rs.cartan):
        raise ConsistencyError(f"theta0 {datum.theta0.to_json()} does not preserve the Cartan matrix of {t}")
    if datum.case_tag is CaseTag.INNER:
        m = rs.highest.coeffs[datum.index_i - 1]
        if m not in (1, 2):
            raise ConsistencyError(f"m_{datum.index_i}(delta) = {m} for {t}; expected 1 or 2")


def resolve_group(t: LieType) -> SpaceSpec:
    rs = root_system(t)
    formula, bound = _GROUP_BOUND[t.family]
    value = bound(t.rank)
    return SpaceSpec(
        label="GROUP",
        params=(),
        lie_type=t,
        datum=GantmacherDatum(DiagramAutomorphism.identity(t.rank), None, CaseTag.GROUP_MANIFOLD),
        meta_rank=t.rank,
        meta_dim=t.rank + 2 * len(rs.positive_roots),
        space_name=t.name,
        bound_formula=formula or f"{value.numerator}/{value.denominator}",
        closed_form_bound=value,
    )


def resolve(label: str, params: Mapping[str, int] | None = None) -> SpaceSpec:
    """Validate a family label plus parameters and build its catalog entry."""
    text = label.strip().upper()
    group = re.fullmatch(r"GROUP\(\s*([A-G]\d+)\s*\)", text)
    given = {k: v for k, v in (params or {}).items() if v is not None}
    if group:
        if given:
            raise InvalidParams(f"{text} takes no parameters (got {sorted(given)})")
        return resolve_group(LieType.parse(group.group(1)))
    if text == "GROUP":
        extra = sorted(set(given) - {"type"})
        if extra:
            raise InvalidParams(f"GROUP takes only a Lie type (unexpected: {extra})")
        type_name = given.get("type")
        if not type_name:
            raise InvalidParams("GROUP needs a Lie type, e.g. GROUP(G2)")
        return resolve_group(LieType.parse(str(type_name)))
    definition = FAMILY_LIBRARY.get(text)
    if definition is None:
        raise UnknownLabel(f"Unknown label '{label}'. Available: {', '.join(available_labels())}")

    missing = [name for name in definition.params if name not in given]
    extra = sorted(set(given) - set(definition.params))
    if missing or extra:
        wanted = ", ".join(definition.params) or "no parameters"
        raise InvalidParams(f"{definition.label} takes {wanted} (missing: {missing}, unexpected: {extra})")
    values: dict[str, int] = {}
    for name in definition.params:
        raw = given[name]
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise InvalidParams(f"{definition.label}: parameter {name} must be an integer (got {raw!r})")
        values[name] = raw
    if text in SYMMETRIC_PARAMS:
        p, q = sorted((values["p"], values["q"]))
        values = {"p": p, "q": q}
    problem = definition.validate(**values)
    if problem:
        raise InvalidParams(f"{problem} (got {values})")

    fam, l, tag, theta0, index = definition.build(**values)
    t, datum = _canonical_datum(fam, l, tag, theta0, index)
    _check_datum(t, datum)
    return SpaceSpec(
        label=definition.label,
        params=tuple(values.items()),
        lie_type=t,
        datum=datum,
        meta_rank=definition.rank(**values),
        meta_dim=definition.dim(**values),
        space_name=definition.space(**values),
        bound_formula=definition.bound_formula(**values),
        closed_form_bound=definition.bound(**values),
    )


def _family_params(label: str, limits: SweepLimits) -> list[dict[str, int]]:
    if label in ("AI", "DIII", "CI"):
        start = {"AI": 2, "DIII": 3, "CI": 2}[label]
        return [{"n": n} for n in range(start, limits.max_n + 1)]
    if label == "AII":
        return [{"n": n} for n in range(2, limits.max_n // 2 + 1)]
    lowest = 5 if label == "BDI" else 2
    return [
        {"p": p, "q": total - p}
        for total in range(lowest, limits.max_pq + 1)
        for p in range(1, total // 2 + 1)
    ]


def family_entries(label: str, limits: SweepLimits | None = None) -> list[SpaceSpec]:
    limits = limits or SweepLimits()
    if label in PARAMETRIC_FAMILIES:
        return [resolve(label, params) for params in _family_params(label, limits)]
    if label == "GROUP":
        return [resolve_group(t) for t in all_types(limits.max_rank)]
    return [resolve(label)]


def catalog(limits: SweepLimits | None = None) -> list[SpaceSpec]:
    """Every family entry within limits in table order, followed by the group manifolds."""
    limits = limits or SweepLimits()
    entries: list[SpaceSpec] = []
    for label in available_labels():
        entries.extend(family_entries(label, limits))
    return entries


def theta0_on_root(datum: GantmacherDatum, alpha: Root) -> Root:
    return datum.theta0.apply(alpha)


def partition_roots(rs: RootSystem, datum: GantmacherDatum) -> RootPartition:
    tag = datum.case_tag
    roots = rs.roots()
    if tag is CaseTag.INNER:
        i = datum.index_i - 1
        noncompact = tuple(r for r in roots if r.coeffs[i] % 2)
        compact = tuple(r for r in roots if not r.coeffs[i] % 2)
        return RootPartition(moved=(), noncompact=noncompact, compact=compact)
    if tag is CaseTag.PURE_OUTER:
        moved = tuple(r for r in roots if datum.theta0.apply(r) != r)
        fixed = tuple(r for r in roots if datum.theta0.apply(r) == r)
        return RootPartition(moved=moved, noncompact=(), compact=fixed)
    if tag in (CaseTag.SPLIT_AI, CaseTag.GROUP_MANIFOLD):
        return RootPartition(moved=(), noncompact=tuple(roots), compact=())
    raise Unsupported(f"Root partition is not derivable for case {tag.value}")
