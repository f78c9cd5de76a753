from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from fractions import Fraction
from typing import Any
import pandas as pd
from .catalog import (
    FAMILY_LIBRARY,
    PARAMETRIC_FAMILIES,
    CaseTag,
    InvalidParams,
    SpaceSpec,
    SweepLimits,
    catalog,
    family_entries,
    partition_roots,
)
from .errors import ConsistencyError
from .exact import render
from .restricted import RestrictedRootResult, max_restricted_sq_length
from .roots import Root

NOT_COMPUTED = "NOT_COMPUTED"
TYPE_I_RICCI = Fraction(1, 2)
GROUP_RICCI = Fraction(1, 4)

PROVENANCE = {
    CaseTag.INNER: "inner: highest noncompact root",
    CaseTag.SPLIT_AI: "split: full root length",
    CaseTag.PURE_OUTER: "outer: half of (alpha - theta0 alpha)",
    CaseTag.MIXED: "mixed: long-root length (stated, not derived)",
    CaseTag.EQUAL_LENGTH_RULE: "equal-length rule (stated, not derived)",
    CaseTag.GROUP_MANIFOLD: "group manifold: highest root",
}


class Criterion(str, Enum):
    CONSERVATIVE = "conservative"
    RELAXED = "relaxed"

    @property
    def c_sq(self) -> Fraction:
        """Square of c in b >= c * a; 4 for b >= 2a, 2 for b >= sqrt(2) a."""
        return Fraction(4) if self is Criterion.CONSERVATIVE else Fraction(2)

    @property
    def rule(self) -> str:
        return "b >= 2a" if self is Criterion.CONSERVATIVE else "b >= sqrt(2)a"


@dataclass(frozen=True)
class SampsonVerdict:
    criterion: Criterion
    a_sq: Fraction
    b_sq: Fraction
    passes: bool
    margin: Fraction

    def to_dict(self) -> dict[str, Any]:
        return {
            "criterion": self.criterion.value,
            "rule": self.criterion.rule,
            "a_sq": render(self.a_sq),
            "b_sq": render(self.b_sq),
            "passes": self.passes,
            "margin": render(self.margin),
        }


@dataclass(frozen=True)
class CurvatureReport:
    """Compact-type curvature data; the noncompact dual has K in [-d, 0]."""
    space: SpaceSpec
    upper_bound: Fraction
    lower_bound: Fraction | str
    ricci: Fraction
    rank: int
    dim: int
    notes: tuple[str, ...]
    result: RestrictedRootResult

    @property
    def dual_curvature(self) -> tuple[Fraction, Fraction]:
        return -self.upper_bound, Fraction(0)

    @property
    def dual_ricci(self) -> Fraction:
        return -self.ricci

    def to_dict(self) -> dict[str, Any]:
        verdicts = {c.value: sampson_check(self, c) for c in Criterion}
        low, high = self.dual_curvature
        return {
            "space": self.space.display,
            "space_name": self.space.space_name,
            "spec": self.space.to_dict(),
            "bound": render(self.upper_bound),
            "bound_formula": self.space.bound_formula,
            "lower_bound": self.lower_bound if isinstance(self.lower_bound, str) else render(self.lower_bound),
            "ricci": render(self.ricci),
            "rank": self.rank,
            "dim": self.dim,
            "dual": {"curvature": [render(low), render(high)], "ricci": render(self.dual_ricci)},
            "sampson": {
                "conservative": verdicts["conservative"].passes,
                "relaxed": verdicts["relaxed"].passes,
                "margins": {name: render(v.margin) for name, v in verdicts.items()},
            },
            "restricted": self.result.to_dict(),
            "notes": list(self.notes),
        }


def _c_eps_sum(l: int, i: int) -> Root:
    """eps_i + eps_{i+1} in C_l simple-root coordinates (1-based i < l)."""
    coeffs = [0] * l
    coeffs[i - 1] = 1
    for j in range(i, l - 1):
        coeffs[j] = 2
    coeffs[l - 1] = 1
    return Root(tuple(coeffs))


def _notes(spec: SpaceSpec, result: RestrictedRootResult) -> list[str]:
    notes = [PROVENANCE[spec.case_tag]]
    if spec.case_tag is CaseTag.INNER:
        gamma = result.gammas[0]
        notes.append(f"highest noncompact root: {gamma.label()} (i={spec.datum.index_i})")
        if spec.label == "CII" and spec.lie_type.family == "C":
            classical = _c_eps_sum(spec.lie_type.rank, spec.datum.index_i)
            if classical != gamma:
                notes.append(
                    f"eps_i+eps_(i+1) = {classical.label()} is lower than the parity-rule root "
                    f"{gamma.label()}; both are short, so the bound is unchanged"
                )
    if spec.case_tag is CaseTag.PURE_OUTER:
        notes.append(f"highest moved root: {result.argmax_root.label()}")
    if spec.meta_rank == 1:
        notes.append("rank 1: lower bound not computed")
    if spec.is_group:
        notes.append("Sampson: b^2 is the group-manifold Ricci constant 1/4, not 1/2")
    return notes


@lru_cache(maxsize=None)
def curvature_report(spec: SpaceSpec) -> CurvatureReport:
    result = max_restricted_sq_length(spec)
    if result.computed_rank is not None and result.computed_rank != spec.meta_rank:
        raise ConsistencyError(
            f"{spec.display}: computed rank {result.computed_rank} != table rank {spec.meta_rank}"
        )
    if spec.case_tag is CaseTag.INNER:
        noncompact = len(partition_roots(spec.root_system(), spec.datum).noncompact)
        if noncompact != spec.meta_dim:
            raise ConsistencyError(f"{spec.display}: |Delta_n| = {noncompact} != dimension {spec.meta_dim}")
    ricci = GROUP_RICCI if spec.is_group else TYPE_I_RICCI
    notes = _notes(spec, result)
    strict, relaxed = (_verdict(result.max_sq_length, ricci, c).passes for c in Criterion)
    if relaxed and not strict:
        notes.append("Sampson: passes b >= sqrt(2)a but not b >= 2a")
    return CurvatureReport(
        space=spec,
        upper_bound=result.max_sq_length,
        lower_bound=Fraction(0) if spec.meta_rank > 1 else NOT_COMPUTED,
        ricci=ricci,
        rank=spec.meta_rank,
        dim=spec.meta_dim,
        notes=tuple(notes),
        result=result,
    )


def _verdict(a_sq: Fraction, b_sq: Fraction, criterion: Criterion) -> SampsonVerdict:
    margin = b_sq - criterion.c_sq * a_sq
    return SampsonVerdict(criterion, a_sq, b_sq, margin >= 0, margin)


def sampson_check(report: CurvatureReport, criterion: Criterion) -> SampsonVerdict:
    """b^2 >= c^2 a^2 with a^2 = d and b^2 the dual Ricci magnitude; equality passes."""
    return _verdict(report.upper_bound, report.ricci, criterion)


@dataclass(frozen=True)
class Threshold:
    family: str
    rank_class: str
    parameter: str
    value: int | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "rank_class": self.rank_class,
            "parameter": self.parameter,
            "value": self.value,
        }


def _rank_classes(family: str) -> list[tuple[str, Any]]:
    if family == "BDI":
        return [
            ("rank 1", lambda s: s.meta_rank == 1),
            ("rank > 1", lambda s: s.meta_rank > 1),
        ]
    return [("all", lambda s: True)]


def sampson_thresholds(family: str, criterion: Criterion,
                       limits: SweepLimits | None = None) -> list[Threshold]:
    """Smallest n (or p+q) from which every entry within limits passes.

    BDI is split into its rank-1 and higher-rank rows. value is None when no
    tail of the sweep passes.
    """
    if family not in PARAMETRIC_FAMILIES:
        raise InvalidParams(f"Thresholds are defined for parametric families only (got {family})")
    entries = family_entries(family, limits)
    parameter = "n" if FAMILY_LIBRARY[family].params == ("n",) else "p+q"
    out: list[Threshold] = []
    for rank_class, member in _rank_classes(family):
        selected = [s for s in entries if member(s)]
        if not selected:
            out.append(Threshold(family, rank_class, parameter, None))
            continue
        frame = pd.DataFrame({
            "key": [sum(s.param_dict.values()) for s in selected],
            "passes": [sampson_check(curvature_report(s), criterion).passes for s in selected],
        })
        by_key = frame.groupby("key")["passes"].all().sort_index()
        value: int | None = None
        for key in reversed(by_key.index.tolist()):
            if not by_key[key]:
                break
            value = int(key)
        out.append(Threshold(family, rank_class, parameter, value))
    return out


def table_row(report: CurvatureReport) -> dict[str, Any]:
    spec = report.space
    if report.upper_bound != spec.closed_form_bound:
        raise ConsistencyError(
            f"{spec.display}: computed bound {report.upper_bound} != {spec.bound_formula} = {spec.closed_form_bound}"
        )
    return {
        "type": spec.label,
        "space": spec.space_name,
        "rank": spec.meta_rank,
        "dimension": spec.meta_dim,
        "bound": render(report.upper_bound),
        "formula": spec.bound_formula,
        "params": spec.param_dict,
        "lie_type": spec.lie_type.name,
    }


def curvature_table(limits: SweepLimits | None = None, include_groups: bool = True) -> list[dict[str, Any]]:
    rows = []
    for spec in catalog(limits):
        if spec.is_group and not include_groups:
            continue
        rows.append(table_row(curvature_report(spec)))
    return rows
