"""Restricted roots: greedy strongly orthogonal sequences, vector parts and projections.

The bound for a symmetric space is the largest squared length of a restricted
root, i.e. of the orthogonal projection of a root onto the span of the
strongly orthogonal sequence plus the vector part of the Cartan subalgebra.
"""
from __future__ import annotations
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Any, Iterable, Sequence
from .catalog import CaseTag, GantmacherDatum, SpaceSpec, Unsupported, partition_roots
from .errors import ConsistencyError, SymcurvError
from .exact import RatVector, as_vector, gram_schmidt, orthogonal_frame, render, sq_length_on_frame
from .roots import Root, RootSystem, highest_key


class WrongCase(SymcurvError):
    pass


@dataclass(frozen=True)
class RestrictedRootResult:
    gammas: tuple[Root, ...]
    vector_basis: tuple[RatVector, ...]
    max_sq_length: Fraction
    argmax_root: Root
    # None when the bound is taken from a stated rule rather than derived
    computed_rank: int | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "gammas": [list(g.coeffs) for g in self.gammas],
            "vector_basis": [[render(x) for x in v] for v in self.vector_basis],
            "bound": render(self.max_sq_length),
            "argmax": list(self.argmax_root.coeffs),
            "rank": self.computed_rank,
        }


def strongly_orthogonal(rs: RootSystem, a: Root, b: Root) -> bool:
    return a != b and not rs.is_root(a + b) and not rs.is_root(a - b)


def strongly_orthogonal_sequence(rs: RootSystem, S: Iterable[Root]) -> list[Root]:
    """Greedy: take the highest remaining root, keep only roots strongly orthogonal to it.

    Ties in height go to the lexicographically largest coefficient vector.
    """
    remaining = sorted(set(S), key=highest_key, reverse=True)
    gammas: list[Root] = []
    while remaining:
        gamma = remaining[0]
        gammas.append(gamma)
        remaining = [r for r in remaining[1:] if strongly_orthogonal(rs, r, gamma)]
    for i, a in enumerate(gammas):
        for b in gammas[i + 1:]:
            if rs.inner(a, b) != 0:
                raise ConsistencyError(f"{a.label()} and {b.label()} are strongly orthogonal but not orthogonal")
    return gammas


def vector_part_basis(rs: RootSystem, datum: GantmacherDatum) -> list[RatVector]:
    """One vector alpha_j - theta0(alpha_j) per 2-cycle (j < pi(j)) of theta0."""
    if datum.case_tag is not CaseTag.PURE_OUTER:
        raise WrongCase(f"Vector part is only built for PURE_OUTER (got {datum.case_tag.value})")
    basis: list[RatVector] = []
    for j, _ in datum.theta0.two_cycles():
        alpha = rs.simple_root(j)
        basis.append(as_vector((alpha - datum.theta0.apply(alpha)).coeffs))
    # raises DependentInput if the vectors are not independent
    gram_schmidt(basis, rs.gram)
    return basis


Frame = Sequence[tuple[RatVector, Fraction]]


def _frame(rs: RootSystem, gammas: Sequence[Root], vector_basis: Sequence[Sequence[object]]) -> Frame:
    """Orthogonal frame of span(gammas + vector_basis); the gammas are already orthogonal."""
    frame = [(g.coeffs, rs.sq_length(g)) for g in gammas]
    if vector_basis:
        combined = [g.coeffs for g in gammas] + [list(v) for v in vector_basis]
        frame += orthogonal_frame(combined, rs.gram)[len(gammas):]
    return frame


def restricted_sq_length(
    rs: RootSystem,
    alpha: Root,
    gammas: Sequence[Root],
    vector_basis: Sequence[Sequence[object]] = (),
) -> Fraction:
    """Squared length of the projection of alpha onto span(gammas + vector_basis)."""
    return sq_length_on_frame(alpha.coeffs, _frame(rs, gammas, vector_basis), rs.gram)


def _outer_value(rs: RootSystem, datum: GantmacherDatum, alpha: Root) -> Fraction:
    return (rs.sq_length(alpha) - rs.inner(alpha, datum.theta0.apply(alpha))) / 2


def _inner_result(spec: SpaceSpec, rs: RootSystem) -> RestrictedRootResult:
    part = partition_roots(rs, spec.datum)
    noncompact = part.noncompact_positive()
    if not noncompact:
        raise ConsistencyError(f"{spec.display}: no noncompact roots")
    ordered = sorted(noncompact, key=highest_key, reverse=True)
    if len(ordered) > 1 and ordered[0].height == ordered[1].height:
        raise ConsistencyError(
            f"{spec.display}: highest noncompact root is not unique ({ordered[0].label()}, {ordered[1].label()})"
        )
    gammas = strongly_orthogonal_sequence(rs, noncompact)
    frame = _frame(rs, gammas, ())
    best = max(sq_length_on_frame(a.coeffs, frame, rs.gram) for a in noncompact)
    top = rs.sq_length(gammas[0])
    if best != top:
        raise ConsistencyError(f"{spec.display}: maximum {best} differs from |gamma_1|^2 = {top}")
    return RestrictedRootResult(tuple(gammas), (), best, gammas[0], len(gammas))


def _outer_result(spec: SpaceSpec, rs: RootSystem) -> RestrictedRootResult:
    datum = spec.datum
    basis = vector_part_basis(rs, datum)
    moved = partition_roots(rs, datum).moved_positive()
    if not moved:
        raise ConsistencyError(f"{spec.display}: theta0 moves no roots")
    frame = _frame(rs, (), basis)
    best: Fraction | None = None
    for alpha in moved:
        value = sq_length_on_frame(alpha.coeffs, frame, rs.gram)
        half = _outer_value(rs, datum, alpha)
        if value != half:
            raise ConsistencyError(
                f"{spec.display}: projection of {alpha.label()} is {value}, expected {half}"
            )
        best = value if best is None else max(best, value)
    top = max(moved, key=highest_key)
    at_top = _outer_value(rs, datum, top)
    if at_top != best:
        raise ConsistencyError(f"{spec.display}: highest moved root gives {at_top}, maximum is {best}")
    return RestrictedRootResult((), tuple(basis), at_top, top, len(basis))


@lru_cache(maxsize=None)
def max_restricted_sq_length(spec: SpaceSpec) -> RestrictedRootResult:
    rs = spec.root_system()
    tag = spec.case_tag
    if tag is CaseTag.INNER:
        return _inner_result(spec, rs)
    if tag is CaseTag.PURE_OUTER:
        return _outer_result(spec, rs)
    if tag in (CaseTag.SPLIT_AI, CaseTag.GROUP_MANIFOLD):
        return RestrictedRootResult((), (), rs.sq_length(rs.highest), rs.highest, rs.rank)
    if tag is CaseTag.MIXED:
        # gamma_1 attains the long-root length; Delta_n itself is not derived
        return RestrictedRootResult((), (), rs.max_sq_length(), rs.highest, None)
    if tag is CaseTag.EQUAL_LENGTH_RULE:
        lengths = rs.sq_length_values()
        if len(lengths) != 1:
            raise ConsistencyError(f"{spec.display}: {rs.lie_type} has {len(lengths)} root lengths")
        return RestrictedRootResult((), (), lengths[0], rs.highest, None)
    raise Unsupported(f"No rule for case {tag.value}")


def brute_force_bound(spec: SpaceSpec) -> Fraction:
    """Exhaustive maximum of projected squared lengths over the relevant roots.

    Shares no code with max_restricted_sq_length beyond the root partition:
    the frame is rebuilt by plain Gram-Schmidt and every root is projected.
    """
    rs = spec.root_system()
    tag = spec.case_tag
    part = partition_roots(rs, spec.datum)
    if tag is CaseTag.INNER:
        basis = [g.coeffs for g in strongly_orthogonal_sequence(rs, part.noncompact_positive())]
        candidates = part.noncompact
    elif tag is CaseTag.PURE_OUTER:
        basis = vector_part_basis(rs, spec.datum)
        candidates = part.moved
    elif tag in (CaseTag.SPLIT_AI, CaseTag.GROUP_MANIFOLD):
        basis = [rs.simple_root(j).coeffs for j in range(rs.rank)]
        candidates = part.noncompact
    else:
        raise Unsupported(f"No exhaustive oracle for case {tag.value}")
    frame = orthogonal_frame(basis, rs.gram)
    return max(sq_length_on_frame(a.coeffs, frame, rs.gram) for a in candidates)
