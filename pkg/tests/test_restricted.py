from __future__ import annotations
from fractions import Fraction as F
import pytest
from symcurv.catalog import CaseTag, RootPartition, SweepLimits, Unsupported, catalog, partition_roots, resolve
from symcurv.errors import ConsistencyError
from symcurv.expectations import ORACLE_MAX_RANK, oracle_entries
from symcurv.restricted import (
    WrongCase,
    brute_force_bound,
    max_restricted_sq_length,
    restricted_sq_length,
    strongly_orthogonal,
    strongly_orthogonal_sequence,
    vector_part_basis,
)
from symcurv.roots import LieType, Root, root_system

FULL_CATALOG = catalog()
INNER_ENTRIES = [s for s in FULL_CATALOG if s.case_tag is CaseTag.INNER]


def test_greedy_sequence_for_g():
    spec = resolve("G")
    rs = spec.root_system()
    noncompact = [Root(c) for c in ((0, 1), (1, 1), (2, 1), (3, 1))]
    gammas = strongly_orthogonal_sequence(rs, noncompact)
    assert [g.coeffs for g in gammas] == [(3, 1), (1, 1)]
    assert rs.inner(*gammas) == 0
    assert strongly_orthogonal(rs, Root((3, 1)), Root((1, 1)))
    assert not strongly_orthogonal(rs, Root((3, 1)), Root((2, 1)))


def test_greedy_sequence_for_ci2():
    result = max_restricted_sq_length(resolve("CI", {"n": 2}))
    assert [g.coeffs for g in result.gammas] == [(1, 2), (1, 0)]
    assert result.computed_rank == 2
    assert result.max_sq_length == F(1, 3)


def test_greedy_sequence_breaks_height_ties():
    rs = root_system(LieType("A", 3))
    expected = [Root((1, 0, 0)), Root((0, 0, 1))]
    assert strongly_orthogonal_sequence(rs, [Root((1, 0, 0)), Root((0, 0, 1))]) == expected
    assert strongly_orthogonal_sequence(rs, [Root((0, 0, 1)), Root((1, 0, 0))]) == expected


def test_inner_case_needs_unique_highest_noncompact(monkeypatch):
    tied = RootPartition(moved=(), noncompact=(Root((1, 0, 0)), Root((0, 0, 1))), compact=())
    monkeypatch.setattr("symcurv.restricted.partition_roots", lambda rs, datum: tied)
    with pytest.raises(ConsistencyError, match="not unique"):
        max_restricted_sq_length.__wrapped__(resolve("AIII", {"p": 1, "q": 3}))


def test_vector_part_basis():
    aii = resolve("AII", {"n": 2})
    assert vector_part_basis(aii.root_system(), aii.datum) == [(1, 0, -1)]
    bdi = resolve("BDI", {"p": 1, "q": 7})
    assert vector_part_basis(bdi.root_system(), bdi.datum) == [(0, 0, 1, -1)]
    eiv = resolve("EIV")
    assert vector_part_basis(eiv.root_system(), eiv.datum) == [(1, 0, 0, 0, 0, -1), (0, 0, 1, 0, -1, 0)]


def test_vector_part_needs_outer_case():
    spec = resolve("CI", {"n": 3})
    with pytest.raises(WrongCase):
        vector_part_basis(spec.root_system(), spec.datum)


def test_outer_projection_matches_half_formula():
    spec = resolve("AII", {"n": 2})
    rs = spec.root_system()
    basis = vector_part_basis(rs, spec.datum)
    assert restricted_sq_length(rs, Root((1, 1, 0)), (), basis) == F(1, 8)
    assert restricted_sq_length(rs, Root((0, 1, 0)), (), basis) == 0


def test_pure_outer_results():
    aii = max_restricted_sq_length(resolve("AII", {"n": 2}))
    assert aii.max_sq_length == F(1, 8)
    assert aii.argmax_root.coeffs == (1, 1, 0)
    assert aii.computed_rank == 1
    eiv = max_restricted_sq_length(resolve("EIV"))
    assert eiv.max_sq_length == F(1, 24)
    assert eiv.argmax_root.coeffs == (1, 1, 2, 2, 1, 1)
    assert eiv.computed_rank == 2


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_d_family_highest_moved_root(n):
    spec = resolve("BDI", {"p": 1, "q": 2 * n + 1})
    result = max_restricted_sq_length(spec)
    l = spec.lie_type.rank
    if spec.lie_type.family == "D":
        assert result.argmax_root.coeffs == (1,) * (l - 1) + (0,)
    assert result.max_sq_length == spec.closed_form_bound


def test_bdi_one_five_matches_aii_two():
    assert max_restricted_sq_length(resolve("BDI", {"p": 1, "q": 5})).max_sq_length == F(1, 8)


def test_stated_rules_have_no_computed_rank():
    mixed = max_restricted_sq_length(resolve("BDI", {"p": 3, "q": 7}))
    assert mixed.max_sq_length == F(1, 8)
    assert mixed.computed_rank is None
    ei = max_restricted_sq_length(resolve("EI"))
    assert ei.max_sq_length == F(1, 12)
    assert ei.computed_rank is None


def test_split_and_group_use_highest_root():
    ai = max_restricted_sq_length(resolve("AI", {"n": 5}))
    assert ai.max_sq_length == F(1, 5)
    assert ai.computed_rank == 4
    group = max_restricted_sq_length(resolve("GROUP(B3)"))
    assert group.max_sq_length == F(1, 5)
    assert group.argmax_root.coeffs == (1, 2, 2)


@pytest.mark.parametrize("spec", FULL_CATALOG, ids=lambda s: s.display)
def test_bound_matches_closed_form(spec):
    assert max_restricted_sq_length(spec).max_sq_length == spec.closed_form_bound


@pytest.mark.parametrize("spec", oracle_entries(SweepLimits()), ids=lambda s: s.display)
def test_brute_force_oracle(spec):
    assert brute_force_bound(spec) == max_restricted_sq_length(spec).max_sq_length


def test_brute_force_refuses_stated_rules():
    with pytest.raises(Unsupported):
        brute_force_bound(resolve("EII"))


def test_result_to_dict():
    data = max_restricted_sq_length(resolve("G")).to_dict()
    assert data == {
        "gammas": [[3, 1], [1, 1]],
        "vector_basis": [],
        "bound": "1/4",
        "argmax": [3, 1],
        "rank": 2,
    }


def test_oracle_covers_groups_to_rank_ten():
    groups = {s.lie_type.name for s in oracle_entries(SweepLimits()) if s.is_group}
    assert {"A10", "B9", "C10", "D10", "E8", "F4", "G2"} <= groups
    assert max(s.lie_type.rank for s in oracle_entries(SweepLimits())) == ORACLE_MAX_RANK


@pytest.mark.parametrize("spec", INNER_ENTRIES, ids=lambda s: s.display)
def test_inner_grading_is_additive(spec):
    rs = spec.root_system()
    noncompact = set(partition_roots(rs, spec.datum).noncompact)
    roots = rs.roots()
    for a in roots:
        for b in roots:
            if not rs.is_root(a + b):
                continue
            count = (a in noncompact) + (b in noncompact) + (a + b in noncompact)
            assert count in (0, 2), (a.label(), b.label())


@pytest.mark.parametrize("spec", INNER_ENTRIES, ids=lambda s: s.display)
def test_inner_gammas_are_strongly_orthogonal(spec):
    rs = spec.root_system()
    gammas = max_restricted_sq_length(spec).gammas
    assert len(gammas) == spec.meta_rank
    for i, a in enumerate(gammas):
        for b in gammas[i + 1:]:
            assert not rs.is_root(a + b) and not rs.is_root(a - b)
            assert rs.inner(a, b) == 0
