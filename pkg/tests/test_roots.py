from __future__ import annotations
from fractions import Fraction as F
import pytest
from symcurv.expectations import KILLING_MAX_RANK, killing_defects
from symcurv.roots import (
    InvalidRank,
    LieType,
    Root,
    all_types,
    canonical_type,
    cartan_integer,
    cartan_matrix,
    enumerate_positive_roots,
    epsilon_embedding,
    expected_root_count,
    highest_root,
    inner,
    is_root,
    killing_gram,
    root_system,
)

SMALL_TYPES = all_types(6)


def test_cartan_matrices():
    assert cartan_matrix(LieType("A", 2)).tolist() == [[2, -1], [-1, 2]]
    g2 = cartan_matrix(LieType("G", 2))
    assert g2[0, 1] == -1 and g2[1, 0] == -3
    f4 = cartan_matrix(LieType("F", 4))
    assert f4[1, 2] == -2 and f4[2, 1] == -1


def test_lie_type_validation_and_aliases():
    assert LieType.parse("c2") == LieType("B", 2)
    assert LieType.parse("D3") == LieType("A", 3)
    assert canonical_type("C", 2) == (LieType("B", 2), (1, 0))
    for bad in ("D2", "B1", "E9", "F3", "X4", "A"):
        with pytest.raises(InvalidRank):
            LieType.parse(bad)


def test_g2_roots_and_highest():
    roots = {r.coeffs for r in enumerate_positive_roots(LieType("G", 2))}
    assert roots == {(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2)}
    assert highest_root(root_system(LieType("G", 2))).coeffs == (3, 2)


@pytest.mark.parametrize("l", [1, 2, 5, 9])
def test_highest_root_a(l):
    assert root_system(LieType("A", l)).highest.coeffs == (1,) * l


@pytest.mark.parametrize("l", [2, 3, 6])
def test_highest_root_b(l):
    assert root_system(LieType("B", l)).highest.coeffs == (1,) + (2,) * (l - 1)


@pytest.mark.parametrize("t", all_types(12), ids=str)
def test_root_counts(t):
    assert len(enumerate_positive_roots(t)) == expected_root_count(t)


def test_positive_roots_sorted_by_height():
    roots = enumerate_positive_roots(LieType("B", 3))
    heights = [r.height for r in roots]
    assert heights == sorted(heights)
    assert roots[0].coeffs == (1, 0, 0)


@pytest.mark.parametrize("l", [1, 3, 7])
def test_killing_gram_a(l):
    g = killing_gram(LieType("A", l))
    for j in range(l):
        assert g.entry(j, j) == F(1, l + 1)
    for j in range(l - 1):
        assert g.entry(j, j + 1) == F(-1, 2 * (l + 1))


def test_killing_gram_exceptional():
    g2 = killing_gram(LieType("G", 2))
    assert (g2.entry(0, 0), g2.entry(1, 1), g2.entry(0, 1)) == (F(1, 12), F(1, 4), F(-1, 8))
    f4 = killing_gram(LieType("F", 4))
    assert [f4.entry(j, j) for j in range(4)] == [F(1, 9), F(1, 9), F(1, 18), F(1, 18)]
    for l, length in ((6, F(1, 12)), (7, F(1, 18)), (8, F(1, 30))):
        rs = root_system(LieType("E", l))
        assert rs.sq_length_values() == [length]


@pytest.mark.parametrize("l", [2, 3, 5])
def test_highest_root_length_b(l):
    rs = root_system(LieType("B", l))
    assert inner(rs, rs.highest, rs.highest) == F(1, 2 * l - 1)


def test_g2_inner_products_and_cartan_integers():
    rs = root_system(LieType("G", 2))
    assert inner(rs, Root((3, 1)), Root((1, 1))) == 0
    assert cartan_integer(rs, Root((0, 1)), Root((1, 0))) == -3
    assert cartan_integer(rs, Root((1, 0)), Root((1, 0))) == 2
    assert is_root(rs, (1, 1))
    assert rs.root_sign((-3, -2)) == -1


def test_is_root_rejects_multiples():
    rs = root_system(LieType("A", 2))
    assert all(is_root(rs, rs.simple_root(i)) for i in range(2))
    assert not is_root(rs, (2, 0))
    assert not is_root(rs, (1, -1))


@pytest.mark.parametrize("t", SMALL_TYPES, ids=str)
def test_killing_normalization(t):
    rs = root_system(t)
    for alpha in rs.positive_roots:
        total = sum(rs.cartan_integer(beta, alpha) ** 2 for beta in rs.positive_roots)
        assert rs.sq_length(alpha) * total == 2


@pytest.mark.parametrize("t", SMALL_TYPES, ids=str)
def test_killing_trace_identity(t):
    rs = root_system(t)
    for i in range(rs.rank):
        for j in range(rs.rank):
            ai, aj = rs.simple_root(i), rs.simple_root(j)
            trace = 2 * sum(rs.inner(b, ai) * rs.inner(b, aj) for b in rs.positive_roots)
            assert trace == rs.inner(ai, aj)


@pytest.mark.parametrize("t", all_types(KILLING_MAX_RANK), ids=str)
def test_killing_identities_to_rank_twelve(t):
    assert killing_defects(t) == []


@pytest.mark.parametrize("t", SMALL_TYPES, ids=str)
def test_structure_of_root_system(t):
    rs = root_system(t)
    for i in range(rs.rank):
        for j in range(rs.rank):
            assert rs.cartan[i][j] == 2 * rs.gram.entry(i, j) / rs.gram.entry(j, j)
    lengths = rs.sq_length_values()
    assert len(lengths) == (1 if t.family in "ADE" else 2)
    top = [r for r in rs.positive_roots if r.height == rs.highest.height]
    assert top == [rs.highest]
    for beta in rs.positive_roots:
        if beta.height > 1:
            assert any(rs.root_sign(beta - rs.simple_root(i)) == 1 for i in range(rs.rank))


@pytest.mark.parametrize("name", ["A3", "A6", "B2", "B5", "C3", "C6", "D4", "D6"])
def test_epsilon_coordinates_reproduce_killing_gram(name):
    t = LieType.parse(name)
    eps_sq, simple = epsilon_embedding(t)
    g = killing_gram(t)
    for i, u in enumerate(simple):
        for j, v in enumerate(simple):
            assert eps_sq * sum(a * b for a, b in zip(u, v)) == g.entry(i, j)


def test_epsilon_embedding_is_classical_only():
    with pytest.raises(InvalidRank):
        epsilon_embedding(LieType("G", 2))


def test_root_label():
    assert Root((3, 2)).label() == "3a1+2a2"
    assert Root((0, -1, 1)).label() == "-a2+a3"
