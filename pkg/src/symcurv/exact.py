from __future__ import annotations
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Sequence, Union
import numpy as np
from .errors import SymcurvError

Rational = Fraction
RatVector = tuple[Fraction, ...]


class SingularMatrix(SymcurvError):
    pass


class DependentInput(SymcurvError):
    pass


def as_vector(values: Iterable[object]) -> RatVector:
    return tuple(Fraction(v) for v in values)


def integral_vector(values: Sequence[object]) -> tuple[np.ndarray, int]:
    """Integer object array w and positive int k with values == w / k."""
    if all(isinstance(x, (int, np.integer)) for x in values):
        return np.array([int(x) for x in values], dtype=object), 1
    vec = [Fraction(x) for x in values]
    k = lcm(*(x.denominator for x in vec)) if vec else 1
    return np.array([int(x * k) for x in vec], dtype=object), k


def render(value: Fraction | int) -> str:
    """Render an exact scalar as 'p/q' (or 'p' when integral)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _object_matrix(rows: Sequence[Sequence[object]] | np.ndarray) -> np.ndarray:
    arr = np.array([[Fraction(x) for x in row] for row in rows], dtype=object)
    if arr.ndim != 2:
        raise ValueError("Expected a two-dimensional matrix")
    return arr


@dataclass(frozen=True)
class BilinearForm:
    """Symmetric bilinear form given by its Gram matrix in a fixed basis."""
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.matrix)
        if any(len(row) != n for row in self.matrix):
            raise ValueError("Gram matrix must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ValueError(f"Gram matrix is not symmetric at ({i}, {j})")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]] | np.ndarray) -> "BilinearForm":
        return cls(tuple(tuple(Fraction(x) for x in row) for row in rows))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def array(self) -> np.ndarray:
        return _object_matrix(self.matrix)

    def entry(self, i: int, j: int) -> Fraction:
        return self.matrix[i][j]

    @cached_property
    def scaled(self) -> tuple[np.ndarray, int]:
        """(S, d) with S an integer matrix and the form equal to S / d."""
        d = lcm(*(x.denominator for row in self.matrix for x in row)) if self.matrix else 1
        return np.array([[int(x * d) for x in row] for row in self.matrix], dtype=object).reshape(self.dim, self.dim), d

    def __call__(self, u: Sequence[object], v: Sequence[object]) -> Fraction:
        if len(u) != self.dim or len(v) != self.dim:
            raise ValueError("Vector length does not match the form's dimension")
        s, d = self.scaled
        ui, u_den = integral_vector(u)
        vi, v_den = integral_vector(v)
        return Fraction(int(ui.dot(s).dot(vi)), d * u_den * v_den)

    def sq_length(self, v: Sequence[object]) -> Fraction:
        return self(v, v)

    def is_positive_definite(self) -> bool:
        arr = self.array()
        return all(determinant(arr[:k, :k]) > 0 for k in range(1, self.dim + 1))


MatrixLike = Union[BilinearForm, Sequence[Sequence[object]], np.ndarray]


def _as_array(m: MatrixLike) -> np.ndarray:
    if isinstance(m, BilinearForm):
        return m.array()
    return _object_matrix(m)


def determinant(m: MatrixLike) -> Fraction:
    a = _as_array(m)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("determinant needs a square matrix")
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r, col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            det = -det
        det *= a[col, col]
        for r in range(col + 1, n):
            if a[r, col] != 0:
                a[r, :] -= (a[r, col] / a[col, col]) * a[col, :]
    return det


def solve_linear(g: MatrixLike, b: Sequence[object]) -> RatVector:
    """Solve g·x = b exactly by Gauss-Jordan elimination (first nonzero pivot)."""
    a = _as_array(g)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("solve_linear needs a square matrix")
    if len(b) != n:
        raise ValueError(f"Right-hand side has length {len(b)}, expected {n}")
    rhs = np.array([Fraction(x) for x in b], dtype=object)

    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r, col] != 0), None)
        if pivot is None:
            raise SingularMatrix(f"No pivot in column {col}; matrix is singular")
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            rhs[[col, pivot]] = rhs[[pivot, col]]
        scale = a[col, col]
        a[col, :] /= scale
        rhs[col] /= scale
        for r in range(n):
            if r != col and a[r, col] != 0:
                factor = a[r, col]
                a[r, :] -= factor * a[col, :]
                rhs[r] -= factor * rhs[col]
    return tuple(Fraction(x) for x in rhs)


def mat_vec(g: MatrixLike, x: Sequence[object]) -> RatVector:
    a = _as_array(g)
    return tuple(Fraction(v) for v in a.dot(np.array([Fraction(v) for v in x], dtype=object)))


def _clear_denominators(v: RatVector) -> RatVector:
    scale = lcm(*(x.denominator for x in v)) if v else 1
    return tuple(x * scale for x in v)


def gram_schmidt(vs: Sequence[Sequence[object]], g: BilinearForm) -> list[RatVector]:
    """Unnormalized Gram-Schmidt: outputs span the same flag and are pairwise g-orthogonal.

    Each output is scaled by a positive integer so its coordinates are integers
    whenever the inputs are; no square roots are taken.
    """
    out: list[RatVector] = []
    norms: list[Fraction] = []
    for k, raw in enumerate(vs):
        w = list(as_vector(raw))
        for prev, norm in zip(out, norms):
            coeff = g(w, prev) / norm
            if coeff:
                w = [wi - coeff * pi for wi, pi in zip(w, prev)]
        w_vec = _clear_denominators(tuple(w))
        norm = g.sq_length(w_vec)
        if norm == 0:
            raise DependentInput(f"Vector {k} lies in the span of the previous ones")
        out.append(w_vec)
        norms.append(norm)
    return out


def orthogonal_frame(basis: Sequence[Sequence[object]], g: BilinearForm) -> list[tuple[RatVector, Fraction]]:
    """Gram-Schmidt output of basis paired with the squared lengths."""
    return [(sigma, g.sq_length(sigma)) for sigma in gram_schmidt(basis, g)]


def sq_length_on_frame(v: Sequence[object], frame: Sequence[tuple[RatVector, Fraction]], g: BilinearForm) -> Fraction:
    total = Fraction(0)
    for sigma, norm in frame:
        total += g(v, sigma) ** 2 / norm
    return total


def proj_sq_length(v: Sequence[object], basis: Sequence[Sequence[object]], g: BilinearForm) -> Fraction:
    """Squared g-length of the orthogonal projection of v onto span(basis)."""
    return sq_length_on_frame(v, orthogonal_frame(basis, g), g)
