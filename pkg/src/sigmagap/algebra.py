"""The normed division algebras R, C and H in a shared four-slot layout.

Every element is stored as real coefficients on ``(1, i, j, k)``; complex and
real numbers leave the trailing slots at zero, so R ⊂ C ⊂ H is the identity on
coordinates. The array kernels (:func:`qmul`, :func:`qconj`, :func:`qnorm2`)
work on the last axis of numpy arrays and also on :class:`~sigmagap.jets.Jet2`
values, which is how the embeddings are differentiated.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import jets
from .errors import DomainError


class FieldTag(enum.Enum):
    R = "R"
    C = "C"
    H = "H"

    @property
    def dim(self) -> int:
        return {"R": 1, "C": 2, "H": 4}[self.value]

    @property
    def fiber_dim(self) -> int:
        """Manifold dimension of the unit group F_1 (0, 1 or 3)."""
        return {"R": 0, "C": 1, "H": 3}[self.value]

    def contains(self, other: FieldTag) -> bool:
        return other.dim <= self.dim

    @classmethod
    def parse(cls, value) -> FieldTag:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise DomainError(f"unknown field {value!r}; expected R, C or H") from None


def _structure_constants(handedness: int) -> np.ndarray:
    # table[a, b, c]: coefficient of basis c in e_a * e_b
    s = handedness
    table = np.zeros((4, 4, 4))
    table[0, 0, 0] = 1
    for a in range(1, 4):
        table[0, a, a] = 1
        table[a, 0, a] = 1
        table[a, a, 0] = -1
    table[1, 2, 3], table[2, 1, 3] = s, -s
    table[2, 3, 1], table[3, 2, 1] = s, -s
    table[3, 1, 2], table[1, 3, 2] = s, -s
    return table


_TABLES = {1: _structure_constants(1), -1: _structure_constants(-1)}
_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


def qmul(x, y, handedness: int = 1):
    """Quaternion product over the last axis (``ij = k`` when handedness is +1)."""
    table = _TABLES[handedness]
    return jets.bilinear(lambda a, b: np.einsum("...a,...b,abc->...c", a, b, table), x, y)


def qconj(x):
    return jets.linear(lambda a: a * _CONJ, x)


def qnorm2(x):
    return jets.bilinear(lambda a, b: np.sum(a * b, axis=-1), x, x)


def pad(coeffs: Sequence[float] | np.ndarray, field: FieldTag) -> np.ndarray:
    """Real coordinates of field elements (last axis ``dim``) to the 4-slot layout."""
    arr = np.asarray(coeffs, dtype=float)
    if arr.shape[-1] != field.dim:
        raise DomainError(f"expected {field.dim} real coordinates, got {arr.shape[-1]}")
    out = np.zeros(arr.shape[:-1] + (4,))
    out[..., : field.dim] = arr
    return out


@dataclass(frozen=True)
class AlgebraElement:
    tag: FieldTag
    coeffs: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.coeffs) != 4:
            raise DomainError("AlgebraElement needs 4 coefficients")
        if any(c != 0 for c in self.coeffs[self.tag.dim :]):
            raise DomainError(f"nonzero coefficient outside {self.tag.value}")

    @classmethod
    def of(cls, tag, *coeffs: float) -> AlgebraElement:
        tag = FieldTag.parse(tag)
        padded = tuple(float(c) for c in coeffs) + (0.0,) * (4 - len(coeffs))
        return cls(tag, padded)

    def array(self) -> np.ndarray:
        return np.array(self.coeffs)

    def __mul__(self, other: AlgebraElement) -> AlgebraElement:
        return alg_mul(self, other)


def _from_array(tag: FieldTag, arr: np.ndarray) -> AlgebraElement:
    arr = np.array(arr, dtype=float)
    arr[tag.dim :] = 0.0  # products inside a subalgebra stay there; drop -0.0 noise
    return AlgebraElement(tag, tuple(float(c) for c in arr))


def alg_mul(x: AlgebraElement, y: AlgebraElement, handedness: int = 1) -> AlgebraElement:
    if x.tag is not y.tag:
        raise DomainError(f"tag mismatch: {x.tag.value} * {y.tag.value}")
    return _from_array(x.tag, qmul(x.array(), y.array(), handedness))


def alg_conj_norm2(x: AlgebraElement) -> tuple[AlgebraElement, float]:
    return _from_array(x.tag, qconj(x.array())), float(qnorm2(x.array()))


@dataclass(frozen=True)
class HVector:
    """Homogeneous coordinates ``(v_0, ..., v_n)`` over one field."""

    tag: FieldTag
    entries: tuple[AlgebraElement, ...]

    def __post_init__(self):
        if any(e.tag is not self.tag for e in self.entries):
            raise DomainError("HVector entries must share the vector's tag")

    @classmethod
    def from_array(cls, tag, arr) -> HVector:
        """From an ``(n+1, 4)`` padded array or an ``(n+1, dim)`` coordinate array."""
        tag = FieldTag.parse(tag)
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 2:
            raise DomainError("expected a 2-d coefficient array")
        if arr.shape[1] != 4:
            arr = pad(arr, tag)
        return cls(tag, tuple(AlgebraElement(tag, tuple(float(c) for c in row)) for row in arr))

    def array(self) -> np.ndarray:
        return np.array([e.coeffs for e in self.entries])

    def norm2(self) -> float:
        return float(np.sum(self.array() ** 2))

    def __len__(self):
        return len(self.entries)


def scalar_action(lam: AlgebraElement, v: HVector, tol: float = 1e-12) -> HVector:
    """Entrywise left multiplication ``v -> lam v`` by a unit of the field."""
    if lam.tag is not v.tag:
        raise DomainError("scalar and vector tags differ")
    _, n2 = alg_conj_norm2(lam)
    if abs(n2 - 1.0) > tol:
        raise DomainError(f"scalar is not a unit (|lam|^2 = {n2})")
    out = qmul(lam.array()[None, :], v.array())
    out[:, v.tag.dim :] = 0.0
    return HVector.from_array(v.tag, out)


def imaginary_units(field: FieldTag) -> list[np.ndarray]:
    """Padded unit imaginaries spanning the Lie algebra of F_1."""
    return [np.eye(4)[a] for a in range(1, field.fiber_dim + 1)]
