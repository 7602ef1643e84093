"""Order-two truncated Taylor arithmetic in a single curve parameter.

A :class:`Jet2` stores ``(a0, a1, a2)`` with ``f(t0 + h) = a0 + a1 h + a2 h**2 + O(h**3)``,
so ``a2`` is half the second derivative. Slots may be floats or numpy arrays of a
common shape; indexing and broadcasting act on all three slots at once.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import DomainError


class Jet2:
    __slots__ = ("a0", "a1", "a2")
    __array_priority__ = 100  # keep ndarray * Jet2 from broadcasting elementwise

    def __init__(self, a0, a1=0.0, a2=0.0):
        self.a0 = a0
        self.a1 = a1
        self.a2 = a2

    @classmethod
    def constant(cls, c) -> Jet2:
        z = np.zeros_like(c, dtype=float) if isinstance(c, np.ndarray) else 0.0
        return cls(c, z, z)

    @classmethod
    def variable(cls, t0: float = 0.0) -> Jet2:
        return cls(float(t0), 1.0, 0.0)

    def __repr__(self):
        return f"Jet2({self.a0!r}, {self.a1!r}, {self.a2!r})"

    @property
    def shape(self):
        return np.shape(self.a0)

    def slots(self):
        return self.a0, self.a1, self.a2

    def derivatives(self):
        """Value, first and second derivative."""
        return self.a0, self.a1, 2.0 * self.a2

    def __getitem__(self, idx) -> Jet2:
        return Jet2(
            np.asarray(self.a0)[idx], np.asarray(self.a1)[idx], np.asarray(self.a2)[idx]
        )

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.a0 + other.a0, self.a1 + other.a1, self.a2 + other.a2)
        return Jet2(self.a0 + other, self.a1 + 0 * other, self.a2 + 0 * other)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.a0, -self.a1, -self.a2)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return Jet2(
                self.a0 * other.a0,
                self.a0 * other.a1 + self.a1 * other.a0,
                self.a0 * other.a2 + self.a1 * other.a1 + self.a2 * other.a0,
            )
        return Jet2(self.a0 * other, self.a1 * other, self.a2 * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            return self * (1.0 / np.asarray(other, dtype=float))
        if np.any(np.asarray(other.a0) == 0):
            raise DomainError("jet division by a zero value slot")
        q0 = self.a0 / other.a0
        q1 = (self.a1 - q0 * other.a1) / other.a0
        q2 = (self.a2 - q0 * other.a2 - q1 * other.a1) / other.a0
        return Jet2(q0, q1, q2)

    def __rtruediv__(self, other):
        return Jet2.constant(np.asarray(other, dtype=float)) / self

    def sum(self, axis=None) -> Jet2:
        return Jet2(
            np.sum(self.a0, axis=axis), np.sum(self.a1, axis=axis), np.sum(self.a2, axis=axis)
        )

    def reshape(self, *shape) -> Jet2:
        return Jet2(
            np.reshape(self.a0, shape), np.reshape(self.a1, shape), np.reshape(self.a2, shape)
        )


def sqrt(x: Jet2) -> Jet2:
    if np.any(np.asarray(x.a0) <= 0):
        raise DomainError("jet sqrt needs a positive value slot")
    s0 = np.sqrt(x.a0)
    s1 = x.a1 / (2.0 * s0)
    s2 = (x.a2 - s1 * s1) / (2.0 * s0)
    return Jet2(s0, s1, s2)


def cos(x: Jet2) -> Jet2:
    c, s = np.cos(x.a0), np.sin(x.a0)
    return Jet2(c, -s * x.a1, -s * x.a2 - 0.5 * c * x.a1 * x.a1)


def sin(x: Jet2) -> Jet2:
    c, s = np.cos(x.a0), np.sin(x.a0)
    return Jet2(s, c * x.a1, c * x.a2 - 0.5 * s * x.a1 * x.a1)


def bilinear(f: Callable, x, y):
    """Apply a bilinear map to jets (or plain arrays) with the Leibniz rule."""
    if isinstance(x, Jet2) and isinstance(y, Jet2):
        return Jet2(
            f(x.a0, y.a0),
            f(x.a0, y.a1) + f(x.a1, y.a0),
            f(x.a0, y.a2) + f(x.a1, y.a1) + f(x.a2, y.a0),
        )
    if isinstance(x, Jet2):
        return Jet2(f(x.a0, y), f(x.a1, y), f(x.a2, y))
    if isinstance(y, Jet2):
        return Jet2(f(x, y.a0), f(x, y.a1), f(x, y.a2))
    return f(x, y)


def linear(f: Callable, x):
    """Apply a linear map slotwise."""
    if isinstance(x, Jet2):
        return Jet2(f(x.a0), f(x.a1), f(x.a2))
    return f(x)


def concatenate(parts: Sequence, axis: int = -1):
    if any(isinstance(p, Jet2) for p in parts):
        parts = [p if isinstance(p, Jet2) else Jet2.constant(np.asarray(p, float)) for p in parts]
        shapes = [np.broadcast_shapes(np.shape(p.a0), np.shape(p.a1), np.shape(p.a2)) for p in parts]
        slots = []
        for i in range(3):
            slots.append(
                np.concatenate(
                    [np.broadcast_to(p.slots()[i], s) for p, s in zip(parts, shapes)], axis=axis
                )
            )
        return Jet2(*slots)
    return np.concatenate(parts, axis=axis)


def stack(parts: Sequence, axis: int = -1):
    if any(isinstance(p, Jet2) for p in parts):
        parts = [p if isinstance(p, Jet2) else Jet2.constant(np.asarray(p, float)) for p in parts]
        shape = np.broadcast_shapes(
            *[np.broadcast_shapes(np.shape(p.a0), np.shape(p.a1), np.shape(p.a2)) for p in parts]
        )
        return Jet2(
            *[
                np.stack([np.broadcast_to(p.slots()[i], shape) for p in parts], axis=axis)
                for i in range(3)
            ]
        )
    return np.stack(parts, axis=axis)


_UNARY = {"sqrt": sqrt, "neg": lambda x: -x, "cos": cos, "sin": sin}


def jet_arith(op: str, x: Jet2, y=None) -> Jet2:
    """Dispatch a named jet operation; ``scale`` takes a real ``y``."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "scale":
        return x * float(y)
    if op in _UNARY:
        return _UNARY[op](x)
    raise DomainError(f"unknown jet operation {op!r}")


def great_circle(p: np.ndarray, u: np.ndarray, radius: float) -> Jet2:
    """Jet at t=0 of the great circle of the radius-``radius`` sphere through ``p``
    with initial velocity ``u`` (u tangent to the sphere at p).

    ``u`` may carry leading batch axes; the result has the broadcast shape.
    """
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    speed = np.linalg.norm(u, axis=-1, keepdims=True)
    theta = Jet2(np.zeros_like(speed), speed / radius, np.zeros_like(speed))
    # radius * sin(|u| t / radius) / |u| has jet (0, 1, 0) for every speed, including 0.
    safe = np.where(speed > 0, speed, 1.0)
    s = sin(theta) * (radius / safe)
    s = Jet2(s.a0, np.where(speed > 0, s.a1, 1.0), s.a2)
    return cos(theta) * p + s * u


def curve_jet(fn: Callable, curve: Jet2):
    """Value, first and second derivative at t=0 of ``fn`` along ``curve``."""
    if not isinstance(curve, Jet2):
        raise DomainError("curve must be a Jet2")
    out = fn(curve)
    if not isinstance(out, Jet2):
        out = Jet2.constant(np.asarray(out, dtype=float))
    value, d1, d2 = out.derivatives()
    shape = np.broadcast_shapes(np.shape(value), np.shape(d1), np.shape(d2))
    return (
        np.broadcast_to(value, shape).copy(),
        np.broadcast_to(d1, shape).copy(),
        np.broadcast_to(d2, shape).copy(),
    )
