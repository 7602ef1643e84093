"""Explicit embeddings: the linear product-sphere hypersurface and the recursive
maps of projective spaces over R, C, H into unit spheres.

Domain points are flat real vectors. For projective targets the flat layout of
``v = (v_0, ..., v_n)`` lists each entry's real coordinates in the order
``(1, i, j, k)`` truncated to ``dim_R``; ambient outputs follow the same order
block by block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from . import jets
from .algebra import FieldTag, HVector, qconj, qmul, qnorm2
from .errors import DomainError

ORTHO_TOL = 1e-12


# ---------------------------------------------------------------- specs


@dataclass(frozen=True)
class ProductSphereSpec:
    """S^k(r1) x S^{n-k}(r2) inside S^{n+1}, with r1^2 + r2^2 = 1."""

    n: int
    k: int
    r1: float

    def __post_init__(self):
        if self.n < 2 or not 1 <= self.k <= self.n - 1:
            raise DomainError(f"need n >= 2 and 1 <= k <= n-1, got n={self.n}, k={self.k}")
        if not 0.0 < self.r1 < 1.0:
            raise DomainError(f"r1 must lie in (0, 1), got {self.r1}")

    @classmethod
    def minimal(cls, n: int, k: int) -> ProductSphereSpec:
        """The S^{n,k} configuration r1 = sqrt(k/n)."""
        return cls(n, k, math.sqrt(k / n))

    @property
    def r2(self) -> float:
        return math.sqrt(1.0 - self.r1 * self.r1)

    @property
    def is_minimal_configuration(self) -> bool:
        return math.isclose(self.r1 * self.r1, self.k / self.n, rel_tol=0, abs_tol=1e-14)

    @property
    def dim(self) -> int:
        return self.n

    @property
    def ambient_dim(self) -> int:
        return self.n + 2


@dataclass(frozen=True)
class ProjectiveSpec:
    field: FieldTag
    n: int

    def __post_init__(self):
        object.__setattr__(self, "field", FieldTag.parse(self.field))
        if self.n < 1:
            raise DomainError(f"projective dimension must be >= 1, got {self.n}")

    @property
    def nprime(self) -> int:
        """Real dimension of P^n(F)."""
        return self.n * self.field.dim

    @property
    def radius(self) -> float:
        return radius(self.n)

    @property
    def L(self) -> int:
        return ambient_sphere_dim(self.field, self.n)

    @property
    def total_space_dim(self) -> int:
        """Dimension of the total-space sphere S(r_n) of the fibration."""
        return self.nprime + self.field.fiber_dim

    @property
    def domain_dim(self) -> int:
        """Real dimension of F^{n+1}."""
        return (self.n + 1) * self.field.dim

    @property
    def codimension(self) -> int:
        return self.L - self.nprime


# ---------------------------------------------------------------- constants


def radius(n: int) -> float:
    """r_n with r_n^4 = ((n+1)/2)^2 (n-1)!."""
    if n < 1:
        raise DomainError("radius needs n >= 1")
    return math.exp(0.25 * (2 * math.log((n + 1) / 2) + math.lgamma(n)))


def radius_and_constants(field, n: int) -> tuple[float, float, float]:
    """(r_n, a, b) of the recursive step at level n (a = b = nan for n = 1)."""
    FieldTag.parse(field)
    r = radius(n)
    if n < 2:
        return r, math.nan, math.nan
    b2 = 1.0 / ((n * n - 1) * radius(n - 1) ** 4)
    return r, math.sqrt(2 * n * (n + 1) * b2), math.sqrt(b2)


def ambient_sphere_dim(field, n: int) -> int:
    """Closed forms for L_n^F."""
    field = FieldTag.parse(field)
    if field is FieldTag.R:
        return n * (n + 3) // 2 - 1
    if field is FieldTag.C:
        return (n + 1) ** 2 - 2
    return (n + 1) * (2 * n + 1) - 2


def ambient_sphere_dim_recursive(field, n: int) -> int:
    field = FieldTag.parse(field)
    L = field.dim
    for m in range(2, n + 1):
        L = L + m * field.dim + 1
    return L


# ---------------------------------------------------------------- coordinates


def to_padded(field: FieldTag, flat):
    """Flat (..., (n+1)*dim) coordinates to padded (..., n+1, 4) entries."""
    d = field.dim

    def f(a):
        a = np.asarray(a, dtype=float)
        blocks = a.reshape(a.shape[:-1] + (-1, d))
        out = np.zeros(blocks.shape[:-1] + (4,))
        out[..., :d] = blocks
        return out

    return jets.linear(f, flat)


def to_flat(field: FieldTag, padded):
    d = field.dim
    return jets.linear(lambda a: a[..., :d].reshape(a.shape[:-2] + (-1,)), padded)


def left_multiply(field: FieldTag, unit: np.ndarray, flat: np.ndarray, handedness: int = 1):
    """Entrywise left multiplication of a flat vector by a padded field element."""
    padded = to_padded(field, flat)
    return to_flat(field, qmul(np.broadcast_to(unit, padded.shape), padded, handedness))


# ---------------------------------------------------------------- maps


def embed_product(spec: ProductSphereSpec, x1, x2, tol: float = 1e-10) -> np.ndarray:
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.shape != (spec.k + 1,) or x2.shape != (spec.n - spec.k + 1,):
        raise DomainError("factor vectors have the wrong length")
    if abs(np.linalg.norm(x1) - spec.r1) > tol or abs(np.linalg.norm(x2) - spec.r2) > tol:
        raise DomainError("factor points are off their spheres")
    return np.concatenate([x1, x2])


def iota_padded(field: FieldTag, n: int, v, handedness: int = 1):
    """The recursive map on padded entries ``v`` of shape (..., n+1, 4).

    Works on arrays and on :class:`~sigmagap.jets.Jet2` values alike and does not
    require ``v`` to lie on S(r_n).
    """
    d = field.dim
    if n == 1:
        v0, v1 = v[..., 0, :], v[..., 1, :]
        # left F_1-action v -> lam v leaves conj(v1) v0 invariant
        off = qmul(qconj(v1), v0, handedness) * 2.0
        diag = qnorm2(v0) - qnorm2(v1)
        return jets.concatenate([off[..., :d], _expand(diag)], axis=-1)
    _, a, b = radius_and_constants(field, n)
    head = iota_padded(field, n - 1, v[..., :n, :], handedness)
    vn = v[..., n : n + 1, :]
    off = qmul(qconj(vn), v[..., :n, :], handedness) * a
    off_flat = jets.linear(lambda x: x[..., :d].reshape(x.shape[:-2] + (n * d,)), off)
    norms = qnorm2(v[..., :n, :]).sum(axis=-1)
    diag = (norms - qnorm2(v[..., n, :]) * float(n)) * b
    out = jets.concatenate([head, off_flat, _expand(diag)], axis=-1)
    return out * (1.0 / math.sqrt(n + 1))


def _expand(x):
    return jets.linear(lambda a: np.asarray(a)[..., None], x)


def iota(field, n: int, v, handedness: int = 1) -> np.ndarray:
    """Evaluate iota_n^F at homogeneous coordinates ``v``.

    ``v`` may be an :class:`HVector`, an (n+1, 4) padded array or an
    (n+1, dim) coordinate array (leading batch axes allowed for arrays).
    """
    field = FieldTag.parse(field)
    if isinstance(v, HVector):
        if v.tag is not field:
            raise DomainError("vector field does not match")
        arr = v.array()
    else:
        arr = np.asarray(v, dtype=float)
        if arr.shape[-1] == field.dim and field.dim != 4:
            arr = to_padded(field, arr.reshape(arr.shape[:-2] + (-1,)))
    if arr.shape[-2] != n + 1 or arr.shape[-1] != 4:
        raise DomainError(f"expected {n + 1} homogeneous coordinates")
    return iota_padded(field, n, arr, handedness)


# ---------------------------------------------------------------- frames


@dataclass(frozen=True)
class FramePoint:
    base: np.ndarray
    horizontal_frame: np.ndarray
    fiber_frame: np.ndarray = dc_field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        for name in ("base", "horizontal_frame", "fiber_frame"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return self.horizontal_frame.shape[0]


def _complete(fixed: list[np.ndarray], count: int, dim: int, rng) -> list[np.ndarray]:
    """Gram-Schmidt completion of orthonormal ``fixed`` by ``count`` random vectors."""
    basis = list(fixed)
    new = []
    attempts = 0
    while len(new) < count:
        attempts += 1
        if attempts > 10 * count + 10:
            raise RuntimeError("orthonormal completion failed to converge")
        w = rng.standard_normal(dim)
        for _ in range(2):
            for q in basis:
                w = w - np.dot(q, w) * q
        nrm = np.linalg.norm(w)
        if nrm < 1e-8:
            continue
        w = w / nrm
        basis.append(w)
        new.append(w)
    return new


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_sphere_point(dim: int, radius_: float, rng) -> np.ndarray:
    x = rng.standard_normal(dim)
    return radius_ * x / np.linalg.norm(x)


def fiber_directions(field: FieldTag, v: np.ndarray, handedness: int = 1) -> list[np.ndarray]:
    """Unnormalized tangents u v of the F_1 orbit through flat ``v``."""
    return [
        left_multiply(field, np.eye(4)[a], v, handedness) for a in range(1, field.fiber_dim + 1)
    ]


def fiber_and_horizontal(field, n: int, v, seed=0, handedness: int = 1, tol: float = 1e-10):
    """Fiber frame and random orthonormal horizontal frame at ``v`` in S(r_n)."""
    field = FieldTag.parse(field)
    v = np.asarray(v, dtype=float).reshape(-1)
    r = radius(n)
    if v.shape[0] != (n + 1) * field.dim:
        raise DomainError("base point has the wrong dimension")
    if abs(np.linalg.norm(v) - r) > tol * max(1.0, r):
        raise DomainError("base point is not on S(r_n)")
    rng = _rng(seed)
    radial = v / r
    fiber = [u / np.linalg.norm(u) for u in fiber_directions(field, v, handedness)]
    horizontal = _complete([radial] + fiber, n * field.dim, v.shape[0], rng)
    return FramePoint(v, np.array(horizontal), np.array(fiber).reshape(len(fiber), v.shape[0]))


def hermitian_frame(field, n: int, v, seed=0, handedness: int = 1) -> FramePoint:
    """Horizontal frame of the form (e1, i e1, [j e1, k e1], e2, i e2, ...).

    Planes (e_a, u e_a) are holomorphic/quaternionic; planes between different
    blocks are totally real. For F = R this is just a random horizontal frame.
    """
    field = FieldTag.parse(field)
    v = np.asarray(v, dtype=float).reshape(-1)
    rng = _rng(seed)
    r = radius(n)
    radial = v / r
    fiber = [u / np.linalg.norm(u) for u in fiber_directions(field, v, handedness)]
    basis = [radial] + fiber
    frame = []
    for _ in range(n):
        (e,) = _complete(basis, 1, v.shape[0], rng)
        block = [e] + [
            left_multiply(field, np.eye(4)[a], e, handedness) for a in range(1, field.fiber_dim + 1)
        ]
        for w in block:
            for q in basis:
                if abs(np.dot(q, w)) > 1e-10:
                    raise RuntimeError("complex structure does not preserve the horizontal space")
            basis.append(w)
            frame.append(w)
    return FramePoint(v, np.array(frame), np.array(fiber).reshape(len(fiber), v.shape[0]))


def holomorphic_plane(field, point: FramePoint, e, handedness: int = 1, seed=0):
    """Partners of a horizontal vector ``e``: its images ``u e`` and a totally real ``f``.

    Returns ``(partners, f)``; ``f`` is None when no totally real plane exists.
    """
    field = FieldTag.parse(field)
    if field is FieldTag.R:
        raise DomainError("holomorphic planes need F = C or H")
    e = np.asarray(e, dtype=float)
    partners = [
        left_multiply(field, np.eye(4)[a], e, handedness) for a in range(1, field.fiber_dim + 1)
    ]
    n = point.base.shape[0] // field.dim - 1
    if n < 2:
        return partners, None
    nrm = np.linalg.norm(e)
    basis = [point.base / np.linalg.norm(point.base)]
    basis += [u / np.linalg.norm(u) for u in point.fiber_frame]
    basis += [e / nrm] + [p / nrm for p in partners]
    (f,) = _complete(basis, 1, point.base.shape[0], _rng(seed))
    return partners, f


def product_frame(spec: ProductSphereSpec, seed=0) -> FramePoint:
    """Random point of S^k(r1) x S^{n-k}(r2) with an orthonormal split frame."""
    rng = _rng(seed)
    k1, k2 = spec.k + 1, spec.n - spec.k + 1
    x1 = random_sphere_point(k1, spec.r1, rng)
    x2 = random_sphere_point(k2, spec.r2, rng)
    t1 = _complete([x1 / spec.r1], spec.k, k1, rng)
    t2 = _complete([x2 / spec.r2], spec.n - spec.k, k2, rng)
    frame = [np.concatenate([t, np.zeros(k2)]) for t in t1]
    frame += [np.concatenate([np.zeros(k1), t]) for t in t2]
    return FramePoint(np.concatenate([x1, x2]), np.array(frame), np.zeros((0, k1 + k2)))


def inclusion_map(src, dst, n: int) -> np.ndarray:
    """Indices placing the ambient coordinates of iota_n^src inside those of iota_n^dst."""
    src, dst = FieldTag.parse(src), FieldTag.parse(dst)
    if not dst.contains(src):
        raise DomainError(f"{src.value} is not contained in {dst.value}")
    if n < 1:
        raise DomainError("n must be >= 1")

    def block(level: int) -> list[int]:
        if level == 1:
            return list(range(src.dim)) + [dst.dim]
        head = block(level - 1)
        start = ambient_sphere_dim(dst, level - 1) + 1
        off = [start + i * dst.dim + c for i in range(level) for c in range(src.dim)]
        return head + off + [start + level * dst.dim]

    return np.array(block(n), dtype=int)


# ---------------------------------------------------------------- evaluable embeddings


class ProductEmbedding:
    """The linear hypersurface S^k(r1) x S^{n-k}(r2) in S^{n+1}."""

    def __init__(self, spec: ProductSphereSpec):
        self.spec = spec
        self.dim = spec.n
        self.ambient_dim = spec.n + 2

    def __call__(self, x):
        return x

    def sample(self, rng) -> FramePoint:
        return product_frame(self.spec, rng)

    def check_tangent(self, point: FramePoint, tol: float = 1e-9) -> bool:
        k1 = self.spec.k + 1
        x1, x2 = point.base[:k1], point.base[k1:]
        f = point.horizontal_frame
        return bool(
            np.all(np.abs(f[:, :k1] @ x1) < tol) and np.all(np.abs(f[:, k1:] @ x2) < tol)
        )

    def geodesics(self, point: FramePoint, directions: np.ndarray) -> jets.Jet2:
        k1 = self.spec.k + 1
        c1 = jets.great_circle(point.base[:k1], directions[:, :k1], self.spec.r1)
        c2 = jets.great_circle(point.base[k1:], directions[:, k1:], self.spec.r2)
        return jets.concatenate([c1, c2], axis=-1)


class ProjectiveEmbedding:
    """iota_n^F precomposed with the flat-coordinate layout of F^{n+1}."""

    def __init__(self, field, n: int, handedness: int = 1, frame: str = "random"):
        self.spec = ProjectiveSpec(FieldTag.parse(field), n)
        self.field = self.spec.field
        self.n = n
        self.handedness = handedness
        self.frame = frame
        self.dim = self.spec.nprime
        self.ambient_dim = self.spec.L + 1

    def __call__(self, x):
        return to_padded_iota(self, x)

    def sample(self, rng) -> FramePoint:
        v = random_sphere_point(self.spec.domain_dim, self.spec.radius, rng)
        if self.frame == "hermitian":
            return hermitian_frame(self.field, self.n, v, rng, self.handedness)
        return fiber_and_horizontal(self.field, self.n, v, rng, self.handedness)

    def check_tangent(self, point: FramePoint, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(point.horizontal_frame @ point.base) < tol * self.spec.radius))

    def geodesics(self, point: FramePoint, directions: np.ndarray) -> jets.Jet2:
        return jets.great_circle(point.base, directions, self.spec.radius)


def to_padded_iota(emb: ProjectiveEmbedding, x):
    return iota_padded(emb.field, emb.n, to_padded(emb.field, x), emb.handedness)


@lru_cache(maxsize=None)
def projective_embedding(field, n: int, handedness: int = 1, frame: str = "random"):
    return ProjectiveEmbedding(FieldTag.parse(field), n, handedness, frame)
