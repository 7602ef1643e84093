"""Induced metric, second fundamental form and curvatures of an embedded
submanifold of the unit sphere, measured from exact second-order jets.

Given a frame ``e_1..e_m`` at a domain point, the engine differentiates the
embedding along domain geodesics in the directions ``e_i`` and ``e_i + e_j``.
Second derivatives projected orthogonally to the image point and to the image
tangent space give the second fundamental form relative to the unit sphere;
off-diagonal entries come from polarization. All curvature quantities are then
expressed in a frame orthonormal for the induced metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FieldTag
from .atlas import FramePoint
from .errors import DegenerateFrameError, DomainError

SPHERE_TOL = 1e-9
TANGENT_TOL = 1e-9
DEGENERATE_RATIO = 1e-12


@dataclass(frozen=True)
class ExtrinsicReport:
    gram: np.ndarray
    conformal_factor: float
    conformal_defect: float
    alpha: np.ndarray  # (m, m, A), orthonormalized frame
    H: np.ndarray
    H2: float
    alpha2: float
    sectional: np.ndarray  # (m, m), diagonal zero
    s_gauss: float
    s_sum: float
    image: np.ndarray
    tangents: np.ndarray  # pushed-forward frame, (m, A)
    orthonormalizer: np.ndarray  # T with T^T gram T = I

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def H_norm(self) -> float:
        return float(np.sqrt(self.H2))

    def normal_residual(self) -> float:
        """Largest inner product of alpha with the image point or image tangents."""
        a = self.alpha.reshape(-1, self.alpha.shape[-1])
        return float(max(np.max(np.abs(a @ self.image)), np.max(np.abs(a @ self.tangents.T))))


def _normal_projector(image: np.ndarray, tangents: np.ndarray):
    span = np.vstack([image[None, :], tangents]).T
    q, _ = np.linalg.qr(span)

    def project(x):
        return x - (x @ q) @ q.T

    return project


def pair_directions(frame: np.ndarray):
    m = frame.shape[0]
    iu, ju = np.triu_indices(m, k=1)
    return np.vstack([frame, frame[iu] + frame[ju]]), iu, ju


def measure(embedding, point: FramePoint) -> ExtrinsicReport:
    """Measure the extrinsic geometry of ``embedding`` at ``point``."""
    frame = point.horizontal_frame
    m = frame.shape[0]
    if m == 0:
        raise DomainError("empty frame")
    if not embedding.check_tangent(point, TANGENT_TOL):
        raise DomainError("frame vectors are not tangent to the domain")

    directions, iu, ju = pair_directions(frame)
    out = embedding(embedding.geodesics(point, directions))
    value, d1, d2 = out.derivatives()
    image = np.asarray(value)[0]
    if abs(np.linalg.norm(image) - 1.0) > SPHERE_TOL:
        raise DomainError(f"image point is off the unit sphere (|y| = {np.linalg.norm(image)})")

    tangents = np.asarray(d1)[:m]
    gram = tangents @ tangents.T
    gram = 0.5 * (gram + gram.T)
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise DegenerateFrameError("induced metric is not positive definite on the frame") from None
    # pivots against the squared domain lengths: collapsed (fiber) or repeated
    # directions leave a pivot at rounding level
    pivots = np.diag(chol) ** 2 / np.sum(frame * frame, axis=1)
    if np.min(pivots) < DEGENERATE_RATIO * max(1.0, np.max(pivots)):
        raise DegenerateFrameError("frame is numerically rank deficient for the induced metric")
    T = np.linalg.inv(chol).T

    project = _normal_projector(image, tangents)
    acc = project(np.asarray(d2))
    raw = np.zeros((m, m, acc.shape[-1]))
    raw[np.arange(m), np.arange(m)] = acc[:m]
    mixed = 0.5 * (acc[m:] - acc[iu] - acc[ju])
    raw[iu, ju] = mixed
    raw[ju, iu] = mixed

    alpha = np.einsum("ia,jb,ijk->abk", T, T, raw)
    H = np.einsum("aak->k", alpha)
    H2 = float(H @ H)
    alpha2 = float(np.sum(alpha * alpha))
    diag = alpha[np.arange(m), np.arange(m)]
    sectional = 1.0 + diag @ diag.T - np.sum(alpha * alpha, axis=-1)
    np.fill_diagonal(sectional, 0.0)

    c = float(np.trace(gram) / m)
    return ExtrinsicReport(
        gram=gram,
        conformal_factor=c,
        conformal_defect=float(np.max(np.abs(gram - c * np.eye(m)))),
        alpha=alpha,
        H=H,
        H2=H2,
        alpha2=alpha2,
        sectional=sectional,
        s_gauss=m * (m - 1) + H2 - alpha2,
        s_sum=float(np.sum(sectional)),
        image=image,
        tangents=tangents,
        orthonormalizer=T,
    )


def ricci_direction(report: ExtrinsicReport, i: int) -> float:
    """Ricci curvature of the i-th orthonormalized frame direction."""
    return float(np.sum(report.sectional[i]) - report.sectional[i, i])


def plane_curvature(report: ExtrinsicReport, i: int, j: int) -> float:
    return float(report.sectional[i, j])


def holomorphic_pairs(field, n: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Index pairs of holomorphic and totally real planes in a hermitian frame.

    The frame is laid out in blocks ``(e, i e[, j e, k e])``; pairs inside a
    block starting at the block vector are holomorphic (quaternionic), pairs of
    block leaders are totally real.
    """
    field = FieldTag.parse(field)
    size = field.fiber_dim + 1
    holo = [(b * size, b * size + u) for b in range(n) for u in range(1, size)]
    real = [(a * size, b * size) for a in range(n) for b in range(a + 1, n)]
    return holo, real
