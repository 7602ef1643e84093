"""Sampling campaigns that hold measured geometry against the closed forms.

Each sampled point ``i`` of a campaign draws from ``default_rng([seed, i])``, so
a ledger depends only on the configuration, never on worker scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.optimize import brentq

from . import atlas, closed_forms as cf, jets
from .algebra import FieldTag
from .atlas import ProductSphereSpec, ProjectiveSpec
from .errors import DomainError
from .extrinsic import holomorphic_pairs, measure
from .ledger import DiscrepancyLedger, InequalityRecord, compare, greater, match

DEFAULT_TOLERANCES = {
    "H": 1e-8,
    "match": 1e-6,
    "gauss": 1e-7,
    "normal": 1e-9,
    "conformal_defect": 1e-8,
    "conformal_expected": 1e-6,
    "norm_identity": 1e-10,
    "invariance": 1e-12,
    "fiber": 1e-9,
    "inclusion": 1e-14,
    "fk_endpoint": 1e-9,
    "fk_minimizer": 1e-6,
}

# largest n sampled per field; beyond these only closed-form sweeps run
SAMPLING_CAPS = {FieldTag.R: 6, FieldTag.C: 4, FieldTag.H: 3}
GAP_CAPS = {FieldTag.R: 30, FieldTag.C: 20, FieldTag.H: 15}

Target = Union[ProductSphereSpec, ProjectiveSpec]


@dataclass
class CampaignConfig:
    target: Target | None = None
    samples: int = 100
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError("samples must be >= 1")
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}

    def tol(self, name: str) -> float:
        return self.tolerances[name]

    def describe(self) -> dict:
        return {
            "target": describe_target(self.target),
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
        }


def describe_target(target) -> dict | None:
    if target is None:
        return None
    if isinstance(target, ProductSphereSpec):
        return {"kind": "product", "n": target.n, "k": target.k, "r1": target.r1}
    return {"kind": "projective", "field": target.field.value, "n": target.n}


def target_params(target) -> dict:
    d = dict(describe_target(target))
    d.pop("kind")
    return d


def embedding_for(target, frame: str = "random", handedness: int = 1):
    if isinstance(target, ProductSphereSpec):
        return atlas.ProductEmbedding(target)
    if isinstance(target, ProjectiveSpec):
        return atlas.ProjectiveEmbedding(target.field, target.n, handedness, frame)
    raise DomainError(f"unsupported campaign target {target!r}")


def point_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


# ---------------------------------------------------------------- per-point work


def _point_measurements(target, frame: str, seed: int, index: int) -> dict:
    emb = embedding_for(target, frame)
    point = emb.sample(point_rng(seed, index))
    rep = measure(emb, point)
    return {
        "index": index,
        "H_norm": rep.H_norm,
        "H2": rep.H2,
        "alpha2": rep.alpha2,
        "s_sum": rep.s_sum,
        "s_gauss": rep.s_gauss,
        "sectional": rep.sectional,
        "conformal_factor": rep.conformal_factor,
        "conformal_defect": rep.conformal_defect,
        "normal_residual": rep.normal_residual(),
    }


def _sample(config: CampaignConfig, frame: str = "random") -> list[dict]:
    args = [(config.target, frame, config.seed, i) for i in range(config.samples)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_point_measurements, *zip(*args)))
    return [_point_measurements(*a) for a in args]


def _finish(name: str, records: list[InequalityRecord], config: CampaignConfig) -> DiscrepancyLedger:
    return DiscrepancyLedger(name, records, config.describe())


# ---------------------------------------------------------------- campaigns


def campaign_minimality(config: CampaignConfig) -> DiscrepancyLedger:
    target = config.target
    if target is None:
        raise DomainError("minimality campaign needs a target")
    base = target_params(target)
    tol = config.tol("H")
    records = []
    samples = _sample(config)
    for m in samples:
        params = dict(base, point=m["index"])
        records.append(compare("mean_curvature_norm", params, m["H_norm"], tol, "<", H2=m["H2"]))
    if isinstance(target, ProductSphereSpec):
        expected = cf.product_geometry(target)["H2"]
        worst = max(samples, key=lambda m: abs(m["H2"] - expected))
        records.append(
            match("product_H2_vs_closed_form", dict(base, point=worst["index"]), worst["H2"], expected, tol)
        )
    return _finish("minimality", records, config)


def _product_plane_curvatures(spec: ProductSphereSpec) -> np.ndarray:
    k, n = spec.k, spec.n
    K = np.zeros((n, n))
    K[:k, :k] = 1 / spec.r1**2
    K[k:, k:] = 1 / spec.r2**2
    np.fill_diagonal(K, 0.0)
    return K


def campaign_closed_form_match(config: CampaignConfig) -> DiscrepancyLedger:
    target = config.target
    if target is None:
        raise DomainError("match campaign needs a target")
    base = target_params(target)
    tol = config.tol("match")
    records: list[InequalityRecord] = []
    projective = isinstance(target, ProjectiveSpec)
    if projective:
        cat = cf.projective_closed_forms(target.field, target.n)
        holo, real = holomorphic_pairs(target.field, target.n)
    else:
        cat = cf.product_geometry(target)
        plane_K = _product_plane_curvatures(target)
    samples = _sample(config, frame="hermitian" if projective else "random")
    for m in samples:
        p = dict(base, point=m["index"])
        records.append(match("H2", p, m["H2"], cat["H2"], tol))
        records.append(match("alpha2", p, m["alpha2"], cat["alpha2"], tol))
        records.append(match("scalar", p, m["s_sum"], cat["scalar"], tol))
        records.append(match("gauss_identity", p, m["s_sum"], m["s_gauss"], config.tol("gauss")))
        records.append(compare("normal_residual", p, m["normal_residual"], config.tol("normal"), "<"))
        K = m["sectional"]
        if projective:
            if cat["K_real"] is not None:
                worst = max(real, key=lambda ij: abs(K[ij] - cat["K_real"]))
                records.append(match("K_real", dict(p, plane=list(worst)), K[worst], cat["K_real"], tol))
            if cat["K_hol"] is not None:
                worst = max(holo, key=lambda ij: abs(K[ij] - cat["K_hol"]))
                records.append(match("K_hol", dict(p, plane=list(worst)), K[worst], cat["K_hol"], tol))
            records.append(
                compare("conformal_defect", p, m["conformal_defect"], config.tol("conformal_defect"), "<")
            )
            records.append(
                match(
                    "conformal_factor_vs_expected",
                    p,
                    m["conformal_factor"],
                    cat["conformal_factor_expected"],
                    config.tol("conformal_expected"),
                )
            )
        else:
            iu, ju = np.triu_indices(target.n, k=1)
            diff = np.abs(K[iu, ju] - plane_K[iu, ju])
            w = int(np.argmax(diff))
            records.append(
                match("K_plane", dict(p, plane=[int(iu[w]), int(ju[w])]), K[iu[w], ju[w]], plane_K[iu[w], ju[w]], tol)
            )
    return _finish("closed_form_match", records, config)


def _random_homogeneous(field: FieldTag, n: int, rng, count: int) -> np.ndarray:
    v = np.zeros((count, n + 1, 4))
    v[..., : field.dim] = rng.standard_normal((count, n + 1, field.dim))
    return v


def _random_unit(field: FieldTag, rng, count: int) -> np.ndarray:
    lam = np.zeros((count, 4))
    lam[:, : field.dim] = rng.standard_normal((count, field.dim))
    return lam / np.linalg.norm(lam, axis=1, keepdims=True)


def norm_identity_error(field: FieldTag, n: int, rng, count: int = 1000) -> float:
    v = _random_homogeneous(field, n, rng, count) * rng.uniform(0.1, 3.0, (count, 1, 1))
    y = atlas.iota_padded(field, n, v)
    lhs = np.sum(y * y, axis=-1) * atlas.radius(n) ** 4
    rhs = np.sum(v * v, axis=(-1, -2)) ** 2
    return float(np.max(np.abs(lhs / rhs - 1)))


def invariance_error(field: FieldTag, n: int, rng, count: int = 200, handedness: int = 1) -> float:
    from .algebra import qmul

    v = _random_homogeneous(field, n, rng, count)
    v *= atlas.radius(n) / np.sqrt(np.sum(v * v, axis=(-1, -2), keepdims=True))
    lam = _random_unit(field, rng, count)[:, None, :]
    moved = qmul(np.broadcast_to(lam, v.shape), v, handedness)
    diff = atlas.iota_padded(field, n, moved, handedness) - atlas.iota_padded(field, n, v, handedness)
    return float(np.max(np.linalg.norm(diff, axis=-1)))


def fiber_collapse_error(field: FieldTag, n: int, rng, count: int = 100) -> float:
    if field.fiber_dim == 0:
        return 0.0
    spec = ProjectiveSpec(field, n)
    worst = 0.0
    for _ in range(count):
        v = atlas.random_sphere_point(spec.domain_dim, spec.radius, rng)
        dirs = np.array(atlas.fiber_directions(field, v))
        curve = jets.great_circle(v, dirs, spec.radius)
        _, d1, _ = jets.curve_jet(lambda x: atlas.iota_padded(field, n, atlas.to_padded(field, x)), curve)
        worst = max(worst, float(np.max(np.linalg.norm(d1, axis=-1))))
    return worst


def inclusion_error(src: FieldTag, dst: FieldTag, n: int, rng, count: int = 500) -> float:
    idx = atlas.inclusion_map(src, dst, n)
    v = _random_homogeneous(src, n, rng, count)
    small = atlas.iota_padded(src, n, v)
    big = atlas.iota_padded(dst, n, v)
    rest = np.ones(big.shape[-1], dtype=bool)
    rest[idx] = False
    return float(max(np.max(np.abs(big[..., idx] - small)), np.max(np.abs(big[..., rest]), initial=0.0)))


TOWER_PAIRS = [(FieldTag.R, FieldTag.C), (FieldTag.C, FieldTag.H), (FieldTag.R, FieldTag.H)]


def campaign_algebraic_identities(config: CampaignConfig, ladder_max: int = 12, inclusion_max: int = 4):
    rng = np.random.default_rng(config.seed)
    if isinstance(config.target, ProjectiveSpec):
        cases = [(config.target.field, config.target.n)]
    else:
        cases = [(f, n) for f in FieldTag for n in range(1, SAMPLING_CAPS[f] + 1)]
    records = []
    for f, n in cases:
        p = {"field": f.value, "n": n}
        records.append(
            compare(
                "norm_identity",
                p,
                norm_identity_error(f, n, rng, max(config.samples, 1000)),
                config.tol("norm_identity"),
                "<",
            )
        )
        records.append(
            compare("unit_group_invariance", p, invariance_error(f, n, rng), config.tol("invariance"), "<")
        )
        if f.fiber_dim:
            records.append(
                compare(
                    "fiber_collapse", p, fiber_collapse_error(f, n, rng, config.samples), config.tol("fiber"), "<"
                )
            )
    for src, dst in TOWER_PAIRS:
        for n in range(1, inclusion_max + 1):
            records.append(
                compare(
                    "inclusion_commutes",
                    {"from": src.value, "to": dst.value, "n": n},
                    inclusion_error(src, dst, n, rng),
                    config.tol("inclusion"),
                    "<",
                )
            )
    for f in FieldTag:
        for n in range(1, ladder_max + 1):
            records.append(
                match(
                    "dimension_ladder",
                    {"field": f.value, "n": n},
                    atlas.ambient_sphere_dim_recursive(f, n),
                    atlas.ambient_sphere_dim(f, n),
                    0.5,
                )
            )
    return _finish("algebraic_identities", records, config)


def simons_records(field: FieldTag, n: int) -> list[InequalityRecord]:
    rep = cf.projective_closed_forms(field, n)
    p = rep["codimension"]
    if n == 1 or (field is FieldTag.R and n == 2) or p < 1:
        return []
    return [
        greater(
            "simons_above_threshold",
            {"field": field.value, "n": n, "p": p},
            rep["alpha2"],
            rep["simons_threshold"],
        )
    ]


def homothety_grid_record(n: int, points: int = 101) -> InequalityRecord:
    """Worst case over A2 in [n, n(n-1)] of A2prime* - A2 <= n a_n (H2 = 0)."""
    grid = np.linspace(n, n * (n - 1), points)
    gains = [cf.homothety_identity(n, 0.0, a, 0.0)["forced_A2prime"] - a for a in grid]
    w = int(np.argmax(gains))
    return compare(
        "homothety_gain_below_gap",
        {"n": n},
        gains[w],
        n * cf.gap_constant(n),
        "<=",
        A2=float(grid[w]),
    )


def campaign_inequalities(n_max: int = 60, config: CampaignConfig | None = None) -> DiscrepancyLedger:
    if n_max < 4:
        raise DomainError("n_max must be >= 4")
    config = config or CampaignConfig()
    records: list[InequalityRecord] = []
    for n in range(3, n_max + 1):
        for k in range(1, n):
            records += cf.product_gap_records(n, k)
            records.append(
                compare(
                    "aubin_dominance", {"n": n, "k": k}, cf.minimal_product_yamabe(n, k), cf.aubin_bound(n), "<"
                )
            )
            if 2 <= k <= n - 2 and n != 2 * k:
                records.append(cf.besse_comparison(n, k))
        a_n = cf.gap_constant(n)
        records.append(compare("gap_constant_below_two", {"n": n}, a_n, 2.0, "<"))
        records.append(homothety_grid_record(n))
    for f in FieldTag:
        for n in range(1, min(GAP_CAPS[f], n_max) + 1):
            if n >= 2:
                records += cf.projective_gap_records(f, n)
            records += simons_records(f, n)
    return _finish("inequalities", records, config)


def gap_audit(n_max: int = 60, config: CampaignConfig | None = None) -> DiscrepancyLedger:
    """Defining expressions of the gap constants against their closing forms."""
    config = config or CampaignConfig()
    records = []
    for n in range(3, n_max + 1):
        for k in range(1, n):
            records += cf.gap_audit_records(n, k=k)
    for f in FieldTag:
        for n in range(2, min(GAP_CAPS[f], n_max) + 1):
            records += cf.gap_audit_records(n, field=f)
    return _finish("gap_audit", records, config)


def fk_minimizer(n: int, k: int) -> float:
    """Zero of the derivative of f_k on (0, 1)."""
    return brentq(lambda r: cf.f_profile(n, k, r)["fprime"], 1e-6, 1 - 1e-9, xtol=1e-15, rtol=1e-15)


def campaign_fk(n: int, k: int, grid: int = 10_000, config: CampaignConfig | None = None):
    """Calculus of f_k: endpoint value, unique critical point, monotone branch.

    For k > n/2 the factors are interchanged first (r -> sqrt(1 - r^2), k -> n - k),
    under which f_k is unchanged; the monotone branch is then [sqrt(k'/n), 1).
    """
    if not 2 <= k <= n - 2:
        raise DomainError("campaign_fk needs 2 <= k <= n-2")
    config = config or CampaignConfig()
    tol = config.tolerances
    params = {"n": n, "k": k}
    records = []
    r_sym = math.sqrt(k / n)
    records.append(match("fk_endpoint", params, cf.f_profile(n, k, r_sym)["f"], n * (n - 2), tol["fk_endpoint"]))
    r_bar = cf.einstein_radius(n, k)
    r_star = fk_minimizer(n, k)
    records.append(match("fk_minimizer", params, r_star, r_bar, tol["fk_minimizer"]))

    rs = np.linspace(0, 1, grid + 2)[1:-1]
    prof = cf.f_profile(n, k, rs)
    fp = prof["fprime"]
    changes = np.nonzero(np.sign(fp[:-1]) != np.sign(fp[1:]))[0]
    records.append(match("fk_sign_changes", params, len(changes), 1, 0.5))
    if len(changes) == 1:
        lo, hi = rs[changes[0]], rs[changes[0] + 1]
        records.append(
            compare("fk_sign_change_at_r_bar", dict(params, bracket=[float(lo), float(hi)]), abs(r_bar - 0.5 * (lo + hi)), hi - lo, "<=")
        )
    fs = prof["f"]
    records.append(match("fk_grid_argmin", params, rs[int(np.argmin(fs))], r_bar, 2.0 / grid))

    kk = k if 2 * k <= n else n - k
    branch = np.linspace(math.sqrt(kk / n), 1, grid + 1)[:-1]
    values = cf.f_profile(n, kk, branch)["f"]
    steps = np.diff(values)
    w = int(np.argmin(steps))
    records.append(
        greater(
            "fk_increasing_branch",
            dict(params, swapped=kk != k, step=w),
            float(steps[w]),
            0.0,
            strict=False,
        )
    )
    return _finish("fk", records, config)


def fk_literal_branch(n: int, k: int, grid: int = 10_000) -> InequalityRecord:
    """Monotone increase of f_k itself on [sqrt(k/n), 1), without the factor swap.

    Holds for k <= n/2; for k > n/2 the minimizer lies inside this interval.
    """
    branch = np.linspace(math.sqrt(k / n), 1, grid + 1)[:-1]
    steps = np.diff(cf.f_profile(n, k, branch)["f"])
    w = int(np.argmin(steps))
    return greater("fk_increasing_branch_literal", {"n": n, "k": k, "step": w}, float(steps[w]), 0.0, strict=False)
