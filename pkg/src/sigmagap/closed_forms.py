"""Closed-form catalog: sphere volumes, product-sphere geometry, the projective
table, Yamabe and sigma values, gap thresholds and the gap-constant inequality chains.

Volumes and products of the form ``(k/n)^{k/2}`` are formed in log space so the
sweeps stay finite for dimensions in the hundreds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import FieldTag
from .atlas import ProductSphereSpec, ambient_sphere_dim, radius
from .errors import DomainError
from .ledger import InequalityRecord, compare, greater, match

E = math.e


@dataclass(frozen=True)
class ClosedFormReport:
    context: str  # "product" | "projective"
    params: dict
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def as_dict(self):
        return {"context": self.context, "params": dict(self.params), "values": dict(self.values)}


# ---------------------------------------------------------------- volumes


def log_sphere_volume(n: int) -> float:
    if n < 0:
        raise DomainError("sphere dimension must be >= 0")
    return math.log(2.0) + 0.5 * (n + 1) * math.log(math.pi) - math.lgamma(0.5 * (n + 1))


def sphere_volume(n: int) -> float:
    """Volume omega_n of the unit round n-sphere."""
    if n < 1:
        raise DomainError("sphere_volume needs n >= 1")
    return math.exp(log_sphere_volume(n))


def aubin_bound(n: int) -> float:
    """Yamabe invariant of the round n-sphere, n(n-1) omega_n^{2/n}."""
    return n * (n - 1) * math.exp(2.0 * log_sphere_volume(n) / n)


def _log_minimal_product_volume(n: int, k: int) -> float:
    return (
        0.5 * k * math.log(k / n)
        + 0.5 * (n - k) * math.log((n - k) / n)
        + log_sphere_volume(k)
        + log_sphere_volume(n - k)
    )


def minimal_product_volume(n: int, k: int) -> float:
    """Volume of S^{n,k} = S^k(sqrt(k/n)) x S^{n-k}(sqrt((n-k)/n))."""
    return math.exp(_log_minimal_product_volume(n, k))


def minimal_product_yamabe(n: int, k: int) -> float:
    """lambda(S^{n,k}) = n(n-2) vol(S^{n,k})^{2/n}."""
    return n * (n - 2) * math.exp(2.0 * _log_minimal_product_volume(n, k) / n)


# ---------------------------------------------------------------- products


def product_geometry(spec: ProductSphereSpec) -> ClosedFormReport:
    n, k, r1, r2 = spec.n, spec.k, spec.r1, spec.r2
    q = r2 / r1
    H2 = k * k * q * q - 2 * k * (n - k) + (n - k) ** 2 / (q * q)
    alpha2 = k * q * q + (n - k) / (q * q)
    s = k * (k - 1) / r1**2 + (n - k) * (n - k - 1) / r2**2
    vol = sphere_volume(k) * sphere_volume(n - k) * r1**k * r2 ** (n - k)
    values = {
        "H2": H2,
        "alpha2": alpha2,
        "scalar": s,
        "volume": vol,
        "exterior": n * (n - 1),
        "principal_curvatures": [r2 / r1, -r1 / r2],
        "ricci_factor1": (k - 1) / r1**2,
        "ricci_factor2": (n - k - 1) / r2**2,
        "yamabe_functional": s * vol ** (2.0 / n) if n > 2 else math.nan,
        "lambda_minimal": minimal_product_yamabe(n, k) if n > 2 else math.nan,
        "aubin": aubin_bound(n),
        "is_minimal_configuration": spec.is_minimal_configuration,
    }
    return ClosedFormReport("product", {"n": n, "k": k, "r1": r1}, values)


def einstein_radius(n: int, k: int) -> float:
    return math.sqrt((k - 1) / (n - 2))


def volume_ratio_fn(n: int, k: int) -> Callable[[float], float]:
    """x -> ((k-x)/(n-2x))^{k/2} ((n-k-x)/(n-2x))^{(n-k)/2} on [0, 1]."""

    def ratio(x: float) -> float:
        return ((k - x) / (n - 2 * x)) ** (k / 2) * ((n - k - x) / (n - 2 * x)) ** ((n - k) / 2)

    return ratio


def einstein_data(n: int, k: int) -> dict:
    if not 1 <= k <= n - 1 or n < 3:
        raise DomainError(f"need n >= 3 and 1 <= k <= n-1, got n={n}, k={k}")
    ratio = volume_ratio_fn(n, k)
    wk = sphere_volume(k) * sphere_volume(n - k)
    return {
        "r_bar": einstein_radius(n, k),
        "volume_einstein": ratio(1.0) * wk,
        "volume_minimal": ratio(0.0) * wk,
        "ratio_fn": ratio,
        "equal_volumes": n == 2 * k,
    }


def f_profile(n: int, k: int, r: float) -> dict:
    """Scalar curvature f_k(r) of the product metric rescaled to the volume of
    S^{n,k}, its derivative in r, and the normalizing constant Omega.

    ``fprime`` is the derivative of ``f``; ``fprime_reversed`` is the same
    expression with the opposite overall sign (same zero set).
    ``r`` may be an array; the results then have its shape.
    """
    r = np.asarray(r, dtype=float)
    if not np.all((r > 0.0) & (r < 1.0)):
        raise DomainError(f"r must lie in (0, 1), got {r}")
    omega = math.exp(
        2.0 / n * (log_sphere_volume(k) + log_sphere_volume(n - k) - _log_minimal_product_volume(n, k))
    )
    u = (1 - r * r) / (r * r)
    A = u ** ((n - k) / n)
    B = u ** (-k / n)
    f = (k * (k - 1) * A + (n - k) * (n - k - 1) * B) * omega
    pref = 2 * k * (n - k) / (r * (1 - r * r) * n) * omega
    bracket = (k - 1) * A - (n - k - 1) * B
    out = {"f": f, "fprime": -pref * bracket, "fprime_reversed": pref * bracket}
    if r.ndim == 0:
        out = {key: float(v) for key, v in out.items()}
    return dict(out, omega=omega)


def besse_comparison(n: int, k: int) -> InequalityRecord:
    """lambda of the Einstein product metric against sigma(S^k x S^{n-k})."""
    if not 2 <= k <= n - 2:
        raise DomainError("besse comparison needs 2 <= k <= n-2")
    if n == 2 * k:
        raise DomainError("n = 2k is the equality case (Einstein metric is S^{n,k})")
    data = einstein_data(n, k)
    lam_e = n * (n - 2) * data["volume_einstein"] ** (2.0 / n)
    sigma = n * (n - 2) * data["volume_minimal"] ** (2.0 / n)
    return compare("besse_einstein_below_sigma", {"n": n, "k": k}, lam_e, sigma, "<", ratio=lam_e / sigma)


def ricci_infimum_product(n: int, k: int) -> float:
    """Infimum of Ricci(e, e) over unit vectors on S^{n,k}, ((k-1)/k) n for k <= n/2."""
    if k > n / 2:
        k = n - k
    if k < 2:
        raise DomainError("need 2 <= k <= n-2")
    return (k - 1) / k * n


# ---------------------------------------------------------------- projective


def _log_r_factor(n: int) -> float:
    """log of 2^{2/n} ((n+1)/2) sqrt((n-1)!) = 2^{2/n} r_n^2."""
    return 2.0 / n * math.log(2.0) + 2.0 * math.log(radius(n))


def projective_closed_forms(field, n: int) -> ClosedFormReport:
    """Closed-form curvature, volume and Yamabe data of the embedded P^n(F)."""
    field = FieldTag.parse(field)
    if n < 1:
        raise DomainError("n must be >= 1")
    d = field.dim
    npr = n * d
    logR = _log_r_factor(n)
    K = math.exp(-logR)
    if field is FieldTag.R:
        vol = math.exp(log_sphere_volume(n) + n * math.log(radius(n)))
        s = n * (n - 1) * K
        sigma = n * (n - 1) * 2 ** (-2.0 / n) * math.exp(2.0 * log_sphere_volume(n) / n)
        sigma_valid = n >= 3
    elif field is FieldTag.C:
        log_std = n * math.log(math.pi) - math.lgamma(n + 1)
        vol = math.exp(n * logR + log_std)
        s = 4 * n * (n + 1) * K
        sigma = 4 * n * (n + 1) * math.exp(log_std / n)
        sigma_valid = n >= 2
    else:
        log_std = 2 * n * math.log(math.pi) - math.lgamma(2 * n + 2)
        vol = math.exp(2 * n * logR + log_std)
        s = 16 * n * (n + 2) * K
        sigma = 16 * n * (n + 2) * math.exp(log_std / (2 * n))
        sigma_valid = n >= 1
    alpha2 = npr * (npr - 1) - s
    L = ambient_sphere_dim(field, n)
    p = L - npr
    values = {
        "nprime": npr,
        "r_n": radius(n),
        "L": L,
        "codimension": p,
        "K_real": K if n >= 2 else None,
        "K_hol": 4 * K if field is not FieldTag.R else None,
        "K_real_formula": K,
        "volume": vol,
        "alpha2": alpha2,
        "scalar": s,
        "H2": 0.0,
        "exterior": npr * (npr - 1),
        "yamabe": s * vol ** (2.0 / npr) if npr > 2 else math.nan,
        "sigma": sigma,
        "sigma_valid": sigma_valid,
        "aubin": aubin_bound(npr) if npr >= 2 else math.nan,
        "simons_threshold": npr * p / (2 * p - 1) if p >= 1 else None,
        "conformal_factor_expected": 2 ** (2.0 / n),
    }
    return ClosedFormReport("projective", {"field": field.value, "n": n}, values)


def recursive_map_pullback_factor(n: int) -> float:
    """Pullback factor c of the recursive map: iota^* g = c * g_{S(r_n)} on horizontals.

    The map is 2/sqrt((n+1)!) times v -> v v^* - |v|^2/(n+1) I in the Frobenius
    norm, whose differential stretches horizontal vectors by sqrt(2)|v|.
    """
    return 8.0 * radius(n) ** 2 / math.factorial(n + 1)


def standard_real_curvature(n: int) -> float:
    """Real sectional curvature of the minimal homothetic image, n / (2(n+1))."""
    return n / (2.0 * (n + 1))


def total_space_volume_ratio(field, n: int) -> float:
    """(2^{2/n})^{n'/2} vol(S(r_n)) / vol(fiber)."""
    field = FieldTag.parse(field)
    r = radius(n)
    dim_total = n * field.dim + field.fiber_dim
    log_total = log_sphere_volume(dim_total) + dim_total * math.log(r)
    if field is FieldTag.R:
        log_fiber = math.log(2.0)
    elif field is FieldTag.C:
        log_fiber = math.log(2 * math.pi * r)
    else:
        log_fiber = math.log(2 * math.pi**2 * r**3)
    return math.exp(field.dim * math.log(2.0) + log_total - log_fiber)


def aubin_and_simons(nprime: int, p: int) -> dict:
    return {
        "aubin": aubin_bound(nprime),
        "threshold": nprime * p / (2 * p - 1) if p >= 1 else None,
    }


def homothety_identity(nprime: int, H2: float, A2: float, A2prime: float) -> dict:
    """Yamabe bookkeeping between a constant-curvature embedding and its
    e^{2/n'} dilation that becomes minimal."""
    ext = nprime * (nprime - 1)
    grow = math.exp(2.0 / nprime)
    return {
        "residual": (ext + H2 - A2) - (ext - A2prime) * grow,
        "forced_A2prime": ext - (ext + H2 - A2) / grow,
    }


def gap_constant(n: int) -> float:
    """a_n = (n-2)(1 - e^{-2/n})."""
    return (n - 2) * (1 - math.exp(-2.0 / n))


# ---------------------------------------------------------------- gap-constant chains


def product_scale(n: int, k: int) -> float:
    """(omega_n / vol S^{n,k})^{2/n}."""
    return math.exp(2.0 / n * (log_sphere_volume(n) - _log_minimal_product_volume(n, k)))


def product_gap_records(n: int, k: int) -> list[InequalityRecord]:
    """Part (a): c_{n,k} in (0,1), b_n > 0 and b_n against the gap constant.

    b_n uses the closing expression (n-2)(1 - c_{n,k} e^{-2/n}); the undefined
    n' in the lower bound is read as n, and both exponent readings (2/n, 2/n')
    are recorded.
    """
    if n < 3 or not 1 <= k <= n - 1:
        raise DomainError("part (a) needs n >= 3 and 1 <= k <= n-1")
    params = {"n": n, "k": k}
    X = product_scale(n, k)
    c = X / (n - 2)
    b = (n - 2) * (1 - c * math.exp(-2.0 / n))
    recs = [
        greater("gap_a_c_positive", params, c, 0.0),
        compare("gap_a_c_below_one", params, c, 1.0, "<"),
        greater("gap_a_b_positive", params, b, 0.0),
    ]
    for variant, expo in (("2/n", 2.0 / n), ("2/n'", 2.0 / n)):
        bound = (n - 2) * (1 - math.exp(-expo))
        recs.append(
            greater(
                "gap_a_b_lower_bound",
                dict(params, variant=variant),
                b,
                bound,
                strict=False,
                note="n' read as n",
            )
        )
    return recs


def _projective_b(field: FieldTag, n: int, rep: ClosedFormReport) -> float:
    """b_n^F in the closing expression of each chain."""
    A = rep["alpha2"]
    s = rep["scalar"]
    npr = n * field.dim
    if field is FieldTag.R:
        tail = math.exp(-2.0 / n) * 2 ** (2.0 / n) / (n * (n - 1))
    elif field is FieldTag.C:
        ratio = 2 * math.pi * math.exp(log_sphere_volume(2 * n) - log_sphere_volume(2 * n + 1))
        tail = math.exp(-2.0 / npr) / (4 * n * (n + 1)) * ratio ** (2.0 / npr)
    else:
        ratio = 2 * math.pi**2 * math.exp(log_sphere_volume(4 * n) - log_sphere_volume(4 * n + 3))
        tail = math.exp(-2.0 / npr) / (16 * n * (n + 2)) * ratio ** (2.0 / npr)
    return s / A * (1 - tail)


def projective_gap_records(field, n: int) -> list[InequalityRecord]:
    """Part (b): b_n^F against both readings of the lower bound."""
    field = FieldTag.parse(field)
    if n < 2:
        raise DomainError("part (b) needs n >= 2")
    rep = projective_closed_forms(field, n)
    npr = n * field.dim
    A = rep["alpha2"]
    b = _projective_b(field, n, rep)
    params = {"field": field.value, "n": n}
    recs = []
    # n'(n'-1) - |alpha|^2 is the scalar curvature; use it directly, since the
    # difference cancels catastrophically once s is tiny (large n over R)
    for variant, expo in (("2/n'", 2.0 / npr), ("2/n", 2.0 / n)):
        bound = rep["scalar"] / A * (1 - math.exp(-expo))
        recs.append(
            greater("gap_b_b_lower_bound", dict(params, variant=variant), b, bound, strict=False)
        )
    return recs


def gap_ledger(n: int, k: int | None = None, field=None) -> list[InequalityRecord]:
    recs = []
    if k is not None:
        recs += product_gap_records(n, k)
    if field is not None:
        recs += projective_gap_records(field, n)
    if k is None and field is None:
        raise DomainError("give k (part a) and/or field (part b)")
    return recs


def gap_audit_records(n: int, k: int | None = None, field=None) -> list[InequalityRecord]:
    """Re-derive b from its defining expression and compare with the closing one.

    Not part of the chains themselves; these records expose where the closing
    expressions differ from the quantity the gap argument actually needs.
    """
    recs = []
    if k is not None:
        params = {"n": n, "k": k}
        X = product_scale(n, k)
        b_def = ((n - 1) * (1 - math.exp(-2.0 / n) * X)) - 1
        b_close = (n - 2) * (1 - X / (n - 2) * math.exp(-2.0 / n))
        recs.append(match("audit_a_defining_vs_closing", params, b_def, b_close, 1e-9))
        recs.append(greater("audit_a_defining_b_positive", params, b_def, 0.0))
        recs.append(greater("audit_a_defining_b_lower_bound", params, b_def, gap_constant(n), strict=False))
    if field is not None:
        field = FieldTag.parse(field)
        rep = projective_closed_forms(field, n)
        npr = n * field.dim
        A, s, vol = rep["alpha2"], rep["scalar"], rep["volume"]
        params = {"field": field.value, "n": n}
        X = math.exp(2.0 / npr * (log_sphere_volume(npr) - math.log(vol)))
        lhs_def = npr * (npr - 1) * math.exp(-2.0 / npr) * (math.exp(2.0 / npr) - X) - A
        if field is FieldTag.R:
            middle = s * (1 - (2 / E) ** (2.0 / n))
        elif field is FieldTag.C:
            ratio = 2 * math.pi * math.exp(log_sphere_volume(2 * n) - log_sphere_volume(2 * n + 1))
            middle = s * (1 - (n - 0.5) / (n + 1) * (ratio / E) ** (1.0 / n))
        else:
            ratio = 2 * math.pi**2 * math.exp(log_sphere_volume(4 * n) - log_sphere_volume(4 * n + 3))
            middle = s * (1 - (4 * n - 1) / (4 * (n + 2)) * (ratio / E) ** (1.0 / (2 * n)))
        # lhs_def cancels two terms of size n'(n'-1); compare on that scale
        recs.append(
            match("audit_b_defining_vs_middle", params, lhs_def, middle, 1e-9 * npr * (npr - 1))
        )
        recs.append(
            match("audit_b_defining_vs_closing", params, lhs_def / A, _projective_b(field, n, rep), 1e-9)
        )
        bound = s / A * (1 - math.exp(-2.0 / npr))
        recs.append(greater("audit_b_defining_b_lower_bound", params, lhs_def / A, bound, strict=False))
    return recs


# ---------------------------------------------------------------- sigma values


def sigma_table(max_n: int = 8) -> list[ClosedFormReport]:
    """Sigma invariants: S^k x S^{n-k}, S^1 x S^{n-1} and P^n(F) in their ranges."""
    out = []
    for n in range(3, max_n + 1):
        out.append(
            ClosedFormReport(
                "product",
                {"manifold": f"S^1xS^{n - 1}", "n": n, "k": 1},
                {"sigma": aubin_bound(n), "source": "aubin"},
            )
        )
        for k in range(2, n - 1):
            out.append(
                ClosedFormReport(
                    "product",
                    {"manifold": f"S^{k}xS^{n - k}", "n": n, "k": k},
                    {"sigma": minimal_product_yamabe(n, k), "source": "minimal product"},
                )
            )
    for field in FieldTag:
        for n in range(1, max_n + 1):
            rep = projective_closed_forms(field, n)
            if not rep["sigma_valid"]:
                continue
            out.append(
                ClosedFormReport(
                    "projective",
                    {"manifold": f"{field.value}P^{n}", "field": field.value, "n": n},
                    {"sigma": rep["sigma"], "yamabe_from_table": rep["yamabe"], "source": "einstein"},
                )
            )
    return out
