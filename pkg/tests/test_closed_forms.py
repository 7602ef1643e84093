import math

import numpy as np
import pytest

from sigmagap import closed_forms as cf
from sigmagap.algebra import FieldTag
from sigmagap.atlas import ProductSphereSpec
from sigmagap.errors import DomainError

PI = math.pi
CAPS = {FieldTag.R: 30, FieldTag.C: 20, FieldTag.H: 15}
ALL_PROJECTIVE = [(f, n) for f in FieldTag for n in range(1, CAPS[f] + 1)]


def test_sphere_volumes():
    assert cf.sphere_volume(1) == pytest.approx(2 * PI, rel=1e-15)
    assert cf.sphere_volume(2) == pytest.approx(4 * PI, rel=1e-15)
    assert cf.sphere_volume(3) == pytest.approx(2 * PI**2, rel=1e-15)
    assert cf.sphere_volume(4) == pytest.approx(8 * PI**2 / 3, rel=1e-15)
    assert math.isfinite(cf.log_sphere_volume(400))
    with pytest.raises(DomainError):
        cf.sphere_volume(0)


def test_aubin_bound_in_dimension_four():
    assert cf.aubin_bound(4) == pytest.approx(12 * math.sqrt(8 * PI**2 / 3), rel=1e-14)


def test_minimal_product_yamabe_s2xs2():
    assert cf.minimal_product_yamabe(4, 2) == pytest.approx(16 * PI, rel=1e-14)


def test_nonminimal_product_geometry():
    rep = cf.product_geometry(ProductSphereSpec(3, 1, 0.6))
    assert rep["H2"] == pytest.approx(1 / 36, abs=1e-14)
    assert rep["alpha2"] == pytest.approx(0.64 / 0.36 + 2 * 0.36 / 0.64, rel=1e-14)
    assert rep["scalar"] == pytest.approx(2 / 0.64, rel=1e-14)
    # Gauss relation
    assert rep["scalar"] == pytest.approx(6 + rep["H2"] - rep["alpha2"], rel=1e-13)


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (7, 3), (3, 1)])
def test_minimal_product_has_alpha2_n(n, k):
    rep = cf.product_geometry(ProductSphereSpec.minimal(n, k))
    assert rep["H2"] == pytest.approx(0, abs=1e-12)
    assert rep["alpha2"] == pytest.approx(n, rel=1e-13)
    assert rep["scalar"] == pytest.approx(n * (n - 2), rel=1e-13)


def test_einstein_data_examples():
    d = cf.einstein_data(5, 2)
    ratio = d["ratio_fn"]
    assert ratio(0) == pytest.approx(0.18590, abs=5e-6)
    assert ratio(1) == pytest.approx(0.18144, abs=5e-6)
    h = 1e-4
    assert abs((ratio(h) - ratio(0)) / h) < 1e-3  # one-sided step at the boundary
    assert abs((ratio(h) - ratio(-h)) / (2 * h)) < 1e-6
    xs = np.linspace(0, 1, 200)
    assert np.all(np.diff([ratio(x) for x in xs]) < 0)
    eq = cf.einstein_data(6, 3)
    assert eq["equal_volumes"] and eq["volume_einstein"] == pytest.approx(eq["volume_minimal"])
    assert eq["r_bar"] == pytest.approx(math.sqrt(0.5))


def test_f_profile_endpoint_example():
    p = cf.f_profile(4, 2, 1 / math.sqrt(2))
    assert p["omega"] == pytest.approx(2.0, rel=1e-14)
    assert p["f"] == pytest.approx(8.0, rel=1e-14)
    with pytest.raises(DomainError):
        cf.f_profile(4, 2, 1.0)


@pytest.mark.parametrize("n,k,r", [(7, 3, 0.3), (7, 3, 0.8), (10, 2, 0.5), (10, 8, 0.2)])
def test_f_derivative_against_finite_differences(n, k, r):
    h = 1e-6
    fd = (cf.f_profile(n, k, r + h)["f"] - cf.f_profile(n, k, r - h)["f"]) / (2 * h)
    p = cf.f_profile(n, k, r)
    assert p["fprime"] == pytest.approx(fd, rel=1e-6)
    assert p["fprime_reversed"] == -p["fprime"]


def test_f_critical_point():
    from scipy.optimize import brentq

    root = brentq(lambda r: cf.f_profile(7, 3, r)["fprime"], 0.1, 0.9, xtol=1e-14)
    assert root == pytest.approx(math.sqrt(2 / 5), abs=1e-9)
    for n, k in [(8, 3), (12, 9)]:
        assert abs(cf.f_profile(n, k, cf.einstein_radius(n, k))["fprime"]) < 1e-9


def test_f_profile_symmetric_under_factor_swap():
    for r in (0.2, 0.5, 0.9):
        a = cf.f_profile(9, 7, r)["f"]
        b = cf.f_profile(9, 2, math.sqrt(1 - r * r))["f"]
        assert a == pytest.approx(b, rel=1e-13)


def test_projective_examples():
    rp2 = cf.projective_closed_forms("R", 2)
    assert rp2["K_real"] == pytest.approx(1 / 3)
    assert rp2["volume"] == pytest.approx(6 * PI)
    assert rp2["alpha2"] == pytest.approx(4 / 3)
    assert rp2["scalar"] == pytest.approx(2 / 3)
    cp2 = cf.projective_closed_forms("C", 2)
    assert cp2["volume"] == pytest.approx(9 * PI**2 / 2)
    assert cp2["alpha2"] == pytest.approx(4) and cp2["scalar"] == pytest.approx(8)
    assert cp2["K_hol"] == pytest.approx(4 / 3)
    assert cp2["sigma"] == pytest.approx(24 * PI / math.sqrt(2), rel=1e-13)
    hp1 = cf.projective_closed_forms("H", 1)
    assert hp1["volume"] == pytest.approx(8 * PI**2 / 3)
    assert hp1["alpha2"] == pytest.approx(0, abs=1e-13) and hp1["scalar"] == pytest.approx(12)
    assert hp1["sigma"] == pytest.approx(48 * PI / math.sqrt(6), rel=1e-13)
    assert hp1["sigma"] == pytest.approx(cf.aubin_bound(4), rel=1e-13)
    assert hp1["K_real"] is None and cf.projective_closed_forms("R", 1)["K_real"] is None


@pytest.mark.parametrize("field,n", ALL_PROJECTIVE)
def test_gauss_coherence(field, n):
    rep = cf.projective_closed_forms(field, n)
    npr = rep["nprime"]
    assert abs(rep["scalar"] - (npr * (npr - 1) - rep["alpha2"])) <= 1e-12 * max(1, npr * npr)


@pytest.mark.parametrize("field,n", ALL_PROJECTIVE)
def test_volume_consistency(field, n):
    rep = cf.projective_closed_forms(field, n)
    assert cf.total_space_volume_ratio(field, n) == pytest.approx(rep["volume"], rel=1e-12)


def test_volume_consistency_examples():
    r2 = cf.projective_closed_forms("C", 2)["r_n"]
    assert 4 * PI**3 * r2**4 / (2 * PI) == pytest.approx(9 * PI**2 / 2)
    assert 16 * cf.sphere_volume(7) / (2 * PI**2) == pytest.approx(8 * PI**2 / 3)


def test_pullback_factor_matches_expected_only_for_small_n():
    for n in (1, 2):
        assert cf.recursive_map_pullback_factor(n) == pytest.approx(2 ** (2 / n), rel=1e-14)
        assert cf.standard_real_curvature(n) == pytest.approx(cf.projective_closed_forms("R", n)["K_real_formula"])
    assert cf.recursive_map_pullback_factor(3) != pytest.approx(2 ** (2 / 3), rel=1e-3)


def test_aubin_and_simons():
    d = cf.aubin_and_simons(4, 1)
    assert d["aubin"] == pytest.approx(12 * math.sqrt(8 * PI**2 / 3))
    assert d["threshold"] == 4
    assert cf.aubin_and_simons(4, 0)["threshold"] is None
    cp2 = cf.projective_closed_forms("C", 2)
    assert cp2["codimension"] == 3
    assert cp2["simons_threshold"] == pytest.approx(2.4)
    assert cp2["simons_threshold"] < cp2["alpha2"]


def test_homothety_identity():
    h = cf.homothety_identity(4, 0.0, 4.0, 0.0)
    assert h["forced_A2prime"] == pytest.approx(12 - 8 * math.exp(-0.5), rel=1e-14)
    assert h["forced_A2prime"] == pytest.approx(7.1478, abs=5e-5)
    again = cf.homothety_identity(4, 0.0, 4.0, h["forced_A2prime"])
    assert abs(again["residual"]) < 1e-12


def test_gap_constant():
    assert cf.gap_constant(4) == pytest.approx(2 * (1 - math.exp(-0.5)))
    assert cf.gap_constant(4) == pytest.approx(0.78694, abs=5e-6)
    assert all(cf.gap_constant(n) < 2 for n in range(3, 500))


def test_gap_ledger_examples():
    recs = cf.gap_ledger(4, k=2)
    c = math.sqrt(2 / 3) / 2
    assert cf.product_scale(4, 2) / 2 == pytest.approx(c, rel=1e-14)
    assert c == pytest.approx(0.40825, abs=5e-6)
    assert all(r.passed for r in recs)
    assert {r.params.get("variant") for r in recs} >= {"2/n", "2/n'"}
    assert all(r.passed for n in range(3, 31) for r in cf.gap_ledger(n, field="R"))
    with pytest.raises(DomainError):
        cf.gap_ledger(4)


def test_gap_audit_exposes_defining_expression():
    recs = {r.name: r for r in cf.gap_audit_records(5, k=2)}
    assert not recs["audit_a_defining_b_lower_bound"].passed
    assert recs["audit_a_defining_b_positive"].passed
    middle = {r.name: r for r in cf.gap_audit_records(4, field="C")}
    assert middle["audit_b_defining_vs_middle"].passed


def test_sigma_table():
    table = {rep.params["manifold"]: rep["sigma"] for rep in cf.sigma_table(5)}
    assert table["RP^3"] == pytest.approx(6 * PI ** (4 / 3), rel=1e-13)
    assert table["RP^3"] == pytest.approx(27.607, abs=1e-3)
    assert table["S^2xS^2"] == pytest.approx(16 * PI, rel=1e-13)
    assert table["S^1xS^4"] == pytest.approx(cf.aubin_bound(5))
    assert table["CP^2"] == pytest.approx(24 * PI / math.sqrt(2), rel=1e-13)
    assert table["HP^1"] == pytest.approx(cf.aubin_bound(4), rel=1e-13)
    assert "RP^2" not in table and "CP^1" not in table


def test_besse_comparison():
    r = cf.besse_comparison(5, 2)
    assert r.passed and r.detail["ratio"] == pytest.approx(0.99033, abs=1e-4)
    assert cf.besse_comparison(6, 2).passed
    with pytest.raises(DomainError):
        cf.besse_comparison(6, 3)


def test_ricci_infimum():
    assert cf.ricci_infimum_product(7, 3) == pytest.approx(14 / 3)
    assert cf.ricci_infimum_product(4, 2) == 2
    assert cf.ricci_infimum_product(7, 4) == cf.ricci_infimum_product(7, 3)
    vals = [cf.ricci_infimum_product(n, 2) for n in range(4, 101)]
    assert np.all(np.diff(vals) > 0) and vals[-1] == 50


def test_aubin_dominance():
    for n in range(3, 61):
        for k in range(1, n):
            assert cf.minimal_product_yamabe(n, k) < cf.aubin_bound(n)
