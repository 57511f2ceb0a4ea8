import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nls_exact.catalog import (
    CoupledPhys,
    SinglePhys,
    amplitude_phase,
    describe,
    evaluate,
    instantiate,
    list_families,
    singular_distance,
)
from nls_exact.errors import (
    DegenerateParams,
    OutOfDomain,
    ParameterError,
    SignConditionViolated,
    SingularPoint,
)
from nls_exact.residual import sample_points, SamplingConfig
from nls_exact.serialization import from_spec, suite_entries

# sn(0.8 | 0.5) from DOP853 integration of the Jacobi system
SN_08_05 = 0.7042121415471664

SUITE = list(suite_entries())


def _valid_points(sol, n=20, seed=3):
    t, x, y = sample_points(SamplingConfig(n_points=4 * n, seed=seed))
    keep = sol.in_domain(t, x, y) & (sol.singular_distance(t, x, y) > 0.05)
    return t[keep][:n], x[keep][:n], y[keep][:n]


def test_enumeration():
    single = [d.id for d in list_families("single")]
    coupled = [d.id for d in list_families("coupled")]
    assert single == [f"S{i}" for i in range(21)]
    assert coupled == [f"C{i}" for i in range(1, 18)]
    assert [d.id for d in list_families()] == single + coupled
    assert "ac>0" in describe("S9").condition
    assert "a1b2-a2b1 != 0" in describe("C1").condition
    with pytest.raises(ParameterError):
        list_families("triple")
    with pytest.raises(ParameterError):
        describe("S99")


def test_every_family_in_suite():
    fams = {spec["family"] for _, spec, _ in SUITE}
    assert fams == {d.id for d in list_families()}


def test_c1_worked_example():
    phys = dict(a1=1, b1=-1, c1=1, a2=3, b2=-2, c2=1)
    inst = instantiate("C1", phys)
    # oracle: solve a_j X + b_j Y = -2 c_j directly
    X, Y = np.linalg.solve([[1.0, -1.0], [3.0, -2.0]], [-2.0, -2.0])
    i1, i2 = inst.derived["iota"]
    assert (X, Y) == pytest.approx((2.0, 4.0))
    assert (i1**2, i2**2) == pytest.approx((X, Y), rel=1e-15)
    xi, _, eta, _ = inst.amplitude_phase(0.5, 2.0, 0.1)
    assert (xi, eta) == pytest.approx((math.sqrt(2) / 2, 1.0), rel=1e-15)
    neg = instantiate("C1", phys, signs=(-1, 1))
    assert neg.amplitude_phase(0.5, 2.0, 0.1)[0] == pytest.approx(-math.sqrt(2) / 2)


def test_sign_and_degeneracy_errors():
    with pytest.raises(SignConditionViolated, match="requires ac>0"):
        instantiate("S9", {"a": -1, "c": 1}, {"m": 0.5})
    with pytest.raises(SignConditionViolated, match="requires ac<0"):
        instantiate("S3", {"a": 1, "c": 1})
    with pytest.raises(DegenerateParams):
        instantiate("S12", {"a": -2, "c": 1}, {"l1": 0, "l2": 0, "l3": 1})
    with pytest.raises(DegenerateParams):
        instantiate("C1", dict(a1=1, b1=2, c1=1, a2=2, b2=4, c2=1))
    with pytest.raises(SignConditionViolated):
        instantiate("C1", dict(a1=1, b1=1, c1=1, a2=1, b2=2, c2=1.5))
    with pytest.raises(SignConditionViolated):
        instantiate("C4", dict(a1=1, b1=0.5, c1=1, a2=1, b2=0.64, c2=1), {"d": 0.8, "l": 1})
    with pytest.raises(DegenerateParams):
        instantiate("C8", dict(a1=1, b1=1, c1=1, a2=1, b2=1, c2=1),
                    dict(d=0, d1=0.2, d2=0.2, k1=1, k2=1))
    with pytest.raises(DegenerateParams):
        instantiate("S11", {"a": 1, "c": 1}, {"b": 1, "d": 0})


def test_parameter_validation():
    with pytest.raises(ParameterError):
        instantiate("S7", {"a": -2, "c": 1})
    with pytest.raises(ParameterError):
        instantiate("S7", {"a": -2, "c": 1}, {"m": 0.5, "q": 1})
    with pytest.raises(ParameterError):
        instantiate("S7", {"a": -2, "c": 1}, {"m": "x"})
    with pytest.raises(ParameterError):
        instantiate("S7", {"a": -2, "c": 0}, {"m": 0.5})
    with pytest.raises(ParameterError):
        instantiate("C1", {"a": -2, "c": 1})
    with pytest.raises(ParameterError):
        instantiate("C3", dict(a1=1, b1=1, c1=1, a2=1, b2=2, c2=1.5), {"profile": "exp"})
    with pytest.raises(ParameterError):
        instantiate("C3", dict(a1=-1, b1=-1, c1=1, a2=-1, b2=-2, c2=1.5),
                    {"profile": "tan", "variant": "alternate"})
    with pytest.raises(ParameterError):
        instantiate("C1", dict(a1=1, b1=-1, c1=1, a2=3, b2=-2, c2=1), signs=(1, 0))
    with pytest.raises(Exception):
        instantiate("S7", {"a": -2, "c": 1}, {"m": 1.5})


def test_point_examples():
    s1 = instantiate("S1", {"a": -2, "c": 1})
    assert evaluate(s1, 0.7, 1.0, 5.0) == 1 + 0j
    s3 = instantiate("S3", {"a": -2, "c": 1})
    assert evaluate(s3, 0.0, math.pi / 4, 0.0) == pytest.approx(1 + 0j, abs=1e-15)
    s7 = instantiate("S7", {"a": -2, "c": 1}, {"m": 0.5})
    v = evaluate(s7, 0.3, 0.8, 0.0)
    assert abs(v) == pytest.approx(0.5 * SN_08_05, abs=1e-12)
    assert v == pytest.approx(0.5 * SN_08_05 * np.exp(-1.25 * 0.3j), abs=1e-12)


def test_amplitude_phase_examples():
    s10 = instantiate("S10", {"a": 1, "c": 1}, {"b": 1})
    assert amplitude_phase(s10, 1.0, 0.0, 0.3) == (1.0, 0.0)
    s0 = instantiate("S0", {"a": 1, "c": 1}, {"d": 1})
    t, x, y = 0.4, 0.3, -0.2
    xi, ph = amplitude_phase(s0, t, x, y)
    assert xi == pytest.approx(1 / t)
    assert ph == pytest.approx((x * x + y * y) / (4 * t) - 1 / t)


def test_domain_and_singular_errors():
    s10 = instantiate("S10", {"a": 1, "c": 1}, {"b": 1})
    with pytest.raises(OutOfDomain):
        s10.evaluate(-0.5, 0.0, 0.0)
    s1 = instantiate("S1", {"a": -2, "c": 1})
    with pytest.raises(SingularPoint):
        s1.evaluate(0.1, 0.0, 0.0)
    assert s1.evaluate(0.1, 0.01, 0.0, exclusion=1e-3) == pytest.approx(100.0)
    with pytest.raises(SingularPoint):
        s1.evaluate(0.1, 0.01, 0.0, exclusion=0.05)


def test_singular_distance_examples():
    s1 = instantiate("S1", {"a": -2, "c": 1})
    assert singular_distance(s1, 0.3, 0.5, 2.0) == 0.5
    s3 = instantiate("S3", {"a": -2, "c": 1})
    assert singular_distance(s3, 0.0, math.pi / 2, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert singular_distance(s3, 0.0, 0.0, 0.0) == pytest.approx(math.pi / 2)
    s9 = instantiate("S9", {"a": 1, "c": 1}, {"m": 0.5})
    assert singular_distance(s9, 0.5, 1.0, 1.0) == math.inf


def _pole_planes_distance(l1, l2, l3, t, x, y, kmax=2000):
    """Enumeration oracle: the tan-profile poles are the planes
    l1 x + l2 y + (l3 - s) t = 0, s = pi/2 + k pi; scan every k and the t = 0
    boundary explicitly."""
    s = math.pi / 2 + math.pi * np.arange(-kmax, kmax + 1)
    n = np.stack([l3 - s, np.full_like(s, l1), np.full_like(s, l2)])
    d = np.abs(n[0] * t + n[1] * x + n[2] * y) / np.linalg.norm(n, axis=0)
    return min(float(d.min()), abs(t))


def test_pole_lattice_distance_vs_enumeration():
    q = {"l1": 0.3, "l2": 0.2, "l3": 0.1}
    inst = instantiate("S14", {"a": -2, "c": 1}, q)
    rng = np.random.default_rng(7)
    pts = np.column_stack([rng.uniform(0.01, 2, 300), rng.uniform(-6, 6, 300),
                           rng.uniform(-6, 6, 300)])
    got = inst.singular_distance(pts[:, 0], pts[:, 1], pts[:, 2])
    ref = [_pole_planes_distance(0.3, 0.2, 0.1, *p) for p in pts]
    assert np.max(np.abs(got - ref)) <= 1e-6


def test_pole_distance_dense_line_scan():
    # the S3 poles are planes x = const, so a dense scan along x is exact
    inst = instantiate("S3", {"a": -2, "c": 1})
    xs = np.linspace(-6, 6, 20001)
    w = np.abs(np.cos(xs))
    for x0 in (-2.0, 0.3, 1.4, 4.0):
        along = np.min(np.abs(xs[w < 1e-3] - x0))
        assert inst.singular_distance(0.0, x0, 0.0) == pytest.approx(along, abs=2e-3)


@pytest.mark.parametrize("name,spec,box", SUITE, ids=[s[0] for s in SUITE])
def test_suite_instance_consistency(name, spec, box):
    inst = from_spec(spec)
    t, x, y = _valid_points(inst)
    ap = inst.amplitude_phase(t, x, y)
    val = inst.evaluate(t, x, y)
    vals = val if isinstance(val, tuple) else (val,)
    for k, v in enumerate(vals):
        xi, ph = ap[2 * k], ap[2 * k + 1]
        assert np.allclose(xi * np.exp(1j * ph), v, rtol=1e-13, atol=0)
        assert np.allclose(np.abs(v), np.abs(xi), rtol=1e-13)
    again = inst.evaluate(t, x, y)
    again = again if isinstance(again, tuple) else (again,)
    assert all(np.array_equal(a, b) for a, b in zip(vals, again))


@pytest.mark.parametrize("name,spec,box", [s for s in SUITE if s[1]["family"].startswith("C")],
                         ids=[s[0] for s in SUITE if s[1]["family"].startswith("C")])
def test_balance_invariant(name, spec, box):
    inst = from_spec(spec)
    if "iota" not in inst.derived:
        pytest.skip("no cross amplitudes")
    i1, i2 = inst.derived["iota"]
    p = inst.phys
    # balance is the cubic coefficient of the profile ODE f'' = balance f^3 + ...
    k = inst.derived["balance"] * inst.derived.get("theta", 1.0)
    assert p.a1 * i1**2 + p.b1 * i2**2 + k * p.c1 == pytest.approx(0, abs=1e-12)
    assert p.a2 * i1**2 + p.b2 * i2**2 + k * p.c2 == pytest.approx(0, abs=1e-12)


REDUCTIONS = [
    ("C1", {}, "S1", {}),
    ("C2", {}, "S2", {}),
    ("C3", {"profile": "tan"}, "S3", {}),
    ("C3", {"profile": "sec"}, "S4", {}),
    ("C3", {"profile": "coth"}, "S5", {}),
    ("C3", {"profile": "csch"}, "S6", {}),
    ("C3", {"profile": "sn", "m": 0.6}, "S7", {"m": 0.6}),
    ("C3", {"profile": "cn", "m": 0.6}, "S8", {"m": 0.6}),
    ("C3", {"profile": "dn", "m": 0.6}, "S9", {"m": 0.6}),
    ("C15", {"l1": 0.3, "l2": 0.2, "l3": 0.1}, "S12", {"l1": 0.3, "l2": 0.2, "l3": 0.1}),
    ("C16", {"d1": 0.4, "d2": -0.3}, "S13", {"l4": 0.4, "l5": -0.3}),
] + [
    ("C17", {"profile": pr, "l1": 0.3, "l2": 0.2, "l3": 0.1, **({"m": 0.6} if pr in "sncndn" else {})},
     fid, {"l1": 0.3, "l2": 0.2, "l3": 0.1, **({"m": 0.6} if pr in "sncndn" else {})})
    for pr, fid in (("tan", "S14"), ("sec", "S15"), ("coth", "S16"), ("csch", "S17"),
                    ("sn", "S18"), ("cn", "S19"), ("dn", "S20"))
]


@pytest.mark.parametrize("cfam,cq,sfam,sq", REDUCTIONS, ids=[r[0] + "->" + r[2] for r in REDUCTIONS])
def test_coupled_reduces_to_single(cfam, cq, sfam, sq):
    focusing = cq.get("profile") in ("cn", "dn")
    a1 = 1.3 if focusing else -1.3
    b2 = 0.9 if focusing else -0.9
    # b1 = a2 = 0 decouples psi from phi
    phys = dict(a1=a1, b1=0.0, c1=0.7, a2=0.0, b2=b2, c2=1.1)
    c = instantiate(cfam, phys, cq)
    s = instantiate(sfam, {"a": a1, "c": 0.7}, sq)
    t, x, y = _valid_points(s)
    xi_c, ph_c = c.amplitude_phase(t, x, y)[:2]
    xi_s, ph_s = s.amplitude_phase(t, x, y)
    assert np.allclose(xi_c, xi_s, rtol=1e-12, atol=0)
    assert np.allclose(ph_c, ph_s, rtol=1e-12, atol=1e-14)


SWAPPABLE = [s for s in SUITE if s[1]["family"] in ("C1", "C2", "C3", "C15", "C16", "C17")
             and s[1]["params"].get("variant", "standard") == "standard"]


@pytest.mark.parametrize("name,spec,box", SWAPPABLE, ids=[s[0] for s in SWAPPABLE])
def test_swap_exchanges_components(name, spec, box):
    inst = from_spec(spec)
    swapped = instantiate(spec["family"], inst.phys.swapped(), spec["params"],
                          signs=inst.signs[::-1])
    t, x, y = _valid_points(inst)
    u, v = inst.evaluate(t, x, y)
    su, sv = swapped.evaluate(t, x, y)
    assert np.array_equal(su, v) and np.array_equal(sv, u)


def test_phys_swap_is_involution():
    p = CoupledPhys(1, 2, 3, 4, 5, 6)
    assert p.swapped().swapped() == p
    assert SinglePhys(1, 2).to_dict() == {"a": 1.0, "c": 2.0}


@settings(max_examples=60, deadline=None)
@given(a=st.floats(-5, -0.1), c=st.floats(0.1, 5), m=st.floats(0, 1))
def test_sn_family_amplitude_bound(a, c, m):
    # |psi| = m sqrt(-2c/a) |sn| never exceeds m sqrt(-2c/a)
    inst = instantiate("S7", {"a": a, "c": c}, {"m": m})
    x = np.linspace(-3, 3, 25)
    xi, ph = inst.amplitude_phase(np.full_like(x, 0.5), x, np.zeros_like(x))
    assert np.all(np.abs(xi) <= m * math.sqrt(-2 * c / a) * (1 + 1e-12))
    assert np.allclose(ph, -(1 + m * m) * c * 0.5)
