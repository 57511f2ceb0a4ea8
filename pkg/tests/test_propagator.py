import math

import numpy as np
import pytest

from nls_exact.catalog import CoupledPhys, SinglePhys, instantiate
from nls_exact.errors import IneligibleFamily, NonFiniteField, ParameterError
from nls_exact.propagator import (
    FieldGrid,
    check_eligible,
    cross_validate,
    from_bytes,
    natural_period,
    read_binary,
    rel_l2,
    seed_grid,
    split_step_evolve,
    to_bytes,
    write_binary,
    write_csv,
)
from nls_exact.special_functions import complete_k

S9 = instantiate("S9", {"a": 1, "c": 1}, {"m": 0.5})
TR1 = dict(a1=1, b1=0.64, c1=1, a2=-0.5, b2=-0.32, c2=0.7)


def grid(values, Lx=2 * math.pi, Ly=2 * math.pi, t=0.0):
    values = np.asarray(values, dtype=complex)
    return FieldGrid(values.shape[0], values.shape[1], Lx, Ly, values, t)


def test_constant_field_rotates_exactly():
    A, a = 0.8, -1.3
    g = grid(np.full((16, 8), A))
    out = split_step_evolve(g, SinglePhys(a, 0.9), 1e-2, 100)
    assert out.t == pytest.approx(1.0)
    assert np.max(np.abs(out.values - A * np.exp(1j * a * A * A * out.t))) <= 1e-12


def test_zero_field_stays_zero():
    out = split_step_evolve(grid(np.zeros((8, 8))), SinglePhys(1, 1), 1e-2, 10)
    assert not out.values.any()
    pair = split_step_evolve((grid(np.zeros((8, 8))),) * 2, CoupledPhys(**TR1), 1e-2, 10)
    assert not pair[0].values.any() and not pair[1].values.any()


def test_dn_snapshot_matches_closed_form():
    start = seed_grid(S9, 512, 8, t=0.0)
    assert start.Lx == pytest.approx(8 * complete_k(0.5))
    end = split_step_evolve(start, S9.phys, 1e-4, 1000)
    exact = seed_grid(S9, 512, 8, t=0.1)
    assert rel_l2(end.values, exact.values) <= 1e-5
    assert abs(end.mass() - start.mass()) / start.mass() <= 1e-12
    # x-only family stays uniform in y
    assert np.max(np.abs(end.values - end.values[:, :1])) < 1e-10


def test_time_reversal():
    start = seed_grid(S9, 128, 8)
    fwd = split_step_evolve(start, S9.phys, 1e-3, 100)
    back = split_step_evolve(fwd, S9.phys, -1e-3, 100)
    assert rel_l2(back.values, start.values) <= 1e-10
    assert back.t == pytest.approx(0.0, abs=1e-15)


def test_spectral_round_trip():
    rng = np.random.default_rng(0)
    v = rng.normal(size=(64, 16)) + 1j * rng.normal(size=(64, 16))
    assert np.max(np.abs(np.fft.ifft2(np.fft.fft2(v)) - v)) <= 1e-13


@pytest.mark.parametrize("fid,phys,m", [("S7", {"a": -2, "c": 1}, 0.5),
                                        ("S8", {"a": 1, "c": 1}, 0.7)])
def test_periodic_seeding(fid, phys, m):
    inst = instantiate(fid, phys, {"m": m})
    g = seed_grid(inst, 256, 4, t=0.3, n_periods=1)
    assert g.Lx == pytest.approx(4 * complete_k(m))
    # the sample one step past the last column wraps onto the first
    wrap = inst.field(0.3, g.x[-1] + g.Lx / g.nx, g.y[0])
    assert abs(wrap - g.values[0, 0]) <= 1e-12
    with pytest.raises(ParameterError):
        seed_grid(inst, 256, 4, Lx=1.5 * g.Lx)


def test_eligibility():
    for fid, phys, params in [("S5", {"a": -2, "c": 1}, {}),
                              ("S1", {"a": -2, "c": 1}, {}),
                              ("S9", {"a": 1, "c": 1}, {"m": 1.0})]:
        with pytest.raises(IneligibleFamily):
            check_eligible(instantiate(fid, phys, params))
    c3 = instantiate("C3", dict(a1=-1, b1=-1, c1=1, a2=-1, b2=-2, c2=1.5),
                     {"profile": "coth"})
    with pytest.raises(IneligibleFamily):
        check_eligible(c3)
    c4 = instantiate("C4", TR1, {"d": 0.8, "l": 0.9})
    assert natural_period(c4) == pytest.approx(2 * math.pi)


def test_dt_ladder_is_second_order():
    table = cross_validate(S9, t0=0.0, t1=0.1)
    assert 1.8 <= table.dt_slope <= 2.2
    assert all(r["mass_drift"] <= 1e-12 for r in table.rows)
    lines = table.to_csv().splitlines()
    assert lines[0] == "axis,nx,dt,steps,error,mass_drift" and len(lines) == 7


def test_coupled_trig_pair():
    c4 = instantiate("C4", TR1, {"d": 0.8, "l": 0.9})
    table = cross_validate(c4, t1=0.1, nx_ladder=(32, 64), dt_ladder=(1e-3, 5e-4))
    finest = [r for r in table.rows if r["nx"] == 64 and r["dt"] == 5e-4][0]
    assert max(finest["errors"]) < 1e-4


def test_blow_up_raises():
    g = grid(np.full((8, 8), 1e160))
    with pytest.raises(NonFiniteField):
        split_step_evolve(g, SinglePhys(1.0, 1.0), 1.0, 1)


def test_grid_validation():
    with pytest.raises(ParameterError):
        FieldGrid(6, 8, 1.0, 1.0, np.zeros((6, 8)))
    with pytest.raises(ParameterError):
        FieldGrid(8, 8, 0.0, 1.0, np.zeros((8, 8)))
    with pytest.raises(ParameterError):
        FieldGrid(8, 8, 1.0, 1.0, np.zeros((8, 4)))
    with pytest.raises(ParameterError):
        split_step_evolve(grid(np.zeros((8, 8))), CoupledPhys(**TR1), 1e-2, 1)


def test_binary_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    g = grid(rng.normal(size=(8, 4)) + 1j * rng.normal(size=(8, 4)), Lx=3.5, Ly=1.25, t=0.3)
    path = tmp_path / "g.nlsg"
    write_binary(g, path)
    blob = path.read_bytes()
    assert blob[:4] == b"NLSG" and len(blob) == 4 + 8 + 24 + 16 * 32
    # samples are stored with j outermost: the second record is (i=1, j=0)
    second = np.frombuffer(blob, "<f8", count=2, offset=36 + 16)
    assert second[0] == g.values[1, 0].real and second[1] == g.values[1, 0].imag
    back = read_binary(path)
    assert (back.nx, back.ny, back.Lx, back.Ly, back.t) == (8, 4, 3.5, 1.25, 0.3)
    assert np.array_equal(back.values, g.values)
    with pytest.raises(ParameterError):
        from_bytes(b"XXXX" + to_bytes(g)[4:])
    with pytest.raises(ParameterError):
        from_bytes(to_bytes(g)[:-16])


def test_csv_export(tmp_path):
    g = seed_grid(S9, 8, 2)
    path = tmp_path / "g.csv"
    write_csv(g, path)
    rows = path.read_text().splitlines()
    assert rows[0] == "i,j,x,y,re,im" and len(rows) == 17
    i, j, x, y, re, im = rows[4].split(",")
    assert (int(i), int(j)) == (1, 1)
    assert float(x) == g.x[1] and float(y) == g.y[1]
    assert complex(float(re), float(im)) == g.values[1, 1]
