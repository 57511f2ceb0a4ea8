"""Periodic split-step Fourier integrator used to cross-check catalog families.

A bounded, x-periodic catalog solution is sampled at ``t0``, evolved with
Strang splitting and compared with the closed form at ``t1``.  Grids are
indexed ``values[i, j]`` at ``x_i = -Lx/2 + i*Lx/nx``, ``y_j = -Ly/2 + j*Ly/ny``.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field, replace

import numpy as np

from .catalog import PROFILES, CoupledPhys, SinglePhys, SolutionInstance
from .errors import IneligibleFamily, NonFiniteField, ParameterError

MAGIC = b"NLSG"
_HEADER = struct.Struct("<4sIIddd")


@dataclass(frozen=True)
class FieldGrid:
    nx: int
    ny: int
    Lx: float
    Ly: float
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for n in (self.nx, self.ny):
            if n < 1 or n & (n - 1):
                raise ParameterError("nx and ny must be powers of two")
        if not (self.Lx > 0 and self.Ly > 0):
            raise ParameterError("box lengths must be positive")
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.nx, self.ny):
            raise ParameterError(f"values must have shape ({self.nx}, {self.ny})")
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return -0.5 * self.Lx + self.Lx / self.nx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return -0.5 * self.Ly + self.Ly / self.ny * np.arange(self.ny)

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def mass(self) -> float:
        """Discrete L2 norm squared (cell-area weighted)."""
        dA = self.Lx * self.Ly / (self.nx * self.ny)
        return float(np.sum(np.abs(self.values) ** 2) * dA)

    def wavenumbers(self):
        kx = 2 * np.pi * np.fft.fftfreq(self.nx, d=self.Lx / self.nx)
        ky = 2 * np.pi * np.fft.fftfreq(self.ny, d=self.Ly / self.ny)
        return kx[:, None] ** 2 + ky[None, :] ** 2


# --------------------------------------------------------------------------
# eligibility and seeding


def _profile_of(inst: SolutionInstance):
    if inst.family == "C3":
        return PROFILES[inst.params["profile"]]
    return {"S7": PROFILES["sn"], "S8": PROFILES["cn"], "S9": PROFILES["dn"]}.get(inst.family)


def check_eligible(inst: SolutionInstance) -> None:
    """Raise :class:`IneligibleFamily` unless ``inst`` is bounded and x-periodic."""
    if not inst.descriptor.propagation:
        raise IneligibleFamily(
            f"{inst.family} is not eligible: unbounded or non-periodic in x")
    profile = _profile_of(inst)
    if profile is None:
        return
    if not profile.periodic_x:
        raise IneligibleFamily(
            f"{inst.family} with profile {profile.name} is unbounded (real poles)")
    if inst.params["m"] >= 1.0:
        raise IneligibleFamily("modulus m = 1 gives a non-periodic (solitary) profile")


def natural_period(inst: SolutionInstance) -> float:
    """Smallest x-period of an eligible instance."""
    check_eligible(inst)
    profile = _profile_of(inst)
    if profile is None:
        return 2 * math.pi
    return profile.period(inst.params["m"])


def seed_grid(inst: SolutionInstance, nx: int, ny: int, Lx: float | None = None,
              Ly: float = 2 * math.pi, t: float = 0.0, n_periods: int = 4):
    """Sample ``inst`` at time ``t``; a pair of grids for coupled families."""
    period = natural_period(inst)
    if Lx is None:
        Lx = n_periods * period
    elif not math.isclose(Lx / period, round(Lx / period), rel_tol=0, abs_tol=1e-9):
        raise ParameterError("Lx must be an integer multiple of the x-period")
    empty = FieldGrid(nx, ny, Lx, Ly, np.zeros((nx, ny)), t)
    X, Y = empty.mesh()
    vals = inst.field(np.full_like(X, t), X, Y)
    if inst.kind == "single":
        return replace(empty, values=vals)
    return tuple(replace(empty, values=v) for v in vals)


# --------------------------------------------------------------------------
# evolution


def split_step_evolve(g, phys, dt: float, steps: int):
    """Strang split-step evolution by ``steps`` steps of size ``dt``.

    ``g`` is a :class:`FieldGrid` for the single equation or a pair of
    grids for the coupled system.  Each step is a half nonlinear phase
    rotation, a full linear step in Fourier space and another half
    rotation, so the discrete mass is conserved up to rounding.
    """
    coupled = isinstance(phys, CoupledPhys)
    if coupled and not isinstance(g, (tuple, list)):
        raise ParameterError("coupled evolution needs a pair of grids")
    grids = tuple(g) if coupled else (g,)
    if coupled and len(grids) != 2:
        raise ParameterError("coupled evolution needs a pair of grids")
    if not coupled and not isinstance(phys, SinglePhys):
        raise ParameterError("phys must be SinglePhys or CoupledPhys")
    g0 = grids[0]
    k2 = g0.wavenumbers()
    if coupled:
        lin = (np.exp(-1j * phys.c1 * k2 * dt), np.exp(-1j * phys.c2 * k2 * dt))
        coef = ((phys.a1, phys.b1), (phys.a2, phys.b2))
    else:
        lin = (np.exp(-1j * phys.c * k2 * dt),)
        coef = ((phys.a, 0.0),)
    u = [gr.values.copy() for gr in grids]
    half = 0.5 * dt

    def nonlinear(u, h):
        dens = [np.abs(v) ** 2 for v in u]
        other = dens[1] if coupled else 0.0
        return [v * np.exp(1j * h * (cs * dens[0] + cx * other))
                for v, (cs, cx) in zip(u, coef)]

    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(int(steps)):
            u = nonlinear(u, half)
            u = [np.fft.ifft2(np.fft.fft2(v) * L) for v, L in zip(u, lin)]
            u = nonlinear(u, half)
            if not all(np.isfinite(v).all() for v in u):
                raise NonFiniteField("field became non-finite during evolution")
    t1 = g0.t + dt * int(steps)
    out = tuple(replace(gr, values=v, t=t1) for gr, v in zip(grids, u))
    return out if coupled else out[0]


def rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


@dataclass
class ConvergenceTable:
    family: str
    t0: float
    t1: float
    rows: list = field(default_factory=list)
    dt_slope: float = math.nan

    def to_csv(self) -> str:
        lines = ["axis,nx,dt,steps,error,mass_drift"]
        for r in self.rows:
            lines.append(f"{r['axis']},{r['nx']},{r['dt']!r},{r['steps']},"
                         f"{r['error']!r},{r['mass_drift']!r}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"family": self.family, "t0": self.t0, "t1": self.t1,
                "rows": list(self.rows), "dt_slope": self.dt_slope}


def _run(inst, nx, ny, dt, t0, t1, n_periods):
    steps = int(round((t1 - t0) / dt))
    if steps < 1 or not math.isclose(steps * dt, t1 - t0, rel_tol=1e-9):
        raise ParameterError("(t1 - t0) must be a positive multiple of dt")
    start = seed_grid(inst, nx, ny, t=t0, n_periods=n_periods)
    end = split_step_evolve(start, inst.phys, dt, steps)
    exact = seed_grid(inst, nx, ny, t=t1, n_periods=n_periods)
    starts = start if isinstance(start, tuple) else (start,)
    ends = end if isinstance(end, tuple) else (end,)
    exacts = exact if isinstance(exact, tuple) else (exact,)
    errors = [rel_l2(e.values, x.values) for e, x in zip(ends, exacts)]
    m0 = sum(g.mass() for g in starts)
    drift = abs(sum(g.mass() for g in ends) - m0) / m0
    return steps, errors, drift


def cross_validate(inst: SolutionInstance, t0: float = 0.0, t1: float = 0.1,
                   nx_ladder=(128, 256, 512), dt_ladder=(1e-3, 5e-4, 2.5e-4),
                   ny: int = 8, n_periods: int = 4) -> ConvergenceTable:
    """Compare split-step evolution with the closed form on a resolution ladder.

    The dt ladder runs at the finest ``nx``; the nx ladder at the finest
    ``dt``.  ``dt_slope`` is the least-squares slope of log error against
    log dt.
    """
    check_eligible(inst)
    table = ConvergenceTable(inst.family, t0, t1)
    nx_f, dt_f = max(nx_ladder), min(dt_ladder)
    for dt in dt_ladder:
        steps, errs, drift = _run(inst, nx_f, ny, dt, t0, t1, n_periods)
        table.rows.append({"axis": "dt", "nx": nx_f, "dt": dt, "steps": steps,
                           "error": max(errs), "errors": errs, "mass_drift": drift})
    for nx in nx_ladder:
        steps, errs, drift = _run(inst, nx, ny, dt_f, t0, t1, n_periods)
        table.rows.append({"axis": "nx", "nx": nx, "dt": dt_f, "steps": steps,
                           "error": max(errs), "errors": errs, "mass_drift": drift})
    dts = [r["dt"] for r in table.rows if r["axis"] == "dt"]
    errs = [r["error"] for r in table.rows if r["axis"] == "dt"]
    if len(dts) > 1:
        table.dt_slope = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    return table


# --------------------------------------------------------------------------
# export


def write_csv(g: FieldGrid, path) -> None:
    X, Y = g.mesh()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "x", "y", "re", "im"])
        for i in range(g.nx):
            for j in range(g.ny):
                v = g.values[i, j]
                w.writerow([i, j, repr(float(X[i, j])), repr(float(Y[i, j])),
                            repr(float(v.real)), repr(float(v.imag))])


def to_bytes(g: FieldGrid) -> bytes:
    """Little-endian ``NLSG`` record; samples ordered with ``j`` outermost."""
    head = _HEADER.pack(MAGIC, g.nx, g.ny, g.Lx, g.Ly, g.t)
    body = np.ascontiguousarray(g.values.T).astype("<c16").tobytes()
    return head + body


def from_bytes(blob: bytes) -> FieldGrid:
    magic, nx, ny, Lx, Ly, t = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ParameterError("not an NLSG grid file")
    data = np.frombuffer(blob, dtype="<c16", offset=_HEADER.size)
    if data.size != nx * ny:
        raise ParameterError("truncated NLSG grid file")
    return FieldGrid(nx, ny, Lx, Ly, data.reshape(ny, nx).T.copy(), t)


def write_binary(g: FieldGrid, path) -> None:
    with open(path, "wb") as fh:
        fh.write(to_bytes(g))


def read_binary(path) -> FieldGrid:
    with open(path, "rb") as fh:
        return from_bytes(fh.read())
