"""Finite-difference residual certification of candidate solutions.

The relative residual at a point is ``|R| / (sum of term magnitudes)``,
which is invariant under the amplitude/coordinate scaling symmetry and
stays meaningful near singular surfaces where every term blows up.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import qmc

from .catalog import CoupledPhys, SinglePhys, Solution
from .errors import AllPointsSkipped, DomainExceeded, ParameterError, StencilNearSingularity

FLOOR = 1e-30

# central stencils on offsets -n..n
FIRST = {
    4: np.array([1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12]),
    6: np.array([-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60]),
    8: np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280]),
}
SECOND = {
    4: np.array([-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12]),
    6: np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90]),
    8: np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560]),
}

DEFAULT_BOX = ((0.1, 1.0), (-3.0, 3.0), (-3.0, 3.0))


def fd_weights(deriv: int, order: int) -> np.ndarray:
    """Central FD weights for ``deriv`` in {1, 2} at accuracy ``order``."""
    table = FIRST if deriv == 1 else SECOND
    if deriv not in (1, 2) or order not in table:
        raise ParameterError(f"no central stencil for derivative {deriv}, order {order}")
    return table[order]


@dataclass(frozen=True)
class SamplingConfig:
    n_points: int = 200
    box: tuple = DEFAULT_BOX
    exclusion_radius: float = 0.05
    fd_order: int = 8
    h_base: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.fd_order not in FIRST:
            raise ParameterError("fd_order must be one of 4, 6, 8")
        if self.n_points < 1:
            raise ParameterError("n_points must be positive")
        box = tuple(tuple(float(v) for v in iv) for iv in self.box)
        if len(box) != 3 or any(lo >= hi for lo, hi in box):
            raise ParameterError("box needs three increasing (lo, hi) intervals")
        object.__setattr__(self, "box", box)
        if not self.exclusion_radius > 3.0 * self.h_base * self.fd_order:
            raise ParameterError(
                "exclusion_radius must exceed 3*h_base*fd_order so stencils "
                "cannot straddle a singular surface")

    @property
    def half_width(self) -> int:
        return self.fd_order // 2


@dataclass
class ResidualReport:
    max_rel: float
    mean_rel: float
    n_evaluated: int
    n_skipped: int
    worst_point: tuple
    observed_order: float
    component_max: tuple = ()
    label: str = ""
    params_hash: str = ""
    extra: dict = field(default_factory=dict)

    def passed(self, tol: float = 1e-6) -> bool:
        return self.max_rel <= tol

    def to_dict(self) -> dict:
        d = asdict(self)
        d["worst_point"] = list(self.worst_point)
        d["component_max"] = list(self.component_max)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


CSV_COLUMNS = ("family", "params_hash", "max_rel", "mean_rel", "observed_order",
               "worst_t", "worst_x", "worst_y")


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([r.label, r.params_hash, repr(r.max_rel), repr(r.mean_rel),
                    repr(r.observed_order), *(repr(v) for v in r.worst_point)])
    return buf.getvalue()


# --------------------------------------------------------------------------
# derivative machinery


def _steps(t, x, y, h):
    """Per-axis steps: ``h * max(1, |coordinate|)``, or ``h`` itself when it
    is already a ``(ht, hx, hy)`` tuple of per-point steps."""
    if isinstance(h, tuple):
        return h
    return tuple(h * np.maximum(1.0, np.abs(z)) for z in (t, x, y))


def _halve(h):
    return tuple(v / 2 for v in h) if isinstance(h, tuple) else h / 2


def _derivs(f, t, x, y, order, h_base, ncomp):
    """Value, d/dt and Laplacian of each component of ``f`` at the points."""
    n = order // 2
    w1, w2 = FIRST[order], SECOND[order]
    ht, hx, hy = _steps(t, x, y, h_base)
    offs = np.arange(-n, n + 1, dtype=float)

    def call(tt, xx, yy):
        out = f(tt, xx, yy)
        return out if ncomp == 2 else (out,)

    tt = t[..., None] + offs * ht[..., None]
    xx = x[..., None] + offs * hx[..., None]
    yy = y[..., None] + offs * hy[..., None]
    bt = np.broadcast_to
    st = call(tt, bt(x[..., None], tt.shape), bt(y[..., None], tt.shape))
    sx = call(bt(t[..., None], xx.shape), xx, bt(y[..., None], xx.shape))
    sy = call(bt(t[..., None], yy.shape), bt(x[..., None], yy.shape), yy)
    out = []
    for k in range(ncomp):
        val = sx[k][..., n]
        dt = (st[k] @ w1) / ht
        lap = (sx[k] @ w2) / hx**2 + (sy[k] @ w2) / hy**2
        out.append((val, dt, lap))
    return out


def _terms(f, phys, t, x, y, order, h_base):
    """Residual(s) and term-magnitude scale(s) for the complex PDE."""
    if isinstance(phys, SinglePhys):
        (u, ut, lap), = _derivs(f, t, x, y, order, h_base, 1)
        nl = phys.a * np.abs(u) ** 2 * u
        R = 1j * ut + phys.c * lap + nl
        scale = np.abs(ut) + abs(phys.c) * np.abs(lap) + np.abs(nl) + FLOOR
        return [R], [scale]
    (u, ut, lu), (v, vt, lv) = _derivs(f, t, x, y, order, h_base, 2)
    au, av = np.abs(u) ** 2, np.abs(v) ** 2
    p = phys
    R1 = 1j * ut + p.c1 * lu + (p.a1 * au + p.b1 * av) * u
    R2 = 1j * vt + p.c2 * lv + (p.a2 * au + p.b2 * av) * v
    s1 = np.abs(ut) + abs(p.c1) * np.abs(lu) + (abs(p.a1) * au + abs(p.b1) * av) * np.abs(u)
    s2 = np.abs(vt) + abs(p.c2) * np.abs(lv) + (abs(p.a2) * au + abs(p.b2) * av) * np.abs(v)
    return [R1, R2], [s1 + FLOOR, s2 + FLOOR]


def _point(p):
    t, x, y = (np.atleast_1d(np.asarray(z, dtype=float)) for z in p)
    return t, x, y


def _check_stencil(sol, t, x, y, cfg):
    if sol is None:
        return
    if not np.all(sol.in_domain(t, x, y)):
        raise DomainExceeded("point outside the time domain")
    if not np.all(admissible(sol, t, x, y, cfg)):
        raise StencilNearSingularity("stencil within the exclusion radius of a singular surface")


def nls_residual(f, a: float, c: float, p, cfg: SamplingConfig = SamplingConfig()) -> complex:
    """``i f_t + c lap f + a |f|^2 f`` at one point via central differences.

    ``f`` is any vectorised callable ``(t, x, y) -> complex``; when it is a
    catalog :class:`~nls_exact.catalog.Solution` the stencil is first
    checked against its domain and singular surfaces.
    """
    sol = f if isinstance(f, Solution) else None
    fn = f.field if sol is not None else f
    t, x, y = _point(p)
    _check_stencil(sol, t, x, y, cfg)
    R, _ = _terms(fn, SinglePhys(a, c), t, x, y, cfg.fd_order, cfg.h_base)
    return complex(R[0][0])


def coupled_residual(fpair, phys: CoupledPhys, p, cfg: SamplingConfig = SamplingConfig()):
    """Residuals of both coupled equations at one point."""
    sol = fpair if isinstance(fpair, Solution) else None
    if sol is not None:
        fn = sol.field
    elif callable(fpair):
        fn = fpair
    else:
        f1, f2 = fpair

        def fn(t, x, y):
            return f1(t, x, y), f2(t, x, y)
    t, x, y = _point(p)
    _check_stencil(sol, t, x, y, cfg)
    R, _ = _terms(fn, phys, t, x, y, cfg.fd_order, cfg.h_base)
    return complex(R[0][0]), complex(R[1][0])


def _real_terms(sol: Solution, t, x, y, order, h_base):
    """Transport/eikonal residuals of the amplitude-phase system, per component."""
    ap = sol._amp_phase
    n = order // 2
    w1, w2 = FIRST[order], SECOND[order]
    ht, hx, hy = _steps(t, x, y, h_base)
    offs = np.arange(-n, n + 1, dtype=float)
    bt = np.broadcast_to
    tt = t[..., None] + offs * ht[..., None]
    xx = x[..., None] + offs * hx[..., None]
    yy = y[..., None] + offs * hy[..., None]
    st = ap(tt, bt(x[..., None], tt.shape), bt(y[..., None], tt.shape))
    sx = ap(bt(t[..., None], xx.shape), xx, bt(y[..., None], xx.shape))
    sy = ap(bt(t[..., None], yy.shape), bt(x[..., None], yy.shape), yy)
    amps = [sx[2 * k][..., n] for k in range(len(sx) // 2)]
    # difference against the centre sample: the weights only sum to zero up
    # to roundoff, which a large constant phase would otherwise amplify
    st, sx, sy = ([v - v[..., n:n + 1] for v in s] for s in (st, sx, sy))
    p = sol.phys
    if isinstance(p, SinglePhys):
        coeffs = [(p.c, (p.a, 0.0))]
    else:
        coeffs = [(p.c1, (p.a1, p.b1)), (p.c2, (p.a2, p.b2))]
    out = []
    for k, (c, (g_self, g_cross)) in enumerate(coeffs):
        ia, ip = 2 * k, 2 * k + 1
        xi = amps[k]
        xi_t, ph_t = st[ia] @ w1 / ht, st[ip] @ w1 / ht
        xi_x, ph_x = sx[ia] @ w1 / hx, sx[ip] @ w1 / hx
        xi_y, ph_y = sy[ia] @ w1 / hy, sy[ip] @ w1 / hy
        lap_xi = sx[ia] @ w2 / hx**2 + sy[ia] @ w2 / hy**2
        lap_ph = sx[ip] @ w2 / hx**2 + sy[ip] @ w2 / hy**2
        grad = xi_x * ph_x + xi_y * ph_y
        gph2 = ph_x**2 + ph_y**2
        other = amps[1] ** 2 if len(amps) == 2 else 0.0
        pot = g_self * amps[0] ** 2 + g_cross * other
        pot_abs = abs(g_self) * amps[0] ** 2 + abs(g_cross) * other
        r1 = xi_t + c * (2 * grad + xi * lap_ph)
        r2 = -xi * (ph_t + c * gph2) + c * lap_xi + pot * xi
        scale = (np.abs(xi_t) + np.abs(xi * ph_t)
                 + abs(c) * (2 * np.abs(grad) + np.abs(xi * lap_ph)
                             + np.abs(lap_xi) + np.abs(xi) * gph2)
                 + pot_abs * np.abs(xi) + FLOOR)
        out.append((r1, r2, scale))
    return out


def real_system_residual(sol: Solution, p, cfg: SamplingConfig = SamplingConfig()):
    """Transport and eikonal residuals ``(r1, r2)`` (four values when coupled).

    For a coupled solution the self/cross couplings of the second channel
    are (a2, b2) acting on (xi, eta).
    """
    t, x, y = _point(p)
    _check_stencil(sol, t, x, y, cfg)
    out = []
    for r1, r2, _ in _real_terms(sol, t, x, y, cfg.fd_order, cfg.h_base):
        out.extend([float(r1[0]), float(r2[0])])
    return tuple(out)


# --------------------------------------------------------------------------
# batch driver


def sample_points(cfg: SamplingConfig):
    """Scrambled Halton points in the box, reproducible from ``cfg.seed``."""
    u = qmc.Halton(d=3, scramble=True, seed=cfg.seed).random(cfg.n_points)
    lo = np.array([iv[0] for iv in cfg.box])
    hi = np.array([iv[1] for iv in cfg.box])
    p = qmc.scale(u, lo, hi)
    return p[:, 0], p[:, 1], p[:, 2]


def relative_residuals(sol: Solution, t, x, y, cfg: SamplingConfig, h_base=None):
    """Per-component relative residual arrays at the given points."""
    h = cfg.h_base if h_base is None else h_base
    R, S = _terms(sol.field, sol.phys, t, x, y, cfg.fd_order, h)
    return [np.abs(r) / s for r, s in zip(R, S)], R


def real_relative_residuals(sol: Solution, t, x, y, cfg: SamplingConfig, h_base=None):
    """Per-component relative residual of the amplitude/phase system."""
    h = cfg.h_base if h_base is None else h_base
    out = []
    for r1, r2, scale in _real_terms(sol, t, x, y, cfg.fd_order, h):
        out.append(np.hypot(r1, r2) / scale)
    return out


def admissible(sol: Solution, t, x, y, cfg: SamplingConfig, steps=None):
    """Mask of points whose full stencil is in the domain and clear of loci."""
    n = cfg.half_width
    ht, hx, hy = _steps(t, x, y, cfg.h_base if steps is None else steps)
    reach = n * np.sqrt(ht**2 + hx**2 + hy**2)
    ok = sol.in_domain(t, x, y)
    dist = np.asarray(sol.singular_distance(t, x, y))
    return ok & (dist >= np.maximum(cfg.exclusion_radius, reach))


def _observed_order(sol, p, cfg, comp, h):
    t, x, y = (np.array([v]) for v in p)
    r1, _ = relative_residuals(sol, t, x, y, cfg, h_base=h)
    r2, _ = relative_residuals(sol, t, x, y, cfg, h_base=_halve(h))
    a, b = float(r1[comp][0]), float(r2[comp][0])
    if a <= 0.0 or b <= 0.0:
        return math.nan
    return math.log2(a / b)


def verify_instance(sol: Solution, cfg: SamplingConfig = SamplingConfig(),
                    label: str | None = None, points=None, steps=None) -> ResidualReport:
    """Sample ``cfg.n_points`` points in the box and aggregate residuals.

    ``points`` (three arrays) replaces the sampled points when given;
    ``steps`` (three arrays, one step per point and axis) replaces the
    ``h_base * max(1, |coordinate|)`` rule.
    """
    if points is None:
        t, x, y = sample_points(cfg)
    else:
        t, x, y = (np.asarray(z, dtype=float).ravel() for z in points)
    if steps is not None:
        steps = tuple(np.broadcast_to(np.asarray(s, dtype=float).ravel(), t.shape) for s in steps)
    keep = admissible(sol, t, x, y, cfg, steps)
    n_skipped = int(np.count_nonzero(~keep))
    if not keep.any():
        raise AllPointsSkipped(
            "every sampled point is out of domain or within the exclusion radius")
    t, x, y = t[keep], x[keep], y[keep]
    h = cfg.h_base if steps is None else tuple(s[keep] for s in steps)
    rel, _ = relative_residuals(sol, t, x, y, cfg, h_base=h)
    stacked = np.max(np.vstack(rel), axis=0)
    i = int(np.argmax(stacked))
    comp = int(np.argmax([r[i] for r in rel]))
    worst = (float(t[i]), float(x[i]), float(y[i]))
    if label is None:
        label = getattr(sol, "label", None) or getattr(sol, "family", "")
    ph = sol.params_hash() if hasattr(sol, "params_hash") else ""
    return ResidualReport(
        max_rel=float(stacked[i]),
        mean_rel=float(np.mean(stacked)),
        n_evaluated=int(t.size),
        n_skipped=n_skipped,
        worst_point=worst,
        observed_order=_observed_order(
            sol, worst, cfg, comp, h if steps is None else tuple(s[i:i + 1] for s in h)),
        component_max=tuple(float(np.max(r)) for r in rel),
        label=label,
        params_hash=ph,
    )


def fd_convergence_order(f, phys, p, order: int, h: float) -> float:
    """Richardson slope of the discrete operator for a smooth ``f``.

    Uses steps ``h, h/2, h/4``: the differences of successive operator
    values shrink by ``2**order`` when truncation error dominates.
    """
    t, x, y = _point(p)
    vals = [_terms(f, phys, t, x, y, order, h / 2**k)[0][0][0] for k in range(3)]
    return math.log2(abs(vals[0] - vals[1]) / abs(vals[1] - vals[2]))
