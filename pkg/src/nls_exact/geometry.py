"""Affine geometry in (t, x, y) for singular loci and time domains.

All loci of the catalog are planes, lines or pencils of planes
``A(p) - s B(p) = 0`` with ``s`` running over an arithmetic lattice (the
pole sets of tan/sec-type profiles).  Symmetry transformations only use
invertible affine coordinate maps ``q = M p + v``, so every locus pulls
back to a locus of the same kind and distances stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_WINDOW = 3


@dataclass(frozen=True)
class Affine:
    """``g . (t, x, y) + c``."""

    g: tuple[float, float, float]
    c: float = 0.0

    def __call__(self, t, x, y):
        g0, g1, g2 = self.g
        return g0 * t + g1 * x + g2 * y + self.c

    def pullback(self, M: np.ndarray, v: np.ndarray) -> "Affine":
        g = np.asarray(self.g)
        return Affine(tuple(float(z) for z in M.T @ g), float(g @ v + self.c))

    @property
    def norm(self) -> float:
        return math.hypot(*self.g)


def t_minus(shift: float) -> Affine:
    """The affine function ``t - shift``."""
    return Affine((1.0, 0.0, 0.0), -float(shift))


CONST_ONE = Affine((0.0, 0.0, 0.0), 1.0)
X_COORD = Affine((0.0, 1.0, 0.0), 0.0)


@dataclass(frozen=True)
class Plane:
    f: Affine

    def distance(self, t, x, y):
        return np.abs(self.f(t, x, y)) / self.f.norm

    def pullback(self, M, v):
        return Plane(self.f.pullback(M, v))


@dataclass(frozen=True)
class Line:
    """Points ``p0 + s w``; ``p0`` and ``w`` ordered as (t, x, y)."""

    p0: tuple[float, float, float]
    w: tuple[float, float, float]

    def distance(self, t, x, y):
        d = np.stack(np.broadcast_arrays(
            np.asarray(t, float) - self.p0[0],
            np.asarray(x, float) - self.p0[1],
            np.asarray(y, float) - self.p0[2]), axis=-1)
        w = np.asarray(self.w, float)
        return np.linalg.norm(np.cross(d, w), axis=-1) / np.linalg.norm(w)

    def pullback(self, M, v):
        Minv = np.linalg.inv(M)
        p0 = Minv @ (np.asarray(self.p0) - v)
        w = Minv @ np.asarray(self.w)
        return Line(tuple(float(z) for z in p0), tuple(float(z) for z in w))


@dataclass(frozen=True)
class Pencil:
    """Planes ``A - s B = 0`` for ``s = offset + k * period`` (k integer).

    With ``period=None`` only ``s = offset`` is used.  The distance to the
    lattice is minimised over the lattice values bracketing ``A/B``; the
    plane distance as a function of ``s`` has a single zero and a single
    interior maximum, so the nearest member is always one of those.
    """

    A: Affine
    B: Affine
    offset: float
    period: float | None = None

    def _plane_distance(self, s, t, x, y):
        gA, gB = np.asarray(self.A.g), np.asarray(self.B.g)
        num = np.abs(self.A(t, x, y) - s * self.B(t, x, y))
        grad = gA[None, :] - np.asarray(s, float).reshape(-1, 1) * gB[None, :]
        den = np.linalg.norm(grad, axis=-1).reshape(np.shape(s))
        return num / den

    def distance(self, t, x, y):
        t, x, y = np.broadcast_arrays(*(np.asarray(z, float) for z in (t, x, y)))
        if self.period is None:
            s = np.full(t.shape, self.offset)
            return self._plane_distance(s, t, x, y)
        a = self.A(t, x, y)
        b = self.B(t, x, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(b != 0.0, a / np.where(b == 0.0, 1.0, b), 0.0)
        k0 = np.floor((w - self.offset) / self.period)
        best = np.full(t.shape, np.inf)
        for dk in range(-_WINDOW + 1, _WINDOW + 1):
            s = self.offset + (k0 + dk) * self.period
            best = np.minimum(best, self._plane_distance(s, t, x, y))
        return best

    def pullback(self, M, v):
        return Pencil(self.A.pullback(M, v), self.B.pullback(M, v),
                      self.offset, self.period)


def min_distance(loci, t, x, y):
    """Smallest distance from each point to any locus (inf if none)."""
    t, x, y = np.broadcast_arrays(*(np.asarray(z, float) for z in (t, x, y)))
    out = np.full(t.shape, np.inf)
    for locus in loci:
        out = np.minimum(out, locus.distance(t, x, y))
    return out


def in_domain(domain, t, x, y):
    """True where every affine constraint ``f > 0`` of ``domain`` holds."""
    t, x, y = np.broadcast_arrays(*(np.asarray(z, float) for z in (t, x, y)))
    ok = np.ones(t.shape, dtype=bool)
    for f in domain:
        ok &= f(t, x, y) > 0.0
    return ok
