"""Real-argument Jacobi elliptic functions and the complete integral K.

Everything here takes the *modulus* ``m`` (often written ``k``), not the
parameter ``m**2``.  So ``sn(u | m)`` satisfies

    sn'' = 2 m**2 sn**3 - (1 + m**2) sn

and ``K(m) = integral_0^{pi/2} (1 - m**2 sin(theta)**2) ** -0.5 dtheta``.
SciPy's ``ellipj``/``ellipk`` use the parameter convention instead.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import EllipticDivergence, EllipticDomainError

AGM_TOL = 1e-15
_MAX_AGM_STEPS = 64


class JacobiTriple(NamedTuple):
    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float


def check_modulus(m) -> float:
    """Return ``m`` as a float, rejecting values outside ``[0, 1]``."""
    m = float(m)
    if not (0.0 <= m <= 1.0):
        raise EllipticDomainError(f"elliptic modulus must lie in [0, 1], got {m!r}")
    return m


def _agm_scales(m: float):
    """AGM sequences (a_n, c_n) started from (1, sqrt(1 - m**2), m)."""
    a = 1.0
    b = math.sqrt((1.0 - m) * (1.0 + m))
    c = m
    a_seq, c_seq = [a], [c]
    for _ in range(_MAX_AGM_STEPS):
        if abs(c) <= AGM_TOL:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return a_seq, c_seq


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two nonnegative numbers."""
    for _ in range(_MAX_AGM_STEPS):
        if abs(a - b) <= AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_k(m) -> float:
    """Complete elliptic integral of the first kind ``K(m)`` (modulus ``m``)."""
    m = check_modulus(m)
    if m == 1.0:
        raise EllipticDivergence("K(m) diverges at m = 1")
    return math.pi / (2.0 * agm(1.0, math.sqrt((1.0 - m) * (1.0 + m))))


def jacobi(u, m) -> JacobiTriple:
    """Jacobi ``(sn, cn, dn)`` at real ``u`` (scalar or array) for modulus ``m``.

    Uses the descending Landen transformation on the AGM scale sequence.
    The moduli 0 and 1 are returned in closed form (trigonometric and
    hyperbolic limits).  ``dn`` is formed as ``sqrt(cn**2 + (1 - m**2) sn**2)``
    which avoids cancellation as ``m -> 1``.
    """
    m = check_modulus(m)
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise EllipticDomainError("jacobi() requires finite arguments")

    if m == 0.0:
        sn, cn, dn = np.sin(u), np.cos(u), np.ones_like(u)
    elif m == 1.0:
        sech = 1.0 / np.cosh(u)
        sn, cn, dn = np.tanh(u), sech, sech.copy()
    else:
        a_seq, c_seq = _agm_scales(m)
        n = len(a_seq) - 1
        phi = (2.0**n * a_seq[n]) * u
        for k in range(n, 0, -1):
            phi = 0.5 * (phi + np.arcsin(c_seq[k] / a_seq[k] * np.sin(phi)))
        sn, cn = np.sin(phi), np.cos(phi)
        dn = np.sqrt(cn * cn + (1.0 - m) * (1.0 + m) * sn * sn)

    if scalar:
        return JacobiTriple(float(sn), float(cn), float(dn))
    return JacobiTriple(sn, cn, dn)


def sn(u, m):
    return jacobi(u, m).sn


def cn(u, m):
    return jacobi(u, m).cn


def dn(u, m):
    return jacobi(u, m).dn
