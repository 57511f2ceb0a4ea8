"""Symmetry transformations acting on catalog solutions.

``T1`` rescales, rotates and shifts time; ``T2`` is a Galilean boost with
a translation; ``Swap`` exchanges the two components of a coupled
solution.  Both coordinate maps are affine, ``q = M p + v``, so singular
loci and time-domain constraints of the base solution pull back exactly.

Ops in a list are applied left to right: ``apply_all([A, B], s)`` is
``B(A(s))``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .catalog import VARIANTS, Solution
from .errors import InapplicableOp, ParameterError
from .residual import SamplingConfig, sample_points, verify_instance

KINDS = ("T1", "T2", "Swap")


@dataclass(frozen=True)
class SymmetryOp:
    """One transformation.

    For ``T1`` ``d`` is the scale, ``d1`` the rotation angle, ``d2`` the time
    shift, ``d3`` (``d4``) the constant phase of the first (second)
    component.  For ``T2`` ``(d1, d3)`` is the boost velocity and
    ``(d2, d4)`` the translation.  ``variant="alternate"`` flips the sign
    of the kinetic term in the second component's boost phase; it does not
    produce solutions and exists for adjudication only.
    """

    kind: str
    d: float = 1.0
    d1: float = 0.0
    d2: float = 0.0
    d3: float = 0.0
    d4: float = 0.0
    variant: str = "standard"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"op kind must be one of {KINDS}, got {self.kind!r}")
        if self.variant not in VARIANTS:
            raise ParameterError(f"variant must be one of {VARIANTS}")
        for name in ("d", "d1", "d2", "d3", "d4"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.kind == "T1" and self.d == 0.0:
            raise InapplicableOp("T1 requires d != 0")

    def affine(self):
        """``(M, v)`` of the coordinate premap ``q = M p + v``."""
        if self.kind == "T1":
            d, cs, sn = self.d, math.cos(self.d1), math.sin(self.d1)
            M = np.array([[d * d, 0.0, 0.0],
                          [0.0, d * cs, d * sn],
                          [0.0, -d * sn, d * cs]])
            return M, np.array([self.d2, 0.0, 0.0])
        if self.kind == "T2":
            M = np.array([[1.0, 0.0, 0.0],
                          [-self.d1, 1.0, 0.0],
                          [-self.d3, 0.0, 1.0]])
            return M, np.array([0.0, self.d2, self.d4])
        return np.eye(3), np.zeros(3)

    def to_dict(self) -> dict:
        if self.kind == "Swap":
            return {"kind": "Swap"}
        out = {k: v for k, v in asdict(self).items() if k != "variant"}
        if self.kind == "T2":
            del out["d"]
        if self.variant != "standard":
            out["variant"] = self.variant
        return out

    @classmethod
    def from_dict(cls, data) -> "SymmetryOp":
        data = dict(data)
        allowed = {"kind", "d", "d1", "d2", "d3", "d4", "variant"}
        extra = set(data) - allowed
        if extra or "kind" not in data:
            raise ParameterError(f"bad transform entry {data}")
        return cls(**data)


def identity_op() -> SymmetryOp:
    return SymmetryOp("T1")


class TransformedSolution(Solution):
    """``op`` applied to ``base``; evaluation is composed lazily."""

    def __init__(self, base: Solution, op: SymmetryOp):
        if op.kind == "Swap" and base.kind != "coupled":
            raise InapplicableOp("Swap needs a coupled solution")
        self.base = base
        self.op = op
        self.kind = base.kind
        self.phys = base.phys.swapped() if op.kind == "Swap" else base.phys
        M, v = op.affine()
        self._M, self._v = M, v
        self.loci = tuple(locus.pullback(M, v) for locus in base.loci)
        self.domain = tuple(f.pullback(M, v) for f in base.domain)

    @property
    def root(self):
        return self.base.root if isinstance(self.base, TransformedSolution) else self.base

    @property
    def ops(self) -> list[SymmetryOp]:
        prev = self.base.ops if isinstance(self.base, TransformedSolution) else []
        return prev + [self.op]

    def _amp_phase(self, t, x, y):
        op, M, v = self.op, self._M, self._v
        q = [M[i, 0] * t + M[i, 1] * x + M[i, 2] * y + v[i] for i in range(3)]
        ap = list(self.base._amp_phase(*q))
        if op.kind == "Swap":
            return ap[2], ap[3], ap[0], ap[1]
        if op.kind == "T1":
            ap[0] = op.d * ap[0]
            ap[1] = ap[1] + op.d3
            if self.kind == "coupled":
                ap[2] = op.d * ap[2]
                ap[3] = ap[3] + op.d4
            return tuple(ap)
        lin = 2.0 * (op.d1 * x + op.d3 * y)
        kin = (op.d1 ** 2 + op.d3 ** 2) * t
        if self.kind == "single":
            ap[1] = ap[1] + (lin - kin) / (4.0 * self.phys.c)
            return tuple(ap)
        ap[1] = ap[1] + (lin - kin) / (4.0 * self.phys.c1)
        sign = 1.0 if op.variant == "alternate" else -1.0
        ap[3] = ap[3] + (lin + sign * kin) / (4.0 * self.phys.c2)
        return tuple(ap)

    def to_spec(self) -> dict:
        spec = self.root.to_spec()
        spec["transforms"] = [op.to_dict() for op in self.ops]
        return spec

    def params_hash(self) -> str:
        blob = json.dumps(self.to_spec(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def __repr__(self):
        return f"TransformedSolution({self.root!r}, ops={self.ops})"


def apply(op: SymmetryOp, sol: Solution) -> TransformedSolution:
    return TransformedSolution(sol, op)


def apply_all(ops, sol: Solution) -> Solution:
    for op in ops:
        sol = apply(op, sol)
    return sol


def pullback_time_window(ops, window):
    """Interval of final times whose base time lies in ``window``.

    Only ``T1`` moves time (``t_base = d^2 t + d2``), so the window is
    undone op by op in application order.
    """
    lo, hi = window
    for op in ops:
        if op.kind == "T1":
            lo, hi = (lo - op.d2) / op.d ** 2, (hi - op.d2) / op.d ** 2
    return lo, hi


def base_to_final(ops, t, x, y):
    """Map base-solution coordinates to the coordinates of ``apply_all(ops, .)``."""
    p = np.stack(np.broadcast_arrays(*(np.asarray(z, dtype=float) for z in (t, x, y))))
    for op in ops:
        M, v = op.affine()
        p = np.linalg.solve(M, p.reshape(3, -1) - v[:, None]).reshape(p.shape)
    return p[0], p[1], p[2]


def final_to_base_matrix(ops):
    """Linear part ``A`` of the map from final to base coordinates."""
    A = np.eye(3)
    for op in ops:
        A = A @ op.affine()[0]
    return A


def total_scale(ops) -> float:
    """Product of the T1 scales: base coordinates move ``scale`` times faster."""
    return math.prod(abs(op.d) for op in ops if op.kind == "T1")


def residual_certify(ts: Solution, cfg: SamplingConfig | None = None, label=None):
    """Verifier report for a transformed solution.

    Points are drawn from ``cfg.box`` read in the coordinates of the root
    solution and mapped forward, so the same region of the base solution
    is tested.  The FD steps are chosen per point so that each final-axis
    step, pulled back to base coordinates, moves no further along any base
    axis than the step the untransformed run would use there.  Rescaling,
    boosts and large shifts then cost no resolution.
    """
    cfg = cfg or SamplingConfig()
    ops = ts.ops if isinstance(ts, TransformedSolution) else []
    base = np.stack(sample_points(cfg))
    base_steps = cfg.h_base * np.maximum(1.0, np.abs(base))
    A = np.abs(final_to_base_matrix(ops))
    with np.errstate(divide="ignore"):
        ratio = base_steps[:, :, None] / A[:, None, :]
    steps = tuple(np.min(ratio, axis=0).T)
    points = base_to_final(ops, *base)
    return verify_instance(ts, cfg, label=label, points=points, steps=steps)
