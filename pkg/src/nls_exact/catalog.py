"""Closed-form solution families of the cubic NLS and its coupled pair.

Single equation::

    i psi_t + c (psi_xx + psi_yy) + a |psi|^2 psi = 0

Coupled pair::

    i psi_t + c1 lap(psi) + (a1 |psi|^2 + b1 |phi|^2) psi = 0
    i phi_t + c2 lap(phi) + (a2 |psi|^2 + b2 |phi|^2) phi = 0

Every family is stored as an amplitude/phase pair ``psi = xi * exp(i*phase)``
(and ``phi = eta * exp(i*mu)``), with complex powers such as
``t**(i s - 1/2)`` split into a real power in the amplitude and ``s*log(t)``
in the phase, taken on the declared positive time domain.

Tags ``S0``..``S20`` cover the single equation, ``C1``..``C17`` the coupled
pair.  ``C3`` and ``C17`` carry a ``profile`` choice (tan, sec, coth, csch,
sn, cn, dn) because the formulas only differ by that profile.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from . import special_functions as sf
from .errors import (
    DegenerateParams,
    OutOfDomain,
    ParameterError,
    SignConditionViolated,
    SingularPoint,
)
from .geometry import (
    CONST_ONE,
    X_COORD,
    Affine,
    Line,
    Pencil,
    Plane,
    in_domain,
    min_distance,
    t_minus,
)

DEFAULT_EXCLUSION = 1e-9
VARIANTS = ("standard", "alternate")


# --------------------------------------------------------------------------
# physical parameters


@dataclass(frozen=True)
class SinglePhys:
    a: float
    c: float
    kind = "single"

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "c", float(self.c))
        if self.a == 0.0 or self.c == 0.0:
            raise ParameterError("a and c must be nonzero")

    def to_dict(self):
        return {"a": self.a, "c": self.c}


@dataclass(frozen=True)
class CoupledPhys:
    a1: float
    b1: float
    c1: float
    a2: float
    b2: float
    c2: float
    kind = "coupled"

    def __post_init__(self):
        for name in ("a1", "b1", "c1", "a2", "b2", "c2"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.c1 == 0.0 or self.c2 == 0.0:
            raise ParameterError("c1 and c2 must be nonzero")

    @property
    def det(self) -> float:
        return self.a1 * self.b2 - self.a2 * self.b1

    def swapped(self) -> "CoupledPhys":
        """Coefficients seen by ``(phi, psi)``: self-coupling stays self-coupling."""
        return CoupledPhys(self.b2, self.a2, self.c2, self.b1, self.a1, self.c1)

    def to_dict(self):
        return {k: getattr(self, k) for k in ("a1", "b1", "c1", "a2", "b2", "c2")}


def make_phys(d: Mapping) -> SinglePhys | CoupledPhys:
    keys = set(d)
    if keys == {"a", "c"}:
        return SinglePhys(d["a"], d["c"])
    if keys == {"a1", "b1", "c1", "a2", "b2", "c2"}:
        return CoupledPhys(**{k: d[k] for k in keys})
    raise ParameterError(f"unrecognised physical parameter set {sorted(keys)}")


# --------------------------------------------------------------------------
# profiles f with f'' = cubic * f^3 + linear * f


@dataclass(frozen=True)
class Profile:
    name: str
    elliptic: bool
    focusing: bool  # needs ac > 0 (single) / sign-flipped radicands (coupled)
    poles: tuple[float, float | None] | None  # (offset, period) of real poles
    periodic_x: bool

    def f(self, w, m=None):
        if self.name == "tan":
            return np.tan(w)
        if self.name == "sec":
            return 1.0 / np.cos(w)
        if self.name == "coth":
            return 1.0 / np.tanh(w)
        if self.name == "csch":
            return 1.0 / np.sinh(w)
        return getattr(sf.jacobi(w, m), self.name)

    def amp(self, m) -> float:
        return m if self.name in ("sn", "cn") else 1.0

    def kappa(self, m) -> float:
        """Frequency ``b = kappa * c * theta`` of the stationary phase."""
        return {
            "tan": 2.0, "sec": -1.0, "coth": -2.0, "csch": 1.0,
            "sn": -(1.0 + m * m) if m is not None else None,
            "cn": 2.0 * m * m - 1.0 if m is not None else None,
            "dn": 2.0 - m * m if m is not None else None,
        }[self.name]

    def cubic(self, m) -> float:
        return {"tan": 2.0, "sec": 2.0, "coth": 2.0, "csch": 2.0,
                "sn": 2.0 * (m or 0.0) ** 2, "cn": -2.0 * (m or 0.0) ** 2,
                "dn": -2.0}[self.name]

    def period(self, m) -> float:
        K = sf.complete_k(m)
        return 2.0 * K if self.name == "dn" else 4.0 * K


_HALF_PI = 0.5 * math.pi
PROFILES = {
    "tan": Profile("tan", False, False, (_HALF_PI, math.pi), False),
    "sec": Profile("sec", False, False, (_HALF_PI, math.pi), False),
    "coth": Profile("coth", False, False, (0.0, None), False),
    "csch": Profile("csch", False, False, (0.0, None), False),
    "sn": Profile("sn", True, False, None, True),
    "cn": Profile("cn", True, True, None, True),
    "dn": Profile("dn", True, True, None, True),
}


# --------------------------------------------------------------------------
# descriptors and registry


@dataclass(frozen=True)
class FamilyDescriptor:
    id: str
    kind: str
    params: tuple[str, ...]
    condition: str
    description: str
    choices: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    uses_signs: bool = False
    propagation: bool = False

    def to_dict(self):
        return {
            "id": self.id, "kind": self.kind,
            "params": list(self.params), "condition": self.condition,
            "description": self.description,
            "choices": {k: list(v) for k, v in self.choices.items()},
            "uses_signs": self.uses_signs, "propagation": self.propagation,
        }


@dataclass(frozen=True)
class ClosedForm:
    amp_phase: Callable
    loci: tuple
    domain: tuple[Affine, ...]
    derived: Mapping = field(default_factory=dict)


_REGISTRY: dict[str, tuple[FamilyDescriptor, Callable]] = {}


def _family(fid, kind, params, condition, description, *,
            choices=None, uses_signs=False, propagation=False):
    def register(builder):
        desc = FamilyDescriptor(fid, kind, tuple(params), condition,
                                description, MappingProxyType(dict(choices or {})),
                                uses_signs, propagation)
        _REGISTRY[fid] = (desc, builder)
        return builder
    return register


def _order(fid: str):
    return (fid[0] != "S", int(fid[1:]))


def list_families(kind: str | None = None) -> list[FamilyDescriptor]:
    """Descriptors in stable order (S0..S20 then C1..C17)."""
    if kind not in (None, "single", "coupled"):
        raise ParameterError(f"kind must be 'single' or 'coupled', got {kind!r}")
    out = [d for d, _ in _REGISTRY.values() if kind is None or d.kind == kind]
    return sorted(out, key=lambda d: _order(d.id))


def describe(fid: str) -> FamilyDescriptor:
    try:
        return _REGISTRY[fid][0]
    except KeyError:
        raise ParameterError(f"unknown family {fid!r}") from None


# --------------------------------------------------------------------------
# solutions


class Solution:
    """Common behaviour of catalog instances and transformed solutions."""

    kind: str
    phys: SinglePhys | CoupledPhys
    loci: tuple
    domain: tuple

    def _amp_phase(self, t, x, y):
        raise NotImplementedError

    @property
    def n_components(self) -> int:
        return 1 if self.kind == "single" else 2

    @property
    def time_domain(self) -> tuple[float, float]:
        lo, hi = -math.inf, math.inf
        for f in self.domain:
            g0 = f.g[0]
            if g0 > 0:
                lo = max(lo, -f.c / g0)
            elif g0 < 0:
                hi = min(hi, -f.c / g0)
        return lo, hi

    def in_domain(self, t, x, y):
        return in_domain(self.domain, t, x, y)

    def singular_distance(self, t, x, y):
        """Euclidean distance in (t, x, y) to the nearest singular surface."""
        d = min_distance(self.loci, t, x, y)
        return float(d) if np.ndim(d) == 0 else d

    def _check(self, t, x, y, exclusion):
        if not np.all(self.in_domain(t, x, y)):
            lo, hi = self.time_domain
            raise OutOfDomain(f"t outside the time domain ({lo}, {hi})")
        dist = min_distance(self.loci, t, x, y)
        if np.any(dist < exclusion):
            raise SingularPoint(
                f"point within {float(np.min(dist)):.3g} of a singular surface "
                f"(exclusion {exclusion})")

    def amplitude_phase(self, t, x, y, exclusion=DEFAULT_EXCLUSION):
        """``(xi, phase)`` or ``(xi, phase, eta, mu)`` with unwrapped phases."""
        self._check(t, x, y, exclusion)
        out = self._amp_phase(*_arrays(t, x, y))
        return _squeeze(out, t, x, y)

    def evaluate(self, t, x, y, exclusion=DEFAULT_EXCLUSION):
        """Field value(s); a complex array, or a pair of them when coupled."""
        self._check(t, x, y, exclusion)
        out = self.field(*_arrays(t, x, y))
        return _squeeze(out, t, x, y)

    def field(self, t, x, y):
        """Unchecked vectorised evaluator used by the numerical machinery."""
        ap = self._amp_phase(t, x, y)
        psi = ap[0] * np.exp(1j * ap[1])
        if self.kind == "single":
            return psi
        return psi, ap[2] * np.exp(1j * ap[3])


def _arrays(t, x, y):
    return np.broadcast_arrays(*(np.asarray(z, dtype=float) for z in (t, x, y)))


def _squeeze(out, t, x, y):
    if all(np.ndim(z) == 0 for z in (t, x, y)):
        if isinstance(out, tuple):
            return tuple(v.item() for v in out)
        return out.item()
    return out


class SolutionInstance(Solution):
    """A catalog family with validated parameters; immutable."""

    def __init__(self, family: str, phys, params: Mapping, signs, closed: ClosedForm):
        self.family = family
        self.phys = phys
        self.kind = phys.kind
        self.params = MappingProxyType(dict(params))
        self.signs = tuple(signs)
        self._closed = closed
        self.loci = closed.loci
        self.domain = closed.domain
        self.derived = MappingProxyType(dict(closed.derived))

    @property
    def descriptor(self) -> FamilyDescriptor:
        return describe(self.family)

    def _amp_phase(self, t, x, y):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self._closed.amp_phase(t, x, y)

    def to_spec(self) -> dict:
        spec = {"family": self.family, "phys": self.phys.to_dict(),
                "params": dict(self.params)}
        if self.descriptor.uses_signs:
            spec["signs"] = list(self.signs)
        return spec

    def params_hash(self) -> str:
        blob = json.dumps(self.to_spec(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def __repr__(self):
        return f"SolutionInstance({self.family}, {self.phys}, {dict(self.params)})"


def instantiate(family: str, phys, params: Mapping | None = None,
                signs=(1, 1)) -> SolutionInstance:
    """Validate parameters and build an evaluable instance of ``family``."""
    desc = describe(family)
    if isinstance(phys, Mapping):
        phys = make_phys(phys)
    if phys.kind != desc.kind:
        raise ParameterError(f"{family} needs {desc.kind} physical parameters")
    params = dict(params or {})
    signs = tuple(int(s) for s in signs)
    if len(signs) != 2 or any(s not in (1, -1) for s in signs):
        raise ParameterError("signs must be two entries from {+1, -1}")
    clean = _clean_params(desc, params)
    builder = _REGISTRY[family][1]
    closed = builder(phys, clean, signs)
    return SolutionInstance(family, phys, clean, signs, closed)


def _clean_params(desc: FamilyDescriptor, params: dict) -> dict:
    clean = {}
    for name, allowed in desc.choices.items():
        value = params.pop(name, allowed[0])
        if value not in allowed:
            raise ParameterError(f"{name} must be one of {allowed}, got {value!r}")
        clean[name] = value
    required = list(desc.params)
    profile = clean.get("profile")
    if profile is not None and PROFILES[profile].elliptic:
        required.append("m")
    for name in required:
        if name not in params:
            raise ParameterError(f"{desc.id} requires parameter {name!r}")
        try:
            value = float(params.pop(name))
        except (TypeError, ValueError):
            raise ParameterError(f"parameter {name!r} must be a real number") from None
        if not math.isfinite(value):
            raise ParameterError(f"parameter {name!r} must be finite")
        clean[name] = value
    if params:
        raise ParameterError(f"{desc.id} does not take parameters {sorted(params)}")
    if "m" in clean:
        sf.check_modulus(clean["m"])
    return clean


# --------------------------------------------------------------------------
# builder helpers

T_POS = t_minus(0.0)


def _signed_root(value, condition):
    if value < 0:
        raise SignConditionViolated(f"requires {condition}")
    return math.sqrt(value)


def _single_radicand(p: SinglePhys, focusing: bool, scale=2.0, theta=1.0):
    if focusing:
        if not p.a * p.c > 0:
            raise SignConditionViolated("requires ac>0")
        return math.sqrt(scale * p.c * theta / p.a)
    if not p.a * p.c < 0:
        raise SignConditionViolated("requires ac<0")
    return math.sqrt(-scale * p.c * theta / p.a)


def _cross_amplitudes(p: CoupledPhys, focusing: bool, signs, scale=2.0, theta=1.0, amp=1.0):
    """(iota1, iota2) solving a1 X + b1 Y = -k c1, a2 X + b2 Y = -k c2."""
    det = p.det
    if det == 0.0:
        raise DegenerateParams("requires a1b2-a2b1 != 0")
    X = scale * (p.b1 * p.c2 - p.b2 * p.c1) * theta / det
    Y = scale * (p.a2 * p.c1 - p.a1 * p.c2) * theta / det
    if focusing:
        X, Y = -X, -Y
        cond1, cond2 = "(b2c1-b1c2)/(a1b2-a2b1) >= 0", "(a1c2-a2c1)/(a1b2-a2b1) >= 0"
    else:
        cond1, cond2 = "(b1c2-b2c1)/(a1b2-a2b1) >= 0", "(a2c1-a1c2)/(a1b2-a2b1) >= 0"
    i1 = signs[0] * amp * _signed_root(X, cond1)
    i2 = signs[1] * amp * _signed_root(Y, cond2)
    return i1, i2


def _l2(params) -> float:
    L = params["l1"] ** 2 + params["l2"] ** 2
    if L == 0.0:
        raise DegenerateParams("requires (l1,l2) != (0,0)")
    return L


def _nonzero(params, name):
    if params[name] == 0.0:
        raise DegenerateParams(f"requires {name} != 0")
    return params[name]


def _distinct(params, n1, n2):
    if params[n1] == params[n2]:
        raise DegenerateParams(f"requires {n1} != {n2}")


def _proportional(p: CoupledPhys, d: float, sign: int):
    d2 = sign * d * d
    ok = math.isclose(p.b1, p.a1 * d2, rel_tol=1e-12, abs_tol=1e-14) and \
        math.isclose(p.b2, p.a2 * d2, rel_tol=1e-12, abs_tol=1e-14)
    if not ok:
        s = "" if sign > 0 else "-"
        raise SignConditionViolated(
            f"requires (a1,b1)=a1(1,{s}d^2) and (a2,b2)=a2(1,{s}d^2)")


def _profile_loci(profile: Profile, A: Affine, B: Affine):
    if profile.poles is None:
        return ()
    return (Pencil(A, B, *profile.poles),)


def _boundaries(domain):
    return tuple(Plane(f) for f in domain)


def _closed(fn, loci=(), domain=(), **derived):
    return ClosedForm(fn, tuple(loci) + _boundaries(domain), tuple(domain), derived)


def _quad(x, y):
    return x * x + y * y


# --------------------------------------------------------------------------
# single-equation families

@_family("S0", "single", ("d",), "none",
         "constant-profile self-similar seed d/t with phase r^2/4ct - a d^2/t")
def _s0(p, q, signs):
    a, c, d = p.a, p.c, q["d"]

    def fn(t, x, y):
        return d / t, _quad(x, y) / (4 * c * t) - a * d * d / t
    return _closed(fn, domain=(T_POS,))


@_family("S1", "single", (), "ac<0", "sqrt(-2c/a)/x")
def _s1(p, q, signs):
    s = _single_radicand(p, False)

    def fn(t, x, y):
        return s / x, np.zeros_like(x)
    return _closed(fn, loci=(Plane(X_COORD),))


@_family("S2", "single", (), "ac<0", "sqrt(-c/(a(x^2+y^2)))")
def _s2(p, q, signs):
    s = _single_radicand(p, False, scale=1.0)

    def fn(t, x, y):
        return s / np.sqrt(_quad(x, y)), np.zeros_like(x)
    return _closed(fn, loci=(Line((0.0, 0.0, 0.0), (1.0, 0.0, 0.0)),))


def _stationary(profile_name):
    profile = PROFILES[profile_name]

    def build(p, q, signs):
        m = q.get("m")
        s = profile.amp(m) * _single_radicand(p, profile.focusing)
        b = profile.kappa(m) * p.c

        def fn(t, x, y):
            return s * profile.f(x, m), b * t
        return _closed(fn, loci=_profile_loci(profile, X_COORD, CONST_ONE),
                       frequency=b, amplitude=s)
    return build


for _fid, _prof, _cond in (
        ("S3", "tan", "ac<0"),
        ("S4", "sec", "ac<0"),
        ("S5", "coth", "ac<0"),
        ("S6", "csch", "ac<0"),
        ("S7", "sn", "ac<0"),
        ("S8", "cn", "ac>0"),
        ("S9", "dn", "ac>0")):
    _family(_fid, "single", ("m",) if PROFILES[_prof].elliptic else (), _cond,
            f"stationary {_prof} profile in x with phase b t",
            propagation=PROFILES[_prof].periodic_x)(_stationary(_prof))


@_family("S10", "single", ("b",), "none",
         "b t^(i a b^2 - 1/2) exp(i x^2/4ct)")
def _s10(p, q, signs):
    a, c, b = p.a, p.c, q["b"]

    def fn(t, x, y):
        return b / np.sqrt(t), x * x / (4 * c * t) + a * b * b * np.log(t)
    return _closed(fn, domain=(T_POS,))


@_family("S11", "single", ("b", "d"), "d != 0",
         "b t^(-i a b^2/d - 1/2) (t-d)^(i a b^2/d - 1/2) exp(i x^2/4ct + i y^2/4c(t-d))")
def _s11(p, q, signs):
    a, c, b = p.a, p.c, q["b"]
    d = _nonzero(q, "d")
    w = a * b * b / d

    def fn(t, x, y):
        td = t - d
        return (b / np.sqrt(t * td),
                x * x / (4 * c * t) + y * y / (4 * c * td) + w * (np.log(td) - np.log(t)))
    return _closed(fn, domain=(T_POS, t_minus(d)))


def _plane_arg(q):
    return Affine((q["l3"], q["l1"], q["l2"]), 0.0)


@_family("S12", "single", ("l1", "l2", "l3"), "ac<0, (l1,l2) != (0,0)",
         "sqrt(-2c(l1^2+l2^2)/a) exp(i r^2/4ct) / (l1 x + l2 y + l3 t)")
def _s12(p, q, signs):
    L = _l2(q)
    s = _single_radicand(p, False, theta=L)
    c = p.c
    l1, l2, l3 = q["l1"], q["l2"], q["l3"]

    def fn(t, x, y):
        return s / (l1 * x + l2 * y + l3 * t), _quad(x, y) / (4 * c * t)
    return _closed(fn, loci=(Plane(_plane_arg(q)),), domain=(T_POS,))


@_family("S13", "single", ("l4", "l5"), "ac<0",
         "sqrt(-c/(a((x-l4 t)^2+(y-l5 t)^2))) exp(i r^2/4ct)")
def _s13(p, q, signs):
    s = _single_radicand(p, False, scale=1.0)
    c, l4, l5 = p.c, q["l4"], q["l5"]

    def fn(t, x, y):
        return s / np.sqrt(_quad(x - l4 * t, y - l5 * t)), _quad(x, y) / (4 * c * t)
    return _closed(fn, loci=(Line((0.0, 0.0, 0.0), (1.0, l4, l5)),), domain=(T_POS,))


def _similarity(profile_name):
    profile = PROFILES[profile_name]

    def build(p, q, signs):
        m = q.get("m")
        L = _l2(q)
        s = profile.amp(m) * _single_radicand(p, profile.focusing, theta=L)
        k = profile.kappa(m) * p.c * L
        c, l1, l2, l3 = p.c, q["l1"], q["l2"], q["l3"]

        def fn(t, x, y):
            w = (l1 * x + l2 * y + l3 * t) / t
            return s * profile.f(w, m) / t, _quad(x, y) / (4 * c * t) - k / t
        loci = _profile_loci(profile, _plane_arg(q), Affine((1.0, 0.0, 0.0)))
        return _closed(fn, loci=loci, domain=(T_POS,), frequency=k, amplitude=s)
    return build


for _fid, _prof, _cond in (
        ("S14", "tan", "ac<0"),
        ("S15", "sec", "ac<0"),
        ("S16", "coth", "ac<0"),
        ("S17", "csch", "ac<0"),
        ("S18", "sn", "ac<0"),
        ("S19", "cn", "ac>0"),
        ("S20", "dn", "ac>0")):
    _params = ("l1", "l2", "l3") + (("m",) if PROFILES[_prof].elliptic else ())
    _family(_fid, "single", _params, _cond + ", (l1,l2) != (0,0)",
            f"{_prof} profile of (l1 x + l2 y + l3 t)/t over t, lens phase")(_similarity(_prof))


# --------------------------------------------------------------------------
# coupled families

_SIGNS_NOTE = "a1b2-a2b1 != 0 and nonnegative cross radicands"


def _pair(xi, ph, eta, mu):
    return xi, ph, eta, mu


@_family("C1", "coupled", (), _SIGNS_NOTE,
         "(iota1, iota2)/x with iota solving the 2x2 balance", uses_signs=True)
def _c1(p, q, signs):
    i1, i2 = _cross_amplitudes(p, False, signs)

    def fn(t, x, y):
        z = np.zeros_like(x)
        return _pair(i1 / x, z, i2 / x, z)
    return _closed(fn, loci=(Plane(X_COORD),), iota=(i1, i2), balance=2.0)


@_family("C2", "coupled", (), _SIGNS_NOTE,
         "(iota1, iota2)/sqrt(x^2+y^2)", uses_signs=True)
def _c2(p, q, signs):
    i1, i2 = _cross_amplitudes(p, False, signs, scale=1.0)

    def fn(t, x, y):
        r = np.sqrt(_quad(x, y))
        z = np.zeros_like(x)
        return _pair(i1 / r, z, i2 / r, z)
    return _closed(fn, loci=(Line((0.0, 0.0, 0.0), (1.0, 0.0, 0.0)),),
                   iota=(i1, i2), balance=1.0)


@_family("C3", "coupled", (), _SIGNS_NOTE,
         "iota * profile(x) with phases kappa c_j t",
         choices={"profile": tuple(PROFILES), "variant": VARIANTS},
         uses_signs=True, propagation=True)
def _c3(p, q, signs):
    profile = PROFILES[q["profile"]]
    if q["variant"] == "alternate" and profile.name != "dn":
        raise ParameterError("variant 'alternate' only exists for the dn profile")
    m = q.get("m")
    i1, i2 = _cross_amplitudes(p, profile.focusing, signs, amp=profile.amp(m))
    kap = profile.kappa(m)
    k1 = kap * p.c1
    # the alternate dn form reuses c1 in the second phase
    k2 = kap * (p.c1 if q["variant"] == "alternate" else p.c2)

    def fn(t, x, y):
        f = profile.f(x, m)
        return _pair(i1 * f, k1 * t, i2 * f, k2 * t)
    return _closed(fn, loci=_profile_loci(profile, X_COORD, CONST_ONE),
                   iota=(i1, i2), balance=profile.cubic(m), frequencies=(k1, k2))


@_family("C4", "coupled", ("d", "l"), "(a1,b1)=a1(1,d^2), (a2,b2)=a2(1,d^2)",
         "(d l sin x, l cos x) with phases (a_j (d l)^2 - c_j) t", propagation=True)
def _c4(p, q, signs):
    d, l = q["d"], q["l"]
    _proportional(p, d, +1)
    k1 = p.a1 * (d * l) ** 2 - p.c1
    k2 = p.a2 * (d * l) ** 2 - p.c2

    def fn(t, x, y):
        return _pair(d * l * np.sin(x), k1 * t, l * np.cos(x), k2 * t)
    return _closed(fn, frequencies=(k1, k2))


@_family("C5", "coupled", ("d", "l"), "(a1,b1)=a1(1,-d^2), (a2,b2)=a2(1,-d^2)",
         "(d l cosh x, l sinh x) with phases (a_j (d l)^2 + c_j) t")
def _c5(p, q, signs):
    d, l = q["d"], q["l"]
    _proportional(p, d, -1)
    k1 = p.a1 * (d * l) ** 2 + p.c1
    k2 = p.a2 * (d * l) ** 2 + p.c2

    def fn(t, x, y):
        return _pair(d * l * np.cosh(x), k1 * t, l * np.sinh(x), k2 * t)
    return _closed(fn, frequencies=(k1, k2))


def _lens(variant):
    return 2.0 if variant == "alternate" else 4.0


def _shifted_lens(axis):
    def build(p, q, signs):
        d = q.get("d", 0.0)
        l, k1, k2 = q["l"], q["k1"], q["k2"]
        den = _lens(q["variant"])
        a1, b1, c1, a2, b2, c2 = p.a1, p.b1, p.c1, p.a2, p.b2, p.c2

        def fn(t, x, y):
            tl = t - l
            lt, ltl = np.log(t), np.log(tl)
            second = (x - d) ** 2 if axis == "x" else y * y
            return _pair(
                k1 / np.sqrt(t),
                x * x / (den * c1 * t) + a1 * k1 * k1 * lt + b1 * k2 * k2 * ltl,
                k2 / np.sqrt(tl),
                second / (den * c2 * tl) + a2 * k1 * k1 * lt + b2 * k2 * k2 * ltl)
        return _closed(fn, domain=(T_POS, t_minus(l)))
    return build


_family("C6", "coupled", ("d", "l", "k1", "k2"), "none",
        "k1/sqrt(t) and k2/sqrt(t-l) with lens phases in x and x-d",
        choices={"variant": VARIANTS})(_shifted_lens("x"))
_family("C7", "coupled", ("l", "k1", "k2"), "none",
        "k1/sqrt(t) and k2/sqrt(t-l) with lens phases in x and y",
        choices={"variant": VARIANTS})(_shifted_lens("y"))


def _log_ratio_coeff(q, n1, n2):
    _distinct(q, n1, n2)
    if q["variant"] == "alternate":
        return 1.0 / (q[n2] - q[n1])
    return 1.0 / (q[n1] - q[n2])


@_family("C8", "coupled", ("d", "d1", "d2", "k1", "k2"), "d1 != d2",
         "k1/sqrt(t) and k2/sqrt((t-d1)(t-d2)) with astigmatic lens phase",
         choices={"variant": VARIANTS})
def _c8(p, q, signs):
    d, d1, d2, k1, k2 = q["d"], q["d1"], q["d2"], q["k1"], q["k2"]
    g = _log_ratio_coeff(q, "d1", "d2")
    a1, b1, c1, a2, b2, c2 = p.a1, p.b1, p.c1, p.a2, p.b2, p.c2

    def fn(t, x, y):
        t1, t2 = t - d1, t - d2
        lt, lr = np.log(t), np.log(t1) - np.log(t2)
        return _pair(
            k1 / np.sqrt(t),
            x * x / (4 * c1 * t) + a1 * k1 * k1 * lt + g * b1 * k2 * k2 * lr,
            k2 / np.sqrt(t1 * t2),
            (x - d) ** 2 / (4 * c2 * t1) + y * y / (4 * c2 * t2)
            + a2 * k1 * k1 * lt + g * b2 * k2 * k2 * lr)
    return _closed(fn, domain=(T_POS, t_minus(d1), t_minus(d2)))


@_family("C9", "coupled", ("d", "d1", "k1", "k2"), "none",
         "k1/sqrt(t) and k2/(t-d1) with focused lens phase")
def _c9(p, q, signs):
    d, d1, k1, k2 = q["d"], q["d1"], q["k1"], q["k2"]
    a1, b1, c1, a2, b2, c2 = p.a1, p.b1, p.c1, p.a2, p.b2, p.c2

    def fn(t, x, y):
        t1 = t - d1
        lt = np.log(t)
        return _pair(
            k1 / np.sqrt(t),
            x * x / (4 * c1 * t) + a1 * k1 * k1 * lt - b1 * k2 * k2 / t1,
            k2 / t1,
            ((x - d) ** 2 + y * y) / (4 * c2 * t1) + a2 * k1 * k1 * lt - b2 * k2 * k2 / t1)
    return _closed(fn, domain=(T_POS, t_minus(d1)))


@_family("C10", "coupled", ("l1", "d1", "d2", "k1", "k2"), "none",
         "k1/t and k2/(t-l1) with offset focused lens phases")
def _c10(p, q, signs):
    l1, d1, d2, k1, k2 = q["l1"], q["d1"], q["d2"], q["k1"], q["k2"]
    a1, b1, c1, a2, b2, c2 = p.a1, p.b1, p.c1, p.a2, p.b2, p.c2

    def fn(t, x, y):
        t1 = t - l1
        return _pair(
            k1 / t,
            (_quad(x, y) - 4 * c1 * a1 * k1 * k1) / (4 * c1 * t) - b1 * k2 * k2 / t1,
            k2 / t1,
            (_quad(x - d1, y - d2) - 4 * c2 * b2 * k2 * k2) / (4 * c2 * t1) - a2 * k1 * k1 / t)
    return _closed(fn, domain=(T_POS, t_minus(l1)))


@_family("C11", "coupled", ("l1", "l2", "d1", "d2", "k1", "k2"), "l1 != l2",
         "k1/t and k2/sqrt((t-l1)(t-l2)) with astigmatic offset phase",
         choices={"variant": VARIANTS})
def _c11(p, q, signs):
    l1, l2, d1, d2, k1, k2 = (q[n] for n in ("l1", "l2", "d1", "d2", "k1", "k2"))
    g = _log_ratio_coeff(q, "l1", "l2")
    a1, b1, c1, a2, b2, c2 = p.a1, p.b1, p.c1, p.a2, p.b2, p.c2

    def fn(t, x, y):
        t1, t2 = t - l1, t - l2
        lr = np.log(t1) - np.log(t2)
        return _pair(
            k1 / t,
            _quad(x, y) / (4 * c1 * t) - a1 * k1 * k1 / t + g * b1 * k2 * k2 * lr,
            k2 / np.sqrt(t1 * t2),
            (x - d1) ** 2 / (4 * c2 * t1) + (y - d2) ** 2 / (4 * c2 * t2)
            - a2 * k1 * k1 / t + g * b2 * k2 * k2 * lr)
    return _closed(fn, domain=(T_POS, t_minus(l1), t_minus(l2)))


@_family("C12", "coupled", ("l", "l1", "l2", "d1", "d2", "k1", "k2"),
         "l != 0, l1 != l2",
         "k1/sqrt(t(t-l)) and k2/sqrt((t-l1)(t-l2)), both astigmatic",
         choices={"variant": VARIANTS})
def _c12(p, q, signs):
    l, l1, l2, d1, d2, k1, k2 = (q[n] for n in ("l", "l1", "l2", "d1", "d2", "k1", "k2"))
    _nonzero(q, "l")
    g = _log_ratio_coeff(q, "l1", "l2")
    a1, b1, c1, a2, b2, c2 = p.a1, p.b1, p.c1, p.a2, p.b2, p.c2

    def fn(t, x, y):
        tl, t1, t2 = t - l, t - l1, t - l2
        ll = (np.log(tl) - np.log(t)) / l
        lr = np.log(t1) - np.log(t2)
        return _pair(
            k1 / np.sqrt(t * tl),
            x * x / (4 * c1 * t) + y * y / (4 * c1 * tl)
            + a1 * k1 * k1 * ll + g * b1 * k2 * k2 * lr,
            k2 / np.sqrt(t1 * t2),
            (x - d1) ** 2 / (4 * c2 * t1) + (y - d2) ** 2 / (4 * c2 * t2)
            + a2 * k1 * k1 * ll + g * b2 * k2 * k2 * lr)
    return _closed(fn, domain=(T_POS, t_minus(l), t_minus(l1), t_minus(l2)))


def _trig_pair(hyperbolic):
    def build(p, q, signs):
        d, l, l1, l2, l3 = (q[n] for n in ("d", "l", "l1", "l2", "l3"))
        _proportional(p, d, -1 if hyperbolic else +1)
        L = l1 * l1 + l2 * l2
        s = 1.0 if hyperbolic else -1.0
        k1 = p.a1 * (d * l) ** 2 + s * p.c1 * L
        k2 = p.a2 * (d * l) ** 2 + s * p.c2 * L
        f, g = (np.cosh, np.sinh) if hyperbolic else (np.sin, np.cos)
        c1, c2 = p.c1, p.c2

        def fn(t, x, y):
            w = (l1 * x + l2 * y + l3 * t) / t
            r2 = _quad(x, y)
            return _pair(d * l * f(w) / t, r2 / (4 * c1 * t) - k1 / t,
                         l * g(w) / t, r2 / (4 * c2 * t) - k2 / t)
        return _closed(fn, domain=(T_POS,), frequencies=(k1, k2))
    return build


_family("C13", "coupled", ("d", "l", "l1", "l2", "l3"),
        "(a1,b1)=a1(1,d^2), (a2,b2)=a2(1,d^2)",
        "(d l sin w, l cos w)/t, w=(l1 x+l2 y+l3 t)/t")(_trig_pair(False))
_family("C14", "coupled", ("d", "l", "l1", "l2", "l3"),
        "(a1,b1)=a1(1,-d^2), (a2,b2)=a2(1,-d^2)",
        "(d l cosh w, l sinh w)/t, w=(l1 x+l2 y+l3 t)/t")(_trig_pair(True))


@_family("C15", "coupled", ("l1", "l2", "l3"),
         _SIGNS_NOTE + ", (l1,l2) != (0,0)",
         "iota/(l1 x + l2 y + l3 t) with lens phases", uses_signs=True)
def _c15(p, q, signs):
    L = _l2(q)
    i1, i2 = _cross_amplitudes(p, False, signs, theta=L)
    l1, l2, l3, c1, c2 = q["l1"], q["l2"], q["l3"], p.c1, p.c2

    def fn(t, x, y):
        den = l1 * x + l2 * y + l3 * t
        r2 = _quad(x, y)
        return _pair(i1 / den, r2 / (4 * c1 * t), i2 / den, r2 / (4 * c2 * t))
    return _closed(fn, loci=(Plane(_plane_arg(q)),), domain=(T_POS,),
                   iota=(i1, i2), balance=2.0, theta=L)


@_family("C16", "coupled", ("d1", "d2"), _SIGNS_NOTE,
         "iota/|(x,y) - (d1,d2) t| with lens phases", uses_signs=True)
def _c16(p, q, signs):
    i1, i2 = _cross_amplitudes(p, False, signs, scale=1.0)
    d1, d2, c1, c2 = q["d1"], q["d2"], p.c1, p.c2

    def fn(t, x, y):
        r = np.sqrt(_quad(x - d1 * t, y - d2 * t))
        r2 = _quad(x, y)
        return _pair(i1 / r, r2 / (4 * c1 * t), i2 / r, r2 / (4 * c2 * t))
    return _closed(fn, loci=(Line((0.0, 0.0, 0.0), (1.0, d1, d2)),), domain=(T_POS,),
                   iota=(i1, i2), balance=1.0)


@_family("C17", "coupled", ("l1", "l2", "l3"),
         _SIGNS_NOTE + ", (l1,l2) != (0,0)",
         "iota * profile((l1 x+l2 y+l3 t)/t)/t with lens phases",
         choices={"profile": tuple(PROFILES)}, uses_signs=True)
def _c17(p, q, signs):
    profile = PROFILES[q["profile"]]
    m = q.get("m")
    L = _l2(q)
    i1, i2 = _cross_amplitudes(p, profile.focusing, signs, theta=L, amp=profile.amp(m))
    kap = profile.kappa(m)
    k1, k2 = kap * p.c1 * L, kap * p.c2 * L
    l1, l2, l3, c1, c2 = q["l1"], q["l2"], q["l3"], p.c1, p.c2

    def fn(t, x, y):
        w = (l1 * x + l2 * y + l3 * t) / t
        f = profile.f(w, m) / t
        r2 = _quad(x, y)
        return _pair(i1 * f, r2 / (4 * c1 * t) - k1 / t, i2 * f, r2 / (4 * c2 * t) - k2 / t)
    loci = _profile_loci(profile, _plane_arg(q), Affine((1.0, 0.0, 0.0)))
    return _closed(fn, loci=loci, domain=(T_POS,), iota=(i1, i2),
                   balance=profile.cubic(m), theta=L, frequencies=(k1, k2))


# --------------------------------------------------------------------------
# module-level conveniences mirroring the methods


def evaluate(inst: Solution, t, x, y, exclusion=DEFAULT_EXCLUSION):
    return inst.evaluate(t, x, y, exclusion)


def amplitude_phase(inst: Solution, t, x, y, exclusion=DEFAULT_EXCLUSION):
    return inst.amplitude_phase(t, x, y, exclusion)


def singular_distance(inst: Solution, t, x, y):
    return inst.singular_distance(t, x, y)
