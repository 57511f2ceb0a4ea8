"""JSON solution specs and the bundled verification suite.

A spec looks like::

    {"family": "S7", "phys": {"a": -2.0, "c": 1.0}, "params": {"m": 0.5},
     "signs": [1, 1], "transforms": [{"kind": "T2", "d1": 0.3, ...}]}

``signs`` and ``transforms`` are optional.  Floats are written with
Python's shortest round-trip repr, so load(dump(x)) is lossless.
"""

from __future__ import annotations

import json
from importlib import resources

from .catalog import Solution, SolutionInstance, instantiate
from .errors import ParameterError
from .residual import DEFAULT_BOX
from .symmetry import SymmetryOp, TransformedSolution, apply_all

SPEC_KEYS = {"family", "phys", "params", "signs", "transforms"}


def from_spec(spec: dict) -> Solution:
    """Build an instance (and apply its transforms) from a spec dict."""
    if not isinstance(spec, dict):
        raise ParameterError("a solution spec must be a JSON object")
    extra = set(spec) - SPEC_KEYS
    if extra:
        raise ParameterError(f"unknown spec keys {sorted(extra)}")
    for key in ("family", "phys"):
        if key not in spec:
            raise ParameterError(f"spec is missing {key!r}")
    inst = instantiate(spec["family"], spec["phys"], spec.get("params", {}),
                       spec.get("signs", (1, 1)))
    ops = [SymmetryOp.from_dict(op) for op in spec.get("transforms", [])]
    return apply_all(ops, inst)


def to_spec(sol: Solution) -> dict:
    if isinstance(sol, (SolutionInstance, TransformedSolution)):
        return sol.to_spec()
    raise ParameterError("only catalog or transformed solutions serialise")


def dumps(sol: Solution) -> str:
    return json.dumps(to_spec(sol), indent=2, sort_keys=True)


def loads(text: str) -> Solution:
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"spec is not valid JSON: {exc}") from None
    return from_spec(spec)


def load(path) -> Solution:
    with open(path) as fh:
        return loads(fh.read())


def dump(sol: Solution, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(sol) + "\n")


def load_suite() -> dict:
    """The bundled suite: default specs and per-entry verification boxes."""
    text = resources.files("nls_exact").joinpath("data/suite.json").read_text()
    return json.loads(text)


def suite_entries(kind: str | None = None):
    """``(name, spec, box)`` for every suite entry, boxes defaulted."""
    suite = load_suite()
    default = suite.get("default_box", DEFAULT_BOX)
    for entry in suite["instances"]:
        fid = entry["spec"]["family"]
        if kind == "single" and not fid.startswith("S"):
            continue
        if kind == "coupled" and not fid.startswith("C"):
            continue
        yield entry["name"], entry["spec"], tuple(map(tuple, entry.get("box", default)))


def default_spec(family: str):
    """First suite entry of ``family``: ``(spec, box)``."""
    for name, spec, box in suite_entries():
        if spec["family"] == family:
            return spec, box
    raise ParameterError(f"no default spec for family {family!r}")
