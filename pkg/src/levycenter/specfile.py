"""Loading and validation of problem specification files.

A specification file is a JSON document describing exactly one entity (a
measure triplet, an orbit representation, or a mixing representation) plus
optional symmetry-group candidates and quasi-decomposability pairs.  The
authoritative format description lives in ``schema/spec.schema.json``,
which is also enforced here before any numeric construction happens.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources

import jsonschema
import numpy as np

from .idmeasure import IdMeasure, LevyAtoms
from .levyrep import MixingLevy, OrbitLevy


class SpecError(ValueError):
    """Malformed or inconsistent specification file."""


@dataclass(frozen=True)
class SpecData:
    """Parsed and validated content of a specification file."""

    dimension: int
    measure: IdMeasure | None
    orbit_rep: OrbitLevy | None
    mixing_rep: MixingLevy | None
    group_elements: list | None
    group_close: bool
    pairs: list | None
    digest: str
    raw: dict

    @property
    def kind(self) -> str:
        if self.measure is not None:
            return "measure"
        if self.orbit_rep is not None:
            return "orbit_rep"
        return "mixing_rep"


def _schema() -> dict:
    text = resources.files("levycenter.schema").joinpath("spec.schema.json").read_text()
    return json.loads(text)


def _atoms(entries, dim: int) -> LevyAtoms:
    if not entries:
        return LevyAtoms.empty(dim)
    pts = np.array([e["point"] for e in entries], dtype=float)
    if pts.shape[1] != dim:
        raise SpecError(f"atom dimension {pts.shape[1]} does not match dimension {dim}")
    w = np.array([e["weight"] for e in entries], dtype=float)
    return LevyAtoms(pts, w)


def _matrix(obj, dim: int, what: str) -> np.ndarray:
    arr = np.array(obj, dtype=float)
    if arr.shape != (dim, dim):
        raise SpecError(f"{what} must be {dim}x{dim}, got shape {arr.shape}")
    return arr


def _vector(obj, dim: int, what: str) -> np.ndarray:
    arr = np.array(obj, dtype=float)
    if arr.shape != (dim,):
        raise SpecError(f"{what} must have length {dim}, got shape {arr.shape}")
    return arr


def load_spec(path, validate_reps: bool = True) -> SpecData:
    """Parse, schema-check, and construct the objects of a spec file.

    JSON syntax errors are re-raised with line/column information; schema
    violations and dimension mismatches raise :class:`SpecError`.  With
    ``validate_reps`` false, representation invariants are not enforced at
    construction (used by the ``validate`` command, which wants to report
    them instead of failing).
    """
    with open(path, "rb") as fh:
        payload = fh.read()
    digest = hashlib.sha256(payload).hexdigest()
    try:
        raw = json.loads(payload.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        jsonschema.validate(raw, _schema())
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SpecError(f"schema violation at {loc}: {exc.message}") from exc

    dim = raw["dimension"]
    measure = orbit = mixing = None
    if "measure" in raw:
        entry = raw["measure"]
        measure = IdMeasure(
            _vector(entry["shift"], dim, "measure.shift"),
            _matrix(entry["cov"], dim, "measure.cov"),
            _atoms(entry["atoms"], dim),
        )
    if "orbit_rep" in raw:
        entry = raw["orbit_rep"]
        orbit = OrbitLevy(
            _atoms(entry["seeds"], dim),
            _matrix(entry["op"], dim, "orbit_rep.op"),
            float(entry["power"]),
            validate=validate_reps,
        )
    if "mixing_rep" in raw:
        entry = raw["mixing_rep"]
        mixing = MixingLevy(
            _atoms(entry["seeds"], dim),
            _matrix(entry["exponent"], dim, "mixing_rep.exponent"),
            validate=validate_reps,
        )
    group_elements = None
    group_close = True
    if "group" in raw:
        group_elements = [_matrix(el, dim, "group.elements") for el in raw["group"]["elements"]]
        group_close = bool(raw["group"].get("close", True))
    pairs = None
    if "pairs" in raw:
        pairs = [
            (float(p["power"]), _matrix(p["op"], dim, "pairs.op")) for p in raw["pairs"]
        ]
    return SpecData(
        dimension=dim,
        measure=measure,
        orbit_rep=orbit,
        mixing_rep=mixing,
        group_elements=group_elements,
        group_close=group_close,
        pairs=pairs,
        digest=digest,
        raw=raw,
    )


def load_frequencies(path, dim: int) -> np.ndarray:
    """Read a JSON array of frequency vectors."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(
                f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    arr = np.array(raw, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise SpecError(f"frequencies must be an array of length-{dim} vectors")
    return arr
