"""JSON file formats for lattices, weight functions and certificates.

Floats are written with Python's shortest round-trip representation, so
equal inputs give byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .embed2d import DualCertificate, LeastDistortion2D, VerificationReport
from .lattice import Lattice, LatticeError, lattice_from_basis
from .postype import WeightError, WeightFunction


class FormatError(ValueError):
    pass


def _read_json(path) -> dict:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a JSON object at top level")
    return data


def _field(data: dict, key: str, path):
    try:
        return data[key]
    except KeyError:
        raise FormatError(f"{path}: missing field {key!r}") from None


def _tolist(a):
    return np.asarray(a, dtype=float).tolist()


def dumps(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def lattice_to_dict(L: Lattice) -> dict:
    return {"basis": _tolist(L.basis.T)}


def lattice_from_dict(data: dict, path="<lattice>") -> Lattice:
    rows = _field(data, "basis", path)
    try:
        return lattice_from_basis(rows)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, LatticeError):
            raise
        raise FormatError(f"{path}: invalid basis: {exc}") from None


def load_lattice(path) -> Lattice:
    return lattice_from_dict(_read_json(path), path)


def weights_to_dict(z: WeightFunction) -> dict:
    return {
        "dual_basis": _tolist(z.dual.basis.T),
        "weights": [{"u": list(u), "z": w} for u, w in z.entries.items()],
    }


def weights_from_dict(data: dict, path="<weights>") -> WeightFunction:
    dual = lattice_from_dict({"basis": _field(data, "dual_basis", path)}, path)
    entries = {}
    for i, item in enumerate(_field(data, "weights", path)):
        try:
            u = tuple(int(c) for c in item["u"])
            if any(c != int(c) for c in item["u"]):
                raise ValueError("non-integer coordinate")
            w = float(item["z"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}: weights[{i}]: {exc}") from None
        if u in entries:
            raise FormatError(f"{path}: weights[{i}]: duplicate coordinate {list(u)}")
        entries[u] = w
    try:
        return WeightFunction(dual, entries)
    except WeightError as exc:
        raise FormatError(f"{path}: {exc}") from None


def load_weights(path) -> WeightFunction:
    return weights_from_dict(_read_json(path), path)


def certificate_to_dict(cert: DualCertificate, report: VerificationReport | None = None) -> dict:
    return {
        "D": cert.D,
        "c2": cert.c2,
        "x_bar": _tolist(cert.x_bar),
        "beta": cert.beta,
        "Y": _tolist(cert.Y),
        "superbasis": _tolist(cert.superbasis),
        "coeffs": _tolist(cert.coeffs),
        "status": cert.status,
        "checks": report.as_dict() if report is not None else {},
    }


def certificate_from_dict(data: dict, path="<certificate>") -> DualCertificate:
    try:
        cert = DualCertificate(
            D=float(_field(data, "D", path)),
            x_bar=np.array(_field(data, "x_bar", path), dtype=float),
            beta=float(_field(data, "beta", path)),
            Y=np.array(_field(data, "Y", path), dtype=float),
            superbasis=np.array(_field(data, "superbasis", path), dtype=float),
            coeffs=np.array(_field(data, "coeffs", path), dtype=float),
            status=str(data.get("status", "unverified")),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{path}: {exc}") from None
    if cert.x_bar.shape != (2,) or cert.Y.shape != (2, 2) or cert.superbasis.shape != (3, 2):
        raise FormatError(f"{path}: certificate arrays have the wrong shape")
    return cert


def load_certificate(path) -> DualCertificate:
    return certificate_from_dict(_read_json(path), path)


def pipeline_summary(run: LeastDistortion2D) -> dict:
    return {
        "D": run.D,
        "c2": run.c2,
        "x_bar": _tolist(run.result.x_bar),
        "contracted_points": _tolist(run.result.contracted_points),
        "verified": run.verified,
        "failures": run.report.failures(),
    }
