"""Spectrum files: a small JSON document plus an optional binary sidecar.

The document holds ``format_version``, ``domain``, ``n``, ``h``, ``tol``,
``seed``, ``eigenvalues``, ``residuals`` and ``has_vectors`` (oracle files
add ``provenance`` and ``exact``).  Floats are written with 17 significant
digits, which round-trips every double exactly, and keys are written in a
fixed order so identical runs give byte-identical files.

Eigenvectors go to ``<stem>.vec``: the 8-byte magic ``SGWVEC01`` followed
by little-endian float64 values in column-major order.  The column count
is the number of eigenvalues; the row count follows from the file size.
"""

import json
import math
import os

import numpy as np

from .eigensolve import Spectrum
from .errors import InvalidDomain, SpectrumFormatError
from .geometry import DomainSpec

__all__ = ["write_spectrum", "read_spectrum", "sidecar_path", "FORMAT_VERSION", "VEC_MAGIC"]

FORMAT_VERSION = 1
VEC_MAGIC = b"SGWVEC01"


def sidecar_path(path):
    path = os.fspath(path)
    stem = path[:-5] if path.endswith(".json") else path
    return stem + ".vec"


def _encode(obj):
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError("spectrum files hold finite numbers only")
        return format(x, ".17g")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def write_spectrum(spectrum, path, provenance=None, exact=None, write_vectors=True):
    """Write ``spectrum`` to ``path`` (and its eigenvectors to the sidecar)."""
    meta = getattr(spectrum, "meta", {}) or {}
    domain = getattr(spectrum, "domain", None)
    vecs = getattr(spectrum, "eigenvectors", None) if write_vectors else None
    doc = {
        "format_version": FORMAT_VERSION,
        "domain": domain.to_dict() if domain is not None else None,
        "n": int(spectrum.n),
        "h": meta.get("h"),
        "tol": meta.get("tol"),
        "seed": meta.get("seed"),
        "eigenvalues": np.asarray(spectrum.eigenvalues, dtype=float),
        "residuals": np.asarray(spectrum.residual_norms, dtype=float),
        "has_vectors": vecs is not None,
    }
    provenance = provenance if provenance is not None else getattr(spectrum, "provenance", None)
    if provenance is not None:
        doc["provenance"] = provenance
        doc["exact"] = bool(exact if exact is not None else getattr(spectrum, "exact", False))
    lines = ["{"]
    items = list(doc.items())
    for j, (key, value) in enumerate(items):
        comma = "," if j < len(items) - 1 else ""
        lines.append(f"  {json.dumps(key)}: {_encode(value)}{comma}")
    lines.append("}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    if vecs is not None:
        with open(sidecar_path(path), "wb") as fh:
            fh.write(VEC_MAGIC)
            fh.write(np.asarray(vecs, dtype="<f8").tobytes(order="F"))


def _read_vectors(path, ncols):
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:8] != VEC_MAGIC:
        raise SpectrumFormatError(f"{path}: bad eigenvector magic")
    body = raw[8:]
    if ncols == 0 or len(body) % (8 * ncols):
        raise SpectrumFormatError(f"{path}: size does not match {ncols} columns")
    data = np.frombuffer(body, dtype="<f8")
    return data.reshape((len(data) // ncols, ncols), order="F").astype(float)


def read_spectrum(path, load_vectors=True):
    """Parse a spectrum file.

    Raises
    ------
    SpectrumFormatError
        For malformed documents or sidecars.
    OSError
        If the file cannot be read.
    """
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpectrumFormatError(f"{path}: not a spectrum document ({exc})") from exc
    if not isinstance(doc, dict):
        raise SpectrumFormatError(f"{path}: top level must be an object")
    missing = [k for k in ("format_version", "n", "eigenvalues", "residuals") if k not in doc]
    if missing:
        raise SpectrumFormatError(f"{path}: missing fields {', '.join(missing)}")
    if doc["format_version"] != FORMAT_VERSION:
        raise SpectrumFormatError(f"{path}: unsupported format_version {doc['format_version']}")
    try:
        lam = np.array(doc["eigenvalues"], dtype=float)
        res = np.array(doc["residuals"], dtype=float)
        n = int(doc["n"])
        domain = DomainSpec.from_dict(doc["domain"]) if doc.get("domain") else None
    except (TypeError, ValueError, InvalidDomain) as exc:
        raise SpectrumFormatError(f"{path}: {exc}") from exc
    if lam.ndim != 1 or res.shape != lam.shape:
        raise SpectrumFormatError(f"{path}: eigenvalues and residuals must be equal-length lists")
    if np.any(np.diff(lam) < 0):
        raise SpectrumFormatError(f"{path}: eigenvalues are not ascending")
    meta = {"domain": domain, "h": doc.get("h"), "n": n, "tol": doc.get("tol"),
            "seed": doc.get("seed")}
    for key in ("provenance", "exact"):
        if key in doc:
            meta[key] = doc[key]
    vecs = None
    if doc.get("has_vectors") and load_vectors:
        vecs = _read_vectors(sidecar_path(path), len(lam))
    return Spectrum(lam, res, vecs, meta, None)
