"""Shared structured-text (JSON) encoding for points, vectors and reports.

Complex scalars are two-element arrays [re, im]; matrices are row-major
2x2 arrays of complex scalars; tuple points are arrays of matrices;
algebra vectors are flat arrays of six reals.  Reports serialize by
recursing through dataclasses with the same scalar rules.  Canonical
bytes (sorted keys, no whitespace) back the determinism contract.
"""

import dataclasses
import json

import numpy as np

__all__ = [
    "encode_complex",
    "parse_complex",
    "matrix_to_json",
    "parse_matrix",
    "point_to_json",
    "parse_point",
    "parse_algebra",
    "jsonable",
    "canonical_dumps",
    "canonical_bytes",
]


def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def parse_complex(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(c, (int, float)) for c in v
    ):
        return complex(v[0], v[1])
    raise ValueError(f"cannot parse complex scalar from {v!r}")


def matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    return [[encode_complex(M[r, c]) for c in range(2)] for r in range(2)]


def parse_matrix(doc):
    if not isinstance(doc, (list, tuple)) or len(doc) != 2:
        raise ValueError("matrix must be a 2x2 array")
    rows = []
    for r in doc:
        if not isinstance(r, (list, tuple)) or len(r) != 2:
            raise ValueError("matrix must be a 2x2 array")
        rows.append([parse_complex(c) for c in r])
    return np.array(rows, dtype=complex)


def point_to_json(Z):
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim == 2:
        Z = Z[None]
    return [matrix_to_json(M) for M in Z]


def _looks_like_matrix(doc):
    try:
        parse_matrix(doc)
        return True
    except ValueError:
        return False


def parse_point(doc):
    """Tuple point from JSON: an array of matrices, or one bare matrix."""
    if _looks_like_matrix(doc):
        return np.stack([parse_matrix(doc)])
    if isinstance(doc, (list, tuple)) and doc and all(_looks_like_matrix(m) for m in doc):
        return np.stack([parse_matrix(m) for m in doc])
    raise ValueError("point must be a 2x2 matrix or a nonempty array of them")


def parse_algebra(doc):
    if (
        isinstance(doc, (list, tuple))
        and len(doc) == 6
        and all(isinstance(c, (int, float)) for c in doc)
    ):
        return np.array([float(c) for c in doc])
    raise ValueError("algebra vector must be an array of six reals")


def jsonable(obj):
    """Recursively convert values to JSON-encodable structures."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, complex):
        return encode_complex(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.complexfloating):
        return encode_complex(complex(obj))
    if isinstance(obj, np.ndarray):
        if np.issubdtype(obj.dtype, np.complexfloating):
            return [jsonable(x) for x in obj.tolist()]
        return obj.tolist()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_dumps(obj):
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))


def canonical_bytes(obj):
    return canonical_dumps(obj).encode("utf-8")
