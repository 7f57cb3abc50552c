"""
Custom models loaded from JSON documents.

Document schema::

    {
      "dim": N,
      "params": M,
      "terms": [
        {"coeff": "x1" | "1-x1" | "0.5*x2 - 1" | 2.0, "matrix": [[[re, im], ...], ...]}
      ]
    }

H(x) = sum_k coeff_k(x) * matrix_k. Coefficients are affine in x (1-based
parameter names x1..xM); each matrix is an N x N nested list of ``[re, im]``
pairs (a bare number is accepted for a real entry).
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ..artifacts import read_json
from ..errors import ConfigError, InvalidModel
from .model import AffineCoefficient, AffineModel, AffineTerm, check_hermitian

_TERM_PATTERN = re.compile(
    r"""
    (?P<sign>[+-])?\s*
    (?:
        (?P<scale>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)\s*\*?\s*
    )?
    (?:x(?P<index>\d+))?
    """,
    re.VERBOSE,
)


def _require_keys(payload: Mapping[str, Any], keys: set[str], *, context: str) -> None:
    missing = keys.difference(payload.keys())
    if missing:
        raise ConfigError(f"Missing required keys in {context}: {', '.join(sorted(missing))}")


def parse_coefficient(expression: str | float | int, param_dim: int) -> AffineCoefficient:
    """
    Parse an affine coefficient such as ``"x1"``, ``"1-x1"`` or ``"0.5*x2 + 1"``.

    Raises
    ------
    ConfigError
        If the expression is not affine in x1..xM.
    """
    if isinstance(expression, (int, float)) and not isinstance(expression, bool):
        return AffineCoefficient(constant=float(expression), weights=(0.0,) * param_dim)
    if not isinstance(expression, str):
        raise ConfigError(f"coefficient must be a number or string, got {expression!r}")

    text = expression.replace(" ", "")
    if not text:
        raise ConfigError("empty coefficient expression")
    constant = 0.0
    weights = [0.0] * param_dim
    position = 0
    while position < len(text):
        match = _TERM_PATTERN.match(text, position)
        if match is None or match.end() == position or (
            match.group("scale") is None and match.group("index") is None
        ):
            raise ConfigError(f"cannot parse coefficient {expression!r} near {text[position:]!r}")
        if position > 0 and match.group("sign") is None:
            raise ConfigError(f"missing operator in coefficient {expression!r}")
        sign = -1.0 if match.group("sign") == "-" else 1.0
        scale = float(match.group("scale")) if match.group("scale") is not None else 1.0
        if match.group("index") is None:
            constant += sign * scale
        else:
            index = int(match.group("index"))
            if not 1 <= index <= param_dim:
                raise ConfigError(f"coefficient {expression!r} references x{index}; M={param_dim}")
            weights[index - 1] += sign * scale
        position = match.end()
    return AffineCoefficient(constant=constant, weights=tuple(weights))


def _parse_matrix(raw: Any, dim: int, *, context: str) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != dim:
        raise ConfigError(f"{context}: matrix must have {dim} rows")
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for row_index, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != dim:
            raise ConfigError(f"{context}: row {row_index} must have {dim} entries")
        for col_index, entry in enumerate(row):
            if isinstance(entry, list) and len(entry) == 2:
                matrix[row_index, col_index] = complex(float(entry[0]), float(entry[1]))
            elif isinstance(entry, (int, float)) and not isinstance(entry, bool):
                matrix[row_index, col_index] = float(entry)
            else:
                raise ConfigError(f"{context}: entry ({row_index},{col_index}) must be [re, im]")
    return matrix


def model_from_dict(payload: Mapping[str, Any], *, name: str = "custom") -> AffineModel:
    """
    Build an :class:`AffineModel` from a parsed custom-model document.

    Raises
    ------
    ConfigError
        If the document is malformed.
    InvalidModel
        If a term matrix is not Hermitian.
    """
    _require_keys(payload, {"dim", "params", "terms"}, context="custom model")
    unknown = set(payload).difference({"dim", "params", "terms", "name"})
    if unknown:
        raise ConfigError(f"Unknown keys in custom model: {', '.join(sorted(unknown))}")
    dim = int(payload["dim"])
    param_dim = int(payload["params"])
    if dim < 1 or param_dim < 1:
        raise ConfigError("custom model needs dim >= 1 and params >= 1")
    raw_terms = payload["terms"]
    if not isinstance(raw_terms, list) or not raw_terms:
        raise ConfigError("custom model needs a non-empty 'terms' list")

    terms: list[AffineTerm] = []
    for position, raw in enumerate(raw_terms):
        if not isinstance(raw, Mapping):
            raise ConfigError(f"term {position} must be an object")
        _require_keys(raw, {"coeff", "matrix"}, context=f"term {position}")
        matrix = _parse_matrix(raw["matrix"], dim, context=f"term {position}")
        try:
            check_hermitian(matrix, tolerance=1e-12, context=f"term {position}")
        except InvalidModel as exc:
            raise InvalidModel(f"custom model: {exc}") from exc
        terms.append(AffineTerm(coefficient=parse_coefficient(raw["coeff"], param_dim), matrix=matrix))

    return AffineModel(
        name=str(payload.get("name", name)),
        dim=dim,
        param_dim=param_dim,
        terms=tuple(terms),
        metadata={"source": "custom", "terms": len(terms)},
    )


def load_custom_model(path: Path) -> AffineModel:
    """Read a custom model document from disk."""
    return model_from_dict(read_json(path), name=path.stem)
