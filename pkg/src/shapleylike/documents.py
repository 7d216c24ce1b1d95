"""JSON documents for games, allocation matrices and decomposition certificates.

All documents store coalitions in bitmask order. A game or allocation may
carry ``labels`` (``"{1,3}"`` style); when present they say which coalition
each value belongs to and the loader reorders to bitmask order.

Numbers are written with 17 significant digits so floats survive a round
trip, and keys are written in a fixed order so output is byte-stable.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .allocations import AllocationMatrix, CheckReport, Violation
from .decomposition import Decomposition
from .games import Coalition, Game, MAX_PLAYERS


class DocumentError(ValueError):
    """A document could not be read or does not have the required shape."""


# -- writing -----------------------------------------------------------------


def format_number(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x}")
    if x == 0.0:
        return "0"
    return format(x, ".17g")


def _is_scalar(x: Any) -> bool:
    return x is None or isinstance(x, (bool, int, float, str, np.integer, np.floating))


def _scalar(x: Any) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format_number(x)
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj: Any, level: int = 0) -> str:
    """Serialize to JSON; lists of scalars stay on one line."""
    pad = "  " * (level + 1)
    end = "  " * level
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(_is_scalar(x) for x in seq):
            return "[" + ", ".join(_scalar(x) for x in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(x, level + 1) for x in seq) + "\n" + end + "]"
    return _scalar(obj)


def game_to_doc(v: Game, labels: bool = True) -> dict:
    doc: dict[str, Any] = {"n": v.n, "values": v.values.tolist()}
    if labels:
        doc["labels"] = [Coalition(m, v.n).label() for m in range(1 << v.n)]
    return doc


def allocation_to_doc(A: AllocationMatrix) -> dict:
    return {"n": A.n, "rows": A.entries.tolist()}


def certificate_to_doc(d: Decomposition) -> dict:
    return {
        "n": d.n,
        "terms": [{"permutation": list(p), "weight": w} for p, w in d.terms],
    }


def violation_to_doc(v: Violation) -> dict:
    return {
        "condition": v.condition,
        "player": v.player,
        "coalition": v.coalition.label() if v.coalition is not None else None,
        "observed": v.observed,
        "relation": v.relation,
        "target": v.target,
        "tol": v.tol,
        "detail": v.detail,
    }


def report_to_doc(r: CheckReport) -> dict:
    return {
        "name": r.name,
        "passed": r.passed,
        "violations": [violation_to_doc(v) for v in r.violations],
    }


def write_document(doc: dict, path: str | Path) -> None:
    Path(path).write_text(dumps(doc) + "\n", encoding="utf-8")


def save_game(v: Game, path: str | Path, labels: bool = True) -> None:
    write_document(game_to_doc(v, labels), path)


def save_allocation(A: AllocationMatrix, path: str | Path) -> None:
    write_document(allocation_to_doc(A), path)


def save_certificate(d: Decomposition, path: str | Path) -> None:
    write_document(certificate_to_doc(d), path)


# -- reading -----------------------------------------------------------------


def read_document(path: str | Path) -> Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"{path}: cannot read: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}:{exc.lineno}:{exc.colno}: malformed document: {exc.msg}") from None


def _unwrap(doc: Any, key: str, required: str, where: str) -> dict:
    if isinstance(doc, dict) and required not in doc and isinstance(doc.get(key), dict):
        doc = doc[key]
    if not isinstance(doc, dict):
        raise DocumentError(f"{where}: expected a JSON object")
    return doc


def _players(doc: dict, where: str) -> int:
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int):
        raise DocumentError(f"{where}: field 'n' must be an integer")
    if not 1 <= n <= MAX_PLAYERS:
        raise DocumentError(f"{where}: field 'n' must be in 1..{MAX_PLAYERS}, got {n}")
    return n


def _numbers(seq: Any, length: int, where: str) -> list[float]:
    if not isinstance(seq, list):
        raise DocumentError(f"{where}: expected an array")
    if len(seq) != length:
        raise DocumentError(f"{where}: expected {length} numbers, got {len(seq)}")
    out = []
    for k, x in enumerate(seq):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise DocumentError(f"{where}[{k}]: expected a finite number, got {x!r}")
        out.append(float(x))
    return out


def _label_order(doc: dict, n: int, where: str) -> list[int] | None:
    """Mask for each position of the stored arrays, or ``None`` without labels."""
    labels = doc.get("labels")
    if labels is None:
        return None
    if not isinstance(labels, list) or len(labels) != 1 << n:
        raise DocumentError(f"{where}.labels: expected {1 << n} coalition labels")
    masks = []
    for k, lab in enumerate(labels):
        if not isinstance(lab, str):
            raise DocumentError(f"{where}.labels[{k}]: expected a string")
        try:
            masks.append(Coalition.parse(lab, n).mask)
        except ValueError as exc:
            raise DocumentError(f"{where}.labels[{k}]: {exc}") from None
    if len(set(masks)) != len(masks):
        raise DocumentError(f"{where}.labels: repeated coalition")
    return masks


def _reorder(values: list[float], order: list[int] | None) -> list[float]:
    if order is None:
        return values
    out = [0.0] * len(values)
    for pos, m in enumerate(order):
        out[m] = values[pos]
    return out


def game_from_doc(doc: Any, where: str = "game") -> Game:
    doc = _unwrap(doc, "game", "values", where)
    n = _players(doc, where)
    values = _numbers(doc.get("values"), 1 << n, f"{where}.values")
    return Game(n, _reorder(values, _label_order(doc, n, where)))


def allocation_from_doc(doc: Any, where: str = "allocation") -> AllocationMatrix:
    doc = _unwrap(doc, "allocation", "rows", where)
    n = _players(doc, where)
    rows = doc.get("rows")
    if not isinstance(rows, list) or len(rows) != n:
        raise DocumentError(f"{where}.rows: expected {n} rows")
    order = _label_order(doc, n, where)
    entries = [
        _reorder(_numbers(r, 1 << n, f"{where}.rows[{k}]"), order) for k, r in enumerate(rows)
    ]
    return AllocationMatrix(n, entries)


def certificate_from_doc(doc: Any, where: str = "certificate") -> Decomposition:
    doc = _unwrap(doc, "certificate", "terms", where)
    n = _players(doc, where)
    terms = doc.get("terms")
    if not isinstance(terms, list):
        raise DocumentError(f"{where}.terms: expected an array")
    parsed = []
    for k, t in enumerate(terms):
        here = f"{where}.terms[{k}]"
        if not isinstance(t, dict):
            raise DocumentError(f"{here}: expected an object")
        perm = t.get("permutation")
        if not isinstance(perm, list) or not all(isinstance(p, int) and not isinstance(p, bool) for p in perm):
            raise DocumentError(f"{here}.permutation: expected an array of players")
        (w,) = _numbers([t.get("weight")], 1, f"{here}.weight")
        parsed.append((tuple(perm), w))
    try:
        return Decomposition(n, tuple(parsed))
    except ValueError as exc:
        raise DocumentError(f"{where}: {exc}") from None


def load_game(path: str | Path) -> Game:
    return game_from_doc(read_document(path), str(path))


def load_allocation(path: str | Path) -> AllocationMatrix:
    return allocation_from_doc(read_document(path), str(path))


def load_certificate(path: str | Path) -> Decomposition:
    return certificate_from_doc(read_document(path), str(path))
