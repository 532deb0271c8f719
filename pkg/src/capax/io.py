"""JSON measure and score files.

Measure file (``format_version`` 1)::

    {
      "format_version": 1,
      "n": 3,
      "labels": ["x1", "x2", "x3"],
      "representation": "capacity" | "mobius" | "interaction",
      "storage": "dense" | "psym",
      "values": [...],            # dense: 2**n numbers, index = bitmask
                                  # psym: flat row-major matrix, last block fastest
      "blocks": [["x1"], ["x2", "x3"]],   # psym only, axis order of the matrix
      "extents": [2, 3],                  # psym only
      "metadata": {...}                   # optional, free-form
    }

Bit ``i`` of a dense index stands for ``labels[i]``. Numbers are written with
``repr`` so floats round-trip exactly; exact rationals are written as
strings such as ``"1/3"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from capax.capacity import InteractionRepr, MobiusRepr, SetFunction, as_array
from capax.errors import CapaxError
from capax.psym import KINDS, PSymmetricCapacity
from capax.setcore import GroundSet, Partition

FORMAT_VERSION = 1
STORAGES = ("dense", "psym")


class ParseError(CapaxError, ValueError):
    def __init__(self, message: str, field_name: str | None = None, source: str | None = None):
        self.field_name = field_name
        self.source = source
        where = []
        if source:
            where.append(str(source))
        if field_name:
            where.append(f"field {field_name!r}")
        prefix = ": ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


@dataclass
class MeasureFile:
    """In-memory form of a measure file.

    ``values`` is a flat array (float64 or Fraction objects).
    """

    labels: list[str]
    representation: str
    storage: str
    values: np.ndarray
    blocks: list[list[str]] | None = None
    extents: list[int] | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def ground(self) -> GroundSet:
        return GroundSet(tuple(self.labels))

    def to_object(self):
        """The matching library object for this file."""
        ground = self.ground
        if self.storage == "psym":
            partition = Partition.from_labels(ground, self.blocks)
            file_order = [ground.mask(b) for b in self.blocks]
            matrix = self.values.reshape(self.extents)
            # file axes may be in any block order; library order is canonical
            perm = [file_order.index(b) for b in partition.blocks]
            matrix = np.transpose(matrix, perm)
            return PSymmetricCapacity(partition, matrix, self.representation, ground)
        if self.representation == "capacity":
            return SetFunction(ground, self.values)
        if self.representation == "mobius":
            return MobiusRepr(ground, self.values)
        return InteractionRepr(ground, self.values)

    @classmethod
    def from_object(cls, obj, metadata: dict | None = None) -> "MeasureFile":
        metadata = dict(metadata or {})
        if isinstance(obj, PSymmetricCapacity):
            return cls(
                labels=list(obj.ground.labels),
                representation=obj.kind,
                storage="psym",
                values=obj.matrix.ravel().copy(),
                blocks=obj.partition.labels(obj.ground),
                extents=list(obj.extents),
                metadata=metadata,
            )
        if isinstance(obj, SetFunction):
            rep, vals = "capacity", obj.values
        elif isinstance(obj, MobiusRepr):
            rep, vals = "mobius", obj.coeffs
        elif isinstance(obj, InteractionRepr):
            rep, vals = "interaction", obj.coeffs
        else:
            raise TypeError(f"cannot serialise {type(obj).__name__}")
        return cls(list(obj.ground.labels), rep, "dense", vals.copy(), metadata=metadata)


def _encode_number(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    return float(x)


def _decode_number(x, field_name: str, source):
    if isinstance(x, bool):
        raise ParseError(f"expected a number, got {x!r}", field_name, source)
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a number: {x!r}", field_name, source) from None
    raise ParseError(f"expected a number, got {type(x).__name__}", field_name, source)


def _decode_values(raw, field_name: str, source) -> np.ndarray:
    if not isinstance(raw, list):
        raise ParseError("expected a list of numbers", field_name, source)
    vals = [_decode_number(x, f"{field_name}[{i}]", source) for i, x in enumerate(raw)]
    rational = any(isinstance(v, Fraction) for v in vals)
    return as_array(vals, rational=rational)


def measure_to_dict(mf: MeasureFile) -> dict:
    out: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "n": mf.n,
        "labels": list(mf.labels),
        "representation": mf.representation,
        "storage": mf.storage,
    }
    if mf.storage == "psym":
        out["blocks"] = [list(b) for b in mf.blocks]
        out["extents"] = list(mf.extents)
    out["values"] = [_encode_number(v) for v in mf.values.tolist()]
    if mf.metadata:
        out["metadata"] = mf.metadata
    return out


def measure_from_dict(data: Any, source: str | None = None) -> MeasureFile:
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object", None, source)

    def need(key):
        if key not in data:
            raise ParseError("missing required field", key, source)
        return data[key]

    version = need("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version!r}", "format_version", source)
    labels = need("labels")
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise ParseError("expected a list of strings", "labels", source)
    if len(set(labels)) != len(labels) or not labels:
        raise ParseError("labels must be nonempty and unique", "labels", source)
    n = data.get("n", len(labels))
    if n != len(labels):
        raise ParseError(f"n = {n} but {len(labels)} labels given", "n", source)
    rep = need("representation")
    if rep not in KINDS:
        raise ParseError(f"must be one of {list(KINDS)}, got {rep!r}", "representation", source)
    storage = need("storage")
    if storage not in STORAGES:
        raise ParseError(f"must be one of {list(STORAGES)}, got {storage!r}", "storage", source)
    values = _decode_values(need("values"), "values", source)
    metadata = data.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise ParseError("expected an object", "metadata", source)

    if storage == "dense":
        if values.size != 1 << n:
            raise ParseError(f"dense storage needs {1 << n} values, got {values.size}", "values", source)
        return MeasureFile(list(labels), rep, storage, values, metadata=metadata)

    blocks = need("blocks")
    if not isinstance(blocks, list) or not all(isinstance(b, list) and b for b in blocks):
        raise ParseError("expected a list of nonempty label lists", "blocks", source)
    flat = [x for b in blocks for x in b]
    if sorted(flat) != sorted(labels):
        raise ParseError("blocks must cover every label exactly once", "blocks", source)
    extents = data.get("extents", [len(b) + 1 for b in blocks])
    if list(extents) != [len(b) + 1 for b in blocks]:
        raise ParseError("extents must equal block sizes plus one", "extents", source)
    if values.size != math.prod(extents):
        raise ParseError(f"matrix needs {math.prod(extents)} values, got {values.size}", "values", source)
    return MeasureFile(list(labels), rep, storage, values, [list(b) for b in blocks], list(extents), metadata)


def dumps_measure(mf: MeasureFile) -> str:
    return json.dumps(measure_to_dict(mf), indent=2, ensure_ascii=False) + "\n"


def loads_measure(text: str, source: str | None = None) -> MeasureFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", None, source) from None
    return measure_from_dict(data, source)


def read_measure(path) -> MeasureFile:
    path = Path(path)
    return loads_measure(path.read_text(encoding="utf-8"), str(path))


def write_measure(path, mf: MeasureFile) -> None:
    Path(path).write_text(dumps_measure(mf), encoding="utf-8")


def parse_scores(data: Any, ground: GroundSet, source: str | None = None) -> list:
    """Scores as a list aligned with ``ground.labels``.

    Accepts a list, a ``{label: value}`` object, or either wrapped in
    ``{"scores": ...}``.
    """
    if isinstance(data, dict) and "scores" in data:
        data = data["scores"]
    if isinstance(data, list):
        if len(data) != ground.n:
            raise ParseError(f"expected {ground.n} scores, got {len(data)}", "scores", source)
        vals = [_decode_number(x, f"scores[{i}]", source) for i, x in enumerate(data)]
    elif isinstance(data, dict):
        unknown = set(data) - set(ground.labels)
        if unknown:
            raise ParseError(f"unknown labels {sorted(unknown)}", "scores", source)
        missing = [lab for lab in ground.labels if lab not in data]
        if missing:
            raise ParseError(f"missing labels {missing}", "scores", source)
        vals = [_decode_number(data[lab], f"scores.{lab}", source) for lab in ground.labels]
    else:
        raise ParseError("expected a list or a label->score object", "scores", source)
    if any(v < 0 for v in vals):
        raise ParseError("scores must be nonnegative", "scores", source)
    return vals


def read_scores(path, ground: GroundSet) -> list:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}", None, str(path)) from None
    return parse_scores(data, ground, str(path))
