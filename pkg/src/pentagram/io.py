"""JSON polygon files.

Complex numbers are stored as [re, im] pairs. The layout of ``data`` depends
on ``kind``: {"a": [...], "b": [...]}, {"x": [...], "y": [...]} or
{"vertices": [[v0, v1, v2], ...]} with homogeneous vertex components.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coords import ABCoords, XYCoords
from .errors import PentagramError
from .polygon import VertexChain

SCHEMA_VERSION = "1"
KINDS = ("ab", "xy", "vertices")


class PolygonFileError(PentagramError, ValueError):
    pass


def encode_complex(values) -> list:
    arr = np.asarray(values, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [encode_complex(v) for v in arr]


def decode_complex(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1:] != (2,):
        raise PolygonFileError("complex values must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


@dataclass
class PolygonFile:
    n: int
    kind: str
    data: dict
    monodromy: list | None = None
    seed: int | None = None
    schema_version: str = SCHEMA_VERSION
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PolygonFileError(f"unknown kind {self.kind!r}")
        if self.monodromy is not None and self.kind != "vertices":
            raise PolygonFileError("monodromy is only meaningful for kind 'vertices'")

    # construction

    @classmethod
    def from_object(cls, obj, seed=None) -> "PolygonFile":
        if isinstance(obj, ABCoords):
            return cls(obj.n, "ab", {"a": encode_complex(obj.a), "b": encode_complex(obj.b)}, seed=seed)
        if isinstance(obj, XYCoords):
            return cls(obj.n, "xy", {"x": encode_complex(obj.x), "y": encode_complex(obj.y)}, seed=seed)
        if isinstance(obj, VertexChain):
            return cls(
                obj.n,
                "vertices",
                {"vertices": encode_complex(obj.vectors)},
                monodromy=encode_complex(obj.monodromy),
                seed=seed,
            )
        raise TypeError(f"cannot store {type(obj).__name__}")

    def to_object(self):
        d = self.data
        try:
            if self.kind == "ab":
                obj = ABCoords(decode_complex(d["a"]), decode_complex(d["b"]))
            elif self.kind == "xy":
                obj = XYCoords(decode_complex(d["x"]), decode_complex(d["y"]))
            else:
                M = None if self.monodromy is None else decode_complex(self.monodromy)
                obj = VertexChain(decode_complex(d["vertices"]), M)
        except KeyError as exc:
            raise PolygonFileError(f"missing data field {exc}") from None
        if obj.n != self.n:
            raise PolygonFileError(f"file says n={self.n} but data has {obj.n} entries")
        return obj

    # serialization

    def to_dict(self) -> dict:
        out = {"schema_version": self.schema_version, "n": self.n, "kind": self.kind, "data": self.data}
        if self.monodromy is not None:
            out["monodromy"] = self.monodromy
        if self.seed is not None:
            out["seed"] = self.seed
        out.update(self.extra)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "PolygonFile":
        missing = {"schema_version", "n", "kind", "data"} - d.keys()
        if missing:
            raise PolygonFileError(f"missing fields: {sorted(missing)}")
        if str(d["schema_version"]) != SCHEMA_VERSION:
            raise PolygonFileError(f"unsupported schema_version {d['schema_version']!r}")
        known = {"schema_version", "n", "kind", "data", "monodromy", "seed"}
        return cls(
            n=int(d["n"]),
            kind=d["kind"],
            data=d["data"],
            monodromy=d.get("monodromy"),
            seed=d.get("seed"),
            schema_version=str(d["schema_version"]),
            extra={k: v for k, v in d.items() if k not in known},
        )

    @classmethod
    def loads(cls, text: str) -> "PolygonFile":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise PolygonFileError(f"not valid JSON: {exc}") from None

    def write(self, path):
        Path(path).write_text(self.dumps())

    @classmethod
    def read(cls, path) -> "PolygonFile":
        return cls.loads(Path(path).read_text())
