"""Checkpoint format for states and operators.

A file is one line of JSON followed by raw little-endian complex128 data::

    {"format": "dismagick-tensors", "version": 1, "kind": "mps",
     "shapes": [[1, 2, 2], ...], "meta": {"center": 0}}\\n
    <row-major bytes of tensor 0><row-major bytes of tensor 1>...

``kind`` is one of ``statevector``, ``mps`` or ``mpo``.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FORMAT = "dismagick-tensors"
VERSION = 1
_DTYPE = np.dtype("<c16")


def write_arrays(path, kind: str, arrays, meta: dict | None = None) -> None:
    arrays = [np.ascontiguousarray(a, dtype=_DTYPE) for a in arrays]
    header = {
        "format": FORMAT,
        "version": VERSION,
        "kind": kind,
        "dtype": "complex128",
        "byteorder": "little",
        "shapes": [list(a.shape) for a in arrays],
        "meta": meta or {},
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        for a in arrays:
            fh.write(a.tobytes(order="C"))


def read_arrays(path):
    """Return ``(kind, arrays, meta)``."""
    data = Path(path).read_bytes()
    nl = data.index(b"\n")
    header = json.loads(data[:nl])
    if header.get("format") != FORMAT:
        raise ValueError(f"{path}: not a {FORMAT} file")
    if header.get("version") != VERSION:
        raise ValueError(f"{path}: unsupported version {header.get('version')}")
    offset = nl + 1
    arrays = []
    for shape in header["shapes"]:
        count = int(np.prod(shape, dtype=np.int64))
        a = np.frombuffer(data, dtype=_DTYPE, count=count, offset=offset)
        arrays.append(a.reshape(shape).astype(np.complex128))
        offset += count * _DTYPE.itemsize
    if offset != len(data):
        raise ValueError(f"{path}: trailing or missing data")
    return header["kind"], arrays, header["meta"]


def save_state(path, state) -> None:
    from .mps import MPS
    from .statevector import Statevector

    if isinstance(state, MPS):
        write_arrays(path, "mps", state.tensors, {"center": state.center})
    elif isinstance(state, Statevector):
        write_arrays(path, "statevector", [state.amplitudes])
    else:
        raise TypeError(f"cannot serialize {type(state).__name__}")


def load_state(path):
    from .mps import MPS
    from .statevector import Statevector

    kind, arrays, meta = read_arrays(path)
    if kind == "mps":
        return MPS(arrays, meta.get("center"))
    if kind == "statevector":
        return Statevector(arrays[0])
    raise ValueError(f"{path}: expected a state, found {kind!r}")
