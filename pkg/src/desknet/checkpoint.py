"""Single-file network checkpoints.

Byte layout (fixed; round-trips bit-exactly):

    line 1: b"desknet-checkpoint 1\\n"
    line 2: one JSON object + b"\\n" holding the architecture
            (``Network.spec()``), parameter names/shapes in declaration
            order, mode, seed, and caller metadata
    line 3: b"params <total-count>\\n"
    then:   every parameter's values, declaration order, row-major,
            as little-endian IEEE-754 float64

Loading rebuilds the network from the spec and copies the values in; a
count or shape disagreement raises CheckpointError.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import CheckpointError
from .network import Network, network_from_spec

MAGIC = b"desknet-checkpoint 1\n"


def save(net: Network, path, seed: int | None = None, meta: dict | None = None) -> None:
    header = {
        "net": net.spec(),
        "params": [{"name": p.name, "shape": list(p.value.shape)} for p in net.params],
        "mode": net.mode,
        "seed": seed,
        "meta": meta or {},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    total = sum(p.value.size for p in net.params)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        f.write(f"params {total}\n".encode())
        for p in net.params:
            f.write(np.ascontiguousarray(p.value, dtype="<f8").tobytes())


def load(path) -> tuple[Network, dict]:
    """Rebuild (network, header) from a checkpoint file."""
    with open(path, "rb") as f:
        if f.readline() != MAGIC:
            raise CheckpointError(f"{path}: not a desknet checkpoint")
        try:
            header = json.loads(f.readline().decode())
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise CheckpointError(f"{path}: bad header: {e}") from None
        marker = f.readline().decode().split()
        if len(marker) != 2 or marker[0] != "params":
            raise CheckpointError(f"{path}: missing params marker")
        total = int(marker[1])
        blob = f.read()

    if len(blob) != total * 8:
        raise CheckpointError(
            f"{path}: {len(blob)} payload bytes, header promises {total * 8}"
        )
    net = network_from_spec(header["net"])
    net.mode = header.get("mode", "train")
    values = np.frombuffer(blob, dtype="<f8")
    offset = 0
    declared = header.get("params", [])
    if len(declared) != len(net.params):
        raise CheckpointError(f"{path}: header lists {len(declared)} params, net has {len(net.params)}")
    for p, d in zip(net.params, declared):
        if p.name != d["name"] or list(p.value.shape) != d["shape"]:
            raise CheckpointError(
                f"{path}: param {d['name']}{d['shape']} does not match rebuilt {p.name}{list(p.value.shape)}"
            )
        n = p.value.size
        p.value[...] = values[offset : offset + n].reshape(p.value.shape)
        offset += n
    if offset != total:
        raise CheckpointError(f"{path}: consumed {offset} of {total} values")
    return net, header
