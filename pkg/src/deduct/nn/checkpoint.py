"""Parameter checkpoints: named float64 arrays plus a JSON metadata blob.

Round trips are bit-exact for doubles (raw ``.npy`` encoding inside the
archive), which the tests assert byte-for-byte.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import DatasetIOError

FORMAT_VERSION = 1


def save_params(path, params, meta=None):
    payload = dict(params)
    header = {"format_version": FORMAT_VERSION, "meta": meta or {}}
    payload["__meta__"] = np.frombuffer(
        json.dumps(header, sort_keys=True).encode("utf-8"), dtype=np.uint8
    )
    np.savez(path, **payload)


def load_params(path):
    """Returns (params, meta)."""
    try:
        archive = np.load(path, allow_pickle=False)
    except OSError as exc:
        raise DatasetIOError(f"cannot open checkpoint: {exc}")
    if "__meta__" not in archive:
        raise DatasetIOError("not a parameter checkpoint (missing metadata)")
    header = json.loads(bytes(archive["__meta__"]).decode("utf-8"))
    if header.get("format_version") != FORMAT_VERSION:
        raise DatasetIOError(f"unsupported checkpoint version {header.get('format_version')}")
    params = {k: archive[k] for k in archive.files if k != "__meta__"}
    return params, header.get("meta", {})
