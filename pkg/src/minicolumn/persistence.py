"""Versioned save/load of encoders, layers and model bundles.

Snapshots are JSON documents with explicit field names. Floats are written
with Python's shortest round-trip representation, so permanences, duty
cycles and rng state survive a save/load cycle bit-exactly and a resumed run
reproduces an uninterrupted one.
"""

from __future__ import annotations

import json
from pathlib import Path

__all__ = [
    "FORMAT_VERSION",
    "SnapshotError",
    "SnapshotFormatError",
    "SnapshotValidationError",
    "save",
    "load",
]

FORMAT_VERSION = 1


class SnapshotError(Exception):
    """Base class for snapshot problems."""


class SnapshotFormatError(SnapshotError):
    """The file's format version or kind is not understood."""


class SnapshotValidationError(SnapshotError):
    """The file parsed but its contents violate a model invariant."""


def _registry() -> dict:
    from .encoders import CategoryEncoder, ScalarEncoder
    from .experiments import SequenceModel
    from .pattern import PatternLayer
    from .pooling import PoolingLayer
    from .transition import TmLayer

    return {
        "pattern_layer": PatternLayer,
        "pooling_layer": PoolingLayer,
        "tm_layer": TmLayer,
        "category_encoder": CategoryEncoder,
        "scalar_encoder": ScalarEncoder,
        "sequence_model": SequenceModel,
    }


def _kind_of(model) -> str:
    # Subclass check order matters: PoolingLayer is a PatternLayer.
    registry = _registry()
    for kind in ("pooling_layer",):
        if isinstance(model, registry[kind]):
            return kind
    for kind, cls in registry.items():
        if type(model) is cls:
            return kind
    raise SnapshotError(f"cannot snapshot object of type {type(model).__name__}")


def save(model, path: str | Path) -> None:
    """Write a self-describing snapshot of the model to ``path``."""
    document = {
        "format_version": FORMAT_VERSION,
        "kind": _kind_of(model),
        "state": model.to_state(),
    }
    path = Path(path)
    try:
        with path.open("w") as fh:
            json.dump(document, fh)
            fh.write("\n")
    except OSError as exc:
        raise SnapshotError(f"cannot write snapshot {path}: {exc}") from exc


def load(path: str | Path):
    """Rebuild a model from a snapshot; subsequent outputs are bit-identical."""
    path = Path(path)
    try:
        with path.open("r") as fh:
            document = json.load(fh)
    except OSError as exc:
        raise SnapshotError(f"cannot read snapshot {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SnapshotError(
            f"snapshot {path}: parse error at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from exc
    if not isinstance(document, dict) or "format_version" not in document:
        raise SnapshotFormatError(f"snapshot {path}: missing format_version")
    version = document["format_version"]
    if version != FORMAT_VERSION:
        raise SnapshotFormatError(
            f"snapshot {path}: unknown format_version {version!r} "
            f"(this build reads version {FORMAT_VERSION})"
        )
    registry = _registry()
    kind = document.get("kind")
    if kind not in registry:
        raise SnapshotFormatError(f"snapshot {path}: unknown kind {kind!r}")
    try:
        return registry[kind].from_state(document["state"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotValidationError(f"snapshot {path}: invalid state: {exc}") from exc
