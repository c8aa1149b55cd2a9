"""Array-in, array-out bindings for the edgetok mesh tokenizer.

Three operations for ML dataloaders, numerically identical to the
``edgetok`` CLI on the same data:

- :func:`tokenize_ids`: raw float vertices + int faces -> token id array
  (normalize -> quantize -> clean -> tokenize, like ``edgetok tokenize``)
- :func:`detokenize_ids`: token ids -> (vertices, faces) buffers
- :func:`next_token_mask`: prefix ids -> boolean mask over the vocabulary

plus the vocabulary constants (:func:`special_ids`, :func:`vocab_size`)
and a PAD-padded batching helper. Inputs are taken as zero-copy views
whenever the buffers already are contiguous arrays of the right dtype;
otherwise a single copy happens at the boundary.

Everything here is reentrant: no module-level mutable state, fresh
per-call arrays in the core.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from edgetok import (
    RawMesh,
    TokenSequence,
    Vocabulary,
    advance,
    allowed_next,
    clean,
    dequantize,
    detokenize,
    initial_state,
    normalize,
    quantize,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "BoundMeshView",
    "SpecialIds",
    "detokenize_ids",
    "next_token_mask",
    "pad_batch",
    "special_ids",
    "tokenize_ids",
    "vocab_size",
]


class SpecialIds(NamedTuple):
    b: int
    n: int
    p: int
    bos: int
    eos: int
    pad: int


def special_ids(resolution: int = 512) -> SpecialIds:
    """Ids of B/N/P/BOS/EOS/PAD for a given resolution."""
    v = Vocabulary(resolution)
    return SpecialIds(v.b_id, v.n_id, v.p_id, v.bos_id, v.eos_id, v.pad_id)


def vocab_size(resolution: int = 512) -> int:
    """Base vocabulary size: resolution + 6 (518 at the default 512)."""
    return Vocabulary(resolution).base_size


@dataclass(frozen=True)
class BoundMeshView:
    """Contiguous (N,3) float vertices + (M,3) int faces at the boundary."""

    vertices: np.ndarray
    faces: np.ndarray

    @classmethod
    def from_buffers(cls, vertices, faces) -> "BoundMeshView":
        v = np.ascontiguousarray(vertices, dtype=np.float64)
        f = np.ascontiguousarray(faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"vertices must be (N, 3), got {v.shape}")
        if f.ndim != 2 or f.shape[1] != 3:
            raise ValueError(f"faces must be (M, 3), got {f.shape}")
        return cls(vertices=v, faces=f)


def tokenize_ids(vertices, faces, resolution: int = 512) -> np.ndarray:
    """Tokenize raw mesh buffers into an int64 id array.

    Applies the same pipeline as the CLI (normalize into the unit cube,
    quantize at ``resolution``, clean, traverse), so the ids match
    ``edgetok tokenize`` byte for byte. Core diagnostics (non-manifold
    edges, degenerate content) propagate as the core's exceptions.
    """
    view = BoundMeshView.from_buffers(vertices, faces)
    unit, _ = normalize(RawMesh(vertices=view.vertices, faces=view.faces))
    mesh = clean(quantize(unit, resolution))
    return np.asarray(tokenize(mesh).ids, dtype=np.int64)


def detokenize_ids(ids, resolution: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """Decode a token id array into (vertices, faces) buffers.

    Vertices come back as float64 cell centers in the unit cube ((q+0.5)/R,
    so re-quantizing at the same resolution is exact); faces as int64.
    Ungrammatical input raises with the violation index.
    """
    id_list = [int(t) for t in np.asarray(ids).ravel()]
    mesh = detokenize(TokenSequence(resolution=resolution, ids=id_list))
    raw = dequantize(mesh)
    return raw.vertices, mesh.faces


def next_token_mask(ids, resolution: int = 512) -> np.ndarray:
    """Boolean mask (size ``vocab_size(resolution)``) after a prefix.

    The prefix must be grammatically valid (it need not be complete);
    an illegal prefix raises with the violation index.
    """
    state = initial_state(Vocabulary(resolution))
    for pos, tid in enumerate(np.asarray(ids, dtype=np.int64).ravel()):
        state = advance(state, int(tid), position=pos)
    return allowed_next(state)


def pad_batch(sequences, resolution: int = 512) -> np.ndarray:
    """Stack id sequences into a (batch, max_len) array, padded with PAD."""
    rows = [np.asarray(s, dtype=np.int64).ravel() for s in sequences]
    if not rows:
        return np.zeros((0, 0), dtype=np.int64)
    width = max(len(r) for r in rows)
    out = np.full((len(rows), width), special_ids(resolution).pad, dtype=np.int64)
    for i, r in enumerate(rows):
        out[i, : len(r)] = r
    return out
