"""Reconstruct a quantized mesh from a token sequence.

The decoder keeps a triangle frame ``(a, b, t)``: the active half-edge
runs a->b with apex t, and the face just emitted is wound (a, b, t). The
transitions mirror the tokenizer's moves exactly:

========  =========================  ==================
token     emitted face               new frame
========  =========================  ==================
B v s e   (s, e, v)                  (s, e, v)
N w       (t, b, w)                  (t, b, w)
P w       (a, t, w)                  (a, t, w)
========  =========================  ==================

Duplicate vertices (sub-sequence restarts re-emit shared vertices) are
merged on the fly, first occurrence kept. After EOS, faces that collapsed
onto a repeated vertex are dropped unless ``keep_degenerate`` is set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IllegalTokenError
from .grammar import Vocabulary, validate
from .mesh_core import QuantizedMesh
from .tokenizer import TokenSequence


@dataclass
class DecoderState:
    """Streaming reconstruction state: frame + accumulated vertices/faces."""

    frame: tuple[int, int, int] | None = None
    vertices: list[tuple[int, int, int]] = field(default_factory=list)
    faces: list[tuple[int, int, int]] = field(default_factory=list)
    _index: dict[tuple[int, int, int], int] = field(default_factory=dict)

    def intern_vertex(self, xyz: tuple[int, int, int]) -> int:
        """Id of a coordinate triple, merging duplicates as they appear."""
        vid = self._index.get(xyz)
        if vid is None:
            vid = len(self.vertices)
            self._index[xyz] = vid
            self.vertices.append(xyz)
        return vid

    def begin(self, v: int, s: int, e: int) -> None:
        self.faces.append((s, e, v))
        self.frame = (s, e, v)

    def step_next(self, w: int) -> None:
        a, b, t = self.frame
        self.faces.append((t, b, w))
        self.frame = (t, b, w)

    def step_prev(self, w: int) -> None:
        a, b, t = self.frame
        self.faces.append((a, t, w))
        self.frame = (a, t, w)


def detokenize(seq: TokenSequence, keep_degenerate: bool = False) -> QuantizedMesh:
    """Decode a grammatical token sequence into a QuantizedMesh.

    The sequence is validated first; an ungrammatical stream (including
    coordinate ids at or above the stated resolution) raises
    :class:`IllegalTokenError` at the first violating position. Every
    grammatical sequence decodes; with ``keep_degenerate`` the raw face list
    (one face per B/N/P token) is preserved, otherwise collapsed faces are
    dropped.
    """
    vocab = seq.vocabulary
    result = validate(seq.ids, vocab)
    if not result.ok:
        got = seq.ids[result.violation_index] if result.violation_index < len(seq.ids) else None
        raise IllegalTokenError(result.expected, got, result.violation_index)

    ids = seq.ids
    b_id, n_id, p_id = vocab.b_id, vocab.n_id, vocab.p_id
    state = DecoderState()
    i = 1  # skip BOS
    n = len(ids) - 1  # stop before EOS
    while i < n:
        tid = ids[i]
        if tid == b_id:
            v = state.intern_vertex((ids[i + 1], ids[i + 2], ids[i + 3]))
            s = state.intern_vertex((ids[i + 4], ids[i + 5], ids[i + 6]))
            e = state.intern_vertex((ids[i + 7], ids[i + 8], ids[i + 9]))
            state.begin(v, s, e)
            i += 10
        else:
            w = state.intern_vertex((ids[i + 1], ids[i + 2], ids[i + 3]))
            if tid == n_id:
                state.step_next(w)
            else:
                state.step_prev(w)
            i += 4

    faces = state.faces
    if not keep_degenerate:
        faces = [f for f in faces if f[0] != f[1] and f[1] != f[2] and f[2] != f[0]]
    return QuantizedMesh(
        resolution=seq.resolution,
        vertices=np.asarray(state.vertices, dtype=np.int64).reshape(len(state.vertices), 3),
        faces=np.asarray(faces, dtype=np.int64).reshape(len(faces), 3),
    )


@dataclass
class OrientationReport:
    """Result of :func:`orientation_check`.

    ``violations`` lists undirected edges (a < b) traversed in the same
    direction by two faces, which breaks back-face culling.
    """

    consistent: bool
    violations: list[tuple[int, int]]


def orientation_check(mesh: QuantizedMesh) -> OrientationReport:
    """Verify winding consistency over all shared edges.

    Consistent iff no directed edge repeats, which implies every undirected
    edge shared by exactly two faces is traversed in opposite directions.
    """
    if mesh.n_faces == 0:
        return OrientationReport(True, [])
    faces = mesh.faces
    origin = faces.ravel().astype(np.int64)
    dest = np.roll(faces, -1, axis=1).ravel().astype(np.int64)
    v = np.int64(max(mesh.n_vertices, 1))
    dkey = origin * v + dest
    uniq, counts = np.unique(dkey, return_counts=True)
    bad = uniq[counts > 1]
    violations = sorted(
        {(min(int(k // v), int(k % v)), max(int(k // v), int(k % v))) for k in bad}
    )
    return OrientationReport(consistent=not violations, violations=violations)
