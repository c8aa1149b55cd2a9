"""Half-edge connectivity for triangle meshes.

Faces are stored as flat parallel arrays: face ``i`` owns half-edges
``3i, 3i+1, 3i+2`` running ``v0->v1, v1->v2, v2->v0`` in the face's listed
order, so ``next`` and ``prev`` are index arithmetic and the face anchor
(the first half-edge of each face) is ``3i``. ``twin`` pairs each directed
edge ``a->b`` with ``b->a`` on the adjacent face and holds ``ABSENT`` (-1)
on boundary edges.

The structure is immutable after :func:`build` and carries no traversal
state; visited flags belong to whoever walks it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateMeshError,
    DuplicateDirectedEdgeError,
    EdgeOveruseError,
)
from .mesh_core import QuantizedMesh

ABSENT = -1


@dataclass(eq=False)
class HalfEdgeMesh:
    """Immutable half-edge arrays for a consistently wound triangle mesh."""

    origin: np.ndarray           # (H,) origin vertex of each half-edge
    face: np.ndarray             # (H,) owning face
    next: np.ndarray             # (H,) next half-edge within the face 3-cycle
    twin: np.ndarray             # (H,) opposite half-edge or ABSENT
    face_anchor: np.ndarray      # (F,) first half-edge of each face
    boundary_vertex: np.ndarray  # (V,) True iff incident to a twin-less edge
    n_vertices: int
    n_faces: int
    prev: np.ndarray = field(init=False)  # (H,) next∘next

    def __post_init__(self):
        self.prev = self.next[self.next]
        for arr in (
            self.origin, self.face, self.next, self.twin,
            self.face_anchor, self.boundary_vertex, self.prev,
        ):
            arr.setflags(write=False)

    @property
    def n_halfedges(self) -> int:
        return len(self.origin)

    def destination(self, h: int) -> int:
        return int(self.origin[self.next[h]])


def build(mesh: QuantizedMesh) -> HalfEdgeMesh:
    """Build the half-edge structure of a cleaned quantized mesh.

    Twins are paired through a directed-edge map (``a->b`` twins ``b->a``).
    Raises :class:`EdgeOveruseError` when an undirected edge lies on more
    than two faces and :class:`DuplicateDirectedEdgeError` when the same
    directed edge appears twice (non-manifold surface or inconsistent
    winding); both carry the offending vertex pairs.
    """
    if mesh.n_faces < 1:
        raise DegenerateMeshError("cannot build half-edge structure: no faces")
    faces = mesh.faces
    n_vertices = mesh.n_vertices

    if bool(
        ((faces[:, 0] == faces[:, 1])
         | (faces[:, 1] == faces[:, 2])
         | (faces[:, 2] == faces[:, 0])).any()
    ):
        raise DegenerateMeshError("collapsed face (repeated vertex index); run clean() first")

    origin = faces.ravel().astype(np.int64)
    dest = np.roll(faces, -1, axis=1).ravel().astype(np.int64)
    n_half = len(origin)
    base = np.arange(0, n_half, 3, dtype=np.int64).repeat(3)
    nxt = base + (np.arange(n_half, dtype=np.int64) + 1) % 3

    v = np.int64(n_vertices)
    dkey = origin * v + dest
    ukey = np.minimum(origin, dest) * v + np.maximum(origin, dest)

    # Overuse (>2 faces on an undirected edge) subsumes a directed duplicate,
    # so it is diagnosed first as the more specific failure.
    uniq_u, counts_u = np.unique(ukey, return_counts=True)
    overused = uniq_u[counts_u > 2]
    if len(overused):
        pairs = [(int(k // v), int(k % v)) for k in overused]
        raise EdgeOveruseError(
            f"undirected edge(s) on more than two faces: {_fmt_pairs(pairs)}", pairs
        )
    uniq_d, counts_d = np.unique(dkey, return_counts=True)
    dups = uniq_d[counts_d > 1]
    if len(dups):
        pairs = [(int(k // v), int(k % v)) for k in dups]
        raise DuplicateDirectedEdgeError(
            f"duplicate directed edge(s): {_fmt_pairs(pairs)} "
            "(non-manifold or inconsistent winding)", pairs
        )

    # Directed keys are unique here, so a sorted lookup pairs each edge with
    # its reversal when present.
    sorter = np.argsort(dkey)
    skey = dkey[sorter]
    rkey = dest * v + origin
    pos = np.searchsorted(skey, rkey)
    pos_c = np.minimum(pos, n_half - 1)
    cand = sorter[pos_c]
    twin = np.where((pos < n_half) & (skey[pos_c] == rkey), cand, ABSENT)

    boundary = np.zeros(n_vertices, dtype=bool)
    open_edges = twin == ABSENT
    boundary[origin[open_edges]] = True
    boundary[dest[open_edges]] = True

    return HalfEdgeMesh(
        origin=origin,
        face=np.arange(n_half, dtype=np.int64) // 3,
        next=nxt,
        twin=twin.astype(np.int64),
        face_anchor=np.arange(0, n_half, 3, dtype=np.int64),
        boundary_vertex=boundary,
        n_vertices=n_vertices,
        n_faces=mesh.n_faces,
    )


def apex(mesh: HalfEdgeMesh, h: int) -> int:
    """The vertex of ``h``'s face that does not lie on ``h``."""
    return int(mesh.origin[mesh.prev[h]])


def boundary_vertices(mesh: HalfEdgeMesh) -> np.ndarray:
    """Vertices incident to at least one twin-less half-edge, ascending."""
    return np.flatnonzero(mesh.boundary_vertex)


def _fmt_pairs(pairs: list[tuple[int, int]], limit: int = 5) -> str:
    shown = ", ".join(f"{a}->{b}" for a, b in pairs[:limit])
    if len(pairs) > limit:
        shown += f", ... ({len(pairs)} total)"
    return shown
