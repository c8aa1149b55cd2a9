"""Mesh ingestion, normalization, vertex quantization, and cleaning.

The pipeline this module supports is::

    parse_obj -> normalize -> quantize -> clean -> (tokenizer)

``RawMesh`` is the continuous, I/O-facing form; ``QuantizedMesh`` holds
integer grid coordinates in ``[0, resolution)`` and is the canonical
input/output of the tokenizer. All functions are pure: they never mutate
their inputs and are safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeshError, ObjParseError, QuantizationRangeError

# Input slack for quantize(): coordinates may stray this far outside [0, 1]
# (floating-point residue of normalization) and are clamped, not rejected.
COORD_TOLERANCE = 1e-9


def _as_vertex_array(vertices, dtype) -> np.ndarray:
    arr = np.asarray(vertices, dtype=dtype)
    if arr.size == 0:
        return arr.reshape(0, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"vertices must be (N, 3), got shape {arr.shape}")
    return arr


def _as_face_array(faces, n_vertices: int) -> np.ndarray:
    arr = np.asarray(faces, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"faces must be (M, 3), got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= n_vertices):
        raise ValueError("face index out of range")
    return arr


@dataclass(eq=False)
class RawMesh:
    """Real-valued vertex positions plus a 0-based triangle index list."""

    vertices: np.ndarray  # (N, 3) float64
    faces: np.ndarray     # (M, 3) int64

    def __post_init__(self):
        self.vertices = _as_vertex_array(self.vertices, np.float64)
        self.faces = _as_face_array(self.faces, len(self.vertices))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)


@dataclass(frozen=True)
class NormalizationTransform:
    """Uniform map of a source bounding box into the unit cube.

    ``apply`` computes ``(p + translation) * scale``; ``invert`` undoes it.
    """

    translation: tuple[float, float, float]
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    def apply(self, points) -> np.ndarray:
        return (np.asarray(points, dtype=np.float64) + self.translation) * self.scale

    def invert(self, points) -> np.ndarray:
        return np.asarray(points, dtype=np.float64) / self.scale - self.translation


@dataclass(eq=False)
class QuantizedMesh:
    """Integer vertex grid coordinates in [0, resolution) plus faces.

    After :func:`clean` no two vertices share a grid cell, no face repeats
    an index, and no two faces are cyclic rotations of each other.
    """

    resolution: int
    vertices: np.ndarray  # (N, 3) int64
    faces: np.ndarray     # (M, 3) int64

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")
        self.vertices = _as_vertex_array(self.vertices, np.int64)
        if self.vertices.size and (
            self.vertices.min() < 0 or self.vertices.max() >= self.resolution
        ):
            raise ValueError("vertex component outside [0, resolution)")
        self.faces = _as_face_array(self.faces, len(self.vertices))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuantizedMesh):
            return NotImplemented
        return (
            self.resolution == other.resolution
            and self.vertices.shape == other.vertices.shape
            and self.faces.shape == other.faces.shape
            and bool(np.array_equal(self.vertices, other.vertices))
            and bool(np.array_equal(self.faces, other.faces))
        )


def parse_obj(text) -> RawMesh:
    """Parse OBJ-family content into a RawMesh.

    Only ``v`` and ``f`` records are interpreted; every other record type is
    ignored. ``f`` entries may carry ``/``-suffixed texture/normal refs,
    which are dropped. N-gons are fan-triangulated as
    (i0,i1,i2),(i0,i2,i3),...; negative indices are resolved relative to the
    vertex count at the point the face line appears, per OBJ convention.

    Accepts a string or any iterable of lines. Raises :class:`ObjParseError`
    on malformed numerics, faces with fewer than 3 vertices, or indices out
    of range.
    """
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = text

    vertices: list[tuple[float, float, float]] = []
    # Faces are collected with raw resolved indices and validated against the
    # final vertex count, so "f" may legally precede "v".
    faces: list[tuple[int, int, int]] = []

    for lineno, line in enumerate(lines, start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ObjParseError(f"line {lineno}: vertex needs 3 coordinates")
            try:
                x, y, z = float(parts[1]), float(parts[2]), float(parts[3])
            except ValueError as exc:
                raise ObjParseError(f"line {lineno}: malformed numeric literal") from exc
            vertices.append((x, y, z))
        elif tag == "f":
            refs = parts[1:]
            if len(refs) < 3:
                raise ObjParseError(f"line {lineno}: face with fewer than 3 vertices")
            idx = []
            for ref in refs:
                head = ref.split("/", 1)[0]
                try:
                    raw = int(head)
                except ValueError as exc:
                    raise ObjParseError(f"line {lineno}: malformed face index {ref!r}") from exc
                if raw == 0:
                    raise ObjParseError(f"line {lineno}: face index 0 is invalid (OBJ is 1-based)")
                if raw < 0:
                    resolved = len(vertices) + raw
                    if resolved < 0:
                        raise ObjParseError(f"line {lineno}: relative face index out of range")
                else:
                    resolved = raw - 1
                idx.append(resolved)
            for k in range(1, len(idx) - 1):
                faces.append((idx[0], idx[k], idx[k + 1]))
        # all other record types (vn, vt, o, g, usemtl, s, l, ...) ignored

    face_arr = np.asarray(faces, dtype=np.int64).reshape(len(faces), 3)
    if len(faces) and face_arr.max() >= len(vertices):
        raise ObjParseError("face index out of range")
    return RawMesh(
        vertices=np.asarray(vertices, dtype=np.float64).reshape(len(vertices), 3),
        faces=face_arr,
    )


def write_obj(mesh: QuantizedMesh) -> str:
    """Serialize a QuantizedMesh as OBJ text.

    ``v`` lines carry dequantized (cell-center) coordinates at 9 significant
    digits; ``f`` lines are 1-based. Re-parsing and re-quantizing the output
    at the same resolution reproduces the input exactly.
    """
    raw = dequantize(mesh)
    out = []
    for x, y, z in raw.vertices:
        out.append(f"v {x:.9g} {y:.9g} {z:.9g}")
    for a, b, c in mesh.faces:
        out.append(f"f {a + 1} {b + 1} {c + 1}")
    out.append("")
    return "\n".join(out)


def normalize(mesh: RawMesh) -> tuple[RawMesh, NormalizationTransform]:
    """Translate and uniformly scale a mesh into the unit cube [0,1]^3.

    The bounding-box minimum moves to the origin and all axes are divided by
    the largest axis extent, so the longest axis spans exactly [0, 1] and the
    others fit inside. Raises :class:`DegenerateMeshError` when every vertex
    is identical (zero extent).
    """
    if mesh.n_vertices < 1:
        raise DegenerateMeshError("cannot normalize a mesh with no vertices")
    mins = mesh.vertices.min(axis=0)
    extent = float((mesh.vertices.max(axis=0) - mins).max())
    if extent <= 0.0:
        raise DegenerateMeshError("degenerate extent: all vertices identical")
    # Division (not multiplication by 1/extent) keeps the longest-axis bounds
    # exactly 0.0 and 1.0 in floating point.
    out = (mesh.vertices - mins) / extent
    transform = NormalizationTransform(
        translation=(-float(mins[0]), -float(mins[1]), -float(mins[2])),
        scale=1.0 / extent,
    )
    return RawMesh(vertices=out, faces=mesh.faces), transform


def quantize(mesh: RawMesh, resolution: int) -> QuantizedMesh:
    """Snap unit-cube coordinates onto an integer grid.

    Each component maps to ``min(floor(v * resolution), resolution - 1)``.
    Coordinates outside [0, 1] by more than ``COORD_TOLERANCE`` raise
    :class:`QuantizationRangeError`; closer strays are clamped. The result is
    not yet cleaned: duplicate cells and collapsed faces survive.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    v = mesh.vertices
    if v.size:
        lo, hi = float(v.min()), float(v.max())
        if lo < -COORD_TOLERANCE or hi > 1.0 + COORD_TOLERANCE:
            raise QuantizationRangeError(
                f"coordinate outside [0, 1]: range [{lo}, {hi}]"
            )
    q = np.floor(v * resolution).astype(np.int64)
    np.clip(q, 0, resolution - 1, out=q)
    return QuantizedMesh(resolution=resolution, vertices=q, faces=mesh.faces.copy())


def dequantize(mesh: QuantizedMesh) -> RawMesh:
    """Map grid coordinates back to cell centers: ``(q + 0.5) / resolution``.

    ``quantize(dequantize(m), m.resolution) == m`` exactly.
    """
    v = (mesh.vertices.astype(np.float64) + 0.5) / mesh.resolution
    return RawMesh(vertices=v, faces=mesh.faces.copy())


def _vertex_keys(mesh: QuantizedMesh) -> np.ndarray:
    r = np.int64(mesh.resolution)
    v = mesh.vertices
    return (v[:, 0] * r + v[:, 1]) * r + v[:, 2]


def clean(mesh: QuantizedMesh) -> QuantizedMesh:
    """Merge duplicate grid cells and drop collapsed / duplicate faces.

    - vertices with identical integer triples merge (first occurrence kept,
      faces remapped; vertex order otherwise preserved)
    - faces with any repeated index are removed
    - faces equal up to cyclic rotation with the same winding are removed
      (opposite-winding duplicates are kept)

    Idempotent: ``clean(clean(m)) == clean(m)``.
    """
    keys = _vertex_keys(mesh)
    _, first_idx, inverse = np.unique(keys, return_index=True, return_inverse=True)
    keep = np.sort(first_idx)
    # rank of each unique key in first-occurrence order
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    vertices = mesh.vertices[keep]
    remap = rank[inverse]
    faces = remap[mesh.faces] if mesh.n_faces else mesh.faces

    if len(faces):
        distinct = (
            (faces[:, 0] != faces[:, 1])
            & (faces[:, 1] != faces[:, 2])
            & (faces[:, 2] != faces[:, 0])
        )
        faces = faces[distinct]
    if len(faces):
        canon = _least_rotation(faces, n_vertices=len(vertices))
        k = np.int64(len(vertices))
        fkeys = (canon[:, 0] * k + canon[:, 1]) * k + canon[:, 2]
        _, first_face = np.unique(fkeys, return_index=True)
        faces = faces[np.sort(first_face)]

    return QuantizedMesh(resolution=mesh.resolution, vertices=vertices, faces=faces)


def _least_rotation(faces: np.ndarray, n_vertices: int) -> np.ndarray:
    """Per row, the lexicographically least of the three cyclic rotations."""
    k = np.int64(max(n_vertices, 1))
    rots = np.stack(
        [faces, np.roll(faces, -1, axis=1), np.roll(faces, -2, axis=1)], axis=1
    )  # (M, 3, 3)
    rkeys = (rots[:, :, 0] * k + rots[:, :, 1]) * k + rots[:, :, 2]
    pick = rkeys.argmin(axis=1)
    return rots[np.arange(len(faces)), pick]


def canonical_form(mesh: QuantizedMesh) -> tuple[np.ndarray, np.ndarray]:
    """Order-independent form: sorted vertex set + rotation-normalized faces.

    Vertices are sorted lexicographically and faces re-indexed, rotated to
    their least cyclic rotation (winding preserved), then sorted. Two meshes
    with merged vertices are equal as sets of geometry iff their canonical
    forms are array-equal.
    """
    v = mesh.vertices
    order = np.lexsort((v[:, 2], v[:, 1], v[:, 0]))
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    verts = v[order]
    faces = rank[mesh.faces] if mesh.n_faces else mesh.faces
    if len(faces):
        faces = _least_rotation(faces, n_vertices=len(verts))
        faces = faces[np.lexsort((faces[:, 2], faces[:, 1], faces[:, 0]))]
    return verts, faces


def canonically_equal(a: QuantizedMesh, b: QuantizedMesh) -> bool:
    """Mesh equality up to vertex reindexing and face rotation/permutation."""
    if a.resolution != b.resolution:
        return False
    va, fa = canonical_form(a)
    vb, fb = canonical_form(b)
    return (
        va.shape == vb.shape
        and fa.shape == fb.shape
        and bool(np.array_equal(va, vb))
        and bool(np.array_equal(fa, fb))
    )
