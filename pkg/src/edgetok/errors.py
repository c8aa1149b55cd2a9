"""Exception types shared across the package.

The CLI maps these onto stable exit codes (see ``edgetok.cli``):
input/content problems exit 1, non-manifold connectivity exits 2,
OS-level I/O exits 3, and ungrammatical token streams exit 4.
"""

from __future__ import annotations


class EdgeTokError(Exception):
    """Base class for all errors raised by this package."""


class ObjParseError(EdgeTokError):
    """Malformed OBJ content (bad numeric literal, bad face record, ...)."""


class DegenerateMeshError(EdgeTokError):
    """Mesh content that cannot be processed (zero extent, zero faces)."""


class QuantizationRangeError(EdgeTokError):
    """Coordinate outside [0, 1] beyond tolerance at quantization time."""


class NonManifoldError(EdgeTokError):
    """Connectivity that the half-edge structure cannot represent.

    ``edges`` holds the offending (origin, destination) vertex pairs.
    """

    def __init__(self, message: str, edges: list[tuple[int, int]]):
        super().__init__(message)
        self.edges = edges


class DuplicateDirectedEdgeError(NonManifoldError):
    """The same directed edge a->b appears on two faces.

    Either the surface is non-manifold or two adjacent faces disagree
    on winding.
    """


class EdgeOveruseError(NonManifoldError):
    """An undirected edge is shared by more than two faces."""


class IllegalTokenError(EdgeTokError):
    """A token not allowed by the sequence grammar at its position.

    ``expected`` is the set of token ids that would have been legal,
    ``got`` the offending id, ``position`` its index in the stream
    (``len(stream)`` when the stream ended before reaching EOS).
    """

    def __init__(self, expected: frozenset[int], got: int | None, position: int | None):
        self.expected = expected
        self.got = got
        self.position = position
        want = ",".join(str(i) for i in sorted(expected)) or "<none>"
        if got is None:
            msg = f"sequence ended at position {position}, expected one of {{{want}}}"
        else:
            msg = f"illegal token {got} at position {position}, expected one of {{{want}}}"
        super().__init__(msg)


class ErtkFormatError(EdgeTokError):
    """Structurally invalid ERTK token file."""
