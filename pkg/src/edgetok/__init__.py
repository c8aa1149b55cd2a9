"""Lossless triangular-mesh tokenization toolkit.

Compresses cleaned quantized triangle meshes into compact 1D token
sequences by an EdgeBreaker-style half-edge traversal, reconstructs them
exactly, and exposes the sequence grammar (validity DFA + next-token
masks) used to constrain auto-regressive mesh generators. A CLI wraps
file formats and a Table-style benchmark harness.
"""

from .detokenizer import DecoderState, OrientationReport, detokenize, orientation_check
from .errors import (
    DegenerateMeshError,
    DuplicateDirectedEdgeError,
    EdgeOveruseError,
    EdgeTokError,
    ErtkFormatError,
    IllegalTokenError,
    NonManifoldError,
    ObjParseError,
    QuantizationRangeError,
)
from .ertk import read_token_file, write_token_file
from .grammar import (
    GrammarState,
    Phase,
    Token,
    TokenKind,
    ValidationResult,
    Vocabulary,
    advance,
    allowed_next,
    face_count_bucket,
    initial_state,
    mask_to_bitset,
    validate,
)
from .halfedge import ABSENT, HalfEdgeMesh, apex, boundary_vertices, build
from .mesh_core import (
    NormalizationTransform,
    QuantizedMesh,
    RawMesh,
    canonical_form,
    canonically_equal,
    clean,
    dequantize,
    normalize,
    parse_obj,
    quantize,
    write_obj,
)
from .tokenizer import (
    TokenSequence,
    TraversalStats,
    stats,
    tokenize,
    tokenize_fixed_side_baseline,
    tokenize_naive,
    tokenize_with_stats,
)

__version__ = "0.1.0"

__all__ = [
    "ABSENT",
    "DecoderState",
    "DegenerateMeshError",
    "DuplicateDirectedEdgeError",
    "EdgeOveruseError",
    "EdgeTokError",
    "ErtkFormatError",
    "GrammarState",
    "HalfEdgeMesh",
    "IllegalTokenError",
    "NonManifoldError",
    "NormalizationTransform",
    "ObjParseError",
    "OrientationReport",
    "Phase",
    "QuantizationRangeError",
    "QuantizedMesh",
    "RawMesh",
    "Token",
    "TokenKind",
    "TokenSequence",
    "TraversalStats",
    "ValidationResult",
    "Vocabulary",
    "advance",
    "allowed_next",
    "apex",
    "boundary_vertices",
    "build",
    "canonical_form",
    "canonically_equal",
    "clean",
    "dequantize",
    "detokenize",
    "face_count_bucket",
    "initial_state",
    "mask_to_bitset",
    "normalize",
    "orientation_check",
    "parse_obj",
    "quantize",
    "read_token_file",
    "stats",
    "tokenize",
    "tokenize_fixed_side_baseline",
    "tokenize_naive",
    "tokenize_with_stats",
    "validate",
    "write_obj",
    "write_token_file",
]
