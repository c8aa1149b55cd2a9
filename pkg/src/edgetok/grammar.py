"""Token vocabulary, sequence-validity DFA, and next-token masks.

The id layout for a resolution-R vocabulary is fixed:

====================  ======================================
ids 0 .. R-1          coordinate tokens, Coord(value) = id
R                     B (begin a new traversal sub-sequence)
R + 1                 N (move across the next-twin half-edge)
R + 2                 P (move across the previous-twin half-edge)
R + 3                 BOS
R + 4                 EOS
R + 5                 PAD (batch alignment only, never mid-sequence)
R + 6 .. R + 9        optional extension: face-count buckets 0..3
R + 10                optional extension: unconditional bucket
====================  ======================================

Base vocabulary size is R + 6 (518 at R = 512). The DFA accepts exactly
the streams the detokenizer can decode:

    BOS (B Coord^9 (N|P Coord^3 | B Coord^9)*) EOS

``allowed_next`` exposes the same transition relation as a boolean mask
over vocabulary ids for constraining auto-regressive samplers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import IllegalTokenError

# Face-count bucket upper bounds (inclusive); counts above the last bound
# fall in bucket 3, and bucket 4 is the reserved unconditional token.
FACE_BUCKET_BOUNDS = (1000, 2000, 4000)
UNCONDITIONAL_BUCKET = 4


class TokenKind(enum.Enum):
    COORD = "coord"
    B = "B"
    N = "N"
    P = "P"
    BOS = "BOS"
    EOS = "EOS"
    PAD = "PAD"
    FACE_BUCKET = "face_bucket"


@dataclass(frozen=True, slots=True)
class Token:
    """One symbol of the discrete alphabet.

    ``value`` is the grid coordinate for COORD tokens and the bucket index
    for FACE_BUCKET tokens; it is None for the singleton kinds.
    """

    kind: TokenKind
    value: int | None = None

    def __post_init__(self):
        if self.kind in (TokenKind.COORD, TokenKind.FACE_BUCKET):
            if self.value is None or self.value < 0:
                raise ValueError(f"{self.kind.name} token requires a non-negative value")
        elif self.value is not None:
            raise ValueError(f"{self.kind.name} token takes no value")


@dataclass(frozen=True)
class Vocabulary:
    """Bijective id map for a given quantization resolution.

    ``include_face_buckets`` appends the five conditioning ids above the
    base vocabulary; the tokenizer never emits them.
    """

    resolution: int
    include_face_buckets: bool = False

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")

    @property
    def b_id(self) -> int:
        return self.resolution

    @property
    def n_id(self) -> int:
        return self.resolution + 1

    @property
    def p_id(self) -> int:
        return self.resolution + 2

    @property
    def bos_id(self) -> int:
        return self.resolution + 3

    @property
    def eos_id(self) -> int:
        return self.resolution + 4

    @property
    def pad_id(self) -> int:
        return self.resolution + 5

    @property
    def base_size(self) -> int:
        return self.resolution + 6

    @property
    def size(self) -> int:
        return self.base_size + 5 if self.include_face_buckets else self.base_size

    def bucket_id(self, k: int) -> int:
        if not self.include_face_buckets:
            raise ValueError("face-bucket ids need include_face_buckets=True")
        if not 0 <= k <= UNCONDITIONAL_BUCKET:
            raise ValueError(f"bucket index out of range: {k}")
        return self.base_size + k

    def token(self, token_id: int) -> Token:
        r = self.resolution
        if 0 <= token_id < r:
            return Token(TokenKind.COORD, token_id)
        special = {
            r: Token(TokenKind.B),
            r + 1: Token(TokenKind.N),
            r + 2: Token(TokenKind.P),
            r + 3: Token(TokenKind.BOS),
            r + 4: Token(TokenKind.EOS),
            r + 5: Token(TokenKind.PAD),
        }
        if token_id in special:
            return special[token_id]
        if self.include_face_buckets and self.base_size <= token_id < self.size:
            return Token(TokenKind.FACE_BUCKET, token_id - self.base_size)
        raise ValueError(f"token id out of vocabulary: {token_id}")

    def id_of(self, token: Token) -> int:
        if token.kind is TokenKind.COORD:
            if token.value >= self.resolution:
                raise ValueError(f"coordinate {token.value} >= resolution {self.resolution}")
            return token.value
        if token.kind is TokenKind.FACE_BUCKET:
            return self.bucket_id(token.value)
        return {
            TokenKind.B: self.b_id,
            TokenKind.N: self.n_id,
            TokenKind.P: self.p_id,
            TokenKind.BOS: self.bos_id,
            TokenKind.EOS: self.eos_id,
            TokenKind.PAD: self.pad_id,
        }[token.kind]


class Phase(enum.Enum):
    EXPECT_BOS = "expect_bos"
    EXPECT_B = "expect_b"
    VERTEX_RUN = "vertex_run"        # `remaining` coord tokens still due
    FACE_TYPE_OR_END = "face_type_or_end"
    ACCEPTED = "accepted"            # terminal


@dataclass(frozen=True, slots=True)
class GrammarState:
    """DFA state plus face-type counters; immutable, advanced functionally."""

    vocab: Vocabulary
    phase: Phase = Phase.EXPECT_BOS
    remaining: int = 0
    b_count: int = 0
    n_count: int = 0
    p_count: int = 0

    @property
    def faces_seen(self) -> int:
        return self.b_count + self.n_count + self.p_count


@dataclass(frozen=True, slots=True)
class ValidationResult:
    ok: bool
    violation_index: int | None = None
    expected: frozenset[int] | None = None


def initial_state(vocab: Vocabulary | None = None) -> GrammarState:
    """Fresh DFA state expecting BOS; defaults to the 518-token vocabulary."""
    return GrammarState(vocab=vocab if vocab is not None else Vocabulary(512))


def _expected_ids(state: GrammarState) -> frozenset[int]:
    v = state.vocab
    if state.phase is Phase.EXPECT_BOS:
        return frozenset((v.bos_id,))
    if state.phase is Phase.EXPECT_B:
        return frozenset((v.b_id,))
    if state.phase is Phase.VERTEX_RUN:
        return frozenset(range(v.resolution))
    if state.phase is Phase.FACE_TYPE_OR_END:
        return frozenset((v.b_id, v.n_id, v.p_id, v.eos_id))
    return frozenset()


def advance(state: GrammarState, token: Token | int, position: int | None = None) -> GrammarState:
    """Consume one token, returning the successor state.

    Raises :class:`IllegalTokenError` (with the expected id set) when the
    token is not allowed here or the state is already terminal.
    """
    v = state.vocab
    tid = v.id_of(token) if isinstance(token, Token) else int(token)

    def reject() -> IllegalTokenError:
        return IllegalTokenError(_expected_ids(state), tid, position)

    phase = state.phase
    if phase is Phase.VERTEX_RUN:
        if not 0 <= tid < v.resolution:
            raise reject()
        if state.remaining == 1:
            return replace(state, phase=Phase.FACE_TYPE_OR_END, remaining=0)
        return replace(state, remaining=state.remaining - 1)
    if phase is Phase.FACE_TYPE_OR_END:
        if tid == v.n_id:
            return replace(state, phase=Phase.VERTEX_RUN, remaining=3,
                           n_count=state.n_count + 1)
        if tid == v.p_id:
            return replace(state, phase=Phase.VERTEX_RUN, remaining=3,
                           p_count=state.p_count + 1)
        if tid == v.b_id:
            return replace(state, phase=Phase.VERTEX_RUN, remaining=9,
                           b_count=state.b_count + 1)
        if tid == v.eos_id:
            return replace(state, phase=Phase.ACCEPTED)
        raise reject()
    if phase is Phase.EXPECT_BOS:
        if tid == v.bos_id:
            return replace(state, phase=Phase.EXPECT_B)
        raise reject()
    if phase is Phase.EXPECT_B:
        if tid == v.b_id:
            return replace(state, phase=Phase.VERTEX_RUN, remaining=9,
                           b_count=state.b_count + 1)
        raise reject()
    raise reject()  # ACCEPTED is terminal


def allowed_next(state: GrammarState) -> np.ndarray:
    """Boolean mask over vocabulary ids, True exactly where advance accepts."""
    v = state.vocab
    mask = np.zeros(v.size, dtype=bool)
    if state.phase is Phase.VERTEX_RUN:
        mask[: v.resolution] = True
    elif state.phase is Phase.FACE_TYPE_OR_END:
        mask[[v.b_id, v.n_id, v.p_id, v.eos_id]] = True
    elif state.phase is Phase.EXPECT_BOS:
        mask[v.bos_id] = True
    elif state.phase is Phase.EXPECT_B:
        mask[v.b_id] = True
    return mask


def validate(ids, vocab: Vocabulary) -> ValidationResult:
    """Check a full id sequence against the DFA without raising.

    ``ok`` iff the sequence drives the DFA from the initial state to the
    accepting state. On failure, ``violation_index`` is the offending
    position (``len(ids)`` for truncation) and ``expected`` the legal ids
    there. Behaves exactly like folding :func:`advance`.
    """
    r = vocab.resolution
    b, n, p = vocab.b_id, vocab.n_id, vocab.p_id
    bos, eos = vocab.bos_id, vocab.eos_id
    # phase codes: 0 expect_bos, 1 expect_b, 2 vertex_run, 3 face_or_end, 4 accepted
    phase = 0
    remaining = 0
    count = 0
    for i, raw in enumerate(ids):
        count = i + 1
        tid = int(raw)
        if phase == 2:
            if 0 <= tid < r:
                remaining -= 1
                if remaining == 0:
                    phase = 3
                continue
        elif phase == 3:
            if tid == n or tid == p:
                phase, remaining = 2, 3
                continue
            if tid == b:
                phase, remaining = 2, 9
                continue
            if tid == eos:
                phase = 4
                continue
        elif phase == 0:
            if tid == bos:
                phase = 1
                continue
        elif phase == 1:
            if tid == b:
                phase, remaining = 2, 9
                continue
        return ValidationResult(False, i, _phase_expected(phase, vocab))
    if phase != 4:
        return ValidationResult(False, count, _phase_expected(phase, vocab))
    return ValidationResult(True)


def _phase_expected(phase: int, vocab: Vocabulary) -> frozenset[int]:
    if phase == 0:
        return frozenset((vocab.bos_id,))
    if phase == 1:
        return frozenset((vocab.b_id,))
    if phase == 2:
        return frozenset(range(vocab.resolution))
    if phase == 3:
        return frozenset((vocab.b_id, vocab.n_id, vocab.p_id, vocab.eos_id))
    return frozenset()


def face_count_bucket(n: int) -> Token:
    """Bucket a face count for coarse conditioning.

    Buckets: 0 for n <= 1000, 1 for 1000 < n <= 2000, 2 for 2000 < n <= 4000,
    3 for n > 4000. Bucket 4 is the unconditional token and is never returned
    here. Raises ValueError for n < 1.
    """
    if n < 1:
        raise ValueError("face count must be >= 1")
    for k, bound in enumerate(FACE_BUCKET_BOUNDS):
        if n <= bound:
            return Token(TokenKind.FACE_BUCKET, k)
    return Token(TokenKind.FACE_BUCKET, len(FACE_BUCKET_BOUNDS))


def mask_to_bitset(mask: np.ndarray) -> bytes:
    """Pack a boolean mask into ceil(V/8) bytes, little-endian bit order."""
    return np.packbits(mask.astype(np.uint8), bitorder="little").tobytes()
